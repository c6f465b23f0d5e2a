"""
Tests for the on-disk Painleve table cache
"""
import logging
import os
import sys

import numpy as np
import pytest

# Add the project directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cache_file import HEADER, MAGIC, CacheFile, CacheManager
from config import Config
from errors import DataError
from painleve import PainleveTable

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')


class CountingBuilder:
    """Stands in for solve_hastings_mcleod and counts rebuilds"""

    def __init__(self, table):
        self.table = table
        self.calls = 0

    def __call__(self, **kwargs):
        self.calls += 1
        return self.table


class TestCacheFile:
    """Binary layout"""

    def test_round_trip(self, painleve_table):
        cache = CacheFile.from_table(painleve_table)
        again = CacheFile.from_bytes(cache.to_bytes()).to_table()
        for column in ('grid', 'q', 'q_prime', 'E', 'R', 'J'):
            assert np.array_equal(getattr(again, column), getattr(painleve_table, column))
        assert again.tol == painleve_table.tol

    def test_header_layout(self, painleve_table):
        data = CacheFile.from_table(painleve_table).to_bytes()
        assert data[:5] == MAGIC
        magic, version, s_min, s_max, tol, length = HEADER.unpack_from(data)
        assert version == Config.CACHE_FORMAT_VERSION
        assert (s_min, s_max) == (-13.0, 10.0)
        assert length == len(painleve_table.grid)
        assert len(data) == HEADER.size + 6 * 8 * length

    def test_bad_magic(self, painleve_table):
        data = bytearray(CacheFile.from_table(painleve_table).to_bytes())
        data[:5] = b'XXXXX'
        with pytest.raises(DataError):
            CacheFile.from_bytes(bytes(data))

    def test_truncated(self, painleve_table):
        data = CacheFile.from_table(painleve_table).to_bytes()
        with pytest.raises(DataError):
            CacheFile.from_bytes(data[:10])
        with pytest.raises(DataError):
            CacheFile.from_bytes(data[:-8])

    def test_incomplete_table_is_refused(self, painleve_table):
        bare = PainleveTable(grid=painleve_table.grid, q=painleve_table.q,
                             q_prime=painleve_table.q_prime, tol=painleve_table.tol)
        with pytest.raises(DataError):
            CacheFile.from_table(bare)


class TestCacheManager:
    """Load, miss and rebuild"""

    def test_miss_then_hit(self, tmp_path, painleve_table):
        manager = CacheManager(str(tmp_path / 'tw.bin'))
        builder = CountingBuilder(painleve_table)
        manager.load_or_build(builder)
        assert builder.calls == 1
        assert os.path.exists(tmp_path / 'tw.bin')
        assert not os.path.exists(tmp_path / 'tw.bin.tmp')

        table = manager.load_or_build(builder)
        assert builder.calls == 1
        assert np.array_equal(table.q, painleve_table.q)

    def test_version_mismatch_rebuilds(self, tmp_path, painleve_table):
        path = tmp_path / 'tw.bin'
        data = bytearray(CacheFile.from_table(painleve_table).to_bytes())
        data[5:9] = (Config.CACHE_FORMAT_VERSION + 1).to_bytes(4, 'little')
        path.write_bytes(bytes(data[:HEADER.size + 16]))

        manager = CacheManager(str(path))
        assert manager.load(Config.S_MIN, Config.S_MAX, Config.PAINLEVE_TOL) is None
        builder = CountingBuilder(painleve_table)
        manager.load_or_build(builder)
        assert builder.calls == 1
        assert CacheFile.load(str(path)).version == Config.CACHE_FORMAT_VERSION

    def test_window_mismatch_rebuilds(self, tmp_path, painleve_table):
        manager = CacheManager(str(tmp_path / 'tw.bin'))
        manager.save(painleve_table)
        assert manager.load(-13.0, 10.0, painleve_table.tol) is not None
        assert manager.load(-12.0, 10.0, painleve_table.tol) is None
        assert manager.load(-13.0, 10.0, painleve_table.tol * 10) is None
        assert manager.load(-13.0, 10.0, painleve_table.tol, step=0.1) is None

    @pytest.mark.parametrize('damage', ['garbage', 'truncated', 'bad_magic'])
    def test_unreadable_file_rebuilds(self, tmp_path, painleve_table, damage):
        path = tmp_path / 'tw.bin'
        image = CacheFile.from_table(painleve_table).to_bytes()
        if damage == 'garbage':
            path.write_bytes(b'garbage')
        elif damage == 'truncated':
            path.write_bytes(image[:HEADER.size + 40])
        else:
            path.write_bytes(b'XXXXX' + image[5:])

        manager = CacheManager(str(path))
        assert manager.load(Config.S_MIN, Config.S_MAX, painleve_table.tol) is None
        builder = CountingBuilder(painleve_table)
        table = manager.load_or_build(builder, tol=painleve_table.tol)
        assert builder.calls == 1
        assert np.array_equal(table.q, painleve_table.q)
        assert CacheFile.load(str(path)).length == len(painleve_table.grid)
