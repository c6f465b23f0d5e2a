"""
On-disk cache of the Painleve table

Layout (little-endian): magic b"TWLAB", uint32 format version, float64
s_min, s_max, tol, uint64 grid length, then the columns s, q, q', E, R, J as
float64 arrays.
"""
import logging
import math
import os
import struct
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from config import Config
from errors import DataError
from painleve import PainleveTable

MAGIC = b'TWLAB'
HEADER = struct.Struct('<5sIdddQ')
COLUMN_DTYPE = np.dtype('<f8')
COLUMNS = 6


@dataclass(frozen=True, eq=False)
class CacheFile:
    """Serialized PainleveTable"""
    version: int
    s_min: float
    s_max: float
    tol: float
    columns: np.ndarray  # shape (6, length): s, q, q', E, R, J

    @property
    def length(self) -> int:
        return int(self.columns.shape[1])

    @classmethod
    def from_table(cls, table: PainleveTable) -> 'CacheFile':
        if not table.has_integrals:
            raise DataError("Only complete tables (with E, R, J) can be cached")
        columns = np.vstack((table.grid, table.q, table.q_prime, table.E, table.R, table.J))
        return cls(version=Config.CACHE_FORMAT_VERSION, s_min=table.s_min, s_max=table.s_max,
                   tol=float(table.tol), columns=columns.astype(COLUMN_DTYPE))

    def to_table(self) -> PainleveTable:
        s, q, q_prime, E, R, J = (np.array(col, dtype=float) for col in self.columns)
        return PainleveTable(grid=s, q=q, q_prime=q_prime, tol=self.tol, E=E, R=R, J=J)

    def to_bytes(self) -> bytes:
        header = HEADER.pack(MAGIC, self.version, self.s_min, self.s_max, self.tol, self.length)
        return header + np.ascontiguousarray(self.columns, dtype=COLUMN_DTYPE).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> 'CacheFile':
        """
        Parse a cache image

        Raises:
            DataError: wrong magic, truncated or oversized payload
        """
        if len(data) < HEADER.size:
            raise DataError("Cache file truncated before end of header")
        magic, version, s_min, s_max, tol, length = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise DataError(f"Not a cache file (magic {magic!r})")
        if version != Config.CACHE_FORMAT_VERSION:
            # Payload layout of other versions is unknown; keep only the header
            return cls(version=version, s_min=s_min, s_max=s_max, tol=tol,
                       columns=np.zeros((COLUMNS, 0), dtype=COLUMN_DTYPE))
        expected = HEADER.size + COLUMNS * length * COLUMN_DTYPE.itemsize
        if len(data) != expected:
            raise DataError(f"Cache payload is {len(data)} bytes, expected {expected}")
        columns = np.frombuffer(data, dtype=COLUMN_DTYPE, offset=HEADER.size, count=COLUMNS * length)
        return cls(version=version, s_min=s_min, s_max=s_max, tol=tol,
                   columns=columns.reshape(COLUMNS, length))

    def save(self, path: str):
        """Write atomically through a temporary file in the same directory"""
        tmp_path = f"{path}.tmp"
        with open(tmp_path, 'wb') as handle:
            handle.write(self.to_bytes())
        os.replace(tmp_path, path)

    @classmethod
    def load(cls, path: str) -> 'CacheFile':
        with open(path, 'rb') as handle:
            return cls.from_bytes(handle.read())


class CacheManager:
    """Loads the Painleve table from disk, rebuilding it when absent or stale"""

    def __init__(self, path: Optional[str] = None):
        self.path = path or Config.CACHE_PATH
        self.logger = logging.getLogger(__name__)

    def load(self, s_min: float, s_max: float, tol: float,
             step: Optional[float] = None) -> Optional[PainleveTable]:
        """Cached table for this window and tolerance, or None when it must be rebuilt"""
        if not os.path.exists(self.path):
            self.logger.info(f"Cache miss: {self.path} does not exist")
            return None
        try:
            cache = CacheFile.load(self.path)
        except DataError as e:
            self.logger.warning(f"Cache {self.path} is unreadable ({e}); rebuilding")
            return None
        if cache.version != Config.CACHE_FORMAT_VERSION:
            self.logger.warning(
                f"Cache {self.path} has format version {cache.version}, "
                f"expected {Config.CACHE_FORMAT_VERSION}; rebuilding"
            )
            return None
        expected_length = None if step is None else int(math.ceil((s_max - s_min) / step)) + 1
        if (cache.s_min, cache.s_max, cache.tol) != (s_min, s_max, tol) or \
                (expected_length is not None and cache.length != expected_length):
            self.logger.info(
                f"Cache {self.path} built for [{cache.s_min:g}, {cache.s_max:g}] tol {cache.tol:g}; rebuilding"
            )
            return None
        self.logger.info(f"Cache hit: {self.path} ({cache.length} grid points)")
        return cache.to_table()

    def save(self, table: PainleveTable):
        CacheFile.from_table(table).save(self.path)
        self.logger.info(f"Cache written: {self.path}")

    def load_or_build(self, builder: Callable[..., PainleveTable],
                      s_min: float = Config.S_MIN, s_max: float = Config.S_MAX,
                      tol: float = Config.PAINLEVE_TOL,
                      step: float = Config.PAINLEVE_STEP) -> PainleveTable:
        table = self.load(s_min, s_max, tol, step)
        if table is None:
            table = builder(s_min=s_min, s_max=s_max, tol=tol, step=step)
            self.save(table)
        return table
