"""
Shared fixtures for the test suite
"""
import os
import sys

import pytest

# Add the project directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from distributions import registry
from painleve import solve_hastings_mcleod


def pytest_collection_modifyitems(config, items):
    if os.getenv('TWLAB_SKIP_SLOW', '0') != '1':
        return
    skip_slow = pytest.mark.skip(reason="TWLAB_SKIP_SLOW=1")
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope='session')
def painleve_table():
    """Default-window Hastings-McLeod table, solved once per session"""
    return solve_hastings_mcleod()


@pytest.fixture
def tw_registry(painleve_table):
    """Module-level registry backed by the session table"""
    registry.use_table(painleve_table)
    return registry
