"""
Configuration management for the Tracy-Widom laboratory
"""
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ('1', 'true', 'yes')


class Config:
    """Configuration class for numerical and CLI settings"""

    VERSION = '1.0.0'

    # Painleve cache
    CACHE_PATH = os.getenv('TWLAB_CACHE', './tw_cache.bin')
    CACHE_FORMAT_VERSION = 1

    # Logging Configuration
    LOG_LEVEL = os.getenv('TWLAB_LOG_LEVEL', 'WARNING').upper()
    LOG_FILE = os.getenv('TWLAB_LOG_FILE')

    # Run ledger
    DATABASE_URL = os.getenv('TWLAB_DATABASE_URL', 'sqlite:///twlab_runs.db')
    RECORD_RUNS = _env_bool('TWLAB_RECORD_RUNS', 'false')

    # Numerical defaults
    DEFAULT_REL_TOL = 1e-10
    DEFAULT_ABS_TOL = 1e-12

    # Painleve working window
    S_MIN = float(os.getenv('TWLAB_S_MIN', '-13'))
    S_MAX = float(os.getenv('TWLAB_S_MAX', '10'))
    PAINLEVE_TOL = float(os.getenv('TWLAB_PAINLEVE_TOL', '1e-10'))
    PAINLEVE_STEP = float(os.getenv('TWLAB_PAINLEVE_STEP', str(1.0 / 64.0)))

    # Fredholm determinant
    FREDHOLM_NODES = int(os.getenv('TWLAB_FREDHOLM_NODES', '100'))
    FREDHOLM_MAP_SCALE = float(os.getenv('TWLAB_FREDHOLM_MAP_SCALE', '10'))

    # F4 argument convention: 'table' reproduces the moment table, 'scaled' is the alternative
    F4_CONVENTION = os.getenv('TWLAB_F4_CONVENTION', 'table').lower()

    # Monte Carlo worker pool
    WORKERS = int(os.getenv('TWLAB_WORKERS', '1'))

    # Supported symmetry classes
    BETAS = (1, 2, 4)

    # Sample models and the beta their scaled statistic converges to
    MODEL_LIMITS = {
        'goe': 1,
        'gue': 2,
        'gse': 4,
        'wigner': 1,
        'lis': 2,
        'queue': 2,
        'growth': 2,
    }


def validate_config():
    """Validate numerical configuration variables"""
    invalid_vars = []

    if not (Config.S_MIN <= -8 and Config.S_MAX >= 6):
        invalid_vars.append('TWLAB_S_MIN/TWLAB_S_MAX')
    if not (1e-12 <= Config.PAINLEVE_TOL <= 1e-6):
        invalid_vars.append('TWLAB_PAINLEVE_TOL')
    if not (0 < Config.PAINLEVE_STEP <= 0.25):
        invalid_vars.append('TWLAB_PAINLEVE_STEP')
    if Config.FREDHOLM_NODES < 20:
        invalid_vars.append('TWLAB_FREDHOLM_NODES')
    if Config.FREDHOLM_MAP_SCALE <= 0:
        invalid_vars.append('TWLAB_FREDHOLM_MAP_SCALE')
    if Config.F4_CONVENTION not in ('table', 'scaled'):
        invalid_vars.append('TWLAB_F4_CONVENTION')
    if Config.WORKERS < 1:
        invalid_vars.append('TWLAB_WORKERS')

    if invalid_vars:
        raise ValueError(f"Invalid environment variables: {', '.join(invalid_vars)}")

    return True
