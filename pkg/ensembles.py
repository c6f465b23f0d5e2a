"""
Monte Carlo samplers for the models whose scaled fluctuations follow F_beta:
Gaussian ensembles, Wigner matrices, longest increasing subsequences,
tandem queues (last-passage percolation) and growth in a random environment
"""
import logging
import math
import time
from bisect import bisect_left
from dataclasses import dataclass, field, replace
from itertools import combinations, product
from multiprocessing import Pool
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from config import Config
from distributions import F4Convention, tw_moments
from errors import DataError, InvalidArgumentError

logger = logging.getLogger(__name__)

MODELS = ('goe', 'gue', 'gse', 'wigner', 'lis', 'queue', 'growth')
ENTRY_LAWS = ('rademacher', 'uniform')
SERVICE_LAWS = ('exponential', 'geometric', 'deterministic')
P_LAWS = ('uniform', 'beta', 'constant')

# Relative tolerance for the Kramers pairs of the self-dual embedding
PAIR_TOL = 1e-8

# Spawn keys reserved for streams that are not per-sample
ENVIRONMENT_KEY = 2 ** 63
ESTIMATE_KEY = 2 ** 63 + 1

# (mean, sd) of each service law
SERVICE_MOMENTS = {
    'exponential': (1.0, 1.0),
    'geometric': (1.0, math.sqrt(2.0)),
    'deterministic': (1.0, 0.0),
}


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Realisations of one model's statistic with full provenance"""
    model: str
    params: Dict[str, Any]
    seed: int
    values: np.ndarray
    raw: Optional[np.ndarray] = None
    # growth only: one height profile over sites 0..t per sample
    profiles: Optional[np.ndarray] = None
    version: str = Config.VERSION

    def __len__(self) -> int:
        return len(self.values)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'model': self.model,
            'params': self.params,
            'seed': self.seed,
            'version': self.version,
            'values': [float(v) for v in self.values],
        }
        if self.raw is not None:
            data['raw'] = [float(v) for v in self.raw]
        if self.profiles is not None:
            data['profiles'] = [[float(h) if np.isfinite(h) else None for h in row] for row in self.profiles]
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SampleSet':
        """Parse the JSON form; anything malformed is a DataError"""
        try:
            model = data['model']
            values = np.asarray(data['values'], dtype=float)
            raw = data.get('raw')
            profiles = data.get('profiles')
            if profiles is not None:
                profiles = np.array([[-np.inf if h is None else float(h) for h in row] for row in profiles],
                                    dtype=float)
            sample = cls(
                model=str(model),
                params=dict(data.get('params', {})),
                seed=int(data['seed']),
                values=values,
                raw=None if raw is None else np.asarray(raw, dtype=float),
                profiles=profiles,
                version=str(data.get('version', '')),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"Malformed sample set: {e}") from e
        if sample.values.ndim != 1 or sample.values.size == 0:
            raise DataError("Sample set has no values")
        if not np.all(np.isfinite(sample.values)):
            raise DataError("Sample set contains non-finite values")
        if sample.profiles is not None and (sample.profiles.ndim != 2
                                            or len(sample.profiles) != len(sample.values)):
            raise DataError("Sample set profiles must hold one row per value")
        return sample


@dataclass(frozen=True)
class ScalingSpec:
    """Edge scaling s = (lambda - 2 sigma sqrt(N)) N^(1/6) / sigma, times the beta=4 convention factor"""
    sigma: float
    N: int
    beta: int = 2
    convention: F4Convention = F4Convention.TABLE

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidArgumentError(f"sigma must be positive, got {self.sigma}")
        if self.N < 1:
            raise InvalidArgumentError(f"N must be >= 1, got {self.N}")

    @property
    def factor(self) -> float:
        if self.beta != 4:
            return 1.0
        return 2.0 ** (1.0 / 6.0) if self.convention is F4Convention.TABLE else 2.0 ** (2.0 / 3.0)

    def scale(self, lam):
        lam = np.asarray(lam, dtype=float)
        return (lam - 2.0 * self.sigma * math.sqrt(self.N)) * self.N ** (1.0 / 6.0) / self.sigma * self.factor

    def unscale(self, s):
        s = np.asarray(s, dtype=float)
        return 2.0 * self.sigma * math.sqrt(self.N) + s * self.sigma / (self.N ** (1.0 / 6.0) * self.factor)


@dataclass(frozen=True)
class GrowthResult:
    origin_height: int
    profile: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class QueueConstants:
    """c1, c2 of D(k, n) ~ c1 n + c2 n^(1/3) chi"""
    c1: float
    c2: float
    estimated: bool
    k_fraction: Optional[float] = None


# ---------------------------------------------------------------------------
# Random streams and the worker pool
# ---------------------------------------------------------------------------

def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0 or seed >= 2 ** 64:
        raise InvalidArgumentError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


def sample_stream(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for sample `index`; independent of how samples are scheduled"""
    sequence = np.random.SeedSequence(_check_seed(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(sequence))


def environment_stream(seed: int) -> np.random.Generator:
    """Generator for the quenched growth environment, shared by all samples of a run"""
    sequence = np.random.SeedSequence(_check_seed(seed), spawn_key=(ENVIRONMENT_KEY,))
    return np.random.Generator(np.random.Philox(sequence))


def derived_seed(seed: int, *key: int) -> int:
    sequence = np.random.SeedSequence(_check_seed(seed), spawn_key=(ESTIMATE_KEY,) + tuple(key))
    return int(sequence.generate_state(1, np.uint64)[0])


def run_pool(worker: Callable, tasks: Sequence, workers: int = 1) -> List:
    """
    Map worker over tasks; the result order is the task order

    With workers > 1 the worker and tasks must be picklable.
    """
    if workers < 1:
        raise InvalidArgumentError(f"workers must be >= 1, got {workers}")
    tasks = list(tasks)
    started = time.perf_counter()
    if workers == 1 or len(tasks) < 2:
        results = [worker(task) for task in tasks]
    else:
        chunksize = max(1, len(tasks) // (4 * workers))
        with Pool(processes=workers) as pool:
            results = pool.map(worker, tasks, chunksize=chunksize)
    logger.info(f"{len(tasks)} samples on {workers} worker(s) in {time.perf_counter() - started:.2f}s")
    return results


def _check_count(name: str, value: int, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise InvalidArgumentError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


# ---------------------------------------------------------------------------
# Eigensolver
# ---------------------------------------------------------------------------

def tridiagonalize(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Householder reduction of a Hermitian matrix to real symmetric tridiagonal form

    The off-diagonal is replaced by its modulus, a diagonal unitary similarity.
    """
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidArgumentError(f"Expected a non-empty square matrix, got shape {a.shape}")
    if a.shape[0] == 1:
        return np.real(np.diag(a)).astype(float), np.zeros(0)
    h = linalg.hessenberg(a)
    return np.real(np.diag(h)).copy(), np.abs(np.diag(h, -1))


def _top_eigenvalues(d: np.ndarray, e: np.ndarray, how_many: int) -> np.ndarray:
    n = len(d)
    if n == 1:
        return d.copy()
    lo = max(n - how_many, 0)
    return linalg.eigvalsh_tridiagonal(d, e, select='i', select_range=(lo, n - 1),
                                       lapack_driver='stebz')


def largest_eigenvalue(matrix: np.ndarray) -> float:
    """Top eigenvalue by tridiagonalisation and Sturm-sequence bisection"""
    d, e = tridiagonalize(matrix)
    return float(_top_eigenvalues(d, e, 1)[-1])


def largest_paired_eigenvalue(matrix: np.ndarray) -> float:
    """Top eigenvalue of a self-dual embedding, whose spectrum comes in equal pairs"""
    d, e = tridiagonalize(matrix)
    top = _top_eigenvalues(d, e, 2)
    if len(top) == 2 and abs(top[1] - top[0]) > PAIR_TOL * max(1.0, abs(top[1])):
        logger.warning(f"Top eigenvalue pair split by {abs(top[1] - top[0]):.3e}")
    return float(top[-1])


# ---------------------------------------------------------------------------
# Gaussian ensembles
# ---------------------------------------------------------------------------

def gaussian_matrix(beta: int, N: int, rng: np.random.Generator) -> np.ndarray:
    """
    GOE, GUE or the 2N x 2N self-dual embedding of GSE

    Off-diagonal entries have E|h|^2 = 1. Diagonal variances are 2, 1 and
    1/2 for beta = 1, 2, 4.
    """
    if beta == 1:
        g = rng.standard_normal((N, N))
        return (g + g.T) / math.sqrt(2.0)
    if beta == 2:
        g = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        return (g + g.conj().T) / 2.0
    if beta == 4:
        # A Hermitian, B complex antisymmetric, each real part of variance 1/4 off the diagonal
        x = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2.0)
        a = (x + x.conj().T) / 2.0
        y = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2.0)
        b = (y - y.T) / 2.0
        return np.block([[a, b], [-b.conj(), a.conj()]])
    raise InvalidArgumentError(f"beta must be one of {Config.BETAS}, got {beta!r}")


def tridiagonal_matrix(beta: int, N: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    Tridiagonal beta-Hermite model with the same eigenvalue law as gaussian_matrix

    Diagonal N(0, 2/beta); off-diagonal chi_{beta (N - i)} / sqrt(beta), i = 1..N-1.
    """
    d = rng.standard_normal(N) * math.sqrt(2.0 / beta)
    dof = beta * np.arange(N - 1, 0, -1, dtype=float)
    e = np.sqrt(rng.chisquare(dof)) / math.sqrt(beta) if N > 1 else np.zeros(0)
    return d, e


def _gaussian_worker(task) -> float:
    beta, N, seed, index = task
    matrix = gaussian_matrix(beta, N, sample_stream(seed, index))
    if beta == 4:
        return largest_paired_eigenvalue(matrix)
    return largest_eigenvalue(matrix)


def _tridiagonal_worker(task) -> float:
    beta, N, seed, index = task
    d, e = tridiagonal_matrix(beta, N, sample_stream(seed, index))
    return float(_top_eigenvalues(d, e, 1)[-1])


def sample_tridiagonal(beta: int, N: int, count: int, seed: int, workers: int = 1) -> SampleSet:
    """Raw lambda_max from the O(N^2) tridiagonal model"""
    if beta not in Config.BETAS:
        raise InvalidArgumentError(f"beta must be one of {Config.BETAS}, got {beta!r}")
    N = _check_count('N', N)
    count = _check_count('count', count)
    tasks = [(beta, N, seed, i) for i in range(count)]
    raw = np.array(run_pool(_tridiagonal_worker, tasks, workers))
    model = {1: 'goe', 2: 'gue', 4: 'gse'}[beta]
    return SampleSet(model=model, params={'N': N, 'beta': beta, 'fast': True}, seed=_check_seed(seed),
                     values=raw, raw=raw)


def sample_gaussian_ensemble(beta: int, N: int, count: int, seed: int,
                             workers: int = 1, fast: bool = False) -> SampleSet:
    """
    Raw largest eigenvalues of GOE (beta=1), GUE (beta=2) or GSE (beta=4)

    Args:
        beta: Symmetry class
        N: Matrix dimension (quaternion dimension for GSE)
        count: Number of samples
        seed: Unsigned 64-bit seed
        workers: Worker processes
        fast: Use the tridiagonal model instead of dense matrices

    Returns:
        SampleSet whose values are the unscaled lambda_max
    """
    if fast:
        return sample_tridiagonal(beta, N, count, seed, workers)
    if beta not in Config.BETAS:
        raise InvalidArgumentError(f"beta must be one of {Config.BETAS}, got {beta!r}")
    N = _check_count('N', N)
    count = _check_count('count', count)
    tasks = [(beta, N, seed, i) for i in range(count)]
    raw = np.array(run_pool(_gaussian_worker, tasks, workers))
    model = {1: 'goe', 2: 'gue', 4: 'gse'}[beta]
    return SampleSet(model=model, params={'N': N, 'beta': beta}, seed=_check_seed(seed),
                     values=raw, raw=raw)


def center_scale(raw: SampleSet, spec: ScalingSpec) -> SampleSet:
    """Map raw lambda_max to edge coordinates; raw values are kept"""
    source = raw.raw if raw.raw is not None else raw.values
    if len(source) == 0:
        raise InvalidArgumentError("Sample set has no raw values")
    params = dict(raw.params, sigma=spec.sigma, scaling='edge')
    if spec.beta == 4:
        params['convention'] = spec.convention.value
    return replace(raw, values=spec.scale(source), raw=np.asarray(source, dtype=float), params=params)


# ---------------------------------------------------------------------------
# Wigner matrices
# ---------------------------------------------------------------------------

def _entries(law: str, size, rng: np.random.Generator) -> np.ndarray:
    if law == 'rademacher':
        return rng.choice(np.array([-1.0, 1.0]), size=size)
    if law == 'uniform':
        return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size=size)
    raise InvalidArgumentError(f"Unknown entry law '{law}', expected one of {ENTRY_LAWS}")


def wigner_matrix(N: int, entry_law: str, rng: np.random.Generator,
                  symmetry: str = 'real') -> np.ndarray:
    """Symmetric (or Hermitian) matrix with i.i.d. unit-variance entries on and above the diagonal"""
    upper = np.triu(_entries(entry_law, (N, N), rng))
    if symmetry == 'real':
        return upper + np.triu(upper, 1).T
    if symmetry == 'hermitian':
        imag = np.triu(_entries(entry_law, (N, N), rng), 1)
        off = (np.triu(upper, 1) + 1j * imag) / math.sqrt(2.0)
        return np.diag(np.diag(upper)).astype(complex) + off + off.conj().T
    raise InvalidArgumentError(f"Unknown symmetry '{symmetry}', expected 'real' or 'hermitian'")


def _wigner_worker(task) -> float:
    N, entry_law, symmetry, seed, index = task
    return largest_eigenvalue(wigner_matrix(N, entry_law, sample_stream(seed, index), symmetry))


def sample_wigner(N: int, entry_law: str, count: int, seed: int, workers: int = 1,
                  symmetry: str = 'real') -> SampleSet:
    """Scaled lambda_max of Wigner matrices (sigma = 1); real converges to F1, hermitian to F2"""
    if entry_law not in ENTRY_LAWS:
        raise InvalidArgumentError(f"Unknown entry law '{entry_law}', expected one of {ENTRY_LAWS}")
    if symmetry not in ('real', 'hermitian'):
        raise InvalidArgumentError(f"Unknown symmetry '{symmetry}', expected 'real' or 'hermitian'")
    N = _check_count('N', N)
    count = _check_count('count', count)
    tasks = [(N, entry_law, symmetry, seed, i) for i in range(count)]
    raw = np.array(run_pool(_wigner_worker, tasks, workers))
    beta = 1 if symmetry == 'real' else 2
    spec = ScalingSpec(sigma=1.0, N=N, beta=beta)
    params = {'N': N, 'entry_law': entry_law, 'symmetry': symmetry, 'sigma': 1.0, 'scaling': 'edge'}
    return SampleSet(model='wigner', params=params, seed=_check_seed(seed),
                     values=spec.scale(raw), raw=raw)


# ---------------------------------------------------------------------------
# Longest increasing subsequence
# ---------------------------------------------------------------------------

def longest_increasing_subsequence(seq: Iterable) -> int:
    """Length of the longest strictly increasing subsequence (patience sorting)"""
    tops: List = []
    for card in seq:
        pile = bisect_left(tops, card)
        if pile == len(tops):
            tops.append(card)
        else:
            tops[pile] = card
    return len(tops)


def brute_force_lis(seq: Sequence) -> int:
    """Exhaustive search over subsequences; only for short inputs"""
    seq = list(seq)
    if len(seq) > 12:
        raise InvalidArgumentError("brute_force_lis is limited to 12 elements")
    for size in range(len(seq), 0, -1):
        for subset in combinations(seq, size):
            if all(a < b for a, b in zip(subset, subset[1:])):
                return size
    return 0


def _lis_worker(task) -> int:
    N, permutation, seed, index = task
    rng = sample_stream(seed, index)
    perm = permutation(rng, N) if permutation is not None else rng.permutation(N)
    return longest_increasing_subsequence(perm.tolist() if hasattr(perm, 'tolist') else perm)


def sample_lis(N: int, count: int, seed: int, workers: int = 1,
               permutation: Optional[Callable[[np.random.Generator, int], Sequence[int]]] = None) -> SampleSet:
    """
    Scaled LIS lengths (l_N - 2 sqrt(N)) / N^(1/6) of uniform random permutations

    `permutation(rng, N)` replaces the Fisher-Yates shuffle when given.
    """
    N = _check_count('N', N)
    count = _check_count('count', count)
    tasks = [(N, permutation, seed, i) for i in range(count)]
    raw = np.array(run_pool(_lis_worker, tasks, workers), dtype=float)
    values = (raw - 2.0 * math.sqrt(N)) / N ** (1.0 / 6.0)
    return SampleSet(model='lis', params={'N': N, 'scaling': 'edge'}, seed=_check_seed(seed),
                     values=values, raw=raw)


# ---------------------------------------------------------------------------
# Tandem queues / last-passage percolation
# ---------------------------------------------------------------------------

def service_times(service: str, shape, rng: np.random.Generator) -> np.ndarray:
    if service == 'exponential':
        return rng.standard_exponential(shape)
    if service == 'geometric':
        # Support {0, 1, 2, ...}, mean 1
        return rng.geometric(0.5, size=shape).astype(float) - 1.0
    if service == 'deterministic':
        return np.ones(shape)
    raise InvalidArgumentError(f"Unknown service law '{service}', expected one of {SERVICE_LAWS}")


def last_passage_time(weights: np.ndarray) -> float:
    """
    D(k, n) for a k x n weight array

    D(i, j) = max(D(i-1, j), D(i, j-1)) + w_ij, one row at a time:
    D_i(j) = C_i(j) + max_{m <= j} (D_{i-1}(m) - C_i(m-1)) with C_i the row prefix sums.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2 or w.size == 0:
        raise InvalidArgumentError(f"Expected a non-empty 2-D weight array, got shape {w.shape}")
    row = np.cumsum(w[0])
    for i in range(1, w.shape[0]):
        prefix = np.cumsum(w[i])
        shifted = np.concatenate(([0.0], prefix[:-1]))
        row = prefix + np.maximum.accumulate(row - shifted)
    return float(row[-1])


def brute_force_last_passage(weights: np.ndarray) -> float:
    """Maximum weight over every up-right lattice path; only for small arrays"""
    w = np.asarray(weights, dtype=float)
    k, n = w.shape
    if k + n > 14:
        raise InvalidArgumentError("brute_force_last_passage is limited to k + n <= 14")
    best = -math.inf
    steps = k + n - 2
    for downs in combinations(range(steps), k - 1):
        i = j = 0
        total = w[0, 0]
        for step in range(steps):
            if step in downs:
                i += 1
            else:
                j += 1
            total += w[i, j]
        best = max(best, total)
    return float(best)


def _queue_worker(task) -> float:
    k, n, service, seed, index = task
    return last_passage_time(service_times(service, (k, n), sample_stream(seed, index)))


def _queue_departures(k: int, n: int, service: str, count: int, seed: int, workers: int) -> np.ndarray:
    tasks = [(k, n, service, seed, i) for i in range(count)]
    return np.array(run_pool(_queue_worker, tasks, workers))


def estimate_queue_constants(k_fraction: float, ns: Sequence[int] = (100, 200, 400, 800),
                             count: int = 200, seed: int = 0, service: str = 'exponential',
                             workers: int = 1) -> QueueConstants:
    """
    Regression estimates of c1, c2 in D(k, n) ~ c1 n + c2 n^(1/3) chi with k = k_fraction n

    Uses the F2 mean and sd for chi: sd_n ~ c2 sd_2 n^(1/3), mean_n ~ c1 n + c2 mu_2 n^(1/3).
    """
    if not 0 < k_fraction <= 1:
        raise InvalidArgumentError(f"k_fraction must be in (0, 1], got {k_fraction}")
    if len(ns) < 2:
        raise InvalidArgumentError("Need at least two values of n for the regression")
    reference = tw_moments(2)
    n_arr = np.asarray(ns, dtype=float)
    means, sds = [], []
    for j, n in enumerate(ns):
        k = max(1, int(round(k_fraction * n)))
        departures = _queue_departures(k, int(n), service, count, derived_seed(seed, j), workers)
        means.append(np.mean(departures))
        sds.append(np.std(departures))
    cube = n_arr ** (1.0 / 3.0)
    c2 = float(np.dot(sds, cube) / (reference.sd * np.dot(cube, cube)))
    residual = np.asarray(means) - c2 * reference.mean * cube
    c1 = float(np.dot(residual, n_arr) / np.dot(n_arr, n_arr))
    logger.warning(f"Queue constants estimated by regression: c1={c1:.5f}, c2={c2:.5f}")
    return QueueConstants(c1=c1, c2=c2, estimated=True, k_fraction=float(k_fraction))


def sample_queue(k: int, n: int, service: str, count: int, seed: int, workers: int = 1,
                 scaling: str = 'brownian', constants: Optional[QueueConstants] = None) -> SampleSet:
    """
    Departure time D(k, n) of customer k from station n

    Scalings:
        brownian: (D - mean n) / (sd sqrt(n)), fixed k; k x k GUE lambda_max in the limit
        cube-root: (D - c1 n) / (c2 n^(1/3)); constants estimated when not supplied
    """
    k = _check_count('k', k)
    n = _check_count('n', n)
    count = _check_count('count', count)
    if service not in SERVICE_LAWS:
        raise InvalidArgumentError(f"Unknown service law '{service}', expected one of {SERVICE_LAWS}")
    raw = _queue_departures(k, n, service, count, seed, workers)
    params: Dict[str, Any] = {'k': k, 'n': n, 'service': service, 'scaling': scaling}

    if scaling == 'brownian':
        mean, sd = SERVICE_MOMENTS[service]
        if sd > 0:
            values = (raw - mean * n) / (sd * math.sqrt(n))
        else:
            values = raw - mean * n
    elif scaling == 'cube-root':
        if constants is None:
            constants = estimate_queue_constants(k / n, count=min(count, 200), seed=seed,
                                                 service=service, workers=workers)
        values = (raw - constants.c1 * n) / (constants.c2 * n ** (1.0 / 3.0))
        params.update(c1=constants.c1, c2=constants.c2,
                      constants='estimated' if constants.estimated else 'supplied')
    else:
        raise InvalidArgumentError(f"Unknown queue scaling '{scaling}', expected 'brownian' or 'cube-root'")

    return SampleSet(model='queue', params=params, seed=_check_seed(seed), values=values, raw=raw)


# ---------------------------------------------------------------------------
# Growth in a random environment
# ---------------------------------------------------------------------------

def check_p_law(p_law: str, p_a: float, p_b: float):
    if p_law == 'uniform':
        if not 0 <= p_a <= p_b <= 1:
            raise InvalidArgumentError(f"uniform p-law needs 0 <= a <= b <= 1, got ({p_a}, {p_b})")
    elif p_law == 'beta':
        if p_a <= 0 or p_b <= 0:
            raise InvalidArgumentError(f"beta p-law needs positive shape parameters, got ({p_a}, {p_b})")
    elif p_law == 'constant':
        if not 0 <= p_a <= 1:
            raise InvalidArgumentError(f"constant p must lie in [0, 1], got {p_a}")
    else:
        raise InvalidArgumentError(f"Unknown p-law '{p_law}', expected one of {P_LAWS}")


def draw_environment(p_law: str, size: int, rng: np.random.Generator,
                     p_a: float = 0.5, p_b: float = 1.0) -> np.ndarray:
    """Site probabilities p_x, i.i.d. from the chosen law"""
    check_p_law(p_law, p_a, p_b)
    if p_law == 'uniform':
        return rng.uniform(p_a, p_b, size)
    if p_law == 'beta':
        return rng.beta(p_a, p_b, size)
    return np.full(size, float(p_a))


def growth_step(heights: np.ndarray, p: np.ndarray, rng: Optional[np.random.Generator] = None,
                in_place: bool = False, coins: Optional[np.ndarray] = None) -> np.ndarray:
    """
    One time step of the growth rule; undefined sites hold -inf

    The height above x moves up to the height above x - 1 when that is larger,
    otherwise grows by one with probability p_x. Sites are swept left to right
    and the lateral move reads x - 1 as it was at the start of the step; with
    in_place=True it reads the value already updated in this sweep.
    `coins` fixes the Bernoulli outcomes instead of drawing them from rng.
    """
    if coins is None:
        coins = rng.random(len(heights)) < p
    if not in_place:
        left = np.concatenate(([-np.inf], heights[:-1]))
        return np.where(left > heights, left, heights + coins)
    out = heights.copy()
    for x in range(len(out)):
        left = out[x - 1] if x > 0 else -np.inf
        out[x] = left if left > out[x] else out[x] + coins[x]
    return out


def initial_heights(t: int) -> np.ndarray:
    """h(0) = 0, every other site of 0..t undefined"""
    heights = np.full(t + 1, -np.inf)
    heights[0] = 0.0
    return heights


def simulate_growth(p: np.ndarray, t: int, rng: np.random.Generator, in_place: bool = False) -> GrowthResult:
    """Run t steps on sites 0..t"""
    if len(p) != t + 1:
        raise InvalidArgumentError(f"Environment must cover sites 0..{t}, got {len(p)} sites")
    heights = initial_heights(t)
    for _ in range(t):
        heights = growth_step(heights, p, rng, in_place)
    return GrowthResult(origin_height=int(heights[0]), profile=heights)


def brute_force_growth(t: int, p: float, site: int = 0, in_place: bool = False) -> Dict[float, float]:
    """Exact law of h(site, t) for constant p_x = p by enumerating every coin outcome"""
    if t > 4:
        raise InvalidArgumentError("brute_force_growth is limited to t <= 4")
    p_x = np.full(t + 1, float(p))
    law: Dict[float, float] = {}
    for outcome in product((False, True), repeat=t * (t + 1)):
        coins = np.array(outcome).reshape(t, t + 1)
        heights = initial_heights(t)
        for step in range(t):
            heights = growth_step(heights, p_x, in_place=in_place, coins=coins[step])
        ups = int(coins.sum())
        weight = p ** ups * (1.0 - p) ** (coins.size - ups)
        law[float(heights[site])] = law.get(float(heights[site]), 0.0) + weight
    return law


def _growth_worker(task) -> np.ndarray:
    t, site, p_law, p_a, p_b, environment, in_place, seed, index = task
    rng = sample_stream(seed, index)
    p = environment if environment is not None else draw_environment(p_law, t + 1, rng, p_a, p_b)
    return simulate_growth(p, t, rng, in_place).profile


def sample_growth_env(p_law: str, t: int, count: int, seed: int, workers: int = 1,
                      site: int = 0, quenched: bool = True, p_a: float = 0.5, p_b: float = 1.0,
                      in_place: bool = False, constants: Optional[Tuple[float, float]] = None) -> SampleSet:
    """
    Heights above `site` after t steps of growth in a random environment

    Quenched mode draws one environment for the whole run; annealed mode draws
    a fresh one per sample. With constants (c1, c2) the values are
    (h - c1 t) / (c2 t^(1/3)); otherwise they are the raw heights. The full
    profile of every sample is kept in `profiles`.
    """
    t = _check_count('t', t)
    count = _check_count('count', count)
    if not 0 <= site <= t:
        raise InvalidArgumentError(f"site must lie in 0..{t}, got {site}")
    check_p_law(p_law, p_a, p_b)
    environment = None
    if quenched:
        environment = draw_environment(p_law, t + 1, environment_stream(seed), p_a, p_b)

    tasks = [(t, site, p_law, p_a, p_b, environment, in_place, seed, i) for i in range(count)]
    profiles = np.array(run_pool(_growth_worker, tasks, workers))
    raw = profiles[:, site].copy()
    params: Dict[str, Any] = {
        't': t, 'site': site, 'p_law': p_law, 'p_a': p_a, 'p_b': p_b,
        'mode': 'quenched' if quenched else 'annealed', 'in_place': in_place,
    }
    if constants is not None:
        c1, c2 = constants
        if not c2 > 0:
            raise InvalidArgumentError(f"c2 must be positive, got {c2}")
        values = (raw - c1 * t) / (c2 * t ** (1.0 / 3.0))
        params.update(c1=c1, c2=c2, scaling='cube-root')
    else:
        values = raw
        params['scaling'] = 'raw'
    return SampleSet(model='growth', params=params, seed=_check_seed(seed), values=values, raw=raw,
                     profiles=profiles)
