"""
F2(s) = det(I - K_Airy) on L^2(s, inf) by Nystrom discretization
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy import linalg

from airy import airy_eval, airy_eval_array
from config import Config
from errors import DomainError, InvalidArgumentError, ResolutionError
from numerics import QuadratureRule, gauss_legendre

logger = logging.getLogger(__name__)

DIAGONAL_EPS = 1e-6
MIN_NODES = 20
S_RANGE = (-13.0, 10.0)

# Ai is below 1e-300 here; nodes mapped further out carry no kernel mass
KERNEL_CUTOFF = 100.0


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetrised Nystrom matrix sqrt(w_i) K(x_i, x_j) sqrt(w_j)"""
    s: float
    n: int
    matrix: np.ndarray
    map_scale: float
    nodes: np.ndarray
    weights: np.ndarray


def airy_kernel(x: float, y: float) -> float:
    """
    K(x, y) = (Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y)

    Within DIAGONAL_EPS of the diagonal the limit Ai'(x)^2 - x Ai(x)^2 is
    used with its first-order correction -(y - x) Ai(x)^2 / 2.
    """
    px = airy_eval(x)
    if abs(x - y) < DIAGONAL_EPS:
        diagonal = px.ai_prime ** 2 - x * px.ai ** 2
        return diagonal - 0.5 * (y - x) * px.ai ** 2
    py = airy_eval(y)
    return (px.ai * py.ai_prime - px.ai_prime * py.ai) / (x - y)


def _airy_on_nodes(x: np.ndarray):
    ai = np.zeros_like(x)
    ai_prime = np.zeros_like(x)
    inside = x <= KERNEL_CUTOFF
    if np.any(inside):
        ai[inside], ai_prime[inside] = airy_eval_array(x[inside])
    return ai, ai_prime


def _kernel_values(x: np.ndarray) -> np.ndarray:
    ai, ai_prime = _airy_on_nodes(x)
    dx = np.subtract.outer(x, x)
    numerator = np.outer(ai, ai_prime) - np.outer(ai_prime, ai)
    near = np.abs(dx) < DIAGONAL_EPS
    with np.errstate(divide='ignore', invalid='ignore'):
        kernel = numerator / dx
    diagonal = ai_prime ** 2 - x * ai ** 2
    # Row index i is x, column index j is y; dx = x - y
    corrected = diagonal[:, np.newaxis] + 0.5 * dx * (ai ** 2)[:, np.newaxis]
    return np.where(near, corrected, kernel)


def _check_arguments(s: float, n: int, map_scale: float):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < MIN_NODES:
        raise InvalidArgumentError(f"Node count must be an integer >= {MIN_NODES}, got {n!r}")
    if not np.isfinite(s) or s < S_RANGE[0] or s > S_RANGE[1]:
        raise DomainError(f"s = {s} outside [{S_RANGE[0]:g}, {S_RANGE[1]:g}]")
    if map_scale <= 0:
        raise InvalidArgumentError(f"Map scale must be positive, got {map_scale}")


def kernel_matrix(s: float, n: int = Config.FREDHOLM_NODES,
                  map_scale: float = Config.FREDHOLM_MAP_SCALE,
                  rule: Optional[QuadratureRule] = None) -> KernelMatrix:
    """
    Assemble the Nystrom matrix on (s, inf)

    The half line is mapped from u in (-1, 1) by x = s + L (1 + u) / (1 - u)
    before the Gauss-Legendre rule is applied.
    """
    _check_arguments(s, n, map_scale)
    if rule is None:
        rule = gauss_legendre(n, -1.0, 1.0)
    u = rule.nodes
    x = s + map_scale * (1.0 + u) / (1.0 - u)
    w = rule.weights * 2.0 * map_scale / (1.0 - u) ** 2

    root_w = np.sqrt(w)
    matrix = root_w[:, np.newaxis] * _kernel_values(x) * root_w[np.newaxis, :]
    matrix = 0.5 * (matrix + matrix.T)
    return KernelMatrix(s=float(s), n=int(n), matrix=matrix, map_scale=float(map_scale),
                        nodes=x, weights=w)


def fredholm_det_f2(s: float, n: int = Config.FREDHOLM_NODES,
                    map_scale: float = Config.FREDHOLM_MAP_SCALE,
                    rule: Optional[QuadratureRule] = None) -> float:
    """
    F2(s) as the Fredholm determinant of the Airy kernel

    The error is absolute, near machine epsilon, not relative. Where F2 is
    tiny (below 1e-78 near s = -13) the returned value can be off by orders
    of magnitude; the Painleve route covers the far left tail.

    Raises:
        DomainError: s outside [-13, 10]
        InvalidArgumentError: n < 20 or non-positive map scale
        ResolutionError: I - K lost positive definiteness (n too small)
    """
    kernel = kernel_matrix(s, n, map_scale, rule)
    operator = np.eye(kernel.n) - kernel.matrix
    try:
        factor = linalg.cholesky(operator, lower=True)
    except linalg.LinAlgError as e:
        logger.warning(f"Cholesky failed at s={s:g}, n={n}: {e}")
        raise ResolutionError(s, n) from e

    pivots = np.diag(factor)
    if np.any(pivots <= 0):
        raise ResolutionError(s, n)
    det = float(np.exp(2.0 * np.sum(np.log(pivots))))
    return min(det, 1.0)


def fredholm_det_f2_grid(ss: Iterable[float], n: int = Config.FREDHOLM_NODES,
                         map_scale: float = Config.FREDHOLM_MAP_SCALE) -> np.ndarray:
    """Evaluate fredholm_det_f2 on a grid, sharing one quadrature rule"""
    rule = gauss_legendre(n, -1.0, 1.0)
    return np.array([fredholm_det_f2(float(s), n, map_scale, rule) for s in ss])
