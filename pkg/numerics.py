"""
Numerical primitives: Gauss-Legendre quadrature, embedded Runge-Kutta ODE
integration, bracketed root finding and natural cubic splines
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from config import Config
from errors import BracketError, DivergenceError, DomainError, InvalidArgumentError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

NEWTON_TOL = 1e-14
NEWTON_MAX_ITER = 100


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [a, b]"""
    nodes: np.ndarray
    weights: np.ndarray
    interval: Tuple[float, float]

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        """Apply the rule to a vectorised integrand"""
        return float(np.dot(self.weights, f(self.nodes)))

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class OdeSolution:
    """Trajectory of an adaptive Dormand-Prince 5(4) integration"""
    abscissae: np.ndarray
    states: np.ndarray
    tolerance_used: float
    _dense: Optional[Callable] = field(default=None, repr=False, compare=False)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def at(self, t: ArrayLike) -> np.ndarray:
        """Dense output inside the integrated range"""
        lo, hi = sorted((self.abscissae[0], self.abscissae[-1]))
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < lo) or np.any(t_arr > hi):
            raise DomainError(f"t outside integrated range [{lo:g}, {hi:g}]")
        if self._dense is None:
            # Zero-length integration
            return np.broadcast_to(self.states[0], t_arr.shape + self.states[0].shape).copy()
        return np.asarray(self._dense(t_arr)).T


@dataclass(frozen=True)
class SplineFunction:
    """Natural cubic spline; evaluation outside the knots is an error"""
    knots: np.ndarray
    values: np.ndarray
    coefficients: np.ndarray
    _spline: CubicSpline = field(repr=False, compare=False)

    def _check_domain(self, x: np.ndarray):
        if np.any(x < self.knots[0]) or np.any(x > self.knots[-1]) or np.any(np.isnan(x)):
            raise DomainError(
                f"Spline evaluation outside [{self.knots[0]:g}, {self.knots[-1]:g}]"
            )

    def interval_index(self, x: ArrayLike) -> np.ndarray:
        """Index i of the interval [knots[i], knots[i+1]] holding x (binary search)"""
        x_arr = np.asarray(x, dtype=float)
        self._check_domain(x_arr)
        idx = np.searchsorted(self.knots, x_arr, side='right') - 1
        return np.clip(idx, 0, len(self.knots) - 2)

    def __call__(self, x: ArrayLike) -> Union[float, np.ndarray]:
        x_arr = np.asarray(x, dtype=float)
        self._check_domain(x_arr)
        out = np.asarray(self._spline(x_arr), dtype=float)
        # Interpolation condition holds bit-exactly at the knots
        idx = np.clip(np.searchsorted(self.knots, x_arr), 0, len(self.knots) - 1)
        on_knot = self.knots[idx] == x_arr
        out = np.where(on_knot, self.values[idx], out)
        return float(out) if out.ndim == 0 else out

    def derivative(self, x: ArrayLike, order: int = 1) -> Union[float, np.ndarray]:
        x_arr = np.asarray(x, dtype=float)
        self._check_domain(x_arr)
        out = np.asarray(self._spline(x_arr, nu=order), dtype=float)
        return float(out) if out.ndim == 0 else out

    def integrate(self, a: float, b: float) -> float:
        self._check_domain(np.array([a, b], dtype=float))
        return float(self._spline.integrate(a, b))

    def tail_integrals(self) -> np.ndarray:
        """Values of the integral from each knot to the last knot"""
        antiderivative = self._spline.antiderivative()
        at_knots = antiderivative(self.knots)
        return at_knots[-1] - at_knots


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0) -> QuadratureRule:
    """
    Build the n-point Gauss-Legendre rule on [a, b]

    Nodes are the roots of P_n, found by Newton iteration on the three-term
    recurrence from Chebyshev-like starting guesses.

    Args:
        n: Number of nodes (>= 1)
        a: Left endpoint
        b: Right endpoint

    Returns:
        QuadratureRule with increasing nodes inside (a, b)
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidArgumentError(f"Node count must be a positive integer, got {n!r}")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidArgumentError(f"Interval endpoints must be finite, got ({a}, {b})")
    if a >= b:
        raise InvalidArgumentError(f"Interval must satisfy a < b, got ({a}, {b})")

    k = np.arange(1, n + 1, dtype=float)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))

    def legendre_pair(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        p_prev = np.ones_like(t)
        p_curr = t.copy()
        for j in range(2, n + 1):
            p_prev, p_curr = p_curr, ((2 * j - 1) * t * p_curr - (j - 1) * p_prev) / j
        derivative = n * (t * p_curr - p_prev) / (t * t - 1.0)
        return p_curr, derivative

    for _ in range(NEWTON_MAX_ITER):
        p_n, dp_n = legendre_pair(x)
        dx = p_n / dp_n
        x = x - dx
        if np.max(np.abs(dx)) <= NEWTON_TOL:
            break
    else:
        logger.warning(f"Gauss-Legendre Newton iteration hit {NEWTON_MAX_ITER} steps for n={n}")

    _, dp_n = legendre_pair(x)
    w = 2.0 / ((1.0 - x * x) * dp_n * dp_n)

    order = np.argsort(x)
    x, w = x[order], w[order]

    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return QuadratureRule(nodes=half * x + mid, weights=half * w, interval=(float(a), float(b)))


def ode_solve(rhs: Callable[[float, np.ndarray], np.ndarray], t0: float, y0: ArrayLike,
              t1: float, rel_tol: float = Config.DEFAULT_REL_TOL,
              abs_tol: float = Config.DEFAULT_ABS_TOL) -> OdeSolution:
    """
    Integrate y' = rhs(t, y) from t0 to t1 with a Dormand-Prince 5(4) pair

    Backward integration (t1 < t0) is supported.

    Raises:
        InvalidArgumentError: non-positive tolerances or non-finite inputs
        DivergenceError: step size underflow or non-finite states
    """
    if rel_tol <= 0 or abs_tol <= 0:
        raise InvalidArgumentError("Tolerances must be positive")
    y_start = np.atleast_1d(np.asarray(y0, dtype=float))
    if not (math.isfinite(t0) and math.isfinite(t1)) or not np.all(np.isfinite(y_start)):
        raise InvalidArgumentError("Initial data must be finite")

    if t0 == t1:
        return OdeSolution(abscissae=np.array([float(t0)]), states=y_start[np.newaxis, :].copy(),
                           tolerance_used=rel_tol)

    result = solve_ivp(rhs, (t0, t1), y_start, method='RK45', rtol=rel_tol, atol=abs_tol,
                       dense_output=True)

    if result.status < 0:
        last_t = float(result.t[-1]) if len(result.t) else float(t0)
        raise DivergenceError(f"ODE integration failed: {result.message}", last_t)

    states = result.y.T
    if not np.all(np.isfinite(states)):
        bad = int(np.argmax(~np.all(np.isfinite(states), axis=1)))
        raise DivergenceError("ODE solution became non-finite", float(result.t[max(bad - 1, 0)]))

    logger.debug(f"ode_solve: {len(result.t)} accepted steps, {result.nfev} evaluations")
    return OdeSolution(abscissae=result.t, states=states, tolerance_used=rel_tol,
                       _dense=result.sol)


def find_root(f: Callable[[float], float], a: float, b: float, tol: float = 1e-12) -> float:
    """
    Bracketed root of f on [a, b] (Brent: bisection with inverse interpolation)

    Raises:
        BracketError: f(a) and f(b) have the same strict sign
    """
    if tol <= 0:
        raise InvalidArgumentError("Root tolerance must be positive")
    if a > b:
        a, b = b, a
    fa = f(a)
    if fa == 0:
        return float(a)
    fb = f(b)
    if fb == 0:
        return float(b)
    if np.sign(fa) == np.sign(fb):
        raise BracketError(f"No sign change on [{a:g}, {b:g}]: f(a)={fa:g}, f(b)={fb:g}")

    root = brentq(f, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)
    return float(min(max(root, a), b))


def spline_fit(xs: ArrayLike, ys: ArrayLike) -> SplineFunction:
    """
    Natural cubic spline through (xs, ys)

    Raises:
        InvalidArgumentError: fewer than 4 points, mismatched lengths, or
            knots that are not strictly increasing
    """
    x_arr = np.asarray(xs, dtype=float)
    y_arr = np.asarray(ys, dtype=float)
    if x_arr.ndim != 1 or x_arr.shape != y_arr.shape:
        raise InvalidArgumentError("xs and ys must be 1-D arrays of equal length")
    if len(x_arr) < 4:
        raise InvalidArgumentError(f"Need at least 4 knots, got {len(x_arr)}")
    if not (np.all(np.isfinite(x_arr)) and np.all(np.isfinite(y_arr))):
        raise InvalidArgumentError("Knots and values must be finite")
    if np.any(np.diff(x_arr) <= 0):
        raise InvalidArgumentError("Knots must be strictly increasing (duplicate or unsorted knots)")

    spline = CubicSpline(x_arr, y_arr, bc_type='natural', extrapolate=False)
    return SplineFunction(knots=x_arr.copy(), values=y_arr.copy(), coefficients=spline.c,
                          _spline=spline)
