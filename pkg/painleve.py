"""
Hastings-McLeod solution of Painleve II and the cumulative integrals that
build the Tracy-Widom distribution functions
"""
import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

import numpy as np
from scipy.integrate import solve_bvp

from airy import airy_eval, airy_eval_array, airy_tail_integrals
from config import Config
from errors import ConvergenceError, InvalidArgumentError
from numerics import SplineFunction, spline_fit

logger = logging.getLogger(__name__)

MAX_NODES = 500000

COLUMNS = ('q', 'q_prime', 'E', 'R', 'J')


def left_asymptote(s: float) -> float:
    """Leading behaviour of the Hastings-McLeod solution as s -> -inf"""
    return math.sqrt(-s / 2.0) * (1.0 + 1.0 / (8.0 * s ** 3))


@dataclass(frozen=True)
class PainleveTable:
    """Gridded Hastings-McLeod solution with E, R, J integrals"""
    grid: np.ndarray
    q: np.ndarray
    q_prime: np.ndarray
    tol: float
    E: Optional[np.ndarray] = None
    R: Optional[np.ndarray] = None
    J: Optional[np.ndarray] = None
    _splines: Dict[str, SplineFunction] = field(default_factory=dict, repr=False, compare=False)

    @property
    def s_min(self) -> float:
        return float(self.grid[0])

    @property
    def s_max(self) -> float:
        return float(self.grid[-1])

    @property
    def step(self) -> float:
        return float((self.grid[-1] - self.grid[0]) / (len(self.grid) - 1))

    @property
    def has_integrals(self) -> bool:
        return self.E is not None and self.R is not None and self.J is not None

    def spline(self, column: str) -> SplineFunction:
        if column not in COLUMNS:
            raise InvalidArgumentError(f"Unknown table column '{column}'")
        if column not in self._splines:
            values = getattr(self, column)
            if values is None:
                raise InvalidArgumentError(f"Column '{column}' has not been computed")
            self._splines[column] = spline_fit(self.grid, values)
        return self._splines[column]

    def at(self, column: str, s):
        """Spline value of a column inside the grid"""
        return self.spline(column)(s)

    def residual(self) -> float:
        """
        Max relative ODE residual |q'' - s q - 2 q^3| / (1 + |s q|) on interior points

        q'' comes from the fourth-order five-point difference stencil.
        """
        h = self.step
        q = self.q
        s = self.grid[2:-2]
        second = (-q[:-4] + 16.0 * q[1:-3] - 30.0 * q[2:-2] + 16.0 * q[3:-1] - q[4:]) / (12.0 * h * h)
        mid = q[2:-2]
        residual = np.abs(second - s * mid - 2.0 * mid ** 3) / (1.0 + np.abs(s * mid))
        return float(np.max(residual))


def _initial_guess(grid: np.ndarray) -> np.ndarray:
    """Blend of Ai(s) on the right and sqrt(-s/2) on the left"""
    ai, ai_prime = airy_eval_array(np.clip(grid, -40.0, 200.0))
    weight = 0.5 * (1.0 + np.tanh(grid))
    left = np.sqrt((np.sqrt(grid * grid + 1.0) - grid) / 4.0)
    q0 = weight * ai + (1.0 - weight) * left
    dq0 = np.gradient(q0, grid)
    return np.vstack((q0, dq0))


def solve_hastings_mcleod(s_min: float = Config.S_MIN, s_max: float = Config.S_MAX,
                          tol: float = Config.PAINLEVE_TOL,
                          step: float = Config.PAINLEVE_STEP) -> PainleveTable:
    """
    Solve q'' = s q + 2 q^3 as a two-point boundary-value problem

    Boundary conditions: q(s_max) = Ai(s_max) on the right and the left
    asymptote sqrt(-s/2) (with its first correction) at s_min. Collocation
    with Newton iteration keeps the separatrix stable where shooting from
    the Airy side would not.

    Args:
        s_min: Left end of the window (<= -8)
        s_max: Right end of the window (>= 6)
        tol: Collocation residual tolerance in [1e-12, 1e-6]
        step: Spacing of the output grid

    Returns:
        PainleveTable with q, q' and the integrals E, R, J filled in

    Raises:
        InvalidArgumentError: preconditions on the window or tolerance
        ConvergenceError: the collocation solver did not converge
    """
    if not (s_min <= -8.0 and s_max >= 6.0):
        raise InvalidArgumentError(f"Window [{s_min:g}, {s_max:g}] must contain [-8, 6]")
    if s_max > 30.0:
        raise InvalidArgumentError(f"s_max = {s_max:g} too large: Ai(s_max) underflows the boundary scaling")
    if not (1e-12 <= tol <= 1e-6):
        raise InvalidArgumentError(f"Tolerance {tol:g} outside [1e-12, 1e-6]")
    if not (0 < step <= 0.25):
        raise InvalidArgumentError(f"Grid step {step:g} outside (0, 0.25]")

    started = time.perf_counter()
    intervals = int(math.ceil((s_max - s_min) / step))
    grid = np.linspace(s_min, s_max, intervals + 1)

    left_value = left_asymptote(s_min)
    right_value = airy_eval(s_max).ai

    def rhs(s, y):
        return np.vstack((y[1], s * y[0] + 2.0 * y[0] ** 3))

    def rhs_jac(s, y):
        jac = np.zeros((2, 2, y.shape[1]))
        jac[0, 1] = 1.0
        jac[1, 0] = s + 6.0 * y[0] ** 2
        return jac

    # Relative residuals so the tiny Airy value on the right is honoured to tol
    def boundary(ya, yb):
        return np.array([(ya[0] - left_value) / left_value, (yb[0] - right_value) / right_value])

    def boundary_jac(ya, yb):
        d_ya = np.array([[1.0 / left_value, 0.0], [0.0, 0.0]])
        d_yb = np.array([[0.0, 0.0], [1.0 / right_value, 0.0]])
        return d_ya, d_yb

    solution = solve_bvp(rhs, boundary, grid, _initial_guess(grid), fun_jac=rhs_jac,
                         bc_jac=boundary_jac, tol=tol, bc_tol=tol, max_nodes=MAX_NODES)

    diagnostics = {
        'status': int(solution.status),
        'message': solution.message,
        'iterations': int(solution.niter),
        'nodes': int(len(solution.x)),
        'max_rms_residual': float(np.max(solution.rms_residuals)),
    }
    if not solution.success:
        raise ConvergenceError(f"Painleve II solve failed: {solution.message}", diagnostics)

    q, q_prime = solution.sol(grid)
    if np.any(q <= 0):
        raise ConvergenceError("Solver left the positive Hastings-McLeod branch", diagnostics)
    if abs(q[-1] - right_value) > tol * abs(right_value):
        raise ConvergenceError("Right boundary condition not met", diagnostics)

    table = painleve_integrals(PainleveTable(grid=grid, q=q, q_prime=q_prime, tol=tol))

    logger.info(
        f"Painleve II solved on [{s_min:g}, {s_max:g}]: {diagnostics['nodes']} nodes, "
        f"{diagnostics['iterations']} iterations, max residual {diagnostics['max_rms_residual']:.2e}, "
        f"{time.perf_counter() - started:.2f}s"
    )
    return table


def painleve_integrals(table: PainleveTable) -> PainleveTable:
    """
    Fill in E(s) = int_s^inf (x-s) q^2, R(s) = int_s^inf q^2, J(s) = int_s^inf q

    Integrals run from s_max downward by spline quadrature; the part above
    s_max is closed with q ~ Ai and the closed-form Airy integrals.
    """
    e_tail, r_tail, j_tail = airy_tail_integrals(table.s_max)

    R = r_tail + spline_fit(table.grid, table.q ** 2).tail_integrals()
    J = j_tail + spline_fit(table.grid, table.q).tail_integrals()
    # E' = -R, so E is the tail integral of R
    E = e_tail + spline_fit(table.grid, R).tail_integrals()

    return replace(table, E=E, R=R, J=J, _splines={})
