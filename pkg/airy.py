"""
Airy function Ai and its derivative on the real working range
"""
import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import special

from errors import DomainError
from numerics import gauss_legendre

logger = logging.getLogger(__name__)

X_MIN = -40.0
X_MAX = 200.0

# Past this point Ai underflows relative to double precision
UNDERFLOW_X = 108.0

AI_0 = 0.3550280538878172
AI_PRIME_0 = -0.2588194037928068

TAIL_SPAN = 12.0
TAIL_NODES = 48


@dataclass(frozen=True)
class AiryPair:
    """Value and derivative of Ai at x"""
    x: float
    ai: float
    ai_prime: float


def _check_range(x: np.ndarray):
    if np.any(~np.isfinite(x)):
        raise DomainError("Airy argument must be finite")
    if np.any(x < X_MIN) or np.any(x > X_MAX):
        raise DomainError(f"Airy argument outside working range [{X_MIN:g}, {X_MAX:g}]")


def airy_eval_array(xs: Union[float, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorised Ai, Ai' on the working range

    The Cephes kernel behind scipy.special.airy uses the Maclaurin series for
    small |x| and the exponential / oscillatory asymptotic forms beyond.
    """
    x = np.asarray(xs, dtype=float)
    _check_range(x)
    ai, ai_prime, _, _ = special.airy(x)
    ai = np.asarray(ai, dtype=float)
    ai_prime = np.asarray(ai_prime, dtype=float)
    underflow = x > UNDERFLOW_X
    if np.any(underflow):
        ai = np.where(underflow, 0.0, ai)
        ai_prime = np.where(underflow, -0.0, ai_prime)
    return ai, ai_prime


def airy_eval(x: float) -> AiryPair:
    """
    Evaluate Ai(x) and Ai'(x)

    Raises:
        DomainError: x not finite or outside [-40, 200]
    """
    ai, ai_prime = airy_eval_array(float(x))
    return AiryPair(x=float(x), ai=float(ai), ai_prime=float(ai_prime))


def airy_tail_integrals(s: float) -> Tuple[float, float, float]:
    """
    Right-tail integrals of the Airy function used to close the Painleve integrals

    Returns:
        (int_s^inf (x - s) Ai^2 dx, int_s^inf Ai^2 dx, int_s^inf Ai dx)
    """
    pair = airy_eval(s)
    ai, aip = pair.ai, pair.ai_prime
    second_moment = (2.0 * s * s * ai * ai - 2.0 * s * aip * aip - ai * aip) / 3.0
    square = aip * aip - s * ai * ai

    rule = gauss_legendre(TAIL_NODES, s, min(s + TAIL_SPAN, X_MAX))
    first = rule.integrate(lambda t: airy_eval_array(t)[0])

    return second_moment, square, first
