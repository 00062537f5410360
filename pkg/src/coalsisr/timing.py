"""Holding times between backward events under a time-varying rate.

The jump rate out of a configuration h at scaled time u splits into a
coalescent component a = |h| (|h|+1), weighted by theta/theta(u), and a
mutation component b = theta |h|:

    r(u, h) = a * theta/theta(u) + b.

`integrated_hazard` evaluates the cumulative rate over an interval in closed
form; holding times are drawn either by inverting it (one uniform each) or by
rejection from a dominating constant rate.
"""

from __future__ import annotations

import enum
import math
from typing import Tuple

import numpy as np

from .model import (
    AlleleConfig,
    ConstantSize,
    Demography,
    ModelError,
    theta_ancestral,
    theta_now,
)

HAZARD_TOL = 1e-12


class HoldingStrategy(enum.Enum):
    INVERSE = "inverse"
    THINNING = "thinning"


def rate_components(h: AlleleConfig, demography: Demography) -> Tuple[float, float]:
    """(a, b) with jump rate a * theta/theta(u) + b."""
    n = h.n
    return float(n * (n + 1)), theta_now(demography) * n


def _log_ratio(demography: Demography) -> float:
    """beta with theta(u) = theta * exp(beta * u) on the ramp; 0 when constant."""
    if isinstance(demography, ConstantSize):
        return 0.0
    p = demography.params
    return math.log(p.theta_anc / p.theta) / p.D


def _g(demography: Demography, u: float) -> float:
    """Coalescent time scaling theta / theta(u)."""
    if isinstance(demography, ConstantSize):
        return 1.0
    p = demography.params
    if u >= p.D:
        return p.theta / p.theta_anc
    return math.exp(-_log_ratio(demography) * u)


def rate_integral(
    a: float, b: float, u: float, delta: float, demography: Demography
) -> float:
    """Integral of a * theta/theta(u+s) + b over s in [0, delta], closed form."""
    if delta < 0:
        raise ModelError(f"delta must be nonnegative, got {delta}")
    if isinstance(demography, ConstantSize):
        return (a + b) * delta
    p = demography.params
    beta = _log_ratio(demography)
    g_plateau = p.theta / p.theta_anc
    if abs(beta) < 1e-14:
        return (a + b) * delta
    if u >= p.D:
        return (a * g_plateau + b) * delta
    ramp = min(delta, p.D - u)
    # integral of exp(-beta (u+s)) over the ramp portion, expm1 for small beta
    coal = math.exp(-beta * u) * (-math.expm1(-beta * ramp)) / beta
    if delta > ramp:
        coal += g_plateau * (delta - ramp)
    return a * coal + b * delta


def integrated_hazard(
    h: AlleleConfig, u: float, delta: float, demography: Demography
) -> float:
    """Cumulative jump rate of configuration h over [u, u + delta]."""
    a, b = rate_components(h, demography)
    return rate_integral(a, b, u, delta, demography)


def _rate(a: float, b: float, u: float, demography: Demography) -> float:
    return a * _g(demography, u) + b


def invert_rate_integral(
    a: float, b: float, u: float, target: float, demography: Demography
) -> float:
    """delta with rate_integral(a, b, u, delta) = target, to HAZARD_TOL."""
    if target < 0:
        raise ModelError(f"hazard target must be nonnegative, got {target}")
    if target == 0.0:
        return 0.0
    g_now = _g(demography, u)
    g_plateau = (
        1.0
        if isinstance(demography, ConstantSize)
        else demography.params.theta / demography.params.theta_anc
    )
    if isinstance(demography, ConstantSize) or u >= demography.params.D:
        # rate is constant from u onward
        return target / (a * g_now + b)
    lo = target / (a * max(g_now, g_plateau) + b)
    hi = target / (a * min(g_now, g_plateau) + b)
    delta = target / (a * g_now + b)
    for _ in range(200):
        f = rate_integral(a, b, u, delta, demography) - target
        if abs(f) <= HAZARD_TOL:
            return delta
        if f > 0:
            hi = delta
        else:
            lo = delta
        step = delta - f / _rate(a, b, u + delta, demography)
        delta = step if lo < step < hi else 0.5 * (lo + hi)
    raise ModelError("holding-time inversion did not converge")


def sample_holding_inverse(
    h: AlleleConfig, u: float, demography: Demography, U: float
) -> float:
    """Holding time by inverse transform: solve hazard(delta) = -log(1 - U).

    Deterministic in U; under a constant size this reduces to the usual
    -log(1-U) / rate exactly.
    """
    if not 0.0 <= U < 1.0:
        raise ModelError(f"U must lie in [0, 1), got {U}")
    a, b = rate_components(h, demography)
    return invert_rate_integral(a, b, u, -math.log1p(-U), demography)


def sample_holding_thinning(
    h: AlleleConfig, u: float, demography: Demography, rng: np.random.Generator
) -> float:
    """Holding time by rejection against a constant dominating rate.

    Candidate points arrive at rate M >= sup of the true rate beyond the
    current time and are accepted with probability rate/M.  Backward in time
    the rate is monotone up to the plateau at D, so the supremum is attained
    at the current time or at D, whichever is larger.
    """
    a, b = rate_components(h, demography)
    t = u
    g_plateau = (
        1.0
        if isinstance(demography, ConstantSize)
        else demography.params.theta / demography.params.theta_anc
    )
    while True:
        big_m = a * max(_g(demography, t), g_plateau) + b
        t += -math.log1p(-rng.random()) / big_m
        if rng.random() * big_m <= _rate(a, b, t, demography):
            return t - u


def sample_holding(
    h: AlleleConfig,
    u: float,
    demography: Demography,
    rng: np.random.Generator,
    strategy: HoldingStrategy = HoldingStrategy.INVERSE,
) -> float:
    if strategy is HoldingStrategy.INVERSE:
        return sample_holding_inverse(h, u, demography, rng.random())
    return sample_holding_thinning(h, u, demography, rng)
