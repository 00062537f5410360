"""Product of pairwise likelihoods of a configuration at stationarity.

For two genes sampled from a stationary stepwise-mutation population with
scaled rate theta, the allele difference d has law rho(theta)^|d| /
sqrt(1 + 2 theta) with rho = theta / (1 + theta + sqrt(1 + 2 theta)).  The
product over all gene pairs of a configuration scores how plausible the
configuration is in the ancestral population; proposals and resampling use it
as a guide, so only ratios and positive powers of it ever matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import AlleleConfig, BackwardEvent, Coalescence, Demography, ModelError, Mutation, theta_ancestral


def rho(theta: float) -> float:
    """Geometric decay of the stationary pair-difference law."""
    if theta <= 0:
        raise ModelError(f"theta must be positive, got {theta}")
    return theta / (1.0 + theta + math.sqrt(1.0 + 2.0 * theta))


@dataclass(frozen=True)
class PclContext:
    """Frozen ancestral-theta constants: one log decay, one log normalizer."""

    theta_anc: float
    log_rho: float
    log_norm: float

    @classmethod
    def from_theta(cls, theta_anc: float) -> "PclContext":
        return cls(
            theta_anc=theta_anc,
            log_rho=math.log(rho(theta_anc)),
            log_norm=-0.5 * math.log1p(2.0 * theta_anc),
        )

    @classmethod
    def from_demography(cls, demography: Demography) -> "PclContext":
        return cls.from_theta(theta_ancestral(demography))


def log_pair_likelihood(x: int, y: int, ctx: PclContext) -> float:
    return ctx.log_norm + abs(x - y) * ctx.log_rho


def log_pcl(h: AlleleConfig, ctx: PclContext) -> float:
    """Sum of log pair likelihoods over all unordered gene pairs of h."""
    items = list(h.items())
    out = 0.0
    for i, (a, ca) in enumerate(items):
        if ca >= 2:
            out += (ca * (ca - 1) // 2) * log_pair_likelihood(a, a, ctx)
        for b, cb in items[i + 1 :]:
            out += ca * cb * log_pair_likelihood(a, b, ctx)
    return out


def pair_sum(h: AlleleConfig, a: int, ctx: PclContext) -> float:
    """Sum over all genes of h of the log pair likelihood against allele a."""
    return sum(c * log_pair_likelihood(a, b, ctx) for b, c in h.items())


def log_pcl_delta(h: AlleleConfig, event: BackwardEvent, ctx: PclContext) -> float:
    """log_pcl(apply_backward(h, event)) - log_pcl(h), without the recompute.

    Removing one gene of allele a cancels its pairings with every other gene;
    a mutation additionally re-pairs the new parent gene against the rest.
    """
    if isinstance(event, Coalescence):
        a = event.allele
        if h.count(a) < 2:
            raise ModelError(f"coalescence needs two copies of allele {a}")
        return log_pair_likelihood(a, a, ctx) - pair_sum(h, a, ctx)
    if isinstance(event, Mutation):
        a, b = event.child, event.parent
        if h.count(a) < 1:
            raise ModelError(f"no copy of allele {a} to mutate")
        return (
            log_pair_likelihood(a, a, ctx)
            - pair_sum(h, a, ctx)
            + pair_sum(h, b, ctx)
            - log_pair_likelihood(a, b, ctx)
        )
    raise ModelError(f"unknown event {event!r}")
