"""Backward proposal distributions over coalescence and mutation events.

Each proposal assigns positive weight to every backward event whose reverse
forward move has positive probability, which keeps importance weights finite.
The griffiths-tavare kind weights events by the classical recursion
coefficients; pcl-guided tilts those weights toward configurations with a
higher pairwise composite likelihood; pim-optimal is the exact posterior
backward kernel of the parent-independent model at constant size and exists
to validate the machinery (its weights telescope, see log_weight_increment).
"""

from __future__ import annotations

import enum
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .model import (
    AlleleConfig,
    BackwardEvent,
    Coalescence,
    Demography,
    ModelError,
    Mutation,
    MutationModel,
    ParentIndependentMutation,
    apply_backward,
    forward_transition,
    jump_rate,
    theta_at,
    theta_now,
)
from .pcl import PclContext, log_pair_likelihood, log_pcl_delta


class ProposalKind(enum.Enum):
    GRIFFITHS_TAVARE = "gt"
    PCL_GUIDED = "pcl"
    PIM_OPTIMAL = "pim-optimal"


def backward_events(h: AlleleConfig, mutation: MutationModel) -> List[BackwardEvent]:
    """All backward events out of h, in a fixed order.

    Per occupied allele (ascending): its coalescence when two copies are
    present, then mutations to each possible parent allele (ascending).
    """
    events: List[BackwardEvent] = []
    for a, c in h.items():
        if c >= 2:
            events.append(Coalescence(a))
        for b in mutation.parents_of(a):
            events.append(Mutation(child=a, parent=b))
    return events


def _gt_weight(
    h: AlleleConfig,
    event: BackwardEvent,
    u: float,
    demography: Demography,
    mutation: MutationModel,
) -> float:
    th = theta_now(demography)
    if isinstance(event, Coalescence):
        c = h.count(event.allele)
        return (th / theta_at(demography, u)) * c * (c - 1)
    return th * h.count(event.child) * mutation.transition_prob(event.parent, event.child)


def _pim_optimal_weight(
    h: AlleleConfig,
    event: BackwardEvent,
    u: float,
    demography: Demography,
    mutation: ParentIndependentMutation,
) -> float:
    """Forward probability into h times the sample-law ratio of the ancestor.

    The ratio uses the predictive law of the parent-independent model with
    the scaled rate at the current time; at constant size the product equals
    P(h | ancestor) * F(ancestor) / F(h) exactly.
    """
    th = theta_now(demography)
    th_loc = theta_at(demography, u)
    n = h.n
    prev = apply_backward(h, event)
    lam = jump_rate(prev, u, demography, mutation)
    if isinstance(event, Coalescence):
        a = event.allele
        c = h.count(a)
        p_fwd = (th / th_loc) * n * (c - 1) / lam
        f_ratio = (c / n) * (n - 1 + th_loc) / (c - 1 + th_loc * mutation.stationary_prob(a))
        return p_fwd * f_ratio
    a, b = event.child, event.parent
    ca, cb = h.count(a), h.count(b)
    p_fwd = th * (cb + 1) * mutation.stationary_prob(a) / lam
    f_ratio = (
        (ca / (cb + 1))
        * (cb + th_loc * mutation.stationary_prob(b))
        / (ca - 1 + th_loc * mutation.stationary_prob(a))
    )
    return p_fwd * f_ratio


def event_weights(
    h: AlleleConfig,
    u: float,
    kind: ProposalKind,
    demography: Demography,
    mutation: MutationModel,
    pcl_ctx: Optional[PclContext] = None,
    beta_q: float = 1.0,
) -> Tuple[List[BackwardEvent], np.ndarray]:
    """Unnormalized proposal weights over backward_events(h, mutation)."""
    if h.n < 2:
        raise ModelError("no backward step to propose from a single lineage")
    events = backward_events(h, mutation)
    if kind is ProposalKind.PIM_OPTIMAL:
        if not isinstance(mutation, ParentIndependentMutation):
            raise ModelError("pim-optimal requires the parent-independent model")
        w = np.array(
            [_pim_optimal_weight(h, e, u, demography, mutation) for e in events]
        )
        return events, w
    w = np.array([_gt_weight(h, e, u, demography, mutation) for e in events])
    if kind is ProposalKind.PCL_GUIDED:
        if pcl_ctx is None:
            pcl_ctx = PclContext.from_demography(demography)
        tilt = np.array([log_pcl_delta(h, e, pcl_ctx) for e in events])
        w = w * np.exp(beta_q * tilt)
    return events, w


def propose(
    h: AlleleConfig,
    u: float,
    kind: ProposalKind,
    demography: Demography,
    mutation: MutationModel,
    rng: np.random.Generator,
    pcl_ctx: Optional[PclContext] = None,
    beta_q: float = 1.0,
) -> Tuple[BackwardEvent, float]:
    """Draw one backward event; returns it with its normalized log probability."""
    events, w = event_weights(h, u, kind, demography, mutation, pcl_ctx, beta_q)
    total = float(w.sum())
    r = rng.random() * total
    acc = 0.0
    pick = len(w) - 1
    for i, wi in enumerate(w):
        acc += wi
        if acc >= r:
            pick = i
            break
    return events[pick], math.log(w[pick] / total)


def log_weight_increment(
    h: AlleleConfig,
    event: BackwardEvent,
    u: float,
    kind: ProposalKind,
    demography: Demography,
    mutation: MutationModel,
    pcl_ctx: Optional[PclContext] = None,
    beta_q: float = 1.0,
) -> float:
    """log of forward probability over proposal probability for one step.

    The forward probability is evaluated at the event time u, i.e. after the
    holding time has been added, and conditions on the ancestor configuration.
    """
    events, w = event_weights(h, u, kind, demography, mutation, pcl_ctx, beta_q)
    try:
        idx = events.index(event)
    except ValueError:
        raise ModelError(f"{event!r} is not a backward event of {h}") from None
    log_q = math.log(w[idx] / w.sum())
    prev = apply_backward(h, event)
    p_fwd = forward_transition(h, prev, u, demography, mutation)
    return math.log(p_fwd) - log_q
