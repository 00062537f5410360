"""Allele configurations and the jump process they evolve under.

Samples are unordered collections of gene copies typed by a repeat count
(allele) on a bounded ladder 1..K.  Looking from the present into the past,
a configuration gains a lineage (seen forward in time: a split) or swaps one
gene for its mutational parent.  All rates here are per unit of scaled time
u = t / (2 N(0)), where N(0) is the current population size in gene copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Tuple, Union

import numpy as np


class ModelError(ValueError):
    """Invalid model input (bad configuration, event, or parameter)."""


class UnreachableTransition(ModelError):
    """Configuration pair not connected by a single forward event."""


class InvalidEvent(ModelError):
    """Backward event not applicable to the given configuration."""


# ---------------------------------------------------------------------------
# demography
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledParams:
    """Demographic parameters on the mutation-rate scale.

    theta      current scaled mutation rate, 2 * N(0) * mu
    D          scaled duration of the size change, T / (2 N(0))
    theta_anc  ancestral scaled mutation rate, 2 * N_anc * mu
    """

    theta: float
    D: float
    theta_anc: float

    def __post_init__(self) -> None:
        if not (self.theta > 0 and self.theta_anc > 0):
            raise ModelError(f"theta and theta_anc must be positive, got {self}")
        if self.D < 0:
            raise ModelError(f"D must be nonnegative, got {self}")

    @property
    def n_ratio(self) -> float:
        """Current over ancestral population size, N(0) / N_anc."""
        return self.theta / self.theta_anc


@dataclass(frozen=True)
class ConstantSize:
    theta: float

    def __post_init__(self) -> None:
        if not self.theta > 0:
            raise ModelError(f"theta must be positive, got {self.theta}")


@dataclass(frozen=True)
class ExponentialSizeChange:
    """Population size moves exponentially from N(0) to N_anc over [0, D].

    Backward in time, theta(u) = theta * (theta_anc / theta) ** (u / D) for
    u <= D and stays at theta_anc beyond.  theta_anc > theta is a population
    contraction (forward in time); theta_anc < theta an expansion.
    """

    params: ScaledParams

    def __post_init__(self) -> None:
        if self.params.D == 0:
            raise ModelError("size change needs D > 0; use ConstantSize instead")


Demography = Union[ConstantSize, ExponentialSizeChange]


def theta_at(demography: Demography, u: float) -> float:
    """Scaled mutation rate theta(u) = 2 * N(u * 2N(0)) * mu at scaled time u."""
    if u < 0:
        raise ModelError(f"scaled time must be nonnegative, got {u}")
    if isinstance(demography, ConstantSize):
        return demography.theta
    p = demography.params
    if u >= p.D:
        return p.theta_anc
    return p.theta * (p.theta_anc / p.theta) ** (u / p.D)


def theta_now(demography: Demography) -> float:
    return demography.theta if isinstance(demography, ConstantSize) else demography.params.theta


def theta_ancestral(demography: Demography) -> float:
    """theta on the ancestral plateau (equals theta for a constant size)."""
    if isinstance(demography, ConstantSize):
        return demography.theta
    return demography.params.theta_anc


# ---------------------------------------------------------------------------
# mutation models
# ---------------------------------------------------------------------------


class StepwiseMutation:
    """Single-step mutation on the ladder 1..K.

    Interior alleles move one step up or down with probability 1/2 each.  At
    the ladder ends the outward half holds in place, which keeps the matrix
    doubly stochastic, so the stationary law is uniform.
    """

    def __init__(self, K: int = 200):
        if K < 2:
            raise ModelError(f"allele ladder needs K >= 2, got {K}")
        self.K = int(K)

    def stationary_prob(self, a: int) -> float:
        self._check(a)
        return 1.0 / self.K

    def transition_prob(self, b: int, a: int) -> float:
        """p(b -> a), including the diagonal hold mass at the ends."""
        self._check(b)
        self._check(a)
        if abs(a - b) == 1:
            return 0.5
        if a == b and (b == 1 or b == self.K):
            return 0.5
        return 0.0

    def self_prob(self, b: int) -> float:
        return 0.5 if (b == 1 or b == self.K) else 0.0

    def parents_of(self, a: int) -> List[int]:
        """Alleles b != a with p(b -> a) > 0."""
        self._check(a)
        return [b for b in (a - 1, a + 1) if 1 <= b <= self.K]

    targets_of = parents_of  # the step kernel is symmetric

    def matrix(self) -> np.ndarray:
        p = np.zeros((self.K, self.K))
        for b in range(1, self.K + 1):
            for a in (b - 1, b + 1):
                if 1 <= a <= self.K:
                    p[b - 1, a - 1] = 0.5
            p[b - 1, b - 1] = self.self_prob(b)
        return p

    def psi(self) -> np.ndarray:
        return np.full(self.K, 1.0 / self.K)

    def _check(self, a: int) -> None:
        if not 1 <= a <= self.K:
            raise ModelError(f"allele {a} outside ladder 1..{self.K}")

    def __repr__(self) -> str:
        return f"StepwiseMutation(K={self.K})"


class ParentIndependentMutation:
    """Every mutation draws the child allele from a fixed law, parent ignored."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or len(w) < 2:
            raise ModelError("need a 1-d vector of at least two allele weights")
        if not np.all(w > 0):
            raise ModelError("allele weights must be strictly positive")
        self.K = len(w)
        self._psi = w / w.sum()

    def stationary_prob(self, a: int) -> float:
        self._check(a)
        return float(self._psi[a - 1])

    def transition_prob(self, b: int, a: int) -> float:
        self._check(b)
        return self.stationary_prob(a)

    def self_prob(self, b: int) -> float:
        self._check(b)
        return float(self._psi[b - 1])

    def parents_of(self, a: int) -> List[int]:
        self._check(a)
        return [b for b in range(1, self.K + 1) if b != a]

    targets_of = parents_of

    def matrix(self) -> np.ndarray:
        return np.tile(self._psi, (self.K, 1))

    def psi(self) -> np.ndarray:
        return self._psi.copy()

    def _check(self, a: int) -> None:
        if not 1 <= a <= self.K:
            raise ModelError(f"allele {a} outside ladder 1..{self.K}")

    def __repr__(self) -> str:
        return f"ParentIndependentMutation(K={self.K})"


MutationModel = Union[StepwiseMutation, ParentIndependentMutation]


def stationary_prob(mutation: MutationModel, a: int) -> float:
    return mutation.stationary_prob(a)


# ---------------------------------------------------------------------------
# allele configurations
# ---------------------------------------------------------------------------


class AlleleConfig:
    """Multiset of gene copies, stored as counts per allele."""

    __slots__ = ("K", "_counts", "n")

    def __init__(self, counts: Mapping[int, int], K: int):
        if K < 1:
            raise ModelError(f"K must be positive, got {K}")
        clean: Dict[int, int] = {}
        for a, c in counts.items():
            if not 1 <= a <= K:
                raise ModelError(f"allele {a} outside ladder 1..{K}")
            if c < 0:
                raise ModelError(f"negative count for allele {a}")
            if c > 0:
                clean[int(a)] = int(c)
        if not clean:
            raise ModelError("configuration must hold at least one gene")
        self.K = int(K)
        self._counts = clean
        self.n = sum(clean.values())

    def count(self, a: int) -> int:
        return self._counts.get(a, 0)

    def items(self) -> Iterator[Tuple[int, int]]:
        return iter(sorted(self._counts.items()))

    def alleles(self) -> List[int]:
        return sorted(self._counts)

    def to_array(self) -> np.ndarray:
        arr = np.zeros(self.K, dtype=np.int64)
        for a, c in self._counts.items():
            arr[a - 1] = c
        return arr

    @classmethod
    def from_array(cls, arr, K: int | None = None) -> "AlleleConfig":
        arr = np.asarray(arr)
        K = len(arr) if K is None else K
        return cls({a + 1: int(c) for a, c in enumerate(arr) if c > 0}, K)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlleleConfig)
            and self.K == other.K
            and self._counts == other._counts
        )

    def __hash__(self) -> int:
        return hash((self.K, tuple(sorted(self._counts.items()))))

    def __repr__(self) -> str:
        inner = ", ".join(f"{a}: {c}" for a, c in self.items())
        return f"AlleleConfig({{{inner}}}, K={self.K})"


# ---------------------------------------------------------------------------
# backward events
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Coalescence:
    """Two gene copies of the same allele merge into one."""

    allele: int


@dataclass(frozen=True)
class Mutation:
    """One gene of allele `child` is traced back to a parent gene of allele `parent`."""

    child: int
    parent: int


BackwardEvent = Union[Coalescence, Mutation]


def apply_backward(h: AlleleConfig, event: BackwardEvent) -> AlleleConfig:
    """Configuration one step further into the past."""
    counts = dict(h.items())
    if isinstance(event, Coalescence):
        a = event.allele
        if h.count(a) < 2:
            raise InvalidEvent(f"coalescence needs two copies of allele {a} in {h}")
        counts[a] -= 1
    elif isinstance(event, Mutation):
        a, b = event.child, event.parent
        if a == b:
            raise InvalidEvent("mutation must change the allele")
        if h.count(a) < 1:
            raise InvalidEvent(f"no copy of allele {a} to mutate in {h}")
        if not 1 <= b <= h.K:
            raise InvalidEvent(f"parent allele {b} outside ladder 1..{h.K}")
        counts[a] -= 1
        counts[b] = counts.get(b, 0) + 1
    else:
        raise InvalidEvent(f"unknown event {event!r}")
    return AlleleConfig(counts, h.K)


# ---------------------------------------------------------------------------
# forward rates
# ---------------------------------------------------------------------------


def total_rate(h: AlleleConfig, u: float, demography: Demography) -> float:
    """Rate |h| * ((|h|+1) * theta/theta(u) + theta) of the forward process at u.

    This counts every mutation event, including the diagonal hold mass that a
    bounded mutation matrix may carry; `jump_rate` strips the latter.
    """
    th = theta_now(demography)
    n = h.n
    return n * ((n + 1) * th / theta_at(demography, u) + th)


def jump_rate(
    h: AlleleConfig, u: float, demography: Demography, mutation: MutationModel
) -> float:
    """Total rate of state-changing forward events out of h at scaled time u.

    Equals total_rate unless the mutation matrix holds mass on its diagonal
    (ladder ends of the stepwise model, every row of the parent-independent
    model); a self-mutation leaves the configuration unchanged and is not a
    jump of the configuration process.
    """
    th = theta_now(demography)
    n = h.n
    mut = sum(c * (1.0 - mutation.self_prob(a)) for a, c in h.items())
    return n * (n + 1) * th / theta_at(demography, u) + th * mut


def forward_event_weights(
    h: AlleleConfig, u: float, demography: Demography, mutation: MutationModel
) -> List[Tuple[AlleleConfig, float]]:
    """All configurations reachable by one forward event, with their rates.

    Forward means toward the present: a split that adds one lineage of an
    existing allele, or a mutation of one gene to another allele.  The weights
    sum to jump_rate(h, u, ...).
    """
    th = theta_now(demography)
    g = th / theta_at(demography, u)
    out: List[Tuple[AlleleConfig, float]] = []
    counts = dict(h.items())
    for a, c in h.items():
        nxt = dict(counts)
        nxt[a] = c + 1
        out.append((AlleleConfig(nxt, h.K), g * (h.n + 1) * c))
    for b, c in h.items():
        for a in mutation.targets_of(b):
            nxt = dict(counts)
            nxt[b] = c - 1
            nxt[a] = nxt.get(a, 0) + 1
            w = th * c * mutation.transition_prob(b, a)
            if w > 0:
                out.append((AlleleConfig(nxt, h.K), w))
    return out


def forward_transition(
    h_next: AlleleConfig,
    h: AlleleConfig,
    u: float,
    demography: Demography,
    mutation: MutationModel,
) -> float:
    """Probability that the next forward jump out of h lands on h_next.

    Raises UnreachableTransition when the pair is not connected by a single
    split or mutation; a connected mutation whose matrix entry is zero has
    probability 0.0 instead.
    """
    if h_next.K != h.K:
        raise UnreachableTransition("configurations live on different ladders")
    th = theta_now(demography)
    g = th / theta_at(demography, u)

    diff = {a: h_next.count(a) - h.count(a) for a in set(h.alleles()) | set(h_next.alleles())}
    diff = {a: d for a, d in diff.items() if d != 0}

    if h_next.n == h.n + 1 and len(diff) == 1:
        (a, d), = diff.items()
        if d != 1 or h.count(a) < 1:
            raise UnreachableTransition(f"{h} cannot split into {h_next}")
        weight = g * (h.n + 1) * h.count(a)
    elif h_next.n == h.n and len(diff) == 2:
        gained = [a for a, d in diff.items() if d == 1]
        lost = [a for a, d in diff.items() if d == -1]
        if len(gained) != 1 or len(lost) != 1:
            raise UnreachableTransition(f"{h} cannot mutate into {h_next}")
        a, b = gained[0], lost[0]
        weight = th * h.count(b) * mutation.transition_prob(b, a)
        if weight == 0.0:
            return 0.0
    else:
        raise UnreachableTransition(f"{h_next} is not one forward event from {h}")

    return weight / jump_rate(h, u, demography, mutation)
