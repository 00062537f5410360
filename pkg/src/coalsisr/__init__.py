"""Coalescent likelihood estimation by sequential importance sampling.

Estimates the likelihood of allele-count samples under stepwise or
parent-independent mutation and a constant or exponentially changing
population size, with optional weight-based resampling of the particle
collection, plus likelihood-surface inference on top.
"""

from .model import (
    AlleleConfig,
    BackwardEvent,
    Coalescence,
    ConstantSize,
    Demography,
    ExponentialSizeChange,
    InvalidEvent,
    ModelError,
    Mutation,
    MutationModel,
    ParentIndependentMutation,
    ScaledParams,
    StepwiseMutation,
    UnreachableTransition,
    apply_backward,
    forward_transition,
    theta_at,
    total_rate,
)

__version__ = "0.1.0"
