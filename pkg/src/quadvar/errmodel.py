"""Leading-order Newton-Cotes error and the spread of the unbiased error.

The composite error is a sum of ``N' * D`` derivative terms divided by
``C_Q * N'^(n/D + 1)``. Treating those derivatives as independent zero-mean
random variables gives an error standard deviation that falls like
``N'^-(n/D + 1/2)``, half a power of ``N'`` faster than the worst case.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .grid import QuadratureRule, get_rule


@dataclass(frozen=True)
class ErrorModel:
    """Error bookkeeping for one rule in ``dimension`` dimensions with ``partitions`` panels.

    Either ``derivative_stds`` (one entry per panel and direction, any shape)
    or ``mean_derivative_std`` (their root-mean-square) may be given. If both
    are missing, the bound ``sqrt(2) * derivative_bound`` is used.
    """

    rule: QuadratureRule
    dimension: int
    partitions: int
    derivative_bound: Optional[float] = None
    derivative_stds: Optional[Sequence[float]] = None
    mean_derivative_std: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "rule", get_rule(self.rule))
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.partitions < 1:
            raise ValueError(f"partitions must be >= 1, got {self.partitions}")
        if self.derivative_bound is not None and self.derivative_bound < 0:
            raise ValueError("derivative_bound must be non-negative")
        if self.derivative_stds is not None and np.any(np.asarray(self.derivative_stds) < 0):
            raise ValueError("derivative stds must be non-negative")
        if self.mean_derivative_std is not None and self.mean_derivative_std < 0:
            raise ValueError("mean_derivative_std must be non-negative")

    @property
    def order(self) -> int:
        return self.rule.order

    @property
    def error_constant(self) -> float:
        return self.rule.error_constant

    def sigma_bar(self) -> float:
        """Root-mean-square derivative std over all panels and directions."""
        if self.derivative_stds is not None:
            s = np.asarray(self.derivative_stds, dtype=float).ravel()
            return math.sqrt(math.fsum(s * s) / s.size)
        if self.mean_derivative_std is not None:
            return self.mean_derivative_std
        if self.derivative_bound is not None:
            return derivative_std_bound(self.derivative_bound)
        raise ValueError("error model has no derivative std information")


def newton_cotes_error(mean_derivative: float, model: ErrorModel) -> float:
    """``D * fbar / (C_Q * N'^(n/D))``, the leading-order error ``I - I_hat``."""
    D = model.dimension
    return D * mean_derivative / (model.error_constant * model.partitions ** (model.order / D))


def unbiased_error_std(model: ErrorModel) -> float:
    D = model.dimension
    return math.sqrt(D) * model.sigma_bar() / (
        model.error_constant * model.partitions ** (theoretical_chi(model.rule, D))
    )


def unbiased_error_std_bound(model: ErrorModel) -> float:
    """Upper bound ``sqrt(2D) * eta / (C_Q * N'^chi)`` from the derivative bound."""
    if model.derivative_bound is None:
        raise ValueError("error model has no derivative bound")
    D = model.dimension
    return math.sqrt(2 * D) * model.derivative_bound / (
        model.error_constant * model.partitions ** theoretical_chi(model.rule, D)
    )


def derivative_std_bound(eta: float) -> float:
    """Upper bound ``sqrt(2) * eta`` on the std of a quantity confined to [-eta, eta].

    The tight bound is ``eta`` (the 50/50 law at +-eta); the looser constant is
    kept so reported bounds match the published ones.
    """
    if eta < 0:
        raise ValueError(f"eta must be non-negative, got {eta}")
    return math.sqrt(2.0) * eta


def bias_correct(estimate: float, expected_error: float) -> float:
    return estimate + expected_error


def worst_case_probability(partitions: int) -> float:
    """Chance that ``partitions`` symmetric independent error signs all agree."""
    if partitions < 1:
        raise ValueError(f"partitions must be >= 1, got {partitions}")
    return math.ldexp(1.0, 1 - partitions)


def theoretical_chi(rule: QuadratureRule | str, D: int) -> float:
    if D < 1:
        raise ValueError(f"D must be >= 1, got {D}")
    return get_rule(rule).order / D + 0.5


def error_exponent(rule: QuadratureRule | str, D: int) -> float:
    """Exponent ``n/D`` of the classical worst-case error."""
    if D < 1:
        raise ValueError(f"D must be >= 1, got {D}")
    return get_rule(rule).order / D
