"""Uniform tensor-product grids and composite Newton-Cotes weights on [0, 1]^D.

Every estimate in this package is written as ``(1/N') * sum(q_i * f_i)`` where
``N'`` is the number of partitions (panels) of the rule. Rectangular and
midpoint rules have ``N' = N`` and unit weights, so the estimate reduces to the
plain sample mean.

Simpson note: the partition law used here is ``N' = (m - 2)^D`` for ``m`` nodes
per axis, which gives ``N' = 1`` at ``m = 3`` in 1-D. The standard composite
Simpson rule with ``m`` nodes has ``(m - 1)/2`` double panels. Weights follow
the standard composite rule and are rescaled so they sum to ``N'``; the
discrepancy is only in the bookkeeping of ``N'`` and never in the estimate.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import reduce

import numpy as np


class RuleKind(str, Enum):
    RECTANGULAR = "rectangular"
    MIDPOINT = "midpoint"
    TRAPEZOIDAL = "trapezoidal"
    SIMPSON = "simpson"


@dataclass(frozen=True)
class QuadratureRule:
    """A composite Newton-Cotes rule.

    ``order`` is the derivative order entering the leading error term and
    ``error_constant`` the classical 1-D composite constant dividing it.
    """

    kind: RuleKind
    order: int
    error_constant: float
    min_points_per_axis: int

    @property
    def name(self) -> str:
        return self.kind.value

    def check_points(self, m: int) -> None:
        if not isinstance(m, (int, np.integer)) or m < self.min_points_per_axis:
            raise ValueError(
                f"{self.name} rule needs at least {self.min_points_per_axis} "
                f"points per axis, got {m!r}"
            )
        if self.kind is RuleKind.SIMPSON and m % 2 == 0:
            raise ValueError(f"simpson rule needs an odd number of points per axis, got {m}")


RECTANGULAR = QuadratureRule(RuleKind.RECTANGULAR, 1, 2.0, 1)
MIDPOINT = QuadratureRule(RuleKind.MIDPOINT, 2, 24.0, 1)
TRAPEZOIDAL = QuadratureRule(RuleKind.TRAPEZOIDAL, 2, 12.0, 2)
SIMPSON = QuadratureRule(RuleKind.SIMPSON, 4, 180.0, 3)

RULES = {r.name: r for r in (RECTANGULAR, MIDPOINT, TRAPEZOIDAL, SIMPSON)}


def get_rule(rule: QuadratureRule | str) -> QuadratureRule:
    if isinstance(rule, QuadratureRule):
        return rule
    try:
        return RULES[str(rule).lower()]
    except KeyError:
        raise ValueError(f"unknown rule {rule!r}; choose from {sorted(RULES)}") from None


@dataclass(frozen=True)
class GridSpec:
    dimension: int
    points_per_axis: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.points_per_axis < 1:
            raise ValueError(f"points_per_axis must be >= 1, got {self.points_per_axis}")

    @property
    def total_points(self) -> int:
        return self.points_per_axis ** self.dimension


def integer_root(N: int, D: int) -> int:
    """Return ``m`` with ``m**D == N`` or raise ``ValueError``."""
    if N < 1 or D < 1:
        raise ValueError(f"need N >= 1 and D >= 1, got N={N}, D={D}")
    guess = int(round(N ** (1.0 / D)))
    for m in (guess - 1, guess, guess + 1):
        if m >= 1 and m ** D == N:
            return m
    raise ValueError(f"N={N} is not a perfect {D}-th power")


def axis_nodes(rule: QuadratureRule | str, m: int) -> np.ndarray:
    rule = get_rule(rule)
    rule.check_points(m)
    i = np.arange(m, dtype=float)
    if rule.kind is RuleKind.RECTANGULAR:
        return i / m
    if rule.kind is RuleKind.MIDPOINT:
        return (i + 0.5) / m
    return i / (m - 1)


def axis_weights(rule: QuadratureRule | str, m: int) -> np.ndarray:
    """1-D composite weights normalised so they sum to the 1-D partition count."""
    rule = get_rule(rule)
    rule.check_points(m)
    if rule.kind in (RuleKind.RECTANGULAR, RuleKind.MIDPOINT):
        return np.ones(m)
    if rule.kind is RuleKind.TRAPEZOIDAL:
        q = np.ones(m)
        q[0] = q[-1] = 0.5
        return q
    # simpson: (h/3)(1, 4, 2, 4, ..., 2, 4, 1) times N'_1d so that (1/N') sum q f is the rule
    w = np.ones(m)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * ((m - 2) / (3.0 * (m - 1)))


def build_grid(rule: QuadratureRule | str, D: int, m: int) -> np.ndarray:
    """All ``m**D`` nodes as an ``(m**D, D)`` array in lexicographic axis order."""
    GridSpec(D, m)
    nodes = axis_nodes(rule, m)
    mesh = np.meshgrid(*([nodes] * D), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=-1)


def partition_count(rule: QuadratureRule | str, N: int, D: int) -> int:
    rule = get_rule(rule)
    m = integer_root(N, D)
    rule.check_points(m)
    if rule.kind in (RuleKind.RECTANGULAR, RuleKind.MIDPOINT):
        return N
    if rule.kind is RuleKind.TRAPEZOIDAL:
        return (m - 1) ** D
    return (m - 2) ** D


def weights(rule: QuadratureRule | str, D: int, m: int) -> tuple[np.ndarray, int]:
    """Tensor-product weight vector ``q`` (grid order) and partition count ``N'``."""
    GridSpec(D, m)
    q1 = axis_weights(rule, m)
    q = reduce(np.multiply.outer, [q1] * D).ravel() if D > 1 else q1.copy()
    return q, partition_count(rule, m ** D, D)
