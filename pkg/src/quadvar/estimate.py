"""Monte Carlo and Newton-Cotes estimates of integrals over the unit D-cube."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .grid import QuadratureRule, build_grid, get_rule, weights


@dataclass(frozen=True)
class FunctionOracle:
    """Deterministic integrand on [0, 1]^D.

    ``evaluator`` is vectorised: it maps an ``(n, D)`` array of points to ``n``
    values. ``known_mean`` and ``known_std`` are the population statistics of
    the integrand when they are known in closed form (used for verification
    only, never by the estimators).
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    dimension: int
    known_mean: Optional[float] = None
    known_std: Optional[float] = None

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.dimension:
            raise ValueError(f"expected points of dimension {self.dimension}, got {points.shape[1]}")
        values = np.asarray(self.evaluator(points), dtype=float).reshape(len(points))
        if not np.all(np.isfinite(values)):
            raise ValueError("integrand returned non-finite values")
        return values


@dataclass(frozen=True)
class EstimateReport:
    """Result of one integral estimate.

    ``empirical_std`` is the population (divide-by-N) standard deviation of
    the sampled values over ``sqrt(N)``; it is only reported for MC.
    """

    estimate: float
    method: str
    sample_count: int
    theoretical_std: Optional[float] = None
    empirical_std: Optional[float] = None
    seed: Optional[int] = None


def mc_theoretical_std(sigma_f: float, N: int) -> float:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if sigma_f < 0:
        raise ValueError(f"sigma_f must be non-negative, got {sigma_f}")
    return sigma_f / math.sqrt(N)


def mc_integrate(oracle: FunctionOracle, N: int, seed: int) -> EstimateReport:
    """Plain MC with ``N`` i.i.d. uniform points drawn with replacement."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    rng = np.random.default_rng(seed)
    points = rng.random((N, oracle.dimension))
    values = oracle(points)
    mean = math.fsum(values) / N
    pop_var = math.fsum((values - mean) ** 2) / N
    theory = None
    if oracle.known_std is not None:
        theory = mc_theoretical_std(oracle.known_std, N)
    return EstimateReport(
        estimate=mean,
        method="mc",
        sample_count=N,
        theoretical_std=theory,
        empirical_std=math.sqrt(pop_var / N),
        seed=seed,
    )


def quadrature_integrate(oracle: FunctionOracle, rule: QuadratureRule | str, m: int) -> EstimateReport:
    """Composite rule with ``m`` nodes per axis, ``(1/N') * sum(q_i f_i)``.

    When ``known_std`` is set the report carries the unknown-function standard
    deviation of the estimate (see :func:`quad_std_unknown`).
    """
    rule = get_rule(rule)
    D = oracle.dimension
    points = build_grid(rule, D, m)
    q, n_part = weights(rule, D, m)
    values = oracle(points)
    estimate = math.fsum(q * values) / n_part
    theory = None
    if oracle.known_std is not None:
        theory = quad_std_unknown(q, n_part, oracle.known_std)
    return EstimateReport(estimate=estimate, method=rule.name, sample_count=len(points), theoretical_std=theory)


def quad_std_unknown(q, n_partitions: int, sigma_f: float) -> float:
    """Std of ``(1/N') sum q_i f_i`` when the ``f_i`` are i.i.d. with std ``sigma_f``."""
    q = np.asarray(q, dtype=float)
    if np.any(q < 0):
        raise ValueError("weights must be non-negative")
    total = math.fsum(q)
    if abs(total - n_partitions) > 1e-12 * max(1.0, n_partitions):
        raise ValueError(f"weights sum to {total}, expected N'={n_partitions}")
    return sigma_f / n_partitions * math.sqrt(math.fsum(q * q))


def min_variance_weights(N: int, n_partitions: int) -> np.ndarray:
    if not 1 <= n_partitions <= N:
        raise ValueError(f"need 1 <= N' <= N, got N'={n_partitions}, N={N}")
    return np.full(N, n_partitions / N)
