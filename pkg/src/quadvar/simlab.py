"""Seeded simulation experiments.

* the error-exponent simulation: random derivative terms summed into a
  composite error, whose spread gives an estimate of chi in ``sigma ~ N^-chi``;
* the unknown-function experiment: quadrature and MC on i.i.d. normal
  integrands that stay fixed once sampled;
* AR(1) chains checking the integrated-autocorrelation variance ``tau sigma^2 / N``;
* a randomized sweep of the total-variance inequality on small decks.

Every replicate draws from a generator seeded purely by
``(master_seed, *indices)`` so results do not depend on thread count or
execution order.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.signal import lfilter

from . import kernels
from .discrete import KnowledgeState, total_variance_check
from .errmodel import error_exponent, theoretical_chi
from .grid import QuadratureRule, build_grid, get_rule


def derive_seed(master_seed: int, *indices: int) -> int:
    """64-bit seed that depends only on the master seed and replicate indices."""
    ss = np.random.SeedSequence([int(master_seed), *(int(i) for i in indices)])
    return int(ss.generate_state(1, np.uint64)[0])


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --- error exponent -----------------------------------------------------------


@dataclass(frozen=True)
class ChiSimConfig:
    """Derivatives are uniform on ``[-eta, eta]``; ``n`` is the number of error terms."""

    rule: QuadratureRule | str
    dimensions: tuple = (1, 2, 4, 8, 16)
    n: int = 2 ** 16
    inner_reps: int = 100
    outer_reps: int = 10
    master_seed: int = 0
    eta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "rule", get_rule(self.rule))
        object.__setattr__(self, "dimensions", tuple(int(d) for d in self.dimensions))
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.inner_reps < 2 or self.outer_reps < 2:
            raise ValueError("inner_reps and outer_reps must be >= 2")
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not self.dimensions or min(self.dimensions) < 1:
            raise ValueError("dimensions must be a non-empty list of positive integers")

    @property
    def derivative_std(self) -> float:
        return self.eta / math.sqrt(3.0)


@dataclass(frozen=True)
class ChiRow:
    dimension: int
    error_exponent: float
    theory_chi: float
    chi_hat: float
    chi_hat_std: float


@dataclass
class ChiResult:
    config: ChiSimConfig
    rows: list
    runtime: float = field(default=0.0, compare=False)


def simulate_error_sample(config: ChiSimConfig, D: int, replicate_seed: int) -> float:
    """One simulated composite error ``sum of n*D derivatives / (C_Q n^(n_Q/D + 1))``."""
    rule = config.rule
    total = kernels.centered_uniform_sum(replicate_seed, config.n * D)
    scale = rule.error_constant * config.n ** (rule.order / D + 1.0)
    return config.eta * math.ldexp(float(total), -53) / scale


def estimate_error_std(errors: Sequence[float]) -> float:
    """Root mean square about zero (the error is unbiased by construction)."""
    if len(errors) == 0:
        raise ValueError("need at least one error sample")
    e = np.asarray(errors, dtype=float)
    return math.sqrt(math.fsum(e * e) / len(e))


def estimate_chi(sigma_hat: float, D: int, sigma_bar: float, error_constant: float, N: int) -> float:
    """``log_N(sqrt(D) sigma_bar / (C_Q sigma_hat))``."""
    if not sigma_hat > 0:
        raise ValueError(f"sigma_hat must be positive, got {sigma_hat}")
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    return math.log(math.sqrt(D) * sigma_bar / (error_constant * sigma_hat)) / math.log(N)


def run_chi_experiment(config: ChiSimConfig, threads: int = 1) -> ChiResult:
    start = time.perf_counter()
    tasks = [
        (D, outer, inner)
        for D in config.dimensions
        for outer in range(config.outer_reps)
        for inner in range(config.inner_reps)
    ]
    errors = _map(
        lambda t: simulate_error_sample(config, t[0], derive_seed(config.master_seed, t[0], t[1], t[2])),
        tasks,
        threads,
    )
    errors = np.array(errors).reshape(len(config.dimensions), config.outer_reps, config.inner_reps)
    rows = []
    rule = config.rule
    for D, per_dim in zip(config.dimensions, errors):
        chis = np.array([
            estimate_chi(estimate_error_std(e), D, config.derivative_std, rule.error_constant, config.n)
            for e in per_dim
        ])
        rows.append(ChiRow(
            dimension=D,
            error_exponent=error_exponent(rule, D),
            theory_chi=theoretical_chi(rule, D),
            chi_hat=math.fsum(chis) / len(chis),
            chi_hat_std=float(np.std(chis)),
        ))
    return ChiResult(config, rows, time.perf_counter() - start)


# --- unknown-function experiment ------------------------------------------------


class UnknownFunction:
    """An integrand nobody knows: each new point gets an i.i.d. normal value.

    Values are memoised by exact coordinates, so a point sampled twice returns
    the value it collapsed to the first time.
    """

    def __init__(self, rng: np.random.Generator, mean: float = 0.0, std: float = 1.0):
        self._rng = rng
        self.mean = mean
        self.std = std
        self._memo: dict = {}

    def __call__(self, points) -> np.ndarray:
        keys = [tuple(p) for p in np.atleast_2d(np.asarray(points, dtype=float)).tolist()]
        new = [k for k in dict.fromkeys(keys) if k not in self._memo]
        if new:
            draws = self.mean + self.std * self._rng.standard_normal(len(new))
            self._memo.update(zip(new, draws.tolist()))
        return np.array([self._memo[k] for k in keys])

    def __len__(self):
        return len(self._memo)


def midpoint_sample_points(D: int, samples: int) -> np.ndarray:
    """First ``samples`` nodes (lexicographic) of the smallest midpoint grid holding that many."""
    m = 1
    while m ** D < samples:
        m += 1
    return build_grid("midpoint", D, m)[:samples]


@dataclass(frozen=True)
class UnknownFunctionSummary:
    """Averages over repetitions of per-repetition population statistics.

    ``*_mean`` is the average integral estimate, ``*_mean_se`` its standard
    error, ``*_std`` the average population (divide-by-N) std of the samples.
    """

    dimension: int
    samples: int
    reps: int
    quadrature_mean: float
    quadrature_std: float
    quadrature_mean_se: float
    mc_mean: float
    mc_std: float
    mc_mean_se: float


def unknown_function_experiment(D: int, samples: int, reps: int, seed: int,
                                std: float = 1.0) -> UnknownFunctionSummary:
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    grid = midpoint_sample_points(D, samples)
    stats = np.empty((reps, 4))
    for r in range(reps):
        rng = np.random.default_rng(derive_seed(seed, D, r))
        f = UnknownFunction(rng, 0.0, std)
        fq = f(grid)
        fm = f(rng.random((samples, D)))
        stats[r] = fq.mean(), fq.std(), fm.mean(), fm.std()
    means = stats.mean(axis=0)
    se = stats[:, [0, 2]].std(axis=0, ddof=1) / math.sqrt(reps) if reps > 1 else np.zeros(2)
    return UnknownFunctionSummary(
        dimension=D,
        samples=samples,
        reps=reps,
        quadrature_mean=float(means[0]),
        quadrature_std=float(means[1]),
        quadrature_mean_se=float(se[0]),
        mc_mean=float(means[2]),
        mc_std=float(means[3]),
        mc_mean_se=float(se[1]),
    )


# --- MCMC comparison ------------------------------------------------------------


@dataclass(frozen=True)
class MCMCCompareConfig:
    chain_length: int = 100_000
    rho: float = 0.5
    replicates: int = 200
    seed: int = 0
    sigma_f: float = 1.0

    def __post_init__(self):
        if not -1 < self.rho < 1:
            raise ValueError(f"need |rho| < 1, got {self.rho}")
        if self.chain_length < 1 or self.replicates < 2:
            raise ValueError("need chain_length >= 1 and replicates >= 2")
        if self.sigma_f < 0:
            raise ValueError("sigma_f must be non-negative")


@dataclass(frozen=True)
class MCMCCompareResult:
    tau: float
    theory_variance: float
    empirical_variance: float
    finite_n_variance: float
    empirical_tau: float


def ar1_chain(rng: np.random.Generator, n: int, rho: float, sigma: float) -> np.ndarray:
    """Stationary AR(1) chain with marginal std ``sigma`` and lag-1 correlation ``rho``."""
    e = rng.standard_normal(n)
    c = sigma * math.sqrt(1.0 - rho * rho)
    if c > 0:
        e[0] /= math.sqrt(1.0 - rho * rho)
    else:
        e[0] *= sigma
        return np.full(n, e[0])
    return lfilter([c], [1.0, -rho], e)


def integrated_autocorr_time(x: np.ndarray, c: float = 5.0) -> float:
    """``1 + 2 sum_k acf(k)`` with a Madras-Sokal self-consistent window."""
    x = np.asarray(x, dtype=float) - np.mean(x)
    n = len(x)
    f = np.fft.rfft(x, 2 * n)
    acf = np.fft.irfft(f * np.conjugate(f))[:n]
    if acf[0] == 0:
        return 1.0
    acf /= acf[0]
    tau = 1.0
    for window in range(1, n):
        tau = 1.0 + 2.0 * acf[1:window + 1].sum()
        if window >= c * tau:
            break
    return float(tau)


def mcmc_variance_compare(config: MCMCCompareConfig) -> MCMCCompareResult:
    """Variance of AR(1) chain means against ``tau sigma^2 / N``, ``tau = (1+rho)/(1-rho)``.

    ``empirical_variance`` is the unbiased (ddof=1) variance of the replicate
    means; ``finite_n_variance`` is the exact variance for a chain of length N.
    """
    rho, n, s2 = config.rho, config.chain_length, config.sigma_f ** 2
    tau = (1.0 + rho) / (1.0 - rho)
    means = np.empty(config.replicates)
    first = None
    for r in range(config.replicates):
        chain = ar1_chain(np.random.default_rng(derive_seed(config.seed, r)), n, rho, config.sigma_f)
        means[r] = math.fsum(chain) / n
        if first is None:
            first = chain
    k = np.arange(1, n)
    finite = s2 / n * (1.0 + 2.0 * math.fsum((1.0 - k / n) * rho ** k))
    return MCMCCompareResult(
        tau=tau,
        theory_variance=tau * s2 / n,
        empirical_variance=float(np.var(means, ddof=1)),
        finite_n_variance=finite,
        empirical_tau=integrated_autocorr_time(first),
    )


# --- total-variance sweep ---------------------------------------------------------


@dataclass(frozen=True)
class SweepResult:
    count: int
    violations: int
    uninformed_cases: int
    equality_failures: int
    identity_failures: int


def random_knowledge_states(count: int, max_k: int, seed: int, max_alphabet: int = 4):
    """Yield ``(state, N)`` pairs: random decks with random pinned positions.

    Pins record the deck's true values at a random subset of positions (the
    empty subset gives the uninformed prior).
    """
    rng = np.random.default_rng(seed)
    for _ in range(count):
        K = int(rng.integers(1, max_k + 1))
        alphabet = rng.choice(10, size=int(rng.integers(1, min(K, max_alphabet) + 1)), replace=False)
        deck = [int(v) for v in rng.choice(alphabet, size=K)]
        n_pins = int(rng.integers(0, K + 1))
        positions = sorted(int(p) for p in rng.choice(K, size=n_pins, replace=False))
        N = int(rng.integers(1, K + 1))
        yield KnowledgeState.pinned(deck, {p: deck[p] for p in positions}), N


def totalvar_sweep(count: int, max_k: int, seed: int) -> SweepResult:
    """Exact total-variance checks on random decks.

    Counts inequality violations, uninformed cases where equality fails, and
    any case where ``E[Var|g] + Var(E[.|g]) != Var_MC``.
    """
    violations = uninformed = eq_fail = id_fail = 0
    for state, N in random_knowledge_states(count, max_k, seed):
        res = total_variance_check(state, N, exact=True)
        violations += not res.inequality_holds
        if res.expected_conditional_variance + res.variance_of_conditional_means != res.mc_variance:
            id_fail += 1
        if state.is_uninformed:
            uninformed += 1
            eq_fail += res.expected_conditional_variance != res.mc_variance
    return SweepResult(count, violations, uninformed, eq_fail, id_fail)
