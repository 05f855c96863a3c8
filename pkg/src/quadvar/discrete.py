"""Finite "deck" model of MC and quadrature sampling.

A discrete integrand on ``K`` positions is a deck of cards: its *spectrum*
``{value: multiplicity}`` says which values occur and how often, its
*arrangement* says where. MC draws ``N`` positions uniformly without
replacement, so the counts ``(N_1, ..., N_C)`` of each value are multivariate
hypergeometric. A quadrature reads a fixed grid of positions; what it sees
depends on how much is known about the arrangement. Prior knowledge is an
explicit set of admissible arrangements, each equally likely.

Averaging the quadrature count distribution over every size-``N`` grid (with
weight ``1/C(K, N)``) is the same as shuffling the deck, and reproduces the
hypergeometric law for any admissible set. The law of total variance then
splits the MC variance into the expected conditional quadrature variance plus
the spread of the conditional means.

All routines take ``exact=True`` to return :class:`fractions.Fraction`
results computed from integer counts, or ``exact=False`` for floats. Grid
positions are 0-based.

The spectrum itself is always fully known. Uncertainty about the
multiplicities would mean mixing several ``KnowledgeState`` objects with
different spectra; that is not implemented.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Mapping, Sequence, Union

import numpy as np

Number = Union[int, float, Fraction]


def as_spectrum(deck) -> dict:
    """``{value: multiplicity}`` sorted by value, from a mapping or a list of deck values."""
    if isinstance(deck, Mapping):
        items = {v: int(k) for v, k in deck.items() if k}
        if any(k < 0 for k in items.values()):
            raise ValueError("multiplicities must be non-negative")
    else:
        items = {}
        for v in deck:
            items[v] = items.get(v, 0) + 1
    if not items:
        raise ValueError("empty deck")
    return dict(sorted(items.items()))


def distinct_permutations(counts: Sequence[int]):
    """Yield every distinct arrangement of a multiset given as per-symbol counts.

    Symbols are the indices ``0..len(counts)-1``; output is in lexicographic order.
    """
    counts = list(counts)
    total = sum(counts)
    out = [0] * total

    def rec(pos):
        if pos == total:
            yield tuple(out)
            return
        for c, k in enumerate(counts):
            if k:
                counts[c] -= 1
                out[pos] = c
                yield from rec(pos + 1)
                counts[c] += 1

    yield from rec(0)


@dataclass(frozen=True)
class DiscreteFunction:
    arrangement: tuple

    def __post_init__(self):
        object.__setattr__(self, "arrangement", tuple(self.arrangement))
        if not self.arrangement:
            raise ValueError("empty arrangement")

    @property
    def spectrum(self) -> dict:
        return as_spectrum(self.arrangement)

    @property
    def K(self) -> int:
        return len(self.arrangement)

    @property
    def C(self) -> int:
        return len(self.spectrum)


@dataclass(frozen=True, eq=False)
class KnowledgeState:
    """Known spectrum, admissible arrangements, and a sampling grid.

    ``admissible`` holds arrangements as rows of indices into ``values``.
    Build instances with :meth:`unknown`, :meth:`known`, :meth:`pinned` or
    :meth:`from_arrangements` rather than directly.
    """

    values: tuple
    multiplicities: tuple
    admissible: np.ndarray
    grid: tuple = ()

    def __post_init__(self):
        adm = np.asarray(self.admissible, dtype=np.int8)
        if adm.ndim != 2 or len(adm) == 0:
            raise ValueError("admissible set is empty")
        K = sum(self.multiplicities)
        if adm.shape[1] != K:
            raise ValueError(f"arrangements have length {adm.shape[1]}, spectrum has K={K}")
        for c, k in enumerate(self.multiplicities):
            if np.any((adm == c).sum(axis=1) != k):
                raise ValueError("an admissible arrangement does not realise the spectrum")
        grid = tuple(int(g) for g in self.grid)
        if len(set(grid)) != len(grid) or any(not 0 <= g < K for g in grid):
            raise ValueError(f"grid positions must be distinct and in [0, {K}), got {grid}")
        adm.setflags(write=False)
        object.__setattr__(self, "admissible", adm)
        object.__setattr__(self, "grid", grid)

    @property
    def K(self) -> int:
        return sum(self.multiplicities)

    @property
    def spectrum(self) -> dict:
        return dict(zip(self.values, self.multiplicities))

    def with_grid(self, grid) -> "KnowledgeState":
        return KnowledgeState(self.values, self.multiplicities, self.admissible, tuple(grid))

    @property
    def is_uninformed(self) -> bool:
        """True when every distinct arrangement of the spectrum is admissible."""
        total = math.factorial(self.K)
        for k in self.multiplicities:
            total //= math.factorial(k)
        return len(self.admissible) == total

    def arrangements(self) -> list:
        return [tuple(self.values[i] for i in row) for row in self.admissible]

    @classmethod
    def unknown(cls, deck, grid=()) -> "KnowledgeState":
        """Empty prior: every distinct permutation of the spectrum is admissible."""
        spec = as_spectrum(deck)
        mult = tuple(spec.values())
        adm = np.array(list(distinct_permutations(mult)), dtype=np.int8)
        return cls(tuple(spec), mult, adm, tuple(grid))

    @classmethod
    def known(cls, arrangement, grid=()) -> "KnowledgeState":
        return cls.from_arrangements([arrangement], grid)

    @classmethod
    def pinned(cls, deck, pins: Mapping[int, Number], grid=()) -> "KnowledgeState":
        """Positions in ``pins`` hold the given values; the rest are unknown."""
        spec = as_spectrum(deck)
        values = tuple(spec)
        K = sum(spec.values())
        remaining = dict(spec)
        for pos, v in pins.items():
            if not 0 <= pos < K:
                raise ValueError(f"pinned position {pos} outside [0, {K})")
            if remaining.get(v, 0) == 0:
                raise ValueError(f"pins use value {v!r} more often than the spectrum allows")
            remaining[v] -= 1
        if not pins:
            return cls.unknown(spec, grid)
        free = [p for p in range(K) if p not in pins]
        index = {v: i for i, v in enumerate(values)}
        rows = []
        for perm in distinct_permutations([remaining[v] for v in values]):
            row = [0] * K
            for p, v in pins.items():
                row[p] = index[v]
            for p, c in zip(free, perm):
                row[p] = c
            rows.append(row)
        return cls(values, tuple(spec.values()), np.array(rows, dtype=np.int8), tuple(grid))

    @classmethod
    def from_arrangements(cls, arrangements, grid=()) -> "KnowledgeState":
        arrangements = [tuple(a) for a in arrangements]
        if not arrangements:
            raise ValueError("admissible set is empty")
        spec = as_spectrum(arrangements[0])
        values = tuple(spec)
        index = {v: i for i, v in enumerate(values)}
        unique = sorted(set(arrangements), key=lambda a: [index.get(v, -1) for v in a])
        try:
            rows = [[index[v] for v in a] for a in unique]
        except KeyError as exc:
            raise ValueError(f"arrangement uses value {exc.args[0]!r} outside the spectrum") from None
        return cls(values, tuple(spec.values()), np.array(rows, dtype=np.int8), tuple(grid))


@dataclass(frozen=True)
class DrawDistribution:
    """Probability of each count vector ``(N_1, ..., N_C)`` aligned with ``values``."""

    values: tuple
    probs: dict

    def __getitem__(self, counts) -> Number:
        if isinstance(counts, Mapping):
            counts = tuple(int(counts.get(v, 0)) for v in self.values)
        return self.probs.get(tuple(counts), 0)

    def total(self) -> Number:
        return sum(self.probs.values())

    def max_abs_diff(self, other: "DrawDistribution") -> Number:
        if self.values != other.values:
            raise ValueError("distributions are over different value sets")
        keys = set(self.probs) | set(other.probs)
        return max(abs(self[k] - other[k]) for k in keys)

    def is_point_mass(self) -> bool:
        return sum(1 for p in self.probs.values() if p) == 1


def _check_N(N: int, K: int) -> None:
    if not 0 <= N <= K:
        raise ValueError(f"need 0 <= N <= K={K}, got N={N}")


def hypergeometric_pmf(deck, counts, N: int, exact: bool = True) -> Number:
    """``prod_c C(K_c, N_c) / C(K, N)``; infeasible counts have probability 0."""
    spec = as_spectrum(deck)
    K = sum(spec.values())
    _check_N(N, K)
    if isinstance(counts, Mapping):
        unknown = set(counts) - set(spec)
        if any(counts[v] for v in unknown):
            return Fraction(0) if exact else 0.0
        counts = [int(counts.get(v, 0)) for v in spec]
    counts = list(counts)
    if len(counts) != len(spec):
        raise ValueError("counts must align with the spectrum")
    if sum(counts) != N:
        raise ValueError(f"counts sum to {sum(counts)}, expected N={N}")
    if any(n < 0 for n in counts):
        raise ValueError("counts must be non-negative")
    num = math.prod(math.comb(k, n) for k, n in zip(spec.values(), counts))
    p = Fraction(num, math.comb(K, N))
    return p if exact else float(p)


def hypergeometric_distribution(deck, N: int, exact: bool = True) -> DrawDistribution:
    spec = as_spectrum(deck)
    _check_N(N, sum(spec.values()))
    probs = {}
    for counts in product(*(range(min(k, N) + 1) for k in spec.values())):
        if sum(counts) == N:
            probs[counts] = hypergeometric_pmf(spec, counts, N, exact)
    return DrawDistribution(tuple(spec), probs)


def hypergeometric_mean_variance(deck, N: int, exact: bool = True):
    """Mean and variance of the average of ``N`` cards drawn without replacement."""
    spec = as_spectrum(deck)
    K = sum(spec.values())
    if not 1 <= N <= K:
        raise ValueError(f"need 1 <= N <= K={K}, got N={N}")
    conv = Fraction if exact else float
    mean = sum(conv(v) * k for v, k in spec.items()) / K
    second = sum(conv(v) ** 2 * k for v, k in spec.items()) / K
    if K == 1:
        return mean, conv(0)
    fpc = conv(K - N) / (N * (K - 1))
    return mean, fpc * (second - mean * mean)


def _all_grids(K: int, N: int) -> np.ndarray:
    grids = list(combinations(range(K), N))
    return np.array(grids, dtype=np.intp).reshape(len(grids), N)


def _count_keys(state: KnowledgeState, grids: np.ndarray) -> tuple[np.ndarray, int]:
    """Encoded count vector for each (arrangement, grid) pair, shape ``(a, G)``."""
    N = grids.shape[1]
    seen = state.admissible[:, grids]  # (a, G, N)
    keys = np.zeros(seen.shape[:2], dtype=np.int64)
    base = N + 1
    for c in range(len(state.values)):
        keys += (seen == c).sum(axis=-1, dtype=np.int64) * base ** c
    return keys, base


def _distribution_from_keys(values: tuple, keys: np.ndarray, base: int, exact: bool) -> DrawDistribution:
    uniq, freq = np.unique(keys, return_counts=True)
    total = int(keys.size)
    probs = {}
    for key, n in zip(uniq.tolist(), freq.tolist()):
        counts = []
        for _ in values:
            key, r = divmod(key, base)
            counts.append(r)
        probs[tuple(counts)] = Fraction(n, total) if exact else n / total
    return DrawDistribution(values, probs)


def quadrature_conditional_distribution(state: KnowledgeState, exact: bool = True) -> DrawDistribution:
    """Counts seen on ``state.grid`` when the arrangement is uniform over the admissible set."""
    _check_N(len(state.grid), state.K)
    grids = np.array(state.grid, dtype=np.intp).reshape(1, len(state.grid))
    keys, base = _count_keys(state, grids)
    return _distribution_from_keys(state.values, keys, base, exact)


def shuffle_marginalize(state: KnowledgeState, N: int | None = None, exact: bool = True) -> DrawDistribution:
    """Average the conditional count law over every size-``N`` grid with weight ``1/C(K, N)``.

    ``N`` defaults to the size of ``state.grid``.
    """
    N = len(state.grid) if N is None else N
    _check_N(N, state.K)
    keys, base = _count_keys(state, _all_grids(state.K, N))
    return _distribution_from_keys(state.values, keys, base, exact)


@dataclass(frozen=True)
class TotalVarianceCheck:
    expected_conditional_variance: Number
    variance_of_conditional_means: Number
    mc_variance: Number
    inequality_holds: bool


def _integer_values(values: tuple, N: int, n_terms: int) -> tuple[np.ndarray, int]:
    """Scale values to integers by their common denominator ``L``.

    Falls back to Python-int object arrays when a sum of ``n_terms`` squared
    grid sums could overflow int64.
    """
    fr = [Fraction(v) for v in values]
    L = math.lcm(*(f.denominator for f in fr))
    ints = [int(f * L) for f in fr]
    if (N * max(abs(z) for z in ints)) ** 2 * n_terms < 2 ** 62:
        return np.array(ints, dtype=np.int64), L
    return np.array(ints, dtype=object), L


def total_variance_check(state: KnowledgeState, N: int, exact: bool = True, tol: float = 1e-12) -> TotalVarianceCheck:
    """Compare ``E_g[Var(draw average | g, I)]`` with the MC (hypergeometric) variance.

    Grids are all size-``N`` subsets of positions, each with weight ``1/G``.
    """
    K = state.K
    if not 1 <= N <= K:
        raise ValueError(f"need 1 <= N <= K={K}, got N={N}")
    grids = _all_grids(K, N)
    a, G = len(state.admissible), len(grids)
    _, mc_var = hypergeometric_mean_variance(state.spectrum, N, exact)

    if exact:
        z, L = _integer_values(state.values, N, a)
        sums = z[state.admissible][:, grids].sum(axis=-1)  # (a, G) integer grid sums
        s1 = [int(x) for x in sums.sum(axis=0)]
        s2 = [int(x) for x in (sums * sums).sum(axis=0)]
        scale = (a * N * L) ** 2
        cond_var = [Fraction(a * q - p * p, scale) for p, q in zip(s1, s2)]
        cond_mean = [Fraction(p, a * N * L) for p in s1]
        e_var = sum(cond_var, Fraction(0)) / G
        m1 = sum(cond_mean, Fraction(0)) / G
        var_means = sum((m * m for m in cond_mean), Fraction(0)) / G - m1 * m1
        holds = e_var <= mc_var
    else:
        z = np.array([float(v) for v in state.values])
        avg = z[state.admissible][:, grids].mean(axis=-1)
        cond_means = avg.mean(axis=0)
        e_var = float(np.mean(avg.var(axis=0)))
        var_means = float(cond_means.var())
        holds = e_var <= mc_var + tol
    return TotalVarianceCheck(e_var, var_means, mc_var, bool(holds))
