from collections import Counter
from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings, strategies as st

from quadvar.discrete import (
    DiscreteFunction,
    KnowledgeState,
    distinct_permutations,
    hypergeometric_distribution,
    hypergeometric_mean_variance,
    hypergeometric_pmf,
    quadrature_conditional_distribution,
    shuffle_marginalize,
    total_variance_check,
)

DECK = (1, 2, 3, 2)


# --- brute-force oracles, independent of the numpy implementation ---------------


def oracle_draw_averages(deck, N):
    """Average of every unordered size-N draw of positions."""
    return [Fraction(sum(deck[i] for i in pos), N) for pos in combinations(range(len(deck)), N)]


def oracle_moments(xs):
    xs = list(xs)
    m = sum(xs, Fraction(0)) / len(xs)
    return m, sum(((x - m) ** 2 for x in xs), Fraction(0)) / len(xs)


def oracle_admissible(deck, pins):
    return sorted({a for a in permutations(deck) if all(a[p] == v for p, v in pins.items())})


def oracle_count_law(arrangements, grids, values):
    tally = Counter()
    for a in arrangements:
        for g in grids:
            c = Counter(a[i] for i in g)
            tally[tuple(c[v] for v in values)] += 1
    total = sum(tally.values())
    return {k: Fraction(n, total) for k, n in tally.items()}


def oracle_total_variance(deck, pins, N):
    adm = oracle_admissible(deck, pins)
    grids = list(combinations(range(len(deck)), N))
    cond_vars, cond_means = [], []
    for g in grids:
        m, v = oracle_moments(Fraction(sum(a[i] for i in g), N) for a in adm)
        cond_vars.append(v)
        cond_means.append(m)
    return sum(cond_vars, Fraction(0)) / len(grids), oracle_moments(cond_means)[1]


# --- types ------------------------------------------------------------------------


def test_discrete_function_spectrum():
    f = DiscreteFunction(DECK)
    assert f.spectrum == {1: 1, 2: 2, 3: 1}
    assert (f.K, f.C) == (4, 3)


def test_distinct_permutations_matches_itertools():
    deck = (0, 0, 1, 2, 2)
    ours = list(distinct_permutations([2, 1, 2]))
    assert ours == sorted(set(permutations(deck)))


def test_knowledge_state_constructors():
    assert len(KnowledgeState.unknown(DECK).admissible) == 12
    assert KnowledgeState.unknown(DECK).is_uninformed
    pinned = KnowledgeState.pinned(DECK, {0: 3})
    assert pinned.arrangements() == oracle_admissible(DECK, {0: 3})
    assert len(pinned.admissible) == 3 and not pinned.is_uninformed
    assert KnowledgeState.known(DECK).arrangements() == [DECK]


def test_knowledge_state_rejects_bad_input():
    with pytest.raises(ValueError, match="more often"):
        KnowledgeState.pinned(DECK, {0: 3, 1: 3})
    with pytest.raises(ValueError, match="distinct"):
        KnowledgeState.known(DECK, grid=(1, 1))
    with pytest.raises(ValueError, match="empty"):
        KnowledgeState.from_arrangements([])
    with pytest.raises(ValueError, match="spectrum"):
        KnowledgeState.from_arrangements([(1, 2), (1, 1)])


# --- hypergeometric -----------------------------------------------------------------


def test_pmf_small_deck_single_draw():
    assert hypergeometric_pmf(DECK, {2: 1}, 1) == Fraction(1, 2)
    assert hypergeometric_pmf(DECK, {1: 1}, 1) == Fraction(1, 4)


def test_pmf_full_deck_and_pairs():
    assert hypergeometric_pmf(DECK, {1: 1, 2: 2, 3: 1}, 4) == 1
    # oracle: 1 of the C(4,2)=6 position pairs holds {1, 3}
    pairs = [sorted(DECK[i] for i in g) for g in combinations(range(4), 2)]
    assert pairs.count([1, 3]) == 1
    assert hypergeometric_pmf(DECK, {1: 1, 3: 1}, 2) == Fraction(1, 6)


def test_pmf_infeasible_and_errors():
    assert hypergeometric_pmf(DECK, {1: 2}, 2) == 0
    assert hypergeometric_pmf(DECK, {9: 1}, 1) == 0
    assert hypergeometric_pmf(DECK, {1: 1}, 1, exact=False) == 0.25
    with pytest.raises(ValueError):
        hypergeometric_pmf(DECK, {2: 5}, 5)
    with pytest.raises(ValueError, match="sum"):
        hypergeometric_pmf(DECK, {2: 1}, 2)


def test_mean_variance_small_deck():
    assert oracle_moments(oracle_draw_averages(DECK, 2)) == (2, Fraction(1, 6))
    assert hypergeometric_mean_variance(DECK, 2) == (2, Fraction(1, 6))
    assert hypergeometric_mean_variance(DECK, 1) == (2, Fraction(1, 2))
    assert hypergeometric_mean_variance(DECK, 4)[1] == 0
    assert hypergeometric_mean_variance([5], 1) == (5, 0)
    m, v = hypergeometric_mean_variance(DECK, 2, exact=False)
    assert isinstance(v, float) and v == pytest.approx(1 / 6)


decks = st.lists(st.integers(-3, 5), min_size=1, max_size=7)


@given(decks, st.data())
@settings(max_examples=150, deadline=None)
def test_mean_variance_matches_enumeration(deck, data):
    N = data.draw(st.integers(1, len(deck)))
    assert hypergeometric_mean_variance(deck, N) == oracle_moments(oracle_draw_averages(deck, N))


@given(decks, st.data())
@settings(max_examples=100, deadline=None)
def test_distribution_normalised(deck, data):
    N = data.draw(st.integers(0, len(deck)))
    d = hypergeometric_distribution(deck, N)
    assert d.total() == 1
    spec = Counter(deck)
    for counts in d.probs:
        assert sum(counts) == N
        assert all(n <= spec[v] for v, n in zip(d.values, counts))


def test_finite_population_limit():
    # proportions 1/4, 1/2, 1/4 of values 1, 2, 3: sigma_f^2 = 1/2
    N = 5
    prev = None
    for scale in (2, 4, 16, 64, 256, 1024):
        _, v = hypergeometric_mean_variance({1: scale, 2: 2 * scale, 3: scale}, N)
        factor = v / (Fraction(1, 2) / N)
        assert factor == Fraction(4 * scale - N, 4 * scale - 1)
        if prev is not None:
            assert factor > prev
        prev = factor
    assert 1 - prev < Fraction(1, 1000)


# --- quadrature conditional law and shuffling ------------------------------------------


def test_conditional_known_arrangement_is_point_mass():
    d = quadrature_conditional_distribution(KnowledgeState.known(DECK, grid=(0, 2)))
    assert d.is_point_mass()
    assert d[{1: 1, 3: 1}] == 1


def test_conditional_uninformed_single_position():
    for pos in range(4):
        d = quadrature_conditional_distribution(KnowledgeState.unknown(DECK, grid=(pos,)))
        assert d[{1: 1}] == Fraction(1, 4)
        assert d[{2: 1}] == Fraction(1, 2)
        assert d[{3: 1}] == Fraction(1, 4)


def test_conditional_pinned_matches_enumeration():
    state = KnowledgeState.pinned(DECK, {0: 3}, grid=(0, 1))
    expected = oracle_count_law(oracle_admissible(DECK, {0: 3}), [(0, 1)], state.values)
    assert quadrature_conditional_distribution(state).probs == expected
    assert expected == {(0, 1, 1): Fraction(2, 3), (1, 0, 1): Fraction(1, 3)}


def test_shuffle_small_deck():
    for N in range(5):
        hyp = hypergeometric_distribution(DECK, N)
        assert shuffle_marginalize(KnowledgeState.unknown(DECK), N).probs == hyp.probs
        assert shuffle_marginalize(KnowledgeState.known(DECK), N).probs == hyp.probs


def test_shuffle_degenerate_deck():
    for pins in ({}, {0: 5}, {0: 5, 2: 5}):
        d = shuffle_marginalize(KnowledgeState.pinned([5, 5, 5], pins), 2)
        assert d.is_point_mass() and d[{5: 2}] == 1


def test_shuffle_float_mode():
    d = shuffle_marginalize(KnowledgeState.pinned(DECK, {1: 1}), 2, exact=False)
    hyp = hypergeometric_distribution(DECK, 2, exact=False)
    assert d.max_abs_diff(hyp) < 1e-12


@st.composite
def pinned_states(draw, max_k=6):
    deck = draw(st.lists(st.integers(0, 3), min_size=1, max_size=max_k))
    arrangement = draw(st.permutations(deck))
    positions = draw(st.sets(st.integers(0, len(deck) - 1)))
    pins = {p: arrangement[p] for p in positions}
    N = draw(st.integers(0, len(deck)))
    return deck, pins, N


@given(pinned_states())
@settings(max_examples=150, deadline=None)
def test_shuffle_marginal_is_hypergeometric(case):
    deck, pins, N = case
    state = KnowledgeState.pinned(deck, pins)
    got = shuffle_marginalize(state, N)
    assert got.total() == 1
    assert got.probs == hypergeometric_distribution(deck, N).probs
    grids = list(combinations(range(len(deck)), N))
    assert got.probs == oracle_count_law(oracle_admissible(deck, pins), grids, state.values)


# --- total variance -----------------------------------------------------------------------


def test_total_variance_known_arrangement():
    res = total_variance_check(KnowledgeState.known(DECK), 2)
    assert res.expected_conditional_variance == 0
    assert res.mc_variance == Fraction(1, 6)
    assert res.inequality_holds


def test_total_variance_uninformed_equality():
    res = total_variance_check(KnowledgeState.unknown(DECK), 2)
    assert res.expected_conditional_variance == res.mc_variance == Fraction(1, 6)
    assert res.variance_of_conditional_means == 0


def test_total_variance_pinned_strict_gap():
    res = total_variance_check(KnowledgeState.pinned(DECK, {0: 3}), 2)
    assert (res.expected_conditional_variance, res.variance_of_conditional_means) == \
        oracle_total_variance(DECK, {0: 3}, 2)
    assert res.expected_conditional_variance == Fraction(1, 18)
    assert res.expected_conditional_variance < res.mc_variance


@given(pinned_states(max_k=6))
@settings(max_examples=120, deadline=None)
def test_law_of_total_variance_exact(case):
    deck, pins, N = case
    if N == 0:
        return
    res = total_variance_check(KnowledgeState.pinned(deck, pins), N)
    assert (res.expected_conditional_variance, res.variance_of_conditional_means) == \
        oracle_total_variance(deck, pins, N)
    assert res.expected_conditional_variance + res.variance_of_conditional_means == res.mc_variance
    assert res.inequality_holds


def test_total_variance_fractional_and_float_values():
    deck = [Fraction(1, 3), Fraction(1, 2), 2, 2]
    res = total_variance_check(KnowledgeState.pinned(deck, {1: 2}), 2)
    assert res.expected_conditional_variance + res.variance_of_conditional_means == res.mc_variance
    flt = total_variance_check(KnowledgeState.pinned([0.1, 0.7, 2.5, 2.5], {1: 2.5}), 2, exact=False)
    assert flt.inequality_holds
    assert flt.expected_conditional_variance + flt.variance_of_conditional_means == pytest.approx(flt.mc_variance, abs=1e-12)


def test_total_variance_large_values_stay_exact():
    deck = [10 ** 12, 1, 3 * 10 ** 12 + 7, 5]
    res = total_variance_check(KnowledgeState.pinned(deck, {0: 5}), 2)
    assert (res.expected_conditional_variance, res.variance_of_conditional_means) == \
        oracle_total_variance(deck, {0: 5}, 2)
