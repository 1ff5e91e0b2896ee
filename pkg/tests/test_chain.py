import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from rsqtsm import (
    ChainPath,
    NegativeEntry,
    PathBudgetExceeded,
    RowSumViolation,
    TimeOutOfRange,
    TransitionSchedule,
    enumerate_paths,
    make_path,
    simulate_chain,
    step_distribution,
    validate_schedule,
)
from rsqtsm.chain import simulate_regimes
from rsqtsm.random import make_stream

from conftest import Q2, random_schedule


class TestValidateSchedule:
    def test_single_regime(self):
        s = TransitionSchedule.constant([[1.0]])
        assert validate_schedule(s) is s
        assert s.num_regimes == 1

    def test_two_regime_constant(self):
        s = TransitionSchedule.constant(Q2)
        assert s.num_regimes == 2
        assert s.homogeneous

    def test_row_sum_violation_names_row_and_sum(self):
        with pytest.raises(RowSumViolation) as info:
            TransitionSchedule.constant([[0.9, 0.2], [0.2, 0.8]])
        assert info.value.i == 0
        assert info.value.total == pytest.approx(1.1)

    def test_negative_entry(self):
        with pytest.raises(NegativeEntry) as info:
            TransitionSchedule.from_list([Q2, [[1.1, -0.1], [0.5, 0.5]]])
        assert (info.value.i, info.value.j, info.value.k) == (0, 1, 1)

    def test_tolerance_is_1e12(self):
        TransitionSchedule.constant([[0.5 + 5e-13, 0.5], [0.5, 0.5]])
        with pytest.raises(RowSumViolation):
            TransitionSchedule.constant([[0.5 + 5e-12, 0.5], [0.5, 0.5]])

    def test_non_square(self):
        with pytest.raises(ValueError):
            validate_schedule(TransitionSchedule(np.ones((1, 2, 3)) / 3))

    def test_time_out_of_range(self):
        s = TransitionSchedule.from_list([Q2, Q2])
        s.matrix(1)
        with pytest.raises(TimeOutOfRange):
            s.matrix(2)
        assert s.covers(3) and not s.covers(4)


class TestStepDistribution:
    def test_row_extraction(self, q2):
        assert_allclose(step_distribution(q2, 0, [1.0, 0.0]), [0.9, 0.1], rtol=0, atol=1e-15)

    def test_mixture(self, q2):
        assert_allclose(step_distribution(q2, 3, [0.5, 0.5]), [0.55, 0.45], rtol=0, atol=1e-15)

    def test_doubly_stochastic_keeps_uniform(self):
        s = TransitionSchedule.constant([[0.2, 0.5, 0.3], [0.5, 0.3, 0.2], [0.3, 0.2, 0.5]])
        assert_allclose(step_distribution(s, 0, np.full(3, 1 / 3)), np.full(3, 1 / 3), atol=1e-15)

    def test_out_of_range(self):
        s = TransitionSchedule.from_list([Q2])
        with pytest.raises(TimeOutOfRange):
            step_distribution(s, 1, [1.0, 0.0])

    def test_rejects_unnormalized(self, q2):
        with pytest.raises(ValueError):
            step_distribution(q2, 0, [0.6, 0.6])


class TestSimulateChain:
    def test_single_regime(self):
        p = simulate_chain(TransitionSchedule.constant([[1.0]]), 0, 0, 12, rng_seed=3)
        assert p.states == (0,) * 12
        assert p.probability == 1.0

    def test_identity_is_absorbing(self):
        p = simulate_chain(TransitionSchedule.constant(np.eye(2)), 2, 1, 9, rng_seed=3)
        assert p.states == (1,) * 7
        assert p.start_time == 2 and p.horizon == 9
        assert p.probability == 1.0

    def test_probability_filled_from_schedule(self, q2):
        p = simulate_chain(q2, 0, 0, 10, rng_seed=11)
        expected = math.prod(Q2[a][b] for a, b in zip(p.states, p.states[1:]))
        assert p.probability == pytest.approx(expected, rel=1e-14)

    def test_seed_determinism(self, q2):
        a = simulate_chain(q2, 0, 0, 50, rng_seed=5)
        b = simulate_chain(q2, 0, 0, 50, rng_seed=5)
        assert a == b
        assert simulate_chain(q2, 0, 0, 50, rng_seed=6) != a

    def test_one_step_frequency(self, q2):
        m = 10**5
        reg = simulate_regimes(q2, 0, np.zeros(m, dtype=int), 2, make_stream(0))
        freq = np.mean(reg[:, 1] == 1)
        assert abs(freq - 0.1) <= 3 * math.sqrt(0.09 / m)

    def test_bad_times(self, q2):
        with pytest.raises(TimeOutOfRange):
            simulate_chain(q2, 5, 0, 5)
        with pytest.raises(TimeOutOfRange):
            simulate_chain(TransitionSchedule.from_list([Q2]), 0, 0, 4)


class TestEnumeratePaths:
    def test_two_regime_probabilities(self, q2):
        paths = list(enumerate_paths(q2, 0, 0, 3))
        assert [p.states for p in paths] == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)]
        assert_allclose([p.probability for p in paths], [0.81, 0.09, 0.02, 0.08], rtol=1e-14)
        assert sum(p.probability for p in paths) == pytest.approx(1.0, abs=1e-15)

    def test_single_regime_any_horizon(self):
        paths = list(enumerate_paths(TransitionSchedule.constant([[1.0]]), 0, 0, 30))
        assert len(paths) == 1
        assert paths[0].probability == 1.0

    def test_budget(self):
        s = TransitionSchedule.constant(np.full((3, 3), 1 / 3))
        with pytest.raises(PathBudgetExceeded):
            enumerate_paths(s, 0, 0, 16, max_paths=10**6)

    def test_lazy(self):
        s = TransitionSchedule.constant(np.full((3, 3), 1 / 3))
        it = enumerate_paths(s, 0, 0, 14)
        first = next(it)
        assert first.states == (0,) * 14

    def test_time_dependent_matrices_used_per_step(self):
        s = TransitionSchedule.from_list([Q2, [[0.5, 0.5], [0.0, 1.0]]])
        probs = {p.states: p.probability for p in enumerate_paths(s, 0, 1, 3)}
        assert probs[(1, 0, 0)] == pytest.approx(0.2 * 0.5)
        assert probs[(1, 1, 0)] == 0.0
        assert probs[(1, 1, 1)] == pytest.approx(0.8)

    def test_matches_make_path(self, q2):
        for p in enumerate_paths(q2, 1, 1, 5):
            assert make_path(q2, 1, p.states).probability == pytest.approx(p.probability, rel=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(1, 3),
        k0=st.integers(0, 3),
        span=st.integers(1, 7),
        seed=st.integers(0, 2**32 - 1),
        data=st.data(),
    )
    def test_probabilities_sum_to_one(self, n, k0, span, seed, data):
        s = random_schedule(np.random.default_rng(seed), n, k0 + span)
        i0 = data.draw(st.integers(0, n - 1))
        paths = list(enumerate_paths(s, k0, i0, k0 + span))
        assert len(paths) == n ** (span - 1)
        assert all(p.states[0] == i0 for p in paths)
        tails = [p.states[1:] for p in paths]
        assert tails == sorted(tails)
        assert abs(sum(p.probability for p in paths) - 1.0) <= 1e-10


def test_martingale_increment_has_zero_mean():
    s = TransitionSchedule.from_list([[[0.7, 0.2, 0.1], [0.3, 0.3, 0.4], [0.05, 0.15, 0.8]]] * 3)
    m = 10**5
    gen = make_stream(2024)
    for k, i in itertools.product(range(3), range(3)):
        reg = simulate_regimes(s, k, np.full(m, i), k + 2, gen)
        indicators = np.eye(3)[reg[:, 1]]
        increment = indicators - s.matrix(k)[i]
        assert np.all(np.abs(increment.mean(axis=0)) <= 4 * math.sqrt(0.25 / m))


def test_chain_path_requires_states():
    with pytest.raises(ValueError):
        ChainPath(0, (), 1.0)
