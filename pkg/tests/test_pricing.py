import itertools
import math

import numpy as np
import pytest

from rsqtsm import (
    ChainPath,
    DivergentExpectation,
    PathBudgetExceeded,
    RegimeParams,
    TransitionSchedule,
    bond_price,
    bond_price_chain_mc,
    coefficient_schedule,
    conditional_price,
    enumerate_paths,
    hermite_rule,
    make_path,
    yield_curve,
)
from rsqtsm.recursion import CoeffSchedule, CoeffTriple

from conftest import Q2, random_params, random_schedule


class TestConditionalPrice:
    def _sched(self, triple):
        return CoeffSchedule(0, (CoeffTriple(*triple), CoeffTriple(0, 0, 0)), ChainPath(0, (0,), 1.0))

    def test_maturity_triple(self):
        assert conditional_price(self._sched((0, 0, 0)), 3.7) == 1.0

    def test_substitution(self):
        assert conditional_price(self._sched((0.1, -0.2, 0.05)), 1.0) == pytest.approx(0.9512294245, abs=1e-10)

    def test_vectorized_in_s(self):
        s = np.linspace(-1, 1, 5)
        out = conditional_price(self._sched((0.1, -0.2, 0.05)), s)
        assert out.shape == (5,) and np.all(out > 0)


class TestBondPrice:
    def test_last_period(self, q2, two_regime_params):
        p = two_regime_params
        s = 0.8
        res = bond_price(q2, p, 4, 5, s, 1)
        assert res.price == pytest.approx(math.exp(-(p.a0[1] + p.a1[1] * s + p.a2[1] * s * s)), rel=1e-15)
        assert res.num_paths_used == 1

    def test_at_maturity(self, q2, two_regime_params):
        res = bond_price(q2, two_regime_params, 5, 5, 0.3, 0)
        assert res.price == 1.0 and res.mode == "exact_enumeration"

    def test_single_regime_equals_conditional(self):
        p = RegimeParams.single(0.1, 0.95, 0.2, 0.02, 0.01, 0.001)
        res = bond_price(TransitionSchedule.constant([[1.0]]), p, 0, 7, 0.5, 0)
        expected = conditional_price(coefficient_schedule(p, ChainPath(0, (0,) * 7, 1.0)), 0.5)
        assert res.price == pytest.approx(expected, rel=1e-15)

    def test_matches_hand_composed_sum(self, q2, two_regime_params):
        k, T, s = 1, 4, 0.35
        total = 0.0
        for tail in itertools.product(range(2), repeat=2):
            states = (0,) + tail
            prob = Q2[states[0]][states[1]] * Q2[states[1]][states[2]]
            total += prob * conditional_price(coefficient_schedule(two_regime_params, ChainPath(k, states, prob)), s)
        assert bond_price(q2, two_regime_params, k, T, s, 0).price == pytest.approx(total, abs=1e-14)

    def test_matches_enumerate_paths(self):
        rng = np.random.default_rng(3)
        sched = random_schedule(rng, 3, 8)
        p = random_params(rng, 3)
        paths = list(enumerate_paths(sched, 2, 1, 8))
        ref = sum(pp.probability * conditional_price(coefficient_schedule(p, pp), -0.4) for pp in paths)
        res = bond_price(sched, p, 2, 8, -0.4, 1)
        assert res.price == pytest.approx(ref, rel=1e-13)
        assert res.num_paths_used == len(paths) == 3**5

    def test_block_layout_does_not_change_value(self, two_regime_params):
        sched = random_schedule(np.random.default_rng(1), 2, 12)
        ref = bond_price(sched, two_regime_params, 0, 12, 0.2, 0)
        small = bond_price(sched, two_regime_params, 0, 12, 0.2, 0, block_size=8)
        assert small.price == pytest.approx(ref.price, rel=1e-14)

    def test_threads_bit_identical(self, two_regime_params):
        sched = random_schedule(np.random.default_rng(2), 2, 14)
        one = bond_price(sched, two_regime_params, 0, 14, 0.2, 1, block_size=64)
        four = bond_price(sched, two_regime_params, 0, 14, 0.2, 1, block_size=64, threads=4)
        assert one.price == four.price

    def test_budget(self, two_regime_params, q2):
        with pytest.raises(PathBudgetExceeded):
            bond_price(q2, two_regime_params, 0, 12, 0.0, 0, max_paths=1000)

    def test_budget_fallback(self, two_regime_params, q2):
        res = bond_price(q2, two_regime_params, 0, 12, 0.0, 0, max_paths=1000, fallback_mc=True, num_paths=5000, rng_seed=1)
        assert res.mode == "chain_monte_carlo" and res.standard_error > 0

    def test_divergence_names_path(self):
        p = RegimeParams.from_rows([(0, 1, 0.5, 0, 0, 0.01), (0, 1, 0.5, 0, 0, -10.0)])
        sched = TransitionSchedule.constant(Q2)
        with pytest.raises(DivergentExpectation) as info:
            bond_price(sched, p, 0, 4, 0.0, 0)
        exc = info.value
        # First failing suffix in lexicographic order: regime 0 at time 2 in front of regime 1 at time 3.
        assert exc.time == 2 and exc.path == (0, 1)

    def test_schedule_must_reach_maturity(self, two_regime_params):
        from rsqtsm import TimeOutOfRange

        sched = TransitionSchedule.from_list([Q2, Q2])
        bond_price(sched, two_regime_params, 0, 3, 0.0, 0)
        with pytest.raises(TimeOutOfRange):
            bond_price(sched, two_regime_params, 0, 4, 0.0, 0)

    def test_regime_collapse(self):
        rng = np.random.default_rng(8)
        row = (0.05, 0.9, 0.3, 0.02, 0.01, 0.01)
        p = RegimeParams.from_rows([row] * 3)
        ref = bond_price(TransitionSchedule.constant([[1.0]]), RegimeParams.from_rows([row]), 0, 6, 0.4, 0).price
        for _ in range(5):
            assert bond_price(random_schedule(rng, 3, 6), p, 0, 6, 0.4, 2).price == pytest.approx(ref, rel=1e-12)

    def test_positive(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            p = random_params(rng, 2)
            res = bond_price(random_schedule(rng, 2, 6), p, 0, 6, rng.uniform(-1, 1), 0)
            assert res.price > 0


def _tower_value(sched, params, k, m, T, s, i, nodes, weights):
    """E[exp(-sum_{t=k}^{m-1} r_t) * P(m, T)] by enumeration over regimes and Hermite nesting over shocks."""
    total = 0.0
    for path in enumerate_paths(sched, k, i, m + 1):
        states = path.states

        def inner(level, s_now):
            x = states[level]
            disc = math.exp(-(params.a0[x] + params.a1[x] * s_now + params.a2[x] * s_now**2))
            nxt = params.kappa[x] + params.mu[x] * s_now + params.sigma[x] * nodes
            if level == len(states) - 2:
                vals = [bond_price(sched, params, m, T, sn, states[-1]).price for sn in nxt]
            else:
                vals = [inner(level + 1, sn) for sn in nxt]
            return disc * float(weights @ np.array(vals))

        total += path.probability * inner(0, s)
    return total


@pytest.mark.parametrize("m", [1, 2])
def test_tower_property(two_regime_params, q2, m):
    nodes, weights = hermite_rule(64)
    k, T, s, i = 0, 3, 0.3, 1
    direct = bond_price(q2, two_regime_params, k, T, s, i).price
    assert _tower_value(q2, two_regime_params, k, m, T, s, i, nodes, weights) == pytest.approx(direct, abs=1e-6)


class TestChainMonteCarlo:
    def test_single_regime_is_exact(self):
        p = RegimeParams.single(0.1, 0.95, 0.2, 0.02, 0.01, 0.001)
        sched = TransitionSchedule.constant([[1.0]])
        res = bond_price_chain_mc(sched, p, 0, 6, 0.5, 0, 1000, rng_seed=3)
        assert res.standard_error == 0.0
        assert res.price == pytest.approx(bond_price(sched, p, 0, 6, 0.5, 0).price, rel=1e-15)

    def test_close_to_exact(self, q2, two_regime_params):
        exact = bond_price(q2, two_regime_params, 0, 6, 0.3, 0).price
        estimates = []
        for seed in (1, 2):
            res = bond_price_chain_mc(q2, two_regime_params, 0, 6, 0.3, 0, 10**5, rng_seed=seed)
            assert res.mode == "chain_monte_carlo"
            assert abs(res.price - exact) <= 4 * res.standard_error
            estimates.append(res.price)
        assert estimates[0] != estimates[1]

    def test_seed_determinism(self, q2, two_regime_params):
        a = bond_price_chain_mc(q2, two_regime_params, 0, 6, 0.3, 0, 5000, rng_seed=9)
        assert a == bond_price_chain_mc(q2, two_regime_params, 0, 6, 0.3, 0, 5000, rng_seed=9)

    def test_binomial_coverage(self, two_regime_params):
        sched = random_schedule(np.random.default_rng(12), 2, 5)
        exact = bond_price(sched, two_regime_params, 0, 5, 0.6, 1).price
        hits = 0
        for seed in range(100):
            res = bond_price_chain_mc(sched, two_regime_params, 0, 5, 0.6, 1, 20000, rng_seed=seed)
            hits += abs(res.price - exact) <= 4 * res.standard_error
        assert hits >= 99


class TestYieldCurve:
    def test_constant_rate(self):
        p = RegimeParams.from_rows([(0.1, 0.9, 0.3, 0.025, 0, 0), (0.4, 0.5, 0.9, 0.025, 0, 0)])
        curve = yield_curve(TransitionSchedule.constant(Q2), p, 0, 1.3, 0, [1, 2, 5, 9])
        assert np.allclose(curve.yields, 0.025, rtol=1e-14, atol=0)

    def test_one_period_yield_is_short_rate(self, q2, two_regime_params):
        p = two_regime_params
        curve = yield_curve(q2, p, 2, 0.4, 1, [3])
        assert curve.yields[0] == pytest.approx(p.a0[1] + p.a1[1] * 0.4 + p.a2[1] * 0.16, rel=1e-14)

    def test_matches_bond_price_bitwise(self, two_regime_params):
        sched = random_schedule(np.random.default_rng(6), 2, 9)
        curve = yield_curve(sched, two_regime_params, 1, 0.2, 0, [2, 4, 9])
        for T, price, y in curve.points:
            ref = bond_price(sched, two_regime_params, 1, T, 0.2, 0).price
            assert price == ref
            assert y == -math.log(ref) / (T - 1)

    @pytest.mark.parametrize("mats", [[], [3, 2], [0, 2]])
    def test_bad_maturities(self, q2, two_regime_params, mats):
        with pytest.raises(ValueError):
            yield_curve(q2, two_regime_params, 0, 0.0, 0, mats)
