import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from structbandit.confidence import ArmStatistics, ConfidenceSet, build_confidence_set
from structbandit.model import ThetaGrid, build_from_table
from structbandit.policies import (
    ALGORITHM_IDS,
    InformativeParams,
    PolicyParams,
    algorithm_c_step,
    exploration_probability,
    informative_c_step,
    informativeness,
    klucb_index,
    parse_algorithm_id,
    select_with_base,
    sup_argmax_arm,
    ts_sample,
    ucb_index,
    ucb_s_step,
)


def grid_1d(values):
    return ThetaGrid(points=np.asarray(values, dtype=float).reshape(-1, 1))


def rng(seed=0):
    return np.random.Generator(np.random.PCG64(seed))


class CountingRng:
    """Wraps a generator and counts normal variates consumed."""

    def __init__(self, seed=0):
        self._rng = rng(seed)
        self.normals = 0
        self.uniforms = 0

    def standard_normal(self):
        self.normals += 1
        return self._rng.standard_normal()

    def random(self):
        self.uniforms += 1
        return self._rng.random()

    def integers(self, *a, **kw):
        return self._rng.integers(*a, **kw)


class TestIndices:
    def test_ucb_formula(self):
        assert ucb_index(1.0, 4, 100, 3.0, 2.0) == pytest.approx(6.256521769756932)

    def test_ucb_no_bonus_at_t_one(self):
        assert ucb_index(0.7, 9, 1, 3.0, 2.0) == 0.7

    def test_unpulled_sentinels(self):
        assert ucb_index(0.0, 0, 10, 3.0, 1.0) == math.inf
        assert klucb_index(0.0, 0, 10, 1.0) == math.inf
        assert ts_sample(0.0, 0, 1.0, 1.0, rng()) == math.inf

    def test_klucb_formula(self):
        assert klucb_index(0.0, 4, 100, 2.0) == pytest.approx(4.286422532464991)

    def test_klucb_at_log_boundaries(self):
        assert klucb_index(0.3, 7, 1, 2.0) == 0.3
        t_e = math.e  # f(t) = 1 exactly when ln t = 1
        assert klucb_index(0.0, 4, t_e, 2.0) == pytest.approx(math.sqrt(2 * 4 / 4))

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-3, 3), st.integers(2, 1000), st.integers(2, 10000))
    def test_indices_decrease_in_n(self, mean, n, t):
        assert ucb_index(mean, n, t, 3.0, 2.0) < ucb_index(mean, n - 1, t, 3.0, 2.0)
        assert klucb_index(mean, n, t, 2.0) <= klucb_index(mean, n - 1, t, 2.0)

    def test_ts_variance_parameter(self):
        # beta sigma^2 / n = 1*4/4 = 1; check via two fixed draws
        g1, g2 = rng(5), rng(5)
        z = g2.standard_normal()
        assert ts_sample(2.0, 4, 1.0, 2.0, g1) == pytest.approx(2.0 + 1.0 * z)

    def test_ts_deterministic_under_seed(self):
        assert ts_sample(0.5, 3, 1.0, 2.0, rng(9)) == ts_sample(0.5, 3, 1.0, 2.0, rng(9))


class TestSelectWithBase:
    def test_singleton(self):
        stats = ArmStatistics(counts=[3, 5], means=[0.1, 0.9], t=8)
        assert select_with_base("ucb", (1,), stats, PolicyParams(), rng(), 1.0) == 1

    def test_unpulled_candidate_wins(self):
        stats = ArmStatistics(counts=[4, 0], means=[5.0, math.nan], t=4)
        assert select_with_base("ucb", (0, 1), stats, PolicyParams(), rng(), 1.0) == 1

    def test_ucb_two_arm_example(self):
        stats = ArmStatistics(counts=[4, 4], means=[1.0, 0.9], t=100)
        assert select_with_base("ucb", (0, 1), stats, PolicyParams(alpha=3.0), rng(), 2.0) == 0

    def test_ties_to_lowest_index(self):
        stats = ArmStatistics(counts=[4, 4], means=[1.0, 1.0], t=100)
        assert select_with_base("ucb", (0, 1), stats, PolicyParams(), rng(), 2.0) == 0

    def test_empty_candidates_rejected(self):
        with pytest.raises(ValueError):
            select_with_base("ucb", (), ArmStatistics.empty(2), PolicyParams(), rng(), 1.0)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-4, 4), st.integers(0, 10**6))
    def test_ucb_choice_invariant_under_mean_shift(self, shift, seed):
        r = np.random.default_rng(seed)
        means = list(np.round(r.uniform(-1, 1, 3), 3))
        counts = [int(c) for c in r.integers(1, 40, 3)]
        stats = ArmStatistics(counts=counts, means=means, t=sum(counts))
        shifted = ArmStatistics(
            counts=counts, means=[m + shift for m in means], t=sum(counts)
        )
        params = PolicyParams()
        assert select_with_base(
            "ucb", (0, 1, 2), stats, params, rng(), 2.0
        ) == select_with_base("ucb", (0, 1, 2), shifted, params, rng(), 2.0)


def all_equal_model(n_arms=3, n_points=4):
    grid = grid_1d(list(range(n_points)))
    return build_from_table(grid, np.zeros((n_arms, n_points)), 2.0)


class TestAlgorithmCStep:
    def test_classic_reduction_choice(self):
        # Every grid point is an all-arms tie, so the competitive set is all
        # arms and the step must equal the classic base choice.
        model = all_equal_model()
        r = np.random.default_rng(1)
        for _ in range(50):
            counts = [int(c) for c in r.integers(1, 30, 3)]
            means = list(np.round(r.normal(0, 1, 3), 3))
            stats = ArmStatistics(counts=counts, means=means, t=sum(counts))
            params = PolicyParams(alpha=3.0)
            arm, conf, cands = algorithm_c_step(model, stats, params, rng(3))
            assert cands.arms == (0, 1, 2)
            assert arm == select_with_base("ucb", (0, 1, 2), stats, params, rng(3), 2.0)

    def test_fallback_candidates_are_all_arms(self, staircase_model):
        stats = ArmStatistics(counts=[10**6, 0], means=[99.0, math.nan], t=10**6)
        _, conf, cands = algorithm_c_step(staircase_model, stats, PolicyParams(), rng())
        assert conf.empty_fallback_triggered
        assert cands.arms == (0, 1)

    def test_deterministic_replay(self, staircase_model):
        stats = ArmStatistics(counts=[5, 5], means=[2.4, 0.7], t=10)
        params = PolicyParams(base="ts")
        a1 = algorithm_c_step(staircase_model, stats, params, rng(77))
        a2 = algorithm_c_step(staircase_model, stats, params, rng(77))
        assert a1[0] == a2[0]

    def test_ts_consumes_one_normal_per_candidate(self, staircase_model):
        stats = ArmStatistics(counts=[50, 50], means=[2.0, 1.0], t=100)
        params = PolicyParams(base="ts")
        counter = CountingRng()
        _, _, cands = algorithm_c_step(staircase_model, stats, params, counter)
        assert counter.normals == len(cands.arms)


class TestUcbS:
    def test_sup_at_single_point(self, staircase_model):
        stats = ArmStatistics(counts=[10**6, 0], means=[3.0, math.nan], t=10**6)
        # window around 3.0 keeps only grid index 3 where sups are (3, 0)
        conf = build_confidence_set(staircase_model, stats, 3.0)
        assert conf.member_indices == (3,)
        assert ucb_s_step(staircase_model, stats, PolicyParams(), rng()) == 0

    def test_sup_prefers_highest_table_value(self, staircase_model):
        conf = ConfidenceSet(bits=1 << 0, n_points=4, t=10)
        assert sup_argmax_arm(staircase_model, conf) == 1  # sups 0 vs 3

    def test_sup_tie_breaks_low(self, staircase_model):
        conf = ConfidenceSet(bits=(1 << 0) | (1 << 3), n_points=4, t=10)
        assert sup_argmax_arm(staircase_model, conf) == 0  # 3 vs 3

    def test_empty_set_uses_full_grid(self, staircase_model):
        conf = ConfidenceSet(bits=0, n_points=4, t=10)
        assert sup_argmax_arm(staircase_model, conf) == 0


class TestInformativeness:
    def test_variance_oracle(self):
        model = build_from_table(grid_1d([0, 1, 2]), [[1.0, 2.0, 3.0]], 1.0)
        conf = ConfidenceSet(bits=0b111, n_points=3, t=10)
        scores = informativeness("variance", model, conf).scores
        assert scores[0] == pytest.approx(2.0 / 3.0)

    def test_constant_function_scores_zero(self):
        model = build_from_table(grid_1d([0, 1, 2]), [[4.0, 4.0, 4.0]], 1.0)
        conf = ConfidenceSet(bits=0b111, n_points=3, t=10)
        assert informativeness("variance", model, conf).scores[0] == 0.0
        assert informativeness("entropy", model, conf).scores[0] == 0.0

    def test_entropy_oracle(self):
        model = build_from_table(grid_1d([0, 1, 2]), [[1.0, 1.0, 2.0]], 1.0)
        conf = ConfidenceSet(bits=0b111, n_points=3, t=10)
        expected = math.log(3) - (2.0 / 3.0) * math.log(2)
        assert informativeness("entropy", model, conf).scores[0] == pytest.approx(expected)

    def test_step_arm_has_highest_variance(self):
        # flat competitors on [2,4], step from 1 to 4 at theta=3
        theta = np.array([round(0.1 * i, 9) for i in range(61)])
        mu1 = np.full(61, 5.0)
        mu2 = np.full(61, 4.6)
        mu3 = np.where(theta < 3.0, 1.0, 4.0)
        model = build_from_table(
            ThetaGrid(points=theta.reshape(-1, 1)), [mu1, mu2, mu3], 2.0
        )
        members = [j for j, th in enumerate(theta) if 2.0 <= th <= 4.0]
        bits = 0
        for j in members:
            bits |= 1 << j
        conf = ConfidenceSet(bits=bits, n_points=61, t=100)
        scores = informativeness("variance", model, conf).scores
        assert scores[2] > scores[0] and scores[2] > scores[1]
        assert np.argmax(scores) == 2

    def test_random_metric_scores_equal(self):
        model = all_equal_model()
        conf = ConfidenceSet(bits=0b1, n_points=4, t=5)
        assert len(set(informativeness("random", model, conf).scores)) == 1


class TestInformativeStep:
    def test_probability_clamp_and_decay(self):
        assert exploration_probability(1, 30.0, 1.1) == 1.0
        assert exploration_probability(1000, 30.0, 1.1) == pytest.approx(0.015035617008818159)

    def test_forced_informative_at_t_one(self):
        theta = np.array([round(0.1 * i, 9) for i in range(61)])
        mu3 = np.where(theta < 3.0, 1.0, 4.0)
        model = build_from_table(
            ThetaGrid(points=theta.reshape(-1, 1)),
            [np.full(61, 5.0), np.full(61, 4.6), mu3],
            2.0,
        )
        params = PolicyParams(informative=InformativeParams(metric="variance"))
        stats = ArmStatistics(counts=[1, 0, 0], means=[5.1, math.nan, math.nan], t=1)
        # p = min(1, 30/1) = 1: the most informative arm is forced; with the
        # confidence set empty at t=1 the variance is taken over the full grid.
        assert informative_c_step(model, stats, params, rng(0)) == 2

    def test_probability_sum_converges(self):
        # partial sums stay below the integral bound for d > 1
        gamma, d = 30.0, 1.1
        t_clamp = math.ceil(gamma ** (1 / d))
        bound = t_clamp + gamma * (t_clamp - 0.5) ** (1 - d) / (d - 1)
        partial = 0.0
        for t in range(1, 200001):
            partial += exploration_probability(t, gamma, d)
        assert partial < bound

    def test_random_metric_draws_uniformly(self):
        model = all_equal_model()
        params = PolicyParams(informative=InformativeParams(metric="random"))
        stats = ArmStatistics(counts=[1, 1, 1], means=[0.0, 0.0, 0.0], t=1)
        picks = {informative_c_step(model, stats, params, rng(s)) for s in range(60)}
        assert picks == {0, 1, 2}


class TestAlgorithmIds:
    def test_registry_is_exact(self):
        assert ALGORITHM_IDS == (
            "ucb", "ts", "klucb", "ucb-c", "ts-c", "klucb-c", "ucb-s",
            "ucb-c-kldiv", "ucb-c-entropy", "ucb-c-random",
            "ts-c-kldiv", "ts-c-entropy", "ts-c-random",
        )

    def test_parse_roundtrip(self):
        assert parse_algorithm_id("klucb-c") == ("structured", "klucb", None)
        assert parse_algorithm_id("ts-c-kldiv") == ("informative", "ts", "variance")
        assert parse_algorithm_id("ucb-s") == ("sup", "ucb", None)
        with pytest.raises(ValueError):
            parse_algorithm_id("ucb-x")

    def test_param_validation(self):
        with pytest.raises(ValueError):
            PolicyParams(alpha=2.0)
        with pytest.raises(ValueError):
            PolicyParams(beta=0.0)
        with pytest.raises(ValueError):
            InformativeParams(d=1.0)
