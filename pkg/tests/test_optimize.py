import numpy as np
import pytest

from conftest import random_channel
from relaybounds.channel import Topology, make_angle_channel
from relaybounds.optimize import (BoundResult, OptimizerConfig, decode_profile,
                                  decode_upper_vars, encode_profile, maximize,
                                  optimize_lower_bound, optimize_strategy,
                                  optimize_upper_bound, profile_dim, upper_dim)
from relaybounds.rates import achievable_rate, lower_bound_terms

ALL_METHODS = ("nelder_mead", "differential_evolution", "simulated_annealing")


class TestDecodeProfile:
    def test_zero_vector_gives_zero_rate(self, rng):
        ch = random_channel(rng)
        p = decode_profile(np.zeros(profile_dim(ch)), ch, "sc_u_first")
        assert achievable_rate(ch, p, "sc_u_first").r_total == 0.0

    def test_identity_factor_hits_budgets(self):
        ch = make_angle_channel(0.3)
        dim = profile_dim(ch)
        # large entries everywhere force both rescales onto the budgets
        p = decode_profile(np.full(dim, 3.0), ch, "sc_u_first")
        tu = np.real(np.trace(p.sigma_u))
        tv = np.real(np.trace(p.sigma_v))
        assert tu + tv == pytest.approx(ch.Mt, abs=1e-9)
        assert np.real(np.trace(p.sigma_x2)) == pytest.approx(ch.Mr, abs=1e-9)
        p.validate(ch.Mt, ch.Mr)

    def test_feasibility_over_random_vectors(self, rng):
        ch = random_channel(rng)
        for _ in range(10 ** 4):
            if rng.random() < 0.02:
                ch = random_channel(rng)
            x = 3.0 * rng.standard_normal(profile_dim(ch))
            strategy = "pre_u_first" if rng.random() < 0.5 else "sc_u_first"
            p = decode_profile(x, ch, strategy)
            p.validate(ch.Mt, ch.Mr)

    def test_encode_round_trip(self, rng):
        ch = random_channel(rng)
        for _ in range(20):
            x = rng.standard_normal(profile_dim(ch))
            p = decode_profile(x, ch, "sc_u_first")
            x2 = encode_profile(p, ch)
            p2 = decode_profile(x2, ch, "sc_u_first")
            np.testing.assert_allclose(p2.joint(), p.joint(), atol=1e-8)
            np.testing.assert_allclose(p2.sigma_v, p.sigma_v, atol=1e-8)


class TestMaximize:
    def test_constant_objective(self):
        cfg = OptimizerConfig(method="nelder_mead", budget=200, restarts=1,
                              seed=1, tol=1e-9)
        res = maximize(lambda x: 2.5, cfg, 2)
        assert res.value == 2.5
        assert res.converged

    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_concave_quadratic(self, method):
        cfg = OptimizerConfig(method=method, budget=4000, restarts=3,
                              seed=3, tol=1e-12)
        res = maximize(lambda x: -(x[0] - 0.3) ** 2, cfg, 1)
        assert abs(res.argmax[0] - 0.3) < 1e-4

    def test_seeded_determinism(self, rng):
        ch = random_channel(rng)
        cfg = OptimizerConfig(method="simulated_annealing", budget=500,
                              restarts=2, seed=99, tol=1e-9)
        r1 = optimize_strategy(ch, "sc", cfg)
        r2 = optimize_strategy(ch, "sc", cfg)
        assert r1.value == r2.value
        np.testing.assert_array_equal(r1.argmax, r2.argmax)
        assert r1.evaluations == r2.evaluations

    def test_value_matches_reevaluation(self, rng):
        ch = random_channel(rng)
        cfg = OptimizerConfig(method="nelder_mead", budget=500, restarts=2,
                              seed=5, tol=1e-9)
        res = optimize_strategy(ch, "sc", cfg)
        best = max(
            achievable_rate(ch, decode_profile(res.argmax, ch, s), s).r_total
            for s in ("sc_u_first", "sc_v_first"))
        assert best == pytest.approx(res.value, abs=1e-12)

    def test_warm_start_floor(self):
        cfg = OptimizerConfig(method="nelder_mead", budget=50, restarts=1,
                              seed=0, tol=1e-9)
        start = np.array([0.3])
        res = maximize(lambda x: -(x[0] - 0.3) ** 2, cfg, 1,
                       warm_starts=[start])
        assert res.value >= -1e-30


class TestBoundDrivers:
    def test_lower_bound_closed_form(self):
        ch = make_angle_channel(0.7, 10.0, Topology("equidistant", 0.5))
        assert optimize_lower_bound(ch) == pytest.approx(1.0, abs=1e-9)

    def test_sc_dominates_lower_bound(self, rng):
        cfg = OptimizerConfig(method="nelder_mead", budget=600, restarts=2,
                              seed=17, tol=1e-9)
        for _ in range(5):
            ch = random_channel(rng)
            res = optimize_strategy(ch, "sc", cfg)
            assert res.value >= optimize_lower_bound(ch) - 1e-9

    def test_pre_dominates_sc_with_chained_start(self, rng):
        cfg = OptimizerConfig(method="nelder_mead", budget=600, restarts=2,
                              seed=23, tol=1e-9)
        ch = random_channel(rng)
        sc = optimize_strategy(ch, "sc", cfg)
        pre = optimize_strategy(ch, "pre", cfg, extra_starts=[sc.argmax])
        assert pre.value >= sc.value - 1e-9

    def test_upper_vars_decode_feasible(self, rng):
        ch = random_channel(rng)
        for _ in range(200):
            v = decode_upper_vars(3 * rng.standard_normal(upper_dim(ch)), ch)
            assert 0.0 <= v.rho <= 1.0
            assert np.real(np.trace(v.sigma11)) <= ch.Mt + 1e-9
            assert np.real(np.trace(v.sigma22)) <= ch.Mr + 1e-9

    def test_upper_bound_runs(self, rng):
        ch = make_angle_channel(0.5, 10.0)
        cfg = OptimizerConfig(method="nelder_mead", budget=400, restarts=2,
                              seed=2, tol=1e-9)
        res = optimize_upper_bound(ch, cfg)
        assert isinstance(res, BoundResult)
        assert res.value > 0
