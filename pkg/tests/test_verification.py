import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from linechase import verification as ver
from linechase.core import Instance, random_instance
from linechase.errors import InvalidInput
from linechase.geometry import DirectSimilarity, Line
from linechase.offline import solve_offline
from linechase.policies import (BetaPolicy, constant_beta, drift, extended_drift, get_policy,
                                greedy)

SQ3 = math.sqrt(3)
X = Line([0, 0], [1, 0])
Y = Line([0, 0], [0, 1])


class TestPotentialStep:
    def test_shadowing_adversary(self):
        L, L_new, P = X, Line([0, 0], [1, 1]), np.array([1.0, 0.0])
        P_new = drift(P, L, L_new)
        rep = ver.check_potential_step(P, L, L_new, P, P_new)
        d = math.dist(P, P_new)
        assert math.isclose(rep.lhs, d) and math.isclose(rep.rhs, 3 * d)
        assert math.isclose(rep.slack, 2 * d)

    def test_perpendicular(self):
        rep = ver.check_potential_step([1, 0], X, Y, [0, 0], [0, 0])
        assert math.isclose(rep.lhs, 1 - SQ3) and rep.rhs == 0.0
        assert math.isclose(rep.slack, SQ3 - 1)

    @pytest.mark.parametrize("z", [-10.0, -1.0, -0.3, 0.0, 0.5, 2.0, 100.0])
    def test_parallel_adversary_below(self, z):
        rep = ver.check_potential_step([0, 1], Line([0, 1], [1, 0]), X, [z, 1], [z, 0])
        assert rep.lhs <= math.sqrt(6) * 1.0 + 1e-12 < 3.0

    def test_preconditions(self):
        with pytest.raises(InvalidInput):
            ver.check_potential_step([0, 1], X, Y, [0, 0], [0, 0])
        with pytest.raises(InvalidInput):
            ver.check_potential_step([1, 0], X, Y, [0, 1], [0, 0])
        with pytest.raises(InvalidInput):
            ver.check_potential_step([1, 0], X, Y, [0, 0], [1, 0])
        with pytest.raises(InvalidInput):
            ver.check_potential_step([1, 0, 0], Line([0, 0, 0], [1, 0, 0]),
                                     Line([0, 0, 0], [0, 1, 0]), [0, 0, 0], [0, 0, 0])

    @given(st.floats(0.01, 3.1), st.floats(0.01, 100), st.floats(-100, 100), st.floats(-100, 100))
    def test_drift_steps_hold(self, theta, r, alpha, z):
        P = np.array([r * math.cos(theta), r * math.sin(theta)])
        L = Line([0, 0], P)
        A = alpha * L.dir
        rep = ver.check_potential_step(P, L, X, A, [z, 0.0])
        assert rep.ok()


class TestFuzz:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_drift_never_violates(self, seed):
        rep = ver.fuzz_potential(100_000, seed)
        assert rep.ok(), rep

    def test_deterministic(self):
        a, b = ver.fuzz_potential(50_000, 5), ver.fuzz_potential(50_000, 5)
        assert a == b

    def test_replay_matches(self):
        rep = ver.fuzz_potential(20_000, 3)
        again = ver.replay(rep)
        assert again.slack == pytest.approx(rep.slack, abs=1e-9 * (1 + rep.rhs))

    def test_vectorized_rule_matches_policy(self, rng):
        P, Ldir, A, A_new, P_new, case = ver._sample(rng, 2000, ver._drift_ratio)
        for j in range(2000):
            L = Line(P[j], Ldir[j])
            got = drift(P[j], L, X)
            assert np.allclose(got, P_new[j], atol=1e-9 * (1 + np.abs(P[j]).max()))

    def test_all_strata_sampled(self, rng):
        *_, case = ver._sample(rng, 60_000, ver._drift_ratio)
        assert set(np.unique(case)) == set(range(len(ver.CASES)))

    def test_greedy_violates(self):
        rep = ver.fuzz_potential(100_000, 0, beta=lambda a: np.zeros_like(a))
        assert not rep.ok()
        assert not ver.replay(rep, greedy).ok()

    def test_near_tight_family(self):
        for theta in (1e-2, 1e-3, 1e-4):
            rep = ver.near_tight_family(theta)
            assert rep.ok() and rep.slack < theta * rep.rhs
        assert ver.near_tight_family(1e-3).slack < 1e-3 * ver.near_tight_family(1e-3).rhs
        with pytest.raises(InvalidInput):
            ver.near_tight_family(0.0)

    def test_vectorized_beta_lookup(self):
        assert ver.vectorized_beta(drift) is None
        assert ver.vectorized_beta(get_policy("beta:drift")) is None
        assert np.all(ver.vectorized_beta(greedy)(np.array([1.0, 2.0])) == 0)
        assert np.allclose(ver.vectorized_beta(constant_beta(0.4))(np.array([1.0, 5.0])), 0.4)
        with pytest.raises(InvalidInput):
            ver.vectorized_beta(BetaPolicy(lambda a: 0.1, lambda a: 0.2))


class TestRts:
    def test_identity(self, rng):
        inst = random_instance(rng, 20)
        assert ver.check_rts_oblivious(drift, inst, DirectSimilarity.identity(2)) == 0.0

    @pytest.mark.parametrize("name", ["drift", "greedy", "beta:drift", "beta:const:0.3"])
    def test_planar(self, rng, name):
        for _ in range(50):
            inst = random_instance(rng, 20, initial_line=True)
            assert ver.check_rts_oblivious(get_policy(name), inst, DirectSimilarity.random(rng, 2)) <= 1e-9

    def test_extended_in_r5(self, rng):
        for _ in range(50):
            inst = random_instance(rng, 20, dim=5)
            assert ver.check_rts_oblivious(extended_drift, inst, DirectSimilarity.random(rng, 5)) <= 1e-9


class TestAudit:
    def test_single_line(self):
        res = ver.ratio_audit(drift, Instance([0, 1], [X]))
        assert res.ratio == pytest.approx(1.0, abs=1e-12) and res.certified

    def test_random(self, rng):
        for _ in range(30):
            res = ver.ratio_audit(drift, random_instance(rng, 30))
            assert res.certified and 1 - 1e-9 <= res.ratio <= 3 + 1e-6


class TestTelescoping:
    def test_against_optimum(self, rng):
        for _ in range(100):
            inst = random_instance(rng, 30)
            opt = solve_offline(inst)
            assert ver.check_telescoping(inst, opt.path.points) >= -1e-6

    @pytest.mark.parametrize("dim,policy", [(2, drift), (3, extended_drift), (5, extended_drift)])
    def test_against_random_adversaries(self, rng, dim, policy):
        for _ in range(200):
            inst = random_instance(rng, 20, dim)
            adv = [inst.start] + [l.point_at(rng.uniform(-3, 3)) for l in inst.requests]
            assert ver.check_telescoping(inst, adv, policy) >= -1e-6

    def test_shapes(self, rng):
        inst = random_instance(rng, 3)
        with pytest.raises(InvalidInput):
            ver.check_telescoping(inst, [inst.start])
        with pytest.raises(InvalidInput):
            ver.check_telescoping(inst, [inst.start] + [l.base + 1 for l in inst.requests])


def test_coplanar_reduction():
    assert ver.coplanar_reduction_deviation(2000, seed=1) <= 1e-9
