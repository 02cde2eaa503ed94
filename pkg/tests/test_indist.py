import math
import random

import numpy as np
import pytest

from privmetrics import indist as ind
from privmetrics.core import FiniteMechanism as M, JointDistribution as J
from privmetrics.errors import DomainError, EmptyError, ParamError, SchemaError


def rr_mechanism(p_keep):
    return M.from_matrix(
        [[p_keep, 1 - p_keep], [1 - p_keep, p_keep]], ["yes", "no"]
    )


NR = ind.NeighborRelation.of([("yes", "no")])


def random_mechanism(rng, n_in=None, n_out=None, zeros=False):
    n = n_in or int(rng.integers(2, 5))
    k = n_out or int(rng.integers(2, 5))
    mat = rng.random((n, k)) + 1e-3
    if zeros:
        mask = rng.random((n, k)) < 0.2
        mat[mask] = 0.0
        mat[mat.sum(axis=1) == 0, 0] = 1.0
    mat /= mat.sum(axis=1, keepdims=True)
    return M.from_matrix(mat.tolist())


def full_relation(m):
    ids = m.inputs
    return ind.NeighborRelation.of(
        [(a, b) for i, a in enumerate(ids) for b in ids[i + 1 :]]
    )


def merge_outputs(m, rng):
    """Post-process: random surjective merge of output symbols."""
    k = len(m.outputs)
    k2 = int(rng.integers(1, k + 1))
    assignment = [int(rng.integers(0, k2)) for _ in range(k)]
    merged = []
    for row in m.matrix():
        new = [0.0] * k2
        for y, v in enumerate(row):
            new[assignment[y]] += v
        merged.append(new)
    return M.from_matrix(merged, m.inputs)


class TestDpEpsilon:
    def test_identical_rows(self):
        m = M.from_matrix([[0.5, 0.5], [0.5, 0.5]], ["yes", "no"])
        assert ind.dp_epsilon(m, NR)["eps_eff"] == 0.0

    def test_randomized_response(self):
        assert ind.dp_epsilon(rr_mechanism(0.75), NR)["eps_eff"] == pytest.approx(
            math.log(3), abs=1e-12
        )

    def test_deterministic_distinct(self):
        m = M.from_matrix([[1, 0], [0, 1]], ["yes", "no"])
        assert ind.dp_epsilon(m, NR)["eps_eff"] == math.inf

    def test_unknown_input(self):
        with pytest.raises(SchemaError):
            ind.dp_epsilon(rr_mechanism(0.75), ind.NeighborRelation.of([("yes", "zzz")]))

    def test_post_processing_never_increases(self):
        rng = np.random.default_rng(51)
        for _ in range(100):
            m = random_mechanism(rng, zeros=True)
            nr = full_relation(m)
            before = ind.dp_epsilon(m, nr)["eps_eff"]
            after = ind.dp_epsilon(merge_outputs(m, rng), nr)["eps_eff"]
            assert after <= before + 1e-9 or math.isinf(before)

    def test_sequential_composition(self):
        rng = np.random.default_rng(53)
        for _ in range(50):
            m1 = random_mechanism(rng, n_in=2)
            m2 = random_mechanism(rng, n_in=2)
            nr = ind.NeighborRelation.of([(m1.inputs[0], m1.inputs[1])])
            eps1 = ind.dp_epsilon(m1, nr)["eps_eff"]
            eps2 = ind.dp_epsilon(m2, nr)["eps_eff"]
            prod_rows = []
            for r1, r2 in zip(m1.matrix(), m2.matrix()):
                prod_rows.append([a * b for a in r1 for b in r2])
            prod = M.from_matrix(prod_rows, m1.inputs)
            assert ind.dp_epsilon(prod, nr)["eps_eff"] <= eps1 + eps2 + 1e-9


class TestAdpDelta:
    def test_identical_rows(self):
        m = M.from_matrix([[0.5, 0.5], [0.5, 0.5]], ["yes", "no"])
        for eps in (0.0, 0.5, 3.0):
            assert ind.adp_delta(m, NR, eps) == 0.0

    def test_disjoint_supports(self):
        m = M.from_matrix([[1, 0], [0, 1]], ["yes", "no"])
        assert ind.adp_delta(m, NR, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_pure_dp_already_holds(self):
        assert ind.adp_delta(rr_mechanism(0.75), NR, math.log(3)) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_eps_zero_is_total_variation(self):
        m = rr_mechanism(0.75)
        assert ind.adp_delta(m, NR, 0.0) == pytest.approx(0.5, abs=1e-12)

    def test_negative_eps(self):
        with pytest.raises(ParamError):
            ind.adp_delta(rr_mechanism(0.75), NR, -1.0)

    def test_non_increasing_in_eps(self):
        rng = np.random.default_rng(57)
        for _ in range(50):
            m = random_mechanism(rng, zeros=True)
            nr = full_relation(m)
            deltas = [ind.adp_delta(m, nr, e) for e in (0.0, 0.2, 0.5, 1.0, 2.0)]
            for a, b in zip(deltas, deltas[1:]):
                assert b <= a + 1e-12

    def test_zero_at_eps_eff(self):
        rng = np.random.default_rng(59)
        for _ in range(50):
            m = random_mechanism(rng)
            nr = full_relation(m)
            eps = ind.dp_epsilon(m, nr)["eps_eff"]
            assert ind.adp_delta(m, nr, eps) <= 1e-12
            assert ind.adp_delta(m, nr, eps + 0.1) <= 1e-12


class TestGeoIndistinguishability:
    def geo(self, locations, matrix):
        mech = M.from_matrix(matrix, [loc[0] for loc in locations])
        return ind.GeoMechanism(tuple(locations), mech)

    def test_identical_rows(self):
        g = self.geo([("a", 0, 0), ("b", 3, 4)], [[0.5, 0.5], [0.5, 0.5]])
        assert ind.geo_indistinguishability(g)["eps_eff"] == 0.0

    def test_log_ratio_over_distance(self):
        g = self.geo([("a", 0, 0), ("b", 2, 0)], [[0.75, 0.25], [0.25, 0.75]])
        assert ind.geo_indistinguishability(g)["eps_eff"] == pytest.approx(
            math.log(3) / 2, abs=1e-12
        )

    def test_disjoint_supports(self):
        g = self.geo([("a", 0, 0), ("b", 1, 0)], [[1, 0], [0, 1]])
        assert ind.geo_indistinguishability(g)["eps_eff"] == math.inf

    def test_coincident_differing(self):
        g = self.geo([("a", 0, 0), ("b", 0, 0)], [[0.75, 0.25], [0.25, 0.75]])
        assert ind.geo_indistinguishability(g)["eps_eff"] == math.inf

    def test_scaling_coordinates_halves_eps(self):
        rng = np.random.default_rng(61)
        for _ in range(20):
            coords = rng.random((3, 2)) * 10
            mat = rng.random((3, 3)) + 1e-3
            mat /= mat.sum(axis=1, keepdims=True)
            locs = [(f"l{i}", float(x), float(y)) for i, (x, y) in enumerate(coords)]
            base = ind.geo_indistinguishability(self.geo(locs, mat.tolist()))["eps_eff"]
            doubled = [(n, 2 * x, 2 * y) for n, x, y in locs]
            scaled = ind.geo_indistinguishability(self.geo(doubled, mat.tolist()))["eps_eff"]
            assert scaled == pytest.approx(base / 2, rel=1e-9)

    def test_needs_two_locations(self):
        with pytest.raises(ParamError):
            ind.geo_indistinguishability(self.geo([("a", 0, 0)], [[1.0]]))


class TestInformationPrivacy:
    def test_independent(self):
        j = J(("s0", "s1"), ("u0", "u1"), ((0.25, 0.25), (0.25, 0.25)))
        r = ind.information_privacy(j, 0.0)
        assert r["eps_min"] == 0.0 and r["holds"]

    def test_identity_is_infinite(self):
        j = J(("s0", "s1"), ("u0", "u1"), ((0.5, 0.0), (0.0, 0.5)))
        assert ind.information_privacy(j, 10.0)["eps_min"] == math.inf

    def test_two_sided_bound(self):
        j = J(("s0", "s1"), ("u0", "u1"), ((0.3, 0.2), (0.2, 0.3)))
        r = ind.information_privacy(j, 0.25)
        # the below-prior ratio 0.4/0.5 binds: ln(1.25) > ln(1.2)
        assert r["eps_min"] == pytest.approx(math.log(1.25), abs=1e-12)
        assert r["holds"]
        assert not ind.information_privacy(j, 0.2)["holds"]

    def test_zero_iff_independent(self):
        rng = np.random.default_rng(67)
        for _ in range(50):
            w = rng.random((2, 3)) + 1e-6
            w /= w.sum()
            j = J(("s0", "s1"), ("u0", "u1", "u2"), tuple(tuple(r) for r in w))
            eps_min = ind.information_privacy(j, 0.0)["eps_min"]
            px = j.marginal_x().probs
            py = j.marginal_y().probs
            independent = all(
                abs(j.matrix[x][y] - px[x] * py[y]) < 1e-12
                for x in range(2)
                for y in range(3)
            )
            assert (eps_min < 1e-9) == independent


class TestDistributionalPrivacy:
    def test_equal_likelihoods(self):
        assert ind.distributional_privacy(0.5, 0.5, 1.0, 0.0) is True

    def test_ratio_e2_eps1(self):
        assert ind.distributional_privacy(math.exp(2), 1.0, 1.0, 1.0) is False

    def test_ratio_e2_eps2_boundary(self):
        assert ind.distributional_privacy(math.exp(2), 1.0, 1.0, 2.0) is True

    def test_vanishing_second_likelihood(self):
        assert ind.distributional_privacy(0.5, 0.0, 1.0, 100.0) is False

    def test_both_zero(self):
        with pytest.raises(DomainError):
            ind.distributional_privacy(0.0, 0.0, 1.0, 1.0)


class TestGameAdvantage:
    def test_all_correct(self):
        g = ind.GameTranscript(tuple((1, 1) for _ in range(100)))
        r = ind.game_advantage(g, 0.01)
        assert r["advantage"] == pytest.approx(0.5)
        assert r["holds"] is False

    def test_exactly_half(self):
        g = ind.GameTranscript(((1, 1), (0, 1)))
        assert ind.game_advantage(g, 1.0)["advantage"] == 0.0

    def test_coin_flips_hold(self):
        rng = random.Random(42)
        trials = tuple((rng.randint(0, 1), rng.randint(0, 1)) for _ in range(10000))
        r = ind.game_advantage(ind.GameTranscript(trials), 0.05)
        assert r["holds"] is True

    def test_wilson_contains_proportion(self):
        lo, hi = ind.wilson_interval(80, 100)
        assert lo < 0.8 < hi
        assert 0.0 <= lo and hi <= 1.0

    def test_empty_transcript(self):
        with pytest.raises(EmptyError):
            ind.GameTranscript(())

    def test_unconditional(self):
        g = ind.GameTranscript(((1, 1), (0, 1)))
        assert ind.unconditional_privacy(g) == {"holds": True, "advantage": 0.0}
        g2 = ind.GameTranscript(((1, 1), (1, 1)))
        assert ind.unconditional_privacy(g2)["holds"] is False


class TestSingletonSufficiency:
    def test_singleton_bound_implies_all_sets(self):
        # enumeration proof on a small mechanism: the per-output ratio bound
        # extends to every output set S
        rng = np.random.default_rng(71)
        for _ in range(20):
            m = random_mechanism(rng, n_in=2, n_out=3)
            nr = ind.NeighborRelation.of([(m.inputs[0], m.inputs[1])])
            eps = ind.dp_epsilon(m, nr)["eps_eff"]
            if math.isinf(eps):
                continue
            pa, pb = m.rows[0].probs, m.rows[1].probs
            for mask in range(1, 8):
                sa = sum(p for i, p in enumerate(pa) if mask & (1 << i))
                sb = sum(p for i, p in enumerate(pb) if mask & (1 << i))
                assert sa <= math.exp(eps) * sb + 1e-12
                assert sb <= math.exp(eps) * sa + 1e-12
