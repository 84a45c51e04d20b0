from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avcdiv.avc import CompositeSpec, CostModel, build_composite, bsc_avc
from avcdiv.capacity import (
    channel_capacity,
    constrained_positive,
    cr_capacity,
    deterministic_capacity,
    lambda0,
    lambda0_max,
    superactivation_check,
)
from avcdiv.symmetrize import minimize_f
from conftest import open_unit, unit
from oracles import binary_entropy, convex_capacity, mutual_info

TRIPLE = [(0.1, 0.9), (0.2, 0.8), (0.1, 0.85)]
FLIP_TRIPLE = [(0.1, 0.9), (0.2, 0.8), (0.15, 0.85)]


def isc(params, mode="independent", constraint="identical"):
    return build_composite(CompositeSpec(tuple(bsc_avc(p) for p in params), mode, constraint))


class TestCrCapacity:
    def test_flip_pair_zero(self):
        res = cr_capacity(bsc_avc([0.1, 0.9]))
        assert res.value <= 1e-9
        assert res.q_star == pytest.approx([0.5, 0.5], abs=1e-6)
        assert res.zero_reason == "degenerate"

    def test_single_state(self):
        res = cr_capacity(bsc_avc([0.9]))
        assert res.value == pytest.approx(1 - binary_entropy(0.1), abs=1e-9)
        assert res.value == pytest.approx(0.531004, abs=1e-6)
        assert res.p_star == pytest.approx([0.5, 0.5], abs=1e-4)

    def test_superactivation_triple_positive(self):
        assert cr_capacity(isc(TRIPLE)).value > 1e-4

    @given(unit)
    def test_single_state_equals_channel_capacity(self, w):
        res = cr_capacity(bsc_avc([w]))
        assert res.value == pytest.approx(1 - binary_entropy(w), abs=1e-6)
        assert res.value == pytest.approx(channel_capacity(bsc_avc([w]).stack()[0])[0], abs=1e-12)

    def test_blahut_arimoto_branch(self):
        # three-letter input: a ternary symmetric channel has capacity log2(3) - H(row)
        eps = 0.1
        w = np.full((3, 3), eps / 2) + np.eye(3) * (1 - 1.5 * eps)
        value, p = channel_capacity(w)
        row = w[:, 0]
        assert value == pytest.approx(math.log2(3) + float((row * np.log2(row)).sum()), abs=1e-9)
        assert p == pytest.approx([1 / 3] * 3, abs=1e-6)

    @pytest.mark.parametrize(
        "mode,constraint,K",
        [
            ("independent", "identical", 3),
            ("independent", "unconstrained", 2),
            ("orthogonal", "identical", 2),
            ("orthogonal", "unconstrained", 2),
        ],
    )
    def test_matches_convex_program(self, mode, constraint, K):
        rng = np.random.default_rng([sum(map(ord, mode + constraint)), K])
        for _ in range(3):
            avc = isc([tuple(rng.uniform(0, 1, 2)) for _ in range(K)], mode, constraint)
            res = cr_capacity(avc)
            assert res.value == pytest.approx(convex_capacity(avc.stack()), abs=1e-6)
            assert res.gap <= 1e-6

    def test_three_state_avc(self):
        avc = bsc_avc([0.2, 0.35, 0.9])
        res = cr_capacity(avc)
        assert res.value == pytest.approx(convex_capacity(avc.stack()), abs=1e-6)
        # duplicated states change nothing
        dup = bsc_avc([0.2, 0.35, 0.35, 0.9])
        assert cr_capacity(dup).value == pytest.approx(res.value, abs=1e-9)

    @settings(max_examples=25)
    @given(st.lists(open_unit, min_size=3, max_size=3), st.integers(0, 2))
    def test_monotone_under_state_removal(self, ws, drop):
        full = cr_capacity(bsc_avc(ws)).value
        kept = [w for i, w in enumerate(ws) if i != drop]
        assert cr_capacity(bsc_avc(kept)).value >= full - 1e-9

    @settings(max_examples=25)
    @given(st.lists(st.tuples(open_unit, open_unit), min_size=2, max_size=3))
    def test_saddle_certificate(self, params):
        avc = isc(params)
        res = cr_capacity(avc)
        stack = avc.stack()
        assert res.gap >= -1e-9 and res.gap <= 1e-6
        w_q = np.tensordot(res.q_star, stack, axes=1)
        grid = np.linspace(0, 1, 2001)
        best_p = max(mutual_info(np.array([a, 1 - a]), w_q) for a in grid)
        assert best_p <= res.value + 1e-6
        worst_q = min(mutual_info(res.p_star, t * stack[0] + (1 - t) * stack[1]) for t in grid)
        assert worst_q >= res.value - 1e-6


class TestDeterministic:
    def test_symmetrizable_zero(self):
        res = deterministic_capacity(bsc_avc([0.1, 0.8]))
        assert res.value == 0.0 and res.zero_reason == "symmetrizable"

    def test_triple_equals_cr(self):
        comp = isc(TRIPLE)
        assert deterministic_capacity(comp).value == cr_capacity(comp).value > 0

    def test_single_state(self):
        assert deterministic_capacity(bsc_avc([0.9])).value == pytest.approx(0.531004, abs=1e-6)

    @given(st.lists(st.tuples(unit, unit), min_size=1, max_size=2))
    def test_dichotomy_wiring(self, params):
        avc = isc(params)
        if minimize_f(avc).f_value <= 1e-9:
            assert deterministic_capacity(avc).value == 0.0
        else:
            assert deterministic_capacity(avc).value == cr_capacity(avc).value


class TestLambda0:
    @pytest.mark.parametrize("flipped", [False, True])
    def test_closed_form(self, flipped):
        avc = bsc_avc([0.1, 0.9])
        cost = CostModel.binary(0.4, flipped=flipped)
        for p1 in np.round(np.arange(0, 1001, 7) * 1e-3, 12):
            assert lambda0(avc, [1 - p1, p1], cost) == pytest.approx(min(p1, 1 - p1), abs=1e-9)

    def test_examples(self):
        avc = bsc_avc([0.1, 0.9])
        cost = CostModel.binary(0.4)
        assert lambda0(avc, [0.3, 0.7], cost) == pytest.approx(0.3, abs=1e-12)
        assert lambda0(avc, [0.5, 0.5], cost) == pytest.approx(0.5, abs=1e-12)
        assert lambda0(bsc_avc([0.1, 0.2]), [0.5, 0.5], cost) == math.inf

    @pytest.mark.parametrize("params", [[(0.1, 0.9)], [(0.3, 0.6)], FLIP_TRIPLE])
    def test_joint_lp_matches_scan(self, params):
        avc = isc(params)
        cost = CostModel.binary(0.4, 0.4)
        value, p_star = lambda0_max(avc, cost)
        scan = max(lambda0(avc, [1 - a, a], cost) for a in np.linspace(0, 0.4, 401))
        assert value == pytest.approx(scan, abs=1e-9)
        assert p_star[1] <= 0.4 + 1e-9

    def test_single_flip_pair_not_positive(self):
        v = constrained_positive(bsc_avc([0.1, 0.9]), CostModel.binary(0.4, 0.4))
        assert v.lambda0_max == pytest.approx(0.4, abs=1e-9)
        assert not v.positive and v.boundary

    def test_large_budget_not_positive(self):
        v = constrained_positive(isc(FLIP_TRIPLE), CostModel.binary(0.5, 0.4))
        assert not v.positive

    def test_unconstrained_input_peak(self):
        value, _ = lambda0_max(bsc_avc([0.1, 0.9]), CostModel.binary(0.4))
        assert value == pytest.approx(0.5, abs=1e-9)

    def test_nonsymmetrizable_positive(self):
        v = constrained_positive(isc(TRIPLE), CostModel.binary(0.4, 0.4))
        assert v.lambda0_max == math.inf and v.positive

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_positive_iff_strictly_above(self, lam, gamma):
        v = constrained_positive(bsc_avc([0.2, 0.8]), CostModel.binary(lam, gamma))
        assert v.positive == (v.lambda0_max > lam + 1e-9)


class TestSuperactivation:
    def test_superactivation_triple(self):
        rep = superactivation_check([bsc_avc(p) for p in TRIPLE])
        assert rep["superactivated"] and rep["superactivated_cr"]
        assert all(c["C_d"] <= 1e-9 and c["C_r"] <= 1e-9 for c in rep["per_component"])
        assert set(rep) >= {"per_component", "composite", "superactivated", "mode", "constrained"}

    def test_orthogonal(self):
        rep = superactivation_check([bsc_avc(p) for p in TRIPLE], mode="orthogonal")
        assert rep["superactivated"] and rep["mode"] == "orthogonal"

    def test_flip_pair_pair(self):
        rep = superactivation_check([bsc_avc((0.1, 0.9)), bsc_avc((0.2, 0.8))])
        assert rep["composite"]["symmetrizable"]
        assert not rep["superactivated"]

    def test_positive_component_blocks(self):
        rep = superactivation_check([bsc_avc((0.9, 0.9)), bsc_avc((0.2, 0.8)), bsc_avc((0.1, 0.85))])
        assert rep["per_component"][0]["C_d"] > 0.1
        assert not rep["superactivated"]

    def test_needs_two_components(self):
        with pytest.raises(ValueError):
            superactivation_check([bsc_avc((0.1, 0.9))])
