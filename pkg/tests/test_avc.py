from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from avcdiv.avc import (
    Avc,
    CompositeSpec,
    CostModel,
    build_composite,
    bsc_avc,
    effective_channel,
    is_input_seq_admissible,
    is_state_seq_admissible,
    lift_identical_strategy,
)
from avcdiv.channels import identity, make_bsc
from conftest import open_unit, prob_vectors, unit

pairs = st.tuples(open_unit, open_unit)


class TestAvc:
    def test_defaults(self):
        avc = bsc_avc([0.1, 0.8])
        assert avc.num_states == 2
        assert avc.state_labels == (1, 2)
        assert avc.input_labels == (0, 1)
        assert avc.stack().shape == (2, 2, 2)

    def test_mismatched_states(self):
        with pytest.raises(ValueError):
            Avc((make_bsc(0.1), identity(3)))
        with pytest.raises(ValueError):
            Avc(())

    def test_unknown_label(self):
        with pytest.raises(KeyError):
            bsc_avc([0.1, 0.2]).state_index(3)

    def test_subset_and_permutation(self):
        avc = bsc_avc([0.1, 0.2, 0.3])
        assert avc.subset([3, 1]).states == (make_bsc(0.3), make_bsc(0.1))
        assert avc.permuted([2, 0, 1]).state_labels == (3, 1, 2)


class TestComposite:
    def test_independent_identical_two(self):
        a, b = bsc_avc([0.1, 0.9]), bsc_avc([0.2, 0.7])
        comp = build_composite(CompositeSpec((a, b), "independent", "identical"))
        assert comp.state_labels == ((1, 1), (2, 2))
        assert comp.num_states == 2
        assert comp.stack().shape == (2, 4, 2)
        for s, (wa, wb) in enumerate([(0.1, 0.2), (0.9, 0.7)]):
            for x in (0, 1):
                for y1, y2 in itertools.product((0, 1), repeat=2):
                    pa = wa if y1 == x else 1 - wa
                    pb = wb if y2 == x else 1 - wb
                    assert comp.states[s].matrix[2 * y1 + y2, x] == pytest.approx(pa * pb, abs=1e-15)

    def test_single_component_unchanged(self):
        a = bsc_avc([0.1, 0.9])
        assert build_composite(CompositeSpec((a,))) is a

    def test_orthogonal_unconstrained_sizes(self):
        comps = (bsc_avc([0.1, 0.9]), bsc_avc([0.2, 0.7, 0.4]))
        comp = build_composite(CompositeSpec(comps, "orthogonal", "unconstrained"))
        assert comp.num_states == 6
        assert comp.input_size == 4
        assert comp.input_labels == ((0, 0), (0, 1), (1, 0), (1, 1))

    def test_explicit_subset(self):
        comps = (bsc_avc([0.1, 0.9]), bsc_avc([0.2, 0.7]))
        comp = build_composite(CompositeSpec(comps, "independent", [(1, 2), (2, 1)]))
        assert comp.state_labels == ((1, 2), (2, 1))
        with pytest.raises(KeyError):
            CompositeSpec(comps, "independent", [(1, 3)])

    def test_spec_invariants(self):
        with pytest.raises(ValueError):
            CompositeSpec((bsc_avc([0.1, 0.9]), bsc_avc([0.2, 0.7, 0.4])), "independent", "identical")
        with pytest.raises(ValueError):
            CompositeSpec((bsc_avc([0.1, 0.9]),), "serial")

    @given(st.lists(pairs, min_size=2, max_size=3), st.sampled_from(["identical", "unconstrained"]))
    def test_independent_is_diagonal_of_orthogonal(self, params, constraint):
        comps = tuple(bsc_avc(p) for p in params)
        ind = build_composite(CompositeSpec(comps, "independent", constraint))
        orth = build_composite(CompositeSpec(comps, "orthogonal", constraint))
        assert ind.state_labels == orth.state_labels
        diag = [orth.input_labels.index((x,) * len(comps)) for x in (0, 1)]
        for si, so in zip(ind.states, orth.states):
            assert np.array_equal(si.matrix, so.matrix[:, diag])


class TestStrategies:
    def test_dirac_mixture(self):
        avc = bsc_avc([0.1, 0.8])
        assert effective_channel(avc, [1.0, 0.0]) == avc.states[0]

    def test_flip_pair_mixes_to_half(self):
        assert effective_channel(bsc_avc([0.3, 0.7]), [0.5, 0.5]).allclose(make_bsc(0.5))

    def test_mixture_example(self):
        assert effective_channel(bsc_avc([0.1, 0.8]), [0.3, 0.7]).allclose(make_bsc(0.59))

    def test_mixture_dimension(self):
        with pytest.raises(ValueError):
            effective_channel(bsc_avc([0.1, 0.8]), [1 / 3] * 3)

    @given(st.lists(open_unit, min_size=3, max_size=3), prob_vectors(3), prob_vectors(3), unit)
    def test_affine_in_q(self, ws, q1, q2, lam):
        avc = bsc_avc(ws)
        lhs = effective_channel(avc, lam * q1 + (1 - lam) * q2).matrix
        rhs = lam * effective_channel(avc, q1).matrix + (1 - lam) * effective_channel(avc, q2).matrix
        assert np.allclose(lhs, rhs, atol=1e-12, rtol=0)

    def test_lift(self):
        assert lift_identical_strategy([0.5, 0.5], 3) == {(1, 1, 1): 0.5, (2, 2, 2): 0.5}
        assert lift_identical_strategy([0.0, 1.0], 2) == {(2, 2): 1.0}
        with pytest.raises(ValueError):
            lift_identical_strategy([1.0], 0)

    @given(prob_vectors(4), st.integers(1, 5))
    def test_lift_support(self, q, K):
        lifted = lift_identical_strategy(q, K)
        assert len(lifted) == int(np.count_nonzero(q))
        assert all(len(set(t)) == 1 and len(t) == K for t in lifted)


class TestCosts:
    def test_state_budget(self):
        cost = CostModel.binary(0.4)
        assert is_state_seq_admissible((1, 1, 1, 2, 2), cost)
        assert not is_state_seq_admissible((2, 2, 2, 1, 1), cost)
        zero = CostModel.binary(0.0)
        assert is_state_seq_admissible((1,) * 6, zero)
        assert not is_state_seq_admissible((1, 1, 2), zero)

    def test_unknown_state(self):
        with pytest.raises(KeyError):
            is_state_seq_admissible((1, 3), CostModel.binary(0.5))

    def test_input_budget(self):
        assert is_input_seq_admissible((0, 1, 0, 1), CostModel.binary(1.0, 0.5))
        assert not is_input_seq_admissible((1, 1, 0, 0), CostModel.binary(1.0, 0.25))
        assert is_input_seq_admissible((1, 1, 1), CostModel.binary(1.0, 1.0))

    def test_flipped_labelling(self):
        cost = CostModel.binary(0.4, flipped=True)
        assert cost.l(1) == 1.0 and cost.l(2) == 0.0

    def test_tuple_labels_average(self):
        cost = CostModel.binary(0.5)
        assert cost.l((2, 2, 2)) == 1.0
        assert cost.l((1, 2)) == 0.5
        assert cost.g((1, 0, 1, 1)) == 0.75

    def test_negative_budget(self):
        with pytest.raises(ValueError):
            CostModel(-0.1)
