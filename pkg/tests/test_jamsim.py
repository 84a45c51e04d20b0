from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avcdiv.avc import CompositeSpec, CostModel, build_composite, bsc_avc
from avcdiv.channels import Channel, identity
from avcdiv.jamsim import (
    Codebook,
    JammerPolicy,
    averaged_output,
    confusion_gap,
    random_code,
    repetition_code,
    simulate,
    symmetrizing_attack,
)
from avcdiv.symmetrize import avbsc_symmetrizer_closed_form, minimize_f
from conftest import unit

TRIPLE = [(0.1, 0.9), (0.2, 0.8), (0.1, 0.85)]
FLIP_TRIPLE = [(0.1, 0.9), (0.2, 0.8), (0.15, 0.85)]

# Independent stdlib pilot, 40000 trials per block length, constant state (1, 1, 1).
DEMO_PILOT = {8: 0.14911084993340967, 16: 0.10517962936538755, 32: 0.04311246804941142}


def isc(params):
    return build_composite(CompositeSpec(tuple(bsc_avc(p) for p in params)))


class TestCodes:
    def test_single_codeword(self):
        code = random_code(4, 1, [0.5, 0.5], 3)
        assert code.M == 1 and code.n == 4

    def test_seeded(self):
        a = random_code(8, 4, [0.5, 0.5], 7)
        b = random_code(8, 4, [0.5, 0.5], 7)
        assert np.array_equal(a.codewords, b.codewords)
        assert a.codewords.shape == (4, 8)

    def test_too_many_messages(self):
        with pytest.raises(ValueError):
            random_code(2, 5, [0.5, 0.5], 0)

    def test_repetition(self):
        assert np.array_equal(repetition_code(3).codewords, [[0, 0, 0], [1, 1, 1]])

    def test_codebook_validation(self):
        with pytest.raises(ValueError):
            Codebook(np.zeros((0, 3), dtype=int))


class TestPolicies:
    def test_attack_sampler_valid(self):
        u = avbsc_symmetrizer_closed_form(0.1, 0.8).u
        code = random_code(16, 4, [0.5, 0.5], 1)
        sample = symmetrizing_attack(u, code, bsc_avc([0.1, 0.8]))
        states = sample(np.random.default_rng(0))
        assert states.shape == (16,) and set(states.tolist()) <= {0, 1}

    def test_dirac_symmetrizer(self):
        u = Channel(np.array([[1.0, 1.0], [0.0, 0.0]]))
        sample = symmetrizing_attack(u, random_code(10, 3, [0.5, 0.5], 2))
        assert not sample(np.random.default_rng(4)).any()

    def test_single_codeword_decoy(self):
        code = random_code(12, 1, [0.5, 0.5], 9)
        sample = symmetrizing_attack(identity(2), code)
        assert np.array_equal(sample(np.random.default_rng(1)), code.codewords[0])

    def test_wrong_shape_symmetrizer(self):
        with pytest.raises(ValueError):
            symmetrizing_attack(identity(3), repetition_code(4), bsc_avc([0.1, 0.8]))

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            JammerPolicy("iid")
        with pytest.raises(ValueError):
            JammerPolicy("iid", q=(0.5, 0.6))
        with pytest.raises(ValueError):
            JammerPolicy("symmetrizing")
        with pytest.raises(ValueError):
            JammerPolicy("random")


class TestSimulate:
    def test_single_message(self):
        code = random_code(8, 1, [0.5, 0.5], 0)
        rep = simulate(bsc_avc([0.1, 0.8]), code, JammerPolicy("constant"), trials=50)
        assert rep.avg_error == 0.0

    def test_reproducible(self):
        avc = bsc_avc([0.1, 0.8])
        code = random_code(16, 4, [0.5, 0.5], 5)
        pol = JammerPolicy("symmetrizing", u=avbsc_symmetrizer_closed_form(0.1, 0.8).u)
        a = simulate(avc, code, pol, trials=300, seed=11)
        b = simulate(avc, code, pol, trials=300, seed=11)
        assert a.to_json() == b.to_json()
        assert json.loads(a.to_json())["seed"] == 11
        assert simulate(avc, code, pol, trials=300, seed=12).to_json() != a.to_json()

    @settings(max_examples=15)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(["ml", "min-hamming"]))
    def test_report_invariants(self, seed, decoder):
        avc = bsc_avc([0.3, 0.95])
        code = random_code(6, 3, [0.5, 0.5], 1)
        rep = simulate(avc, code, JammerPolicy("iid", q=(0.5, 0.5)), decoder, 60, seed)
        assert 0.0 <= rep.avg_error <= 1.0
        observed = [e for e in rep.per_message_error if e is not None]
        assert abs(np.mean(observed) - rep.avg_error) <= 1e-12

    def test_attack_bounded_away_from_zero(self):
        avc = bsc_avc([0.1, 0.8])
        code = random_code(64, 4, [0.5, 0.5], 7)
        pol = JammerPolicy("symmetrizing", u=avbsc_symmetrizer_closed_form(0.1, 0.8).u)
        assert simulate(avc, code, pol, trials=1000, seed=3).avg_error >= 0.2

    def test_error_decreases_with_block_length(self):
        comp = isc(TRIPLE)
        trials = 20000
        errors = []
        for n in (8, 16, 32):
            rep = simulate(comp, repetition_code(n), JammerPolicy("constant", state=0), trials=trials, seed=5)
            pilot = DEMO_PILOT[n]
            assert abs(rep.avg_error - pilot) <= 3 * math.sqrt(pilot * (1 - pilot) / trials)
            errors.append(rep.avg_error)
        assert errors[0] > errors[1] > errors[2]

    def test_budget_never_binding(self):
        comp = isc(TRIPLE)
        pol = JammerPolicy("iid", q=(0.5, 0.5), cost=CostModel.binary(1.0))
        rep = simulate(comp, repetition_code(8), pol, trials=200, seed=1)
        assert rep.admissibility_rejections == 0

    def test_budget_resamples(self):
        pol = JammerPolicy("iid", q=(0.5, 0.5), cost=CostModel.binary(0.3))
        rep = simulate(bsc_avc([0.1, 0.9]), repetition_code(10), pol, trials=200, seed=1)
        assert rep.admissibility_rejections > 0

    def test_decoder_mismatch(self):
        with pytest.raises(ValueError):
            simulate(isc(TRIPLE), repetition_code(4), JammerPolicy("constant"), "min-hamming", 10)
        with pytest.raises(ValueError):
            simulate(bsc_avc([0.1]), repetition_code(4), JammerPolicy("constant"), "viterbi", 10)
        with pytest.raises(ValueError):
            simulate(bsc_avc([0.1]), repetition_code(4), JammerPolicy("constant"), trials=0)
        with pytest.raises(ValueError):
            simulate(bsc_avc([0.1]), repetition_code(4, alphabet=3), JammerPolicy("constant"), trials=5)


class TestConfusion:
    @given(unit, unit)
    def test_closed_form_symmetrizer(self, w1, w2):
        if abs(w1 - w2) < 1e-6 or (w1 - 0.5) * (w2 - 0.5) > 0:
            return
        avc = bsc_avc([w1, w2])
        u = avbsc_symmetrizer_closed_form(w1, w2).u
        assert confusion_gap(avc, u, 1) <= 1e-12
        assert confusion_gap(avc, u, 2) <= 1e-12

    def test_composite_symmetrizer(self):
        comp = isc(FLIP_TRIPLE)
        u = minimize_f(comp).u
        assert confusion_gap(comp, u, 2) <= 1e-12

    def test_non_symmetrizer_detected(self):
        # input 0 under state 2 gives (0.8, 0.2); input 1 under state 1 gives (0.9, 0.1)
        assert confusion_gap(bsc_avc([0.1, 0.8]), identity(2), 1) == pytest.approx(0.1, abs=1e-15)

    def test_output_law_normalized(self):
        avc = bsc_avc([0.1, 0.8])
        u = avbsc_symmetrizer_closed_form(0.1, 0.8).u
        out = averaged_output(avc, u, (0, 1), (1, 1))
        assert out.shape == (4,) and out.sum() == pytest.approx(1.0, abs=1e-15)
