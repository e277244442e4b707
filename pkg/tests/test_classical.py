"""Classical pipeline: repertoires, intrinsic difference, partitions, unfolding.

Expected values for the COPY-XOR gate (unit 0 copies to unit 0, unit 1
becomes the XOR of both inputs) were worked out by hand from the transition
matrix; derived values are computed with independent oracles inline.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import COPY_XOR_TPM
from mechphi.classical import (
    ClassicalSystem,
    Mechanism,
    cause_repertoire,
    effect_repertoire,
    effect_repertoire_single,
    intrinsic_difference,
    intrinsic_information,
    kld,
    mip,
    partitioned_repertoire,
    phi,
    phi_max,
    unconstrained_cause,
    unconstrained_effect,
    unfold,
)
from mechphi.errors import ValidationError
from mechphi.partitions import DisintegratingPartition, enumerate_disintegrating, normalization

A1 = Mechanism((0,), (1,))
B0 = Mechanism((1,), (0,))
AB10 = Mechanism((0, 1), (1, 0))
C1 = Mechanism((0,), (1,))
D1 = Mechanism((1,), (1,))
CD11 = Mechanism((0, 1), (1, 1))


def theta(*parts) -> DisintegratingPartition:
    return DisintegratingPartition.from_parts(parts)


class TestEffectRepertoires:
    def test_copy_output_is_certain(self, copy_xor):
        rep = effect_repertoire_single(copy_xor, A1, 0)
        assert np.allclose(rep.probabilities, [0, 1])

    def test_xor_with_noised_partner_is_uniform(self, copy_xor):
        rep = effect_repertoire_single(copy_xor, B0, 1)
        assert np.allclose(rep.probabilities, [0.5, 0.5])

    def test_full_mechanism_is_tpm_row_marginal(self, copy_xor):
        # nothing to marginalize: the repertoire is the row's unit marginal
        rep = effect_repertoire_single(copy_xor, AB10, 1)
        row = COPY_XOR_TPM[2]  # state (1, 0)
        expected = [row[0] + row[2], row[1] + row[3]]
        assert np.allclose(rep.probabilities, expected)

    def test_product_discounts_common_input_correlation(self, copy_xor):
        rep = effect_repertoire(copy_xor, B0, (0, 1))
        assert np.allclose(rep.probabilities, [0.25] * 4)

    def test_full_input_gives_point_mass(self, copy_xor):
        rep = effect_repertoire(copy_xor, AB10, (0, 1))
        assert np.allclose(rep.probabilities, [0, 0, 0, 1])

    def test_single_unit_purview_matches_single(self, copy_xor):
        joint = effect_repertoire(copy_xor, A1, (0,))
        single = effect_repertoire_single(copy_xor, A1, 0)
        assert np.allclose(joint.probabilities, single.probabilities)


class TestUnconstrainedEffect:
    def test_average_of_rows(self, copy_xor):
        rep = unconstrained_effect(copy_xor, (0,), (0, 1))
        rows = [
            effect_repertoire(copy_xor, Mechanism((0, 1), s), (0,)).probabilities
            for s in [(0, 0), (0, 1), (1, 0), (1, 1)]
        ]
        assert np.allclose(rep.probabilities, np.mean(rows, axis=0))
        assert np.allclose(rep.probabilities, [0.5, 0.5])

    def test_constant_output_unit(self):
        # unit 1 always goes to 0 regardless of anything
        tpm = np.array([
            [1, 0, 0, 0],
            [1, 0, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 1, 0],
        ], dtype=float)
        sys = ClassicalSystem([2, 2], tpm)
        for m_units in [(0,), (1,), (0, 1)]:
            rep = unconstrained_effect(sys, (1,), m_units)
            assert np.allclose(rep.probabilities, [1, 0])

    def test_two_unit_purview_explicit_sum(self, copy_xor):
        rep = unconstrained_effect(copy_xor, (0, 1), (0, 1))
        acc = np.zeros(4)
        for s in [(0, 0), (0, 1), (1, 0), (1, 1)]:
            acc += effect_repertoire(copy_xor, Mechanism((0, 1), s), (0, 1)).probabilities
        assert np.allclose(rep.probabilities, acc / 4)


class TestCauseRepertoires:
    def test_xor_output_leaves_parity_uncertainty(self, copy_xor):
        rep = cause_repertoire(copy_xor, D1, (0, 1))
        assert np.allclose(rep.probabilities, [0, 0.5, 0.5, 0])

    def test_joint_output_pins_the_input(self, copy_xor):
        rep = cause_repertoire(copy_xor, CD11, (0, 1))
        assert np.allclose(rep.probabilities, [0, 0, 1, 0])

    def test_reversible_full_state_has_unique_preimage(self):
        # permutation: states cycle 0 -> 1 -> 2 -> 3 -> 0
        tpm = np.roll(np.eye(4), 1, axis=1)
        sys = ClassicalSystem([2, 2], tpm)
        rep = cause_repertoire(sys, Mechanism((0, 1), (0, 1)), (0, 1))
        assert np.allclose(rep.probabilities, [1, 0, 0, 0])

    def test_unreachable_state_flags_empty(self):
        # unit 1 never outputs 1
        tpm = np.array([
            [1, 0, 0, 0],
            [1, 0, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 1, 0],
        ], dtype=float)
        sys = ClassicalSystem([2, 2], tpm)
        assert cause_repertoire(sys, Mechanism((1,), (1,)), (0, 1)) is None
        value, states = intrinsic_information(sys, Mechanism((1,), (1,)), (0, 1), "cause")
        assert value == 0.0 and states is None

    def test_unconstrained_cause_is_uniform(self, copy_xor):
        assert np.allclose(unconstrained_cause(copy_xor, (0,)).probabilities, [0.5, 0.5])
        assert np.allclose(unconstrained_cause(copy_xor, (0, 1)).probabilities, [0.25] * 4)

    def test_unconstrained_cause_ternary_unit(self):
        tpm = np.ones((3, 3)) / 3
        sys = ClassicalSystem([3], tpm)
        assert np.allclose(unconstrained_cause(sys, (0,)).probabilities, [1 / 3] * 3)


class TestIntrinsicDifference:
    def test_equal_distributions(self):
        assert intrinsic_difference([0.3, 0.7], [0.3, 0.7])[0] == 0.0

    def test_deterministic_vs_uniform(self):
        value, states = intrinsic_difference([1, 0], [0.5, 0.5])
        assert value == 1.0 and states == (0,)

    def test_half_support_vs_uniform_with_tie(self):
        value, states = intrinsic_difference([0.5, 0.5, 0, 0], [0.25] * 4)
        assert abs(value - 0.5) < 1e-12
        assert states == (0, 1)

    def test_support_violation_is_inf(self):
        value, states = intrinsic_difference([0.5, 0.5], [1.0, 0.0])
        assert math.isinf(value) and states == (1,)

    def test_kld_matches_on_deterministic(self):
        assert kld([1, 0], [0.5, 0.5]) == 1.0

    def test_kld_differs_on_spread(self):
        assert abs(kld([0.5, 0.5, 0, 0], [0.25] * 4) - 1.0) < 1e-12


class TestIntrinsicInformation:
    def test_copy_effect_one_ibit(self, copy_xor):
        value, states = intrinsic_information(copy_xor, A1, (0,), "effect")
        assert abs(value - 1.0) < 1e-12 and states == (1,)

    def test_no_effect_through_product(self, copy_xor):
        value, _ = intrinsic_information(copy_xor, B0, (0, 1), "effect")
        assert abs(value) < 1e-12

    def test_cause_with_tied_states(self, copy_xor):
        value, states = intrinsic_information(copy_xor, D1, (0, 1), "cause")
        assert abs(value - 0.5) < 1e-12
        assert states == (1, 2)  # 01 and 10


class TestPartitionedRepertoire:
    def test_full_cut_single_pair(self, copy_xor):
        th = theta(((0,), ()), ((), (0,)))
        rep = partitioned_repertoire(copy_xor, A1, (0,), th, "effect")
        assert np.allclose(rep.probabilities, [0.5, 0.5])

    def test_per_part_evaluation(self, copy_xor):
        th = theta(((0,), (0,)), ((1,), (1,)))
        rep = partitioned_repertoire(copy_xor, AB10, (0, 1), th, "effect")
        # copy intact: unit 0 pinned to 1; xor severed from unit 0: uniform
        assert np.allclose(rep.probabilities, [0, 0, 0.5, 0.5])

    def test_every_partition_severs_something(self, copy_xor):
        full = effect_repertoire(copy_xor, AB10, (0, 1)).probabilities
        changed = []
        for th in enumerate_disintegrating((0, 1), (0, 1)):
            rep = partitioned_repertoire(copy_xor, AB10, (0, 1), th, "effect")
            changed.append(not np.allclose(rep.probabilities, full))
        assert all(changed)


class TestPhiAndMip:
    def test_full_cut_costs_two_ibits(self, copy_xor):
        th = theta(((0, 1), ()), ((), (0, 1)))
        assert abs(phi(copy_xor, AB10, (0, 1), th, "effect") - 2.0) < 1e-12

    def test_matched_cut_costs_one_ibit(self, copy_xor):
        th = theta(((0,), (0,)), ((1,), (1,)))
        assert abs(phi(copy_xor, AB10, (0, 1), th, "effect") - 1.0) < 1e-12

    def test_identical_partitioned_repertoire_is_free(self, copy_xor):
        th = theta(((0,), (0,)), ((1,), ()))  # cut xor away from the copy path
        assert abs(phi(copy_xor, AB10, (0,), th, "effect")) < 1e-12

    def test_mip_values_for_known_mechanisms(self, copy_xor):
        assert abs(mip(copy_xor, A1, (0,), "effect")[1] - 1.0) < 1e-12
        assert abs(mip(copy_xor, AB10, (0, 1), "effect")[1] - 1.0) < 1e-12
        assert abs(mip(copy_xor, D1, (0, 1), "cause")[1] - 0.5) < 1e-12

    def test_mip_minimizes_normalized_value(self, copy_xor):
        best_theta, best_value = mip(copy_xor, AB10, (0, 1), "effect")
        best_norm = best_value / normalization(best_theta, (0, 1), (0, 1))
        _, states = intrinsic_information(copy_xor, AB10, (0, 1), "effect")
        for th in enumerate_disintegrating((0, 1), (0, 1)):
            value = phi(copy_xor, AB10, (0, 1), th, "effect", states)
            assert best_norm <= value / normalization(th, (0, 1), (0, 1)) + 1e-12


class TestPhiMax:
    def test_copy_mechanism_selects_its_output(self, copy_xor):
        d = phi_max(copy_xor, A1, "effect")
        assert d.purview == (0,)
        assert d.intrinsic_states == ((1,),)
        assert abs(d.phi - 1.0) < 1e-12

    def test_tie_resolves_to_larger_purview(self, copy_xor):
        d = phi_max(copy_xor, AB10, "effect")
        assert d.purview == (0, 1)
        assert d.intrinsic_states == ((1, 1),)
        assert abs(d.phi - 1.0) < 1e-12
        assert (1,) in d.tied_purviews

    def test_reducible_mechanism_returns_none(self, copy_xor):
        assert phi_max(copy_xor, B0, "effect") is None

    def test_cause_with_state_tie(self, copy_xor):
        d = phi_max(copy_xor, D1, "cause")
        assert d.purview == (0, 1)
        assert set(d.intrinsic_states) == {(0, 1), (1, 0)}
        assert abs(d.phi - 0.5) < 1e-12


class TestUnfold:
    def test_copy_xor_distinction_sets(self, copy_xor):
        ds = unfold(copy_xor, state_t=(1, 0), state_t1=(1, 1))
        effects = {(d.mechanism_units, d.purview, round(d.phi, 9))
                   for d in ds if d.direction == "effect"}
        causes = {(d.mechanism_units, d.purview, round(d.phi, 9))
                  for d in ds if d.direction == "cause"}
        assert effects == {((0,), (0,), 1.0), ((0, 1), (0, 1), 1.0)}
        assert causes == {((0,), (0,), 1.0), ((1,), (0, 1), 0.5), ((0, 1), (0, 1), 1.0)}

    def test_single_unit_copy_system(self):
        sys = ClassicalSystem([2], np.eye(2))
        ds = unfold(sys, state_t=(1,), directions=("effect",))
        assert len(ds) == 1
        assert ds[0].mechanism_units == (0,) and abs(ds[0].phi - 1.0) < 1e-12

    def test_missing_state_is_an_error(self, copy_xor):
        with pytest.raises(ValidationError, match="state_t1"):
            unfold(copy_xor, state_t=(1, 0), directions=("cause",))

    def test_explicit_mechanism_selection(self, copy_xor):
        ds = unfold(copy_xor, state_t=(1, 0), directions=("effect",), mechanisms=[(0,)])
        assert len(ds) == 1 and ds[0].mechanism_units == (0,)


class TestSystemValidation:
    def test_row_sum_error_names_row(self):
        tpm = COPY_XOR_TPM.copy()
        tpm[2, 3] = 0.9
        with pytest.raises(ValidationError, match="row 2"):
            ClassicalSystem([2, 2], tpm)

    def test_conditional_independence_enforced(self):
        # perfectly correlated outputs cannot factor into unit conditionals
        tpm = np.array([
            [0.5, 0, 0, 0.5],
            [0.5, 0, 0, 0.5],
            [0.5, 0, 0, 0.5],
            [0.5, 0, 0, 0.5],
        ])
        with pytest.raises(ValidationError, match="independent"):
            ClassicalSystem([2, 2], tpm)

    def test_negative_entry_rejected(self):
        tpm = np.array([[1.2, -0.2], [0, 1]])
        with pytest.raises(ValidationError, match="negative"):
            ClassicalSystem([2], tpm)

    def test_background_clamps_units(self):
        # three units; unit 2 fixed at 0 acts like a frozen input
        rng = np.random.default_rng(0)
        base = np.zeros((8, 8))
        for s in range(8):
            a, b, c = s >> 2 & 1, s >> 1 & 1, s & 1
            a2, b2, c2 = a, a ^ b, c
            base[s, (a2 << 2) | (b2 << 1) | c2] = 1.0
        sys = ClassicalSystem([2, 2, 2], base, background=((2,), (0,)))
        assert sys.candidate_units == (0, 1)
        ds = unfold(sys, state_t=(1, 0, 0), state_t1=(1, 1, 0))
        assert all(2 not in d.mechanism_units and 2 not in d.purview for d in ds)
        with pytest.raises(ValidationError, match="background"):
            unfold(sys, state_t=(1, 0, 1), state_t1=(1, 1, 1))
