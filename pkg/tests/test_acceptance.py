"""Acceptance gate: the full set of exit criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  All phi comparisons use the stated tolerance of 1e-9.
"""

from __future__ import annotations

import json
import warnings
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from conftest import CNOT, COPY_XOR_TPM, GHZ, S2, W, ket, pure
from mechphi import classical as cl
from mechphi import quantum as qm
from mechphi.tensor import DensityMatrix

TOL = 1e-9
GOLDEN_DIR = Path(__file__).parent / "golden"

PLUS = np.array([S2, S2])
MINUS = np.array([S2, -S2])


@contextmanager
def criterion(number: int, summary: str):
    try:
        yield
    except Exception:
        print(f"FAIL criterion {number}: {summary}")
        raise
    print(f"PASS criterion {number}: {summary}")


def classical_copy_xor_distinctions():
    sys = cl.ClassicalSystem([2, 2], COPY_XOR_TPM)
    return cl.unfold(sys, state_t=(1, 0), state_t1=(1, 1))


def quantum_table(system_unitary, rho, directions=("effect", "cause")):
    sys = qm.QuantumSystem(system_unitary)
    ds = qm.unfold(sys, rho, directions=directions)
    return {(d.direction, d.mechanism_qubits): d for d in ds}


def basis_projector(states, purview_sizes) -> np.ndarray:
    dim = int(np.prod(purview_sizes))
    proj = np.zeros((dim, dim))
    for s in states:
        idx = 0
        for pos, size in enumerate(purview_sizes):
            idx = idx * size + s[pos]
        proj[idx, idx] = 1.0
    return proj


def test_criterion_1_classical_copy_xor():
    with criterion(1, "classical COPY-XOR input 10 reproduces the known "
                      "distinction table (tol 1e-9)"):
        ds = classical_copy_xor_distinctions()
        table = {(d.direction, d.mechanism_units): d for d in ds}
        assert set(table) == {
            ("effect", (0,)), ("effect", (0, 1)),
            ("cause", (0,)), ("cause", (1,)), ("cause", (0, 1)),
        }, "extra or missing distinctions"

        d = table[("effect", (0,))]
        assert d.purview == (0,) and d.intrinsic_states == ((1,),)
        assert abs(d.phi - 1.0) <= TOL

        d = table[("effect", (0, 1))]
        assert d.purview == (0, 1) and d.intrinsic_states == ((1, 1),)
        assert abs(d.phi - 1.0) <= TOL

        d = table[("cause", (0,))]
        assert d.purview == (0,) and d.intrinsic_states == ((1,),)
        assert abs(d.phi - 1.0) <= TOL

        d = table[("cause", (0, 1))]
        assert d.purview == (0, 1) and d.intrinsic_states == ((1, 0),)
        assert abs(d.phi - 1.0) <= TOL

        d = table[("cause", (1,))]
        assert d.purview == (0, 1)
        assert set(d.intrinsic_states) == {(1, 0), (0, 1)}
        assert abs(d.phi - 0.5) <= TOL


def test_criterion_2_quantum_classical_convergence():
    with criterion(2, "CNOT on |10> matches the classical distinction set "
                      "exactly (tol 1e-9)"):
        cds = classical_copy_xor_distinctions()
        qtable = {
            (d.direction, d.mechanism_qubits, d.purview): d
            for d in qm.unfold(qm.QuantumSystem(CNOT), pure(ket(1, 0)))
        }
        ckeys = {(d.direction, d.mechanism_units, d.purview): d for d in cds}
        assert set(qtable) == set(ckeys), "mechanism/purview sets differ"
        for key, cd in ckeys.items():
            qd = qtable[key]
            assert abs(cd.phi - qd.phi) <= TOL, key
            cproj = basis_projector(cd.intrinsic_states, [2] * len(cd.purview))
            assert np.max(np.abs(qd.intrinsic_state.projector() - cproj)) <= TOL, key


def test_criterion_3_hadamard_basis_cnot():
    with criterion(3, "CNOT on |-+>: |+>_B and |-+>_AB irreducible at 1 ibit, "
                      "|->_A reducible (tol 1e-9)"):
        sys = qm.QuantumSystem(CNOT)
        rho = pure(np.kron(MINUS, PLUS))
        table = {d.mechanism_qubits: d
                 for d in qm.unfold(sys, rho, directions=("effect",))}
        assert set(table) == {(1,), (0, 1)}
        assert abs(table[(1,)].phi - 1.0) <= TOL
        assert abs(table[(0, 1)].phi - 1.0) <= TOL
        assert qm.phi_max(sys, sys.mechanism((0,), rho), "effect") is None


def test_criterion_4_bell_generation():
    with criterion(4, "CNOT on |+0>: only the second-order effect and cause "
                      "survive, each at 2 ibit"):
        table = quantum_table(CNOT, pure(np.kron(PLUS, ket(0))))
        assert set(table) == {("effect", (0, 1)), ("cause", (0, 1))}
        eff = table[("effect", (0, 1))]
        assert eff.purview == (0, 1) and abs(eff.phi - 2.0) <= TOL
        bell = np.outer(BELL := np.array([S2, 0, 0, S2]), BELL)
        assert np.max(np.abs(eff.intrinsic_state.projector() - bell)) <= TOL
        cau = table[("cause", (0, 1))]
        assert cau.purview == (0, 1) and abs(cau.phi - 2.0) <= TOL


def test_criterion_5_separable_case():
    with criterion(5, "CNOT on |0+>: first-order distinctions only"):
        table = quantum_table(CNOT, pure(np.kron(ket(0), PLUS)))
        assert set(table) == {
            ("effect", (0,)), ("effect", (1,)),
            ("cause", (0,)), ("cause", (1,)),
        }
        assert all(abs(d.phi - 1.0) <= TOL for d in table.values())


def test_criterion_6_mixed_state_case():
    with criterion(6, "CNOT on the |00>/|11> mixture: effect |0>_D at 1.0 ibit, "
                      "cause span{|00>,|11>} at 0.5 ibit"):
        mixed = DensityMatrix(np.diag([0.5, 0, 0, 0.5]).astype(complex))
        table = quantum_table(CNOT, mixed)
        assert set(table) == {("effect", (0, 1)), ("cause", (1,))}
        eff = table[("effect", (0, 1))]
        assert eff.purview == (1,)
        assert abs(eff.phi - 1.0) <= TOL
        assert np.max(np.abs(eff.intrinsic_state.projector() - np.diag([1, 0]))) <= TOL
        cau = table[("cause", (1,))]
        assert cau.purview == (0, 1)
        assert abs(cau.phi - 0.5) <= TOL
        assert cau.intrinsic_state.kind == "subspace"
        expected = np.diag([1, 0, 0, 1])
        assert np.max(np.abs(cau.intrinsic_state.projector() - expected)) <= TOL


def test_criterion_7_identity_dynamics_structure():
    with criterion(7, "identity dynamics: |000> first order, GHZ a single "
                      "third-order, W all orders (golden phi values)"):
        ds = qm.identity_structure(pure(ket(0, 0, 0)))
        assert sorted(d.mechanism_qubits for d in ds) == [(0,), (1,), (2,)]

        ds = qm.identity_structure(pure(GHZ))
        assert len(ds) == 1 and ds[0].order == 3

        ds = qm.identity_structure(pure(W))
        orders = {d.order for d in ds}
        assert orders == {1, 2, 3}
        golden = json.loads((GOLDEN_DIR / "w-identity.json").read_text())
        frozen = {
            (tuple(g["mechanism_units"])): g["phi"]
            for g in golden["distinctions"]
        }
        assert set(frozen) == {d.mechanism_qubits for d in ds}
        for d in ds:
            assert abs(d.phi - frozen[d.mechanism_qubits]) <= TOL


def test_criterion_8_three_qubit_extension():
    with criterion(8, "I(x)CNOT on GHZ keeps the two-qubit subsystem cause and "
                      "effect and adds third-order distinctions"):
        table = {
            (d.direction, d.mechanism_qubits, d.purview): d
            for d in qm.unfold(qm.QuantumSystem(np.kron(np.eye(2), CNOT)), pure(GHZ))
        }
        eff = table[("effect", (1, 2), (2,))]
        assert abs(eff.phi - 1.0) <= TOL
        assert np.max(np.abs(eff.intrinsic_state.projector() - np.diag([1, 0]))) <= TOL
        cau = table[("cause", (2,), (1, 2))]
        assert abs(cau.phi - 0.5) <= TOL
        assert np.max(np.abs(cau.intrinsic_state.projector() - np.diag([1, 0, 0, 1]))) <= TOL
        third = {k for k in table if len(k[1]) == 3}
        assert ("effect", (0, 1, 2), (0, 1, 2)) in third
        assert ("cause", (0, 1, 2), (0, 1, 2)) in third


def test_criterion_9_property_suites():
    import test_properties as props

    with criterion(9, "randomized property suites (>=200 instances each) all hold"):
        props.TestRepertoireNormalization().test_classical_repertoires_normalize()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            props.TestRepertoireNormalization(
            ).test_quantum_repertoires_are_unit_trace_product_states()
        rng = np.random.default_rng(900)
        for _ in range(200):
            size = int(rng.integers(2, 9))
            p = rng.dirichlet(np.ones(size))
            q = rng.dirichlet(np.ones(size))
            assert cl.intrinsic_difference(p, q)[0] >= -1e-12
            assert abs(cl.intrinsic_difference(p, p)[0]) <= TOL
            point = np.zeros(size)
            point[int(rng.integers(0, size))] = 1.0
            assert abs(cl.intrinsic_difference(point, q)[0] - cl.kld(point, q)) <= TOL
        qid_props = props.TestQidProperties()
        qid_props.test_matches_classical_id_on_commuting_pairs()
        qid_props.test_equals_relative_entropy_for_pure_rho()
        qid_props.test_invariant_under_joint_conjugation()
        props.TestPartitionEnumeration().test_random_label_sets_match_relabeled_oracle()
        ppt = props.TestPptFlags()
        ppt.test_bell_state_flagged_entangled()
        ppt.test_classical_correlation_flagged_separable()
        ppt.test_random_product_mixtures_stay_separable()
