"""Mechanism-level integrated information for unitary qubit systems.

Mirrors the classical pipeline in density-matrix form.  A mechanism is a
qubit subset with a (possibly mixed) reduced state; its conditioned output is
obtained by padding with maximally mixed qubits, applying the unitary (or its
adjoint for causes), and tracing down to the purview.  Causal marginalization
must respect entanglement: the effect repertoire is the tensor product of the
conditioned output's reduced states across its finest separable partition, so
extraneous classical correlations are discounted while entangled blocks stay
intact.  The cause repertoire is instead built from the mechanism's own
separable blocks, as a trace-normalized matrix product of their individually
conditioned inputs.  Scores use the eigenvector-maximized quantum intrinsic
difference; irreducibility and purview maximization proceed exactly as in the
classical case.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Literal, NamedTuple, Optional, Sequence

import numpy as np

from .errors import ValidationError
from .partitions import (
    DisintegratingPartition,
    SetPartition,
    enumerate_disintegrating,
    enumerate_set_partitions,
    normalization,
)
from .tensor import (
    DEFAULT_DEGENERACY_TOL,
    DEFAULT_TOL,
    DensityMatrix,
    UnitaryOperator,
    apply_unitary,
    apply_unitary_adjoint,
    hermitian_eig,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    purity,
)

Direction = Literal["cause", "effect"]

_EFFECT: Direction = "effect"
_CAUSE: Direction = "cause"


class QuantumMechanism(NamedTuple):
    """A qubit subset (ascending) with its reduced density matrix."""

    qubits: tuple[int, ...]
    state: DensityMatrix


@dataclass(frozen=True)
class QuantumRepertoire:
    """Density matrix a mechanism specifies over a purview (ascending qubits).

    ``structure_partition`` is the purview partition across which the matrix
    factorizes exactly: the finest separable partition of the conditioned
    output for effects, the trivial single block for causes (whose matrix
    product need not factorize).  ``mechanism_partition`` records the
    mechanism-side separable blocks a cause repertoire was built from.
    """

    purview: tuple[int, ...]
    rho: DensityMatrix
    structure_partition: SetPartition
    mechanism_partition: Optional[SetPartition] = None


@dataclass(frozen=True)
class IntrinsicState:
    """Maximizing eigenvector(s) of a repertoire.

    ``kind`` is "subspace" when several vectors share a degenerate
    eigenvalue, otherwise "state" (tied non-degenerate vectors possible).
    """

    kind: Literal["state", "subspace"]
    eigenvalues: tuple[float, ...]
    vectors: tuple[np.ndarray, ...]

    def projector(self) -> np.ndarray:
        dim = self.vectors[0].shape[0]
        proj = np.zeros((dim, dim), dtype=complex)
        for v in self.vectors:
            proj += np.outer(v, v.conj())
        return proj


@dataclass(frozen=True)
class QuantumDistinction:
    """A quantum mechanism with its maximally irreducible cause or effect."""

    mechanism_qubits: tuple[int, ...]
    mechanism_state: DensityMatrix
    direction: Direction
    purview: tuple[int, ...]
    intrinsic_state: IntrinsicState
    phi: float
    mip: DisintegratingPartition
    normalization: int
    tied_purviews: tuple[tuple[int, ...], ...] = ()

    @property
    def order(self) -> int:
        return len(self.mechanism_qubits)


class QuantumSystem:
    """An n-qubit system evolving by a single unitary per update."""

    def __init__(self, unitary, tol: float = DEFAULT_TOL):
        u = unitary if isinstance(unitary, UnitaryOperator) else UnitaryOperator(unitary, tol=tol)
        if any(d != 2 for d in u.dims):
            raise ValidationError("quantum backend supports qubits only (all dims 2)")
        self.n_qubits = len(u.dims)
        if not 1 <= self.n_qubits <= 3:
            raise ValidationError(
                f"supported system sizes are 1..3 qubits, got {self.n_qubits}"
            )
        self.unitary = u
        self.dims = u.dims
        self.tol = float(tol)
        self._memo: dict = {}

    def qubit_range(self) -> tuple[int, ...]:
        return tuple(range(self.n_qubits))

    def _check_qubits(self, qubits: Iterable[int], what: str) -> tuple[int, ...]:
        out = tuple(sorted({int(q) for q in qubits}))
        if any(q < 0 or q >= self.n_qubits for q in out):
            raise ValidationError(f"{what} qubits {out} out of range")
        return out

    def mechanism(self, qubits: Iterable[int], system_state: DensityMatrix
                  ) -> QuantumMechanism:
        """Mechanism over ``qubits`` in the reduced state of ``system_state``."""
        qubits = self._check_qubits(qubits, "mechanism")
        if len(system_state.dims) != self.n_qubits:
            raise ValidationError("system state does not match the qubit count")
        return QuantumMechanism(qubits, partial_trace(system_state, qubits, tol=self.tol))


def _maximally_mixed(purview: Sequence[int]) -> DensityMatrix:
    return DensityMatrix.maximally_mixed(len(purview))


def _check_mechanism(sys: QuantumSystem, mechanism: QuantumMechanism) -> tuple[int, ...]:
    """The state matrix is only meaningful for strictly ascending qubits."""
    qubits = sys._check_qubits(mechanism.qubits, "mechanism")
    if tuple(mechanism.qubits) != qubits:
        raise ValidationError(
            f"mechanism qubits must be ascending and distinct, got {mechanism.qubits}"
        )
    if mechanism.state.dim != 2 ** len(qubits):
        raise ValidationError(
            f"mechanism state dim {mechanism.state.dim} does not match {len(qubits)} qubits"
        )
    return qubits


def _embed_with_mixed(state: DensityMatrix, qubits: Sequence[int], n: int) -> np.ndarray:
    """Place a state on ``qubits`` and maximally mixed qubits everywhere else."""
    rest = [q for q in range(n) if q not in qubits]
    arr = state.data
    if rest:
        pad = np.eye(2 ** len(rest)) / 2 ** len(rest)
        arr = np.kron(arr, pad)
    return permute_subsystems(arr, (2,) * n, list(qubits) + rest)


def conditioned_output(sys: QuantumSystem, mechanism: QuantumMechanism,
                       purview: Iterable[int], direction: Direction) -> DensityMatrix:
    """Reduced state of the purview given the mechanism, everything else noised.

    Effects propagate forward through the unitary; causes run the adjoint,
    which is the inverse evolution.
    """
    purview = sys._check_qubits(purview, "purview")
    if not purview:
        raise ValidationError("purview must be nonempty")
    qubits = _check_mechanism(sys, mechanism)
    embedded = DensityMatrix(
        _embed_with_mixed(mechanism.state, qubits, sys.n_qubits),
        dims=sys.dims, tol=sys.tol,
    )
    if direction == _EFFECT:
        evolved = apply_unitary(sys.unitary, embedded, tol=sys.tol)
    else:
        evolved = apply_unitary_adjoint(sys.unitary, embedded, tol=sys.tol)
    return partial_trace(evolved, purview, tol=sys.tol)


def entanglement_partition(rho: DensityMatrix, tol: float = DEFAULT_TOL) -> SetPartition:
    """Finest partition of the subsystems under which the state is separable.

    Pure states: a block can be split off exactly when its reduced state is
    pure, so the finest partition is found by scanning set partitions from
    finest to coarsest.  Mixed states: each candidate block must have a
    positive partial transpose against the rest; this is necessary-only in
    general, so undetected entanglement can merge blocks but a split is never
    fabricated for a state the test can reject.  The single-block partition
    always passes.
    """
    k = len(rho.dims)
    if k == 1:
        return SetPartition.from_blocks([(0,)])
    candidates = sorted(
        enumerate_set_partitions(range(k)), key=lambda p: (-p.r, p.blocks)
    )
    pure = purity(rho) >= 1.0 - tol
    cache: dict[tuple[int, ...], bool] = {}

    def block_ok(block: tuple[int, ...]) -> bool:
        if len(block) == k:
            return True
        if block not in cache:
            if pure:
                cache[block] = purity(partial_trace(rho, block, tol=tol)) >= 1.0 - tol
            else:
                pt = partial_transpose(rho, block)
                cache[block] = float(np.min(np.linalg.eigvalsh(pt))) >= -tol
        return cache[block]

    for partition in candidates:
        if all(block_ok(b) for b in partition.blocks):
            return partition
    return candidates[-1]  # unreachable: the single block always passes


def _assemble(purview: Sequence[int], factors: Sequence[tuple[Sequence[int], DensityMatrix]],
              tol: float) -> DensityMatrix:
    """Tensor factors over disjoint qubit groups into ascending purview order."""
    order: list[int] = []
    arr = np.ones((1, 1), dtype=complex)
    for qubits, rho in factors:
        order.extend(qubits)
        arr = np.kron(arr, rho.data)
    positions = [list(purview).index(q) for q in order]
    arr = permute_subsystems(arr, (2,) * len(purview), positions)
    return DensityMatrix(arr, dims=(2,) * len(purview), tol=tol)


def effect_repertoire(sys: QuantumSystem, mechanism: QuantumMechanism,
                      purview: Iterable[int]) -> QuantumRepertoire:
    """Conditioned output, factorized across its finest separable partition.

    Correlations between purview blocks that survive only as classical noise
    from outside the mechanism are removed by the product; entangled blocks
    pass through unchanged, so a pure conditioned output is returned as is.
    """
    purview = sys._check_qubits(purview, "purview")
    if not purview:
        raise ValidationError("purview must be nonempty")
    if mechanism.qubits:
        _check_mechanism(sys, mechanism)
    key = (_EFFECT, mechanism.qubits, mechanism.state.data.tobytes(), purview)
    hit = sys._memo.get(key)
    if hit is not None:
        return hit
    if not mechanism.qubits:
        rep = QuantumRepertoire(
            purview, _maximally_mixed(purview),
            SetPartition.from_blocks([(q,) for q in purview]),
        )
        sys._memo[key] = rep
        return rep
    out = conditioned_output(sys, mechanism, purview, _EFFECT)
    structure = entanglement_partition(out, tol=sys.tol)
    blocks = [tuple(purview[i] for i in b) for b in structure.blocks]
    if structure.r == 1:
        rho = out
    else:
        factors = [
            (blocks[i], partial_trace(out, structure.blocks[i], tol=sys.tol))
            for i in range(structure.r)
        ]
        rho = _assemble(purview, factors, sys.tol)
    rep = QuantumRepertoire(purview, rho, SetPartition.from_blocks(blocks))
    sys._memo[key] = rep
    return rep


def cause_repertoire(sys: QuantumSystem, mechanism: QuantumMechanism,
                     purview: Iterable[int]) -> Optional[QuantumRepertoire]:
    """Trace-normalized product of per-block conditioned inputs.

    The product runs over the mechanism's own separable blocks (not over
    blocks of the resulting state) in ascending lowest-qubit order.  Returns
    None when the product has (numerically) zero trace, meaning the mechanism
    state cannot be reached from any purview state.  A non-Hermitian product
    from non-commuting blocks is symmetrized with a warning.
    """
    purview = sys._check_qubits(purview, "purview")
    if not purview:
        raise ValidationError("purview must be nonempty")
    if mechanism.qubits:
        _check_mechanism(sys, mechanism)
    key = (_CAUSE, mechanism.qubits, mechanism.state.data.tobytes(), purview)
    if key in sys._memo:
        return sys._memo[key]
    if not mechanism.qubits:
        rep = QuantumRepertoire(
            purview, _maximally_mixed(purview), SetPartition.from_blocks([purview]),
        )
        sys._memo[key] = rep
        return rep

    mech_structure = entanglement_partition(mechanism.state, tol=sys.tol)
    mech_blocks = [
        tuple(mechanism.qubits[i] for i in b) for b in mech_structure.blocks
    ]
    product = np.eye(2 ** len(purview), dtype=complex)
    for positions, qubits in zip(mech_structure.blocks, mech_blocks):
        block_state = (
            mechanism.state if len(qubits) == len(mechanism.qubits)
            else partial_trace(mechanism.state, positions, tol=sys.tol)
        )
        block = QuantumMechanism(qubits, block_state)
        product = product @ conditioned_output(sys, block, purview, _CAUSE).data

    trace = complex(np.trace(product))
    if abs(trace) <= sys.tol:
        sys._memo[key] = None
        return None
    arr = product / trace
    herm = float(np.max(np.abs(arr - arr.conj().T)))
    if herm > sys.tol:
        warnings.warn(
            "cause repertoire blocks do not commute; symmetrizing their product "
            f"(residual {herm:.3e})", stacklevel=2,
        )
        arr = 0.5 * (arr + arr.conj().T)
        arr = arr / np.trace(arr).real
        lo = float(np.min(np.linalg.eigvalsh(arr)))
        if lo < -sys.tol:
            warnings.warn(
                f"symmetrized cause repertoire not PSD (min eigenvalue {lo:.3e}); "
                "clamping negative eigenvalues", stacklevel=2,
            )
            w, v = np.linalg.eigh(arr)
            w = np.clip(w, 0.0, None)
            arr = (v * (w / w.sum())) @ v.conj().T
    rep = QuantumRepertoire(
        purview,
        DensityMatrix(arr, dims=(2,) * len(purview), tol=sys.tol),
        SetPartition.from_blocks([purview]),
        mechanism_partition=SetPartition.from_blocks(mech_blocks),
    )
    sys._memo[key] = rep
    return rep


def _repertoire(sys: QuantumSystem, mechanism: QuantumMechanism,
                purview: tuple[int, ...], direction: Direction
                ) -> Optional[QuantumRepertoire]:
    if direction == _EFFECT:
        return effect_repertoire(sys, mechanism, purview)
    return cause_repertoire(sys, mechanism, purview)


# -- information measures -------------------------------------------------


def quantum_relative_entropy(rho: DensityMatrix, sigma: DensityMatrix,
                             tol: float = DEFAULT_TOL) -> float:
    """tr(rho log2 rho) - tr(rho log2 sigma); +inf outside sigma's support."""
    if rho.dim != sigma.dim:
        raise ValidationError("dimension mismatch between the two states")
    er = hermitian_eig(rho, tol=tol)
    es = hermitian_eig(sigma, tol=tol)
    p = np.clip(er.eigenvalues, 0.0, None)
    q = np.clip(es.eigenvalues, 0.0, None)
    overlap = np.abs(er.eigenvectors.conj().T @ es.eigenvectors) ** 2
    own = float(sum(pi * math.log2(pi) for pi in p if pi > tol))
    cross = 0.0
    for i in range(len(p)):
        if p[i] <= tol:
            continue
        for j in range(len(q)):
            if overlap[i, j] <= tol:
                continue
            if q[j] <= tol:
                return math.inf
            cross += p[i] * overlap[i, j] * math.log2(q[j])
    return own - cross


def fix_global_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate a global phase so the largest amplitude is positive real."""
    idx = int(np.argmax(np.abs(vec)))
    amp = vec[idx]
    if abs(amp) < 1e-12:
        return vec
    return vec * (abs(amp) / amp)


def qid(rho: DensityMatrix, sigma: DensityMatrix, tol: float = DEFAULT_TOL,
        tie_tol: float = DEFAULT_TOL
        ) -> tuple[float, list[tuple[float, np.ndarray]]]:
    """Eigenvector-maximized intrinsic difference between density matrices.

    For each eigenvector |i> of rho with eigenvalue p_i the pointwise score
    is p_i (log2 p_i - sum_j |<i|j>|^2 log2 q_j) over sigma's eigensystem;
    the maximum and all (eigenvalue, eigenvector) pairs within ``tie_tol`` of
    it are returned.  Zero-eigenvalue eigenvectors score 0; a sigma support
    deficiency makes the score +inf.  Coincides with the classical measure on
    commuting pairs and with the relative entropy when rho is pure.
    """
    if rho.dim != sigma.dim:
        raise ValidationError("dimension mismatch between the two states")
    er = hermitian_eig(rho, tol=tol)
    es = hermitian_eig(sigma, tol=tol)
    p = np.clip(er.eigenvalues, 0.0, None)
    q = np.clip(es.eigenvalues, 0.0, None)
    overlap = np.abs(er.eigenvectors.conj().T @ es.eigenvectors) ** 2
    scores = np.zeros(len(p))
    for i in range(len(p)):
        if p[i] <= tol:
            continue
        cross = 0.0
        for j in range(len(q)):
            if overlap[i, j] <= tol:
                continue
            if q[j] <= tol:
                cross = -math.inf
                break
            cross += overlap[i, j] * math.log2(q[j])
        scores[i] = math.inf if math.isinf(cross) else p[i] * (math.log2(p[i]) - cross)
    value = float(np.max(scores))
    if math.isinf(value):
        winners = [i for i in range(len(p)) if math.isinf(scores[i])]
    else:
        winners = [i for i in range(len(p)) if scores[i] >= value - tie_tol]
    states = [(float(p[i]), fix_global_phase(er.eigenvectors[:, i].copy())) for i in winners]
    return value, states


def intrinsic_information(sys: QuantumSystem, mechanism: QuantumMechanism,
                          purview: Iterable[int], direction: Direction,
                          tie_tol: float = DEFAULT_TOL
                          ) -> tuple[float, Optional[list[tuple[float, np.ndarray]]]]:
    """QID of the constrained repertoire against the maximally mixed state.

    The unconstrained repertoire is maximally mixed in both directions under
    unitary dynamics, so the intrinsic state is the repertoire eigenvector
    with maximal eigenvalue (the full eigenspace when degenerate).  Returns
    (0, None) for an empty cause repertoire.
    """
    purview = sys._check_qubits(purview, "purview")
    rep = _repertoire(sys, mechanism, purview, direction)
    if rep is None:
        return 0.0, None
    return qid(rep.rho, _maximally_mixed(purview), tol=sys.tol, tie_tol=tie_tol)


# -- partitioned repertoires and phi --------------------------------------


def partitioned_repertoire(sys: QuantumSystem, mechanism: QuantumMechanism,
                           purview: Iterable[int], theta: DisintegratingPartition,
                           direction: Direction) -> Optional[DensityMatrix]:
    """Tensor product over the partition's parts of their repertoires.

    Each part takes the mechanism's reduction to its own qubits; an empty
    mechanism part contributes the maximally mixed state on its purview part,
    an empty purview part contributes nothing.  The partition acts on top of
    the entanglement structure, so entanglement it destroys will register as
    irreducibility.  Returns None if a part's cause repertoire is empty.
    """
    purview = sys._check_qubits(purview, "purview")
    factors: list[tuple[tuple[int, ...], DensityMatrix]] = []
    for m_part, z_part in theta.parts:
        if not z_part:
            continue
        if not m_part:
            factors.append((z_part, _maximally_mixed(z_part)))
            continue
        positions = [mechanism.qubits.index(q) for q in m_part]
        sub_state = (
            mechanism.state if len(m_part) == len(mechanism.qubits)
            else partial_trace(mechanism.state, positions, tol=sys.tol)
        )
        sub = QuantumMechanism(m_part, sub_state)
        rep = _repertoire(sys, sub, z_part, direction)
        if rep is None:
            return None
        factors.append((z_part, rep.rho))
    return _assemble(purview, factors, sys.tol)


def phi(sys: QuantumSystem, mechanism: QuantumMechanism, purview: Iterable[int],
        theta: DisintegratingPartition, direction: Direction,
        eigenstates: Optional[Sequence[tuple[float, np.ndarray]]] = None,
        tie_tol: float = DEFAULT_TOL) -> float:
    """QID score at the intrinsic eigenstate against the partitioned repertoire.

    With a degenerate intrinsic eigenspace the score is evaluated per basis
    vector and the maximum kept.  +inf when the partitioned repertoire lacks
    support on the intrinsic state (or a part's cause repertoire is empty).
    """
    purview = sys._check_qubits(purview, "purview")
    if eigenstates is None:
        _, eigenstates = intrinsic_information(sys, mechanism, purview, direction, tie_tol)
    if eigenstates is None:
        return 0.0
    part = partitioned_repertoire(sys, mechanism, purview, theta, direction)
    if part is None:
        return math.inf
    es = hermitian_eig(part.data, tol=sys.tol)
    q = np.clip(es.eigenvalues, 0.0, None)
    best = 0.0
    for p_i, vec in eigenstates:
        if p_i <= sys.tol:
            continue
        overlap = np.abs(vec.conj() @ es.eigenvectors) ** 2
        cross = 0.0
        for j in range(len(q)):
            if overlap[j] <= sys.tol:
                continue
            if q[j] <= sys.tol:
                cross = -math.inf
                break
            cross += overlap[j] * math.log2(q[j])
        val = math.inf if math.isinf(cross) else p_i * (math.log2(p_i) - cross)
        best = max(best, val)
    return best


def mip(sys: QuantumSystem, mechanism: QuantumMechanism, purview: Iterable[int],
        direction: Direction, tie_tol: float = DEFAULT_TOL
        ) -> tuple[DisintegratingPartition, float]:
    """Minimum partition by severed-pair-normalized phi; unnormalized phi returned.

    Normalized ties go to the smaller unnormalized phi, then to canonical
    enumeration order.
    """
    purview = sys._check_qubits(purview, "purview")
    thetas = enumerate_disintegrating(mechanism.qubits, purview)
    _, eigenstates = intrinsic_information(sys, mechanism, purview, direction, tie_tol)
    if eigenstates is None:
        return thetas[0], 0.0
    best_key = None
    best: tuple[DisintegratingPartition, float] = (thetas[0], math.inf)
    for idx, theta in enumerate(thetas):
        value = phi(sys, mechanism, purview, theta, direction, eigenstates, tie_tol)
        norm = normalization(theta, mechanism.qubits, purview)
        key = (value / norm, value, idx)
        if best_key is None or key < best_key:
            best_key = key
            best = (theta, value)
    return best


def phi_max(sys: QuantumSystem, mechanism: QuantumMechanism, direction: Direction,
            tie_tol: float = DEFAULT_TOL,
            degeneracy_tol: float = DEFAULT_DEGENERACY_TOL
            ) -> Optional[QuantumDistinction]:
    """Maximally irreducible purview for a mechanism, or None if fully reducible.

    Purview ties within ``tie_tol`` resolve toward more qubits; remaining
    candidates are recorded.  The intrinsic state keeps every eigenvector
    whose phi at the minimum partition ties the maximum, reported as an
    eigensubspace when they share a degenerate eigenvalue.
    """
    qubits = _check_mechanism(sys, mechanism)
    if not qubits:
        raise ValidationError("mechanism must be nonempty")

    per_purview: dict[tuple[int, ...], tuple[DisintegratingPartition, float]] = {}
    for purview in _all_subsets(sys.qubit_range()):
        per_purview[purview] = mip(sys, mechanism, purview, direction, tie_tol)

    best_phi = max(v for _, v in per_purview.values())
    if not best_phi > tie_tol:
        return None
    tied = [z for z, (_, v) in per_purview.items() if v >= best_phi - tie_tol]
    tied.sort(key=lambda z: (-len(z), z))
    selected, others = tied[0], tuple(tied[1:])
    theta, value = per_purview[selected]

    _, eigenstates = intrinsic_information(sys, mechanism, selected, direction, tie_tol)
    scored = [
        (phi(sys, mechanism, selected, theta, direction, [cand], tie_tol), cand)
        for cand in eigenstates
    ]
    top = max(v for v, _ in scored)
    winners = [cand for v, cand in scored if v >= top - tie_tol]
    eigenvalues = tuple(p for p, _ in winners)
    vectors = tuple(vec for _, vec in winners)
    degenerate = len(winners) > 1 and (
        max(eigenvalues) - min(eigenvalues) <= degeneracy_tol
    )
    return QuantumDistinction(
        mechanism_qubits=qubits,
        mechanism_state=mechanism.state,
        direction=direction,
        purview=selected,
        intrinsic_state=IntrinsicState(
            "subspace" if degenerate else "state", eigenvalues, vectors
        ),
        phi=max(value, 0.0),
        mip=theta,
        normalization=normalization(theta, qubits, selected),
        tied_purviews=others,
    )


def unfold(sys: QuantumSystem, rho_t: DensityMatrix,
           directions: Sequence[Direction] = (_EFFECT, _CAUSE),
           mechanisms: Optional[Sequence[Sequence[int]]] = None,
           tie_tol: float = DEFAULT_TOL) -> list[QuantumDistinction]:
    """All distinctions of a system state: phi_max per mechanism subset.

    Effect mechanisms are reductions of ``rho_t``; cause mechanisms are
    reductions of its image under the unitary.  Subsets with phi = 0 are
    omitted.
    """
    if len(rho_t.dims) != sys.n_qubits or any(d != 2 for d in rho_t.dims):
        raise ValidationError("system state does not match the qubit count")
    subsets = (
        [sys._check_qubits(m, "mechanism") for m in mechanisms]
        if mechanisms is not None else _all_subsets(sys.qubit_range())
    )
    out: list[QuantumDistinction] = []
    for direction in directions:
        base = rho_t if direction == _EFFECT else apply_unitary(sys.unitary, rho_t, sys.tol)
        for qubits in subsets:
            mech = sys.mechanism(qubits, base)
            d = phi_max(sys, mech, direction, tie_tol)
            if d is not None:
                out.append(d)
    out.sort(key=lambda d: (d.direction == _CAUSE, d.order, d.mechanism_qubits))
    return out


def identity_structure(state: DensityMatrix, tol: float = DEFAULT_TOL,
                       tie_tol: float = DEFAULT_TOL) -> list[QuantumDistinction]:
    """Self-constraint structure of a state under identity dynamics.

    With the unitary fixed to the identity, causes and effects coincide, so
    the effect-side distinctions are returned once each: what every subset of
    the state irreducibly constrains about the state itself.
    """
    n = len(state.dims)
    sys = QuantumSystem(np.eye(2**n), tol=tol)
    return unfold(sys, state, directions=(_EFFECT,), tie_tol=tie_tol)


def _all_subsets(qubits: Sequence[int]) -> list[tuple[int, ...]]:
    out = []
    for size in range(1, len(qubits) + 1):
        out.extend(combinations(qubits, size))
    return out
