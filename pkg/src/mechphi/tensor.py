"""Dense complex-matrix substrate: density matrices, unitaries, tensor algebra.

Everything here targets small dense systems (a handful of qubits), so the
implementation favors strict validation and clarity over scale.  Basis
convention throughout the package: subsystem 0 is the most significant digit
of a computational-basis index (big-endian), which is what ``numpy.kron``
produces when factors are combined in ascending subsystem order.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericError, ValidationError

#: Default numeric tolerance for Hermiticity / trace / positivity checks.
DEFAULT_TOL = 1e-9

#: Default tolerance below which two eigenvalues count as degenerate.
DEFAULT_DEGENERACY_TOL = 1e-9


def _as_matrix(m) -> np.ndarray:
    data = m.data if isinstance(m, (DensityMatrix, UnitaryOperator)) else m
    arr = np.asarray(data, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def _infer_qubit_dims(dim: int) -> tuple[int, ...]:
    n = max(dim, 1).bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise ValidationError(
            f"dimension {dim} is not a power of two; pass subsystem dims explicitly"
        )
    return (2,) * n


def _check_dims(dims: Sequence[int] | None, dim: int) -> tuple[int, ...]:
    if dims is None:
        return _infer_qubit_dims(dim)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValidationError(f"subsystem dims must be positive, got {dims}")
    if int(np.prod(dims, dtype=np.int64)) != dim:
        raise ValidationError(f"dims {dims} do not multiply to matrix dimension {dim}")
    return dims


class DensityMatrix:
    """A validated density matrix with an explicit subsystem factorization.

    Hermiticity, unit trace and positive semidefiniteness are enforced at
    construction (within ``tol``); instances are immutable and safe to share.
    """

    __slots__ = ("data", "dims")

    def __init__(self, data, dims: Sequence[int] | None = None, tol: float = DEFAULT_TOL):
        arr = _as_matrix(data)
        if not np.all(np.isfinite(arr)):
            raise ValidationError("density matrix contains non-finite entries")
        dims = _check_dims(dims, arr.shape[0])
        herm = float(np.max(np.abs(arr - arr.conj().T)))
        if herm > tol:
            raise ValidationError(
                f"not Hermitian: max |rho - rho^dag| = {herm:.3e} exceeds tol {tol:.1e}"
            )
        tr = complex(np.trace(arr))
        if abs(tr - 1.0) > tol:
            raise ValidationError(f"trace is {tr:.12g}, expected 1 within tol {tol:.1e}")
        lo = float(np.min(np.linalg.eigvalsh(0.5 * (arr + arr.conj().T))))
        if lo < -tol:
            raise ValidationError(
                f"not positive semidefinite: min eigenvalue {lo:.3e} below -tol"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "dims", dims)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("DensityMatrix is immutable")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    @classmethod
    def from_pure(cls, amplitudes, dims: Sequence[int] | None = None,
                  tol: float = DEFAULT_TOL) -> "DensityMatrix":
        """Build |psi><psi| from a state vector (normalized on the way in)."""
        psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = float(np.linalg.norm(psi))
        if norm < 1e-12:
            raise ValidationError("state vector has (near-)zero norm")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()), dims=dims, tol=tol)

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int] | int) -> "DensityMatrix":
        dims = (2,) * dims if isinstance(dims, int) else tuple(int(d) for d in dims)
        dim = int(np.prod(dims, dtype=np.int64))
        return cls(np.eye(dim) / dim, dims=dims)

    def purity(self) -> float:
        return purity(self)

    def is_pure(self, tol: float = DEFAULT_TOL) -> bool:
        return abs(self.purity() - 1.0) <= tol

    def reduced(self, keep: Iterable[int], tol: float = DEFAULT_TOL) -> "DensityMatrix":
        return partial_trace(self, keep, tol=tol)

    def allclose(self, other, tol: float = 1e-8) -> bool:
        return bool(np.allclose(self.data, _as_matrix(other), atol=tol))

    def __repr__(self) -> str:
        return f"DensityMatrix(dims={self.dims}, purity={self.purity():.6g})"


class UnitaryOperator:
    """A validated unitary with an explicit subsystem factorization."""

    __slots__ = ("data", "dims")

    def __init__(self, data, dims: Sequence[int] | None = None, tol: float = DEFAULT_TOL):
        arr = _as_matrix(data)
        if not np.all(np.isfinite(arr)):
            raise ValidationError("unitary contains non-finite entries")
        dims = _check_dims(dims, arr.shape[0])
        resid = float(np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[0]))))
        if resid > tol:
            raise ValidationError(
                f"not unitary: max |U^dag U - I| = {resid:.3e} exceeds tol {tol:.1e}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "dims", dims)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("UnitaryOperator is immutable")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __repr__(self) -> str:
        return f"UnitaryOperator(dims={self.dims})"


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order, matching orthonormal column vectors.

    ``groups`` clusters indices whose eigenvalues differ by at most the
    degeneracy tolerance used at construction.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    groups: tuple[tuple[int, ...], ...]

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product; subsystem dims compose multiplicatively."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _canon_subsystems(subsystems: Iterable[int] | int, n: int, what: str) -> tuple[int, ...]:
    if isinstance(subsystems, (int, np.integer)):
        subsystems = (int(subsystems),)
    out = tuple(sorted({int(s) for s in subsystems}))
    if any(s < 0 or s >= n for s in out):
        raise ValidationError(f"{what} {out} out of range for {n} subsystems")
    return out


def _partial_trace_arr(arr: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    n = len(dims)
    t = arr.reshape(tuple(dims) * 2)
    letters = string.ascii_lowercase
    row = [letters[i] for i in range(n)]
    col = [letters[n + i] if i in keep else row[i] for i in range(n)]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    dk = int(np.prod([dims[i] for i in keep], dtype=np.int64))
    return np.einsum("".join(row) + "".join(col) + "->" + out, t).reshape(dk, dk)


def partial_trace(rho: DensityMatrix, keep: Iterable[int],
                  tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Reduced density matrix on ``keep`` (ascending original subsystem order)."""
    keep = _canon_subsystems(keep, rho.n_subsystems, "keep set")
    if not keep:
        raise ValidationError("partial_trace: keep set must be nonempty")
    arr = _partial_trace_arr(rho.data, rho.dims, keep)
    return DensityMatrix(arr, dims=[rho.dims[i] for i in keep], tol=tol)


def partial_transpose(rho: DensityMatrix, subsystems: Iterable[int] | int) -> np.ndarray:
    """Transpose the named subsystems' indices only; Hermiticity is preserved."""
    subs = _canon_subsystems(subsystems, rho.n_subsystems, "subsystem")
    n = rho.n_subsystems
    t = rho.data.reshape(tuple(rho.dims) * 2)
    axes = list(range(2 * n))
    for s in subs:
        axes[s], axes[n + s] = axes[n + s], axes[s]
    return np.ascontiguousarray(t.transpose(axes).reshape(rho.dim, rho.dim))


def hermitian_eig(rho, tol: float = DEFAULT_TOL,
                  degeneracy_tol: float = DEFAULT_DEGENERACY_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    arr = _as_matrix(rho)
    herm = float(np.max(np.abs(arr - arr.conj().T)))
    if herm > tol:
        raise NumericError(
            f"hermitian_eig: input not Hermitian (residual {herm:.3e} > tol {tol:.1e})"
        )
    w, v = np.linalg.eigh(0.5 * (arr + arr.conj().T))
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    groups: list[tuple[int, ...]] = []
    current = [0]
    for i in range(1, len(w)):
        if w[i - 1] - w[i] <= degeneracy_tol:
            current.append(i)
        else:
            groups.append(tuple(current))
            current = [i]
    if len(w):
        groups.append(tuple(current))
    w = w.copy()
    w.setflags(write=False)
    v = np.ascontiguousarray(v)
    v.setflags(write=False)
    return EigenDecomposition(w, v, tuple(groups))


def purity(rho) -> float:
    """trace(rho^2); equals 1 for pure states, 1/dim for maximally mixed."""
    arr = _as_matrix(rho)
    return float(np.sum(np.abs(arr) ** 2).real)


def apply_unitary(u: UnitaryOperator, rho: DensityMatrix,
                  tol: float = DEFAULT_TOL) -> DensityMatrix:
    """U rho U^dag; trace and spectrum are preserved."""
    if u.dim != rho.dim:
        raise ValidationError(f"dimension mismatch: unitary {u.dim} vs state {rho.dim}")
    return DensityMatrix(u.data @ rho.data @ u.data.conj().T, dims=rho.dims, tol=tol)


def apply_unitary_adjoint(u: UnitaryOperator, rho: DensityMatrix,
                          tol: float = DEFAULT_TOL) -> DensityMatrix:
    """U^dag rho U, the inverse evolution for unitary dynamics."""
    if u.dim != rho.dim:
        raise ValidationError(f"dimension mismatch: unitary {u.dim} vs state {rho.dim}")
    return DensityMatrix(u.data.conj().T @ rho.data @ u.data, dims=rho.dims, tol=tol)


def permute_subsystems(arr: np.ndarray, dims: Sequence[int],
                       order: Sequence[int]) -> np.ndarray:
    """Reorder a matrix whose subsystem at axis position k is ``order[k]``.

    ``dims[q]`` is the dimension of the subsystem labeled q; the result has
    subsystems in ascending label order 0..n-1.
    """
    n = len(dims)
    order = [int(q) for q in order]
    if sorted(order) != list(range(n)):
        raise ValidationError(f"order {order} is not a permutation of 0..{n - 1}")
    pos = {q: k for k, q in enumerate(order)}
    cur_dims = tuple(dims[q] for q in order)
    t = np.asarray(arr, dtype=complex).reshape(cur_dims * 2)
    perm = [pos[q] for q in range(n)] + [n + pos[q] for q in range(n)]
    dim = int(np.prod(dims, dtype=np.int64))
    return np.ascontiguousarray(t.transpose(perm).reshape(dim, dim))
