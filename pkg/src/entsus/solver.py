"""Hermitian eigenproblems, partial traces, Renyi-2 entropy, and overlaps."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DegenerateGroundStateError, InputError, NumericalConsistencyError
from .lattice import Bipartition, DenseHermitianOperator

#: relative ground-state degeneracy tolerance (times ||H||)
DEGENERACY_REL_TOL = 1e-10
#: fixed seed for the iterative solver's starting vector (determinism)
_ITERATIVE_V0_SEED = 0x5EED


@dataclass(frozen=True)
class Spectrum:
    """Full spectrum of a Hermitian operator, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def gap(self) -> float:
        if len(self.eigenvalues) < 2:
            return float("inf")
        return float(self.eigenvalues[1] - self.eigenvalues[0])

    def ground_vector(self) -> np.ndarray:
        if self.eigenvectors is None:
            raise InputError("spectrum was computed without eigenvectors")
        return self.eigenvectors[:, 0]


@dataclass(frozen=True)
class GroundState:
    energy: float
    vector: np.ndarray
    gap: float


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix: Hermitian, PSD (>= -1e-10), unit trace (1e-10)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError("density matrix must be square")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise InputError("density matrix not Hermitian within 1e-10")
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise InputError("density matrix trace differs from 1 beyond 1e-10")
        if np.linalg.eigvalsh(m)[0] < -1e-10:
            raise InputError("density matrix has eigenvalue below -1e-10")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def _as_matrix(op) -> np.ndarray:
    if isinstance(op, DenseHermitianOperator):
        return op.matrix
    m = np.asarray(op)
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError("operator must be a square matrix")
    if scale and np.max(np.abs(m - m.conj().T)) > 1e-10 * scale:
        raise InputError("operator is not Hermitian within 1e-10 (relative)")
    return m


def full_spectrum(op) -> Spectrum:
    """Dense eigendecomposition; eigenvalues ascending, orthonormal eigenvectors."""
    m = _as_matrix(op)
    vals, vecs = np.linalg.eigh(m)
    return Spectrum(eigenvalues=vals, eigenvectors=vecs)


def ground_state(
    op,
    method: str = "dense",
    degeneracy_tol: float | None = None,
    tol: float = 0.0,
    maxiter: int | None = None,
) -> GroundState:
    """Lowest eigenpair plus gap estimate (two lowest eigenpairs are solved).

    dense: accepts a DenseHermitianOperator or ndarray.  iterative: accepts
    additionally a scipy sparse matrix or a LinearOperator wrapping a
    matrix-free apply; `tol` and `maxiter` tune the Lanczos iteration (the
    defaults converge to machine precision).  Raises
    DegenerateGroundStateError when the gap falls below the degeneracy
    tolerance (default 1e-10 * ||H||).
    """
    if method == "dense":
        spec = full_spectrum(op)
        e = spec.eigenvalues
        norm = max(abs(e[0]), abs(e[-1]))
        dtol = degeneracy_tol if degeneracy_tol is not None else DEGENERACY_REL_TOL * norm
        if len(e) > 1 and spec.gap < dtol:
            raise DegenerateGroundStateError(f"gap {spec.gap:.3e} below tolerance {dtol:.3e}")
        return GroundState(energy=spec.ground_energy, vector=spec.eigenvectors[:, 0], gap=spec.gap)
    if method != "iterative":
        raise InputError(f"unknown method {method!r}")

    if isinstance(op, DenseHermitianOperator):
        op = op.matrix
    dim = op.shape[0]
    if dim <= 4:
        dense = op.toarray() if sp.issparse(op) else np.asarray(op)
        return ground_state(dense, method="dense", degeneracy_tol=degeneracy_tol)
    rng = np.random.default_rng(_ITERATIVE_V0_SEED)
    v0 = rng.standard_normal(dim)
    vals, vecs = spla.eigsh(op, k=2, which="SA", v0=v0, tol=tol, maxiter=maxiter)
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    gap = float(vals[1] - vals[0])
    norm = float(max(abs(vals[0]), abs(vals[1])))
    dtol = degeneracy_tol if degeneracy_tol is not None else DEGENERACY_REL_TOL * norm
    if gap < dtol:
        raise DegenerateGroundStateError(f"gap {gap:.3e} below tolerance {dtol:.3e}")
    return GroundState(energy=float(vals[0]), vector=vecs[:, 0], gap=gap)


def partial_trace_b(state: np.ndarray, bipartition: Bipartition, local_dim: int = 2) -> DensityMatrix:
    """rho_A of a pure state given in the A-major site ordering."""
    state = np.asarray(state, dtype=complex).ravel()
    dim_a = local_dim**bipartition.size_a
    dim_b = local_dim**bipartition.size_b
    if state.size != dim_a * dim_b:
        raise InputError(f"state dimension {state.size} != {dim_a}*{dim_b}")
    if abs(np.linalg.norm(state) - 1.0) > 1e-12:
        raise InputError("state is not normalized to 1e-12")
    m = state.reshape(dim_a, dim_b)
    return DensityMatrix(matrix=m @ m.conj().T)


def renyi2(rho: DensityMatrix) -> tuple[float, float]:
    """(purity, S2) with S2 = -ln Tr rho^2 (natural log)."""
    m = rho.matrix
    purity = float(np.vdot(m, m).real)  # Frobenius norm^2 = Tr rho^2 for Hermitian rho
    if purity <= 0.0 or purity > 1.0 + 1e-10:
        raise NumericalConsistencyError(f"purity {purity} outside (0, 1]")
    purity = min(purity, 1.0)
    return purity, float(-np.log(purity))


def overlap(psi1: np.ndarray, psi2: np.ndarray) -> float:
    """|<psi1|psi2>| for normalized vectors."""
    psi1 = np.asarray(psi1).ravel()
    psi2 = np.asarray(psi2).ravel()
    if psi1.size != psi2.size:
        raise InputError("state dimensions differ")
    for p in (psi1, psi2):
        if abs(np.linalg.norm(p) - 1.0) > 1e-10:
            raise InputError("states must be normalized")
    val = abs(np.vdot(psi1, psi2))
    if val > 1.0 + 1e-12:
        raise NumericalConsistencyError(f"overlap {val} exceeds 1")
    return float(min(val, 1.0))
