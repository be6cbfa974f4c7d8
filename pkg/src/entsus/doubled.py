"""Two copies of the system, the A-factor swap, and the purity identity.

Tr rho_A^2 equals the expectation, on two copies of the ground state, of
the operator swapping the two A factors; it also equals the overlap between
the ground states of H2 = H x 1 + 1 x H and its swap-conjugate.  Both
identities are verified here by independent computation.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, InputError, NumericalConsistencyError
from .lattice import Bipartition, HamiltonianSpec, assemble, assemble_sparse, classify_terms
from .solver import ground_state, partial_trace_b, renyi2

#: default cap on the doubled (two-copy) Hilbert dimension
DOUBLED_DIMENSION_CAP = 2**12


def swap_permutation(dim_a: int, dim_b: int) -> np.ndarray:
    """Index permutation swapping the two A factors: (a1,b1,a2,b2) -> (a2,b1,a1,b2)."""
    idx = np.arange(dim_a * dim_b * dim_a * dim_b)
    a1, rest = np.divmod(idx, dim_b * dim_a * dim_b)
    b1, rest = np.divmod(rest, dim_a * dim_b)
    a2, b2 = np.divmod(rest, dim_b)
    return ((a2 * dim_b + b1) * dim_a + a1) * dim_b + b2


def swap_matrix(dim_a: int, dim_b: int) -> sp.csr_matrix:
    """The A-factor swap as an explicit sparse permutation matrix."""
    dim = dim_a * dim_b * dim_a * dim_b
    perm = swap_permutation(dim_a, dim_b)
    return sp.csr_matrix((np.ones(dim), (perm, np.arange(dim))), shape=(dim, dim))


@dataclass(frozen=True)
class DoubledSystem:
    """H2(lambda), the A-factor swap S, and the twisted boundary Hb2 - S Hb2 S."""

    hamiltonian: sp.csr_matrix
    swap: sp.csr_matrix
    twisted_boundary: sp.csr_matrix
    dim_a: int
    dim_b: int

    def __post_init__(self):
        s = self.swap
        dim = s.shape[0]
        if (s @ s - sp.identity(dim, format="csr")).count_nonzero():
            raise NumericalConsistencyError("swap operator does not square to the identity")
        counts = np.asarray((s != 0).sum(axis=0)).ravel()
        if not np.all(counts == 1) or s.nnz != dim:
            raise NumericalConsistencyError("swap operator is not a permutation matrix")
        v = self.twisted_boundary
        if abs(v - v.conj().T).max() > 1e-12:
            raise NumericalConsistencyError("twisted boundary operator is not Hermitian")


def build_doubled(spec: HamiltonianSpec, lam: float, cap: int = DOUBLED_DIMENSION_CAP) -> DoubledSystem:
    spec = spec if spec.tags else classify_terms(spec)
    dim = spec.total_dim
    if dim * dim > cap:
        raise CapacityError(f"doubled dimension {dim * dim} exceeds cap {cap}")
    h = assemble_sparse(spec, "full", lam)
    hb = assemble_sparse(spec, "boundary")
    eye = sp.identity(dim, dtype=complex, format="csr")
    h2 = sp.kron(h, eye, format="csr") + sp.kron(eye, h, format="csr")
    hb2 = sp.kron(hb, eye, format="csr") + sp.kron(eye, hb, format="csr")
    s = swap_matrix(spec.dim_a, spec.dim_b)
    twisted = (hb2 - s @ hb2 @ s).tocsr()
    return DoubledSystem(hamiltonian=h2, swap=s, twisted_boundary=twisted, dim_a=spec.dim_a, dim_b=spec.dim_b)


def swap_purity(
    state: np.ndarray,
    bipartition: Bipartition,
    local_dim: int = 2,
    cap: int = DOUBLED_DIMENSION_CAP,
) -> float:
    """Swap expectation <psi x psi| S |psi x psi>, evaluated by axis transposition."""
    state = np.asarray(state, dtype=complex).ravel()
    dim_a = local_dim**bipartition.size_a
    dim_b = local_dim**bipartition.size_b
    if state.size != dim_a * dim_b:
        raise InputError("state dimension does not match bipartition")
    if state.size**2 > cap:
        raise CapacityError(f"doubled dimension {state.size ** 2} exceeds cap {cap}")
    double = np.kron(state, state).reshape(dim_a, dim_b, dim_a, dim_b)
    swapped = double.transpose(2, 1, 0, 3).ravel()
    val = np.vdot(np.kron(state, state), swapped)
    if abs(val.imag) > 1e-12:
        raise NumericalConsistencyError(f"swap expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def twisted_ground_overlap(
    spec: HamiltonianSpec,
    lam: float,
    cap: int = DOUBLED_DIMENSION_CAP,
) -> tuple[float, float]:
    """(|<GS(H2)|GS(S H2 S)>|, Tr rho_A^2); raises if they differ beyond 1e-9.

    The two doubled ground states are computed independently with the
    iterative solver; the purity comes from the dense single-copy ground
    state.  The returned overlap magnitude is phase-invariant.
    """
    spec = spec if spec.tags else classify_terms(spec)
    system = build_doubled(spec, lam, cap=cap)
    g1 = ground_state(system.hamiltonian, method="iterative")
    perm = swap_permutation(spec.dim_a, spec.dim_b)
    twisted_h = system.hamiltonian[perm][:, perm]
    g2 = ground_state(twisted_h, method="iterative")

    gs = ground_state(assemble(spec, "full", lam))
    purity = renyi2(partial_trace_b(gs.vector, spec.bipartition, spec.lattice.local_dim))[0]

    val = abs(np.vdot(g1.vector, g2.vector))
    if abs(val - purity) > 1e-9:
        raise NumericalConsistencyError(
            f"twisted overlap {val:.12e} disagrees with purity {purity:.12e}"
        )
    return float(val), float(purity)
