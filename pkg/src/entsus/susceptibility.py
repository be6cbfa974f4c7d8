"""Entanglement and fidelity susceptibility with their bound chain.

chi_E is the coefficient in S2(lambda) = 2 lambda^2 chi_E + O(lambda^3) for
the decoupled family H(lambda); chi_F the analogous fidelity coefficient.
Both are second-order perturbation-theory sums over the product eigenbasis
of H(0), evaluated by applying the boundary operator once to the product
ground state and rotating into the factor eigenbases (never materializing
the full matrix-element table).
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, DegenerateGroundStateError, GaplessError, InputError
from .extrapolate import Extrapolation, richardson
from .lattice import (
    DENSE_DIMENSION_CAP,
    DenseHermitianOperator,
    HamiltonianSpec,
    assemble,
    assemble_sparse,
    classify_terms,
)
from .solver import (
    DEGENERACY_REL_TOL,
    DensityMatrix,
    Spectrum,
    full_spectrum,
    ground_state,
    overlap,
    partial_trace_b,
    renyi2,
)

DEFAULT_FD_LAMBDAS = (1e-2, 5e-3, 2.5e-3)


def _classified(spec: HamiltonianSpec) -> HamiltonianSpec:
    return spec if spec.tags else classify_terms(spec)


def factor_operator(spec: HamiltonianSpec, part: str) -> DenseHermitianOperator:
    """H_A (or H_B) embedded on its own factor space only."""
    spec = _classified(spec)
    region = spec.bipartition.region_a if part == "A" else spec.bipartition.region_b
    d = spec.lattice.local_dim
    dim = d ** len(region)
    if dim > DENSE_DIMENSION_CAP:
        raise CapacityError(f"factor dimension {dim} exceeds dense cap")
    pos = {s: i for i, s in enumerate(region)}
    acc = sp.csr_matrix((dim, dim), dtype=complex)
    for term in spec.terms_for(part):
        placed = {pos[s]: f for s, f in zip(term.support, term.factors)}
        ops = []
        gap = 0
        for i in range(len(region)):
            if i in placed:
                if gap:
                    ops.append(sp.identity(d**gap, dtype=complex, format="csr"))
                    gap = 0
                ops.append(sp.csr_matrix(placed[i]))
            else:
                gap += 1
        if gap:
            ops.append(sp.identity(d**gap, dtype=complex, format="csr"))
        acc = acc + term.coefficient * reduce(lambda a, b: sp.kron(a, b, format="csr"), ops)
    return DenseHermitianOperator(matrix=acc.toarray())


def factor_spectra(spec: HamiltonianSpec) -> tuple[Spectrum, Spectrum]:
    return full_spectrum(factor_operator(spec, "A")), full_spectrum(factor_operator(spec, "B"))


def _require_nondegenerate(s: Spectrum, label: str):
    e = s.eigenvalues
    scale = max(abs(float(e[0])), abs(float(e[-1])), 1e-300)
    if len(e) > 1 and s.gap < DEGENERACY_REL_TOL * scale:
        raise DegenerateGroundStateError(f"{label} ground state degenerate (gap {s.gap:.3e})")


def product_ground_state(spec: HamiltonianSpec) -> tuple[float, np.ndarray]:
    """(E0, |0_A 0_B>) of the decoupled Hamiltonian, in the A-major ordering."""
    sa, sb = factor_spectra(spec)
    _require_nondegenerate(sa, "H_A")
    _require_nondegenerate(sb, "H_B")
    psi = np.kron(sa.ground_vector(), sb.ground_vector())
    return sa.ground_energy + sb.ground_energy, psi


@dataclass(frozen=True)
class PerturbationAmplitudes:
    """First-order amplitudes C(p_A, p_B) over the product eigenbasis.

    The reference pair (the ground state unless an excited product eigenstate
    is requested) is excluded: its c entry is 0 and its denominator +inf, so
    every stored finite denominator is nonzero (and positive for the ground
    reference).
    """

    spectrum_a: Spectrum
    spectrum_b: Spectrum
    c: np.ndarray
    denominators: np.ndarray
    ground_energy: float
    reference: tuple[int, int] = (0, 0)

    @property
    def unperturbed_gap(self) -> float:
        return min(self.spectrum_a.gap, self.spectrum_b.gap)


def _require_separated_level(s: Spectrum, level: int, label: str):
    e = s.eigenvalues
    scale = max(abs(float(e[0])), abs(float(e[-1])), 1e-300)
    tol = DEGENERACY_REL_TOL * scale
    for neighbour in (level - 1, level + 1):
        if 0 <= neighbour < len(e) and abs(e[level] - e[neighbour]) < tol:
            raise DegenerateGroundStateError(f"{label} level {level} is degenerate")


def perturbation_amplitudes(
    spec: HamiltonianSpec, reference: tuple[int, int] = (0, 0)
) -> PerturbationAmplitudes:
    """Apply H_boundary once to the reference product state and rotate.

    The rotation into the product eigenbasis (U_A^dag x U_B^dag) gives every
    matrix element of the boundary operator with one application.  Excited
    references are allowed when the chosen factor levels are non-degenerate
    and no other product level collides with the reference energy.
    """
    spec = _classified(spec)
    sa, sb = factor_spectra(spec)
    pa, pb = reference
    _require_separated_level(sa, pa, "H_A")
    _require_separated_level(sb, pb, "H_B")
    psi_ref = np.kron(sa.eigenvectors[:, pa], sb.eigenvectors[:, pb])
    e_ref = float(sa.eigenvalues[pa] + sb.eigenvalues[pb])

    w = assemble_sparse(spec, "boundary") @ psi_ref
    m = sa.eigenvectors.conj().T @ w.reshape(spec.dim_a, spec.dim_b) @ sb.eigenvectors.conj()
    den = sa.eigenvalues[:, None] + sb.eigenvalues[None, :] - e_ref
    den[pa, pb] = np.inf
    scale = max(abs(float(sa.eigenvalues[0])) + abs(float(sb.eigenvalues[0])), 1.0)
    finite = np.abs(den[np.isfinite(den)])
    if finite.size and np.min(finite) < DEGENERACY_REL_TOL * scale:
        raise DegenerateGroundStateError("reference product state is not energetically separated")
    c = m / den
    return PerturbationAmplitudes(
        spectrum_a=sa, spectrum_b=sb, c=c, denominators=den, ground_energy=e_ref, reference=(pa, pb)
    )


def chi_e(amps: PerturbationAmplitudes) -> float:
    """Sum of |C|^2 over pairs excited in both factors relative to the reference."""
    pa, pb = amps.reference
    keep_a = np.arange(amps.c.shape[0]) != pa
    keep_b = np.arange(amps.c.shape[1]) != pb
    return float(np.sum(np.abs(amps.c[np.ix_(keep_a, keep_b)]) ** 2))


def chi_f(amps: PerturbationAmplitudes) -> float:
    """Sum of |C|^2 over all pairs except the reference; includes mixed sectors."""
    return float(np.sum(np.abs(amps.c) ** 2))


def s2_at(spec: HamiltonianSpec, lam: float, method: str = "dense") -> float:
    """Renyi-2 entropy of region A in the ground state of H(lambda)."""
    spec = _classified(spec)
    if method == "dense":
        gs = ground_state(assemble(spec, "full", lam))
    else:
        gs = ground_state(assemble_sparse(spec, "full", lam), method="iterative")
    rho = partial_trace_b(gs.vector, spec.bipartition, spec.lattice.local_dim)
    return renyi2(rho)[1]


def chi_e_fd(
    spec: HamiltonianSpec,
    lam_list=DEFAULT_FD_LAMBDAS,
    method: str = "dense",
) -> Extrapolation:
    """Finite-difference estimate of chi_E: Richardson limit of S2/(2 lambda^2).

    lam_list must be a descending halving sequence.  A non-monotone
    extrapolation tail is reported through the `monotone` flag, not raised.
    """
    lams = [float(x) for x in lam_list]
    if len(lams) < 2:
        raise InputError("need at least two lambda steps")
    for a, b in zip(lams, lams[1:]):
        if abs(a / b - 2.0) > 1e-9:
            raise InputError("lambda steps must halve")
    samples = [s2_at(spec, lam, method=method) / (2.0 * lam**2) for lam in lams]
    return richardson(samples, leading_order=1, order_step=1)


def correlator_bound(spec: HamiltonianSpec) -> float:
    """Connected-correlator bound: <H_b^2>_c / gap^2 in the decoupled ground state."""
    spec = _classified(spec)
    sa, sb = factor_spectra(spec)
    _require_nondegenerate(sa, "H_A")
    _require_nondegenerate(sb, "H_B")
    gap = min(sa.gap, sb.gap)
    scale = max(abs(sa.ground_energy) + abs(sb.ground_energy), 1.0)
    if gap < DEGENERACY_REL_TOL * scale:
        raise GaplessError(f"decoupled gap {gap:.3e} too small for the correlator bound")
    psi0 = np.kron(sa.ground_vector(), sb.ground_vector())
    w = assemble_sparse(spec, "boundary") @ psi0
    mean = np.vdot(psi0, w).real
    second = np.vdot(w, w).real
    return float((second - mean**2) / gap**2)


def area_bound(gap: float, max_norm: float, xi: float, dim_d: int, boundary_size: int) -> float:
    """Area-law bound  max_norm^2 * xi^(d-1) * |dA| / gap^2 (xi supplied by caller)."""
    if xi <= 0:
        raise InputError("correlation length xi must be positive")
    if gap <= 0:
        raise GaplessError("area bound requires a positive gap")
    return float(max_norm**2 * xi ** (dim_d - 1) * boundary_size / gap**2)


@dataclass(frozen=True)
class SusceptibilityReport:
    chi_e: float
    chi_f: float
    correlator_bound: float
    area_bound: float | None
    gap: float
    boundary_size: int
    max_term_norm: float

    def chain_slacks(self) -> tuple[float, float]:
        """(chi_F - chi_E, bound - chi_F); both nonnegative for gapped specs."""
        return self.chi_f - self.chi_e, self.correlator_bound - self.chi_f

    def chain_satisfied(self, rel_slack: float = 1e-9) -> bool:
        ok1 = self.chi_e <= self.chi_f * (1.0 + rel_slack) + 1e-300
        ok2 = self.chi_f <= self.correlator_bound * (1.0 + rel_slack) + 1e-300
        return ok1 and ok2


def susceptibility_report(spec: HamiltonianSpec, xi: float | None = None) -> SusceptibilityReport:
    """chi_E, chi_F, and the bound chain for one spec; area bound only when xi given."""
    spec = _classified(spec)
    amps = perturbation_amplitudes(spec)
    gap = amps.unperturbed_gap
    bound = correlator_bound(spec)
    ab = None
    if xi is not None:
        ab = area_bound(gap, spec.max_boundary_norm, xi, len(spec.lattice.dims), spec.boundary_site_count)
    return SusceptibilityReport(
        chi_e=chi_e(amps),
        chi_f=chi_f(amps),
        correlator_bound=bound,
        area_bound=ab,
        gap=gap,
        boundary_size=spec.boundary_site_count,
        max_term_norm=spec.max_boundary_norm,
    )


def perturbative_rdm(amps: PerturbationAmplitudes, lam: float) -> tuple[DensityMatrix, float]:
    """Second-order reduced density matrix and its normalization N^2.

    Builds N^2 (rho0 + lam rho1 + lam^2 rho2) in the H_A eigenbasis and
    rotates to the site basis.  rho1 carries the minus sign implied by the
    resolvent (first-order amplitudes enter the state as -C), so the matrix
    agrees with the exact rho_A to O(lambda^2).  The result is exactly PSD
    and unit trace: it is the partial trace of the truncated pure state.
    """
    c = amps.c
    pa, pb = amps.reference
    dim_a = c.shape[0]
    rho = np.zeros((dim_a, dim_a), dtype=complex)
    rho[pa, pa] = 1.0
    rho[:, pa] -= lam * c[:, pb]
    rho[pa, :] -= lam * c[:, pb].conj()
    rho += lam**2 * (c @ c.conj().T)
    n_sq = 1.0 / (1.0 + lam**2 * float(np.sum(np.abs(c) ** 2)))
    ua = amps.spectrum_a.eigenvectors
    rho_site = ua @ (n_sq * rho) @ ua.conj().T
    return DensityMatrix(matrix=rho_site), n_sq


def fidelity_vs_normalization(spec: HamiltonianSpec, lam: float) -> tuple[float, float]:
    """(exact ground-state fidelity F(lambda), perturbative normalization N).

    N = (1 + lambda^2 chi_F)^(-1/2); the two agree to O(lambda^3).
    """
    spec = _classified(spec)
    amps = perturbation_amplitudes(spec)
    n = (1.0 + lam**2 * chi_f(amps)) ** -0.5
    _, psi0 = product_ground_state(spec)
    gs = ground_state(assemble(spec, "full", lam))
    return overlap(psi0, gs.vector), n
