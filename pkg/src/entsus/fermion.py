"""Quadratic fermion models: polar-factor fidelity susceptibility and oracles.

A model is a real symmetric single-particle matrix Z (hopping) with a
boundary-block perturbation dZ, Z(lambda) = Z + lambda dZ.  Gapfulness is
invertibility of Z.  chi_F is the squared Frobenius norm of the derivative
of the sign factor T = Z |Z|^(-1), computed by Richardson-refined central
differences.  A dense Fock-space oracle (N <= 12 modes) and the standard
correlation-matrix formula cross-validate every many-body quantity.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, GaplessError, InputError, NumericalConsistencyError
from .extrapolate import matrix_derivative
from .linalg import frobenius_norm, numeric_rank, spectral_norm

#: modes above this go through single-particle formulas only
FOCK_MODE_CAP = 12
SYMMETRY_TOL = 1e-12
#: relative invertibility tolerance (times ||Z||)
SINGULAR_REL_TOL = 1e-10


def _check_symmetric(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"{name} must be square")
    if m.size and np.max(np.abs(m - m.T)) > SYMMETRY_TOL:
        raise InputError(f"{name} must be symmetric within 1e-12")
    return m


@dataclass(frozen=True)
class QuadraticFermionModel:
    """Single-particle matrix Z, boundary perturbation dZ, and the A-mode set."""

    z: np.ndarray
    delta_z: np.ndarray
    region_a: tuple[int, ...]

    def __post_init__(self):
        z = _check_symmetric(self.z, "Z")
        dz = _check_symmetric(self.delta_z, "dZ")
        if dz.shape != z.shape:
            raise InputError("Z and dZ must have the same shape")
        region = tuple(sorted(set(int(i) for i in self.region_a)))
        n = z.shape[0]
        if not region or region[0] < 0 or region[-1] >= n or len(region) == n:
            raise InputError("region A must be a nonempty proper subset of the modes")
        boundary = set(np.flatnonzero(np.any(dz != 0.0, axis=1)))
        in_a = set(region)
        if boundary and not (boundary & in_a and boundary - in_a):
            raise InputError("dZ support must touch both mode regions")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "delta_z", dz)
        object.__setattr__(self, "region_a", region)

    @property
    def num_modes(self) -> int:
        return self.z.shape[0]

    @property
    def region_b(self) -> tuple[int, ...]:
        in_a = set(self.region_a)
        return tuple(i for i in range(self.num_modes) if i not in in_a)

    def coupled(self, lam: float = 1.0) -> np.ndarray:
        return self.z + lam * self.delta_z


def min_singular_value(z: np.ndarray) -> float:
    return float(np.min(np.abs(np.linalg.eigvalsh(z))))


def polar_unitary(z: np.ndarray, rel_tol: float = SINGULAR_REL_TOL) -> np.ndarray:
    """Sign factor T = Z |Z|^(-1) from the eigendecomposition of symmetric Z."""
    z = _check_symmetric(z, "Z")
    e, q = np.linalg.eigh(z)
    if np.min(np.abs(e)) <= rel_tol * np.max(np.abs(e)):
        raise GaplessError("Z is numerically singular; the polar factor is undefined")
    return (q * np.sign(e)) @ q.T


def chi_f_polar(z: np.ndarray, delta_z: np.ndarray, h0: float = 0.02, levels: int = 2) -> float:
    """||dT/dlambda||_F^2 at lambda = 0, by Richardson central differences."""
    z = _check_symmetric(z, "Z")
    delta_z = _check_symmetric(delta_z, "dZ")
    dt = matrix_derivative(lambda h: polar_unitary(z + h * delta_z), h0, levels=levels)
    return frobenius_norm(dt) ** 2


@dataclass(frozen=True)
class PolarBoundReport:
    """||dT||_2 against its Lipschitz bound 2 ||dZ||_2 / (gap + gap') and the rank bound."""

    delta_t_norm: float
    lipschitz_rhs: float
    rank_rhs: float
    gap: float
    gap_coupled: float
    rank_delta_z: int

    @property
    def lipschitz_holds(self) -> bool:
        return self.delta_t_norm <= self.lipschitz_rhs * (1.0 + 1e-12)


def polar_bound_check(z: np.ndarray, delta_z: np.ndarray) -> PolarBoundReport:
    """Evaluate the polar-factor inequality chain for the full perturbation.

    The sign factor is Lipschitz in the matrix:
    ||T(Z+dZ) - T(Z)||_2 <= 2 ||dZ||_2 / (gap + gap'); a violation signals a
    broken polar computation (the inequality is a theorem) and raises.  The
    rank bound 4 rank(dZ) ||dZ||^2 / (gap + gap')^2 is returned alongside.
    """
    t0 = polar_unitary(z)
    t1 = polar_unitary(z + delta_z)
    gap = min_singular_value(z)
    gap1 = min_singular_value(z + delta_z)
    lhs = frobenius_norm(t1 - t0)
    rhs = 2.0 * frobenius_norm(delta_z) / (gap + gap1)
    rank = numeric_rank(delta_z)
    rank_rhs = 4.0 / (gap + gap1) ** 2 * rank * spectral_norm(delta_z) ** 2
    report = PolarBoundReport(
        delta_t_norm=lhs,
        lipschitz_rhs=rhs,
        rank_rhs=rank_rhs,
        gap=gap,
        gap_coupled=gap1,
        rank_delta_z=rank,
    )
    if not report.lipschitz_holds:
        raise NumericalConsistencyError(
            f"polar inequality violated: {lhs:.6e} > {rhs:.6e}"
        )
    return report


# -- dense Fock-space oracle (N <= 12 modes) --------------------------------


def _occupations(num_modes: int) -> np.ndarray:
    """occ[s, k] = occupation of mode k in basis state s (mode 0 most significant)."""
    states = np.arange(2**num_modes)
    shifts = num_modes - 1 - np.arange(num_modes)
    return ((states[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def fock_hamiltonian(z: np.ndarray, cap: int = FOCK_MODE_CAP) -> np.ndarray:
    """Dense sum Z_ij c_i^dag c_j on the 2^N occupation basis.

    Matrix elements are generated directly in the mode-occupation basis with
    fermionic sign bookkeeping (no string transformation): removing mode j
    costs (-1)^(number of occupied modes before j), then adding mode i costs
    the same count in the intermediate state.
    """
    z = _check_symmetric(z, "Z")
    n = z.shape[0]
    if n > cap:
        raise CapacityError(f"{n} modes exceed the Fock oracle cap of {cap}")
    dim = 2**n
    occ = _occupations(n)
    # prefix[s, k] = number of occupied modes with index < k
    prefix = np.concatenate([np.zeros((dim, 1), np.int8), np.cumsum(occ, axis=1)[:, :-1]], axis=1)
    h = np.zeros((dim, dim))
    states = np.arange(dim)
    for i in range(n):
        h[states, states] += z[i, i] * occ[:, i]
    for i in range(n):
        for j in range(n):
            if i == j or z[i, j] == 0.0:
                continue
            movable = (occ[:, j] == 1) & (occ[:, i] == 0)
            src = states[movable]
            bit_i = 1 << (n - 1 - i)
            bit_j = 1 << (n - 1 - j)
            dst = src - bit_j + bit_i
            sign_j = (-1.0) ** prefix[src, j]
            # occupied count before index i, after mode j was removed
            sign_i = (-1.0) ** (prefix[src, i] - int(j < i))
            h[dst, src] += z[i, j] * sign_j * sign_i
    return h


def fock_ground_state(z: np.ndarray, cap: int = FOCK_MODE_CAP) -> tuple[float, np.ndarray]:
    h = fock_hamiltonian(z, cap=cap)
    e, u = np.linalg.eigh(h)
    return float(e[0]), u[:, 0]


def fock_overlap(z1: np.ndarray, z2: np.ndarray, cap: int = FOCK_MODE_CAP) -> float:
    """|<GS(z1)|GS(z2)>| via the dense many-body oracle."""
    _, g1 = fock_ground_state(z1, cap=cap)
    _, g2 = fock_ground_state(z2, cap=cap)
    return float(abs(np.vdot(g1, g2)))


def slater_overlap(z1: np.ndarray, z2: np.ndarray) -> float:
    """|det(U1_occ^T U2_occ)| over occupied (negative-energy) orbitals.

    Zero when the two Slater determinants carry different particle numbers.
    """
    e1, q1 = np.linalg.eigh(_check_symmetric(z1, "Z1"))
    e2, q2 = np.linalg.eigh(_check_symmetric(z2, "Z2"))
    occ1 = q1[:, e1 < 0.0]
    occ2 = q2[:, e2 < 0.0]
    if occ1.shape[1] != occ2.shape[1]:
        return 0.0
    if occ1.shape[1] == 0:
        return 1.0
    return float(abs(np.linalg.det(occ1.T @ occ2)))


def fock_renyi2(z: np.ndarray, region_a, cap: int = FOCK_MODE_CAP) -> float:
    """S2 of the A-modes from the dense many-body ground state.

    Modes are permuted so region A comes first; the ground state of a
    number-conserving quadratic Hamiltonian has definite particle number, so
    the block-reshape partial trace is the exact fermionic one in that
    ordering.
    """
    z = _check_symmetric(z, "Z")
    region = tuple(sorted(set(int(i) for i in region_a)))
    n = z.shape[0]
    rest = [i for i in range(n) if i not in set(region)]
    perm = list(region) + rest
    zp = z[np.ix_(perm, perm)]
    _, gs = fock_ground_state(zp, cap=cap)
    m = gs.reshape(2 ** len(region), 2 ** len(rest))
    rho = m @ m.conj().T
    purity = float(np.vdot(rho, rho).real)
    return float(-np.log(purity))


def corr_matrix_renyi2(z: np.ndarray, region_a, rel_tol: float = SINGULAR_REL_TOL) -> float:
    """S2 of region A from the ground-state correlation matrix.

    C_A is the negative-eigenspace projector of Z restricted to A; then
    S2 = -sum_nu ln(nu^2 + (1-nu)^2) over its eigenvalues.
    """
    z = _check_symmetric(z, "Z")
    e, q = np.linalg.eigh(z)
    if np.min(np.abs(e)) <= rel_tol * np.max(np.abs(e)):
        raise GaplessError("Z is numerically singular; occupations are ambiguous")
    region = np.asarray(sorted(set(int(i) for i in region_a)))
    occ = q[:, e < 0.0]
    c_a = (occ @ occ.T)[np.ix_(region, region)]
    nu = np.linalg.eigvalsh(c_a)
    if np.any(nu < -1e-8) or np.any(nu > 1.0 + 1e-8):
        raise NumericalConsistencyError("correlation eigenvalue outside [0, 1] beyond 1e-8")
    nu = np.clip(nu, 0.0, 1.0)
    return float(-np.sum(np.log(nu**2 + (1.0 - nu) ** 2)))


# -- model builders ----------------------------------------------------------


def dimerized_chain(num_modes: int, t1: float = 1.5, t2: float = 0.5) -> QuadraticFermionModel:
    """Open alternating-bond hopping chain, cut on the weak mid-chain bond.

    With num_modes a multiple of 4 both halves terminate on strong bonds, so
    Z (cut bond removed) stays gapped; dZ restores the crossing bond.
    """
    if num_modes < 4 or num_modes % 4:
        raise InputError("dimerized chain needs num_modes divisible by 4")
    z = np.zeros((num_modes, num_modes))
    for i in range(num_modes - 1):
        z[i, i + 1] = z[i + 1, i] = t1 if i % 2 == 0 else t2
    half = num_modes // 2
    dz = np.zeros_like(z)
    dz[half - 1, half] = dz[half, half - 1] = z[half - 1, half]
    z[half - 1, half] = z[half, half - 1] = 0.0
    return QuadraticFermionModel(z=z, delta_z=dz, region_a=tuple(range(half)))


def grid_cut_model(side: int, hopping: float = 1.0, shift: float = 0.0) -> QuadraticFermionModel:
    """side x side square-lattice hopping with a straight cut between columns.

    dZ collects the `side` bonds crossing the cut, hence numeric rank
    2 * side.  An on-site `shift` moves the spectrum away from zero.
    """
    n = side * side

    def idx(r, c):
        return r * side + c

    z = shift * np.eye(n)
    for r in range(side):
        for c in range(side):
            if c + 1 < side:
                z[idx(r, c), idx(r, c + 1)] = z[idx(r, c + 1), idx(r, c)] = hopping
            if r + 1 < side:
                z[idx(r, c), idx(r + 1, c)] = z[idx(r + 1, c), idx(r, c)] = hopping
    cut = side // 2
    dz = np.zeros_like(z)
    for r in range(side):
        i, j = idx(r, cut - 1), idx(r, cut)
        dz[i, j] = dz[j, i] = z[i, j]
        z[i, j] = z[j, i] = 0.0
    region = tuple(idx(r, c) for r in range(side) for c in range(cut))
    return QuadraticFermionModel(z=z, delta_z=dz, region_a=region)


def random_gapped_model(
    num_modes: int,
    rng,
    gap_floor: float = 0.3,
    perturbation_scale: float = 0.3,
) -> QuadraticFermionModel:
    """Random symmetric Z with |eigenvalues| >= gap_floor and a single-bond dZ."""
    a = rng.standard_normal((num_modes, num_modes))
    sym = (a + a.T) / 2.0
    e, q = np.linalg.eigh(sym)
    # push every eigenvalue away from zero, keeping its sign
    signs = np.where(e >= 0.0, 1.0, -1.0)
    e = signs * (np.abs(e) + gap_floor)
    z = (q * e) @ q.T
    z = (z + z.T) / 2.0
    half = num_modes // 2
    i = int(rng.integers(0, half))
    j = int(rng.integers(half, num_modes))
    dz = np.zeros_like(z)
    dz[i, j] = dz[j, i] = perturbation_scale * float(rng.uniform(0.2, 1.0))
    return QuadraticFermionModel(z=z, delta_z=dz, region_a=tuple(range(half)))
