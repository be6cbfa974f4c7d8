"""Half-space tight-binding susceptibility sums and their scaling fits.

The geometry is a d-dimensional hypercubic lattice cut by a (d-1)-plane:
periodic length L along every parallel axis, open widths L_A and L_B across
the cut.  Perpendicular momenta are open-chain sine modes (pi m / L_A for
m = 1..L_A-1, likewise L_B); B hosts k, A hosts q, matching the Fourier
form of the hopping term that crosses the cut.  Dispersion
eps_k = 2 sum_i cos(k_i), occupations theta(-eps) at half filling.
"""

from dataclasses import dataclass

import numpy as np

from .errors import FitError, InputError

#: modes closer to the Fermi level than this are deterministically occupied
FERMI_TIE_TOL = 1e-12


@dataclass(frozen=True)
class TightBindingSpec:
    """Cut hypercubic tight-binding geometry; filling 'half' (default) or 'full'."""

    dim: int
    transverse_length: int
    width_a: int
    width_b: int
    filling: str = "half"

    def __post_init__(self):
        if self.dim < 1:
            raise InputError("dimension must be >= 1")
        if min(self.width_a, self.width_b) < 2:
            raise InputError("widths must be >= 2")
        if self.transverse_length < 2:
            raise InputError("transverse length must be >= 2")
        if self.filling not in ("half", "full"):
            raise InputError(f"unknown filling {self.filling!r}")


def half_space_spec(dim: int, length: int) -> TightBindingSpec:
    """Symmetric half cut: L_A = L_B = length / 2, transverse length `length`."""
    if length % 2:
        raise InputError("length must be even for a half cut")
    return TightBindingSpec(dim=dim, transverse_length=length, width_a=length // 2, width_b=length // 2)


def _perp_modes(width: int) -> np.ndarray:
    return np.pi * np.arange(1, width) / width


def _parallel_energies(spec: TightBindingSpec) -> np.ndarray:
    """2 sum cos(k_parallel) over the (d-1)-dim periodic grid, flattened."""
    if spec.dim == 1:
        return np.zeros(1)
    k = 2.0 * np.pi * np.arange(spec.transverse_length) / spec.transverse_length
    grids = np.meshgrid(*([k] * (spec.dim - 1)), indexing="ij")
    return 2.0 * sum(np.cos(g) for g in grids).ravel()


def _occupations(spec: TightBindingSpec, energies: np.ndarray) -> np.ndarray:
    if spec.filling == "full":
        return np.ones_like(energies, dtype=np.int64)
    # theta(-eps); exact Fermi-level modes are assigned occupied so that
    # vanishing denominators always meet vanishing numerators
    return ((energies < -FERMI_TIE_TOL) | (np.abs(energies) <= FERMI_TIE_TOL)).astype(np.int64)


def count_tied_modes(spec: TightBindingSpec) -> int:
    """Number of modes at the Fermi level affected by the tie-break rule."""
    epar = _parallel_energies(spec)
    total = 0
    for width in (spec.width_b, spec.width_a):
        eperp = 2.0 * np.cos(_perp_modes(width))
        eps = epar[:, None] + eperp[None, :]
        total += int(np.count_nonzero(np.abs(eps) <= FERMI_TIE_TOL))
    return total


def tight_binding_chi_e(spec: TightBindingSpec) -> float:
    """Momentum-sum entanglement susceptibility of the cut tight-binding model.

    chi_E = 8/(L_A L_B) sum over (k_par, k_perp, q_perp) of
    sin^2(k_perp) sin^2(q_perp) n_k (1 - n_q) / (eps_k - eps_q)^2; terms with
    coinciding dispersions are skipped (their numerator vanishes at half
    filling under the tie-break convention).
    """
    k = _perp_modes(spec.width_b)
    q = _perp_modes(spec.width_a)
    ek = 2.0 * np.cos(k)
    eq = 2.0 * np.cos(q)
    diff = ek[:, None] - eq[None, :]
    skip = np.abs(diff) < FERMI_TIE_TOL
    den = np.where(skip, 1.0, diff**2)

    epar = _parallel_energies(spec)
    nk = _occupations(spec, epar[:, None] + ek[None, :])  # (npar, nk)
    nq = _occupations(spec, epar[:, None] + eq[None, :])
    count = nk.astype(float).T @ (1.0 - nq.astype(float))  # (nk, nq)

    weight = np.sin(k)[:, None] ** 2 * np.sin(q)[None, :] ** 2
    terms = np.where(skip, 0.0, weight * count / den)
    return float(8.0 / (spec.width_a * spec.width_b) * terms.sum())


def xi_profile(spec: TightBindingSpec, k_perp: float, q_perp: float) -> float:
    """Parallel-momentum volume occupied at k_perp and empty at q_perp.

    (2 pi / L)^(d-1) sum over k_parallel of n(k_par, k_perp) (1 - n(k_par, q_perp));
    for d = 1 this degenerates to the indicator n_k (1 - n_q).
    """
    epar = _parallel_energies(spec)
    nk = _occupations(spec, epar + 2.0 * np.cos(k_perp))
    nq = _occupations(spec, epar + 2.0 * np.cos(q_perp))
    raw = float(np.sum(nk * (1 - nq)))
    if spec.dim == 1:
        return raw
    return (2.0 * np.pi / spec.transverse_length) ** (spec.dim - 1) * raw


@dataclass(frozen=True)
class ScalingFitResult:
    """Least-squares fit of chi_E ~ a L^(d-1) ln L + b L^(d-1) + c."""

    log_coefficient: float
    linear_coefficient: float
    constant: float
    log_coefficient_stderr: float
    residual_sum_of_squares: float
    r_squared: float
    dim: int

    @property
    def log_significance(self) -> float:
        """t-statistic of the L^(d-1) ln L coefficient."""
        if self.log_coefficient_stderr == 0.0:
            return float("inf")
        return self.log_coefficient / self.log_coefficient_stderr


def scaling_fit(sizes, values, dim: int, weights=None) -> ScalingFitResult:
    """Weighted least squares on a L^(d-1) ln L + b L^(d-1) + c.

    For d = 1 the L^0 column and the constant column coincide, so they are
    merged (the constant is reported as 0).  Needs >= 5 distinct sizes.
    """
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    if sizes.shape != values.shape or sizes.ndim != 1:
        raise FitError("sizes and values must be matching 1-d arrays")
    if len(np.unique(sizes)) < 5:
        raise FitError("scaling fit needs at least 5 distinct sizes")
    if np.any(np.diff(sizes) <= 0):
        raise FitError("sizes must be strictly ascending")
    growth = sizes ** (dim - 1)
    if dim == 1:
        design = np.column_stack([growth * np.log(sizes), growth])
    else:
        design = np.column_stack([growth * np.log(sizes), growth, np.ones_like(sizes)])
    w = np.ones_like(sizes) if weights is None else np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        raise FitError("weights must be positive")
    sw = np.sqrt(w)
    a = design * sw[:, None]
    if np.linalg.matrix_rank(a) < design.shape[1]:
        raise FitError("rank-deficient design matrix")
    sol, *_ = np.linalg.lstsq(a, values * sw, rcond=None)
    resid = design @ sol - values
    rss = float(np.sum(w * resid**2))
    mean = float(np.average(values, weights=w))
    tss = float(np.sum(w * (values - mean) ** 2))
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    dof = len(sizes) - design.shape[1]
    sigma2 = rss / dof if dof > 0 else 0.0
    cov = sigma2 * np.linalg.inv(a.T @ a)
    return ScalingFitResult(
        log_coefficient=float(sol[0]),
        linear_coefficient=float(sol[1]),
        constant=float(sol[2]) if dim > 1 else 0.0,
        log_coefficient_stderr=float(np.sqrt(cov[0, 0])),
        residual_sum_of_squares=rss,
        r_squared=float(r2),
        dim=dim,
    )
