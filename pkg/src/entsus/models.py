"""Built-in spin model library and the seeded random test corpus."""

import numpy as np

from .errors import GaplessError, InputError
from .lattice import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    Bipartition,
    HamiltonianSpec,
    OperatorTerm,
    chain,
    classify_terms,
    half_cut,
)
from .solver import full_spectrum


def _resolve_cut(num_sites: int, cut) -> Bipartition:
    if cut is None or cut == "half":
        return half_cut(num_sites)
    if isinstance(cut, int):
        if not 0 < cut < num_sites:
            raise InputError(f"cut index {cut} must split {num_sites} sites into two nonempty parts")
        return Bipartition(region_a=tuple(range(cut)), num_sites=num_sites)
    return Bipartition(region_a=tuple(cut), num_sites=num_sites)


def tfim_chain(num_sites: int, h: float, j: float = 1.0, bc: str = "open", cut=None) -> HamiltonianSpec:
    """Transverse-field Ising chain  H = -j sum X_i X_{i+1} - h sum Z_i."""
    lat = chain(num_sites, bc=bc)
    terms = [OperatorTerm(support=(i,), coefficient=-h, factors=(SIGMA_Z,)) for i in range(num_sites)]
    for i, k in lat.bonds():
        terms.append(OperatorTerm(support=(i, k), coefficient=-j, factors=(SIGMA_X, SIGMA_X)))
    return classify_terms(
        HamiltonianSpec(lattice=lat, terms=tuple(terms), bipartition=_resolve_cut(num_sites, cut))
    )


def xxz_chain(
    num_sites: int,
    jxy: float = 1.0,
    jz: float = 0.5,
    h: float = 0.0,
    bc: str = "open",
    cut=None,
) -> HamiltonianSpec:
    """XXZ chain  H = sum jxy (X X + Y Y) + jz Z Z  + h sum Z_i."""
    lat = chain(num_sites, bc=bc)
    terms = []
    if h != 0.0:
        terms += [OperatorTerm(support=(i,), coefficient=h, factors=(SIGMA_Z,)) for i in range(num_sites)]
    for i, k in lat.bonds():
        terms.append(OperatorTerm(support=(i, k), coefficient=jxy, factors=(SIGMA_X, SIGMA_X)))
        terms.append(OperatorTerm(support=(i, k), coefficient=jxy, factors=(SIGMA_Y, SIGMA_Y)))
        terms.append(OperatorTerm(support=(i, k), coefficient=jz, factors=(SIGMA_Z, SIGMA_Z)))
    return classify_terms(
        HamiltonianSpec(lattice=lat, terms=tuple(terms), bipartition=_resolve_cut(num_sites, cut))
    )


def dimer_hopping_chain(num_sites: int, t1: float = 1.5, t2: float = 0.5, h: float = 0.25, cut=None) -> HamiltonianSpec:
    """Alternating-bond hopping chain  H = sum t_i (X X + Y Y)/2 + h sum Z_i.

    The field term breaks the ground-state degeneracy of the pure hopping
    model at half filling.
    """
    lat = chain(num_sites, bc="open")
    terms = [OperatorTerm(support=(i,), coefficient=h, factors=(SIGMA_Z,)) for i in range(num_sites)]
    for i, k in lat.bonds():
        t = t1 if i % 2 == 0 else t2
        terms.append(OperatorTerm(support=(i, k), coefficient=0.5 * t, factors=(SIGMA_X, SIGMA_X)))
        terms.append(OperatorTerm(support=(i, k), coefficient=0.5 * t, factors=(SIGMA_Y, SIGMA_Y)))
    return classify_terms(
        HamiltonianSpec(lattice=lat, terms=tuple(terms), bipartition=_resolve_cut(num_sites, cut))
    )


def two_qubit_model(cut=None) -> HamiltonianSpec:
    """The closed-form fixture  H = -Z_0 - Z_1 + lambda X_0 X_1."""
    lat = chain(2)
    terms = (
        OperatorTerm(support=(0,), coefficient=-1.0, factors=(SIGMA_Z,)),
        OperatorTerm(support=(1,), coefficient=-1.0, factors=(SIGMA_Z,)),
        OperatorTerm(support=(0, 1), coefficient=1.0, factors=(SIGMA_X, SIGMA_X)),
    )
    return classify_terms(
        HamiltonianSpec(lattice=lat, terms=terms, bipartition=_resolve_cut(2, cut))
    )


MODEL_BUILDERS = {
    "tfim": tfim_chain,
    "xxz": xxz_chain,
    "dimer_hopping": dimer_hopping_chain,
    "two_qubit": lambda num_sites=2, cut=None, **_: two_qubit_model(cut=cut),
}


def build_model(name: str, num_sites: int, cut=None, **params) -> HamiltonianSpec:
    if name not in MODEL_BUILDERS:
        raise InputError(f"unknown model {name!r}; known: {sorted(MODEL_BUILDERS)}")
    return MODEL_BUILDERS[name](num_sites, cut=cut, **params)


def _random_hermitian_2x2(rng) -> np.ndarray:
    # couplings drawn from [-1, 1]
    a, b, c, d = rng.uniform(-1.0, 1.0, size=4)
    return a * SIGMA_X + b * SIGMA_Y + c * SIGMA_Z + d * np.eye(2)


def random_spec(num_sites: int, rng) -> HamiltonianSpec:
    """Random-coupling chain: a random field per site, a random 2-site term per bond."""
    lat = chain(num_sites)
    terms = [
        OperatorTerm(support=(i,), coefficient=1.0, factors=(_random_hermitian_2x2(rng),))
        for i in range(num_sites)
    ]
    for i in range(num_sites - 1):
        terms.append(
            OperatorTerm(
                support=(i, i + 1),
                coefficient=float(rng.uniform(-1.0, 1.0)),
                factors=(_random_hermitian_2x2(rng), _random_hermitian_2x2(rng)),
            )
        )
    cut = int(rng.integers(1, num_sites))
    bip = Bipartition(region_a=tuple(range(cut)), num_sites=num_sites)
    return classify_terms(HamiltonianSpec(lattice=lat, terms=tuple(terms), bipartition=bip))


def unperturbed_gap(spec: HamiltonianSpec) -> float:
    """Gap of the decoupled H(0) = min over factor excitations."""
    # local import to keep models importable without susceptibility
    from .susceptibility import factor_operator

    spec_a = full_spectrum(factor_operator(spec, "A"))
    spec_b = full_spectrum(factor_operator(spec, "B"))
    return min(spec_a.gap, spec_b.gap)


def random_gapped_corpus(
    count: int,
    seed: int,
    min_sites: int = 2,
    max_sites: int = 8,
    gap_floor: float = 1e-6,
):
    """Deterministic corpus of random gapped specs for the property suites.

    Draws specs with fixed-seed couplings in [-1, 1]; a draw is rejected
    (and redrawn) when the decoupled gap or either factor gap falls below
    gap_floor, so the bound-chain suite is reproducible and gapped.
    """
    from .susceptibility import factor_spectra

    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(min_sites, max_sites + 1))
        spec = random_spec(n, rng)
        sa, sb = factor_spectra(spec)
        if min(sa.gap, sb.gap) < gap_floor:
            continue
        out.append(spec)
    return out


def require_gapped(spec: HamiltonianSpec, gap_floor: float = 1e-6) -> float:
    gap = unperturbed_gap(spec)
    if gap < gap_floor:
        raise GaplessError(f"decoupled gap {gap:.3e} below {gap_floor:.3e}")
    return gap
