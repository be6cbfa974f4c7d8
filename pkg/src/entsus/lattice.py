"""Lattice Hamiltonians, bipartitions, and boundary decomposition.

A Hamiltonian is a list of finite-support terms on a chain or hypercubic
lattice.  Given a bipartition (A, B) every term is classified as bulk_A,
bulk_B, or boundary (support meets both regions), which defines the
decoupled family  H(lambda) = H_A + H_B + lambda * H_boundary.

Kronecker embedding orders sites as sorted(A) + sorted(B) with the first
site most significant, so a state vector reshapes to (dim_A, dim_B) and
the partial trace over B is a plain matrix product.
"""

from dataclasses import dataclass, replace
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, InputError
from .linalg import hermiticity_defect, spectral_norm

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

TAG_BULK_A = "bulk_A"
TAG_BULK_B = "bulk_B"
TAG_BOUNDARY = "boundary"

#: Hermiticity tolerance for user-supplied single-site factors.
FACTOR_HERMITICITY_TOL = 1e-12
#: default cap on the total Hilbert-space dimension for dense assembly
DENSE_DIMENSION_CAP = 2**14


@dataclass(frozen=True)
class Lattice:
    """Site set: chain (one axis) or hypercubic, with per-axis boundary conditions."""

    dims: tuple[int, ...]
    bc: tuple[str, ...]
    local_dim: int = 2

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "bc", tuple(self.bc))
        if not self.dims or any(d < 1 for d in self.dims):
            raise InputError(f"axis lengths must be positive, got {self.dims}")
        if len(self.bc) != len(self.dims):
            raise InputError("one boundary condition per axis required")
        for b in self.bc:
            if b not in ("open", "periodic"):
                raise InputError(f"boundary condition must be open|periodic, got {b!r}")
        if self.local_dim < 2:
            raise InputError("local_dim must be >= 2")

    @property
    def num_sites(self) -> int:
        return int(np.prod(self.dims))

    def site_index(self, coords) -> int:
        """Row-major site index of a coordinate tuple."""
        coords = tuple(coords)
        if len(coords) != len(self.dims):
            raise InputError("coordinate rank mismatch")
        idx = 0
        for c, d in zip(coords, self.dims):
            if not 0 <= c < d:
                raise InputError(f"coordinate {coords} outside lattice {self.dims}")
            idx = idx * d + c
        return idx

    def bonds(self):
        """Nearest-neighbour (i, j) site pairs honouring per-axis boundary conditions."""
        out = []
        for coords in np.ndindex(*self.dims):
            for ax, (length, bc) in enumerate(zip(self.dims, self.bc)):
                c = coords[ax]
                if c + 1 < length:
                    nb = list(coords)
                    nb[ax] = c + 1
                elif bc == "periodic" and length > 2:
                    nb = list(coords)
                    nb[ax] = 0
                else:
                    continue
                out.append((self.site_index(coords), self.site_index(nb)))
        return out


def chain(num_sites: int, bc: str = "open", local_dim: int = 2) -> Lattice:
    return Lattice(dims=(num_sites,), bc=(bc,), local_dim=local_dim)


@dataclass(frozen=True)
class Bipartition:
    """A cut of the site set into region A and its complement B."""

    region_a: tuple[int, ...]
    num_sites: int

    def __post_init__(self):
        region = tuple(sorted(set(int(s) for s in self.region_a)))
        object.__setattr__(self, "region_a", region)
        if not region:
            raise InputError("region A must be nonempty")
        if region[0] < 0 or region[-1] >= self.num_sites:
            raise InputError("region A contains out-of-range sites")
        if len(region) == self.num_sites:
            raise InputError("region B must be nonempty")

    @property
    def region_b(self) -> tuple[int, ...]:
        in_a = set(self.region_a)
        return tuple(s for s in range(self.num_sites) if s not in in_a)

    @property
    def size_a(self) -> int:
        return len(self.region_a)

    @property
    def size_b(self) -> int:
        return self.num_sites - len(self.region_a)

    def swapped(self) -> "Bipartition":
        """The same cut with the roles of A and B exchanged."""
        return Bipartition(region_a=self.region_b, num_sites=self.num_sites)


def half_cut(num_sites: int) -> Bipartition:
    return Bipartition(region_a=tuple(range(num_sites // 2)), num_sites=num_sites)


@dataclass(frozen=True)
class OperatorTerm:
    """coefficient * (factor_1 on site s_1) * ... with one Hermitian factor per site."""

    support: tuple[int, ...]
    coefficient: float
    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        support = tuple(int(s) for s in self.support)
        factors = tuple(np.asarray(f, dtype=complex) for f in self.factors)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "coefficient", float(self.coefficient))
        if len(support) != len(set(support)):
            raise InputError(f"support sites must be distinct, got {support}")
        if len(factors) != len(support):
            raise InputError("one factor per support site required")
        for f in factors:
            if f.ndim != 2 or f.shape[0] != f.shape[1]:
                raise InputError("factors must be square matrices")
            if hermiticity_defect(f) > FACTOR_HERMITICITY_TOL:
                raise InputError("factor is not Hermitian within 1e-12")

    @property
    def norm(self) -> float:
        """Operator norm; exact for Kronecker products of the factors."""
        out = abs(self.coefficient)
        for f in self.factors:
            out *= spectral_norm(f)
        return out


@dataclass(frozen=True)
class DenseHermitianOperator:
    """Dense Hermitian matrix with validated Hermiticity (1e-10 relative)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError("operator matrix must be square")
        scale = float(np.max(np.abs(m))) or 1.0
        if hermiticity_defect(m) > 1e-10 * scale:
            raise InputError("operator is not Hermitian within 1e-10 (relative)")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class HamiltonianSpec:
    """A term list plus bipartition; tags record the boundary classification."""

    lattice: Lattice
    terms: tuple[OperatorTerm, ...]
    bipartition: Bipartition
    tags: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "tags", tuple(self.tags))
        n = self.lattice.num_sites
        d = self.lattice.local_dim
        if self.bipartition.num_sites != n:
            raise InputError("bipartition site count does not match lattice")
        for t in self.terms:
            if any(s < 0 or s >= n for s in t.support):
                raise InputError(f"term support {t.support} outside lattice of {n} sites")
            for f in t.factors:
                if f.shape != (d, d):
                    raise InputError(f"factor shape {f.shape} does not match local_dim {d}")
        if self.tags and len(self.tags) != len(self.terms):
            raise InputError("one tag per term required")

    # -- classification-dependent accessors -------------------------------

    def _require_tags(self):
        if not self.tags:
            raise InputError("spec is unclassified; call classify_terms first")

    def terms_for(self, part: str) -> tuple[OperatorTerm, ...]:
        self._require_tags()
        tag = {"A": TAG_BULK_A, "B": TAG_BULK_B, "boundary": TAG_BOUNDARY}[part]
        return tuple(t for t, g in zip(self.terms, self.tags) if g == tag)

    @property
    def boundary_terms(self) -> tuple[OperatorTerm, ...]:
        return self.terms_for("boundary")

    @property
    def boundary_site_count(self) -> int:
        """|dA|: distinct A-sites appearing in boundary-term supports."""
        self._require_tags()
        in_a = set(self.bipartition.region_a)
        sites = set()
        for t in self.boundary_terms:
            sites.update(s for s in t.support if s in in_a)
        return len(sites)

    @property
    def max_boundary_norm(self) -> float:
        """Largest operator norm among boundary terms (0 if none)."""
        self._require_tags()
        return max((t.norm for t in self.boundary_terms), default=0.0)

    @property
    def site_order(self) -> tuple[int, ...]:
        """Embedding order: A sites ascending, then B sites ascending."""
        return tuple(self.bipartition.region_a) + tuple(self.bipartition.region_b)

    @property
    def dim_a(self) -> int:
        return self.lattice.local_dim ** self.bipartition.size_a

    @property
    def dim_b(self) -> int:
        return self.lattice.local_dim ** self.bipartition.size_b

    @property
    def total_dim(self) -> int:
        return self.lattice.local_dim**self.lattice.num_sites

    def with_bipartition(self, bipartition: Bipartition) -> "HamiltonianSpec":
        return classify_terms(replace(self, bipartition=bipartition, tags=()))


def classify_terms(spec: HamiltonianSpec) -> HamiltonianSpec:
    """Tag every term bulk_A / bulk_B / boundary.

    A term is boundary iff its support intersects both regions.
    """
    in_a = set(spec.bipartition.region_a)
    tags = []
    for t in spec.terms:
        hits_a = any(s in in_a for s in t.support)
        hits_b = any(s not in in_a for s in t.support)
        if hits_a and hits_b:
            tags.append(TAG_BOUNDARY)
        elif hits_a:
            tags.append(TAG_BULK_A)
        else:
            tags.append(TAG_BULK_B)
    return replace(spec, tags=tuple(tags))


def _classified(spec: HamiltonianSpec) -> HamiltonianSpec:
    return spec if spec.tags else classify_terms(spec)


def _selected_terms(spec: HamiltonianSpec, part: str, lam: float):
    """(coefficient multiplier, term) pairs making up the requested part."""
    if part == "full":
        mult = {TAG_BULK_A: 1.0, TAG_BULK_B: 1.0, TAG_BOUNDARY: lam}
        return [(mult[g], t) for t, g in zip(spec.terms, spec.tags)]
    tag = {"A": TAG_BULK_A, "B": TAG_BULK_B, "boundary": TAG_BOUNDARY}.get(part)
    if tag is None:
        raise InputError(f"unknown part {part!r}")
    return [(1.0, t) for t, g in zip(spec.terms, spec.tags) if g == tag]


def embedded_term(term: OperatorTerm, spec: HamiltonianSpec) -> sp.csr_matrix:
    """Sparse Kronecker embedding of one term in the spec's site order."""
    d = spec.lattice.local_dim
    pos = {site: i for i, site in enumerate(spec.site_order)}
    placed = {pos[s]: f for s, f in zip(term.support, term.factors)}
    ops = []
    gap = 0
    for i in range(spec.lattice.num_sites):
        if i in placed:
            if gap:
                ops.append(sp.identity(d**gap, dtype=complex, format="csr"))
                gap = 0
            ops.append(sp.csr_matrix(placed[i]))
        else:
            gap += 1
    if gap:
        ops.append(sp.identity(d**gap, dtype=complex, format="csr"))
    out = reduce(lambda a, b: sp.kron(a, b, format="csr"), ops)
    return (term.coefficient * out).tocsr()


def assemble_sparse(spec: HamiltonianSpec, part: str = "full", lam: float = 1.0) -> sp.csr_matrix:
    """Sparse assembly of the selected part; no dimension cap."""
    spec = _classified(spec)
    dim = spec.total_dim
    acc = sp.csr_matrix((dim, dim), dtype=complex)
    for mult, term in _selected_terms(spec, part, lam):
        if mult != 0.0:
            acc = acc + mult * embedded_term(term, spec)
    return acc


def assemble(
    spec: HamiltonianSpec,
    part: str = "full",
    lam: float = 1.0,
    cap: int = DENSE_DIMENSION_CAP,
) -> DenseHermitianOperator:
    """Dense assembly of H_A, H_B, H_boundary, or the full H(lambda).

    Raises CapacityError if the total Hilbert dimension exceeds `cap`.
    """
    spec = _classified(spec)
    dim = spec.total_dim
    if dim > cap:
        raise CapacityError(f"dimension {dim} exceeds dense cap {cap}")
    return DenseHermitianOperator(matrix=assemble_sparse(spec, part, lam).toarray())
