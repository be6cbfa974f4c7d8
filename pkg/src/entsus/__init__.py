"""Entanglement susceptibility, fidelity susceptibility, and area-law numerics."""

__version__ = "0.1.0"

from .lattice import (  # noqa: F401
    Bipartition,
    DenseHermitianOperator,
    HamiltonianSpec,
    Lattice,
    OperatorTerm,
    assemble,
    assemble_sparse,
    chain,
    classify_terms,
    half_cut,
)
from .solver import (  # noqa: F401
    DensityMatrix,
    GroundState,
    Spectrum,
    full_spectrum,
    ground_state,
    overlap,
    partial_trace_b,
    renyi2,
)
from .susceptibility import (  # noqa: F401
    PerturbationAmplitudes,
    SusceptibilityReport,
    area_bound,
    chi_e,
    chi_e_fd,
    chi_f,
    correlator_bound,
    perturbation_amplitudes,
    perturbative_rdm,
    susceptibility_report,
)
