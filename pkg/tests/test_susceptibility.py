import numpy as np
import pytest

from conftest import two_qubit_s2
from entsus.errors import DegenerateGroundStateError, GaplessError, InputError
from entsus.extrapolate import second_derivative
from entsus.lattice import (
    SIGMA_X,
    SIGMA_Z,
    Bipartition,
    HamiltonianSpec,
    OperatorTerm,
    assemble,
    chain,
    classify_terms,
)
from entsus.models import random_gapped_corpus, tfim_chain
from entsus.solver import ground_state, overlap
from entsus.susceptibility import (
    area_bound,
    chi_e,
    chi_e_fd,
    chi_f,
    correlator_bound,
    factor_operator,
    fidelity_vs_normalization,
    perturbation_amplitudes,
    perturbative_rdm,
    product_ground_state,
    s2_at,
    susceptibility_report,
)

CORPUS = random_gapped_corpus(20, seed=977)


def decoupled_spec():
    lat = chain(2)
    terms = (
        OperatorTerm(support=(0,), coefficient=-1.0, factors=(SIGMA_Z,)),
        OperatorTerm(support=(1,), coefficient=-1.0, factors=(SIGMA_Z,)),
    )
    return classify_terms(
        HamiltonianSpec(lattice=lat, terms=terms, bipartition=Bipartition(region_a=(0,), num_sites=2))
    )


def commuting_boundary_spec():
    # H_b = Z0 Z1 commutes with H(0) and |00> is its eigenvector
    lat = chain(2)
    terms = (
        OperatorTerm(support=(0,), coefficient=-1.0, factors=(SIGMA_Z,)),
        OperatorTerm(support=(1,), coefficient=-1.0, factors=(SIGMA_Z,)),
        OperatorTerm(support=(0, 1), coefficient=1.0, factors=(SIGMA_Z, SIGMA_Z)),
    )
    return classify_terms(
        HamiltonianSpec(lattice=lat, terms=terms, bipartition=Bipartition(region_a=(0,), num_sites=2))
    )


def test_amplitudes_two_qubit(two_qubit):
    # X X |00> = |11>: single matrix element 1 over denominator (1+1) - (-2) = 4
    amps = perturbation_amplitudes(two_qubit)
    expected = np.zeros((2, 2))
    expected[1, 1] = 0.25
    np.testing.assert_allclose(np.abs(amps.c), expected, atol=1e-12)
    assert amps.ground_energy == pytest.approx(-2.0)
    finite = amps.denominators[np.isfinite(amps.denominators)]
    assert np.all(finite > 0)


def test_amplitudes_no_boundary():
    amps = perturbation_amplitudes(decoupled_spec())
    assert np.max(np.abs(amps.c)) == 0.0


def test_amplitudes_commuting_boundary():
    amps = perturbation_amplitudes(commuting_boundary_spec())
    assert np.max(np.abs(amps.c)) < 1e-14


def test_amplitudes_degenerate_factor_error():
    # H_A = X0 X1 has a two-fold degenerate ground state on its factor
    lat = chain(3)
    terms = (
        OperatorTerm(support=(0, 1), coefficient=1.0, factors=(SIGMA_X, SIGMA_X)),
        OperatorTerm(support=(2,), coefficient=-1.0, factors=(SIGMA_Z,)),
        OperatorTerm(support=(1, 2), coefficient=0.3, factors=(SIGMA_Z, SIGMA_Z)),
    )
    spec = classify_terms(
        HamiltonianSpec(lattice=lat, terms=terms, bipartition=Bipartition(region_a=(0, 1), num_sites=3))
    )
    with pytest.raises(DegenerateGroundStateError):
        perturbation_amplitudes(spec)


def test_amplitudes_excited_reference(two_qubit):
    # reference |1_A 1_B> = |11>: the only coupled state is |00> at distance 4
    amps = perturbation_amplitudes(two_qubit, reference=(1, 1))
    assert amps.ground_energy == pytest.approx(2.0)
    assert abs(amps.c[0, 0]) == pytest.approx(0.25)
    assert chi_e(amps) == pytest.approx(1.0 / 16.0, abs=1e-15)
    assert chi_f(amps) == pytest.approx(1.0 / 16.0, abs=1e-15)
    # |0_A 1_B> is degenerate with |1_A 0_B>: not a valid reference
    with pytest.raises(DegenerateGroundStateError):
        perturbation_amplitudes(two_qubit, reference=(0, 1))


def test_chi_values_two_qubit(two_qubit):
    amps = perturbation_amplitudes(two_qubit)
    assert chi_e(amps) == pytest.approx(1.0 / 16.0, abs=1e-15)
    # the mixed elements <01|XX|00> and <10|XX|00> vanish, so chi_F coincides
    assert chi_f(amps) == pytest.approx(1.0 / 16.0, abs=1e-15)


def test_chi_zero_for_trivial_boundary():
    amps = perturbation_amplitudes(commuting_boundary_spec())
    assert chi_e(amps) == pytest.approx(0.0, abs=1e-28)
    assert chi_f(amps) == pytest.approx(0.0, abs=1e-28)


def test_chi_e_matches_finite_difference_on_random_spec():
    spec = next(s for s in CORPUS if s.lattice.num_sites == 6)
    xe = chi_e(perturbation_amplitudes(spec))
    est = chi_e_fd(spec)
    assert abs(est.value - xe) / xe < 1e-4


def test_chi_f_matches_log_fidelity_curvature():
    spec = tfim_chain(6, h=1.5, cut=3)
    xf = chi_f(perturbation_amplitudes(spec))
    _, psi0 = product_ground_state(spec)

    def ln_f(lam):
        if lam == 0.0:
            return 0.0
        gs = ground_state(assemble(spec, "full", lam))
        return np.log(overlap(psi0, gs.vector))

    fd = -second_derivative(ln_f, 0.02).value
    assert abs(fd - xf) / xf < 1e-4


def test_chi_e_fd_two_qubit(two_qubit):
    est = chi_e_fd(two_qubit)
    assert abs(est.value - 1.0 / 16.0) < 1e-6


def test_chi_e_fd_zero_boundary():
    est = chi_e_fd(decoupled_spec())
    assert abs(est.value) < 1e-9


def test_chi_e_fd_tfim_ten_spins():
    spec = tfim_chain(10, h=2.0, cut=5)
    xe = chi_e(perturbation_amplitudes(spec))
    est = chi_e_fd(spec, lam_list=(1e-2, 5e-3, 2.5e-3))
    assert abs(est.value - xe) / xe < 0.01


def test_chi_e_fd_rejects_bad_steps(two_qubit):
    with pytest.raises(InputError):
        chi_e_fd(two_qubit, lam_list=(0.01, 0.004))


def test_correlator_bound_two_qubit(two_qubit):
    # <H_b^2>_c = 1 and the decoupled gap is 2, so the bound is 1/4
    assert correlator_bound(two_qubit) == pytest.approx(0.25, abs=1e-12)


def test_correlator_bound_zero_boundary():
    assert correlator_bound(decoupled_spec()) == pytest.approx(0.0, abs=1e-14)


def test_bound_chain_over_corpus():
    for spec in CORPUS:
        rep = susceptibility_report(spec)
        assert rep.chain_satisfied(1e-9), (rep.chi_e, rep.chi_f, rep.correlator_bound)


def test_area_bound_arithmetic():
    assert area_bound(gap=2.0, max_norm=1.0, xi=1.0, dim_d=1, boundary_size=1) == pytest.approx(0.25)
    one = area_bound(gap=1.5, max_norm=0.7, xi=2.0, dim_d=2, boundary_size=3)
    assert area_bound(gap=1.5, max_norm=0.7, xi=2.0, dim_d=2, boundary_size=6) == pytest.approx(2 * one)
    # xi^(d-1): linear in xi for d = 2, quadratic (9 L at xi = 3) for d = 3
    for length in (4, 8):
        assert area_bound(gap=1.0, max_norm=1.0, xi=3.0, dim_d=2, boundary_size=length) == pytest.approx(3.0 * length)
        assert area_bound(gap=1.0, max_norm=1.0, xi=3.0, dim_d=3, boundary_size=length) == pytest.approx(9.0 * length)
    with pytest.raises(InputError):
        area_bound(gap=1.0, max_norm=1.0, xi=0.0, dim_d=1, boundary_size=1)
    with pytest.raises(GaplessError):
        area_bound(gap=0.0, max_norm=1.0, xi=1.0, dim_d=1, boundary_size=1)


def test_report_fields(two_qubit):
    rep = susceptibility_report(two_qubit, xi=1.0)
    assert rep.gap == pytest.approx(2.0)
    assert rep.boundary_size == 1
    assert rep.max_term_norm == pytest.approx(1.0)
    assert rep.area_bound == pytest.approx(0.25)
    assert rep.chain_satisfied()


def test_ab_swap_symmetry():
    for spec in CORPUS[:8]:
        amps = perturbation_amplitudes(spec)
        swapped = perturbation_amplitudes(spec.with_bipartition(spec.bipartition.swapped()))
        assert abs(chi_e(amps) - chi_e(swapped)) < 1e-10
        assert abs(chi_f(amps) - chi_f(swapped)) < 1e-10


def test_series_consistency_two_qubit(two_qubit):
    # S2(lam) - 2 lam^2 chi_E is O(lam^3); closed form makes this sharp
    for lam in (0.04, 0.02, 0.01):
        assert abs(two_qubit_s2(lam) - 2 * lam**2 / 16.0) < 0.02 * lam**3 + 1e-14
        assert abs(s2_at(two_qubit, lam) - two_qubit_s2(lam)) < 1e-12


# -- perturbative reduced density matrix -------------------------------------


def test_perturbative_rdm_lambda_zero(two_qubit):
    rho, n_sq = perturbative_rdm(perturbation_amplitudes(two_qubit), 0.0)
    np.testing.assert_allclose(rho.matrix, [[1, 0], [0, 0]], atol=1e-14)
    assert n_sq == 1.0


def test_perturbative_rdm_two_qubit_structure(two_qubit):
    # C(p_A, 0) = 0 kills the first-order block; the second order is (1/16)|1><1|
    lam = 0.3
    rho, n_sq = perturbative_rdm(perturbation_amplitudes(two_qubit), lam)
    assert n_sq == pytest.approx(1.0 / (1.0 + lam**2 / 16.0), abs=1e-14)
    assert abs(rho.matrix[0, 1]) < 1e-14
    assert rho.matrix[1, 1].real == pytest.approx(n_sq * lam**2 / 16.0, abs=1e-14)


def test_perturbative_rdm_trace_normalized():
    spec = tfim_chain(6, h=1.3, cut=3)
    amps = perturbation_amplitudes(spec)
    for lam in (0.01, 0.05, 0.1):
        rho, _ = perturbative_rdm(amps, lam)
        assert abs(np.trace(rho.matrix).real - 1.0) < 1e-10


def test_perturbative_rdm_purity_expansion():
    spec = tfim_chain(6, h=1.3, cut=3)
    amps = perturbation_amplitudes(spec)
    xe = chi_e(amps)
    from entsus.solver import renyi2

    errs = []
    for lam in (0.02, 0.01):
        rho, _ = perturbative_rdm(amps, lam)
        errs.append(abs(renyi2(rho)[0] - (1.0 - 2.0 * lam**2 * xe)))
    # cubic-or-better remainder: halving lambda shrinks the error by >= ~8x
    assert errs[1] <= errs[0] / 6.0 + 1e-15


def test_perturbative_rdm_matches_exact_rdm():
    from entsus.solver import partial_trace_b

    spec = tfim_chain(6, h=1.3, cut=3)
    amps = perturbation_amplitudes(spec)
    errs = []
    for lam in (0.02, 0.01):
        gs = ground_state(assemble(spec, "full", lam))
        exact = partial_trace_b(gs.vector, spec.bipartition).matrix
        rho, _ = perturbative_rdm(amps, lam)
        errs.append(np.max(np.abs(rho.matrix - exact)))
    # agreement is O(lam^2): halving lambda shrinks the defect ~4x
    assert 2.5 < errs[0] / errs[1] < 6.0


def test_fidelity_equals_normalization():
    spec = tfim_chain(10, h=2.0, cut=5)
    f, n = fidelity_vs_normalization(spec, 1e-2)
    assert abs(f - n) <= 1e-4


def test_factor_operator_two_qubit(two_qubit):
    np.testing.assert_allclose(factor_operator(two_qubit, "A").matrix, -SIGMA_Z, atol=1e-14)
    np.testing.assert_allclose(factor_operator(two_qubit, "B").matrix, -SIGMA_Z, atol=1e-14)
