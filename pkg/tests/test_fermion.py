import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from entsus.errors import CapacityError, GaplessError, InputError
from entsus.fermion import (
    QuadraticFermionModel,
    chi_f_polar,
    corr_matrix_renyi2,
    dimerized_chain,
    fock_ground_state,
    fock_hamiltonian,
    fock_overlap,
    fock_renyi2,
    grid_cut_model,
    polar_bound_check,
    polar_unitary,
    random_gapped_model,
    slater_overlap,
)
from entsus.linalg import numeric_rank


def random_symmetric(rng, n, gap=0.5):
    m = rng.standard_normal((n, n))
    sym = (m + m.T) / 2
    e, q = np.linalg.eigh(sym)
    e = np.where(e >= 0, e + gap, e - gap)
    out = (q * e) @ q.T
    return (out + out.T) / 2


def sign_derivative_oracle(z, dz):
    """Daleckii-Krein divided differences of the sign function (distinct spectrum)."""
    e, q = np.linalg.eigh(z)
    dz_eig = q.T @ dz @ q
    div = np.zeros_like(dz_eig)
    for i in range(len(e)):
        for j in range(len(e)):
            if i != j and np.sign(e[i]) != np.sign(e[j]):
                div[i, j] = (np.sign(e[i]) - np.sign(e[j])) / (e[i] - e[j])
    return q @ (div * dz_eig) @ q.T


# -- polar factor -------------------------------------------------------------


def test_polar_positive_definite_is_identity(rng):
    a = rng.standard_normal((6, 6))
    z = a @ a.T + 6 * np.eye(6)
    np.testing.assert_allclose(polar_unitary(z), np.eye(6), atol=1e-10)


def test_polar_diagonal_signs():
    np.testing.assert_allclose(polar_unitary(np.diag([2.0, -3.0])), np.diag([1.0, -1.0]), atol=1e-14)


def test_polar_singular_is_gapless():
    with pytest.raises(GaplessError):
        polar_unitary(np.diag([1.0, 0.0]))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**31), n=st.integers(min_value=2, max_value=12))
def test_polar_reconstruction_and_orthogonality(seed, n):
    z = random_symmetric(np.random.default_rng(seed), n)
    t = polar_unitary(z)
    assert np.max(np.abs(t.T @ t - np.eye(n))) <= 1e-10
    # reconstruction against scipy's SVD-based polar factorization
    u, p = scipy.linalg.polar(z)
    np.testing.assert_allclose(t @ p, z, atol=1e-9 * np.max(np.abs(z)))
    np.testing.assert_allclose(t, u, atol=1e-9)


def test_chi_f_polar_zero_perturbation(rng):
    z = random_symmetric(rng, 5)
    assert chi_f_polar(z, np.zeros((5, 5))) == pytest.approx(0.0, abs=1e-20)


def test_chi_f_polar_sign_preserving_commuting(rng):
    # dZ = eps Z rescales eigenvalues without moving T
    z = random_symmetric(rng, 5)
    assert chi_f_polar(z, 0.1 * z) == pytest.approx(0.0, abs=1e-12)


def test_chi_f_polar_two_by_two_analytic():
    # Z(lam) = [[1, lam], [lam, -1]]: T = Z/sqrt(1+lam^2), dT/dlam|_0 = offdiag(1)
    z = np.diag([1.0, -1.0])
    dz = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert chi_f_polar(z, dz) == pytest.approx(2.0, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**31))
def test_chi_f_polar_matches_divided_differences(seed):
    rng = np.random.default_rng(seed)
    z = random_symmetric(rng, 8)
    dz = rng.standard_normal((8, 8))
    dz = 0.2 * (dz + dz.T)
    oracle = np.linalg.norm(sign_derivative_oracle(z, dz)) ** 2
    assert chi_f_polar(z, dz) == pytest.approx(oracle, rel=1e-6, abs=1e-12)


def test_polar_bound_zero_perturbation(rng):
    z = random_symmetric(rng, 4)
    rep = polar_bound_check(z, np.zeros((4, 4)))
    assert rep.delta_t_norm == 0.0 and rep.lipschitz_rhs == 0.0 and rep.rank_rhs == 0.0
    assert rep.rank_delta_z == 0


def test_polar_bound_random_instances():
    rng = np.random.default_rng(7)
    for _ in range(30):
        model = random_gapped_model(int(rng.integers(4, 16)), rng)
        rep = polar_bound_check(model.z, model.delta_z)
        assert rep.lipschitz_holds
        assert chi_f_polar(model.z, model.delta_z) <= rep.rank_rhs * (1 + 1e-9)


def test_grid_cut_rank_scales_with_side():
    for side in (4, 6, 8):
        model = grid_cut_model(side, shift=5.0)
        assert numeric_rank(model.delta_z) == 2 * side
        rep = polar_bound_check(model.z, model.delta_z)
        assert rep.rank_delta_z == 2 * side


# -- Fock oracle --------------------------------------------------------------


def test_fock_two_modes():
    # Z = diag(-1, 1): mode 0 occupied, energy -1; occupation basis index 0b10
    energy, state = fock_ground_state(np.diag([-1.0, 1.0]))
    assert energy == pytest.approx(-1.0)
    assert np.argmax(np.abs(state)) == 2


def test_fock_energy_matches_free_fermion_sum(rng):
    for _ in range(5):
        z = random_symmetric(rng, 8, gap=0.2)
        e = np.linalg.eigvalsh(z)
        energy, _ = fock_ground_state(z)
        assert energy == pytest.approx(float(e[e < 0].sum()), abs=1e-9)


def test_fock_hamiltonian_hermitian(rng):
    z = random_symmetric(rng, 6)
    h = fock_hamiltonian(z)
    assert np.max(np.abs(h - h.T)) < 1e-12


def test_fock_overlap_matches_determinant_formula(rng):
    for _ in range(5):
        model = random_gapped_model(8, rng)
        ov_fock = fock_overlap(model.z, model.coupled(1.0))
        ov_det = slater_overlap(model.z, model.coupled(1.0))
        assert abs(ov_fock - ov_det) < 1e-8


def test_fock_overlap_zero_between_sectors():
    # different particle numbers: orthogonal ground states
    z1 = np.diag([-1.0, 1.0, 1.0])
    z2 = np.diag([-1.0, -1.0, 1.0])
    assert slater_overlap(z1, z2) == 0.0
    assert fock_overlap(z1, z2) == pytest.approx(0.0, abs=1e-12)


def test_fock_mode_cap():
    with pytest.raises(CapacityError):
        fock_hamiltonian(np.eye(13))


# -- correlation-matrix entropy -----------------------------------------------


def test_corr_renyi2_decoupled_blocks():
    z = np.zeros((4, 4))
    z[0, 1] = z[1, 0] = 1.0
    z[2, 3] = z[3, 2] = 1.0
    assert corr_matrix_renyi2(z, (0, 1)) == pytest.approx(0.0, abs=1e-12)


def test_corr_renyi2_single_bond():
    # half-filled two-mode bond: nu = 1/2, S2 = ln 2
    z = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert corr_matrix_renyi2(z, (0,)) == pytest.approx(np.log(2.0), abs=1e-12)


def test_corr_renyi2_singular_z():
    with pytest.raises(GaplessError):
        corr_matrix_renyi2(np.diag([0.0, 1.0]), (0,))


def test_oracle_triangle(rng):
    for _ in range(8):
        model = random_gapped_model(8, rng)
        z = model.coupled(1.0)
        assert abs(corr_matrix_renyi2(z, model.region_a) - fock_renyi2(z, model.region_a)) < 1e-8


def test_oracle_triangle_noncontiguous_region(rng):
    z = random_symmetric(rng, 6, gap=0.4)
    region = (0, 2, 5)
    assert abs(corr_matrix_renyi2(z, region) - fock_renyi2(z, region)) < 1e-8


# -- models -------------------------------------------------------------------


def test_model_validation():
    with pytest.raises(InputError):
        QuadraticFermionModel(z=np.array([[0.0, 1.0], [0.5, 0.0]]), delta_z=np.zeros((2, 2)), region_a=(0,))
    with pytest.raises(InputError):
        QuadraticFermionModel(z=np.zeros((2, 2)), delta_z=np.zeros((2, 2)), region_a=(0, 1))
    dz = np.zeros((4, 4))
    dz[0, 1] = dz[1, 0] = 1.0  # inside A: not a boundary block
    with pytest.raises(InputError):
        QuadraticFermionModel(z=np.eye(4), delta_z=dz, region_a=(0, 1))


def test_dimerized_chain_is_gapped():
    model = dimerized_chain(64, t1=1.5, t2=0.5)
    e = np.linalg.eigvalsh(model.z)
    assert np.min(np.abs(e)) > 0.2
    e1 = np.linalg.eigvalsh(model.coupled(1.0))
    assert np.min(np.abs(e1)) > 0.2


def test_dimerized_chain_chi_f_saturates():
    vals = [chi_f_polar(m.z, m.delta_z) for m in (dimerized_chain(128), dimerized_chain(256))]
    assert abs(vals[1] - vals[0]) / vals[0] < 0.05
