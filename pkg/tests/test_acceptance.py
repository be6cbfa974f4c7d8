"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its runtime.  Run with `pytest -s tests/test_acceptance.py`
to see the per-criterion report.
"""

import time
from functools import lru_cache

import numpy as np

from test_boson import quadrature_overlap, random_spd
from entsus.boson import boson_bound_chain, gaussian_fidelity, harmonic_chain
from entsus.cumulants import cumulants
from entsus.doubled import swap_purity, twisted_ground_overlap
from entsus.fermion import (
    chi_f_polar,
    corr_matrix_renyi2,
    dimerized_chain,
    fock_renyi2,
    polar_bound_check,
    random_gapped_model,
)
from entsus.lattice import assemble
from entsus.models import random_gapped_corpus, tfim_chain, two_qubit_model
from entsus.solver import ground_state, partial_trace_b, renyi2
from entsus.susceptibility import (
    chi_e,
    chi_e_fd,
    chi_f,
    fidelity_vs_normalization,
    perturbation_amplitudes,
    s2_at,
    susceptibility_report,
)
from entsus.sweep import SweepPlan, rows_to_text, run_sweep
from entsus.tightbinding import half_space_spec, scaling_fit, tight_binding_chi_e, TightBindingSpec
from entsus.verify import run_verification

CORPUS_SEED = 20240501


@lru_cache(maxsize=1)
def corpus():
    return tuple(random_gapped_corpus(200, seed=CORPUS_SEED))


def report(index: int, name: str, started: float, limit: float | None, checks: dict):
    elapsed = time.perf_counter() - started
    failed = {k: v for k, v in checks.items() if not v}
    status = "PASS" if not failed else f"FAIL({sorted(failed)})"
    budget = f" / limit {limit:.0f}s" if limit else ""
    print(f"ACCEPTANCE {index:>2} {name}: {status} ({elapsed:.2f}s{budget})")
    assert not failed, f"criterion {index} failed: {sorted(failed)}"
    if limit is not None:
        assert elapsed < limit, f"criterion {index} exceeded runtime limit ({elapsed:.1f}s > {limit}s)"


def test_criterion_01_two_qubit_closed_forms():
    started = time.perf_counter()
    spec = two_qubit_model()
    amps = perturbation_amplitudes(spec)
    gs = ground_state(assemble(spec, "full", 1.0))
    purity, s2 = renyi2(partial_trace_b(gs.vector, spec.bipartition))
    limit = chi_e_fd(spec)
    checks = {
        "chi_E_exact": abs(chi_e(amps) - 1.0 / 16.0) < 1e-12,
        "chi_F_exact": abs(chi_f(amps) - 1.0 / 16.0) < 1e-12,
        "purity_0.9": abs(purity - 0.9) < 1e-10,
        "S2_ln10over9": abs(s2 - np.log(10.0 / 9.0)) < 1e-10,
        "richardson_limit": abs(limit.value - 1.0 / 16.0) < 1e-6,
    }
    report(1, "two-qubit closed forms", started, 1.0, checks)


def test_criterion_02_bound_chain():
    started = time.perf_counter()
    violations = 0
    for spec in corpus():
        rep = susceptibility_report(spec)
        if not rep.chain_satisfied(1e-9):
            violations += 1
    checks = {"200_specs": len(corpus()) >= 200, "zero_violations": violations == 0}
    report(2, "bound chain over seeded corpus", started, 120.0, checks)


def test_criterion_03_perturbative_consistency():
    started = time.perf_counter()
    spec = tfim_chain(10, h=2.0, cut=5)
    lam = 1e-2
    xe = chi_e(perturbation_amplitudes(spec))
    ratio = s2_at(spec, lam) / (2.0 * lam**2 * xe)
    f, n = fidelity_vs_normalization(spec, lam)
    checks = {
        "series_ratio_5pct": abs(ratio - 1.0) <= 0.05,
        "fidelity_identity_1e-4": abs(f - n) <= 1e-4,
    }
    report(3, "perturbative consistency (10-spin TFIM)", started, 60.0, checks)


def test_criterion_04_swap_and_doubled_identity():
    started = time.perf_counter()
    small = [s for s in corpus() if s.lattice.num_sites <= 6]
    worst_swap = 0.0
    worst_twist = 0.0
    for spec in small:
        gs = ground_state(assemble(spec, "full", 1.0))
        purity = renyi2(partial_trace_b(gs.vector, spec.bipartition))[0]
        worst_swap = max(worst_swap, abs(swap_purity(gs.vector, spec.bipartition) - purity))
        ov, pur = twisted_ground_overlap(spec, 1.0)
        worst_twist = max(worst_twist, abs(ov - pur))
    checks = {
        "nonempty": len(small) > 0,
        "swap_1e-12": worst_swap <= 1e-12,
        "twisted_1e-9": worst_twist <= 1e-9,
    }
    report(4, f"swap/doubled identity ({len(small)} specs)", started, None, checks)


def test_criterion_05_cumulant_series():
    started = time.perf_counter()
    worst_resid = 0.0
    worst_b2 = 0.0
    tested = 0
    for spec in corpus():
        xf = chi_f(perturbation_amplitudes(spec))
        if xf < 1e-10:
            continue
        series = cumulants(spec)
        worst_resid = max(worst_resid, float(series.fit_residuals[1]))
        worst_b2 = max(worst_b2, abs(series.intercept(2) + xf) / xf)
        tested += 1
    checks = {
        "corpus_covered": tested >= 190,
        "c2_residual_1e-6": worst_resid <= 1e-6,
        "b2_matches_chi_f_1pct": worst_b2 <= 0.01,
    }
    report(5, f"cumulant series ({tested} specs)", started, 120.0, checks)


def test_criterion_06_fermion_oracles_and_chain():
    started = time.perf_counter()
    rng = np.random.default_rng(CORPUS_SEED + 1)
    worst_triangle = 0.0
    for _ in range(50):
        model = random_gapped_model(8, rng)
        z = model.coupled(1.0)
        worst_triangle = max(
            worst_triangle, abs(corr_matrix_renyi2(z, model.region_a) - fock_renyi2(z, model.region_a))
        )
    chain_violations = 0
    for _ in range(200):
        model = random_gapped_model(int(rng.integers(6, 24)), rng)
        rep = polar_bound_check(model.z, model.delta_z)  # raises if the Lipschitz bound fails
        if chi_f_polar(model.z, model.delta_z) > rep.rank_rhs * (1.0 + 1e-9):
            chain_violations += 1
    checks = {"triangle_1e-8": worst_triangle <= 1e-8, "eq6_chain": chain_violations == 0}
    report(6, "fermion oracle triangle + polar chain", started, None, checks)


def test_criterion_07_area_law_saturation():
    started = time.perf_counter()
    fermion_vals = [chi_f_polar(m.z, m.delta_z) for m in (dimerized_chain(512), dimerized_chain(1024))]
    fermion_rel = abs(fermion_vals[1] - fermion_vals[0]) / fermion_vals[0]
    boson_vals = [
        boson_bound_chain(m.v, m.delta_v).chi_f for m in (harmonic_chain(128), harmonic_chain(256))
    ]
    boson_rel = abs(boson_vals[1] - boson_vals[0]) / boson_vals[0]
    checks = {"fermion_5pct": fermion_rel < 0.05, "boson_5pct": boson_rel < 0.05}
    report(7, "gapped area-law saturation", started, None, checks)


def test_criterion_08_logarithmic_violation():
    started = time.perf_counter()
    sizes_1d = [64, 128, 256, 512, 1024, 2048, 4096]
    vals_1d = [tight_binding_chi_e(half_space_spec(1, size)) for size in sizes_1d]
    fit_1d = scaling_fit(sizes_1d, vals_1d, dim=1)

    sizes_2d = [16, 24, 32, 48, 64, 80, 96]
    vals_2d = [
        tight_binding_chi_e(TightBindingSpec(dim=2, transverse_length=size, width_a=size, width_b=size))
        for size in sizes_2d
    ]
    fit_2d = scaling_fit(sizes_2d, vals_2d, dim=2)
    checks = {
        "d1_r_squared_0.999": fit_1d.r_squared >= 0.999,
        "d1_log_term_5_sigma": fit_1d.log_coefficient > 0 and fit_1d.log_significance > 5.0,
        "d2_log_term_3_sigma": fit_2d.log_coefficient > 0 and fit_2d.log_significance > 3.0,
    }
    report(8, "logarithmic area-law violation", started, 600.0, checks)


def test_criterion_09_boson_fidelity_exactness():
    started = time.perf_counter()
    rng = np.random.default_rng(CORPUS_SEED + 2)
    worst_quad = 0.0
    for _ in range(3):
        v1 = np.array([[float(rng.uniform(0.5, 4.0))]])
        v2 = np.array([[float(rng.uniform(0.5, 4.0))]])
        worst_quad = max(worst_quad, abs(gaussian_fidelity(v1, v2) - quadrature_overlap(v1, v2)))
    for _ in range(3):
        v1 = random_spd(rng, 2, floor=0.4)
        v2 = random_spd(rng, 2, floor=0.4)
        worst_quad = max(worst_quad, abs(gaussian_fidelity(v1, v2) - quadrature_overlap(v1, v2)))
    worst_mult = 0.0
    for _ in range(5):
        va, vb = random_spd(rng, 3), random_spd(rng, 2)
        da = 0.2 * np.diag(rng.uniform(0.5, 1.0, 3))
        db = 0.2 * np.diag(rng.uniform(0.5, 1.0, 2))
        blk = np.block
        lhs = gaussian_fidelity(
            blk([[va, np.zeros((3, 2))], [np.zeros((2, 3)), vb]]),
            blk([[va + da, np.zeros((3, 2))], [np.zeros((2, 3)), vb + db]]),
        )
        worst_mult = max(worst_mult, abs(lhs - gaussian_fidelity(va, va + da) * gaussian_fidelity(vb, vb + db)))
    checks = {"quadrature_1e-10": worst_quad <= 1e-10, "multiplicative_1e-10": worst_mult <= 1e-10}
    report(9, "boson fidelity exactness", started, None, checks)


def test_criterion_10_determinism():
    started = time.perf_counter()
    plan_base = dict(
        family="tfim",
        quantities=("S2", "chi_E", "chi_F", "bounds"),
        sizes=(4, 6, 8),
        lambdas=(0.01, 0.02, 0.04),
        params={"h": 1.6},
        seed=99,
    )
    texts = []
    for threads in (1, 8):
        rows = run_sweep(SweepPlan(threads=threads, **plan_base))
        texts.append(rows_to_text(rows, fmt="csv", config_hash="fixed", seed=99))
    verify_jsons = [run_verification(seed=CORPUS_SEED, quick=True).to_json() for _ in range(2)]
    checks = {
        "sweep_byte_identical": texts[0] == texts[1],
        "verify_byte_identical": verify_jsons[0] == verify_jsons[1],
    }
    report(10, "byte-level determinism", started, None, checks)
