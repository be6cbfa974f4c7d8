import json

from entsus.lattice import (
    SIGMA_X,
    Bipartition,
    HamiltonianSpec,
    OperatorTerm,
    chain,
    classify_terms,
)
from entsus.verify import run_verification


def gapless_spec():
    # only a crossing term: both factor Hamiltonians vanish, so H(0) is gapless
    lat = chain(2)
    terms = (OperatorTerm(support=(0, 1), coefficient=1.0, factors=(SIGMA_X, SIGMA_X)),)
    return classify_terms(
        HamiltonianSpec(lattice=lat, terms=terms, bipartition=Bipartition(region_a=(0,), num_sites=2))
    )


def test_quick_verification_passes():
    report = run_verification(quick=True)
    assert report.passed
    names = {r.name for r in report.results}
    assert {"two_qubit_closed_forms", "bound_chain", "cumulant_series", "boson_suite"} <= names


def test_injected_gapless_spec_is_skipped_not_failed():
    report = run_verification(quick=True, extra_specs=[gapless_spec()])
    assert report.passed
    chain_check = next(r for r in report.results if r.name == "bound_chain")
    assert "1 skipped-gapless" in chain_check.detail


def test_report_serialization_contains_histogram():
    report = run_verification(quick=True)
    payload = json.loads(report.to_json())
    assert payload["passed"] is True
    hist = payload["chi_ratio_histogram"]
    assert len(hist) == 10
    assert sum(hist.values()) > 0
    text = report.to_text()
    assert "ALL CHECKS PASSED" in text
