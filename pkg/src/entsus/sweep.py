"""Deterministic sweep execution and result persistence (CSV / JSON-lines).

Rows are keyed by grid index and sorted before writing, so output bytes do
not depend on the thread count.  Wall-clock timings are measured but
scrubbed to 0 unless explicitly kept, because timing is the one field that
would break byte-level reproducibility.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import __version__
from .config import ALL_FAMILIES, SPIN_FAMILIES
from .errors import CapacityError, ConfigError, EntsusError
from .lattice import assemble
from .solver import ground_state, overlap, partial_trace_b, renyi2

FAMILY_QUANTITIES = {
    **{fam: ("S2", "purity", "fidelity", "chi_E", "chi_F", "bounds", "cumulants") for fam in SPIN_FAMILIES},
    "fermion_dimer": ("chi_F", "bounds"),
    "boson_chain": ("chi_F", "fidelity", "bounds"),
    "tight_binding": ("tight_binding", "scaling_fit"),
}


@dataclass(frozen=True)
class SweepPlan:
    family: str
    quantities: tuple[str, ...]
    sizes: tuple[int, ...]
    lambdas: tuple[float, ...]
    params: dict
    bipartition_rule: object = "half"
    xi: float | None = None
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.family not in ALL_FAMILIES:
            raise ConfigError("model.name", f"unknown family {self.family!r}")
        if not self.quantities:
            raise ConfigError("sweep.quantities", "quantity list is empty")
        allowed = FAMILY_QUANTITIES[self.family]
        for q in self.quantities:
            if q not in allowed:
                raise ConfigError(
                    "sweep.quantities", f"{q!r} not valid for family {self.family!r}; allowed: {list(allowed)}"
                )
        if not self.sizes:
            raise ConfigError("sweep.sizes", "size grid is empty")
        if self.threads < 1:
            raise ConfigError("sweep.threads", "thread count must be >= 1")


@dataclass(frozen=True)
class ResultRow:
    model_id: str
    d: int
    L: int
    L_A: int
    lam: float
    quantity: str
    value: float
    error_estimate: float | None
    wall_time_ms: float
    code_version: str
    status: str = "ok"

    def __post_init__(self):
        if self.status == "ok" and not np.isfinite(self.value):
            raise EntsusError(f"non-finite value in result row for {self.quantity}")
        if self.error_estimate is not None and self.error_estimate < 0:
            raise EntsusError("error estimate must be nonnegative")


def plan_from_config(cfg: dict, seed: int | None = None, threads: int | None = None) -> SweepPlan:
    from .config import bipartition_rule, expect_type, family_name, lookup, model_params

    family = family_name(cfg)
    quantities = lookup(cfg, "sweep.quantities", None)
    if not isinstance(quantities, list) or not quantities:
        raise ConfigError("sweep.quantities", "expected a nonempty list")
    sizes = lookup(cfg, "sweep.sizes", None)
    if sizes is None:
        dims = lookup(cfg, "lattice.dims", None)
        sizes = [int(np.prod(dims))] if dims else None
    if not sizes:
        raise ConfigError("sweep.sizes", "expected a nonempty list (or lattice.dims)")
    lambdas = lookup(cfg, "sweep.lambdas", [1.0])
    xi = lookup(cfg, "sweep.xi", None)
    return SweepPlan(
        family=family,
        quantities=tuple(str(q) for q in quantities),
        sizes=tuple(int(s) for s in sizes),
        lambdas=tuple(float(x) for x in lambdas),
        params=model_params(cfg),
        bipartition_rule=bipartition_rule(cfg),
        xi=float(xi) if xi is not None else None,
        seed=int(seed if seed is not None else expect_type(cfg, "sweep.seed", int, 0)),
        threads=int(threads if threads is not None else expect_type(cfg, "sweep.threads", int, 1)),
    )


# -- quantity evaluators ------------------------------------------------------


def _spin_spec(plan: SweepPlan, size: int):
    from .models import build_model

    rule = plan.bipartition_rule
    cut = None if rule == "half" else rule
    return build_model(plan.family, size, cut=cut, **plan.params)


def _row(plan, size, lam, quantity, value, err=None, d=1, size_a=None):
    return ResultRow(
        model_id=plan.family,
        d=d,
        L=size,
        L_A=size_a if size_a is not None else size // 2,
        lam=lam,
        quantity=quantity,
        value=float(value),
        error_estimate=err,
        wall_time_ms=0.0,
        code_version=__version__,
        status="ok",
    )


def _eval_spin_lambda_point(plan: SweepPlan, size: int, lam: float):
    from .susceptibility import product_ground_state

    spec = _spin_spec(plan, size)
    rows = []
    wanted = set(plan.quantities)
    gs = ground_state(assemble(spec, "full", lam))
    size_a = spec.bipartition.size_a
    if {"S2", "purity"} & wanted:
        purity, s2 = renyi2(partial_trace_b(gs.vector, spec.bipartition, spec.lattice.local_dim))
        if "S2" in wanted:
            rows.append(_row(plan, size, lam, "S2", s2, size_a=size_a))
        if "purity" in wanted:
            rows.append(_row(plan, size, lam, "purity", purity, size_a=size_a))
    if "fidelity" in wanted:
        _, psi0 = product_ground_state(spec)
        rows.append(_row(plan, size, lam, "fidelity", overlap(psi0, gs.vector), size_a=size_a))
    return rows


def _eval_spin_size_point(plan: SweepPlan, size: int):
    from . import susceptibility as su
    from .cumulants import cumulants

    spec = _spin_spec(plan, size)
    rows = []
    wanted = set(plan.quantities)
    size_a = spec.bipartition.size_a
    if {"chi_E", "chi_F", "bounds"} & wanted:
        rep = su.susceptibility_report(spec, xi=plan.xi)
        if "chi_E" in wanted:
            rows.append(_row(plan, size, 0.0, "chi_E", rep.chi_e, size_a=size_a))
        if "chi_F" in wanted:
            rows.append(_row(plan, size, 0.0, "chi_F", rep.chi_f, size_a=size_a))
        if "bounds" in wanted:
            rows.append(_row(plan, size, 0.0, "correlator_bound", rep.correlator_bound, size_a=size_a))
            rows.append(_row(plan, size, 0.0, "gap", rep.gap, size_a=size_a))
            if rep.area_bound is not None:
                rows.append(_row(plan, size, 0.0, "area_bound", rep.area_bound, size_a=size_a))
    if "cumulants" in wanted:
        from .susceptibility import chi_f, perturbation_amplitudes

        series = cumulants(spec)
        for n in range(1, series.n_max + 1):
            rows.append(_row(plan, size, 0.0, f"cumulant_A{n}", series.slope(n), size_a=size_a))
            rows.append(_row(plan, size, 0.0, f"cumulant_B{n}", series.intercept(n), size_a=size_a))
        xf = chi_f(perturbation_amplitudes(spec))
        if xf > 0:
            rows.append(
                _row(plan, size, 0.0, "b2_plus_chi_f_rel", abs(series.intercept(2) + xf) / xf, size_a=size_a)
            )
    return rows


def _eval_fermion_size_point(plan: SweepPlan, size: int):
    from .fermion import chi_f_polar, dimerized_chain, polar_bound_check

    t1 = float(plan.params.get("t1", 1.5))
    t2 = float(plan.params.get("t2", 0.5))
    model = dimerized_chain(size, t1=t1, t2=t2)
    rows = []
    if "chi_F" in plan.quantities:
        rows.append(_row(plan, size, 0.0, "chi_F", chi_f_polar(model.z, model.delta_z)))
    if "bounds" in plan.quantities:
        rep = polar_bound_check(model.z, model.delta_z)
        rows.append(_row(plan, size, 0.0, "polar_lipschitz_lhs", rep.delta_t_norm))
        rows.append(_row(plan, size, 0.0, "polar_lipschitz_rhs", rep.lipschitz_rhs))
        rows.append(_row(plan, size, 0.0, "rank_bound", rep.rank_rhs))
    return rows


def _eval_boson_size_point(plan: SweepPlan, size: int):
    from .boson import boson_bound_chain, gaussian_fidelity, harmonic_chain

    coupling = float(plan.params.get("coupling", 1.0))
    pinning = float(plan.params.get("pinning", 0.5))
    model = harmonic_chain(size, coupling=coupling, pinning=pinning)
    rows = []
    if "fidelity" in plan.quantities:
        rows.append(_row(plan, size, 1.0, "fidelity", gaussian_fidelity(model.v, model.coupled(1.0))))
    if {"chi_F", "bounds"} & set(plan.quantities):
        rep = boson_bound_chain(model.v, model.delta_v)
        if "chi_F" in plan.quantities:
            rows.append(_row(plan, size, 0.0, "chi_F", rep.chi_f))
        if "bounds" in plan.quantities:
            rows.append(_row(plan, size, 0.0, "covariance_stage", rep.covariance_stage))
            rows.append(_row(plan, size, 0.0, "rank_stage", rep.rank_stage))
            rows.append(_row(plan, size, 0.0, "gap", rep.gap))
    return rows


def _tb_spec(plan: SweepPlan, size: int):
    from .tightbinding import TightBindingSpec

    dim = int(plan.params.get("dim", 1))
    widths = plan.params.get("widths", "half" if dim == 1 else "equal")
    filling = plan.params.get("filling", "half")
    if widths == "half":
        if size % 2:
            raise ConfigError("sweep.sizes", f"size {size} must be even for half widths")
        wa = wb = size // 2
    elif widths == "equal":
        wa = wb = size
    else:
        raise ConfigError("model.params.widths", "expected 'half' or 'equal'")
    return TightBindingSpec(dim=dim, transverse_length=size, width_a=wa, width_b=wb, filling=filling)


def _eval_tb_size_point(plan: SweepPlan, size: int):
    from .tightbinding import tight_binding_chi_e

    spec = _tb_spec(plan, size)
    value = tight_binding_chi_e(spec)
    return [_row(plan, size, 0.0, "tight_binding_chi_E", value, d=spec.dim, size_a=spec.width_a)]


def _scaling_fit_rows(plan: SweepPlan, rows):
    from .tightbinding import scaling_fit

    pairs = sorted((r.L, r.value) for r in rows if r.quantity == "tight_binding_chi_E" and r.status == "ok")
    if len(pairs) < 5:
        return []
    dim = int(plan.params.get("dim", 1))
    fit = scaling_fit([p[0] for p in pairs], [p[1] for p in pairs], dim)
    size = max(p[0] for p in pairs)
    return [
        _row(plan, size, 0.0, "fit_log_coefficient", fit.log_coefficient, err=fit.log_coefficient_stderr, d=dim),
        _row(plan, size, 0.0, "fit_linear_coefficient", fit.linear_coefficient, d=dim),
        _row(plan, size, 0.0, "fit_constant", fit.constant, d=dim),
        _row(plan, size, 0.0, "fit_r_squared", fit.r_squared, d=dim),
    ]


def _tasks(plan: SweepPlan):
    tasks = []
    if plan.family in SPIN_FAMILIES:
        lambda_quantities = {"S2", "purity", "fidelity"} & set(plan.quantities)
        for size in plan.sizes:
            if {"chi_E", "chi_F", "bounds", "cumulants"} & set(plan.quantities):
                tasks.append((_eval_spin_size_point, (plan, size)))
            if lambda_quantities:
                for lam in plan.lambdas:
                    tasks.append((_eval_spin_lambda_point, (plan, size, lam)))
    elif plan.family == "fermion_dimer":
        tasks = [(_eval_fermion_size_point, (plan, size)) for size in plan.sizes]
    elif plan.family == "boson_chain":
        tasks = [(_eval_boson_size_point, (plan, size)) for size in plan.sizes]
    elif plan.family == "tight_binding":
        tasks = [(_eval_tb_size_point, (plan, size)) for size in plan.sizes]
    return tasks


def _run_task(task):
    func, args = task
    plan, size = args[0], args[1]
    start = time.perf_counter()
    try:
        rows = func(*args)
    except EntsusError as exc:
        rows = [
            ResultRow(
                model_id=plan.family,
                d=int(plan.params.get("dim", 1)),
                L=size,
                L_A=size // 2,
                lam=args[2] if len(args) > 2 else 0.0,
                quantity="point",
                value=0.0,
                error_estimate=None,
                wall_time_ms=0.0,
                code_version=__version__,
                status=f"error:{type(exc).__name__}",
            )
        ]
    elapsed = (time.perf_counter() - start) * 1e3
    return [replace(r, wall_time_ms=elapsed) for r in rows]


def _validate_capacity(plan: SweepPlan):
    """Reject plans whose largest grid point cannot fit the dense caps."""
    from .lattice import DENSE_DIMENSION_CAP

    if plan.family in SPIN_FAMILIES:
        local_dim = int(plan.params.get("local_dim", 2))
        biggest = local_dim ** max(plan.sizes)
        if {"S2", "purity", "fidelity", "cumulants"} & set(plan.quantities) and biggest > DENSE_DIMENSION_CAP:
            raise CapacityError(
                f"size {max(plan.sizes)} needs dense dimension {biggest} > cap {DENSE_DIMENSION_CAP}"
            )


def run_sweep(plan: SweepPlan, keep_timings: bool = False) -> list[ResultRow]:
    """Execute the plan; deterministic row order regardless of thread count."""
    _validate_capacity(plan)
    tasks = _tasks(plan)
    if not tasks:
        raise ConfigError("sweep.quantities", "plan produced no grid points")
    results: dict[int, list[ResultRow]] = {}
    if plan.threads == 1:
        for i, task in enumerate(tasks):
            results[i] = _run_task(task)
    else:
        with ThreadPoolExecutor(max_workers=plan.threads) as pool:
            futures = {i: pool.submit(_run_task, task) for i, task in enumerate(tasks)}
            for i, fut in futures.items():
                results[i] = fut.result()
    rows: list[ResultRow] = []
    for i in sorted(results):
        rows.extend(results[i])
    if plan.family == "tight_binding" and "scaling_fit" in plan.quantities:
        rows.extend(_scaling_fit_rows(plan, rows))
    if not keep_timings:
        rows = [replace(r, wall_time_ms=0.0) for r in rows]
    return rows


# -- persistence --------------------------------------------------------------

CSV_COLUMNS = (
    "model_id",
    "d",
    "L",
    "L_A",
    "lambda",
    "quantity",
    "value",
    "error_estimate",
    "wall_time_ms",
    "code_version",
    "status",
)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _header_lines(config_hash: str, seed: int) -> list[str]:
    return [
        "# entsus-results v1",
        f"# config_hash={config_hash}",
        f"# code_version={__version__}",
        f"# seed={seed}",
    ]


def rows_to_text(rows, fmt: str = "csv", config_hash: str = "-", seed: int = 0) -> str:
    lines = _header_lines(config_hash, seed)
    if fmt == "csv":
        lines.append(",".join(CSV_COLUMNS))
        for r in rows:
            d = asdict(r)
            d["lambda"] = d.pop("lam")
            lines.append(",".join(_fmt(d[c]) for c in CSV_COLUMNS))
    elif fmt == "json":
        for r in rows:
            d = asdict(r)
            d["lambda"] = d.pop("lam")
            lines.append(json.dumps(d, sort_keys=True))
    else:
        raise ConfigError("format", f"unknown output format {fmt!r}")
    return "\n".join(lines) + "\n"


def parse_rows(text: str) -> list[ResultRow]:
    """Read rows back from CSV or JSON-lines text (header comments skipped)."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = []
    for ln in lines:
        if ln.startswith("{"):
            d = json.loads(ln)
        elif ln.startswith("model_id"):
            continue
        else:
            parts = ln.split(",")
            d = dict(zip(CSV_COLUMNS, parts))
            for key in ("d", "L", "L_A"):
                d[key] = int(d[key])
            for key in ("lambda", "value", "wall_time_ms"):
                d[key] = float(d[key])
            d["error_estimate"] = float(d["error_estimate"]) if d["error_estimate"] else None
        d["lam"] = d.pop("lambda")
        rows.append(ResultRow(**d))
    return rows
