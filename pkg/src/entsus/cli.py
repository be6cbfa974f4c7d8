"""Command-line interface.

Subcommands: chi, sweep, fermion, boson, tightbinding, cumulants, verify.
Exit codes: 0 success, 1 verification failure, 2 config error, 3 capacity
error.
"""

import argparse
import sys

from .errors import CapacityError, ConfigError, EntsusError


def _common_flags(parser):
    parser.add_argument("--config", help="TOML config path")
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--threads", type=int, default=None, help="worker threads for grid points")
    parser.add_argument("--seed", type=int, default=None, help="64-bit corpus/provenance seed")
    parser.add_argument("--timings", action="store_true", help="keep measured wall times (breaks byte determinism)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entsus", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("chi", "susceptibilities and bound chain for one configured spec"),
        ("sweep", "run the configured parameter grid"),
        ("fermion", "polar-factor suite on the dimerized fermion chain"),
        ("boson", "Gaussian fidelity suite on the harmonic chain"),
        ("tightbinding", "momentum-sum chi_E sweep and scaling fit"),
        ("cumulants", "imaginary-time cumulant suite"),
        ("verify", "run the full property suite over the built-in corpus"),
    ):
        p = sub.add_parser(name, help=help_text)
        _common_flags(p)
        if name == "verify":
            p.add_argument("--quick", action="store_true", help="smaller corpus for fast iteration")
        if name == "tightbinding":
            p.add_argument("--plot-data", help="write two-column (L, chi_E) data here")
    return parser


def _load(args) -> dict:
    if not args.config:
        raise ConfigError("--config", "this command requires a config file")
    from .config import load_config

    return load_config(args.config)


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _write_rows(args, cfg, plan, rows):
    from .config import config_hash
    from .sweep import rows_to_text

    text = rows_to_text(rows, fmt=args.format, config_hash=config_hash(cfg, plan.seed), seed=plan.seed)
    _emit(args, text)


def _forced_plan(cfg, args, family, quantities):
    from .sweep import plan_from_config

    base = dict(cfg)
    base["model"] = dict(cfg.get("model", {}))
    base["model"]["name"] = family
    base.setdefault("sweep", {})
    base["sweep"] = dict(base["sweep"])
    base["sweep"]["quantities"] = list(quantities)
    plan = plan_from_config(base, seed=args.seed, threads=args.threads)
    return base, plan


def cmd_chi(args) -> int:
    from .config import bipartition_rule, expect_type, family_name, lookup, model_params
    from .models import build_model
    from .susceptibility import susceptibility_report

    cfg = _load(args)
    name = family_name(cfg)
    dims = lookup(cfg, "lattice.dims")
    size = int(dims[0]) if isinstance(dims, list) else int(dims)
    rule = bipartition_rule(cfg)
    spec = build_model(name, size, cut=None if rule == "half" else rule, **model_params(cfg))
    xi = expect_type(cfg, "sweep.xi", float, None)
    rep = susceptibility_report(spec, xi=xi)
    lines = [
        f"model           {name} (L={size}, |dA|={rep.boundary_size})",
        f"chi_E           {rep.chi_e!r}",
        f"chi_F           {rep.chi_f!r}",
        f"correlator_bound {rep.correlator_bound!r}",
        f"gap             {rep.gap!r}",
        f"max_term_norm   {rep.max_term_norm!r}",
    ]
    if rep.area_bound is not None:
        lines.append(f"area_bound      {rep.area_bound!r}")
    lines.append(f"chain_satisfied {rep.chain_satisfied()}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_sweep(args) -> int:
    from .sweep import plan_from_config, run_sweep

    cfg = _load(args)
    plan = plan_from_config(cfg, seed=args.seed, threads=args.threads)
    rows = run_sweep(plan, keep_timings=args.timings)
    _write_rows(args, cfg, plan, rows)
    return 0


def _suite_command(args, family, quantities) -> int:
    from .sweep import run_sweep

    cfg = _load(args)
    cfg2, plan = _forced_plan(cfg, args, family, quantities)
    rows = run_sweep(plan, keep_timings=args.timings)
    _write_rows(args, cfg2, plan, rows)
    return 0


def cmd_fermion(args) -> int:
    return _suite_command(args, "fermion_dimer", ("chi_F", "bounds"))


def cmd_boson(args) -> int:
    return _suite_command(args, "boson_chain", ("chi_F", "fidelity", "bounds"))


def cmd_tightbinding(args) -> int:
    from .sweep import run_sweep

    cfg = _load(args)
    cfg2, plan = _forced_plan(cfg, args, "tight_binding", ("tight_binding", "scaling_fit"))
    rows = run_sweep(plan, keep_timings=args.timings)
    if args.plot_data:
        pairs = [(r.L, r.value) for r in rows if r.quantity == "tight_binding_chi_E" and r.status == "ok"]
        with open(args.plot_data, "w") as f:
            for size, value in sorted(pairs):
                f.write(f"{size} {value!r}\n")
    _write_rows(args, cfg2, plan, rows)
    return 0


def cmd_cumulants(args) -> int:
    from .sweep import run_sweep

    cfg = _load(args)
    from .config import family_name

    cfg2, plan = _forced_plan(cfg, args, family_name(cfg), ("cumulants", "chi_F"))
    rows = run_sweep(plan, keep_timings=args.timings)
    _write_rows(args, cfg2, plan, rows)
    return 0


def cmd_verify(args) -> int:
    from .verify import run_verification

    seed = args.seed if args.seed is not None else 20240501
    report = run_verification(seed=seed, quick=args.quick)
    if args.format == "json":
        _emit(args, report.to_json() + "\n")
    else:
        _emit(args, report.to_text() + "\n")
    return 0 if report.passed else 1


COMMANDS = {
    "chi": cmd_chi,
    "sweep": cmd_sweep,
    "fermion": cmd_fermion,
    "boson": cmd_boson,
    "tightbinding": cmd_tightbinding,
    "cumulants": cmd_cumulants,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except EntsusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
