"""Command-line surface: run cells, drive the full suite, audit
distributions and tabulate densities.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import backends, experiment
from .benchmarks import FE_LIMITS, FUNCTION_CODES, FUNCTION_IDS, get_function, suite
from .distributions import KINDS, PerturbationSpec, pdf
from .experiment import ExperimentPlan, SUMMARY_HEADER

CONFIG_KEYS = {
    "distribution": str, "function": str, "pop_size": int, "step_size": float,
    "en_buff": float, "ini_ke": float, "coll_rate": float, "loss_rate": float,
    "dec_thres": int, "syn_thres": float, "fe_limit": int, "runs": int,
    "seed": int, "parallelism": int, "out_dir": str,
}

_OVERRIDE_KEYS = ("pop_size", "step_size", "en_buff", "ini_ke", "coll_rate",
                  "loss_rate", "dec_thres", "syn_thres", "fe_limit")


class ConfigError(ValueError):
    pass


def load_config(path: str) -> dict:
    """Flat `key = value` lines; `#` starts a comment; unknown keys fail."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected `key = value`, got {raw.rstrip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def _parse_functions(text: str) -> tuple[str, ...]:
    """Comma-separated function ids; `fA..fB` expands a contiguous range."""
    if text.strip() in ("all", ""):
        return FUNCTION_IDS
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if ".." in piece:
            lo, _, hi = piece.partition("..")
            if lo not in FUNCTION_CODES or hi.strip() not in FUNCTION_CODES:
                raise ConfigError(f"bad function range {piece!r}")
            for code in range(FUNCTION_CODES[lo], FUNCTION_CODES[hi.strip()] + 1):
                out.append(f"f{code}")
        elif piece in FUNCTION_CODES:
            out.append(piece)
        else:
            raise ConfigError(f"unknown function {piece!r}")
    return tuple(out)


def _parse_variants(text: str) -> tuple[str, ...]:
    if text.strip() in ("all", ""):
        return KINDS
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if piece not in KINDS:
            raise ConfigError(f"unknown distribution {piece!r}; expected one of {KINDS}")
        out.append(piece)
    return tuple(out)


def _merged(args, config: dict, key: str, default=None):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _gather_overrides(args, config: dict) -> dict:
    ov = {}
    for key in _OVERRIDE_KEYS:
        value = _merged(args, config, key)
        if value is not None:
            ov[key] = value
    return ov


def _print_summary(rows):
    print(SUMMARY_HEADER)
    for row in rows:
        print(row.to_csv())


def _write_reports(records, plan, out_dir):
    rows = experiment.summarize(records, runs=plan.runs)
    experiment.export_summary(rows, os.path.join(out_dir, "summary.csv"))
    cats = experiment.category_average_ranks(rows)
    experiment.export_category_report(cats, os.path.join(out_dir, "categories.csv"))
    return rows, cats


def cmd_run(args) -> int:
    config = load_config(args.config) if args.config else {}
    function = _merged(args, config, "function")
    distribution = _merged(args, config, "distribution")
    if function is None or distribution is None:
        raise ConfigError("run needs --function and --distribution (flag or config)")
    if function not in FUNCTION_CODES:
        raise ConfigError(f"unknown function {function!r}")
    if distribution not in KINDS:
        raise ConfigError(f"unknown distribution {distribution!r}")
    runs = int(_merged(args, config, "runs", 100))
    seed = int(_merged(args, config, "seed", 1))
    parallelism = int(_merged(args, config, "parallelism", 1))
    out_dir = _merged(args, config, "out_dir", "crolab_out")
    overrides = _gather_overrides(args, config)
    plan = ExperimentPlan(
        variants=(distribution,), functions=(function,), runs=runs,
        master_seed=seed, overrides={function: overrides} if overrides else {},
        parallelism=parallelism,
    )
    os.makedirs(out_dir, exist_ok=True)
    if args.trace_stride and args.trace_stride > 0:
        records = _run_traced(plan, function, distribution, out_dir, args.trace_stride)
    else:
        records = experiment.run_plan(plan, out_dir=out_dir)
    rows, _ = _write_reports(records, plan, out_dir)
    _print_summary(rows)
    return 0


def _run_traced(plan, function, distribution, out_dir, stride):
    """Single-cell mode with convergence traces; bypasses the resume journal."""
    problem = get_function(function)
    params, fe_limit = plan.cell_setup(function, distribution)
    spec = PerturbationSpec(distribution, params.step_size)
    records = []
    for run in range(plan.runs):
        seed = plan.cell_seed(distribution, function, run)
        result = backends.run_cell(problem, params, spec, seed, fe_limit,
                                   trace_stride=stride)
        records.append(experiment.RunRecord(
            function, distribution, run, seed, result.best_value,
            result.fe_used, result.wall_ms))
        trace_path = os.path.join(out_dir, f"trace_{function}_{distribution}_r{run:03d}.csv")
        with open(trace_path, "w", encoding="utf-8") as fh:
            fh.write("fe_used,best_value\n")
            for fe, best in result.trace:
                fh.write(f"{fe},{best!r}\n")
    experiment.export_records(records, os.path.join(out_dir, "runs.csv"))
    return records


def cmd_suite(args) -> int:
    config = load_config(args.config) if args.config else {}
    functions = _parse_functions(args.functions) if args.functions else FUNCTION_IDS
    variants = _parse_variants(args.distributions) if args.distributions else KINDS
    runs = int(_merged(args, config, "runs", 100))
    seed = int(_merged(args, config, "seed", 1))
    parallelism = int(_merged(args, config, "parallelism", 1))
    out_dir = _merged(args, config, "out_dir", "crolab_out")
    plan = ExperimentPlan(variants=variants, functions=functions, runs=runs,
                          master_seed=seed, parallelism=parallelism)
    total = len(plan.cells())
    ticker = {"n": 0}

    def _tick(rec):
        ticker["n"] += 1
        if args.verbose:
            print(f"[{ticker['n']}/{total}] {rec.function} {rec.variant} "
                  f"run {rec.run}: best {rec.best:.6g}", file=sys.stderr)

    records = experiment.run_plan(plan, out_dir=out_dir, on_record=_tick)
    rows, cats = _write_reports(records, plan, out_dir)
    _print_summary(rows)
    print(experiment.CATEGORY_HEADER)
    for category, variant, avg in cats:
        print(f"{category},{variant},{avg:.2f}")
    return 0


def cmd_sample(args) -> int:
    if args.n < 1:
        raise ConfigError(f"-n must be >= 1, got {args.n}")
    try:
        spec = PerturbationSpec(args.distribution, args.scale)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    values = backends.sample_values(spec, args.n, args.seed)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for v in values:
            out.write(f"{v!r}\n")
    finally:
        if args.out:
            out.close()
    return 0


def cmd_pdf(args) -> int:
    if args.steps < 2:
        raise ConfigError(f"--steps must be >= 2, got {args.steps}")
    if args.x_max <= args.x_min:
        raise ConfigError("--x-max must exceed --x-min")
    try:
        spec = PerturbationSpec(args.distribution, args.scale, args.location)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        out.write("x,pdf\n")
        span = args.x_max - args.x_min
        for i in range(args.steps):
            x = args.x_min + span * i / (args.steps - 1)
            out.write(f"{x!r},{pdf(spec, x)!r}\n")
    finally:
        if args.out:
            out.close()
    return 0


def cmd_bench(args) -> int:
    if args.action != "list":
        raise ConfigError(f"unknown bench action {args.action!r}; expected `list`")

    def _bound(values):
        uniq = set(values)
        if len(uniq) == 1:
            return repr(values[0])
        return ";".join(repr(v) for v in values)

    print("id,name,dim,lower,upper,category,fe_limit")
    for fn in suite():
        print(f"{fn.id},{fn.name},{fn.dim},{_bound(fn.lower)},{_bound(fn.upper)},"
              f"{fn.category},{FE_LIMITS[fn.id]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crolab",
        description="Chemical reaction optimization runs, benchmarks and "
                    "distribution audits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_engine_flags(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--runs", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--parallelism", type=int)
        p.add_argument("--out-dir", dest="out_dir")

    p_run = sub.add_parser("run", help="one (function, distribution) cell set")
    p_run.add_argument("--function")
    p_run.add_argument("--distribution")
    add_engine_flags(p_run)
    p_run.add_argument("--pop-size", dest="pop_size", type=int)
    p_run.add_argument("--step-size", dest="step_size", type=float)
    p_run.add_argument("--en-buff", dest="en_buff", type=float)
    p_run.add_argument("--ini-ke", dest="ini_ke", type=float)
    p_run.add_argument("--coll-rate", dest="coll_rate", type=float)
    p_run.add_argument("--loss-rate", dest="loss_rate", type=float)
    p_run.add_argument("--dec-thres", dest="dec_thres", type=int)
    p_run.add_argument("--syn-thres", dest="syn_thres", type=float)
    p_run.add_argument("--fe-limit", dest="fe_limit", type=int)
    p_run.add_argument("--trace-stride", dest="trace_stride", type=int, default=0,
                       help="emit per-run convergence traces every N evaluations")
    p_run.set_defaults(handler=cmd_run)

    p_suite = sub.add_parser("suite", help="grid of functions x distributions "
                                           "with resume-on-restart")
    p_suite.add_argument("--functions", help="e.g. f1..f7 or f1,f3,f16 or all")
    p_suite.add_argument("--distributions", help="e.g. gaussian,cauchy or all")
    p_suite.add_argument("--verbose", action="store_true")
    add_engine_flags(p_suite)
    p_suite.set_defaults(handler=cmd_suite)

    p_sample = sub.add_parser("sample", help="write seeded variates, one per line")
    p_sample.add_argument("--distribution", required=True)
    p_sample.add_argument("--scale", type=float, required=True)
    p_sample.add_argument("-n", type=int, required=True)
    p_sample.add_argument("--seed", type=int, default=1)
    p_sample.add_argument("--out")
    p_sample.set_defaults(handler=cmd_sample)

    p_pdf = sub.add_parser("pdf", help="tabulate a density as (x, pdf) CSV")
    p_pdf.add_argument("--distribution", required=True)
    p_pdf.add_argument("--scale", type=float, required=True)
    p_pdf.add_argument("--location", type=float, default=0.0)
    p_pdf.add_argument("--x-min", dest="x_min", type=float, required=True)
    p_pdf.add_argument("--x-max", dest="x_max", type=float, required=True)
    p_pdf.add_argument("--steps", type=int, default=201)
    p_pdf.add_argument("--out")
    p_pdf.set_defaults(handler=cmd_pdf)

    p_bench = sub.add_parser("bench", help="inspect the benchmark suite")
    p_bench.add_argument("action", choices=["list"])
    p_bench.set_defaults(handler=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
