"""Experiment protocol: seeded run grids, summary statistics and ranking.

A plan is a grid of (variant, function, run) cells.  Each cell gets its own
stream seed derived from the master seed, so cells are independent,
reorderable and individually reproducible.  Records are journaled to CSV as
they complete (in canonical cell order), which lets an interrupted plan
resume without re-running finished cells and still produce byte-identical
reports.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from . import backends
from .benchmarks import FE_LIMITS, FUNCTION_CODES, FUNCTION_IDS, get_function, suite
from .distributions import KIND_CODES, KINDS, PerturbationSpec
from .engine import Parameters, default_parameters
from .rng import derive_seed

VARIANTS = KINDS  # one engine variant per perturbation law

RUNS_HEADER = "function,variant,run,seed,best,fe_used,wall_ms"
SUMMARY_HEADER = "function,variant,mean,std,best,rank"
CATEGORY_HEADER = "category,variant,avg_rank"

# engine knobs that a per-function override may replace
_PARAM_KEYS = ("pop_size", "step_size", "en_buff", "ini_ke", "coll_rate",
               "loss_rate", "dec_thres", "syn_thres", "fe_limit")


class IncompletePlanError(RuntimeError):
    """Raised when summaries are requested over records with missing cells."""


def _fmt(x: float) -> str:
    # lossless scientific notation (17 significant digits)
    return f"{x:.16E}"


@dataclass(frozen=True)
class RunRecord:
    function: str
    variant: str
    run: int
    seed: int
    best: float
    fe_used: int
    wall_ms: float

    def to_csv(self) -> str:
        return (f"{self.function},{self.variant},{self.run},{self.seed},"
                f"{_fmt(self.best)},{self.fe_used},{self.wall_ms:.3f}")

    @classmethod
    def from_csv(cls, line: str) -> "RunRecord":
        func, variant, run, seed, best, fe_used, wall = line.split(",")
        return cls(func, variant, int(run), int(seed), float(best),
                   int(fe_used), float(wall))


@dataclass(frozen=True)
class SummaryRow:
    function: str
    variant: str
    mean: float
    std: float
    best: float
    rank: int

    def to_csv(self) -> str:
        return (f"{self.function},{self.variant},{_fmt(self.mean)},"
                f"{_fmt(self.std)},{_fmt(self.best)},{self.rank}")


@dataclass
class ExperimentPlan:
    variants: tuple[str, ...] = VARIANTS
    functions: tuple[str, ...] = FUNCTION_IDS
    runs: int = 100
    master_seed: int = 1
    overrides: dict = field(default_factory=dict)  # function id -> {knob: value}
    parallelism: int = 1

    def __post_init__(self):
        for v in self.variants:
            if v not in VARIANTS:
                raise ValueError(f"unknown variant {v!r}; expected one of {VARIANTS}")
        for f in self.functions:
            if f not in FUNCTION_CODES:
                raise ValueError(f"unknown function {f!r}; expected f1..f23")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.parallelism < 1:
            raise ValueError(f"parallelism must be >= 1, got {self.parallelism}")
        for fid, ov in self.overrides.items():
            if fid not in FUNCTION_CODES:
                raise ValueError(f"override for unknown function {fid!r}")
            for key in ov:
                if key not in _PARAM_KEYS:
                    raise ValueError(f"unknown override key {key!r} for {fid}")
        # canonical order regardless of how the subsets were written
        self.variants = tuple(sorted(set(self.variants), key=VARIANTS.index))
        self.functions = tuple(sorted(set(self.functions),
                                      key=lambda f: FUNCTION_CODES[f]))

    def cell_seed(self, variant: str, function: str, run: int) -> int:
        return derive_seed(self.master_seed, KIND_CODES[variant],
                           FUNCTION_CODES[function], run)

    def cells(self) -> list[tuple[str, str, int]]:
        """All (function, variant, run) cells in canonical order."""
        return [(f, v, r)
                for f in self.functions
                for v in self.variants
                for r in range(self.runs)]

    def cell_setup(self, function: str, variant: str) -> tuple[Parameters, int]:
        """Engine parameters and evaluation budget for one cell."""
        problem = get_function(function)
        params = default_parameters(problem)
        fe_limit = FE_LIMITS[function]
        ov = self.overrides.get(function, {})
        for key, value in ov.items():
            if key == "fe_limit":
                fe_limit = int(value)
            elif key in ("pop_size", "dec_thres"):
                setattr(params, key, int(value))
            else:
                setattr(params, key, float(value))
        return params.validate(), fe_limit


def _execute_cell(args) -> RunRecord:
    (function, variant, run, seed, fe_limit, pop_size, step_size, en_buff,
     ini_ke, coll_rate, loss_rate, dec_thres, syn_thres) = args
    problem = get_function(function)
    params = Parameters(pop_size, step_size, en_buff, ini_ke,
                        coll_rate, loss_rate, dec_thres, syn_thres)
    spec = PerturbationSpec(variant, step_size)
    result = backends.run_cell(problem, params, spec, seed, fe_limit)
    return RunRecord(function, variant, run, seed, result.best_value,
                     result.fe_used, result.wall_ms)


def _cell_args(plan: ExperimentPlan, function: str, variant: str, run: int):
    params, fe_limit = plan.cell_setup(function, variant)
    seed = plan.cell_seed(variant, function, run)
    return (function, variant, run, seed, fe_limit, params.pop_size,
            params.step_size, params.en_buff, params.ini_ke, params.coll_rate,
            params.loss_rate, params.dec_thres, params.syn_thres)


def load_records(path: str) -> list[RunRecord]:
    """Parse a run-record CSV; tolerates a torn trailing line from a crash."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        content = fh.read()
    lines = content.split("\n")
    if content and not content.endswith("\n"):
        lines = lines[:-1]  # torn write, drop it
    for lineno, line in enumerate(lines):
        if not line:
            continue
        if lineno == 0:
            if line != RUNS_HEADER:
                raise ValueError(f"{path}: unexpected header {line!r}")
            continue
        try:
            records.append(RunRecord.from_csv(line))
        except ValueError:
            if lineno == len(lines) - 1:
                continue  # torn but newline survived
            raise
    return records


def export_records(records: Iterable[RunRecord], path: str):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(RUNS_HEADER + "\n")
        for rec in records:
            fh.write(rec.to_csv() + "\n")
    os.replace(tmp, path)


def run_plan(plan: ExperimentPlan, out_dir: Optional[str] = None,
             on_record=None, stop_after: Optional[int] = None) -> list[RunRecord]:
    """Execute all missing cells of `plan`, journaling to out_dir/runs.csv.

    Completed cells found in the journal are not re-run.  `stop_after`
    limits how many new cells run before returning (used to exercise the
    interrupt/resume path).  Records come back in canonical cell order.
    """
    cells = plan.cells()
    wanted = set(cells)
    done: dict[tuple[str, str, int], RunRecord] = {}
    journal_path = None
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        journal_path = os.path.join(out_dir, "runs.csv")
        if os.path.exists(journal_path):
            for rec in load_records(journal_path):
                key = (rec.function, rec.variant, rec.run)
                if key not in wanted:
                    raise ValueError(
                        f"{journal_path} holds a record for {key}, which is not "
                        f"in this plan; refusing to mix experiments")
                done[key] = rec
            # rewrite in canonical order so the journal is append-clean
            export_records([done[c] for c in cells if c in done], journal_path)

    pending = [c for c in cells if c not in done]
    if stop_after is not None:
        pending = pending[:stop_after]
    journal = open(journal_path, "a", encoding="utf-8") if journal_path else None
    if journal is not None and not done and os.path.getsize(journal_path) == 0:
        journal.write(RUNS_HEADER + "\n")
        journal.flush()
    try:
        args = [_cell_args(plan, f, v, r) for (f, v, r) in pending]
        if plan.parallelism > 1 and len(pending) > 1:
            with ProcessPoolExecutor(max_workers=plan.parallelism) as pool:
                results = pool.map(_execute_cell, args)
                for rec in results:
                    done[(rec.function, rec.variant, rec.run)] = rec
                    if journal is not None:
                        journal.write(rec.to_csv() + "\n")
                        journal.flush()
                    if on_record is not None:
                        on_record(rec)
        else:
            for a in args:
                rec = _execute_cell(a)
                done[(rec.function, rec.variant, rec.run)] = rec
                if journal is not None:
                    journal.write(rec.to_csv() + "\n")
                    journal.flush()
                if on_record is not None:
                    on_record(rec)
    finally:
        if journal is not None:
            journal.close()
    return [done[c] for c in cells if c in done]


def summarize(records: Sequence[RunRecord],
              runs: Optional[int] = None) -> list[SummaryRow]:
    """Per-(function, variant) mean, population std and best, plus ranks.

    Values are sorted before accumulation, so the statistics are exactly
    permutation-invariant in record order.  Raises IncompletePlanError when
    any present (function, variant) pair is missing runs.
    """
    groups: dict[tuple[str, str], dict[int, float]] = {}
    for rec in records:
        cell = groups.setdefault((rec.function, rec.variant), {})
        cell[rec.run] = rec.best
    if not groups:
        return []
    expected = runs if runs is not None else max(len(g) for g in groups.values())
    gaps = []
    for (function, variant), cell in sorted(groups.items()):
        missing = [r for r in range(expected) if r not in cell]
        if missing or len(cell) != expected:
            gaps.append(f"{function}/{variant}: missing runs {missing}")
    if gaps:
        raise IncompletePlanError("incomplete records: " + "; ".join(gaps))

    rows = []
    for (function, variant), cell in groups.items():
        values = sorted(cell.values())
        n = len(values)
        total = 0.0
        for v in values:
            total += v
        mean = total / n
        var = 0.0
        for v in values:
            d = v - mean
            var += d * d
        std = math.sqrt(var / n)
        rows.append(SummaryRow(function, variant, mean, std, values[0], 0))

    # competition ranks per function, then a stable canonical ordering
    ranked = []
    functions = sorted({r.function for r in rows}, key=lambda f: FUNCTION_CODES[f])
    for function in functions:
        in_func = [r for r in rows if r.function == function]
        ranks = rank_variants({r.variant: r.mean for r in in_func})
        for row in sorted(in_func, key=lambda r: KIND_CODES[r.variant]):
            ranked.append(replace(row, rank=ranks[row.variant]))
    return ranked


def rank_variants(means: dict[str, float]) -> dict[str, int]:
    """Competition ranking: lower mean is better, ties share the best rank."""
    return {v: 1 + sum(1 for other in means.values() if other < m)
            for v, m in means.items()}


def category_average_ranks(rows: Sequence[SummaryRow]) -> list[tuple[str, str, float]]:
    """Mean rank per (category, variant) over that category's functions."""
    by_cat: dict[tuple[str, str], list[int]] = {}
    cat_of = {fn.id: fn.category for fn in suite()}
    for row in rows:
        by_cat.setdefault((cat_of[row.function], row.variant), []).append(row.rank)
    out = []
    for (category, variant), ranks in sorted(
            by_cat.items(), key=lambda kv: (kv[0][0], KIND_CODES[kv[0][1]])):
        out.append((category, variant, sum(ranks) / len(ranks)))
    return out


def export_summary(rows: Iterable[SummaryRow], path: str):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for row in rows:
            fh.write(row.to_csv() + "\n")
    os.replace(tmp, path)


def load_summary(path: str) -> list[SummaryRow]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh.read().splitlines()):
            if lineno == 0:
                if line != SUMMARY_HEADER:
                    raise ValueError(f"{path}: unexpected header {line!r}")
                continue
            if not line:
                continue
            func, variant, mean, std, best, rank = line.split(",")
            rows.append(SummaryRow(func, variant, float(mean), float(std),
                                   float(best), int(rank)))
    return rows


def export_category_report(entries: Iterable[tuple[str, str, float]], path: str):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(CATEGORY_HEADER + "\n")
        for category, variant, avg in entries:
            fh.write(f"{category},{variant},{_fmt(avg)}\n")
    os.replace(tmp, path)
