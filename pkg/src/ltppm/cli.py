"""Experiment driver: parse a flat key-value plan, run problem x dimension x
seed cells, and write trace/summary/timing CSVs.

Config grammar: one `key = value` per line, `#` starts a comment, lists are
comma-separated.  Keys and defaults:

    problems          required, e.g. lsmop1,lsmop9
    dimensions        1000
    seeds             0
    objectives        3
    n                 300       archive capacity
    offspring_per_gen n         per-generation sample count
    e                 100000    evaluation limit
    r                 0.9       bandwidth attenuation, in (0, 1)
    h0                1.0       initial bandwidth
    step_mode         ceiling | continuous
    kde_space         objective | decision
    reference_points  5000      reference-front size for IGD
    baseline          false     also run the uniform-random control
    out               results   output directory

The environment variable LTPPM_SEED, when set, replaces the seed list.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import metrics, problems
from .metrics import MetricUndefined
from .optimizer import OptimizerConfig, RunTrace, TraceRow, run

TRACE_COLUMNS = ("iter", "evals", "h", "archive_size", "sp", "igd", "elapsed_ms")
SUMMARY_COLUMNS = (
    "problem",
    "dimension",
    "algorithm",
    "runs",
    "final_igd_median",
    "final_igd_mean",
    "final_sp_median",
    "final_sp_mean",
    "wall_ms_mean",
    "errors",
)
TIMING_COLUMNS = ("dimension", "algorithm", "wall_ms_mean", "eval_ms_mean", "overhead_ms_mean")

ALGORITHM_MAIN = "ltppm"
ALGORITHM_BASELINE = "random"

SEED_ENV_VAR = "LTPPM_SEED"


class PlanError(ValueError):
    """Config parse/validation failure, carrying line number and key."""

    def __init__(self, line: int, key: str, message: str):
        super().__init__(f"line {line}: key {key!r}: {message}")
        self.line = line
        self.key = key


@dataclass
class ExperimentPlan:
    problems: list[str]
    dimensions: list[int] = field(default_factory=lambda: [1000])
    seeds: list[int] = field(default_factory=lambda: [0])
    objectives: int = 3
    archive_capacity: int = 300
    offspring_per_gen: int | None = None
    eval_limit: int = 100_000
    attenuation: float = 0.9
    h0: float = 1.0
    step_mode: str = "ceiling"
    kde_space: str = "objective"
    reference_points: int = 5000
    baseline: bool = False
    out: str = "results"

    def optimizer_config(self, seed: int) -> OptimizerConfig:
        return OptimizerConfig(
            archive_capacity=self.archive_capacity,
            offspring_per_gen=self.offspring_per_gen or self.archive_capacity,
            eval_limit=self.eval_limit,
            attenuation=self.attenuation,
            h0=self.h0,
            seed=seed,
            step_mode=self.step_mode,
            kde_space=self.kde_space,
        )


def _parse_int(raw: str, line: int, key: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise PlanError(line, key, f"expected an integer, got {raw!r}") from None


def _parse_float(raw: str, line: int, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise PlanError(line, key, f"expected a number, got {raw!r}") from None


def _parse_bool(raw: str, line: int, key: str) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise PlanError(line, key, f"expected true/false, got {raw!r}")


def parse_plan(text: str) -> ExperimentPlan:
    """Parse and validate a plan document; unknown keys and bad values raise
    PlanError naming the offending line and key.
    """
    values: dict[str, tuple[int, str]] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PlanError(line_no, line.split()[0], "expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key in values:
            raise PlanError(line_no, key, "duplicate key")
        values[key] = (line_no, value)

    known = {
        "problems", "dimensions", "seeds", "objectives", "n", "offspring_per_gen",
        "e", "r", "h0", "step_mode", "kde_space", "reference_points", "baseline", "out",
    }
    for key, (line_no, _) in values.items():
        if key not in known:
            raise PlanError(line_no, key, "unknown key")

    if "problems" not in values:
        raise PlanError(0, "problems", "required key is missing")
    line_no, raw = values["problems"]
    names = [p.strip().lower() for p in raw.split(",") if p.strip()]
    if not names:
        raise PlanError(line_no, "problems", "list must not be empty")
    for name in names:
        try:
            problems.problem_from_name(name, m=3, d=300)
        except ValueError as exc:
            raise PlanError(line_no, "problems", str(exc)) from None

    plan = ExperimentPlan(problems=names)

    if "dimensions" in values:
        line_no, raw = values["dimensions"]
        dims = [_parse_int(v.strip(), line_no, "dimensions") for v in raw.split(",") if v.strip()]
        if not dims:
            raise PlanError(line_no, "dimensions", "list must not be empty")
        plan.dimensions = dims
    if "seeds" in values:
        line_no, raw = values["seeds"]
        seeds = [_parse_int(v.strip(), line_no, "seeds") for v in raw.split(",") if v.strip()]
        if not seeds:
            raise PlanError(line_no, "seeds", "list must not be empty")
        plan.seeds = seeds
    if "objectives" in values:
        line_no, raw = values["objectives"]
        plan.objectives = _parse_int(raw, line_no, "objectives")
        if plan.objectives < 2:
            raise PlanError(line_no, "objectives", "need at least 2 objectives")
    if "n" in values:
        line_no, raw = values["n"]
        plan.archive_capacity = _parse_int(raw, line_no, "n")
        if plan.archive_capacity < 1:
            raise PlanError(line_no, "n", "archive capacity must be positive")
    if "offspring_per_gen" in values:
        line_no, raw = values["offspring_per_gen"]
        plan.offspring_per_gen = _parse_int(raw, line_no, "offspring_per_gen")
        if plan.offspring_per_gen < 1:
            raise PlanError(line_no, "offspring_per_gen", "must be positive")
    if "e" in values:
        line_no, raw = values["e"]
        plan.eval_limit = _parse_int(raw, line_no, "e")
        if plan.eval_limit < 1:
            raise PlanError(line_no, "e", "evaluation limit must be positive")
    if "r" in values:
        line_no, raw = values["r"]
        plan.attenuation = _parse_float(raw, line_no, "r")
        if not 0.0 < plan.attenuation < 1.0:
            raise PlanError(line_no, "r", f"r must be in (0,1), got {plan.attenuation}")
    if "h0" in values:
        line_no, raw = values["h0"]
        plan.h0 = _parse_float(raw, line_no, "h0")
        if plan.h0 <= 0:
            raise PlanError(line_no, "h0", "initial bandwidth must be positive")
    if "step_mode" in values:
        line_no, raw = values["step_mode"]
        if raw not in ("continuous", "ceiling"):
            raise PlanError(line_no, "step_mode", f"expected continuous or ceiling, got {raw!r}")
        plan.step_mode = raw
    if "kde_space" in values:
        line_no, raw = values["kde_space"]
        if raw not in ("objective", "decision"):
            raise PlanError(line_no, "kde_space", f"expected objective or decision, got {raw!r}")
        plan.kde_space = raw
    if "reference_points" in values:
        line_no, raw = values["reference_points"]
        plan.reference_points = _parse_int(raw, line_no, "reference_points")
        if plan.reference_points < plan.objectives:
            raise PlanError(line_no, "reference_points", "need at least m reference points")
    if "baseline" in values:
        line_no, raw = values["baseline"]
        plan.baseline = _parse_bool(raw, line_no, "baseline")
    if "out" in values:
        _, raw = values["out"]
        plan.out = raw

    ecap = plan.offspring_per_gen or plan.archive_capacity
    if plan.eval_limit < ecap:
        line_no = values.get("e", (0, ""))[0]
        raise PlanError(line_no, "e", "evaluation limit must cover the initial population")
    return plan


def _format_value(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def write_trace_csv(path, trace: RunTrace) -> None:
    """Pinned schema: header plus one row per iteration, 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for row in trace.rows:
            fields = (
                row.iteration, row.evals, row.h, row.archive_size,
                row.sp, row.igd, row.elapsed_ms,
            )
            fh.write(",".join(_format_value(v) for v in fields) + "\n")


def read_trace_csv(path) -> RunTrace:
    trace = RunTrace()
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != ",".join(TRACE_COLUMNS):
            raise ValueError(f"{path}: unexpected trace header {header!r}")
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) != len(TRACE_COLUMNS):
                raise ValueError(f"{path}: malformed row {line!r}")
            trace.rows.append(
                TraceRow(
                    iteration=int(parts[0]),
                    evals=int(parts[1]),
                    h=float(parts[2]),
                    archive_size=int(parts[3]),
                    sp=float(parts[4]),
                    igd=float(parts[5]),
                    elapsed_ms=float(parts[6]),
                )
            )
    return trace


@dataclass(frozen=True)
class CellSpec:
    """One (problem, dimension, seed, algorithm) run, picklable for workers."""

    problem: str
    dimension: int
    seed: int
    algorithm: str
    objectives: int
    config: OptimizerConfig
    reference_points: int
    out_dir: str

    @property
    def trace_name(self) -> str:
        return f"trace_{self.problem}_d{self.dimension}_s{self.seed}_{self.algorithm}.csv"


@dataclass
class CellResult:
    spec: CellSpec
    final_sp: float = math.nan
    final_igd: float = math.nan
    wall_ms: float = math.nan
    eval_ms: float = math.nan
    iterations: int = 0
    error: str = ""


def execute_cell(spec: CellSpec, clock: Callable[[], float] | None = None) -> CellResult:
    """Run one cell and write its trace CSV; failures come back as an error tag."""
    result = CellResult(spec=spec)
    try:
        instance = problems.problem_from_name(spec.problem, m=spec.objectives, d=spec.dimension)
        reference = problems.reference_front(instance, spec.reference_points)
        archive, trace = run(
            instance,
            spec.config,
            reference=reference,
            baseline=spec.algorithm == ALGORITHM_BASELINE,
            clock=clock or time.perf_counter,
        )
        write_trace_csv(Path(spec.out_dir) / spec.trace_name, trace)
        if trace.rows:
            result.final_sp = trace.rows[-1].sp
            result.final_igd = trace.rows[-1].igd
        else:
            front = np.array([p.objectives for p in archive])
            result.final_sp = metrics.spacing(front) if len(archive) >= 2 else math.nan
            result.final_igd = metrics.igd(reference, front)
        result.wall_ms = trace.wall_s * 1e3
        result.eval_ms = trace.eval_s * 1e3
        result.iterations = len(trace.rows)
    except Exception as exc:  # cell isolation: one failure must not sink the matrix
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def _execute_cell_worker(spec: CellSpec) -> CellResult:
    return execute_cell(spec)


def plan_cells(plan: ExperimentPlan, algorithms: Sequence[str]) -> list[CellSpec]:
    cells = []
    for name in plan.problems:
        for dim in plan.dimensions:
            for seed in plan.seeds:
                for algorithm in algorithms:
                    cells.append(
                        CellSpec(
                            problem=name,
                            dimension=dim,
                            seed=seed,
                            algorithm=algorithm,
                            objectives=plan.objectives,
                            config=plan.optimizer_config(seed),
                            reference_points=plan.reference_points,
                            out_dir=plan.out,
                        )
                    )
    return cells


def _mean(values: list[float]) -> float:
    return float(np.mean(values)) if values else math.nan


def _median(values: list[float]) -> float:
    return float(np.median(values)) if values else math.nan


def summarize(results: Sequence[CellResult]) -> list[dict]:
    """Aggregate final metrics per (problem, dimension, algorithm) group."""
    groups: dict[tuple, list[CellResult]] = {}
    for res in results:
        key = (res.spec.problem, res.spec.dimension, res.spec.algorithm)
        groups.setdefault(key, []).append(res)
    rows = []
    for (problem, dim, algorithm), members in sorted(groups.items()):
        ok = [r for r in members if not r.error]
        # error text is free-form; strip the CSV delimiters so rows stay parseable
        errors = ";".join(r.error for r in members if r.error)
        errors = errors.replace(",", ";").replace("\n", " ")
        rows.append(
            {
                "problem": problem,
                "dimension": dim,
                "algorithm": algorithm,
                "runs": len(ok),
                "final_igd_median": _median([r.final_igd for r in ok]),
                "final_igd_mean": _mean([r.final_igd for r in ok]),
                "final_sp_median": _median([r.final_sp for r in ok]),
                "final_sp_mean": _mean([r.final_sp for r in ok]),
                "wall_ms_mean": _mean([r.wall_ms for r in ok]),
                "errors": errors,
            }
        )
    return rows


def timing_rows(results: Sequence[CellResult]) -> list[dict]:
    groups: dict[tuple, list[CellResult]] = {}
    for res in results:
        if res.error:
            continue
        groups.setdefault((res.spec.dimension, res.spec.algorithm), []).append(res)
    rows = []
    for (dim, algorithm), members in sorted(groups.items()):
        wall = _mean([r.wall_ms for r in members])
        ev = _mean([r.eval_ms for r in members])
        rows.append(
            {
                "dimension": dim,
                "algorithm": algorithm,
                "wall_ms_mean": wall,
                "eval_ms_mean": ev,
                "overhead_ms_mean": wall - ev,
            }
        )
    return rows


def _write_csv(path, columns: Sequence[str], rows: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            rendered = []
            for col in columns:
                value = row[col]
                if isinstance(value, str):
                    rendered.append(value)
                else:
                    rendered.append(_format_value(value))
            fh.write(",".join(rendered) + "\n")


def run_experiments(
    plan: ExperimentPlan,
    jobs: int = 1,
    algorithms: Sequence[str] | None = None,
    clock_factory: Callable[[], Callable[[], float]] | None = None,
) -> list[CellResult]:
    """Execute every cell of the plan, then write summary.csv and timing.csv.

    `clock_factory` supplies a fresh per-cell clock (serial mode only), which
    makes even the elapsed-time column reproducible for tests.
    """
    algorithms = list(
        algorithms
        if algorithms is not None
        else ([ALGORITHM_MAIN, ALGORITHM_BASELINE] if plan.baseline else [ALGORITHM_MAIN])
    )
    out_dir = Path(plan.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = plan_cells(plan, algorithms)

    if jobs > 1:
        if clock_factory is not None:
            raise ValueError("clock injection requires jobs=1")
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_execute_cell_worker, cells))
    else:
        results = [
            execute_cell(cell, clock=clock_factory() if clock_factory else None)
            for cell in cells
        ]

    _write_csv(out_dir / "summary.csv", SUMMARY_COLUMNS, summarize(results))
    _write_csv(out_dir / "timing.csv", TIMING_COLUMNS, timing_rows(results))
    return results


def crosscheck(out_dir) -> list[str]:
    """Recompute summary.csv from the trace files; returns mismatch descriptions."""
    out_dir = Path(out_dir)
    summary_path = out_dir / "summary.csv"
    if not summary_path.exists():
        return [f"missing {summary_path}"]
    with open(summary_path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [dict(zip(header, line.strip().split(","))) for line in fh if line.strip()]

    finals: dict[tuple, list[tuple[float, float]]] = {}
    for path in sorted(out_dir.glob("trace_*.csv")):
        stem = path.stem[len("trace_"):]
        try:
            problem, dim_part, _seed_part, algorithm = stem.rsplit("_", 3)
            dim = int(dim_part.lstrip("d"))
        except ValueError:
            return [f"unrecognized trace name {path.name}"]
        trace = read_trace_csv(path)
        if trace.rows:
            finals.setdefault((problem, str(dim), algorithm), []).append(
                (trace.rows[-1].sp, trace.rows[-1].igd)
            )

    problems_seen = set()
    mismatches = []
    for row in rows:
        key = (row["problem"], row["dimension"], row["algorithm"])
        problems_seen.add(key)
        values = finals.get(key, [])
        if int(row["runs"]) != len(values):
            mismatches.append(f"{key}: runs {row['runs']} != {len(values)} traces")
            continue
        if not values:
            continue
        checks = {
            "final_igd_median": _median([v[1] for v in values]),
            "final_igd_mean": _mean([v[1] for v in values]),
            "final_sp_median": _median([v[0] for v in values]),
            "final_sp_mean": _mean([v[0] for v in values]),
        }
        for col, expect in checks.items():
            if row[col] != _format_value(expect):
                mismatches.append(f"{key}: {col} {row[col]} != {_format_value(expect)}")
    for key in finals:
        if key not in problems_seen:
            mismatches.append(f"{key}: trace files lack a summary row")
    return mismatches


def _load_plan(path: str) -> ExperimentPlan:
    with open(path, "r", encoding="utf-8") as fh:
        plan = parse_plan(fh.read())
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            plan.seeds = [int(env_seed)]
        except ValueError:
            raise PlanError(0, SEED_ENV_VAR, f"expected an integer, got {env_seed!r}") from None
    return plan


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="ltppm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the experiment plan")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--out", default=None, help="override the plan's output directory")

    p_base = sub.add_parser("baseline", help="run only the uniform-random control")
    p_base.add_argument("--config", required=True)
    p_base.add_argument("--jobs", type=int, default=1)
    p_base.add_argument("--out", default=None)

    p_metrics = sub.add_parser("metrics", help="compute SP/IGD for a front CSV")
    p_metrics.add_argument("--front", required=True)
    p_metrics.add_argument("--reference", required=True)
    p_metrics.add_argument("--squared", action="store_true", help="use squared distances in IGD")

    p_ref = sub.add_parser("reference", help="export a reference front as CSV")
    p_ref.add_argument("--problem", required=True)
    p_ref.add_argument("--points", type=int, default=5000)
    p_ref.add_argument("--objectives", type=int, default=3)
    p_ref.add_argument("--dimension", type=int, default=300)
    p_ref.add_argument("--out", required=True)

    p_check = sub.add_parser("crosscheck", help="verify summary.csv against trace files")
    p_check.add_argument("--out", required=True)

    args = parser.parse_args(argv)

    if args.command in ("run", "baseline"):
        try:
            plan = _load_plan(args.config)
        except PlanError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        if args.out:
            plan.out = args.out
        algorithms = [ALGORITHM_BASELINE] if args.command == "baseline" else None
        results = run_experiments(plan, jobs=args.jobs, algorithms=algorithms)
        failed = [r for r in results if r.error]
        for res in results:
            status = res.error or (
                f"igd={res.final_igd:.6g} sp={res.final_sp:.6g} wall_ms={res.wall_ms:.6g}"
            )
            print(f"{res.spec.trace_name}: {status}")
        print(f"{len(results) - len(failed)}/{len(results)} cells completed; output in {plan.out}")
        return 1 if failed else 0

    if args.command == "metrics":
        front = problems.load_front_csv(args.front)
        reference = problems.load_front_csv(args.reference)
        try:
            sp = metrics.spacing(front)
        except MetricUndefined:
            sp = math.nan
        value = metrics.igd(reference, front, squared=args.squared)
        print(f"sp={sp:.17g}")
        print(f"igd={value:.17g}")
        return 0

    if args.command == "reference":
        instance = problems.problem_from_name(
            args.problem, m=args.objectives, d=args.dimension
        )
        front = problems.reference_front(instance, args.points)
        problems.save_front_csv(front, args.out)
        print(f"wrote {len(front)} points to {args.out}")
        return 0

    if args.command == "crosscheck":
        mismatches = crosscheck(args.out)
        for item in mismatches:
            print(item, file=sys.stderr)
        print("summary matches traces" if not mismatches else f"{len(mismatches)} mismatches")
        return 1 if mismatches else 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
