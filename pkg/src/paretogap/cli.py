"""Command-line surface: run experiments, analyze archives or external record
files, compare two runs, and emit plot-ready front data.

Commands add no analysis logic of their own; every number they print comes
from the library functions, so CLI output and API output cannot drift apart.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .archive import (
    ArchiveManifest,
    FORMAT_TAG,
    RunArchive,
    default_manifest_reference,
    load_record_csv,
    read_archive,
    write_archive,
)
from .core import FrontApproximation, ObjectiveSpec
from .evaluators import (
    LinearModelEvaluator,
    SyntheticEvaluator,
    SyntheticProblem,
    make_credit_like_dataset,
    read_dataset,
    split_dataset,
)
from .hypervolume import ReferencePoint, default_reference
from .protocol import (
    FIRST_BETTER,
    SECOND_BETTER,
    ComparisonVerdict,
    compare_dominance,
    compare_gap,
    compare_hv,
    gap_report,
    naive_test_front,
    optimistic_front,
    pessimistic_front,
    validation_front,
)
from .search import (
    BUILTIN_SPACES,
    SpaceParseError,
    checkpoint_reports,
    load_builtin_space,
    parse_space_file,
    run_random_search,
)

PLOT_SETS = ("validation", "optimistic", "pessimistic", "naive-test", "all-points")

_LINEAR_PARAMS = {"penalty", "alpha", "l1_ratio", "fit_intercept", "eta0", "pos_class_weight_exp"}


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be a nonnegative integer, got {text}")
    return value


def _ref_values(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"reference point must be comma-separated numbers, got {text!r}"
        ) from None


def _budget_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"budgets must be comma-separated integers, got {text!r}"
        ) from None


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paretogap",
        description=(
            "Evaluate multi-objective hyperparameter search with optimistic and "
            "pessimistic test-set Pareto fronts and the approximation gap."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run seeded random search and write an archive")
    run.add_argument(
        "--space",
        required=True,
        help=f"space definition file, or builtin:<name> with name in {BUILTIN_SPACES}",
    )
    run.add_argument(
        "--evaluator", required=True, choices=("synthetic", "linear"),
        help="synthetic trade-off surface or the SGD linear classifier",
    )
    run.add_argument("--surface", default="convex", help="synthetic surface name")
    run.add_argument("--sigma", type=float, default=0.0,
                     help="synthetic validation/test noise level")
    run.add_argument("--data", default=None,
                     help="linear evaluator data: CSV path, or 'builtin' for the bundled table")
    run.add_argument("--data-schema", default=None,
                     help="sidecar schema for --data (omit with --data builtin)")
    run.add_argument("--split-seed", type=_nonnegative_int, default=0,
                     help="seed of the 60/20/20 stratified split (kept apart from --seed "
                          "so competing runs share one split)")
    run.add_argument("--budget", type=_positive_int, required=True,
                     help="number of configurations to evaluate")
    run.add_argument("--seed", type=_nonnegative_int, required=True, help="master seed")
    run.add_argument("--workers", type=_positive_int, default=1,
                     help="parallel evaluations (results are identical to sequential)")
    run.add_argument("--out", required=True, help="archive path to write")

    analyze = sub.add_parser("analyze", help="gap table for an archive or record CSV")
    analyze.add_argument("records", help="archive or record CSV path")
    analyze.add_argument("--budgets", type=_budget_list, default=None,
                         help="comma-separated ascending budgets (default: all records)")
    analyze.add_argument("--ref", type=_ref_values, default=None,
                         help="reference point, e.g. 1,1 (default: unit point when all "
                              "objectives are unit-range losses)")
    analyze.add_argument("--out", default=None, help="also write the table as CSV here")

    compare = sub.add_parser("compare", help="compare two runs under one criterion")
    compare.add_argument("first", help="archive or record CSV for run A")
    compare.add_argument("second", help="archive or record CSV for run B")
    compare.add_argument("--criterion", required=True, choices=("hv", "dominance", "gap"))
    compare.add_argument("--ref", type=_ref_values, default=None,
                         help="reference point shared by both runs")
    compare.add_argument("--tie-epsilon", type=float, default=0.0,
                         help="gap criterion: gaps closer than this are incomparable")

    plotdata = sub.add_parser("plotdata", help="emit per-set point files for plotting")
    plotdata.add_argument("records", help="archive or record CSV path")
    plotdata.add_argument("--which", default="all-points",
                          help=f"comma-separated sets from {PLOT_SETS}")
    plotdata.add_argument("--out", required=True, help="output directory")

    return parser


def _load_records(path: str):
    """-> (objectives, records, manifest reference or None)"""
    p = Path(path)
    if not p.exists():
        raise ValueError(f"no such file: {path}")
    with open(p, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
    if first == FORMAT_TAG:
        archive = read_archive(p)
        return archive.manifest.objectives, list(archive.records), archive.manifest.reference
    objectives, records = load_record_csv(p)
    return objectives, records, None


def _resolve_ref(
    explicit: tuple[float, ...] | None,
    manifest_ref: ReferencePoint | None,
    objectives: tuple[ObjectiveSpec, ...],
) -> ReferencePoint:
    if explicit is not None:
        if len(explicit) != len(objectives):
            raise ValueError(
                f"reference has {len(explicit)} entries but there are {len(objectives)} objectives"
            )
        return ReferencePoint(explicit)
    if manifest_ref is not None:
        return manifest_ref
    try:
        return default_reference(objectives)
    except ValueError as exc:
        raise ValueError(f"{exc}; pass --ref explicitly") from None


def _load_space(selector: str):
    if selector.startswith("builtin:"):
        return load_builtin_space(selector[len("builtin:"):])
    return parse_space_file(selector)


def _cmd_run(args: argparse.Namespace) -> int:
    space = _load_space(args.space)
    extras: dict[str, str] = {"runs": "1"}
    if args.evaluator == "synthetic":
        if args.sigma < 0:
            raise ValueError("--sigma must be >= 0")
        problem = SyntheticProblem(args.surface, len(space), args.sigma)
        evaluator = SyntheticEvaluator(problem, space)
        evaluator_id = evaluator.evaluator_id
    else:
        if args.data is None:
            raise ValueError("--evaluator linear requires --data")
        if args.data == "builtin":
            data = make_credit_like_dataset()
            data_id = "builtin"
        else:
            if args.data_schema is None:
                raise ValueError("--data PATH requires --data-schema")
            data = read_dataset(args.data, args.data_schema)
            data_id = args.data
        missing = _LINEAR_PARAMS - set(space.names)
        if missing:
            raise ValueError(
                f"space is missing linear-model parameters: {', '.join(sorted(missing))}"
            )
        split = split_dataset(data, (0.6, 0.2, 0.2), args.split_seed)
        evaluator = LinearModelEvaluator(data, split)
        evaluator_id = f"linear?data={data_id}&split_seed={args.split_seed}"
        extras["data"] = data.summary()
        extras["split"] = f"stratified 60/20/20, seed {args.split_seed}"
    records = run_random_search(space, evaluator, args.budget, args.seed, args.workers)
    manifest = ArchiveManifest(
        evaluator_id=evaluator_id,
        master_seed=args.seed,
        budget=args.budget,
        objectives=evaluator.objectives,
        reference=default_manifest_reference(evaluator.objectives),
        extras=extras,
    )
    archive = RunArchive(manifest=manifest, space=space, records=tuple(records))
    write_archive(archive, args.out)
    failed = sum(1 for r in records if not r.evaluated)
    if manifest.reference is not None and failed < len(records):
        from .hypervolume import hypervolume_nd

        hv = hypervolume_nd(validation_front(records), manifest.reference)
        hv_text = f"{hv:.4f}"
    else:
        hv_text = "n/a"
    print(f"wrote {args.out}: {len(records)} records ({failed} failed), validation HV {hv_text}")
    return 0


_TABLE_COLUMNS = ("validation_hv", "pessimistic_hv", "optimistic_hv", "approximation_gap")


def _cmd_analyze(args: argparse.Namespace) -> int:
    objectives, records, manifest_ref = _load_records(args.records)
    ref = _resolve_ref(args.ref, manifest_ref, objectives)
    budgets = args.budgets if args.budgets is not None else (len(records),)
    reports = checkpoint_reports(records, budgets, ref)

    header = ("budget",) + _TABLE_COLUMNS
    widths = [max(len(h), 12) for h in header]
    print("  ".join(h.rjust(w) for h, w in zip(header, widths)))
    for budget, report in reports:
        cells = [str(budget)] + [f"{getattr(report, c):.4f}" for c in _TABLE_COLUMNS]
        print("  ".join(c.rjust(w) for c, w in zip(cells, widths)))

    if args.out:
        lines = [",".join(header)]
        for budget, report in reports:
            lines.append(
                ",".join([str(budget)] + [_fmt(getattr(report, c)) for c in _TABLE_COLUMNS])
            )
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def _print_verdict(verdict) -> None:
    print(f"criterion: {verdict.criterion}")
    evidence = " ".join(
        f"{k}={_fmt(v) if isinstance(v, float) else v}" for k, v in verdict.evidence.items()
    )
    print(f"evidence: {evidence}")
    print(f"outcome: {verdict.outcome}")


def _cmd_compare(args: argparse.Namespace) -> int:
    obj_a, records_a, ref_a = _load_records(args.first)
    obj_b, records_b, ref_b = _load_records(args.second)
    if obj_a != obj_b:
        raise ValueError(
            f"objective lists differ: {[o.name for o in obj_a]} vs {[o.name for o in obj_b]}"
        )
    if args.ref is None and ref_a != ref_b:
        raise ValueError("archives carry different reference points; pass --ref")
    ref = _resolve_ref(args.ref, ref_a, obj_a)

    if args.criterion == "hv":
        verdict = compare_hv(gap_report(records_a, ref), gap_report(records_b, ref))
    elif args.criterion == "gap":
        verdict = compare_gap(
            gap_report(records_a, ref), gap_report(records_b, ref), args.tie_epsilon
        )
    else:
        forward = compare_dominance(pessimistic_front(records_a), optimistic_front(records_b))
        if forward.outcome == FIRST_BETTER:
            verdict = forward
        else:
            backward = compare_dominance(pessimistic_front(records_b), optimistic_front(records_a))
            if backward.outcome == FIRST_BETTER:
                verdict = ComparisonVerdict(
                    criterion=backward.criterion,
                    outcome=SECOND_BETTER,
                    evidence=backward.evidence,
                )
            else:
                verdict = ComparisonVerdict(
                    criterion=forward.criterion,
                    outcome=forward.outcome,
                    evidence={**forward.evidence, "reverse_covered": backward.evidence["covered"]},
                )
    _print_verdict(verdict)
    return 0


def _cmd_plotdata(args: argparse.Namespace) -> int:
    requested = [w.strip() for w in args.which.split(",") if w.strip()]
    unknown = [w for w in requested if w not in PLOT_SETS]
    if unknown:
        raise ValueError(
            f"unknown set name(s) {', '.join(unknown)}; valid names: {', '.join(PLOT_SETS)}"
        )
    if not requested:
        raise ValueError(f"no sets requested; valid names: {', '.join(PLOT_SETS)}")
    objectives, records, _ = _load_records(args.records)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    fronts: dict[str, FrontApproximation | None] = {}

    def front_for(name: str) -> FrontApproximation:
        if name not in fronts:
            builder = {
                "validation": validation_front,
                "optimistic": optimistic_front,
                "pessimistic": pessimistic_front,
                "naive-test": naive_test_front,
            }[name]
            fronts[name] = builder(records)
        return fronts[name]

    def optional_ids(name: str) -> set[str] | None:
        try:
            return set(front_for(name).record_ids)
        except ValueError:
            return None

    needed_flags = ("validation", "optimistic", "pessimistic", "naive-test")
    for name in requested:
        if name != "all-points":
            front_for(name)  # fail fast if this set cannot be built
    flag_ids = {name: optional_ids(name) for name in needed_flags}

    obj_names = [o.name for o in objectives]
    header = (
        ["record_id", "status"]
        + [f"val_{n}" for n in obj_names]
        + [f"test_{n}" for n in obj_names]
        + [f"on_{n.replace('-', '_')}_front" for n in needed_flags]
    )

    def row_for(record) -> list[str]:
        row = [record.record_id, "ok" if record.evaluated else "failed"]
        for costs in (record.validation_costs, record.test_costs):
            if costs is None:
                row += [""] * len(obj_names)
            else:
                row += [_fmt(v) for v in costs]
        for name in needed_flags:
            ids = flag_ids[name]
            row.append("" if ids is None else ("1" if record.record_id in ids else "0"))
        return row

    by_id = {r.record_id: r for r in records}
    for name in requested:
        if name == "all-points":
            selected = records
        else:
            selected = [by_id[rid] for rid in front_for(name).record_ids]
        lines = [",".join(header)]
        lines += [",".join(row_for(r)) for r in selected]
        (out_dir / f"{name}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {out_dir / (name + '.csv')}: {len(selected)} rows")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "analyze": _cmd_analyze,
        "compare": _cmd_compare,
        "plotdata": _cmd_plotdata,
    }
    try:
        return handlers[args.command](args)
    except SpaceParseError as exc:
        print(f"error: space definition: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
