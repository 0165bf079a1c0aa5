"""Run archives: a versioned, human-inspectable text format bundling the
manifest (space, evaluator id, seeds, objectives, reference), and every
evaluation record. Archives are self-describing, so re-analysis needs nothing
beyond the file, and deliberately contain no timestamps so identical runs
produce byte-identical files.

Also provides ingestion of plain record CSVs (header-declared ``record_id``
plus ``<objective>_val`` / ``<objective>_test`` columns) so externally
produced results can flow through the same analysis commands.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import CostVector, ObjectiveSpec, validate_objective_list
from .hypervolume import ReferencePoint, default_reference
from .protocol import EvaluationRecord
from .search import ConfigurationSpace, format_space, parse_space

__all__ = [
    "ArchiveManifest",
    "RunArchive",
    "write_archive",
    "read_archive",
    "dump_archive",
    "load_archive",
    "load_record_csv",
    "TOOL_VERSION",
    "FORMAT_TAG",
]

TOOL_VERSION = "0.1.0"
FORMAT_TAG = "paretogap-archive v1"

_NONE = "-"
_FORBIDDEN_META = ("\t", "\n", ";", "=")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class ArchiveManifest:
    evaluator_id: str
    master_seed: int
    budget: int
    objectives: tuple[ObjectiveSpec, ...]
    reference: ReferencePoint | None = None
    extras: Mapping[str, str] = field(default_factory=dict)
    tool_version: str = TOOL_VERSION

    def __post_init__(self) -> None:
        validate_objective_list(self.objectives)
        if len(self.objectives) < 2:
            raise ValueError("manifest needs at least 2 objectives")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        for key, value in self.extras.items():
            for ch in _FORBIDDEN_META:
                if ch in key or ch in str(value):
                    raise ValueError(f"manifest extra {key!r} contains reserved character")


def default_manifest_reference(objectives: Sequence[ObjectiveSpec]) -> ReferencePoint | None:
    try:
        return default_reference(objectives)
    except ValueError:
        return None


@dataclass(frozen=True)
class RunArchive:
    manifest: ArchiveManifest
    space: ConfigurationSpace
    records: tuple[EvaluationRecord, ...]

    def __post_init__(self) -> None:
        if len(self.records) != self.manifest.budget:
            raise ValueError(
                f"manifest budget {self.manifest.budget} != {len(self.records)} records"
            )
        ids = [r.record_id for r in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError("record ids must be unique")
        m = len(self.manifest.objectives)
        names = set(self.space.names)
        for r in self.records:
            for costs in (r.validation_costs, r.test_costs):
                if costs is not None and len(costs) != m:
                    raise ValueError(
                        f"record {r.record_id!r}: {len(costs)}-D costs vs {m} objectives"
                    )
            if set(r.assignment) != names:
                raise ValueError(
                    f"record {r.record_id!r}: assignment keys do not match the space"
                )


def _objective_line(spec: ObjectiveSpec) -> str:
    if spec.known_range is None:
        lo = hi = _NONE
    else:
        lo, hi = _fmt(spec.known_range[0]), _fmt(spec.known_range[1])
    return f"objective={spec.name} {spec.direction} {lo} {hi}"


def _parse_objective(value: str) -> ObjectiveSpec:
    parts = value.split()
    if len(parts) != 4:
        raise ValueError(f"malformed objective line: {value!r}")
    name, direction, lo, hi = parts
    known = None if lo == _NONE else (float(lo), float(hi))
    return ObjectiveSpec(name, direction, known)


def _param_cell(space: ConfigurationSpace, name: str, value: object) -> str:
    for p in space:
        if p.name == name:
            if p.kind == "categorical":
                return str(value)
            if p.kind == "integer":
                return str(int(value))
            return _fmt(float(value))
    raise ValueError(f"assignment parameter {name!r} not in space")


def _parse_param(space: ConfigurationSpace, name: str, cell: str) -> object:
    for p in space:
        if p.name == name:
            if p.kind == "categorical":
                return cell
            if p.kind == "integer":
                return int(cell)
            return float(cell)
    raise ValueError(f"column references unknown parameter {name!r}")


def _meta_cell(metadata: Mapping[str, str]) -> str:
    if not metadata:
        return _NONE
    for key, value in metadata.items():
        for ch in _FORBIDDEN_META:
            if ch in key or ch in str(value):
                raise ValueError(f"record metadata {key!r} contains reserved character")
    return ";".join(f"{k}={metadata[k]}" for k in sorted(metadata))


def _parse_meta(cell: str) -> dict[str, str]:
    if cell == _NONE:
        return {}
    out = {}
    for pair in cell.split(";"):
        k, _, v = pair.partition("=")
        out[k] = v
    return out


def dump_archive(archive: RunArchive) -> str:
    """Render an archive to its text form (deterministic byte-for-byte)."""
    man = archive.manifest
    lines = [FORMAT_TAG, "[manifest]"]
    lines.append(f"tool_version={man.tool_version}")
    lines.append(f"evaluator={man.evaluator_id}")
    lines.append(f"master_seed={man.master_seed}")
    lines.append(f"budget={man.budget}")
    for spec in man.objectives:
        lines.append(_objective_line(spec))
    if man.reference is not None:
        lines.append("reference=" + " ".join(_fmt(v) for v in man.reference))
    for key in sorted(man.extras):
        lines.append(f"meta.{key}={man.extras[key]}")
    lines.append("[space]")
    lines.append(format_space(archive.space).rstrip("\n"))
    lines.append("[records]")
    obj_names = [o.name for o in man.objectives]
    header = ["record_id", "seed", "status", "failure"]
    header += [f"val:{n}" for n in obj_names]
    header += [f"test:{n}" for n in obj_names]
    header += [f"p:{n}" for n in archive.space.names]
    header.append("meta")
    lines.append("\t".join(header))
    for r in archive.records:
        row = [r.record_id, str(r.seed)]
        if r.failure is not None:
            row += ["failed", r.failure]
            row += [_NONE] * (2 * len(obj_names))
        else:
            row += ["ok", _NONE]
            row += [_fmt(v) for v in r.validation_costs]
            if r.test_costs is None:
                row += [_NONE] * len(obj_names)
            else:
                row += [_fmt(v) for v in r.test_costs]
        row += [_param_cell(archive.space, n, r.assignment[n]) for n in archive.space.names]
        row.append(_meta_cell(r.metadata))
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def write_archive(archive: RunArchive, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_archive(archive))


def load_archive(text: str) -> RunArchive:
    """Parse the text form back into an archive (inverse of dump_archive)."""
    lines = text.splitlines()
    if not lines or lines[0] != FORMAT_TAG:
        raise ValueError(f"not a {FORMAT_TAG.split()[0]} file (bad format tag)")
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for line in lines[1:]:
        if line in ("[manifest]", "[space]", "[records]"):
            current = sections.setdefault(line[1:-1], [])
        elif current is None:
            raise ValueError(f"content before first section: {line!r}")
        else:
            current.append(line)
    for required in ("manifest", "space", "records"):
        if required not in sections:
            raise ValueError(f"archive missing [{required}] section")

    fields: dict[str, str] = {}
    objectives: list[ObjectiveSpec] = []
    extras: dict[str, str] = {}
    for line in sections["manifest"]:
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed manifest line: {line!r}")
        if key == "objective":
            objectives.append(_parse_objective(value))
        elif key.startswith("meta."):
            extras[key[5:]] = value
        else:
            fields[key] = value
    reference = None
    if "reference" in fields:
        reference = ReferencePoint([float(v) for v in fields["reference"].split()])
    manifest = ArchiveManifest(
        evaluator_id=fields["evaluator"],
        master_seed=int(fields["master_seed"]),
        budget=int(fields["budget"]),
        objectives=tuple(objectives),
        reference=reference,
        extras=extras,
        tool_version=fields.get("tool_version", TOOL_VERSION),
    )
    space = parse_space("\n".join(sections["space"]))

    record_lines = [ln for ln in sections["records"] if ln.strip()]
    if not record_lines:
        raise ValueError("archive has no record table")
    header = record_lines[0].split("\t")
    obj_names = [o.name for o in manifest.objectives]
    expected = (
        ["record_id", "seed", "status", "failure"]
        + [f"val:{n}" for n in obj_names]
        + [f"test:{n}" for n in obj_names]
        + [f"p:{n}" for n in space.names]
        + ["meta"]
    )
    if header != expected:
        raise ValueError(f"record header {header} does not match manifest/space")
    m = len(obj_names)
    records = []
    for line in record_lines[1:]:
        cells = line.split("\t")
        if len(cells) != len(header):
            raise ValueError(f"record row has {len(cells)} cells, expected {len(header)}")
        rid, seed, status, failure = cells[:4]
        val_cells = cells[4 : 4 + m]
        test_cells = cells[4 + m : 4 + 2 * m]
        param_cells = cells[4 + 2 * m : -1]
        assignment = {
            name: _parse_param(space, name, cell)
            for name, cell in zip(space.names, param_cells)
        }
        if status == "failed":
            records.append(
                EvaluationRecord(
                    record_id=rid,
                    assignment=assignment,
                    validation_costs=None,
                    test_costs=None,
                    seed=int(seed),
                    metadata=_parse_meta(cells[-1]),
                    failure=failure,
                )
            )
            continue
        if status != "ok":
            raise ValueError(f"record {rid!r}: unknown status {status!r}")
        test = (
            None
            if all(c == _NONE for c in test_cells)
            else CostVector(float(c) for c in test_cells)
        )
        records.append(
            EvaluationRecord(
                record_id=rid,
                assignment=assignment,
                validation_costs=CostVector(float(c) for c in val_cells),
                test_costs=test,
                seed=int(seed),
                metadata=_parse_meta(cells[-1]),
            )
        )
    return RunArchive(manifest=manifest, space=space, records=tuple(records))


def read_archive(path) -> RunArchive:
    with open(path, "r", encoding="utf-8") as fh:
        return load_archive(fh.read())


def load_record_csv(path) -> tuple[tuple[ObjectiveSpec, ...], list[EvaluationRecord]]:
    """Ingest externally produced records from a plain CSV.

    Required columns: ``record_id`` and one ``<objective>_val`` per objective;
    ``<objective>_test`` columns are optional but must cover every objective
    when present (a row may leave all its test cells empty). Any other column
    is kept as an assignment value, verbatim. Objective ranges are unknown for
    external records, so analysis commands need an explicit reference point.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if "record_id" not in header:
            raise ValueError(f"{path}: missing required column 'record_id'")
        obj_names = [c[: -len("_val")] for c in header if c.endswith("_val")]
        if not obj_names:
            raise ValueError(f"{path}: no '<objective>_val' columns found")
        test_names = [c[: -len("_test")] for c in header if c.endswith("_test")]
        if test_names and sorted(test_names) != sorted(obj_names):
            raise ValueError(
                f"{path}: test columns {sorted(test_names)} do not cover "
                f"objectives {sorted(obj_names)}"
            )
        assignment_cols = [
            c
            for c in header
            if c != "record_id" and not c.endswith("_val") and not c.endswith("_test")
        ]
        col = {name: header.index(name) for name in header}
        records = []
        for rowno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError(f"{path}: row {rowno}: expected {len(header)} cells")
            rid = row[col["record_id"]]
            try:
                val = CostVector(float(row[col[f"{n}_val"]]) for n in obj_names)
            except ValueError as exc:
                raise ValueError(f"{path}: row {rowno}: {exc}") from None
            test = None
            if test_names:
                cells = [row[col[f"{n}_test"]] for n in obj_names]
                filled = [c for c in cells if c != ""]
                if len(filled) == len(cells):
                    test = CostVector(float(c) for c in cells)
                elif filled:
                    raise ValueError(
                        f"{path}: row {rowno}: test costs must be all present or all empty"
                    )
            assignment = {c: row[col[c]] for c in assignment_cols}
            records.append(
                EvaluationRecord(
                    record_id=rid,
                    assignment=assignment,
                    validation_costs=val,
                    test_costs=test,
                    seed=0,
                )
            )
    if not records:
        raise ValueError(f"{path}: no record rows")
    objectives = tuple(ObjectiveSpec(n, "minimize", None) for n in obj_names)
    return objectives, records
