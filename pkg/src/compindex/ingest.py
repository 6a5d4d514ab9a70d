"""Reading and writing the canonical CSV dataset layout.

A dataset directory holds::

    subjects.csv     subject_id, height_mm, arm_length_mm
    nrom.csv         joint, axis, degrees
    intervals.csv    subject, condition, orientation, target, start_index, end_index
    reaches/*.csv    one long-format file per subject x condition x orientation,
                     one row per time sample

Header names, file locations and units are all remappable through a
:class:`CsvSchemaConfig`, which is how an adapter for a differently laid out
dump is written.
"""

from __future__ import annotations

import csv
import glob
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import EmptyInterval, MalformedRow, MissingColumn, NromIncomplete, UnitUndeclared
from .model import (
    ANGLE_KEYS,
    CONDITIONS,
    JOINTS,
    ORIENTATIONS,
    AxisId,
    Condition,
    Dataset,
    FinalPose,
    JointId,
    NromTable,
    Orientation,
    ReachRecord,
    SubjectInfo,
    angle_key_name,
    check_target,
)

_JOINT_WORD = {JointId.ELBOW: "elbow", JointId.SHOULDER: "shoulder", JointId.TRUNK: "trunk"}

LOCATION_COLUMNS = [f"{_JOINT_WORD[j]}_pos_{a}" for j in JOINTS for a in "xyz"]
ANGLE_COLUMNS = [f"{_JOINT_WORD[j]}_ang_{a.value}" for j, a in ANGLE_KEYS]
KEY_COLUMNS = ["subject", "condition", "orientation", "target"]
REACH_COLUMNS = KEY_COLUMNS + ["time"] + LOCATION_COLUMNS + ANGLE_COLUMNS
SUBJECT_COLUMNS = ["subject_id", "height_mm", "arm_length_mm"]
INTERVAL_COLUMNS = KEY_COLUMNS + ["start_index", "end_index"]
NROM_COLUMNS = ["joint", "axis", "degrees"]

LENGTH_UNITS = {"mm": 1.0, "cm": 10.0, "m": 1000.0}
ANGLE_UNITS = {"deg": 1.0, "rad": 180.0 / math.pi}
UNIT_GROUPS = {"location": LENGTH_UNITS, "angle": ANGLE_UNITS, "anthropometry": LENGTH_UNITS, "nrom": ANGLE_UNITS}


@dataclass
class CsvSchemaConfig:
    """Maps logical column names to file headers and declares units per column group."""

    columns: dict[str, str] = field(default_factory=dict)
    units: dict[str, str] = field(
        default_factory=lambda: {"location": "mm", "angle": "deg", "anthropometry": "mm", "nrom": "deg"}
    )
    reach_files: str = "reaches/*.csv"
    subjects_file: str = "subjects.csv"
    intervals_file: str = "intervals.csv"
    nrom_file: str = "nrom.csv"

    def __post_init__(self):
        known = set(REACH_COLUMNS + SUBJECT_COLUMNS + INTERVAL_COLUMNS + NROM_COLUMNS)
        unknown = sorted(set(self.columns) - known)
        if unknown:
            raise MissingColumn(f"schema maps unknown logical columns: {', '.join(unknown)}")
        # Key columns share a header across files; only collisions inside
        # one file's column set are an error.
        for group in (REACH_COLUMNS, SUBJECT_COLUMNS, INTERVAL_COLUMNS, NROM_COLUMNS):
            mapped = [self.header(c) for c in group]
            clash = sorted({h for h in mapped if mapped.count(h) > 1})
            if clash:
                raise MissingColumn(f"header(s) mapped more than once: {', '.join(clash)}")
        for group, table in UNIT_GROUPS.items():
            unit = self.units.get(group)
            if unit is None:
                raise UnitUndeclared(f"no unit declared for column group {group!r}")
            if unit not in table:
                raise UnitUndeclared(f"unit {unit!r} for {group!r} not one of {sorted(table)}")

    def header(self, logical: str) -> str:
        return self.columns.get(logical, logical)

    def scale(self, group: str) -> float:
        return UNIT_GROUPS[group][self.units[group]]

    @classmethod
    def from_mapping(cls, data: Mapping) -> "CsvSchemaConfig":
        files = dict(data.get("files", {}))
        return cls(
            columns=dict(data.get("columns", {})),
            units={**cls().units, **dict(data.get("units", {}))},
            reach_files=files.get("reaches", "reaches/*.csv"),
            subjects_file=files.get("subjects", "subjects.csv"),
            intervals_file=files.get("intervals", "intervals.csv"),
            nrom_file=files.get("nrom", "nrom.csv"),
        )

    @classmethod
    def from_file(cls, path) -> "CsvSchemaConfig":
        from .config import read_toml

        return cls.from_mapping(read_toml(path))


def _read_table(path: Path, schema: CsvSchemaConfig, logical: list[str]):
    """Yield ``(line_number, {logical: raw string})`` for each data row."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(path, 1, "file is empty") from None
        positions = {}
        for name in logical:
            h = schema.header(name)
            if h not in header:
                raise MissingColumn(f"{path}: column {h!r} (for {name}) not found")
            positions[name] = header.index(h)
        width = len(header)
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != width:
                raise MalformedRow(path, line, f"expected {width} fields, got {len(row)}")
            yield line, {name: row[i] for name, i in positions.items()}


def _number(raw: str, path, line: int, name: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise MalformedRow(path, line, f"{name}: not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise MalformedRow(path, line, f"{name}: non-finite value {raw!r}")
    return value


def _integer(raw: str, path, line: int, name: str) -> int:
    value = _number(raw, path, line, name)
    if value != int(value):
        raise MalformedRow(path, line, f"{name}: expected an integer, got {raw!r}")
    return int(value)


def _keys(row, path, line):
    try:
        return (
            _integer(row["subject"], path, line, "subject"),
            Condition.parse(row["condition"]),
            Orientation.parse(row["orientation"]),
            check_target(_integer(row["target"], path, line, "target")),
        )
    except ValueError as exc:
        raise MalformedRow(path, line, str(exc)) from None


def load_subjects(path, schema: CsvSchemaConfig) -> list[SubjectInfo]:
    scale = schema.scale("anthropometry")
    subjects = []
    for line, row in _read_table(Path(path), schema, SUBJECT_COLUMNS):
        try:
            subjects.append(
                SubjectInfo(
                    _integer(row["subject_id"], path, line, "subject_id"),
                    _number(row["height_mm"], path, line, "height_mm") * scale,
                    _number(row["arm_length_mm"], path, line, "arm_length_mm") * scale,
                )
            )
        except ValueError as exc:
            raise MalformedRow(path, line, str(exc)) from None
    return subjects


def load_nrom(path, schema: CsvSchemaConfig | None = None) -> NromTable:
    schema = schema or CsvSchemaConfig()
    scale = schema.scale("nrom")
    table = {}
    for line, row in _read_table(Path(path), schema, NROM_COLUMNS):
        try:
            key = (JointId.parse(row["joint"]), AxisId.parse(row["axis"]))
        except ValueError as exc:
            raise MalformedRow(path, line, str(exc)) from None
        if key not in ANGLE_KEYS:
            raise MalformedRow(path, line, f"{angle_key_name(key)} is not a movement axis")
        table[key] = _number(row["degrees"], path, line, "degrees") * scale
    return NromTable.from_map(table)


def load_intervals(path, schema: CsvSchemaConfig) -> dict:
    out = {}
    for line, row in _read_table(Path(path), schema, INTERVAL_COLUMNS):
        key = _keys(row, path, line)
        if key in out:
            raise MalformedRow(path, line, "duplicate reach interval")
        out[key] = (
            _integer(row["start_index"], path, line, "start_index"),
            _integer(row["end_index"], path, line, "end_index"),
        )
    return out


def _load_reach_file(path: Path, schema: CsvSchemaConfig):
    loc_scale = schema.scale("location")
    ang_scale = schema.scale("angle")
    samples = defaultdict(list)
    for line, row in _read_table(path, schema, REACH_COLUMNS):
        key = _keys(row, path, line)
        t = _number(row["time"], path, line, "time")
        loc = [_number(row[c], path, line, c) * loc_scale for c in LOCATION_COLUMNS]
        ang = [_number(row[c], path, line, c) * ang_scale for c in ANGLE_COLUMNS]
        samples[key].append((t, loc, ang))
    return samples


def _resolve(base: Path, pattern: str) -> Path:
    p = Path(pattern)
    return p if p.is_absolute() else base / p


def load_dataset(path, schema: CsvSchemaConfig | None = None, nrom_path=None) -> Dataset:
    """Load a dataset directory (or a single long-format reach file).

    For a single file, the subjects/intervals/NROM files are looked up in its
    directory, then in the directory above (the canonical ``reaches/`` layout). Locations end up in mm and angles in degrees whatever the declared
    input units.
    """
    schema = schema or CsvSchemaConfig()
    path = Path(path)
    if path.is_dir():
        base = path
        reach_files = sorted(Path(p) for p in glob.glob(str(_resolve(base, schema.reach_files))))
        if not reach_files:
            raise FileNotFoundError(f"no reach files match {schema.reach_files!r} under {base}")
    elif path.is_file():
        base = path.parent
        if not _resolve(base, schema.subjects_file).exists() and _resolve(base.parent, schema.subjects_file).exists():
            base = base.parent
        reach_files = [path]
    else:
        raise FileNotFoundError(path)

    subjects = load_subjects(_resolve(base, schema.subjects_file), schema)
    intervals = load_intervals(_resolve(base, schema.intervals_file), schema)
    nrom_file = Path(nrom_path) if nrom_path is not None else _resolve(base, schema.nrom_file)
    if not nrom_file.exists():
        raise NromIncomplete(f"NROM file not found: {nrom_file}")
    nrom = load_nrom(nrom_file, schema)

    samples: dict = {}
    for f in reach_files:
        for key, rows in _load_reach_file(f, schema).items():
            if key in samples:
                raise MalformedRow(f, 0, f"reach {key} also appears in another file")
            samples[key] = rows

    records = []
    for key in sorted(samples, key=lambda k: (k[0], CONDITIONS.index(k[1]), ORIENTATIONS.index(k[2]), k[3])):
        rows = sorted(samples[key], key=lambda r: r[0])
        if key not in intervals:
            raise MalformedRow(_resolve(base, schema.intervals_file), 0, f"no reach interval for {key}")
        s, c, o, n = key
        records.append(
            ReachRecord(
                s, c, o, n,
                np.array([r[1] for r in rows]).reshape(-1, 3, 3),
                np.array([r[2] for r in rows]),
                intervals[key],
            )
        )
    return Dataset(tuple(subjects), tuple(records), nrom)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_dataset(d: Dataset, out_dir) -> Path:
    """Write ``d`` in the canonical layout; floats are written losslessly."""
    out = Path(out_dir)
    (out / "reaches").mkdir(parents=True, exist_ok=True)
    with open(out / "subjects.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUBJECT_COLUMNS)
        for s in d.subjects:
            w.writerow([s.subject_id, _fmt(s.height_mm), _fmt(s.arm_length_mm)])
    write_nrom(d.nrom, out / "nrom.csv")
    with open(out / "intervals.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(INTERVAL_COLUMNS)
        for r in d.records:
            w.writerow([r.subject_id, r.condition.value, r.orientation.value, r.target, *r.reach_interval])

    groups = defaultdict(list)
    for r in d.records:
        groups[(r.subject_id, r.condition, r.orientation)].append(r)
    for (s, c, o), recs in groups.items():
        name = out / "reaches" / f"s{s:02d}_{c.value}_{o.value}.csv"
        with open(name, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(REACH_COLUMNS)
            for r in recs:
                for t in range(r.n_samples):
                    w.writerow(
                        [s, c.value, o.value, r.target, t]
                        + [_fmt(v) for v in r.locations[t].ravel()]
                        + [_fmt(v) for v in r.angles[t]]
                    )
    return out


def write_nrom(nrom: NromTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NROM_COLUMNS)
        for (j, a), v in zip(ANGLE_KEYS, nrom.values):
            w.writerow([j.value, a.value, _fmt(v)])


def extract_final_pose(r: ReachRecord) -> FinalPose:
    """Pose at the last sample of the reach interval (the grasp)."""
    if not r.interval_ok():
        raise EmptyInterval(f"reach {r.key}: interval {r.reach_interval} invalid for {r.n_samples} samples")
    return r.frame(r.reach_interval[1])


def extract_initial_pose(r: ReachRecord) -> FinalPose:
    if not r.interval_ok():
        raise EmptyInterval(f"reach {r.key}: interval {r.reach_interval} invalid for {r.n_samples} samples")
    return r.frame(r.reach_interval[0])

