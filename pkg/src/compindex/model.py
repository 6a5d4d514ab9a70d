"""Domain types for reaching-workspace compensation analysis.

Poses are stored as small fixed-layout numpy arrays rather than nested dicts:
joint locations are ``(3, 3)`` arrays indexed ``[joint, xyz]`` in ``JOINTS``
order, and joint angles are ``(7,)`` arrays in ``ANGLE_KEYS`` order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np


class Condition(str, Enum):
    UNBRACED = "u"
    BRACED = "b"

    @classmethod
    def parse(cls, value: str) -> "Condition":
        v = str(value).strip().lower()
        aliases = {"u": cls.UNBRACED, "unbraced": cls.UNBRACED, "b": cls.BRACED, "braced": cls.BRACED}
        if v not in aliases:
            raise ValueError(f"unknown condition {value!r}")
        return aliases[v]


class Orientation(str, Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"

    @classmethod
    def parse(cls, value: str) -> "Orientation":
        v = str(value).strip().lower()
        aliases = {"h": cls.HORIZONTAL, "horizontal": cls.HORIZONTAL, "v": cls.VERTICAL, "vertical": cls.VERTICAL}
        if v not in aliases:
            raise ValueError(f"unknown orientation {value!r}")
        return aliases[v]


class JointId(str, Enum):
    ELBOW = "e"
    SHOULDER = "s"
    TRUNK = "t"

    @classmethod
    def parse(cls, value: str) -> "JointId":
        v = str(value).strip().lower()
        for j in cls:
            if v in (j.value, j.name.lower()):
                return j
        raise ValueError(f"unknown joint {value!r}")


class AxisId(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"

    @classmethod
    def parse(cls, value: str) -> "AxisId":
        return cls(str(value).strip().lower())


CONDITIONS = (Condition.UNBRACED, Condition.BRACED)
ORIENTATIONS = (Orientation.HORIZONTAL, Orientation.VERTICAL)
JOINTS = (JointId.ELBOW, JointId.SHOULDER, JointId.TRUNK)
AXES = (AxisId.X, AxisId.Y, AxisId.Z)

# Elbow only flexes; shoulder and trunk carry three rotational axes each.
ANGLE_KEYS: tuple[tuple[JointId, AxisId], ...] = (
    (JointId.ELBOW, AxisId.X),
    (JointId.SHOULDER, AxisId.X),
    (JointId.SHOULDER, AxisId.Y),
    (JointId.SHOULDER, AxisId.Z),
    (JointId.TRUNK, AxisId.X),
    (JointId.TRUNK, AxisId.Y),
    (JointId.TRUNK, AxisId.Z),
)
ANGLE_INDEX = {key: i for i, key in enumerate(ANGLE_KEYS)}
JOINT_INDEX = {j: i for i, j in enumerate(JOINTS)}

# Default axis-to-movement naming. Overridable through the pipeline config
# since the assignment is read off a figure, not stated in text.
MOVEMENT_NAMES: dict[tuple[JointId, AxisId], str] = {
    (JointId.ELBOW, AxisId.X): "elbow flexion",
    (JointId.SHOULDER, AxisId.X): "shoulder plane of elevation",
    (JointId.SHOULDER, AxisId.Y): "shoulder elevation",
    (JointId.SHOULDER, AxisId.Z): "shoulder internal rotation",
    (JointId.TRUNK, AxisId.X): "trunk flexion/extension",
    (JointId.TRUNK, AxisId.Y): "trunk rotation",
    (JointId.TRUNK, AxisId.Z): "trunk lateral flexion",
}

N_TARGETS = 49
TARGETS = tuple(range(1, N_TARGETS + 1))


def angle_indices(joint: JointId) -> list[int]:
    return [i for i, (j, _) in enumerate(ANGLE_KEYS) if j == joint]


def angle_key_name(key: tuple[JointId, AxisId]) -> str:
    return f"{key[0].value}_{key[1].value}"


def check_target(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or not 1 <= int(n) <= N_TARGETS:
        raise ValueError(f"target index must be in 1..{N_TARGETS}, got {n!r}")
    return int(n)


def _frozen_array(values, shape: tuple[int, ...], name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SubjectInfo:
    subject_id: int
    height_mm: float
    arm_length_mm: float

    def __post_init__(self):
        if not (self.height_mm > self.arm_length_mm > 0):
            raise ValueError(
                f"subject {self.subject_id}: need height_mm > arm_length_mm > 0, "
                f"got {self.height_mm}, {self.arm_length_mm}"
            )


@dataclass(frozen=True, eq=False)
class FinalPose:
    """Joint locations (mm) and the seven joint angles (degrees) at one instant."""

    locations: np.ndarray
    angles: np.ndarray

    def __post_init__(self):
        loc = _frozen_array(self.locations, (3, 3), "locations")
        ang = _frozen_array(self.angles, (7,), "angles")
        if not (np.isfinite(loc).all() and np.isfinite(ang).all()):
            raise ValueError("pose values must be finite")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "angles", ang)

    @classmethod
    def from_maps(
        cls,
        locations: Mapping[JointId, Sequence[float]],
        angles: Mapping[tuple[JointId, AxisId], float],
    ) -> "FinalPose":
        if set(locations) != set(JOINTS):
            raise ValueError("locations must cover exactly the elbow, shoulder and trunk")
        if set(angles) != set(ANGLE_KEYS):
            raise ValueError("angles must cover exactly the 7 movement axes")
        return cls(
            np.array([locations[j] for j in JOINTS], dtype=float),
            np.array([angles[k] for k in ANGLE_KEYS], dtype=float),
        )

    def location(self, joint: JointId) -> np.ndarray:
        return self.locations[JOINT_INDEX[joint]]

    def angle(self, joint: JointId, axis: AxisId) -> float:
        return float(self.angles[ANGLE_INDEX[(joint, axis)]])

    def __eq__(self, other):
        if not isinstance(other, FinalPose):
            return NotImplemented
        return np.array_equal(self.locations, other.locations) and np.array_equal(self.angles, other.angles)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ReachRecord:
    """One reach: a time-ordered trajectory plus the reach interval bounds.

    ``locations`` has shape ``(T, 3, 3)`` and ``angles`` shape ``(T, 7)``.
    Interval bounds are deliberately not checked here so that a loaded but
    broken record can still be reported on by :func:`validate_dataset`.
    """

    subject_id: int
    condition: Condition
    orientation: Orientation
    target: int
    locations: np.ndarray
    angles: np.ndarray
    reach_interval: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "condition", Condition(self.condition))
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        object.__setattr__(self, "target", check_target(self.target))
        loc = np.array(self.locations, dtype=float)
        ang = np.array(self.angles, dtype=float)
        if loc.ndim != 3 or loc.shape[1:] != (3, 3):
            raise ValueError(f"locations must have shape (T, 3, 3), got {loc.shape}")
        if ang.ndim != 2 or ang.shape[1] != 7:
            raise ValueError(f"angles must have shape (T, 7), got {ang.shape}")
        if len(loc) != len(ang):
            raise ValueError("location and angle trajectories differ in length")
        if len(loc) == 0:
            raise ValueError("a reach record needs at least one sample")
        loc.setflags(write=False)
        ang.setflags(write=False)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "angles", ang)
        start, end = self.reach_interval
        object.__setattr__(self, "reach_interval", (int(start), int(end)))

    @property
    def key(self) -> tuple[int, Condition, Orientation, int]:
        return (self.subject_id, self.condition, self.orientation, self.target)

    @property
    def n_samples(self) -> int:
        return len(self.locations)

    def interval_ok(self) -> bool:
        start, end = self.reach_interval
        return 0 <= start <= end < self.n_samples

    def frame(self, i: int) -> FinalPose:
        return FinalPose(self.locations[i], self.angles[i])

    def __eq__(self, other):
        if not isinstance(other, ReachRecord):
            return NotImplemented
        return (
            self.key == other.key
            and self.reach_interval == other.reach_interval
            and np.array_equal(self.locations, other.locations)
            and np.array_equal(self.angles, other.angles)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class NromTable:
    """Normal range of motion (degrees) per movement axis, in ``ANGLE_KEYS`` order."""

    values: np.ndarray

    def __post_init__(self):
        from .errors import NromIncomplete

        try:
            arr = _frozen_array(self.values, (7,), "nrom values")
        except ValueError as exc:
            raise NromIncomplete(str(exc)) from None
        if not (np.isfinite(arr).all() and (arr > 0).all()):
            raise NromIncomplete("every NROM value must be finite and strictly positive")
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_map(cls, table: Mapping[tuple[JointId, AxisId], float]) -> "NromTable":
        from .errors import NromIncomplete

        missing = [angle_key_name(k) for k in ANGLE_KEYS if k not in table]
        if missing:
            raise NromIncomplete(f"NROM table missing axes: {', '.join(missing)}")
        return cls(np.array([table[k] for k in ANGLE_KEYS], dtype=float))

    def to_map(self) -> dict[tuple[JointId, AxisId], float]:
        return {k: float(v) for k, v in zip(ANGLE_KEYS, self.values)}

    def __getitem__(self, key: tuple[JointId, AxisId]) -> float:
        return float(self.values[ANGLE_INDEX[key]])

    def __eq__(self, other):
        if not isinstance(other, NromTable):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Dataset:
    subjects: tuple[SubjectInfo, ...]
    records: tuple[ReachRecord, ...]
    nrom: NromTable
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        subjects = tuple(sorted(self.subjects, key=lambda s: s.subject_id))
        records = tuple(sorted(self.records, key=record_sort_key))
        object.__setattr__(self, "subjects", subjects)
        object.__setattr__(self, "records", records)
        index: dict = {}
        for r in records:
            index.setdefault(r.key, r)
        object.__setattr__(self, "_index", index)

    @property
    def subject_ids(self) -> list[int]:
        return [s.subject_id for s in self.subjects]

    def subject(self, subject_id: int) -> SubjectInfo:
        for s in self.subjects:
            if s.subject_id == subject_id:
                return s
        raise KeyError(subject_id)

    def record(self, subject_id: int, condition: Condition, orientation: Orientation, target: int) -> ReachRecord:
        return self._index[(subject_id, Condition(condition), Orientation(orientation), target)]

    def get(self, subject_id: int, condition: Condition, orientation: Orientation, target: int):
        return self._index.get((subject_id, Condition(condition), Orientation(orientation), target))

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.subjects == other.subjects
            and self.nrom == other.nrom
            and len(self.records) == len(other.records)
            and all(a == b for a, b in zip(self.records, other.records))
        )

    __hash__ = None


def record_sort_key(r: ReachRecord):
    return (r.subject_id, CONDITIONS.index(r.condition), ORIENTATIONS.index(r.orientation), r.target)


NUMBERINGS = ("row-major-top-left", "row-major-top-right", "custom")


@dataclass(frozen=True)
class GridSpec:
    """Target index <-> heatmap cell, seen from the subject's side of the grid.

    Rows and columns are 1-based; row 1 is the top row.
    """

    numbering: str = "row-major-top-left"
    custom: Mapping[int, tuple[int, int]] | None = None
    rows: int = 7
    cols: int = 7
    spacing_mm: float = 300.0

    def __post_init__(self):
        if self.numbering not in NUMBERINGS:
            raise ValueError(f"numbering must be one of {NUMBERINGS}, got {self.numbering!r}")
        if self.rows * self.cols != N_TARGETS:
            raise ValueError("grid must hold exactly 49 cells")
        if self.numbering == "custom":
            if self.custom is None:
                raise ValueError("custom numbering needs a target->cell map")
            mapping = {check_target(int(k)): (int(v[0]), int(v[1])) for k, v in self.custom.items()}
            cells = set(mapping.values())
            valid = {(r, c) for r in range(1, self.rows + 1) for c in range(1, self.cols + 1)}
            if set(mapping) != set(TARGETS) or cells != valid:
                raise ValueError("custom numbering must be a bijection between targets 1..49 and the 7x7 cells")
            object.__setattr__(self, "custom", dict(sorted(mapping.items())))

    def cell(self, n: int) -> tuple[int, int]:
        n = check_target(n)
        if self.numbering == "custom":
            return self.custom[n]
        row, col0 = divmod(n - 1, self.cols)
        col = col0 + 1 if self.numbering == "row-major-top-left" else self.cols - col0
        return row + 1, col

    def target_at(self, row: int, col: int) -> int:
        for n in TARGETS:
            if self.cell(n) == (row, col):
                return n
        raise ValueError(f"no target at cell ({row}, {col})")


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    missing_cells: list[tuple[int, str, str, int]] = field(default_factory=list)
    nonfinite_frames: list[tuple[int, str, str, int, int]] = field(default_factory=list)
    bad_intervals: list[tuple[int, str, str, int]] = field(default_factory=list)
    duplicates: list[tuple[int, str, str, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.errors

    def format(self) -> str:
        lines = [f"validation {'passed' if self.passed else 'FAILED'}: "
                 f"{len(self.errors)} error(s), {len(self.warnings)} warning(s)"]
        lines += [f"error: {e}" for e in self.errors]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def _cell_str(key) -> str:
    s, c, o, n = key
    return f"subject={s} condition={Condition(c).value} orientation={Orientation(o).value} target={n}"


def validate_dataset(
    d: Dataset,
    allow_partial: bool = False,
    subject_ids: Iterable[int] | None = None,
) -> ValidationReport:
    """Check factorial coverage and per-record sanity; never raises.

    Coverage is checked against ``subject_ids`` when given, otherwise against
    subjects 1..7 (the full design) or the declared subjects if there are more.
    """
    report = ValidationReport()
    if subject_ids is None:
        declared = set(d.subject_ids)
        subject_ids = sorted(declared | set(range(1, 8))) if len(declared) <= 7 else sorted(declared)
    subject_ids = list(subject_ids)

    seen: dict = {}
    for r in d.records:
        key = r.key
        if key in seen:
            report.duplicates.append((r.subject_id, r.condition.value, r.orientation.value, r.target))
            report.errors.append(f"duplicate record: {_cell_str(key)}")
        seen[key] = r
        if r.subject_id not in d.subject_ids:
            report.errors.append(f"record for undeclared subject: {_cell_str(key)}")
        if not r.interval_ok():
            report.bad_intervals.append((r.subject_id, r.condition.value, r.orientation.value, r.target))
            report.errors.append(
                f"empty or out-of-range reach interval {r.reach_interval} "
                f"with {r.n_samples} samples: {_cell_str(key)}"
            )
        bad = ~(np.isfinite(r.locations).all(axis=(1, 2)) & np.isfinite(r.angles).all(axis=1))
        for i in np.flatnonzero(bad):
            report.nonfinite_frames.append(
                (r.subject_id, r.condition.value, r.orientation.value, r.target, int(i))
            )
            report.errors.append(f"non-finite values in frame {int(i)}: {_cell_str(key)}")

    for s in subject_ids:
        for c in CONDITIONS:
            for o in ORIENTATIONS:
                for n in TARGETS:
                    if (s, c, o, n) not in seen:
                        report.missing_cells.append((s, c.value, o.value, n))
    if report.missing_cells:
        msg = f"{len(report.missing_cells)} missing (subject, condition, orientation, target) cells"
        if allow_partial:
            report.warnings.append(msg)
        else:
            report.errors.append(msg)

    for s in d.subjects:
        if not (math.isfinite(s.height_mm) and math.isfinite(s.arm_length_mm)):
            report.errors.append(f"non-finite anthropometry for subject {s.subject_id}")
    return report
