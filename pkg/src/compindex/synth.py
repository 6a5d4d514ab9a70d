"""Synthetic reaching datasets with a tunable amount of braced-condition compensation.

The body model is a torso-shoulder-elbow-wrist chain solved in closed form:
the wrist is placed on the target, the trunk leans straight towards targets
beyond comfortable reach, and the elbow hangs below the shoulder-wrist line.
It only has to produce plausible numbers for the downstream metrics, not
anatomically exact poses.

Coordinates are in mm with x to the subject's right, y forward, z up. The
7x7 grid stands in a frontal plane in front of the subject; row 1 is the top
row and column 1 is on the subject's left.

Braced poses are the unbraced pose plus ``compensation_gain`` times a fixed
per-orientation offset profile, weighted up inside a grid region and scaled
by a per-subject strategy multiplier. Strategy noise that both conditions
share spreads the subjects apart without making the conditions differ, so
``compensation_gain = 0`` yields braced == unbraced exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnreachableTarget
from .model import (
    CONDITIONS,
    ORIENTATIONS,
    TARGETS,
    AxisId,
    Condition,
    Dataset,
    GridSpec,
    JointId,
    NromTable,
    Orientation,
    ReachRecord,
    SubjectInfo,
)

E, S, T = JointId.ELBOW, JointId.SHOULDER, JointId.TRUNK
X, Y, Z = AxisId.X, AxisId.Y, AxisId.Z

DEFAULT_NROM = {
    (E, X): 150.0,
    (S, X): 135.0,
    (S, Y): 180.0,
    (S, Z): 70.0,
    (T, X): 90.0,
    (T, Y): 45.0,
    (T, Z): 30.0,
}

# Full-strength braced offsets: joint location shifts (mm, rows e/s/t) and
# angle shifts (degrees, ANGLE_KEYS order).
BRACED_PROFILES = {
    Orientation.HORIZONTAL: (
        ((40.0, 10.0, 60.0), (5.0, 15.0, 25.0), (-10.0, 20.0, 0.0)),
        (8.0, -10.0, 12.0, -15.0, 4.0, 5.0, 4.0),
    ),
    Orientation.VERTICAL: (
        ((20.0, 10.0, -30.0), (0.0, 10.0, 10.0), (-5.0, 10.0, 0.0)),
        (-6.0, 5.0, -6.0, 10.0, 3.0, -4.0, 3.0),
    ),
}

# (row_min, row_max, col_min, col_max), inclusive, where braced offsets act at full strength.
DEFAULT_REGIONS = {
    Orientation.HORIZONTAL: (1, 4, 1, 4),
    Orientation.VERTICAL: (2, 6, 1, 2),
}

NOISE_LOCATION_MM = 20.0
NOISE_ANGLE_DEG = 4.0


@dataclass(frozen=True)
class SynthParams:
    n_subjects: int = 7
    height_range_mm: tuple[float, float] = (1600.0, 1900.0)
    arm_length_range_mm: tuple[float, float] = (560.0, 700.0)
    spacing_mm: float = 300.0
    grid_distance_mm: float = 450.0
    grid_center_height_mm: float = 1000.0
    compensation_gain: float = 1.0
    strategy_noise: float = 1.0
    outside_gain: float = 0.2
    origin_offset_mm: float = 250.0
    max_trunk_shift_mm: float = 1600.0
    regions: dict = field(default_factory=lambda: dict(DEFAULT_REGIONS))
    nrom: dict = field(default_factory=lambda: dict(DEFAULT_NROM))
    seed: int = 0

    def __post_init__(self):
        numbers = {
            "n_subjects": self.n_subjects,
            "spacing_mm": self.spacing_mm,
            "grid_distance_mm": self.grid_distance_mm,
            "compensation_gain": self.compensation_gain,
            "strategy_noise": self.strategy_noise,
            "outside_gain": self.outside_gain,
            "origin_offset_mm": self.origin_offset_mm,
            "max_trunk_shift_mm": self.max_trunk_shift_mm,
        }
        for name, v in numbers.items():
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
        if self.n_subjects < 2:
            raise ValueError("need at least two subjects")
        for name, (lo, hi) in (("height_range_mm", self.height_range_mm), ("arm_length_range_mm", self.arm_length_range_mm)):
            if not 0 < lo <= hi:
                raise ValueError(f"{name} must satisfy 0 < low <= high")
        if self.arm_length_range_mm[1] >= self.height_range_mm[0]:
            raise ValueError("arm lengths must be shorter than heights")
        regions = {Orientation(k): tuple(int(x) for x in v) for k, v in self.regions.items()}
        object.__setattr__(self, "regions", regions)
        NromTable.from_map(self.nrom)


@dataclass(frozen=True, eq=False)
class SynthPose:
    """Ground-truth final pose before capture-origin offsets: (3, 3) mm and (7,) degrees."""

    locations: np.ndarray
    angles: np.ndarray


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _saturate(angles: np.ndarray, nrom: np.ndarray) -> np.ndarray:
    # Smoothly keeps every angle strictly inside +/- NROM.
    return nrom * np.tanh(angles / nrom)


def target_position(n: int, p: SynthParams, grid: GridSpec | None = None) -> np.ndarray:
    row, col = (grid or GridSpec()).cell(n)
    return np.array(
        [
            (col - 4) * p.spacing_mm,
            p.grid_distance_mm,
            p.grid_center_height_mm - (row - 4) * p.spacing_mm,
        ]
    )


def _segments(subject: SubjectInfo):
    h, l = subject.height_mm, subject.arm_length_mm
    trunk = np.array([0.0, 0.0, 0.52 * h])
    shoulder = np.array([0.13 * h, 0.0, 0.82 * h])
    return trunk, shoulder, 0.53 * l, 0.47 * l, 0.30 * h


def rest_pose(subject: SubjectInfo) -> SynthPose:
    trunk, shoulder, upper, _, _ = _segments(subject)
    elbow = shoulder + np.array([0.0, 0.0, -upper])
    return SynthPose(np.array([elbow, shoulder, trunk]), np.array([10.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0]))


def reach_pose(subject: SubjectInfo, target: np.ndarray, p: SynthParams) -> SynthPose:
    """Unsaturated closed-form reaching pose with the wrist on ``target``."""
    trunk0, shoulder0, upper, fore, trunk_len = _segments(subject)
    reach = 0.9 * (upper + fore)
    to_target = target - shoulder0
    dist = np.linalg.norm(to_target)
    lean = max(0.0, dist - reach)
    if lean > p.max_trunk_shift_mm:
        raise UnreachableTarget(
            f"target at {target.tolist()} needs a {lean:.0f} mm trunk shift for subject "
            f"{subject.subject_id} (limit {p.max_trunk_shift_mm:.0f} mm)"
        )
    shift = lean * _unit(to_target)
    shoulder = shoulder0 + shift
    trunk = trunk0 + 0.5 * shift

    v = target - shoulder
    d = np.linalg.norm(v)
    u = v / d
    cos_a = np.clip((upper**2 + d**2 - fore**2) / (2 * upper * d), -1.0, 1.0)
    swivel = np.array([0.3, 0.0, -1.0])
    swivel = swivel - (swivel @ u) * u
    if np.linalg.norm(swivel) < 1e-9:
        swivel = np.array([0.0, -1.0, 0.0]) - u[1] * u
    elbow = shoulder + upper * (cos_a * u + math.sqrt(1 - cos_a**2) * _unit(swivel))

    cos_b = np.clip((upper**2 + fore**2 - d**2) / (2 * upper * fore), -1.0, 1.0)
    elbow_flexion = 180.0 - math.degrees(math.acos(cos_b))
    humerus = (elbow - shoulder) / upper
    elevation = math.degrees(math.acos(np.clip(-humerus[2], -1.0, 1.0)))
    plane = math.degrees(math.atan2(humerus[1], humerus[0]))
    forearm = (target - elbow) / fore
    ref = np.array([0.0, 1.0, 0.0]) - humerus[1] * humerus
    if np.linalg.norm(ref) < 1e-9:
        ref = np.array([0.0, 0.0, 1.0]) - humerus[2] * humerus
    ref = _unit(ref)
    f_perp = forearm - (forearm @ humerus) * humerus
    rotation = math.degrees(math.atan2(f_perp @ np.cross(humerus, ref), f_perp @ ref))

    trunk_flexion = math.degrees(math.atan2(shift[1], trunk_len))
    trunk_rotation = 0.5 * math.degrees(math.atan2(-target[0], p.grid_distance_mm))
    trunk_lateral = math.degrees(math.atan2(shift[0], trunk_len))
    angles = np.array([elbow_flexion, plane, elevation, rotation, trunk_flexion, trunk_rotation, trunk_lateral])
    return SynthPose(np.array([elbow, shoulder, trunk]), angles)


def region_weight(n: int, orientation: Orientation, p: SynthParams, grid: GridSpec | None = None) -> float:
    row, col = (grid or GridSpec()).cell(n)
    r0, r1, c0, c1 = p.regions[Orientation(orientation)]
    return 1.0 if (r0 <= row <= r1 and c0 <= col <= c1) else p.outside_gain


def distorted_targets(orientation: Orientation, p: SynthParams, grid: GridSpec | None = None) -> list[int]:
    return [n for n in TARGETS if region_weight(n, orientation, p, grid) == 1.0]


def _subject_info(subject_id: int, rng: np.random.Generator, p: SynthParams) -> SubjectInfo:
    h = rng.uniform(*p.height_range_mm)
    l = rng.uniform(*p.arm_length_range_mm)
    return SubjectInfo(subject_id, float(h), float(l))


@dataclass(frozen=True, eq=False)
class SynthResult:
    """A generated dataset plus the ground truth it was built from.

    ``final_poses`` and ``rest_poses`` are keyed by (subject, condition,
    orientation, target) and already include the capture-origin offset, i.e.
    they are exactly what the reach record's first and last frames must hold.
    """

    dataset: Dataset
    final_poses: dict
    rest_poses: dict
    origins: dict


def generate(p: SynthParams | None = None) -> SynthResult:
    p = p or SynthParams()
    nrom = NromTable.from_map(p.nrom)
    grid = GridSpec(spacing_mm=p.spacing_mm)
    children = np.random.SeedSequence(p.seed).spawn(p.n_subjects)

    subjects, records = [], []
    finals, rests, origin_map = {}, {}, {}
    for sid, child in enumerate(children, start=1):
        rng = np.random.default_rng(child)
        info = _subject_info(sid, rng, p)
        subjects.append(info)
        strategy = rng.uniform(0.7, 1.3)
        rest = rest_pose(info)
        for orientation in ORIENTATIONS:
            loc_profile, ang_profile = (np.array(a) for a in BRACED_PROFILES[orientation])
            origins = {c: p.origin_offset_mm * rng.standard_normal(3) for c in CONDITIONS}
            for c in CONDITIONS:
                origin_map[(sid, c, orientation)] = origins[c]
            for n in TARGETS:
                base = reach_pose(info, target_position(n, p, grid), p)
                shared_loc = p.strategy_noise * NOISE_LOCATION_MM * rng.standard_normal((3, 3))
                shared_ang = p.strategy_noise * NOISE_ANGLE_DEG * rng.standard_normal(7)
                own_loc = p.strategy_noise * NOISE_LOCATION_MM * rng.standard_normal((3, 3))
                own_ang = p.strategy_noise * NOISE_ANGLE_DEG * rng.standard_normal(7)
                gain = p.compensation_gain * region_weight(n, orientation, p, grid)
                loc_u = base.locations + shared_loc
                ang_u = base.angles + shared_ang
                raw = {
                    Condition.UNBRACED: (loc_u, ang_u),
                    Condition.BRACED: (
                        loc_u + gain * (strategy * loc_profile + own_loc),
                        ang_u + gain * (strategy * ang_profile + own_ang),
                    ),
                }
                for c in CONDITIONS:
                    loc, ang = raw[c]
                    final = SynthPose(loc + origins[c], _saturate(ang, nrom.values))
                    start = SynthPose(rest.locations + origins[c], rest.angles)
                    key = (sid, c, orientation, n)
                    finals[key], rests[key] = final, start
                    records.append(
                        ReachRecord(
                            sid, c, orientation, n,
                            np.stack([start.locations, final.locations]),
                            np.stack([start.angles, final.angles]),
                            (0, 1),
                        )
                    )
    return SynthResult(Dataset(tuple(subjects), tuple(records), nrom), finals, rests, origin_map)


def generate_dataset(p: SynthParams | None = None) -> Dataset:
    return generate(p).dataset
