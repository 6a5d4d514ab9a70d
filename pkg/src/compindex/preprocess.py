"""Relative joint locations and NROM-normalised joint angles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CountMismatch
from .ingest import extract_final_pose, extract_initial_pose
from .model import (
    ANGLE_INDEX,
    JOINT_INDEX,
    AxisId,
    Condition,
    Dataset,
    FinalPose,
    JointId,
    NromTable,
    Orientation,
    ORIENTATIONS,
    TARGETS,
)

REFERENCE_SCOPES = ("per-orientation", "pooled")


@dataclass(frozen=True, eq=False)
class RelativePose:
    """Final pose after origin removal and angle normalisation.

    ``rel_locations`` is ``(3, 3)`` in mm, ``norm_angles`` is ``(7,)`` in
    percent of NROM. Kept a distinct type from :class:`FinalPose` so the
    normalisation can't be applied twice by accident.
    """

    rel_locations: np.ndarray
    norm_angles: np.ndarray

    def __post_init__(self):
        loc = np.array(self.rel_locations, dtype=float)
        ang = np.array(self.norm_angles, dtype=float)
        if loc.shape != (3, 3) or ang.shape != (7,):
            raise ValueError("relative pose needs (3, 3) locations and 7 angles")
        if not (np.isfinite(loc).all() and np.isfinite(ang).all()):
            raise ValueError("relative pose values must be finite")
        loc.setflags(write=False)
        ang.setflags(write=False)
        object.__setattr__(self, "rel_locations", loc)
        object.__setattr__(self, "norm_angles", ang)

    def location(self, joint: JointId) -> np.ndarray:
        return self.rel_locations[JOINT_INDEX[joint]]

    def angle(self, joint: JointId, axis: AxisId) -> float:
        return float(self.norm_angles[ANGLE_INDEX[(joint, axis)]])


def relativize_locations(
    final_poses: Sequence[FinalPose],
    initial_poses: Sequence[FinalPose],
    expected: int | None = 49,
) -> list[np.ndarray]:
    """Subtract the mean initial location of each joint from every final location.

    The same reference is used for every reach in the block, which cancels any
    offset of the capture-system origin.
    """
    if len(final_poses) != len(initial_poses):
        raise CountMismatch(f"{len(final_poses)} final poses but {len(initial_poses)} initial poses")
    if expected is not None and len(final_poses) != expected:
        raise CountMismatch(f"expected {expected} poses, got {len(final_poses)}")
    if not final_poses:
        raise CountMismatch("no poses to relativize")
    reference = mean_initial_locations(initial_poses)
    return [p.locations - reference for p in final_poses]


def mean_initial_locations(initial_poses: Sequence[FinalPose]) -> np.ndarray:
    return np.mean([p.locations for p in initial_poses], axis=0)


def normalize_angles(pose: FinalPose, nrom: NromTable) -> np.ndarray:
    return pose.angles / nrom.values * 100.0


def preprocess(
    d: Dataset,
    orientation: Orientation,
    reference_scope: str = "per-orientation",
) -> dict[tuple[int, Condition, int], RelativePose]:
    """Relative poses for every (subject, condition, target) of one orientation.

    With ``reference_scope="pooled"`` the initial-location reference averages
    over both orientations' reaches instead of just this one.
    """
    if reference_scope not in REFERENCE_SCOPES:
        raise ValueError(f"reference_scope must be one of {REFERENCE_SCOPES}")
    orientation = Orientation(orientation)
    ref_orients = ORIENTATIONS if reference_scope == "pooled" else (orientation,)
    out = {}
    for s in d.subject_ids:
        for c in Condition:
            records = [d.get(s, c, orientation, n) for n in TARGETS]
            present = [r for r in records if r is not None]
            if not present:
                continue
            ref_records = [
                r for o in ref_orients for n in TARGETS if (r := d.get(s, c, o, n)) is not None
            ]
            finals = [extract_final_pose(r) for r in present]
            initials = [extract_initial_pose(r) for r in ref_records]
            reference = mean_initial_locations(initials)
            for r, fp in zip(present, finals):
                out[(s, c, r.target)] = RelativePose(fp.locations - reference, normalize_angles(fp, d.nrom))
    return out
