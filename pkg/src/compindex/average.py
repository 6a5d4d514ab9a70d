"""Cross-subject mean poses, joint location deviation and joint angle difference."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SubjectCountMismatch
from .model import JOINTS, JointId, angle_indices
from .preprocess import RelativePose


@dataclass(frozen=True)
class AverageDeviation:
    per_joint_L: dict[JointId, float]
    L: float
    per_joint_A: dict[JointId, float]
    A: float
    # |mean_b - mean_u| for each of the 7 movement axes, ANGLE_KEYS order
    per_axis_dA: tuple[float, ...]


def _check_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (3,) or (w < 0).any() or not np.isclose(w.sum(), 1.0):
        raise ValueError("joint weights must be 3 non-negative numbers summing to 1")
    return w


def mean_pose(relposes: Sequence[RelativePose], n_subjects: int | None = 7) -> tuple[np.ndarray, np.ndarray]:
    """Component-wise mean of one pose per subject -> ((3, 3) locations, (7,) angles)."""
    if not relposes or (n_subjects is not None and len(relposes) != n_subjects):
        raise SubjectCountMismatch(f"expected {n_subjects} subject poses, got {len(relposes)}")
    locs = np.mean([p.rel_locations for p in relposes], axis=0)
    angs = np.mean([p.norm_angles for p in relposes], axis=0)
    return locs, angs


def location_deviation(mean_u: np.ndarray, mean_b: np.ndarray, weights=None):
    per_joint = np.linalg.norm(np.asarray(mean_b) - np.asarray(mean_u), axis=1)
    if weights is None:
        total = float(per_joint.sum() / 3)
    else:
        total = float(per_joint @ _check_weights(weights))
    return {j: float(v) for j, v in zip(JOINTS, per_joint)}, total


def angle_difference(mean_angles_u: np.ndarray, mean_angles_b: np.ndarray, weights=None):
    """Per-joint mean absolute normalised-angle difference and their joint average.

    Elbow contributes flexion only; shoulder and trunk average their three axes.
    """
    diff = np.abs(np.asarray(mean_angles_b, dtype=float) - np.asarray(mean_angles_u, dtype=float))
    per_joint = np.array([diff[angle_indices(j)].mean() for j in JOINTS])
    if weights is None:
        total = float(per_joint.sum() / 3)
    else:
        total = float(per_joint @ _check_weights(weights))
    return {j: float(v) for j, v in zip(JOINTS, per_joint)}, total


def average_deviation(
    relposes_u: Sequence[RelativePose],
    relposes_b: Sequence[RelativePose],
    n_subjects: int | None = 7,
    weights=None,
) -> AverageDeviation:
    loc_u, ang_u = mean_pose(relposes_u, n_subjects)
    loc_b, ang_b = mean_pose(relposes_b, n_subjects)
    per_L, L = location_deviation(loc_u, loc_b, weights)
    per_A, A = angle_difference(ang_u, ang_b, weights)
    dA = tuple(float(v) for v in np.abs(ang_b - ang_u))
    return AverageDeviation(per_L, L, per_A, A, dA)
