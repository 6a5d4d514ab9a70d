"""Between-subject spread of final poses at one target under one condition."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import SubjectCountMismatch
from .model import JOINTS, angle_indices
from .preprocess import RelativePose


def _check(relposes, n_subjects):
    if not relposes or (n_subjects is not None and len(relposes) != n_subjects):
        raise SubjectCountMismatch(f"expected {n_subjects} subject poses, got {len(relposes)}")


def vector_std(points: np.ndarray, ddof: int = 0) -> float:
    """Root-mean-square distance of 3-vectors to their centroid.

    Reduces to the ordinary standard deviation for 1-D data.
    """
    points = np.asarray(points, dtype=float)
    centred = points - points.mean(axis=0)
    return float(np.sqrt((centred**2).sum() / (len(points) - ddof)))


def location_std(relposes: Sequence[RelativePose], n_subjects: int | None = 7, ddof: int = 0) -> float:
    _check(relposes, n_subjects)
    locs = np.array([p.rel_locations for p in relposes])
    return sum(vector_std(locs[:, i], ddof) for i in range(len(JOINTS))) / 3


def angle_std(relposes: Sequence[RelativePose], n_subjects: int | None = 7, ddof: int = 0) -> float:
    _check(relposes, n_subjects)
    angs = np.array([p.norm_angles for p in relposes])
    per_axis = angs.std(axis=0, ddof=ddof)
    return float(sum(per_axis[angle_indices(j)].mean() for j in JOINTS) / 3)
