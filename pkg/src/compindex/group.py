"""Group-level comparison of the two conditions at one target.

Each subject contributes one feature vector per joint and condition. The two
14-point clouds are compared by a Fisher scatter ratio (separability) and by
how well a two-cluster agglomerative clustering recovers the condition labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateWithinScatter, LengthMismatch, TooFewPoints
from .model import JOINTS, Condition, JointId, SubjectInfo, angle_indices
from .preprocess import RelativePose

METRICS = ("manhattan", "euclidean")
LINKAGES = ("complete", "average", "single")

# Relative gap under which two merge distances count as tied for reporting.
TIE_RTOL = 1e-12

# Within-class scatter at or below this fraction of the points' own RMS
# magnitude is rounding residue (e.g. from origin removal), not spread.
SCATTER_RTOL = 1e-10


@dataclass(frozen=True)
class ClusteringConfig:
    metric: str = "manhattan"
    linkage: str = "complete"
    k: int = 2

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if self.linkage not in LINKAGES:
            raise ValueError(f"linkage must be one of {LINKAGES}, got {self.linkage!r}")
        if self.k != 2:
            raise ValueError("only two-cluster solutions are supported")

    def __str__(self):
        return f"{self.metric}-{self.linkage}"

    @classmethod
    def parse(cls, text: str) -> "ClusteringConfig":
        metric, linkage = text.split("-")
        return cls(metric, linkage)


# Canonical order doubles as the tie-break between equally accurate configs.
ALL_CONFIGS = tuple(ClusteringConfig(m, l) for m in METRICS for l in LINKAGES)


@dataclass(frozen=True, eq=False)
class FeatureVector:
    joint: JointId
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        expected = 6 if self.joint == JointId.ELBOW else 8
        if v.shape != (expected,):
            raise ValueError(f"{self.joint.name.lower()} feature must have {expected} values, got {v.shape}")
        if not np.isfinite(v).all():
            raise ValueError("feature values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class GroupScores:
    per_joint_J: dict[JointId, float]
    J: float
    per_joint_H: dict[JointId, float]
    H: float
    winning_config: dict[JointId, ClusteringConfig]
    flags: tuple[str, ...] = field(default=())

    @property
    def J_degenerate(self) -> bool:
        return any(f.startswith("J_degenerate") for f in self.flags)


def build_feature(relpose: RelativePose, joint: JointId, subject: SubjectInfo) -> FeatureVector:
    """Concatenate relative location, normalised angle(s) and anthropometry, unscaled."""
    values = np.concatenate(
        [
            relpose.location(joint),
            relpose.norm_angles[angle_indices(joint)],
            [subject.height_mm, subject.arm_length_mm],
        ]
    )
    return FeatureVector(joint, values)


def _as_matrix(features) -> np.ndarray:
    return np.array([f.values if isinstance(f, FeatureVector) else f for f in features], dtype=float)


def standardize(points: np.ndarray) -> np.ndarray:
    """Z-score each column; constant columns are only centred."""
    points = np.asarray(points, dtype=float)
    sd = points.std(axis=0)
    sd[sd == 0] = 1.0
    return (points - points.mean(axis=0)) / sd


def separability(features_u, features_b) -> float:
    """Between-class over within-class scatter for two groups of feature vectors.

    The overall mean is the midpoint of the two class means. Raises
    DegenerateWithinScatter when every class collapses to a single point,
    up to floating-point residue.
    """
    xu, xb = _as_matrix(features_u), _as_matrix(features_b)
    if xu.ndim != 2 or xb.ndim != 2 or xu.shape[1] != xb.shape[1]:
        raise LengthMismatch("both classes need feature vectors of the same dimension")
    mu, mb = xu.mean(axis=0), xb.mean(axis=0)
    overall = (mu + mb) / 2
    s_w = float(((xu - mu) ** 2).sum() + ((xb - mb) ** 2).sum())
    magnitude = float((xu**2).sum() + (xb**2).sum())
    if s_w <= SCATTER_RTOL**2 * magnitude:
        raise DegenerateWithinScatter("within-class scatter is zero")
    s_b = len(xu) * float(((mu - overall) ** 2).sum()) + len(xb) * float(((mb - overall) ** 2).sum())
    return s_b / s_w


def pairwise_distances(points: np.ndarray, metric: str) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    if metric == "manhattan":
        return np.abs(diff).sum(axis=-1)
    if metric == "euclidean":
        return np.sqrt((diff**2).sum(axis=-1))
    raise ValueError(f"unknown metric {metric!r}")


def agglomerate(points, config: ClusteringConfig) -> tuple[np.ndarray, bool]:
    """Bottom-up two-cluster agglomeration; returns (labels, hit_a_tie).

    Clusters are keyed by their smallest member index and the closest pair is
    searched in key order, so among equally close pairs the one with the
    lexicographically smallest keys merges first. Cluster distances are kept
    up to date with the Lance-Williams recurrences, which are exact for
    single, complete and unweighted-average (UPGMA) linkage.

    Labels are 1 for the cluster holding point 0 and 2 for the other.
    """
    x = _as_matrix(points)
    n = len(x)
    if n < config.k:
        raise TooFewPoints(f"need at least {config.k} points, got {n}")
    d = pairwise_distances(x, config.metric)
    np.fill_diagonal(d, np.inf)
    size = np.ones(n)
    active = np.ones(n, dtype=bool)
    owner = np.arange(n)
    tied = False
    for n_active in range(n, config.k, -1):
        slots = np.flatnonzero(active)
        sub = d[np.ix_(slots, slots)]
        iu = np.triu_indices(n_active, 1)
        vals = sub[iu]
        best = int(np.argmin(vals))
        m = vals[best]
        if np.count_nonzero(np.abs(vals - m) <= TIE_RTOL * abs(m)) > 1:
            tied = True
        a, b = slots[iu[0][best]], slots[iu[1][best]]
        if config.linkage == "single":
            merged = np.minimum(d[a], d[b])
        elif config.linkage == "complete":
            merged = np.maximum(d[a], d[b])
        else:
            merged = (size[a] * d[a] + size[b] * d[b]) / (size[a] + size[b])
        d[a, :] = merged
        d[:, a] = merged
        d[a, a] = np.inf
        d[b, :] = np.inf
        d[:, b] = np.inf
        size[a] += size[b]
        active[b] = False
        owner[owner == b] = a
    keys = np.flatnonzero(active)
    labels = np.searchsorted(keys, owner) + 1
    return labels, tied


def agglomerative_cluster(points, config: ClusteringConfig) -> np.ndarray:
    return agglomerate(points, config)[0]


def clustering_accuracy(labels, true_conditions) -> float:
    """Fraction correctly labelled under the better of the two cluster->class matchings."""
    labels = list(labels)
    truth = [Condition(c) for c in true_conditions]
    if len(labels) != len(truth):
        raise LengthMismatch(f"{len(labels)} labels for {len(truth)} conditions")
    if not labels:
        raise LengthMismatch("no labels")
    first = labels[0]
    # Matching: cluster of point 0 -> unbraced, the rest -> braced; the other
    # matching gets exactly the complement right.
    correct = int(sum((lab == first) == (c == Condition.UNBRACED) for lab, c in zip(labels, truth)))
    return max(correct, len(labels) - correct) / len(labels)


def clustering_score(features_u, features_b, configs: Sequence[ClusteringConfig] = ALL_CONFIGS, scale: bool = False):
    """Best accuracy over clustering configs -> (H, winning config, any_tie)."""
    xu, xb = _as_matrix(features_u), _as_matrix(features_b)
    points = np.vstack([xu, xb])
    if scale:
        points = standardize(points)
    truth = [Condition.UNBRACED] * len(xu) + [Condition.BRACED] * len(xb)
    best_h, best_cfg, best_tied = -1.0, None, False
    for cfg in configs:
        labels, tied = agglomerate(points, cfg)
        h = clustering_accuracy(labels, truth)
        if h > best_h:
            best_h, best_cfg, best_tied = h, cfg, tied
    return best_h, best_cfg, best_tied


def group_scores(
    relposes_u: Sequence[RelativePose],
    relposes_b: Sequence[RelativePose],
    subjects: Sequence[SubjectInfo],
    scale: bool = False,
) -> GroupScores:
    """Per-joint separability and clustering accuracy at one target.

    ``relposes_u[i]`` and ``relposes_b[i]`` both belong to ``subjects[i]``.
    A joint with zero within-class scatter gets ``J = nan`` and a
    ``J_degenerate:<joint>`` flag; the target-level J is then nan as well.
    """
    if not (len(relposes_u) == len(relposes_b) == len(subjects)):
        raise LengthMismatch("need one unbraced and one braced pose per subject")
    per_j, per_h, winners, flags = {}, {}, {}, []
    for joint in JOINTS:
        fu = np.array([build_feature(p, joint, s).values for p, s in zip(relposes_u, subjects)])
        fb = np.array([build_feature(p, joint, s).values for p, s in zip(relposes_b, subjects)])
        if scale:
            both = standardize(np.vstack([fu, fb]))
            fu, fb = both[: len(fu)], both[len(fu):]
        try:
            per_j[joint] = separability(fu, fb)
        except DegenerateWithinScatter:
            per_j[joint] = math.nan
            flags.append(f"J_degenerate:{joint.value}")
        h, cfg, tied = clustering_score(fu, fb)
        per_h[joint] = h
        winners[joint] = cfg
        if tied:
            flags.append(f"H_tie:{joint.value}")
    j_vals = [per_j[j] for j in JOINTS]
    J = math.nan if any(math.isnan(v) for v in j_vals) else sum(j_vals) / 3
    H = sum(per_h[j] for j in JOINTS) / 3
    return GroupScores(per_j, J, per_h, H, winners, tuple(flags))
