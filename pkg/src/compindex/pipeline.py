"""Per-target metric computation for one grid orientation, and its CSV outputs."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .average import average_deviation
from .dispersion import angle_std, location_std
from .errors import CountMismatch, FlaggedComponent, UnknownMetric
from .group import group_scores
from .index import IndexConfig, TargetMetrics, compensation_index
from .model import ANGLE_KEYS, JOINTS, TARGETS, Condition, Dataset, GridSpec, Orientation, angle_key_name
from .preprocess import RelativePose, preprocess

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnalysisConfig:
    reference_scope: str = "per-orientation"
    joint_weights: tuple[float, float, float] | None = None
    scale_features: bool = False
    std_ddof: int = 0
    index: IndexConfig = field(default_factory=IndexConfig)
    grid: GridSpec = field(default_factory=GridSpec)
    workers: int = 1


def target_metrics(
    target: int,
    poses_u: Sequence[RelativePose],
    poses_b: Sequence[RelativePose],
    subjects,
    cfg: AnalysisConfig,
) -> TargetMetrics:
    avg = average_deviation(poses_u, poses_b, n_subjects=len(subjects), weights=cfg.joint_weights)
    n = len(subjects)
    sc_u = location_std(poses_u, n, cfg.std_ddof)
    sc_b = location_std(poses_b, n, cfg.std_ddof)
    st_u = angle_std(poses_u, n, cfg.std_ddof)
    st_b = angle_std(poses_b, n, cfg.std_ddof)
    grp = group_scores(poses_u, poses_b, subjects, scale=cfg.scale_features)
    flags = list(grp.flags)
    try:
        index = compensation_index(avg.L, avg.A, grp.J, grp.H, cfg.index)
    except FlaggedComponent:
        index = math.nan
        flags.append("I_unavailable")
    return TargetMetrics(
        target=target,
        L=avg.L,
        A=avg.A,
        sigma_C_u=sc_u,
        sigma_C_b=sc_b,
        sigma_theta_u=st_u,
        sigma_theta_b=st_b,
        J=grp.J,
        H=grp.H,
        I=index,
        per_joint_L=avg.per_joint_L,
        per_joint_A=avg.per_joint_A,
        per_joint_J=grp.per_joint_J,
        per_joint_H=grp.per_joint_H,
        winning_config=grp.winning_config,
        per_axis_dA=avg.per_axis_dA,
        flags=tuple(flags),
    )


def _target_job(args):
    return target_metrics(*args)


def compute_metrics(d: Dataset, orientation, cfg: AnalysisConfig | None = None) -> list[TargetMetrics]:
    """TargetMetrics for targets 1..49 of one orientation, in target order.

    At each target only subjects with both an unbraced and a braced reach are
    used; a complete dataset therefore always uses every subject.
    """
    cfg = cfg or AnalysisConfig()
    orientation = Orientation(orientation)
    rel = preprocess(d, orientation, cfg.reference_scope)
    jobs = []
    for n in TARGETS:
        subjects = [
            s for s in d.subjects
            if (s.subject_id, Condition.UNBRACED, n) in rel and (s.subject_id, Condition.BRACED, n) in rel
        ]
        if len(subjects) < 2:
            raise CountMismatch(f"target {n}: need at least 2 subjects with both conditions, got {len(subjects)}")
        poses_u = [rel[(s.subject_id, Condition.UNBRACED, n)] for s in subjects]
        poses_b = [rel[(s.subject_id, Condition.BRACED, n)] for s in subjects]
        jobs.append((n, poses_u, poses_b, subjects, cfg))
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_target_job, jobs))
    else:
        results = [_target_job(j) for j in jobs]
    results.sort(key=lambda m: m.target)
    flagged = [m.target for m in results if math.isnan(m.I)]
    if flagged:
        log.warning("index unavailable at %d target(s): %s", len(flagged), flagged)
    return results


def flagged_mean(values: Sequence[float]) -> float:
    """Mean over finite values; flagged (nan) cells are left out."""
    finite = [v for v in values if math.isfinite(v)]
    if len(finite) < len(values):
        log.warning("excluding %d flagged cell(s) from the average", len(values) - len(finite))
    return sum(finite) / len(finite) if finite else math.nan


METRIC_COLUMNS = ["L", "A", "sigma_C_u", "sigma_C_b", "sigma_theta_u", "sigma_theta_b", "J", "H", "I"]


def _fmt(x) -> str:
    return "nan" if isinstance(x, float) and math.isnan(x) else repr(float(x))


def write_metrics(metrics: Sequence[TargetMetrics], orientation, out_dir, grid: GridSpec | None = None) -> list[Path]:
    """Write ``metrics_<o>.csv``, ``joints_<o>.csv`` and ``axes_<o>.csv``; returns the paths."""
    grid = grid or GridSpec()
    o = Orientation(orientation).value
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    metrics = sorted(metrics, key=lambda m: m.target)

    paths = [out / f"metrics_{o}.csv", out / f"joints_{o}.csv", out / f"axes_{o}.csv"]
    with open(paths[0], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["target", "row", "col", *METRIC_COLUMNS, "flags"])
        for m in metrics:
            row, col = grid.cell(m.target)
            w.writerow([m.target, row, col, *(_fmt(getattr(m, c)) for c in METRIC_COLUMNS), ";".join(m.flags)])

    js = [j.value for j in JOINTS]
    with open(paths[1], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(
            ["target"]
            + [f"{k}_{j}" for k in ("L", "A", "J", "H") for j in js]
            + [f"config_{j}" for j in js]
        )
        for m in metrics:
            w.writerow(
                [m.target]
                + [_fmt(getattr(m, f"per_joint_{k}")[j]) for k in ("L", "A", "J", "H") for j in JOINTS]
                + [str(m.winning_config[j]) for j in JOINTS]
            )

    with open(paths[2], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["target"] + [f"dA_{angle_key_name(k)}" for k in ANGLE_KEYS])
        for m in metrics:
            w.writerow([m.target] + [_fmt(v) for v in m.per_axis_dA])
    return paths


def read_metric_column(path, metric: str) -> dict[int, float]:
    """Read one column of any per-target CSV written by :func:`write_metrics`."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or metric not in reader.fieldnames or metric == "target":
            raise UnknownMetric(f"{metric!r} is not a column of {path}")
        return {int(row["target"]): float(row[metric]) for row in reader}
