"""Compensation Index: empirically normalised average of the four metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import FlaggedComponent
from .group import ClusteringConfig
from .model import JointId


@dataclass(frozen=True)
class IndexConfig:
    divisor_L: float = 100.0
    divisor_A: float = 10.0
    weights: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)

    def __post_init__(self):
        if not (self.divisor_L > 0 and self.divisor_A > 0):
            raise ValueError("index divisors must be positive")
        w = tuple(float(x) for x in self.weights)
        if len(w) != 4 or any(x < 0 for x in w) or not math.isclose(sum(w), 1.0):
            raise ValueError("index weights must be 4 non-negative numbers summing to 1")
        object.__setattr__(self, "weights", w)


def compensation_index(L: float, A: float, J: float, H: float, cfg: IndexConfig | None = None) -> float:
    cfg = cfg or IndexConfig()
    parts = (L / cfg.divisor_L, A / cfg.divisor_A, J, H)
    if any(not math.isfinite(p) for p in parts):
        raise FlaggedComponent("a component is flagged or non-finite; index unavailable")
    return sum(w * p for w, p in zip(cfg.weights, parts))


@dataclass(frozen=True)
class TargetMetrics:
    target: int
    L: float
    A: float
    sigma_C_u: float
    sigma_C_b: float
    sigma_theta_u: float
    sigma_theta_b: float
    J: float
    H: float
    I: float
    per_joint_L: dict[JointId, float] = field(default_factory=dict)
    per_joint_A: dict[JointId, float] = field(default_factory=dict)
    per_joint_J: dict[JointId, float] = field(default_factory=dict)
    per_joint_H: dict[JointId, float] = field(default_factory=dict)
    winning_config: dict[JointId, ClusteringConfig] = field(default_factory=dict)
    per_axis_dA: tuple[float, ...] = ()
    flags: tuple[str, ...] = ()
