"""Compensatory-motion metrics over a 7x7 reaching workspace."""

from .model import (
    AxisId,
    Condition,
    Dataset,
    FinalPose,
    GridSpec,
    JointId,
    NromTable,
    Orientation,
    ReachRecord,
    SubjectInfo,
    validate_dataset,
)
from .ingest import CsvSchemaConfig, load_dataset, write_dataset
from .index import IndexConfig, TargetMetrics, compensation_index
from .pipeline import AnalysisConfig, compute_metrics

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "AxisId",
    "Condition",
    "CsvSchemaConfig",
    "Dataset",
    "FinalPose",
    "GridSpec",
    "IndexConfig",
    "JointId",
    "NromTable",
    "Orientation",
    "ReachRecord",
    "SubjectInfo",
    "TargetMetrics",
    "compensation_index",
    "compute_metrics",
    "load_dataset",
    "validate_dataset",
    "write_dataset",
]
