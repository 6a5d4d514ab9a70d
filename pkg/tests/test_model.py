import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from compindex.model import (
    ANGLE_KEYS,
    JOINTS,
    TARGETS,
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
from compindex.errors import NromIncomplete


def test_enum_wire_values():
    assert [c.value for c in Condition] == ["u", "b"]
    assert len(Orientation) == 2
    assert [j.value for j in JointId] == ["e", "s", "t"]
    assert len(AxisId) == 3
    assert Condition.parse("Braced") is Condition.BRACED
    assert Orientation.parse("v") is Orientation.VERTICAL


def test_angle_keys_cover_seven_axes():
    assert len(ANGLE_KEYS) == 7
    assert [a for j, a in ANGLE_KEYS if j == JointId.ELBOW] == [AxisId.X]
    for joint in (JointId.SHOULDER, JointId.TRUNK):
        assert [a for j, a in ANGLE_KEYS if j == joint] == [AxisId.X, AxisId.Y, AxisId.Z]


def test_subject_info_requires_height_above_arm_length():
    SubjectInfo(1, 1700.0, 600.0)
    with pytest.raises(ValueError):
        SubjectInfo(1, 600.0, 600.0)
    with pytest.raises(ValueError):
        SubjectInfo(1, 1700.0, 0.0)


def test_final_pose_maps_and_finiteness():
    locs = {j: [i, i + 1, i + 2] for i, j in enumerate(JOINTS)}
    angs = {k: float(i) for i, k in enumerate(ANGLE_KEYS)}
    pose = FinalPose.from_maps(locs, angs)
    assert pose.location(JointId.SHOULDER).tolist() == [1, 2, 3]
    assert pose.angle(JointId.TRUNK, AxisId.Z) == 6.0
    with pytest.raises(ValueError):
        FinalPose(np.full((3, 3), np.nan), np.zeros(7))
    with pytest.raises(ValueError):
        FinalPose.from_maps(locs, {k: 0.0 for k in ANGLE_KEYS[:6]})
    with pytest.raises(ValueError):
        pose.angles[0] = 1.0


def test_nrom_table_rejects_missing_or_nonpositive():
    good = {k: 90.0 for k in ANGLE_KEYS}
    assert NromTable.from_map(good)[(JointId.ELBOW, AxisId.X)] == 90.0
    with pytest.raises(NromIncomplete):
        NromTable.from_map({k: 90.0 for k in ANGLE_KEYS[:-1]})
    with pytest.raises(NromIncomplete):
        NromTable.from_map({**good, (JointId.TRUNK, AxisId.Y): 0.0})
    with pytest.raises(NromIncomplete):
        NromTable.from_map({**good, (JointId.TRUNK, AxisId.Y): -5.0})


def test_grid_default_numbering():
    g = GridSpec()
    assert g.cell(1) == (1, 1)
    assert g.cell(7) == (1, 7)
    assert g.cell(23) == (4, 2)
    assert g.cell(37) == (6, 2)
    assert g.cell(49) == (7, 7)
    assert GridSpec("row-major-top-right").cell(1) == (1, 7)


@pytest.mark.parametrize("numbering", ["row-major-top-left", "row-major-top-right"])
def test_grid_numbering_is_bijective(numbering):
    g = GridSpec(numbering)
    cells = [g.cell(n) for n in TARGETS]
    assert len(set(cells)) == 49
    assert all(g.target_at(*g.cell(n)) == n for n in TARGETS)


@given(st.permutations(list(TARGETS)))
def test_custom_grid_bijective(perm):
    default = GridSpec()
    custom = {n: default.cell(m) for n, m in zip(TARGETS, perm)}
    g = GridSpec("custom", custom)
    assert sorted(g.cell(n) for n in TARGETS) == sorted(custom.values())
    assert all(g.target_at(*g.cell(n)) == n for n in TARGETS)


def test_custom_grid_rejects_non_bijection():
    custom = {n: (1, 1) for n in TARGETS}
    with pytest.raises(ValueError):
        GridSpec("custom", custom)


def test_full_dataset_validates(synth_dataset):
    assert len(synth_dataset.records) == 1372
    report = validate_dataset(synth_dataset)
    assert report.passed
    assert report.missing_cells == []


def test_empty_dataset_reports_every_cell_missing(synth_dataset):
    empty = Dataset((), (), synth_dataset.nrom)
    report = validate_dataset(empty, allow_partial=False)
    assert not report.passed
    assert len(report.missing_cells) == 1372
    partial = validate_dataset(empty, allow_partial=True)
    assert partial.passed and partial.warnings


def test_nan_frame_is_reported_with_coordinates(synth_dataset):
    r = synth_dataset.records[5]
    angles = r.angles.copy()
    angles[1, 3] = math.nan
    broken = ReachRecord(r.subject_id, r.condition, r.orientation, r.target, r.locations, angles, r.reach_interval)
    records = tuple(broken if x is r else x for x in synth_dataset.records)
    report = validate_dataset(Dataset(synth_dataset.subjects, records, synth_dataset.nrom))
    assert not report.passed
    assert report.nonfinite_frames == [(r.subject_id, r.condition.value, r.orientation.value, r.target, 1)]


def test_bad_interval_and_duplicate_are_reported(synth_dataset):
    r = synth_dataset.records[0]
    bad = ReachRecord(r.subject_id, r.condition, r.orientation, r.target, r.locations, r.angles, (1, 5))
    records = synth_dataset.records[1:] + (bad, r)
    report = validate_dataset(Dataset(synth_dataset.subjects, records, synth_dataset.nrom))
    assert not report.passed
    assert report.bad_intervals and report.duplicates
