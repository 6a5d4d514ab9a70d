import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from compindex.errors import CountMismatch
from compindex.model import ANGLE_KEYS, Condition, FinalPose, NromTable, Orientation
from compindex.preprocess import normalize_angles, preprocess, relativize_locations

from oracles import mean_subtract

finite = st.floats(-2000, 2000, allow_nan=False, width=64)


def _pose(locs, angs=None):
    return FinalPose(np.asarray(locs, dtype=float), np.zeros(7) if angs is None else np.asarray(angs, dtype=float))


def _nrom(value=100.0):
    return NromTable.from_map({k: value for k in ANGLE_KEYS})


def test_constant_reference_gives_plain_difference():
    v = np.arange(9.0).reshape(3, 3)
    rng = np.random.default_rng(0)
    finals = [_pose(rng.normal(size=(3, 3)) * 100) for _ in range(49)]
    out = relativize_locations(finals, [_pose(v)] * 49)
    for rel, f in zip(out, finals):
        assert np.array_equal(rel, f.locations - v)


@settings(max_examples=50)
@given(arrays(float, (49, 3, 3), elements=finite), arrays(float, (49, 3, 3), elements=finite))
def test_matches_two_pass_oracle(finals, initials):
    got = relativize_locations([_pose(x) for x in finals], [_pose(x) for x in initials])
    want = mean_subtract(finals.tolist(), initials.tolist())
    np.testing.assert_allclose(np.array(got), np.array(want), rtol=1e-12, atol=1e-9)


@settings(max_examples=50)
@given(arrays(float, (49, 3, 3), elements=finite), arrays(float, (49, 3, 3), elements=finite),
       arrays(float, (3,), elements=finite))
def test_origin_shift_cancels(finals, initials, shift):
    a = relativize_locations([_pose(x) for x in finals], [_pose(x) for x in initials])
    b = relativize_locations([_pose(x + shift) for x in finals], [_pose(x + shift) for x in initials])
    np.testing.assert_allclose(np.array(a), np.array(b), atol=1e-9)


def test_count_mismatch():
    p = _pose(np.zeros((3, 3)))
    with pytest.raises(CountMismatch):
        relativize_locations([p] * 48, [p] * 48)
    with pytest.raises(CountMismatch):
        relativize_locations([p] * 49, [p] * 48)
    assert len(relativize_locations([p] * 3, [p] * 3, expected=None)) == 3


def test_angle_normalisation():
    angs = np.array([150.0, 10, 20, 30, 40, 50, 60])
    pose = _pose(np.zeros((3, 3)), angs)
    assert normalize_angles(pose, NromTable(angs)).tolist() == [100.0] * 7
    base = normalize_angles(pose, _nrom(90.0))
    for k in (2.0, 3.0, 0.5):
        np.testing.assert_allclose(normalize_angles(pose, _nrom(90.0 * k)), base / k, rtol=1e-15)
    assert normalize_angles(_pose(np.zeros((3, 3))), _nrom()).tolist() == [0.0] * 7


def test_preprocess_covers_every_cell(synth_dataset):
    out = preprocess(synth_dataset, Orientation.HORIZONTAL)
    assert len(out) == 7 * 2 * 49
    assert all(k[1] in (Condition.UNBRACED, Condition.BRACED) for k in out)


def test_preprocess_removes_origin_offsets(synth_result):
    # The generator applies a random origin per (subject, condition, orientation);
    # relative locations must not depend on it.
    d = synth_result.dataset
    rel = preprocess(d, Orientation.VERTICAL)
    for (s, c, n), pose in list(rel.items())[::50]:
        raw = synth_result.final_poses[(s, c, Orientation.VERTICAL, n)].locations
        rests = [synth_result.rest_poses[(s, c, Orientation.VERTICAL, m)].locations for m in range(1, 50)]
        np.testing.assert_allclose(pose.rel_locations, raw - np.mean(rests, axis=0), atol=1e-9)


def test_pooled_scope_differs_from_per_orientation(synth_dataset):
    a = preprocess(synth_dataset, Orientation.HORIZONTAL)
    b = preprocess(synth_dataset, Orientation.HORIZONTAL, reference_scope="pooled")
    assert a.keys() == b.keys()
    with pytest.raises(ValueError):
        preprocess(synth_dataset, Orientation.HORIZONTAL, reference_scope="global")
