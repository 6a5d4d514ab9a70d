import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from compindex.errors import DegenerateWithinScatter, LengthMismatch, TooFewPoints
from compindex.group import (
    ALL_CONFIGS,
    ClusteringConfig,
    agglomerate,
    agglomerative_cluster,
    build_feature,
    clustering_accuracy,
    clustering_score,
    group_scores,
    separability,
)
from compindex.model import JointId, SubjectInfo
from compindex.preprocess import RelativePose

from oracles import best_match_accuracy, fisher_ratio, naive_agglomerate

TRUTH = ["u"] * 7 + ["b"] * 7


def test_config_order_and_parse():
    assert [str(c) for c in ALL_CONFIGS] == [
        "manhattan-complete", "manhattan-average", "manhattan-single",
        "euclidean-complete", "euclidean-average", "euclidean-single",
    ]
    assert ClusteringConfig.parse("euclidean-single") == ClusteringConfig("euclidean", "single")
    with pytest.raises(ValueError):
        ClusteringConfig("cosine", "single")
    with pytest.raises(ValueError):
        ClusteringConfig(k=3)


def test_feature_dimensions():
    rp = RelativePose(np.arange(9.0).reshape(3, 3), np.arange(7.0))
    subj = SubjectInfo(1, 1750.0, 700.0)
    elbow = build_feature(rp, JointId.ELBOW, subj)
    assert elbow.values.tolist() == [0, 1, 2, 0, 1750, 700]
    shoulder = build_feature(rp, JointId.SHOULDER, subj)
    assert shoulder.values.tolist() == [3, 4, 5, 1, 2, 3, 1750, 700]
    assert len(build_feature(rp, JointId.TRUNK, subj).values) == 8


def test_identical_points_merge_in_index_order():
    labels = agglomerative_cluster(np.zeros((14, 6)), ClusteringConfig())
    assert labels.tolist() == [1] * 13 + [2]


def test_identical_points_accuracy():
    h, _, tied = clustering_score(np.zeros((7, 6)), np.zeros((7, 6)))
    assert h == pytest.approx(8 / 14)
    assert tied


def test_too_few_points():
    with pytest.raises(TooFewPoints):
        agglomerate(np.zeros((1, 6)), ClusteringConfig())


def test_well_separated_clouds():
    rng = np.random.default_rng(5)
    u = rng.normal(size=(7, 8))
    b = rng.normal(size=(7, 8)) + 100
    for cfg in ALL_CONFIGS:
        labels = agglomerative_cluster(np.vstack([u, b]), cfg)
        assert labels.tolist() == [1] * 7 + [2] * 7
    h, cfg, _ = clustering_score(u, b)
    assert h == 1.0 and cfg == ALL_CONFIGS[0]
    assert separability(u, b) > 100


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 20), st.integers(1, 8), st.sampled_from(ALL_CONFIGS), st.integers(0, 2**32 - 1))
def test_matches_naive_oracle_continuous(n, dim, cfg, seed):
    pts = np.random.default_rng(seed).normal(size=(n, dim))
    assert agglomerative_cluster(pts, cfg).tolist() == naive_agglomerate(pts.tolist(), cfg.metric, cfg.linkage)


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 14), st.sampled_from([c for c in ALL_CONFIGS if c.linkage != "average"]),
       st.integers(0, 2**32 - 1))
def test_matches_naive_oracle_on_ties(n, cfg, seed):
    # Small integer grids give many exactly tied distances; min/max linkage
    # values stay exact so the tie-break must agree with the oracle's.
    pts = np.random.default_rng(seed).integers(0, 3, size=(n, 3)).astype(float)
    assert agglomerative_cluster(pts, cfg).tolist() == naive_agglomerate(pts.tolist(), cfg.metric, cfg.linkage)


@settings(max_examples=200)
@given(st.lists(st.integers(1, 2), min_size=14, max_size=14))
def test_accuracy_matches_oracle(labels):
    h = clustering_accuracy(labels, TRUTH)
    assert h == pytest.approx(best_match_accuracy(labels, TRUTH))
    assert 0.5 <= h <= 1.0
    assert isinstance(h, float)


def test_accuracy_perfect_and_inverted():
    assert clustering_accuracy([1] * 7 + [2] * 7, TRUTH) == 1.0
    assert clustering_accuracy([2] * 7 + [1] * 7, TRUTH) == 1.0
    assert clustering_accuracy([1, 2] * 7, TRUTH) == pytest.approx(8 / 14)
    with pytest.raises(LengthMismatch):
        clustering_accuracy([1, 2], TRUTH)


@settings(max_examples=100)
@given(arrays(float, (7, 6), elements=st.floats(-100, 100, allow_nan=False)),
       arrays(float, (7, 6), elements=st.floats(-100, 100, allow_nan=False)))
def test_separability_matches_oracle(u, b):
    try:
        j = separability(u, b)
    except DegenerateWithinScatter:
        return
    want = fisher_ratio(u.tolist(), b.tolist())
    assert j == pytest.approx(want, rel=1e-9, abs=1e-12)
    assert j >= 0


def test_separability_coincident_means_is_zero():
    rng = np.random.default_rng(1)
    u = rng.integers(-50, 50, size=(7, 6)).astype(float)
    assert separability(u, u[::-1]) == 0.0


def test_separability_invariants():
    rng = np.random.default_rng(2)
    u, b = rng.normal(size=(7, 8)), rng.normal(size=(7, 8)) + 0.5
    j = separability(u, b)
    assert separability(b, u) == pytest.approx(j, rel=1e-12)
    assert separability(u * 37.0, b * 37.0) == pytest.approx(j, rel=1e-9)
    assert separability(u + 5.0, b + 5.0) == pytest.approx(j, rel=1e-9)


def test_separability_degenerate():
    u = np.zeros((7, 6))
    with pytest.raises(DegenerateWithinScatter):
        separability(u, u + 1)
    with pytest.raises(LengthMismatch):
        separability(np.zeros((7, 6)), np.zeros((7, 8)))


def _subjects(n=7):
    return [SubjectInfo(i + 1, 1600.0 + 30 * i, 650.0 + 10 * i) for i in range(n)]


def test_group_scores_identical_conditions():
    rng = np.random.default_rng(8)
    poses = [RelativePose(rng.normal(size=(3, 3)) * 50, rng.normal(size=7) * 10) for _ in range(7)]
    res = group_scores(poses, poses, _subjects())
    assert res.J == 0.0
    assert res.H == 0.5
    assert not res.J_degenerate


def test_group_scores_degenerate_flags():
    same = [RelativePose(np.zeros((3, 3)), np.zeros(7))] * 7
    subj = [SubjectInfo(1, 1700.0, 700.0)] * 7
    res = group_scores(same, same, subj)
    assert math.isnan(res.J)
    assert res.J_degenerate
    assert "J_degenerate:e" in res.flags
    assert "H_tie:e" in res.flags


def test_group_scores_length_mismatch():
    same = [RelativePose(np.zeros((3, 3)), np.zeros(7))] * 7
    with pytest.raises(LengthMismatch):
        group_scores(same, same[:6], _subjects())


def test_separability_rounding_residue_is_degenerate():
    u = np.full((7, 6), 1234.5)
    b = u + 10.0
    u[3, 0] += 1e-13
    with pytest.raises(DegenerateWithinScatter):
        separability(u, b)
