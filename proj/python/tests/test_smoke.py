import math

import numpy as np
import pytest

import hyperpart as hp


def test_planted_round_trip_and_ttm():
    h, truth = hp.generate_planted(n=60, k=3, m=3, p=0.3, q=0.2, seed=7)
    assert h.n == 60 and h.m == 3 and h.num_edges == len(h.weights)
    labels = hp.ttm_partition(h, k=3, seed=1)
    assert len(labels) == 60
    assert 0 <= hp.clustering_error(truth, labels) <= 60
    assert hp.clustering_error(truth, truth) == 0


def test_flatten_single_edge():
    h = hp.Hypergraph(3, 3, [[0, 1, 2]], [0.5])
    a = hp.flatten(h)
    assert a.shape == (3, 3)
    assert a[0, 1] == 0.5 and a[0, 0] == 0.0
    assert math.isclose(hp.normalized_associativity(h, [0, 0, 0]), 1 / 3)


def test_sampling_and_baselines_run():
    h, truth = hp.generate_planted(n=30, k=2, m=3, p=0.3, q=0.2, weight_law="bounded_uniform", seed=3)
    for labels in (
        hp.nhcut_partition(h, 2, seed=1),
        hp.hosvd_partition(h, 2, seed=1),
        hp.sampled_ttm_partition(h, 2, samples=2000, dist="weighted", seed=1),
    ):
        assert sorted(set(labels)) <= [0, 1]


def test_subspaces_and_tetris():
    points, truth = hp.generate_subspaces(k=3, r=1, points_per=15, ambient_dim=3, seed=2)
    assert points.shape == (3, 45)
    assert hp.fit_error(points[:, :15], 1) < 1e-12
    labels = hp.tetris(points, k=3, r=1, c=150, seed=4)
    assert hp.clustering_error(truth, labels) == 0


def test_errors_map_to_python_exceptions(tmp_path):
    with pytest.raises(ValueError):
        hp.ttm_partition(hp.Hypergraph(4, 3, [[0, 1, 2]], [1.0]), k=0, seed=1)
    with pytest.raises(hp.DataError):
        hp.Hypergraph(4, 3, [[0, 2, 1]], [1.0])
    with pytest.raises(hp.DataError):
        hp.load_hypergraph(str(tmp_path / "missing.hgr"))
    with pytest.raises(ValueError):
        hp.tetris(np.zeros((3, 4)), k=2, r=1, c=0, seed=1)


def test_hypergraph_file_round_trip(tmp_path):
    h, _ = hp.generate_planted(n=12, k=2, m=3, p=0.3, q=0.2, seed=5)
    path = str(tmp_path / "h.hgr")
    hp.save_hypergraph(path, h)
    back = hp.load_hypergraph(path)
    assert back.edges == h.edges and back.weights == h.weights
