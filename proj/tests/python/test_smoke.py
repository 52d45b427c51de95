import math

import numpy as np
import pytest

import qkmeans


def test_encodings():
    assert qkmeans.amplitude_encode([3.0, 4.0]) == pytest.approx([0.6, 0.8])
    assert len(qkmeans.amplitude_encode([1.0, 2.0, 3.0])) == 4
    assert qkmeans.angle_encode([1.0, 1.0]) == pytest.approx(math.pi / 4)


def test_exact_distance_matches_direct_formula():
    x, y = np.array([1.0, 2.0, 0.5]), np.array([0.3, -1.0, 2.0])
    cos = abs(x @ y) / (np.linalg.norm(x) * np.linalg.norm(y))
    assert qkmeans.swaptest_distance(x, y) == pytest.approx(math.sqrt(2 - 2 * cos), abs=1e-12)


def test_sampled_distance_is_seeded():
    a = qkmeans.swaptest_distance([1.0, 0.2], [0.4, 1.0], mode="sampled", shots=2048, seed=3)
    b = qkmeans.swaptest_distance([1.0, 0.2], [0.4, 1.0], mode="sampled", shots=2048, seed=3)
    assert a == b


def test_batch_job_count():
    rng = np.random.default_rng(0)
    d, jobs, circuits = qkmeans.batch_distances(rng.normal(size=(901, 2)), rng.normal(size=(2, 2)))
    assert d.shape == (901, 2)
    assert circuits == 1802 and jobs == 3


def test_fit_separates_blobs():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(60, 2)) * 0.3 + [6.0, 1.0]
    b = rng.normal(size=(60, 2)) * 0.3 + [1.0, 6.0]
    x = np.vstack([a, b])
    truth = [0] * 60 + [1] * 60
    model = qkmeans.fit(x, n_clusters=2, seed=5)
    assert qkmeans.assignment_fidelity(model["labels"], truth) == pytest.approx(1.0)
    assert all(j == math.ceil(120 * 2 / 900) for j in model["jobs_per_iteration"])
    assert qkmeans.predict(model["cluster_centers"], x) == model["labels"]


def test_metrics():
    assert qkmeans.fowlkes_mallows([0, 0, 1, 1], [1, 1, 0, 0]) == pytest.approx(1.0)
    assert qkmeans.assignment_fidelity([0, 0, 1, 0], [0, 0, 1, 1]) == pytest.approx(0.75)
    assert qkmeans.pearson([1, 2, 3], [2, 4, 8]) == pytest.approx(0.98198, abs=1e-4)
    assert qkmeans.pearson([1, 1, 1], [1, 2, 3]) is None


def test_synthesize_and_analyze(tmp_path):
    table = qkmeans.synthesize(seed=7, shots=256)
    assert len(table) > 0
    pair = table.pairs()[0]
    report = qkmeans.analyze_pair(table, pair)
    assert len(report["labels"]) == 8 and len(report["named"]) == 8
    sets = qkmeans.assemble_datasets(table, pair[0], pair)
    x, y = sets["single"]
    assert x.shape == (512, 2) and sorted(set(y)) == [0, 1]
    path = tmp_path / "shots.csv"
    table.save(str(path))
    assert len(qkmeans.IQShotTable.load(str(path))) == len(table)
    flagged = {label for label, _ in qkmeans.flag_crosstalk(qkmeans.synthesize(seed=7, shots=1024))}
    assert "1-2" in flagged


def test_complexity():
    q = qkmeans.quantum_cost(n=1000, k=2, f=8, i=10, c=900)
    c = qkmeans.classical_cost(n=1000, k=2, f=8, i=10)
    assert q < c
    assert qkmeans.expected_jobs_per_iteration(1000, 2, 900) == 3
