import os

import numpy as np
import pytest

import aoselm


def make_model(d=3, L=10, m=2, seed=1):
    return aoselm.init_model(d, L, m, aoselm.InitScheme.ROS, 10.0, aoselm.RngStream(seed))


def test_sequential_matches_ridge():
    rng = np.random.default_rng(0)
    model = make_model()
    X = rng.uniform(-1, 1, size=(3, 80))
    T = rng.uniform(-1, 1, size=(80, 2))
    aoselm.oselm_update(model, X[:, :30], T[:30])
    aoselm.oselm_update(model, X[:, 30:], T[30:])
    H = aoselm.hidden_activations(model, X)
    # independent normal-equation solve in numpy
    want = np.linalg.solve(H.T @ H + np.eye(10) / 10.0, H.T @ T)
    np.testing.assert_allclose(model.beta, want, rtol=1e-8, atol=1e-10)


def test_growth_and_adaptation():
    rng = np.random.default_rng(1)
    model = make_model()
    aoselm.ceoselm_update(model, rng.uniform(-1, 1, (3, 20)), rng.uniform(-1, 1, (20, 2)), 4,
                          aoselm.RngStream(5))
    assert model.L == 14
    X = rng.uniform(-1, 1, (3, 6))
    before = aoselm.predict_scores(model, X)
    aoselm.adapt_virtual(model, 5, aoselm.RngStream(2))
    padded = np.vstack([X, np.zeros((2, 6))])
    assert np.array_equal(aoselm.predict_scores(model, padded), before)
    new_id = aoselm.adapt_real(model, 3)
    assert new_id == 1
    assert model.m == 5
    assert len(aoselm.classify(model, padded, 1)) == 6
    with pytest.raises(aoselm.UnknownConceptError):
        aoselm.classify(model, padded, 9)


def test_round_trip_and_corruption(tmp_path):
    model = make_model(seed=3)
    data = aoselm.model_to_bytes(model)
    back = aoselm.model_from_bytes(data)
    assert np.array_equal(back.A, model.A)
    bad = bytearray(data)
    bad[len(bad) // 2] ^= 1
    with pytest.raises(aoselm.ChecksumError):
        aoselm.model_from_bytes(bytes(bad))
    path = tmp_path / "m.bin"
    aoselm.save_model(model, path)
    assert np.array_equal(aoselm.load_model(path).K, model.K)


def test_metrics_and_monitor():
    acc, kappa, _ = aoselm.cohen_kappa([[40, 10], [20, 30]])
    assert acc == pytest.approx(0.7)
    assert kappa == pytest.approx(0.4)
    mon = aoselm.DriftMonitor(window=10, warn_threshold=5)
    states = [mon.observe(False) for _ in range(5)]
    assert states[-1] == aoselm.MonitorState.WARNING


def test_generators():
    s = aoselm.gen_stagger(100, 1, aoselm.RngStream(1))
    assert s.X.shape == (9, 100)
    assert set(s.labels) <= {0, 1}
    sea = aoselm.gen_sea(50, 2, 0.0, aoselm.RngStream(1))
    assert sea.X.shape == (3, 50)


def test_run_experiment():
    report = aoselm.run_experiment({
        "concept.C1": "stagger:1",
        "concept.C2": "stagger:2",
        "schedule": "C1 >>RD C2",
        "L0": "9",
        "samples_per_concept": "500",
        "batch_size": "50",
        "data_dir": os.environ.get("AOSELM_DATA_DIR", "data/mnist"),
    })
    accs = [r["value"] for r in report["rows"] if r["metric"] == "accuracy"]
    assert len(accs) == 2
    assert all(0.0 <= a <= 1.0 for a in accs)
    with pytest.raises(aoselm.ConfigError):
        aoselm.run_experiment({"learner": "nope"})
