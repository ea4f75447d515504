"""Smoke tests for the Python bindings: import, a few known values, and a
tiny end-to-end calibration. Heavy numerics are covered by the C++ suite."""

import math

import pytest

import accrue_calib as ac


def test_known_scores():
    assert ac.gaussian_crps(0.0, 1.0) == pytest.approx(0.2336949772551046, abs=1e-12)
    assert ac.tpg_crps(0.3, 1.2, 1.2) == pytest.approx(ac.gaussian_crps(0.3, 1.2), abs=1e-12)
    # Symmetric Laplace: closed form |e| + exp(-l|e|)/l - 3/(4l).
    lam = 0.7
    expected = 1.5 + math.exp(-lam * 1.5) / lam - 3.0 / (4.0 * lam)
    assert ac.al_crps(1.5, lam, 1.0) == pytest.approx(expected, abs=1e-12)
    assert ac.reliability_score([0.5]) == pytest.approx(1.0 / 12.0, abs=1e-15)
    assert ac.accrue_loss(0.8324, 0.6692, 0.8) == pytest.approx(0.79976, abs=1e-12)


def test_distribution_round_trip():
    q = ac.quantile("al", [1.3, 0.6], 0.25)
    assert ac.cdf("al", [1.3, 0.6], q) == pytest.approx(0.25, abs=1e-12)
    assert ac.pdf("tpg", [1.0, 1.0], 0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), abs=1e-12)
    with pytest.raises(ValueError):
        ac.crps("gaussian", [1.0, 2.0], 0.0)  # wrong arity


def test_generate_deterministic():
    a = ac.generate("A", 50, 123)
    b = ac.generate("A", 50, 123)
    assert a == b
    assert len(a["y"]) == 50
    assert all(0.0 <= x[0] <= 1.0 for x in a["x"])
    assert all(m == 0.0 for m in a["m"])


def test_calibrate_predict_evaluate(tmp_path):
    model = tmp_path / "demo.model"
    data = tmp_path / "demo.csv"
    ac.generate_csv("A", 120, 7, str(data))
    out = ac.calibrate_csv(
        str(data), family="tpg", members=2, seed=11, max_epochs=15, out=str(model)
    )
    assert out["selected_family"] == "tpg"
    assert 0.1 <= out["beta_star"] <= 0.9
    m = out["metrics"]
    assert m["accrue"] == pytest.approx(
        m["beta"] * m["crps"] + (1.0 - m["beta"]) * m["rs"], abs=1e-15
    )
    assert "--- machine readable ---" in out["report"]

    preds = ac.predict(str(model), [[0.2], [0.8]], [0.0, 0.0])
    assert preds["lo95"][0] <= preds["lo50"][0] <= preds["median"][0]
    assert preds["median"][0] <= preds["hi50"][0] <= preds["hi95"][0]

    scores = ac.evaluate(str(model), str(data))
    assert scores["n"] == 120
    assert scores["crps"] > 0.0


def test_beta_heuristic_bounds():
    beta = ac.gaussian_beta_heuristic([0.5, -1.0, 2.0, 0.1, -0.4])
    assert 0.01 <= beta <= 0.99
