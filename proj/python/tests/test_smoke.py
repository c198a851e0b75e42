import json
import math
import pathlib

import numpy as np
import pytest

import edlab


def test_scenarios_listed():
    assert edlab.list_scenarios() == [
        "free_packet",
        "double_slit",
        "ho_1d",
        "ho_2d_rotating",
        "ho_2d_breathing",
    ]


def test_free_packet_drift_vanishes_at_T():
    out = edlab.evaluate("scenario = free_packet\ntimes = 0, 1, 2\n")
    assert out["time_unit"] == "T"
    assert all(c["passed"] for c in out["checks"])
    snap = out["snapshots"][1]
    assert snap["label"] == 1.0
    rho, b = snap["rho"], snap["b"]
    assert rho.shape == snap["x"].shape == (1024,)
    assert np.max(np.abs(rho * b)) < 1e-10
    assert out["report"]["variance@2T"] == pytest.approx(5.0, rel=1e-6)


def test_rotating_state_fields_are_2d():
    out = edlab.evaluate("scenario = ho_2d_rotating\ntimes = 0\ngrid_points = 64\n")
    snap = out["snapshots"][0]
    assert snap["rho"].shape == (64, 64)
    assert set(snap) >= {"u_x", "u_y", "v_x", "v_y", "b_x", "b_y"}


def test_velocities_of_sampled_packet():
    x = np.linspace(-20.0, 20.0, 2001)
    T, t = 2.0, 1.0
    s = 1.0 + 1j * t / T
    psi = (2 * math.pi) ** -0.25 / np.sqrt(s) * np.exp(-x**2 / (4 * s))
    f = edlab.velocities(-20.0, 20.0, psi)
    core = np.abs(x) < 5
    np.testing.assert_allclose(f["v"][core], x[core] * t / (t * t + T * T), atol=1e-8)
    np.testing.assert_allclose(f["u"][core], x[core] * T / (t * t + T * T), atol=1e-8)


def test_bayes_and_maxent():
    posterior, evidence = edlab.bayes_update([0.0005, 0.9995], [[0.99, 0.01], [0.01, 0.99]], 0)
    assert evidence == pytest.approx(0.01049)
    assert math.floor(posterior[0] * 1000) / 1000 == 0.047
    r = edlab.maxent_solve([[1, 2, 3, 4, 5, 6]], [3.5])
    np.testing.assert_allclose(r["distribution"], [1 / 6] * 6, rtol=1e-12)
    assert edlab.shannon_entropy([0.5, 0.5]) == pytest.approx(math.log(2))


def test_config_errors_raise_value_error():
    with pytest.raises(edlab.ConfigurationError) as info:
        edlab.evaluate("scenario = free_packet\nsigma0 = wide\n")
    assert isinstance(info.value, ValueError)
    assert "line 2" in str(info.value)
    with pytest.raises(ValueError):
        edlab.bayes_update([0.7, 0.7], [[0.5, 0.5]], 0)


def test_run_writes_a_verifiable_manifest(tmp_path: pathlib.Path):
    out = edlab.run("scenario = ho_1d\ntimes = 0, 0.25\n", str(tmp_path))
    assert out["passed"]
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["scenario"] == "ho_1d"
    assert [f["name"] for f in manifest["files"]] == out["files"]
    for f in manifest["files"]:
        assert (tmp_path / f["name"]).stat().st_size == f["bytes"]


def test_acceptance_criterion():
    r = edlab.acceptance_criterion(10)
    assert r["name"] == "inference core"
    assert r["passed"]
