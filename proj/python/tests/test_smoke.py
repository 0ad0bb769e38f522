import math

import numpy as np
import pytest

import onevision as ov


def test_registries():
    assert ov.tasks() == ["leader-linear", "leader-bangbang", "formation-circle", "formation-switching"]
    assert set(ov.frameworks()) == {"onevision", "naive", "local", "constu"}


def test_config_round_trip():
    c = ov.RunConfig(task="formation-circle", framework="naive", comm_ms=120.0, seed=3)
    assert ov.parse_config(ov.serialize_config(c)) == c
    assert ov.parse_config("") == ov.RunConfig()
    with pytest.raises(ValueError):
        ov.parse_config("delay.obs_ms = 33\n")


def test_short_run_shapes_and_determinism():
    c = ov.RunConfig(task="leader-linear", framework="onevision", duration_s=1.0, seed=2)
    a = ov.run(c)
    b = ov.run(c)
    assert not a["diagnostics"]["failed"]
    assert a["diagnostics"]["causality_violations"] == 0
    assert a["actual_x"].shape == (101, 4)
    assert a["actual_u"].shape == (100, 2)
    assert a["regret"].shape == (100,)
    assert math.isclose(a["metrics"]["avg_regret"], float(a["regret"].mean()), rel_tol=1e-12)
    assert a["diagnostics"]["checksum_actual"] == b["diagnostics"]["checksum_actual"]
    np.testing.assert_array_equal(a["actual_x"], b["actual_x"])


def test_zero_noise_tracks_ideal():
    c = ov.RunConfig(task="leader-linear", framework="onevision", duration_s=3.0, sensor_noise=0.0,
                     disturbance_noise=0.0)
    r = ov.run(c)
    assert r["regret"].max() < 1e-6


def test_scalar_dare_golden_ratio():
    one = np.ones((1, 1))
    P, K = ov.solve_dare(one, one, one, one)
    assert P[0, 0] == pytest.approx((1 + 5 ** 0.5) / 2, abs=1e-9)
    assert K[0, 0] == pytest.approx((5 ** 0.5 - 1) / 2, abs=1e-9)


def test_sweep_rows():
    base = ov.RunConfig(task="leader-linear", duration_s=0.5)
    rows = ov.sweep(base, "delay", [50.0, 100.0], seeds=2, frameworks=["naive"])
    assert len(rows) == 2 * 2 + 2 * 2
    assert {r["seed"] for r in rows} == {"0", "1", "mean", "std"}


def test_anchor_exactness():
    assert ov.verify_anchor_exactness(systems=2, seed=4) < 1e-10
