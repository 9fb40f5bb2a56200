import json
import os
from pathlib import Path

import numpy as np
import pytest

import pcpd

DATA = Path(os.environ.get("PCPD_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def shifted(k=40, split=20, shift=5.0, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((k, 3))
    x[split:] += shift
    return x


def test_detect_large_shift():
    out = pcpd.detect(shifted(), period=1, seed=3)
    assert out["decision"] == "reject"
    assert out["t_hat"] == 20
    assert out["p_value"] <= 0.05


def test_same_seed_same_answer():
    x = shifted(shift=0.5, seed=4)
    a = pcpd.detect(x, period=1, seed=9, early_stop=False, max_perms=200)
    b = pcpd.detect(x, period=1, seed=9, early_stop=False, max_perms=200, threads=2)
    assert a == b


def test_scan_curve_shape_and_identical_blocks():
    curve = pcpd.scan_curve(shifted(), period=1)
    assert curve.shape == (33, 3)
    assert curve[0, 0] == 4
    flat = np.tile(np.arange(4.0)[:, None], (10, 2))
    assert np.all(pcpd.scan_curve(flat, period=4)[:, 2] == 0.0)


def test_localize_toy_fixture():
    series, hint = pcpd.load_dataset(str(DATA / "toy_detect" / "manifest.json"))
    assert series.shape == (160, 3)
    assert hint == 4
    loc = pcpd.localize(series, period=hint, seed=1)
    assert loc["t_hat"] == 20
    assert loc["l_F_hat"] == 81
    assert loc["nu_hat"] == 1


def test_network_generator_and_precomputed_metric():
    nets = pcpd.generate_networks(nodes=6, period=3, blocks=8, nu_star=2, seed=2)
    assert nets.shape == (24, 6, 6)
    assert np.allclose(nets.sum(axis=2), 0.0)
    d = np.sqrt(((nets[:, None] - nets[None, :]) ** 2).sum(axis=(2, 3)))
    a = pcpd.scan_curve(nets, period=3)
    b = pcpd.scan_curve(d, period=3, metric="precomputed")
    assert np.array_equal(a, b)


def test_segment_two_changes():
    x = pcpd.generate_vectors(blocks=60, changes=[(81, 3.0), (161, 3.0)], seed=5)
    cps = pcpd.segment(x, period=4, seed=1)
    assert sorted(c["t_hat"] for c in cps) == [20, 40]


def test_mcvm_and_location():
    a = np.array([[0.0], [0.1]])
    b = np.array([[10.0], [10.1]])
    assert pcpd.mcvm(a, b) == 1.25
    assert pcpd.mcvm(b, a) == 1.25
    assert pcpd.final_location(100, 10, 13, 2600) == (1310, 1310 / 2600)


def test_run_config_matches_cli_report():
    cfg = {"command": "detect", "seed": 1, "data": str(DATA / "toy_detect" / "manifest.json")}
    report = json.loads(pcpd.run(json.dumps(cfg)))
    assert report["decision"] == "reject"
    assert report["t_hat"] == 20


def test_errors_are_value_errors():
    with pytest.raises(ValueError, match="alpha"):
        pcpd.detect(shifted(), period=1, alpha=1.5)
    with pytest.raises(pcpd.InputError):
        pcpd.detect(np.zeros((5, 2, 3)), period=1)
    with pytest.raises(pcpd.ConfigError):
        pcpd.run('{"alpha": 2}')
