"""End-to-end smoke tests for the Python module.

Numeric spot checks lean on numpy/scipy as independent oracles; the heavy
correctness burden lives in the C++ test suites.
"""

import numpy as np
import pytest
import scipy.stats

import emgtcn


def small_config():
    config = emgtcn.Config()
    config.duration_s = 60.0
    config.seed = 3
    config.filters = 8
    config.taps = 5
    config.sequence_len = 10
    config.epochs = 2
    return config


def test_config_defaults():
    config = emgtcn.Config()
    assert config.window_len == 40
    assert config.step == 5
    assert config.sequence_len == 60
    assert config.tcn_features == "mav"
    assert config.baseline_features == "td5"
    assert config.knn_k == 3


def test_synth_session_shapes_and_determinism():
    config = small_config()
    a = emgtcn.synth_session(config)
    b = emgtcn.synth_session(config)
    assert a["emg"].shape == (12000, 8)
    assert a["joints"].shape == (12000, 3)
    assert a["segments"] > 10
    np.testing.assert_array_equal(a["emg"], b["emg"])
    np.testing.assert_array_equal(a["joints"], b["joints"])

    config.seed = 4
    c = emgtcn.synth_session(config)
    assert not np.array_equal(a["emg"], c["emg"])


def test_extract_features_against_numpy():
    rng = np.random.default_rng(11)
    emg = rng.normal(size=(100, 2))
    feats = emgtcn.extract_features(emg, window_len=10, step=5, mode="mav")
    assert feats.shape == ((100 - 10) // 5 + 1, 2)
    for row, start in enumerate(range(0, 91, 5)):
        window = emg[start : start + 10]
        np.testing.assert_allclose(
            feats[row], np.abs(window).mean(axis=0), rtol=0, atol=1e-15
        )

    td5 = emgtcn.extract_features(emg, window_len=10, step=5, mode="td5")
    assert td5.shape == (19, 10)
    # Per-channel blocks are [MAV, WL, VAR, SSC, ZC]; check MAV and VAR.
    window = emg[0:10]
    np.testing.assert_allclose(td5[0, 0], np.abs(window[:, 0]).mean())
    np.testing.assert_allclose(td5[0, 2], window[:, 0].var())
    np.testing.assert_allclose(
        td5[0, 1], np.abs(np.diff(window[:, 0])).sum()
    )


def test_labels_and_calibration():
    # Ramp-and-hold trajectories: plateaus give steady windows, ramps give
    # transient ones (a ceaselessly moving trajectory would tag everything
    # transient).
    t = np.arange(2000, dtype=float)
    # Each DOF starts at rest (0), holds at +1, then at -1, and returns, so
    # the rest posture sits strictly inside the calibrated range.
    knots = np.array([0.0, 200.0, 400.0, 900.0, 1100.0, 1300.0, 1800.0, 1999.0])
    vals = np.array([0.0, 0.0, 1.0, 1.0, 0.0, -1.0, -1.0, 0.0])
    joints = np.stack(
        [np.interp((t + shift) % 2000.0, knots, vals) for shift in (0, 400, 800)],
        axis=1,
    )
    profile = emgtcn.calibrate(joints)
    assert profile["theta_min"].shape == (3,)
    assert np.all(profile["lo"] < profile["hi"])

    labels, transient = emgtcn.label_stream(joints, window_len=40, step=5)
    assert len(labels) == (2000 - 40) // 5 + 1
    assert len(transient) == len(labels)
    assert all(0 <= c < 27 for c in labels)
    assert any(transient) and not all(transient)

    for c in range(27):
        assert emgtcn.pack_class(*emgtcn.unpack_class(c)) == c
    assert emgtcn.pack_class(0, 0, 0) == 13


def test_stability_against_manual_count():
    rng = np.random.default_rng(7)
    pred = rng.integers(0, 4, size=200).tolist()
    truth = rng.integers(0, 4, size=200).tolist()
    switches = lambda s: int(np.count_nonzero(np.diff(np.asarray(s))))
    expected = 1.0 - abs(switches(pred) - switches(truth)) / 199.0
    assert emgtcn.stability(pred, truth) == pytest.approx(expected, abs=0)
    assert emgtcn.accuracy(pred, truth) == pytest.approx(
        float(np.mean(np.asarray(pred) == np.asarray(truth))), abs=0
    )


def test_anova_against_scipy():
    rng = np.random.default_rng(13)
    groups = [rng.normal(loc=m, size=6).tolist() for m in (0.0, 0.4, 1.1)]
    ours = emgtcn.anova_oneway(groups)
    f, p = scipy.stats.f_oneway(*groups)
    assert ours["f"] == pytest.approx(f, rel=1e-10)
    assert ours["p_value"] == pytest.approx(p, rel=1e-8)
    assert emgtcn.f_survival(13.5, 1, 4) == pytest.approx(
        scipy.stats.f.sf(13.5, 1, 4), rel=1e-10
    )


def test_train_evaluate_roundtrip(tmp_path):
    config = small_config()
    session = emgtcn.synth_session(config)
    emg, joints = session["emg"], session["joints"]

    for kind in ("knn", "tcn"):
        cp = emgtcn.train(emg, joints, config, kind)
        assert cp.kind == kind
        report = emgtcn.evaluate(emg, joints, config, cp)
        assert 0.0 <= report["accuracy"] <= 1.0
        assert 0.0 <= report["stability"] <= 1.0
        assert report["n"] > 0
        trace = report["trace"]
        assert len(trace["pred"]) == report["n"]

        path = tmp_path / f"{kind}.ckpt"
        cp.save(str(path))
        reloaded = emgtcn.load_checkpoint(str(path))
        again = emgtcn.evaluate(emg, joints, config, reloaded)
        assert again["accuracy"] == report["accuracy"]
        assert again["stability"] == report["stability"]


def test_segment_report_split():
    pred = [0, 0, 1, 1, 1, 2, 2, 2]
    truth = [0, 0, 1, 1, 1, 2, 2, 1]
    transient = [False, False, True, True, False, False, False, False]
    report = emgtcn.segment_report(pred, truth, transient)
    assert report["accuracy"] == pytest.approx(7 / 8)
    assert report["accuracy_transient"] == pytest.approx(1.0)
    assert report["accuracy_steady"] == pytest.approx(5 / 6)
