"""Smoke tests over the pybind11 surface."""

import math

import numpy as np
import pytest

import tvopt


def test_version_string():
    assert tvopt.__version__


def test_soft_threshold_and_prox():
    y = np.array([2.0, -0.5, 0.1])
    out = tvopt.soft_threshold(y, 1.0)
    assert out == pytest.approx([1.0, 0.0, 0.0])
    assert tvopt.prox_l1(np.array([2.0]), 1.0, 1.0) == pytest.approx([1.0])


def test_projections():
    out = tvopt.project_box(np.array([-0.5, 2.0]), np.zeros(2), np.ones(2))
    assert out == pytest.approx([0.0, 1.0])
    a = np.array([[1.0, 1.0]])
    b = np.array([1.0])
    p = tvopt.project_affine(np.array([3.0, -1.0]), a, b)
    assert a @ p == pytest.approx(b)


def test_ssc_operations():
    x = np.zeros((3, 3))
    x[0, 0] = 5.0
    p = tvopt.ssc_project(x)
    assert p[0, 0] == 0.0
    assert p[1, 0] == pytest.approx(0.5)
    assert p[2, 0] == pytest.approx(0.5)
    q = tvopt.ssc_prox(np.random.default_rng(0).normal(size=(4, 4)), 0.5, 0.3)
    assert np.allclose(np.diag(q), 0.0)
    assert np.allclose(q.sum(axis=0), 1.0)
    with pytest.raises(Exception):
        tvopt.ssc_project(np.zeros((1, 1)))


def test_rpca_rank_one_gradient():
    u = np.zeros((6, 1))
    v = np.zeros((5, 1))
    u[1] = 1.0
    v[3] = 1.0
    z = 2.0 * u @ v.T
    grad, low_rank = tvopt.rpca_smooth_gradient(np.zeros((6, 5)), z, 1.0)
    assert np.allclose(low_rank, u @ v.T, atol=1e-12)
    assert np.allclose(grad, -u @ v.T, atol=1e-12)


def test_metropolis_weights():
    w = tvopt.metropolis_weights(2, [(0, 1)])
    assert np.allclose(w, 0.5)
    w3 = tvopt.metropolis_weights(3, [(0, 1), (1, 2), (0, 2)])
    assert np.allclose(w3.sum(axis=1), 1.0)
    assert np.allclose(w3, w3.T)


def test_solve_lasso_scalar():
    x = tvopt.solve_lasso(np.array([[1.0]]), np.array([2.0]), 1.0)
    assert x == pytest.approx([1.0], abs=1e-8)


def test_bound_helpers():
    assert tvopt.contraction_factor(0.25, 1.0, 4.0) == pytest.approx(0.75)
    assert tvopt.plateau_bound(0.5, 0.5, 0.0, 0.1) == 0.1
    errs = tvopt.tracking_error([np.array([3.0, 4.0])], [np.zeros(2)])
    assert errs == pytest.approx([5.0])


CONFIG = """
version = 1
[problem]
generator = quadratic
dim = 2
horizon = 12
seed = 4
[solver]
method = prox_gradient
alpha = auto
"""


def test_run_config_and_report(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(CONFIG)
    out = tvopt.run_config(str(cfg), str(tmp_path / "out"))
    trace = (tmp_path / "out" / "trace.csv").read_text().strip().splitlines()
    assert len(trace) == 12 + 1
    files = tvopt.report(out)
    assert any("fig1_solver.dat" in f for f in files)


def test_bad_config_raises(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(CONFIG + "[noise]\nstepsize_typo = 1\n")
    with pytest.raises(tvopt.ConfigurationError):
        tvopt.run_config(str(cfg), str(tmp_path / "out"))


def test_preset_names():
    names = tvopt.preset_names()
    assert set(names) == {"fig1", "fig6", "rpca", "ssc", "feedback"}
