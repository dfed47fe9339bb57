import math

import numpy as np
import pytest

import annulus_rotor as ar


def test_lambda0_identity():
    cfg = ar.AnnulusConfig(A=0.3, B=-0.2)
    assert ar.lambda0(cfg) == pytest.approx(ar.u_tc(cfg, cfg.R2) / cfg.R2, rel=1e-13)
    assert ar.lambda0(cfg) == pytest.approx(ar.lambda0_direct(cfg), rel=1e-13)


def test_invalid_config_raises():
    with pytest.raises(ar.ConfigError):
        ar.AnnulusConfig(B=0.0)
    with pytest.raises(ValueError):
        ar.AnnulusConfig(R1=1.7)


def test_parse_config_text():
    c = ar.parse_config_text("r1=1\nr2=2\nR1=1.2\nR2=1.5\nA=0\nB=0.1\n", ["m=3"])
    assert c.m == 3
    assert c.eps == 0.01
    with pytest.raises(ar.ConfigError, match="unknown key"):
        ar.parse_config_text("gamma=1\n")


def test_kernel_and_duality():
    model = ar.Model(ar.AnnulusConfig(), eps=0.01)
    sol = model.fixed_point(2)
    assert sol.residual < 1e-8
    assert sol.contraction_ratio() < 0.5
    diag = model.validate_kernel(sol, 8)
    assert diag.kernel_ok and diag.others_ok
    M = np.asarray(model.assemble(2, sol.lambda_))
    h = np.asarray(sol.h())
    assert np.linalg.norm(M @ h) < 1e-10 * np.linalg.norm(M) * np.linalg.norm(h)

    rng = np.random.default_rng(0)
    Ms = np.asarray(model.assemble_adjoint(3, 0.1))
    M3 = np.asarray(model.assemble(3, 0.1))
    u, w = rng.standard_normal(M.shape[0]), rng.standard_normal(M.shape[0])
    assert abs(model.inner(M3 @ u, w) - model.inner(u, Ms @ w)) < 1e-10 * max(1.0, abs(model.inner(M3 @ u, w)))


def test_branch_and_rotation():
    model = ar.Model(ar.AnnulusConfig(), eps=0.01)
    sol = model.fixed_point(2)
    pts = model.continue_branch(sol, 1e-3, steps=2)
    assert len(pts) == 3
    assert all(p.residual <= 1e-9 for p in pts[1:])
    assert abs(pts[-1].lambda_ - sol.lambda_) < 1e-2 * abs(sol.lambda_)
    rep = model.simulate(pts[-1], 2, nr=96, ntheta=32, dt=1.0)
    assert rep["lambda_meas"] == pytest.approx(pts[-1].lambda_, rel=0.01)
    assert rep["series"][-1][0] == pytest.approx(rep["period"])
    assert rep["circulation_drift"] < 1e-8


def test_sobolev_index_guard():
    model = ar.Model(ar.AnnulusConfig(), eps=0.01)
    norms = model.sobolev(1.0)
    assert norms["hs"] == pytest.approx(norms["h1"])
    with pytest.raises(ar.DomainError):
        model.sobolev(1.5)
    assert math.isfinite(norms["h2"])
