import math

import numpy as np
import pytest

from hypframe import (CurvatureQuartet, FrameSample, MinkVec,
                      coefficient_matrix, congruence_residual, eval_expr,
                      frenet_convert, integrate_frame, scalar_invariants)
from hypframe.errors import (FrameDegenerateError, InvalidInputError,
                             NumericError)
from hypframe.minkowski import METRIC
from hypframe.symexpr import ExprDomainError

from oracles import central_diff

Q_CE_H = CurvatureQuartet.from_strings("1", "1", "2", "0")
Q_CE_D = CurvatureQuartet.from_strings("2", "1", "1", "0")
Q_GEO = CurvatureQuartet.from_strings("1", "0", "0", "0")


def test_coefficient_matrix_examples():
    c = coefficient_matrix(Q_GEO, 0.3)
    assert np.array_equal(c, np.array([
        [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0]], dtype=float))
    c = coefficient_matrix(Q_CE_H, 1.1)
    assert np.array_equal(c, np.array([
        [0, 0, 0, 1], [0, 0, 1, 2], [0, -1, 0, 0], [1, -2, 0, 0]], dtype=float))


def test_coefficient_matrix_lorentz_antisymmetry():
    rng = np.random.default_rng(1)
    q = CurvatureQuartet.from_strings("sin(t)", "t^2-1", "cosh(t)", "0.3*t")
    for _ in range(20):
        t = float(rng.uniform(-2, 2))
        c = coefficient_matrix(q, t)
        assert np.abs(c @ METRIC + METRIC @ c.T).max() == 0.0


def test_geodesic_closed_form():
    m = integrate_frame(Q_GEO, (0.0, 2.0, 201), step=1e-3)
    worst = 0.0
    for i, t in enumerate(m.ts):
        g, mu = m.frames[i][0], m.frames[i][3]
        expect_g = np.array([math.cosh(t), 0, 0, math.sinh(t)])
        expect_mu = np.array([math.sinh(t), 0, 0, math.cosh(t)])
        worst = max(worst, np.abs(g - expect_g).max(), np.abs(mu - expect_mu).max())
        assert np.abs(m.frames[i][1] - np.array([0, 1, 0, 0])).max() < 1e-12
        assert np.abs(m.frames[i][2] - np.array([0, 0, 1, 0])).max() < 1e-12
    assert worst <= 1e-8


def test_zero_quartet_constant_frames():
    q = CurvatureQuartet.from_strings("0", "0", "0", "0")
    m = integrate_frame(q, (0.0, 1.0, 11), step=1e-2)
    assert np.abs(m.frames - m.frames[0]).max() == 0.0


def test_richardson_half_step():
    full = integrate_frame(Q_CE_H, (0.0, 4.0, 41), step=4e-3)
    half = integrate_frame(Q_CE_H, (0.0, 4.0, 41), step=2e-3)
    assert np.abs(full.frames - half.frames).max() <= 1e-8


def test_richardson_half_step_nonautonomous():
    q = CurvatureQuartet.from_strings("sin(t)", "1", "2+0.5*cos(t)", "0.2*t")
    full = integrate_frame(q, (0.0, 3.0, 31), step=4e-3)
    half = integrate_frame(q, (0.0, 3.0, 31), step=2e-3)
    assert np.abs(full.frames - half.frames).max() <= 1e-8


def test_sample_invariants(model_ce_h, model_ce_d):
    for model in (model_ce_h, model_ce_d):
        assert max(s.pairing_residual() for s in model.samples()) <= 1e-9
        assert max(s.wedge_residual() for s in model.samples()) <= 1e-9


def test_uniqueness_same_curvature():
    a = integrate_frame(Q_CE_H, (0.0, 4.0, 101), step=1e-3)
    b = integrate_frame(Q_CE_H, (0.0, 4.0, 101), step=2.5e-4)
    assert np.abs(a.frames - b.frames).max() <= 1e-8


def test_scalar_invariants_examples():
    inv = scalar_invariants(Q_CE_H)
    for t in (0.0, 0.6, 2.2):
        vals = [eval_expr(e, t) for e in (inv.f, inv.g, inv.h, inv.sigma)]
        assert vals == [4.0, 2.0, 0.0, 12.0]
    for q in (Q_GEO, CurvatureQuartet.from_strings("0", "0", "0", "0")):
        inv = scalar_invariants(q)
        assert [eval_expr(e, 0.9) for e in (inv.f, inv.g, inv.h, inv.sigma)] \
            == [0.0, 0.0, 0.0, 0.0]


def test_sigma_consistent_with_fgh():
    rng = np.random.default_rng(17)
    q = CurvatureQuartet.from_strings("sin(t)", "t", "2+cos(t)", "0.5*t")
    inv = scalar_invariants(q)
    for _ in range(100):
        t = float(rng.uniform(-2, 2))
        f, g, h = (eval_expr(e, t) for e in (inv.f, inv.g, inv.h))
        sigma = eval_expr(inv.sigma, t)
        expect = f * f - g * g - h * h
        assert abs(sigma - expect) <= 1e-10 * (1.0 + abs(expect))


def test_frenet_convert_examples(model_ce_h, model_ce_d):
    n1, n2, data = frenet_convert(model_ce_h, 1.3)
    f = model_ce_h.frame_at(1.3)
    assert np.abs(n1.as_array() - f[1]).max() < 1e-14
    assert np.abs(n2.as_array() - f[2]).max() < 1e-14
    assert (data.M, data.N, data.A, data.B) == (1.0, 1.0, 2.0, 0.0)
    assert data.sigma_f == pytest.approx(12.0, abs=1e-12)

    _, _, data_d = frenet_convert(model_ce_d, 0.9)
    assert (data_d.M, data_d.N, data_d.A) == (2.0, 1.0, 1.0)
    assert data_d.sigma_f == pytest.approx(-3.0, abs=1e-12)


def test_frenet_degenerate_error():
    m = integrate_frame(Q_GEO, (0.0, 1.0, 11), step=1e-3)
    with pytest.raises(FrameDegenerateError):
        frenet_convert(m, 0.5)


def test_converted_frame_reproduces_frenet_quartet(model_ce_h):
    # re-derive (m, n, a, b) of the rotated frame by pairing FD derivatives;
    # dense grid keeps the interpolation derivative below the FD tolerance
    q = CurvatureQuartet.from_strings("1+0.3*sin(t)", "t", "2+0.5*cos(t)", "0.4")
    model = integrate_frame(q, (0.0, 2.0, 2001), step=1e-3)
    for t in (0.31, 0.9, 1.57):
        _, _, data = frenet_convert(model, t)
        d = central_diff(lambda x: model.frenet_frame_at(x), t, h=1e-6)
        f = model.frenet_frame_at(t)
        signs = np.array([-1.0, 1, 1, 1])

        def pair(u, v):
            return float(np.dot(u * signs, v))

        m_re = pair(d[0], f[3])
        n_re = pair(d[1], f[2])
        a_re = pair(d[1], f[3])
        b_re = pair(d[2], f[3])
        assert m_re == pytest.approx(data.M, abs=1e-8)
        assert n_re == pytest.approx(data.N, abs=1e-8)
        assert a_re == pytest.approx(data.A, abs=1e-8)
        assert abs(b_re) <= 1e-8


def test_congruence_identity(model_ce_h):
    assert congruence_residual(model_ce_h, model_ce_h, np.eye(4)) == 0.0


def test_congruence_under_rotation():
    angle = 0.7
    rot = np.eye(4)
    rot[1, 1] = rot[2, 2] = math.cos(angle)
    rot[1, 2], rot[2, 1] = -math.sin(angle), math.sin(angle)
    a = integrate_frame(Q_CE_H, (0.0, 2.0, 101), step=1e-3)
    initial = FrameSample.from_matrix(0.0, FrameSample.standard(0.0).matrix() @ rot.T)
    b = integrate_frame(Q_CE_H, (0.0, 2.0, 101), step=1e-3, initial=initial)
    assert congruence_residual(a, b, rot) <= 1e-9


def test_congruence_distinguishes_quartets():
    a = integrate_frame(Q_CE_H, (0.0, 2.0, 101), step=1e-3)
    b = integrate_frame(Q_CE_D, (0.0, 2.0, 101), step=1e-3)
    assert congruence_residual(a, b, np.eye(4)) > 0.1


def test_congruence_rejects_non_lorentz(model_ce_h):
    bad = np.eye(4)
    bad[0, 0] = 2.0
    with pytest.raises(InvalidInputError):
        congruence_residual(model_ce_h, model_ce_h, bad)


def test_congruence_rejects_mismatched_grids(model_ce_h):
    other = integrate_frame(Q_CE_H, (0.0, 4.0, 99), step=1e-2)
    with pytest.raises(InvalidInputError):
        congruence_residual(model_ce_h, other, np.eye(4))


def test_dense_output_accuracy(model_ce_h):
    # interpolated frames stay pseudo-orthonormal and near the flow
    direct = integrate_frame(Q_CE_H, (0.0, 1.0005, 2), step=1e-4)
    f = model_ce_h.frame_at(1.0005)
    assert np.abs(f - direct.frames[-1]).max() <= 1e-9
    s = model_ce_h.sample_at(1.0005)
    assert s.pairing_residual() <= 1e-12


def test_frame_at_outside_domain(model_ce_h):
    with pytest.raises(InvalidInputError):
        model_ce_h.frame_at(4.5)


def test_initial_frame_validation():
    bad = np.eye(4)
    bad[1, 1] = 1.5
    with pytest.raises(InvalidInputError):
        integrate_frame(Q_CE_H, (0.0, 1.0, 11), initial=bad)
    flipped = np.eye(4)
    flipped[3, 3] = -1.0  # mu = +wedge orientation is rejected
    with pytest.raises(InvalidInputError):
        integrate_frame(Q_CE_H, (0.0, 1.0, 11), initial=flipped)


def test_domain_validation():
    with pytest.raises(InvalidInputError):
        integrate_frame(Q_CE_H, (0.0, 1.0, 1))
    with pytest.raises(InvalidInputError):
        integrate_frame(Q_CE_H, (1.0, 0.0, 11))
    with pytest.raises(InvalidInputError):
        integrate_frame(Q_CE_H, (0.0, 1.0, 11), step=-1.0)


def test_integration_propagates_domain_errors():
    q = CurvatureQuartet.from_strings("sqrt(t)", "0", "1", "0")
    with pytest.raises((ExprDomainError, NumericError)):
        integrate_frame(q, (-1.0, 1.0, 21), step=1e-2)


def test_model_metadata(model_ce_h):
    assert model_ce_h.t0 == 0.0 and model_ce_h.t1 == 4.0
    assert len(model_ce_h) == 401
    assert model_ce_h.max_drift <= 1e-9
    s = model_ce_h.sample(0)
    assert isinstance(s.gamma, MinkVec)
