import numpy as np
import pytest

from hypframe import MinkVec, front_verdict, isotropy_residuals, mink_dot
from hypframe.duality import (PAIR_NAMES, DualPairSample, Fibration,
                              FrontVerdict, pair_sample, pair_theta_range)
from hypframe.errors import InvalidInputError

from oracles import fd_partials


def _samples_for(model, pair, n, rng, tlo, thi):
    th_lo, th_hi = pair_theta_range(pair)
    out = []
    for _ in range(n):
        t = float(rng.uniform(tlo, thi))
        th = float(rng.uniform(th_lo, th_hi))
        out.append(pair_sample(model, pair, t, th))
    return out


def test_pair_residuals_all_four(model_ce_h, model_ce_d):
    rng = np.random.default_rng(51)
    models = {"focal_h_mu": model_ce_h, "focal_d_mu": model_ce_d,
              "dual_eh_evolute_h": model_ce_h, "dual_ed_evolute_d": model_ce_d}
    for pair in PAIR_NAMES:
        model = models[pair]
        for s in _samples_for(model, pair, 200, rng, 0.0, 4.0):
            assert max(abs(r) for r in isotropy_residuals(s)) <= 1e-8
            rf, rg = s.membership_residuals()
            # self-pairings carry an eps * |leg|^2 evaluation floor
            assert abs(rf) <= 1e-8 * (1.0 + s.f.max_abs() ** 2)
            assert abs(rg) <= 1e-8 * (1.0 + s.g.max_abs() ** 2)


def test_pair_residuals_with_fd_partials(model_ce_h_dense):
    # independent route: partials by central differences instead of the
    # engine's frame-exact expressions
    from hypframe.focal import focal_h_point

    rng = np.random.default_rng(53)
    for _ in range(50):
        t = float(rng.uniform(0.2, 1.8))
        th = float(rng.uniform(-1.5, 1.5))
        f = focal_h_point(model_ce_h_dense, t, th)
        ft, fth = fd_partials(
            lambda a, b: focal_h_point(model_ce_h_dense, a, b).as_array(), t, th)
        mu_fn = lambda a: model_ce_h_dense.frame_at(a)[3]
        gt = (mu_fn(t + 1e-5) - mu_fn(t - 1e-5)) / 2e-5
        s = DualPairSample(f, MinkVec.from_array(mu_fn(t)),
                           MinkVec.from_array(ft), MinkVec.from_array(fth),
                           MinkVec.from_array(gt), MinkVec(0, 0, 0, 0),
                           Fibration.DELTA1)
        assert max(abs(r) for r in isotropy_residuals(s)) <= 1e-8


def test_constant_pair_zero_residuals():
    zero = MinkVec(0, 0, 0, 0)
    s = DualPairSample(MinkVec(1, 0, 0, 0), MinkVec(0, 1, 0, 0),
                       zero, zero, zero, zero, Fibration.DELTA1)
    assert isotropy_residuals(s) == (0.0, 0.0, 0.0, 0.0, 0.0)
    assert front_verdict([s]) is FrontVerdict.FRONTAL


def test_perturbed_pair_detected(model_ce_h):
    s = pair_sample(model_ce_h, "focal_h_mu", 1.0, 0.5)
    g_bad = s.g + 0.1 * s.f
    bad = DualPairSample(s.f, g_bad, s.df_du, s.df_dv, s.dg_du, s.dg_dv,
                         s.fibration)
    r0 = isotropy_residuals(bad)[0]
    assert r0 == pytest.approx(-0.1 * abs(mink_dot(s.f, s.f)), abs=1e-6)
    assert front_verdict([bad]) is FrontVerdict.NOT_ISOTROPIC


def test_focal_pair_is_front(model_ce_h):
    rng = np.random.default_rng(57)
    samples = _samples_for(model_ce_h, "focal_h_mu", 40, rng, 0.0, 4.0)
    assert front_verdict(samples) is FrontVerdict.FRONT


def test_front_verdict_monotone_in_rank_tol(model_ce_h):
    rng = np.random.default_rng(59)
    samples = _samples_for(model_ce_h, "focal_h_mu", 25, rng, 0.0, 4.0)
    order = [FrontVerdict.FRONT, FrontVerdict.FRONTAL]
    prev = None
    for rtol in (1e-9, 1e-6, 1e-3, 1e-1, 0.5, 0.99):
        v = front_verdict(samples, rank_rtol=rtol)
        assert v in order
        if prev is not None:
            # raising the threshold can only move Front -> Frontal
            assert order.index(v) >= order.index(prev)
        prev = v
    assert front_verdict(samples, rank_rtol=0.999999) is FrontVerdict.FRONTAL


def test_front_verdict_requires_samples():
    with pytest.raises(InvalidInputError):
        front_verdict([])


def test_unknown_pair_rejected(model_ce_h):
    with pytest.raises(InvalidInputError):
        pair_sample(model_ce_h, "nope", 1.0, 0.0)
