import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from sgnoise import transfer
from sgnoise.physics import Arm, classical_trajectory
from sgnoise.transfer import (
    AliasingError,
    DivergenceError,
    NumericTransfer,
    TransferKind,
    f_dev,
    f_dev_loop,
    f_ho,
    numeric_transfer,
)

PI2 = math.pi**2


def test_removable_points():
    assert f_ho(1.0) == pytest.approx(PI2 / 4, rel=1e-12)
    assert f_ho(2.0) == pytest.approx(PI2 / 16, rel=1e-12)
    assert f_ho(3.0) == pytest.approx(0.0, abs=1e-30)


def test_limit_continuity():
    for k in (1.0, 2.0):
        for eps in (1e-8, -1e-8, 1e-6, -1e-6):
            assert abs(f_ho(k + eps) / f_ho(k) - 1) < 1e-4


def test_forms_agree_on_generic_points():
    rng = np.random.default_rng(1)
    xi = rng.integers(0, 20, 1000) + rng.uniform(0.01, 0.99, 1000)
    xi = xi[xi > 0.05]
    a = transfer.f_ho_bracket_form(xi)
    b = transfer.f_ho_cosine_form(xi)
    c = f_ho(xi)
    assert np.max(np.abs(a - b) / np.maximum(a, b)) < 1e-12
    assert np.max(np.abs(a - c) / c) < 1e-12


def test_dc_raises():
    for fn in (f_ho, f_dev, f_dev_loop):
        with pytest.raises(DivergenceError, match="DC"):
            fn(0.0)


def test_kernel_definition():
    # F_HO = |int_0^{2pi} (cos s - 1) cos s e^{i xi s} ds|^2 / 4
    for xi in (0.3, 1.0, 1.7, 2.0, 4.4):
        re = integrate.quad(lambda s: (math.cos(s) - 1) * math.cos(s) * math.cos(xi * s), 0, 2 * math.pi)[0]
        im = integrate.quad(lambda s: (math.cos(s) - 1) * math.cos(s) * math.sin(xi * s), 0, 2 * math.pi)[0]
        assert f_ho(xi) == pytest.approx((re * re + im * im) / 4, rel=1e-9, abs=1e-14)


def test_large_xi_decay():
    xi = np.logspace(1, 4, 400)
    assert np.max(f_ho(xi) * xi**4) < 1.0
    for kind, fn in ((TransferKind.HO, f_ho), (TransferKind.DEV, f_dev)):
        p, c = transfer.DECAY[kind]
        assert np.max(fn(xi) * xi**p) <= c


def _f_dev_mp(x):
    x = mpmath.mpf(x)
    b = 1 / x - x / (x**2 - 1) + x / (x**2 - 4)
    return mpmath.sin(mpmath.pi * x) ** 2 / (1 - x**2) ** 2 * b**2


def test_f_dev_high_precision():
    mpmath.mp.dps = 50
    for x in ("0.5", "0.123", "1.5", "2.75", "7.31"):
        assert f_dev(float(x)) == pytest.approx(float(_f_dev_mp(x)), rel=1e-10)
    assert f_dev(3.0) == pytest.approx(0.0, abs=1e-28)
    assert f_dev(2.0) == pytest.approx(PI2 / 36, rel=1e-12)


def test_f_dev_double_pole_at_one():
    # not removable: (xi - 1)^2 F_dev -> pi^2/16
    with pytest.raises(DivergenceError, match="xi = 1"):
        f_dev(1.0)
    for eps in (1e-6, -1e-6):
        assert f_dev(1 + eps) * eps**2 == pytest.approx(PI2 / 16, rel=1e-4)


def test_dev_loop_against_quadrature():
    def ref(xi):
        k = lambda s: 0.5 * (2 * math.pi - s) * (2 * math.cos(s) - 1) * math.sin(s)
        re = integrate.quad(lambda s: k(s) * math.cos(xi * s), 0, 2 * math.pi, limit=200)[0]
        im = integrate.quad(lambda s: k(s) * math.sin(xi * s), 0, 2 * math.pi, limit=200)[0]
        return (re * re + im * im) / 4

    for xi in (1e-3, 0.3, 1.0, 1.5, 2.0, 2.7, 5.2):
        assert f_dev_loop(xi) == pytest.approx(ref(xi), rel=1e-8)


def test_dev_loop_finite_and_decays():
    xi = np.linspace(0.01, 50, 5000)
    v = f_dev_loop(xi)
    assert np.all(np.isfinite(v)) and np.all(v >= 0)
    p, c = transfer.DECAY[TransferKind.DEV_LOOP]
    big = np.logspace(1, 4, 300)
    assert np.max(f_dev_loop(big) * big**p) <= c


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 1e3).filter(lambda x: abs(x - 1) > 1e-9))
def test_even_and_nonnegative(xi):
    for fn in (f_ho, f_dev, f_dev_loop):
        a, b = fn(xi), fn(-xi)
        assert a == b and a >= 0


def test_evaluate_dispatch():
    assert transfer.evaluate("ho", 1.3) == f_ho(1.3)
    assert transfer.evaluate(TransferKind.DEV_LOOP, 1.3) == f_dev_loop(1.3)


# -- numeric transfer ----------------------------------------------------------


def _loop(params, dq, n=4096):
    t = np.linspace(0, dq.T_exp, n + 1)
    return t, classical_trajectory(dq, params, Arm.R, t), classical_trajectory(dq, params, Arm.L, t)


def test_identical_arms_give_zero(params, dq):
    t, xr, _ = _loop(params, dq)
    nt = NumericTransfer(t, xr, xr)
    assert np.all(numeric_transfer(nt, dq.omega0 * np.array([0.5, 1.0, 3.0])) == 0)


def test_sum_mode_closed_form(params, dq):
    # x_R + x_L = a (cos w0 t - 1): |FT|^2 = a^2 4 sin^2(pi xi) / (xi^2 (xi^2 - 1)^2 w0^2)
    t, xr, xl = _loop(params, dq)
    a = (dq.C_R + dq.C_L) * dq.eta0 / (params.m * dq.omega0**2)
    nt = NumericTransfer(t, xr, xl, mode="sum")
    xi = np.array([0.1, 0.37, 0.7, 1.5, 2.5, 3.3, 6.6, 9.5])
    got = numeric_transfer(nt, xi * dq.omega0)
    want = a**2 * 4 * np.sin(np.pi * xi) ** 2 / (xi**2 * (xi**2 - 1) ** 2 * dq.omega0**2)
    assert np.allclose(got, want, rtol=1e-3)


def test_difference_mode_reproduces_ho_kernel(params, dq):
    # the product (cos - 1) cos behind F_HO, fed as one arm
    t = np.linspace(0, dq.T_exp, 4097)
    s = dq.omega0 * t
    y = (np.cos(s) - 1) * np.cos(s)
    nt = NumericTransfer(t, y, np.zeros_like(y))
    xi = np.array([0.25, 0.8, 1.0, 1.4, 2.0, 3.5, 7.2, 9.9])
    got = numeric_transfer(nt, xi * dq.omega0) * dq.omega0**2 / 4
    assert np.allclose(got, f_ho(xi), rtol=1e-3, atol=1e-8)


def test_time_shift_invariance(params, dq):
    t, xr, xl = _loop(params, dq)
    w = dq.omega0 * np.array([0.3, 1.7, 4.2])
    a = numeric_transfer(NumericTransfer(t, xr, xl), w)
    b = numeric_transfer(NumericTransfer(t + 0.37 * dq.T_exp, xr, xl), w)
    assert np.allclose(a, b, rtol=1e-12)


def test_quadratic_power(params, dq):
    t, xr, xl = _loop(params, dq)
    q = NumericTransfer(t, xr, xl, power="quadratic")
    _, y = q.signal()
    assert np.allclose(y, xr**2 - xl**2)


def test_aliasing_reported(params, dq):
    t, xr, xl = _loop(params, dq, n=64)
    with pytest.raises(AliasingError, match="under-resolved"):
        numeric_transfer(NumericTransfer(t, xr, xl), 10 * dq.omega0)


def test_window_and_validation(params, dq):
    t, xr, xl = _loop(params, dq)
    nt = NumericTransfer(t, xr, xl, window=(0.0, dq.T_exp / 2))
    tt, _ = nt.signal()
    assert tt[-1] == pytest.approx(dq.T_exp / 2, rel=1e-3)
    with pytest.raises(ValueError, match="t_f > t_i"):
        NumericTransfer(t, xr, xl, window=(1.0, 0.5))
    with pytest.raises(ValueError):
        NumericTransfer(t, xr[:-1], xl)
    with pytest.raises(ValueError):
        NumericTransfer(t, xr, xl, mode="product")
