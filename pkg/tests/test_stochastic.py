import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgnoise import stochastic
from sgnoise.physics import Arm, derive_quantities, table1_params
from sgnoise.spectra import Flicker, White
from sgnoise.stochastic import NoiseRealization, SimulationGrid

_P = table1_params()
_DQ = derive_quantities(_P)


@pytest.fixture(scope="module")
def grid(dq):
    return SimulationGrid.for_loops(dq, 256, 8, seed=3)


def test_synthesis_deterministic(grid):
    a = stochastic.synthesize_noise(White(1e-6), grid, 5).values
    b = stochastic.synthesize_noise(White(1e-6), grid, 5).values
    c = stochastic.synthesize_noise(White(1e-6), grid, 6).values
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)


def test_synthesis_real_and_zero_mean(grid):
    r = stochastic.synthesize_noise(White(1e-6), grid, 0)
    assert r.values.dtype == float and r.values.shape == (grid.n,)
    assert r.coefficients[0] == 0 and r.coefficients[-1] == 0
    assert abs(r.values.mean()) < 1e-12 * np.abs(r.values).max()


def test_band_limits_respected(dq, grid):
    r = stochastic.synthesize_noise(White(1e-6), grid, 0, omega_min=dq.omega0, omega_max=4 * dq.omega0)
    w = grid.omega
    live = np.abs(r.coefficients) > 0
    assert w[live].min() >= dq.omega0 * (1 - 1e-9)
    assert w[live].max() <= 4 * dq.omega0 * (1 + 1e-9)


def test_white_variance_matches_psd(dq):
    # band-limited white noise: Var = A^2 (w_hi - w_lo) / pi on the two-sided convention
    g = SimulationGrid.for_loops(dq, 256, 64, seed=1)
    A, lo, hi = 1e-6, 2 * dq.omega0, 40 * dq.omega0
    v = np.concatenate([stochastic.synthesize_noise(White(A), g, i, lo, hi).values for i in range(40)])
    assert np.var(v) == pytest.approx(A**2 * (hi - lo) / math.pi, rel=0.03)


def test_welch_recovers_white_level(dq):
    g = SimulationGrid(n=8192, dt=dq.T_exp / 256, seed=2)
    paths = [stochastic.synthesize_noise(White(2e-6), g, i).values for i in range(60)]
    w, S = stochastic.estimate_psd(paths, g.dt, 512)
    assert np.median(S[2:-2]) / 4e-12 == pytest.approx(1.0, rel=0.03)


def test_zero_noise_zero_deviation(params, dq, grid):
    real = NoiseRealization.from_values(np.zeros(grid.n), grid)
    dev = stochastic.deviations(real, dq, params)
    assert not np.any(dev.dx_R) and not np.any(dev.dp_L)


def test_initial_conditions(params, dq, grid):
    real = stochastic.synthesize_noise(White(1e-6), grid, 1)
    dev = stochastic.deviations(real, dq, params)
    scale = np.abs(dev.dx_R).max()
    assert abs(dev.dx_R[0]) < 1e-12 * scale
    assert abs(dev.dp_R[0]) < 1e-12 * np.abs(dev.dp_R).max()


def test_constant_offset_matches_closed_form(params, dq, grid):
    c = 3e-7
    real = NoiseRealization.from_values(np.full(grid.n, c), grid)
    dev = stochastic.deviations(real, dq, params)
    for arm, dx in ((Arm.R, dev.dx_R), (Arm.L, dev.dx_L)):
        ref = stochastic.quasi_static_deviation(c, dq, params, arm, grid.t)
        assert stochastic.relative_l2(dx, ref) < 1e-10


def test_equation_of_motion_residual(params, dq):
    # x'' + w0^2 x = -(C/m) eta (2 cos w0 t - 1), checked with a 4th-order stencil
    g = SimulationGrid.for_loops(dq, 1024, 4, seed=5)
    real = stochastic.synthesize_noise(White(1e-6), g, 0, omega_max=16 * dq.omega0)
    dev = stochastic.deviation_freq(real, dq, params, Arm.R)
    x, h, w0 = dev.dx, g.dt, dq.omega0
    xpp = (-x[4:] + 16 * x[3:-1] - 30 * x[2:-2] + 16 * x[1:-3] - x[:-4]) / (12 * h * h)
    t = g.t[2:-2]
    rhs = -dq.C_R / params.m * real.values[2:-2] * (2 * np.cos(w0 * t) - 1)
    lhs = xpp + w0**2 * x[2:-2]
    assert stochastic.relative_l2(lhs, rhs) < 1e-3


def test_freq_and_time_agree(params, dq):
    g = SimulationGrid.for_loops(dq, 1024, 4, seed=7)
    real = stochastic.synthesize_noise(White(1e-6), g, 0, omega_max=16 * dq.omega0)
    a = stochastic.deviations(real, dq, params, "freq")
    b = stochastic.deviations(real, dq, params, "time")
    assert stochastic.relative_l2(a.dx_R, b.dx_R) < 1e-3
    assert stochastic.relative_l2(a.dp_L, b.dp_L) < 1e-3


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 10.0))
def test_deviation_linear_in_amplitude(c):
    p, dq_ = _P, _DQ
    g = SimulationGrid.for_loops(dq_, 64, 4, seed=0)
    a = stochastic.deviations(stochastic.synthesize_noise(White(1e-6), g, 0), dq_, p)
    b = stochastic.deviations(stochastic.synthesize_noise(White(c * 1e-6), g, 0), dq_, p)
    assert np.allclose(b.delta_x, c * a.delta_x, rtol=1e-9, atol=1e-12 * c * np.abs(a.delta_x).max())


def test_delta_x_independent_of_bias_field(params, dq, grid):
    # C_R - C_L carries no B0, and B0 does not enter omega0
    p2 = params.replace(B0=3 * params.B0)
    dq2 = derive_quantities(p2)
    assert dq2.omega0 == pytest.approx(dq.omega0, rel=1e-14)
    real = stochastic.synthesize_noise(White(1e-6), grid, 2)
    a = stochastic.deviations(real, dq, params).delta_x
    b = stochastic.deviations(real, dq2, p2).delta_x
    assert np.allclose(a, b, rtol=1e-9, atol=1e-12 * np.abs(a).max())


def test_contrast_single_run(params, dq, grid, bounds):
    A, _ = bounds
    real = stochastic.synthesize_noise(White(A), grid, 0, omega_min=dq.omega0)
    dev = stochastic.deviations(real, dq, params)
    c = stochastic.contrast_single(dev, dq, dq.T_exp)
    assert c.contrast >= 0.99
    assert abs(c.dx_final) < 1e-16
    with pytest.raises(ValueError, match="not on the simulation grid"):
        stochastic.contrast_single(dev, dq, 0.37 * grid.dt)


def test_ensemble_white_closed_form(params, dq, grid, bounds):
    A, _ = bounds
    e = stochastic.contrast_ensemble(White(A), dq, params, 300, dq.T_exp, grid)
    assert abs(e.mean_dx2 - e.dx2_closed_form) < 4 * e.se_dx2
    assert e.contrast >= 0.99
    assert e.dp_amplitude == pytest.approx(5.2515e-22, rel=1e-3)


def test_ensemble_flicker_has_no_closed_form(params, dq, grid, bounds):
    _, K = bounds
    e = stochastic.contrast_ensemble(Flicker.from_params(K, params), dq, params, 20, dq.T_exp, grid)
    assert math.isnan(e.dx2_closed_form)
    with pytest.raises(ValueError):
        stochastic.contrast_ensemble(White(1e-6), dq, params, 1, dq.T_exp, grid)


def test_phase_variance_matches_analytic(params, dq, bounds, gamma155):
    A, _ = bounds
    g = SimulationGrid.for_loops(dq, 256, 8, seed=11)
    r = stochastic.phase_variance_mc(White(A), dq, params, 400, g)
    assert abs(r.gamma - gamma155) < 4 * r.se_gamma
    assert r.rate == pytest.approx(r.variance / dq.T_exp)


def test_grid_validation(dq):
    with pytest.raises(ValueError, match="power of two"):
        SimulationGrid(n=1000, dt=1e-4)
    with pytest.raises(ValueError):
        SimulationGrid(n=1024, dt=0.0)
    with pytest.raises(ValueError, match="fewer than 64"):
        SimulationGrid.for_loops(dq, 32, 8).check(dq)
    with pytest.raises(ValueError, match="whole number of trap periods"):
        SimulationGrid(n=1024, dt=dq.T_exp / 300).check(dq)
    with pytest.raises(ValueError):
        NoiseRealization.from_values(np.zeros(7), SimulationGrid(n=8, dt=1.0))


def test_trace_csv(tmp_path, params, dq, grid):
    real = stochastic.synthesize_noise(White(1e-6), grid, 0)
    dev = stochastic.deviations(real, dq, params)
    path = tmp_path / "trace.csv"
    stochastic.write_trace_csv(path, real, dev)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "delta_eta", "dx_R", "dx_L", "dp_R", "dp_L"]
    assert len(rows) == grid.n + 1
    assert float(rows[5][2]) == pytest.approx(dev.dx_R[4], rel=1e-7)

