"""Numbered reproduction checks with their tolerances.

Each ``criterion_*`` function returns a list of Check rows; ``run_all``
collects them in order. The CLI ``reproduce-paper`` command and the
acceptance test module both call these.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import dephasing, stochastic, sweeps, transfer
from .dephasing import IntegrationConfig, MaterialParams
from .physics import Arm, derive_quantities, table1_params
from .spectra import Flicker, White
from .stochastic import SimulationGrid
from .transfer import TransferKind


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    value: float
    target: str
    passed: bool
    note: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        v = f"{self.value:.6g}" if isinstance(self.value, float) else str(self.value)
        tail = f"  ({self.note})" if self.note else ""
        return f"[{flag}] {self.criterion:>2} {self.name}: {v} | target {self.target}{tail}"


def _rel(value, target, tol):
    return abs(value - target) <= tol * abs(target)


def _setup():
    p = table1_params()
    dq = derive_quantities(p)
    g = math.log(10) / dq.T_exp
    A = dephasing.bound_white(g, dq)
    K = dephasing.bound_flicker(g, dq, Flicker.from_params(1.0, p))
    return p, dq, g, A, K


def criterion_1():
    p, dq, *_ = _setup()
    c = 1
    return [
        Check(c, "eta0 [T/m]", dq.eta0, "-6.0e3 +-1%", _rel(dq.eta0, -6.0e3, 0.01)),
        Check(c, "omega0 [rad/s]", dq.omega0, "424 +-1", abs(dq.omega0 - 424) <= 1),
        Check(c, "H", dq.H, "4.23e12 +-1%", _rel(dq.H, 4.23e12, 0.01)),
        Check(c, "T_exp [s]", dq.T_exp, "1.48e-2 +-1%", _rel(dq.T_exp, 1.48e-2, 0.01)),
        Check(c, "dx_max [m]", dq.dx_max, "2.5e-9 +-3%", _rel(dq.dx_max, 2.5e-9, 0.03)),
    ]


def criterion_2():
    cases = [
        ("int_1^inf F_HO", 0.0, 1.0, 1.8, 0.05),
        ("int_0^inf F_HO", 0.0, 0.0, 4.3, 0.1),
        ("int_1^inf F_HO/xi", 1.0, 1.0, 1.3, 0.05),
        ("int_1e-4^inf F_HO/xi", 1.0, 1e-4, 24.0, 1.0),
        ("int_1e-6^inf F_HO/xi", 1.0, 1e-6, 35.5, 1.0),
    ]
    out = []
    for name, alpha, lo, target, tol in cases:
        t0 = time.perf_counter()
        v = dephasing.transfer_integral(TransferKind.HO, alpha, IntegrationConfig(xi_min=lo))
        dt = time.perf_counter() - t0
        ok = abs(v - target) <= tol and dt < 1.0
        out.append(Check(2, name, v, f"{target} +-{tol}, < 1 s", ok, f"{dt * 1e3:.0f} ms"))
    return out


def criterion_3(seed: int = 0):
    v1, v2 = transfer.f_ho(1.0), transfer.f_ho(2.0)
    t1, t2 = math.pi**2 / 4, math.pi**2 / 16
    rng = np.random.default_rng(seed)
    # integer part plus a fractional offset kept 0.01 from the integers: the
    # (1 - cos) form cancels catastrophically next to every integer
    xi = rng.integers(0, 20, 1000) + rng.uniform(0.01, 0.99, 1000)
    xi = xi[xi > 0.05]
    a, b = transfer.f_ho_bracket_form(xi), transfer.f_ho_cosine_form(xi)
    rel = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), np.abs(b))))
    return [
        Check(3, "f_ho(1)", v1, "pi^2/4 to 6 sig. digits", abs(v1 - t1) <= 5e-7 * t1),
        Check(3, "f_ho(2)", v2, "pi^2/16 to 6 sig. digits", abs(v2 - t2) <= 5e-7 * t2),
        Check(3, "algebraic forms, max rel. diff", rel, "< 1e-12 at 1e3 points", rel < 1e-12),
    ]


def criterion_4():
    p, dq, g, A, K = _setup()
    closed = dephasing.current_noise_ratio(g, dq)
    w = dephasing.current_noise_ratio_from_spectrum(White(A), dq)
    f = dephasing.current_noise_ratio_from_spectrum(Flicker.from_params(K, p), dq)
    spread = (max(closed, w, f) - min(closed, w, f)) / min(closed, w, f)
    c = 4
    return [
        Check(c, "A bound", A, "2.9e-6 +-5%", _rel(A, 2.9e-6, 0.05), f"Gamma = {g:.4g} 1/s"),
        Check(c, "K bound", K, "0.7e-13 +-10%", _rel(K, 0.7e-13, 0.10)),
        Check(c, "dI/I closed form", closed, "1.3e-8 +-10%", _rel(closed, 1.3e-8, 0.10)),
        Check(c, "dI/I white route", w, "1.3e-8 +-10%", _rel(w, 1.3e-8, 0.10)),
        Check(c, "dI/I flicker route", f, "1.3e-8 +-10%", _rel(f, 1.3e-8, 0.10)),
        Check(c, "dI/I route spread", spread, "< 5%", spread < 0.05),
    ]


def criterion_5():
    wfit = sweeps.amplitude_fit("white", 20e-6)
    ffit = sweeps.amplitude_fit("flicker", 20e-6)
    ds = (10e-6, 20e-6, 40e-6, 80e-6)
    wd = sweeps.intercept_vs_distance("white", ds).fit
    fd = sweeps.intercept_vs_distance("flicker", ds).fit
    c = 5
    return [
        Check(c, "white slope", wfit.slope, "2.00 +-0.01", abs(wfit.slope - 2) <= 0.01),
        Check(c, "white intercept", wfit.intercept, "13.274 +-0.02", abs(wfit.intercept - 13.274) <= 0.02),
        Check(c, "flicker slope", ffit.slope, "1.00 +-0.01", abs(ffit.slope - 1) <= 0.01),
        Check(c, "flicker intercept", ffit.intercept, "15.363 +-0.02", abs(ffit.intercept - 15.363) <= 0.02),
        Check(c, "white c(d) slope", wd.slope, "6.00 +-0.05", abs(wd.slope - 6) <= 0.05),
        Check(c, "flicker c(d) slope", fd.slope, "6.00 +-0.05", abs(fd.slope - 6) <= 0.05),
        Check(c, "white c(d) offset", wd.intercept, "41.47 +-0.05", abs(wd.intercept - 41.47) <= 0.05),
        Check(c, "flicker c(d) offset", fd.intercept, "43.56 +-0.05", abs(fd.intercept - 43.56) <= 0.05),
    ]


def criterion_6(M: int = 1000, seed: int = 11):
    p, dq, g, A, _ = _setup()
    grid = SimulationGrid.for_loops(dq, 256, 64, seed=seed)
    t0 = time.perf_counter()
    r = stochastic.phase_variance_mc(White(A), dq, p, M, grid, xi_min=1.0)
    dt = time.perf_counter() - t0
    analytic = dephasing.gamma(White(A), dq).gamma
    z = (r.gamma - analytic) / r.se_gamma
    return [
        Check(
            6,
            "MC 2 pi Var(dphi) vs analytic Gamma",
            r.gamma,
            f"{analytic:.4g} within 3 SE, < 60 s",
            abs(z) <= 3 and dt < 60,
            f"SE {r.se_gamma:.3g}, z = {z:+.2f}, {dt:.1f} s; Var/T_exp = {r.rate:.4g}",
        )
    ]


def criterion_7(seeds: int = 20):
    p, dq, _, A, K = _setup()
    # trapezoid oracle needs the noise band well below Nyquist
    grid = SimulationGrid.for_loops(dq, 1024, 4, seed=7)
    one = grid.t <= dq.T_exp * (1 + 1e-9)
    out = []
    for spec in (White(A), Flicker.from_params(K, p)):
        worst = 0.0
        for s in range(seeds):
            real = stochastic.synthesize_noise(spec, grid, s, omega_max=16 * dq.omega0)
            for arm in (Arm.R, Arm.L):
                a = stochastic.deviation_freq(real, dq, p, arm)
                b = stochastic.deviation_time_oracle(real, dq, p, arm)
                worst = max(
                    worst,
                    stochastic.relative_l2(a.dx[one], b.dx[one]),
                    stochastic.relative_l2(a.dp[one], b.dp[one]),
                )
        name = f"{type(spec).__name__.lower()} freq vs time max rel. L2"
        out.append(Check(7, name, worst, f"< 1e-3 over {seeds} seeds", worst < 1e-3))
    return out


def criterion_8(M: int = 200, seed: int = 1):
    p, dq, _, A, K = _setup()
    grid = SimulationGrid(n=16384, dt=dq.T_exp / 256, seed=seed)
    nper = 1024
    fl = Flicker.from_params(K, p)
    paths = np.array([stochastic.synthesize_noise(fl, grid, i).values for i in range(M)])
    w, S = stochastic.estimate_psd(paths, grid.dt, nper)
    sel = slice(4, 401)  # two decades of Welch bins
    fit = sweeps.loglog_fit((w[sel], S[sel]))
    paths = np.array([stochastic.synthesize_noise(White(A), grid, i).values for i in range(M)])
    w, S = stochastic.estimate_psd(paths, grid.dt, nper)
    dev = float(np.max(np.abs(S[4:401] / A**2 - 1)))
    return [
        Check(8, "flicker periodogram slope", fit.slope, "-1.0 +-0.1 over two decades", abs(fit.slope + 1) <= 0.1),
        Check(8, "white periodogram max |S/A^2 - 1|", dev, "< 0.10 per bin", dev < 0.10),
    ]


def criterion_9(seed: int = 0, M: int = 500):
    p, dq, _, A, K = _setup()
    grid = SimulationGrid.for_loops(dq, 256, 8, seed=seed)
    wmin = dq.omega0
    one = grid.t <= dq.T_exp * (1 + 1e-9)
    out = []
    for spec in (White(A), Flicker.from_params(K, p)):
        real = stochastic.synthesize_noise(spec, grid, 0, omega_min=wmin)
        dev = stochastic.deviations(real, dq, p)
        c = stochastic.contrast_single(dev, dq, dq.T_exp)
        mx = float(np.max(np.abs(dev.delta_x[one])))
        nm = type(spec).__name__.lower()
        out.append(Check(9, f"{nm} single-run contrast", c.contrast, ">= 0.99", c.contrast >= 0.99))
        out.append(Check(9, f"{nm} max |dx_R - dx_L| [m]", mx, "<= 1e-16", mx <= 1e-16))
        e = stochastic.contrast_ensemble(spec, dq, p, M, dq.T_exp, grid)
        out.append(Check(9, f"{nm} ensemble contrast (M={M})", e.contrast, ">= 0.99", e.contrast >= 0.99))
    return out


def criterion_10(M: int = 500, seed: int = 0):
    """Excluded numbers, replaced by formula-level checks."""
    p, dq, _, A, K = _setup()
    C = dephasing.nb_material_constant(0.7e-13, MaterialParams(7.85e-11, 4.2))
    ok_c = _rel(C, 0.7e-13 * 7.85e-11 / 4.2**2, 1e-12)
    grid = SimulationGrid.for_loops(dq, 256, 8, seed=seed)
    e = stochastic.contrast_ensemble(White(A), dq, p, M, dq.T_exp, grid)
    z = (e.mean_dx2 - e.dx2_closed_form) / e.se_dx2
    return [
        Check(10, "C = K*area/T^2 [m^2/K^2]", C, "formula (quoted 0.3e-23 not reproducible)", ok_c),
        Check(
            10,
            "<Dx^2(T)> MC vs closed form [m^2]",
            e.mean_dx2,
            f"{e.dx2_closed_form:.4g} within 3 SE (quoted 4e-70 not reproducible)",
            abs(z) <= 3,
            f"z = {z:+.2f}",
        ),
        Check(
            10,
            "2 hbar gamma_e |eta0| / omega0 [kg m/s]",
            e.dp_amplitude,
            "equals quoted <Dp^2(T)> 5.25e-22 numerically",
            _rel(e.dp_amplitude, 5.25e-22, 0.01),
            f"literal <Dp^2(T)> = {e.mean_dp2:.3g}",
        ),
    ]


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run_all(which=None):
    out = []
    for k, fn in CRITERIA.items():
        if which is None or k in which:
            out.extend(fn())
    return out


# quoted numbers that are reported next to the computed ones
QUOTED = {
    "white_bound_1e4_runs": 0.7e-6,
    "flicker_bound_1e4_runs": 0.04e-13,
    "material_constant": 0.3e-23,
    "dx2_T": 4e-70,
    "dp2_T": 5.25e-22,
}


def run_count_variants():
    """Bounds with xi_min = 1e-4 (10^4 repeated loops) at the same target Gamma."""
    p, dq, g, *_ = _setup()
    cfg = IntegrationConfig(xi_min=1e-4)
    A = dephasing.bound_white(g, dq, cfg=cfg)
    K = dephasing.bound_flicker(g, dq, Flicker.from_params(1.0, p), cfg=cfg)
    return {"A": A, "K": K}
