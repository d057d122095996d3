"""Noise realizations, trajectory deviations and contrast.

Noise is synthesized in the frequency domain on a periodic grid whose length
is a whole number of trap periods, so omega0 sits exactly on a bin. With that
choice the sampled path is a trigonometric polynomial, and ``deviation_freq``
solves the driven oscillator for it exactly: every forcing line off
resonance gets the usual 1/(omega^2 - omega0^2) response, and the two lines
at +-omega0 get their secular t*e^{+-i omega0 t} solution. A homogeneous
term then puts the deviation at rest at t = 0.

PSD convention: E[d_eta(t) d_eta(t')] = int S(omega) e^{i omega (t-t')} domega / 2pi
over the whole real line, so white noise of amplitude A has correlator
A^2 delta(t - t').
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, signal

from .dephasing import GenericNoiseCoupling
from .physics import (
    Arm,
    DerivedQuantities,
    ExperimentParams,
    classical_trajectory,
)
from .spectra import NoiseSpectrum, evaluate_psd

MIN_SAMPLES_PER_LOOP = 64


@dataclass(frozen=True)
class SimulationGrid:
    n: int  # samples, power of two
    dt: float  # s
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 4 or self.n & (self.n - 1):
            raise ValueError("grid: n must be a power of two >= 4")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("grid: dt must be > 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("grid: seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def for_loops(cls, dq: DerivedQuantities, samples_per_loop: int = 256, loops: int = 8, seed: int = 0):
        """Grid spanning ``loops`` trap periods; both counts must be powers of two."""
        return cls(n=samples_per_loop * loops, dt=dq.T_exp / samples_per_loop, seed=seed)

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.n) * self.dt

    @property
    def length(self) -> float:
        return self.n * self.dt

    @property
    def omega(self) -> np.ndarray:
        """Non-negative rfft bin frequencies (rad/s)."""
        return 2 * math.pi * np.fft.rfftfreq(self.n, self.dt)

    def loops(self, dq: DerivedQuantities) -> int:
        """Whole trap periods covered by the grid; raises if not an integer."""
        k = self.length / dq.T_exp
        kr = round(k)
        if kr < 1 or abs(k - kr) > 1e-6 * max(k, 1):
            raise ValueError(
                f"grid length {self.length:.6g} s is not a whole number of trap periods "
                f"(T_exp = {dq.T_exp:.6g} s)"
            )
        return kr

    def samples_per_loop(self, dq: DerivedQuantities) -> int:
        return self.n // self.loops(dq)

    def check(self, dq: DerivedQuantities) -> None:
        if self.dt > dq.T_exp / MIN_SAMPLES_PER_LOOP * (1 + 1e-12):
            raise ValueError(
                f"grid: dt = {self.dt:.3g} s gives fewer than {MIN_SAMPLES_PER_LOOP} samples per trap period"
            )
        if self.length < dq.T_exp * (1 - 1e-12):
            raise ValueError("grid: n*dt shorter than T_exp")
        self.loops(dq)


@dataclass(frozen=True)
class NoiseRealization:
    values: np.ndarray  # d_eta(t_k), T/m
    coefficients: np.ndarray  # rfft of values
    grid: SimulationGrid
    seed: int
    index: int = 0

    @classmethod
    def from_values(cls, values, grid: SimulationGrid, seed: int = 0, index: int = 0):
        v = np.asarray(values, dtype=float)
        if v.shape != (grid.n,):
            raise ValueError(f"values must have shape ({grid.n},)")
        return cls(v, np.fft.rfft(v), grid, seed, index)

    @property
    def t(self):
        return self.grid.t


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def synthesize_noise(
    spec: NoiseSpectrum,
    grid: SimulationGrid,
    index: int = 0,
    omega_min: float = 0.0,
    omega_max: float | None = None,
) -> NoiseRealization:
    """Gaussian path with PSD ``spec`` by weighting complex normal bins with sqrt(S).

    DC and Nyquist bins are always zero. Bins outside [omega_min, omega_max]
    are zero as well; a bin centred on a band edge keeps half its power so the
    discrete sum tracks the integral from the edge.
    """
    n, dt = grid.n, grid.dt
    w = grid.omega
    rng = _rng(grid.seed, index)
    z = (rng.standard_normal(w.size) + 1j * rng.standard_normal(w.size)) / math.sqrt(2)
    weight = np.ones(w.size)
    weight[0] = weight[-1] = 0.0
    dw = w[1]
    hi = omega_max if omega_max is not None else np.inf
    tol = 1e-9 * dw
    weight[w < omega_min - tol] = 0.0
    weight[w > hi + tol] = 0.0
    weight[np.abs(w - omega_min) <= tol] *= 0.5
    if np.isfinite(hi):
        weight[np.abs(w - hi) <= tol] *= 0.5
    live = weight > 0
    S = np.zeros(w.size)
    if np.any(live):
        S[live] = evaluate_psd(spec, w[live])
    X = np.sqrt(weight * S * n / dt) * z
    values = np.fft.irfft(X, n)
    return NoiseRealization(values, X, grid, grid.seed, index)


def estimate_psd(paths, dt: float, nperseg: int = 1024):
    """Welch-averaged PSD over realizations, in this module's convention.

    Returns (omega, S). scipy's one-sided density in Hz is twice S(omega).
    """
    paths = np.atleast_2d(np.asarray(paths, dtype=float))
    nperseg = min(nperseg, paths.shape[1])
    f, P = signal.welch(paths, fs=1 / dt, nperseg=nperseg, detrend=False, axis=-1)
    return 2 * math.pi * f, P.mean(axis=0) / 2


# -- deviations ---------------------------------------------------------------


@dataclass(frozen=True)
class ArmDeviation:
    arm: Arm
    t: np.ndarray
    dx: np.ndarray  # m
    dp: np.ndarray  # kg m/s


@dataclass(frozen=True)
class TrajectoryDeviation:
    t: np.ndarray
    dx_R: np.ndarray
    dx_L: np.ndarray
    dp_R: np.ndarray
    dp_L: np.ndarray

    @classmethod
    def from_arms(cls, r: ArmDeviation, l: ArmDeviation):
        if Arm(r.arm) is not Arm.R or Arm(l.arm) is not Arm.L:
            raise ValueError("expected (R, L) arm deviations")
        return cls(r.t, r.dx, l.dx, r.dp, l.dp)

    @property
    def delta_x(self):
        return self.dx_R - self.dx_L

    @property
    def delta_p(self):
        return self.dp_R - self.dp_L


def _unit_response_freq(real: NoiseRealization, omega0: float):
    """Exact response of x'' + omega0^2 x = -eta(t)(2 cos omega0 t - 1), x(0) = x'(0) = 0.

    ``eta`` is the trigonometric interpolant of the sampled path.
    """
    grid = real.grid
    n = grid.n
    L = grid.length
    kf = omega0 * L / (2 * math.pi)
    k = int(round(kf))
    if k < 1 or abs(kf - k) > 1e-6 * kf:
        raise ValueError("grid length must be a whole number of trap periods")
    t = grid.t
    c = np.fft.fft(real.values) / n
    # signed coefficients m = -n/2 .. n/2, Nyquist split evenly for a real interpolant
    h = n // 2
    cs = np.concatenate([c[h:], c[:h], [0.0]]).astype(complex)
    cs[0] *= 0.5
    cs[-1] = cs[0]
    # forcing lines q = -h-k .. h+k
    f = np.zeros(n + 1 + 2 * k, dtype=complex)
    f[2 * k :] += cs  # c_m e^{i(m+k)}
    f[: n + 1] += cs  # c_m e^{i(m-k)}
    f[k : k + n + 1] -= cs
    q = np.arange(-h - k, h + k + 1)
    wq = 2 * math.pi * q / L
    res = np.abs(q) == k
    xq = np.zeros_like(f)
    xq[~res] = f[~res] / (wq[~res] ** 2 - omega0**2)
    vq = 1j * wq * xq
    X = np.zeros(n, dtype=complex)
    V = np.zeros(n, dtype=complex)
    np.add.at(X, q % n, xq)
    np.add.at(V, q % n, vq)
    x = n * np.fft.ifft(X)
    v = n * np.fft.ifft(V)
    x0, v0 = xq.sum(), vq.sum()
    for sgn in (1, -1):
        a = -f[q == sgn * k][0]
        den = sgn * 2j * omega0
        e = np.exp(sgn * 1j * omega0 * t)
        x = x + a * t * e / den
        v = v + a * (1 + sgn * 1j * omega0 * t) * e / den
        v0 = v0 + a / den
    cw, sw = np.cos(omega0 * t), np.sin(omega0 * t)
    x = x - x0 * cw - (v0 / omega0) * sw
    v = v + x0 * omega0 * sw - v0 * cw
    scale = max(np.abs(x).max(), 1e-300)
    if np.abs(x.imag).max() > 1e-8 * scale:
        raise FloatingPointError("frequency solver produced a complex deviation")
    return x.real, v.real


def deviation_freq(real: NoiseRealization, dq: DerivedQuantities, params: ExperimentParams, arm: Arm) -> ArmDeviation:
    """delta x_j, delta p_j from the frequency-domain solution of the driven oscillator."""
    real.grid.check(dq)
    ux, uv = _unit_response_freq(real, dq.omega0)
    C = dq.C(arm)
    return ArmDeviation(Arm(arm), real.t, C / params.m * ux, C * uv)


def deviation_time_oracle(real: NoiseRealization, dq: DerivedQuantities, params: ExperimentParams, arm: Arm) -> ArmDeviation:
    """Green's-function convolution by cumulative trapezoid quadrature.

    delta x(t) = -(C/(m w0)) int_0^t (2 cos w0 t' - 1) sin(w0 (t - t')) d_eta(t') dt'
    """
    real.grid.check(dq)
    t, w0 = real.t, dq.omega0
    cw, sw = np.cos(w0 * t), np.sin(w0 * t)
    g = (2 * cw - 1) * real.values
    P = integrate.cumulative_trapezoid(g * cw, t, initial=0.0)
    Q = integrate.cumulative_trapezoid(g * sw, t, initial=0.0)
    C = dq.C(arm)
    dx = -(C / (params.m * w0)) * (sw * P - cw * Q)
    dp = -C * (cw * P + sw * Q)
    return ArmDeviation(Arm(arm), t, dx, dp)


def deviations(real: NoiseRealization, dq, params, method: str = "freq") -> TrajectoryDeviation:
    if method == "freq":
        real.grid.check(dq)
        ux, uv = _unit_response_freq(real, dq.omega0)
        m = params.m
        return TrajectoryDeviation(real.t, dq.C_R / m * ux, dq.C_L / m * ux, dq.C_R * uv, dq.C_L * uv)
    if method == "time":
        return TrajectoryDeviation.from_arms(
            deviation_time_oracle(real, dq, params, Arm.R),
            deviation_time_oracle(real, dq, params, Arm.L),
        )
    raise ValueError("method must be 'freq' or 'time'")


def quasi_static_deviation(c: float, dq: DerivedQuantities, params: ExperimentParams, arm: Arm, t):
    """Closed-form delta x_j for a constant gradient offset d_eta = c."""
    t = np.asarray(t, dtype=float)
    w0, C, m = dq.omega0, dq.C(arm), params.m
    return C * c / (m * w0**2) * (1 - np.cos(w0 * t)) - C * c / (m * w0) * t * np.sin(w0 * t)


def relative_l2(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    nb = np.linalg.norm(b)
    if nb == 0:
        return float(np.linalg.norm(a))
    return float(np.linalg.norm(a - b) / nb)


# -- contrast -----------------------------------------------------------------


@dataclass(frozen=True)
class ContrastResult:
    contrast: float
    dx_final: float  # m
    dp_final: float  # kg m/s
    t: float


def deterministic_dp(dq: DerivedQuantities, t):
    """Momentum splitting of the unperturbed arms, -(2 hbar gamma_e eta0/omega0) sin(omega0 t)."""
    p = dq.params
    return -(2 * p.hbar * p.gamma_e * dq.eta0 / dq.omega0) * np.sin(dq.omega0 * np.asarray(t, float))


def _contrast(dx, dp, dq) -> float:
    return math.exp(-0.5 * ((dx / dq.sigma_x) ** 2 + (dp / dq.sigma_p) ** 2))


def _grid_index(t_grid, t) -> int:
    dt = t_grid[1] - t_grid[0]
    i = int(round(t / dt))
    if not 0 <= i < t_grid.size or abs(t_grid[i] - t) > 1e-6 * dt:
        raise ValueError(f"t = {t:g} s is not on the simulation grid")
    return i


def contrast_single(dev: TrajectoryDeviation, dq: DerivedQuantities, t: float) -> ContrastResult:
    i = _grid_index(dev.t, t)
    dx = float(dev.dx_R[i] - dev.dx_L[i])
    dp = float(dev.dp_R[i] - dev.dp_L[i] + deterministic_dp(dq, t))
    return ContrastResult(_contrast(dx, dp, dq), dx, dp, float(t))


@dataclass(frozen=True)
class EnsembleContrast:
    contrast: float  # from the MC moments
    mean_dx2: float
    se_dx2: float
    mean_dp2: float
    se_dp2: float
    dx2_closed_form: float  # white noise only, else nan
    contrast_closed_form: float
    dp_amplitude: float  # 2 hbar gamma_e |eta0| / omega0
    t: float
    M: int


def white_dx2_closed_form(A: float, dq: DerivedQuantities, t: float | None = None) -> float:
    """<Delta x^2(T)> = (2 hbar gamma_e A/(m omega0))^2 T for white noise at T = T_exp."""
    p = dq.params
    T = dq.T_exp if t is None else t
    return (2 * p.hbar * p.gamma_e * A / (p.m * dq.omega0)) ** 2 * T


def contrast_ensemble(
    spec: NoiseSpectrum,
    dq: DerivedQuantities,
    params: ExperimentParams,
    M: int,
    t: float,
    grid: SimulationGrid,
    omega_min: float = 0.0,
) -> EnsembleContrast:
    if M < 2:
        raise ValueError("M must be >= 2")
    grid.check(dq)
    i = _grid_index(grid.t, t)
    dx = np.empty(M)
    dp = np.empty(M)
    for j in range(M):
        real = synthesize_noise(spec, grid, j, omega_min=omega_min)
        ux, uv = _unit_response_freq(real, dq.omega0)
        dx[j] = (dq.C_R - dq.C_L) / params.m * ux[i]
        dp[j] = (dq.C_R - dq.C_L) * uv[i]
    dp_tot = dp + deterministic_dp(dq, t)
    mdx2, mdp2 = float(np.mean(dx**2)), float(np.mean(dp_tot**2))
    se = lambda a: float(np.std(a, ddof=1) / math.sqrt(M))
    C = math.exp(-0.5 * (mdx2 / dq.sigma_x**2 + mdp2 / dq.sigma_p**2))
    A = getattr(spec, "A", None)
    if A is not None:
        cf = white_dx2_closed_form(A, dq, t)
        dpd = float(deterministic_dp(dq, t)) ** 2
        ccf = math.exp(-0.5 * (cf / dq.sigma_x**2 + dpd / dq.sigma_p**2))
    else:
        cf, ccf = float("nan"), float("nan")
    p = params
    return EnsembleContrast(
        contrast=C,
        mean_dx2=mdx2,
        se_dx2=se(dx**2),
        mean_dp2=mdp2,
        se_dp2=se(dp_tot**2),
        dx2_closed_form=cf,
        contrast_closed_form=ccf,
        dp_amplitude=2 * p.hbar * p.gamma_e * abs(dq.eta0) / dq.omega0,
        t=float(t),
        M=M,
    )


# -- Monte-Carlo phase variance -------------------------------------------------


@dataclass(frozen=True)
class PhaseVarianceResult:
    variance: float  # Var(delta phi) over one loop
    se_variance: float
    rate: float  # variance / T_exp
    gamma: float  # 2 pi * variance, the normalisation of the analytic Gamma
    se_gamma: float
    M: int


def phase_kernel(dq: DerivedQuantities, params: ExperimentParams, t) -> np.ndarray:
    """y(t) with delta phi = -(1/hbar) int y(t) d_eta(t) dt along the unperturbed arms."""
    xR = classical_trajectory(dq, params, Arm.R, t)
    xL = classical_trajectory(dq, params, Arm.L, t)
    return GenericNoiseCoupling.stern_gerlach(params, dq).integrand(xR, xL)


def phase_variance_mc(
    spec: NoiseSpectrum,
    dq: DerivedQuantities,
    params: ExperimentParams,
    M: int,
    grid: SimulationGrid,
    xi_min: float = 1.0,
) -> PhaseVarianceResult:
    """Var(delta phi) over the first loop from M synthesized paths.

    Noise below xi_min * omega0 is removed before integrating, matching the
    lower cutoff of the analytic rate.
    """
    if M < 100:
        raise ValueError("M must be >= 100")
    grid.check(dq)
    spl = grid.samples_per_loop(dq)
    t = grid.t[: spl + 1]
    w = np.full(t.size, grid.dt)
    w[0] = w[-1] = grid.dt / 2
    kern = -phase_kernel(dq, params, t) * w / params.hbar
    phi = np.empty(M)
    for j in range(M):
        real = synthesize_noise(spec, grid, j, omega_min=xi_min * dq.omega0)
        phi[j] = kern @ real.values[: spl + 1]
    var = float(np.var(phi, ddof=1))
    # Var of a sample variance of Gaussian data: 2 sigma^4/(M-1)
    se = var * math.sqrt(2 / (M - 1))
    return PhaseVarianceResult(
        variance=var,
        se_variance=se,
        rate=var / dq.T_exp,
        gamma=2 * math.pi * var,
        se_gamma=2 * math.pi * se,
        M=M,
    )


# -- export -------------------------------------------------------------------


def write_trace_csv(path, real: NoiseRealization, dev: TrajectoryDeviation) -> None:
    cols = [real.t, real.values, dev.dx_R, dev.dx_L, dev.dp_R, dev.dp_L]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "delta_eta", "dx_R", "dx_L", "dp_R", "dp_L"])
        for row in zip(*cols):
            w.writerow([f"{v:.8e}" for v in row])
