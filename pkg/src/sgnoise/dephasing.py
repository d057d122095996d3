"""Dephasing rates from a noise PSD and a transfer function, and the inverse bounds.

Rates follow

    Gamma = (8 H^2 / omega0^5) * int_{xi_min}^inf S(xi) F(xi) dxi

with the integral done by Gauss-Kronrod panels (scipy ``quad``) that break at
every integer xi up to 20, where the integrand's oscillation has its nodes.
The part above ``xi_max`` is not integrated; an envelope estimate of it is
reported as ``tail_estimate``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import transfer
from .physics import DerivedQuantities, ExperimentParams
from .spectra import Custom, Flicker, NoiseSpectrum, normalize
from .transfer import DECAY, DivergenceError, TransferKind, fourier_amplitude


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegrationConfig:
    xi_min: float = 1.0
    xi_max: float = 1.0e4
    rel_tol: float = 1.0e-6

    def __post_init__(self):
        if not 0 <= self.xi_min < self.xi_max:
            raise ValueError("integration: need 0 <= xi_min < xi_max")
        if not self.rel_tol > 0:
            raise ValueError("integration: rel_tol must be > 0")


@dataclass(frozen=True)
class DephasingResult:
    gamma: float  # s^-1
    coherence: float  # exp(-gamma * T_exp)
    integral_value: float  # int S F dxi over [xi_min, xi_max]
    tail_estimate: float  # envelope estimate of the integral beyond xi_max
    abs_error: float
    prefactor: float  # 8 H^2 / omega0^5
    xi_min: float
    xi_max: float
    panels: int
    worst_panel: tuple = field(default=(0.0, 0.0))


def prefactor(dq: DerivedQuantities) -> float:
    return 8 * dq.H**2 / dq.omega0**5


def coherence(gamma: float, t: float) -> float:
    if gamma < 0 or t < 0:
        raise ValueError("coherence: gamma and t must be >= 0")
    return math.exp(-gamma * t)


def _breakpoints(xi_min: float, xi_max: float) -> list[float]:
    pts = {xi_min, xi_max}
    if xi_min < 1:
        lo = max(xi_min, 1e-12)
        k = math.floor(math.log10(lo)) + 1
        while 10.0**k < 1:
            pts.add(10.0**k)
            k += 1
        if xi_min == 0:
            pts.add(1e-12)
    pts.update(float(i) for i in range(1, 21))
    x = 40.0
    while x < xi_max:
        pts.add(x)
        x *= 2
    return sorted(p for p in pts if xi_min <= p <= xi_max)


def _integrate(fn, xi_min, xi_max, rel_tol):
    pts = _breakpoints(xi_min, xi_max)
    total, err, worst, worst_err = 0.0, 0.0, (pts[0], pts[0]), -1.0
    for a, b in zip(pts[:-1], pts[1:]):
        epsabs = 1e-3 * rel_tol * abs(total)
        # quad refuses epsrel below ~1e-14; an unreachable request then
        # surfaces as QuadratureError below instead of a scipy ValueError
        epsrel = max(rel_tol / 10, 1e-13)
        val, e, *_ = integrate.quad(
            fn, a, b, epsabs=epsabs, epsrel=epsrel, limit=200, full_output=1
        )
        total += val
        err += e
        if e > worst_err:
            worst, worst_err = (a, b), e
    if err > rel_tol * abs(total) and err > 0:
        raise QuadratureError(
            f"tolerance {rel_tol:g} not met (abs error {err:.3g} on {total:.6g}); "
            f"worst subinterval xi in [{worst[0]:g}, {worst[1]:g}]"
        )
    return total, err, len(pts) - 1, worst


def _effective_range(spec: NoiseSpectrum, dq: DerivedQuantities, cfg: IntegrationConfig):
    xi_min, xi_max = cfg.xi_min, cfg.xi_max
    if isinstance(spec, Custom):
        lo, hi = spec.omega[0] / dq.omega0, spec.omega[-1] / dq.omega0
        if xi_min < lo * (1 - 1e-12):
            raise ValueError(
                f"custom PSD table starts at xi = {lo:.6g}, above xi_min = {xi_min:g}"
            )
        xi_max = min(xi_max, hi)
    if isinstance(spec, Flicker) and spec.alpha >= 1 and xi_min == 0:
        raise DivergenceError("flicker spectrum non-integrable at DC (xi_min = 0)")
    return xi_min, xi_max


def _check_kind_range(kind: TransferKind, xi_min, xi_max):
    if kind is TransferKind.DEV and xi_min <= 1.0 <= xi_max:
        raise DivergenceError(
            "f_dev is non-integrable across xi = 1; use TransferKind.DEV_LOOP"
        )


def _tail(S, kind_list, xi_max):
    s_end = float(S(xi_max))
    est = 0.0
    for kind in kind_list:
        p, c = DECAY[kind]
        est += c / ((p - 1) * xi_max ** (p - 1))
    # (sqrt a + sqrt b)^2 <= 2(a + b)
    return s_end * est * (2.0 if len(kind_list) > 1 else 1.0)


def _result(dq, value, err, tail, xi_min, xi_max, panels, worst) -> DephasingResult:
    pf = prefactor(dq)
    g = pf * value
    return DephasingResult(
        gamma=g,
        coherence=math.exp(-g * dq.T_exp),
        integral_value=value,
        tail_estimate=tail,
        abs_error=err,
        prefactor=pf,
        xi_min=xi_min,
        xi_max=xi_max,
        panels=panels,
        worst_panel=worst,
    )


def gamma(
    spec: NoiseSpectrum,
    dq: DerivedQuantities,
    kind: TransferKind = TransferKind.HO,
    cfg: IntegrationConfig | None = None,
) -> DephasingResult:
    cfg = cfg or IntegrationConfig()
    kind = TransferKind(kind)
    xi_min, xi_max = _effective_range(spec, dq, cfg)
    _check_kind_range(kind, xi_min, xi_max)
    S = normalize(spec, dq)
    F = lambda xi: transfer.evaluate(kind, xi)
    value, err, panels, worst = _integrate(lambda x: S(x) * F(x), xi_min, xi_max, cfg.rel_tol)
    return _result(dq, value, err, _tail(S, [kind], xi_max), xi_min, xi_max, panels, worst)


def gamma_total(
    spec: NoiseSpectrum,
    dq: DerivedQuantities,
    cfg: IntegrationConfig | None = None,
    dev: TransferKind = TransferKind.DEV_LOOP,
) -> DephasingResult:
    """Direct and trajectory-deviation channels, amplitudes added before squaring."""
    cfg = cfg or IntegrationConfig()
    dev = TransferKind(dev)
    xi_min, xi_max = _effective_range(spec, dq, cfg)
    _check_kind_range(dev, xi_min, xi_max)
    S = normalize(spec, dq)

    def integrand(x):
        a = math.sqrt(transfer.f_ho(x)) + math.sqrt(transfer.evaluate(dev, x))
        return S(x) * a * a

    value, err, panels, worst = _integrate(integrand, xi_min, xi_max, cfg.rel_tol)
    tail = _tail(S, [TransferKind.HO, dev], xi_max)
    return _result(dq, value, err, tail, xi_min, xi_max, panels, worst)


def transfer_integral(
    kind: TransferKind = TransferKind.HO,
    alpha: float = 0.0,
    cfg: IntegrationConfig | None = None,
) -> float:
    """int_{xi_min}^{xi_max} F(xi) / xi^alpha dxi."""
    cfg = cfg or IntegrationConfig()
    kind = TransferKind(kind)
    if alpha >= 1 and cfg.xi_min == 0:
        raise DivergenceError("integrand non-integrable at DC (xi_min = 0)")
    _check_kind_range(kind, cfg.xi_min, cfg.xi_max)
    fn = lambda x: transfer.evaluate(kind, x) / x**alpha
    value, *_ = _integrate(fn, cfg.xi_min, cfg.xi_max, cfg.rel_tol)
    return value


# -- inverse problem -------------------------------------------------------


def bound_white(
    gamma_max: float,
    dq: DerivedQuantities,
    integral: float | None = None,
    cfg: IntegrationConfig | None = None,
) -> float:
    """Largest white amplitude A with gamma(White(A)) <= gamma_max.

    ``integral`` defaults to the exact int F_HO over the configured range;
    pass 1.8 to reproduce the rounded published figure.
    """
    if not gamma_max > 0:
        raise ValueError("target must be positive")
    if integral is None:
        integral = transfer_integral(TransferKind.HO, 0.0, cfg)
    return math.sqrt(gamma_max / (prefactor(dq) * integral))


def bound_flicker_ktilde(
    gamma_max: float,
    dq: DerivedQuantities,
    alpha: float = 1.0,
    integral: float | None = None,
    cfg: IntegrationConfig | None = None,
) -> float:
    if not gamma_max > 0:
        raise ValueError("target must be positive")
    if integral is None:
        integral = transfer_integral(TransferKind.HO, alpha, cfg)
    return math.sqrt(gamma_max / (prefactor(dq) * integral))


def bound_flicker(
    gamma_max: float,
    dq: DerivedQuantities,
    spec_template: Flicker,
    integral: float | None = None,
    cfg: IntegrationConfig | None = None,
) -> float:
    """Largest flicker source constant K with gamma(Flicker(K)) <= gamma_max."""
    kt = bound_flicker_ktilde(gamma_max, dq, spec_template.alpha, integral, cfg)
    return kt**2 * dq.omega0**spec_template.alpha / spec_template.source_factor


def current_noise_ratio(gamma_value: float, dq: DerivedQuantities) -> float:
    """delta I / I = sqrt(Gamma/2) omega0^3 / (2 |H eta0|)."""
    if gamma_value < 0:
        raise ValueError("gamma must be >= 0")
    return math.sqrt(gamma_value / 2) * dq.omega0**3 / (2 * abs(dq.H * dq.eta0))


def noise_magnitude(
    spec: NoiseSpectrum, dq: DerivedQuantities, cfg: IntegrationConfig | None = None
) -> float:
    """sqrt(int_{omega_min} S F_HO domega): effective gradient noise in T/m."""
    r = gamma(spec, dq, TransferKind.HO, cfg)
    return math.sqrt(dq.omega0 * r.integral_value)


def current_noise_ratio_from_spectrum(
    spec: NoiseSpectrum, dq: DerivedQuantities, cfg: IntegrationConfig | None = None
) -> float:
    return noise_magnitude(spec, dq, cfg) / abs(dq.eta0)


# -- generic multi-coupling form ----------------------------------------------


@dataclass(frozen=True)
class GenericNoiseCoupling:
    """Noise couplings of L_j = m v^2/2 - A_j x^2 - B_j x - C_j per unit delta eta.

    ``*_n`` multiply the spin-independent part, ``*_s`` the part odd in the
    arm spin.
    """

    D_An: float = 0.0
    D_As: float = 0.0
    D_Bn: float = 0.0
    D_Bs: float = 0.0
    D_CR: float = 0.0
    D_CL: float = 0.0

    def __post_init__(self):
        for k, v in self.__dict__.items():
            if not math.isfinite(v):
                raise ValueError(f"{k} must be finite")

    @classmethod
    def stern_gerlach(cls, params: ExperimentParams, dq: DerivedQuantities):
        """Couplings of the NV Stern-Gerlach Lagrangian to gradient noise."""
        p = params
        return cls(
            D_An=-p.m * p.chi_rho / p.mu0 * dq.eta0,
            D_Bn=-p.chi_rho * p.m * p.B0 / p.mu0,
            D_Bs=p.hbar * p.gamma_e,
        )

    def scaled(self, c: float) -> GenericNoiseCoupling:
        return GenericNoiseCoupling(**{k: c * v for k, v in self.__dict__.items()})

    def integrand(self, x_R, x_L):
        x_R, x_L = np.asarray(x_R, float), np.asarray(x_L, float)
        return (
            self.D_An * (x_R**2 - x_L**2)
            + self.D_As * (x_R**2 + x_L**2)
            + self.D_Bn * (x_R - x_L)
            + self.D_Bs * (x_R + x_L)
            + (self.D_CR - self.D_CL)
        )


def generic_gamma(
    spec: NoiseSpectrum,
    couplings: GenericNoiseCoupling,
    t,
    x_R,
    x_L,
    dq: DerivedQuantities,
    cfg: IntegrationConfig | None = None,
    window: tuple | None = None,
) -> DephasingResult:
    """Gamma = (2/hbar^2) int_{omega_min}^inf S(omega) |int y(t) e^{i omega t} dt|^2 domega.

    y(t) is the coupling-weighted combination of the sampled trajectories; the
    time integral is a trapezoid sum, so the frequency range is clipped where
    the grid drops below 16 samples per period.
    """
    cfg = cfg or IntegrationConfig()
    nt = transfer.NumericTransfer(t, x_R, x_L, window=window)
    tt, _ = nt.signal()
    if tt.size < 3:
        raise ValueError("window holds fewer than three samples")
    sel = np.isin(np.asarray(t, float), tt)
    y = couplings.integrand(np.asarray(x_R)[sel], np.asarray(x_L)[sel])
    hbar = dq.params.hbar
    w0 = dq.omega0
    xi_alias = 2 * math.pi / (16 * (tt[1] - tt[0])) / w0
    xi_min, xi_max = _effective_range(spec, dq, cfg)
    xi_max = min(xi_max, xi_alias)
    if not xi_max > xi_min:
        raise ValueError("time grid too coarse for the requested frequency range")
    S = normalize(spec, dq)
    if not np.any(y):
        return _result(dq, 0.0, 0.0, 0.0, xi_min, xi_max, 0, (xi_min, xi_min))

    def F(x):
        return abs(fourier_amplitude(tt, y, x * w0)[0]) ** 2

    value, err, panels, worst = _integrate(lambda x: S(x) * F(x), xi_min, xi_max, cfg.rel_tol)
    # convert to the (8 H^2/omega0^5) int S F dxi normalisation used elsewhere
    scale = 2 * w0 / hbar**2
    g = scale * value
    tail = float(S(xi_max)) * F(xi_max) * xi_max
    pf = prefactor(dq)
    return DephasingResult(
        gamma=g,
        coherence=math.exp(-g * dq.T_exp),
        integral_value=g / pf if pf else float("nan"),
        tail_estimate=scale * tail / pf if pf else float("nan"),
        abs_error=scale * err,
        prefactor=pf,
        xi_min=xi_min,
        xi_max=xi_max,
        panels=panels,
        worst_panel=worst,
    )


# -- material constant ---------------------------------------------------------


@dataclass(frozen=True)
class MaterialParams:
    area: float  # m^2
    temperature: float  # K

    def __post_init__(self):
        if not (self.area > 0 and self.temperature > 0):
            raise ValueError("area and temperature must be > 0")


def nb_material_constant(K: float, mat: MaterialParams) -> float:
    """C = K * area / T^2 (m^2 K^-2)."""
    return K * mat.area / mat.temperature**2
