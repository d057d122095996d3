"""Dimensionless transfer functions weighting the noise PSD.

``f_ho`` is the one-loop harmonic-oscillator response, with the apparent
poles at xi = 1, 2 removed exactly by writing sin(pi xi)/(xi - k) as
pi * sinc(xi - k). ``f_dev`` is the Fourier-domain trajectory-deviation
response as it is usually quoted; it has a genuine double pole at xi = 1.
``f_dev_loop`` is the same deviation channel evaluated over a finite single
loop, which is finite everywhere and decays like xi^-4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

TWO_PI = 2 * math.pi


class DivergenceError(ValueError):
    pass


class AliasingError(ValueError):
    pass


class TransferKind(str, Enum):
    HO = "ho"
    DEV = "dev"
    DEV_LOOP = "dev_loop"


def _abs_nonzero(xi):
    x = np.abs(np.asarray(xi, dtype=float))
    if np.any(x == 0):
        raise DivergenceError("transfer function divergent at DC (xi = 0)")
    return x


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def f_ho(xi):
    x = _abs_nonzero(xi)
    amp = np.empty(x.shape)
    # sin(pi x)/(x - k) = (-1)^k pi sinc(x - k); the sign drops out on squaring.
    # Below 1/2 the pole at 0 is the one to cancel, which also keeps the
    # relative precision of sin(pi x) for tiny x.
    lo = x < 0.5
    xl = x[lo]
    amp[lo] = math.pi * np.sinc(xl) * (xl * xl + 2) / ((xl * xl - 4) * (xl * xl - 1))
    hi = ~lo
    xh = x[hi]
    k = np.where(xh < 1.5, 1.0, 2.0)
    other = 3.0 - k
    amp[hi] = math.pi * np.sinc(xh - k) * (xh * xh + 2) / (xh * (xh + 2) * (xh + 1) * (xh - other))
    return _out(amp * amp)


def _reduce(x):
    # sin^2(pi x) and cos(2 pi x) have period 1; reducing first keeps the
    # argument small so large xi does not lose digits to pi * x rounding
    return x - np.round(x)


def f_ho_bracket_form(xi):
    """sin^2(pi xi) [1/(2xi) + xi/(2(xi^2-4)) - xi/(xi^2-1)]^2, evaluated naively."""
    x = np.asarray(xi, dtype=float)
    b = 1 / (2 * x) + x / (2 * (x * x - 4)) - x / (x * x - 1)
    return _out(np.sin(math.pi * _reduce(x)) ** 2 * b * b)


def f_ho_cosine_form(xi):
    """(1 - cos 2 pi xi)/2 [(xi^2+2)/(xi(xi^2-4)(xi^2-1))]^2, evaluated naively."""
    x = np.asarray(xi, dtype=float)
    r = (x * x + 2) / (x * (x * x - 4) * (x * x - 1))
    return _out((1 - np.cos(TWO_PI * _reduce(x))) / 2 * r * r)


def f_dev(xi):
    """Fourier-domain deviation response.

    Removable at xi = 2 (limit pi^2/36). At xi = 1 it behaves like
    pi^2 / (16 (xi - 1)^2), which is not integrable; evaluating exactly
    there raises DivergenceError.
    """
    x = _abs_nonzero(xi)
    if np.any(x == 1.0):
        raise DivergenceError("f_dev has a non-removable double pole at xi = 1")
    amp = np.sin(math.pi * x) * (1 / x - x / (x * x - 1)) + math.pi * np.sinc(x - 2) * x / (x + 2)
    return _out(amp * amp / (1 - x * x) ** 2)


def _ramp_transform(b):
    """G(b) = int_0^{2pi} (2pi - s) e^{i b s} ds."""
    b = np.asarray(b, dtype=float)
    z = TWO_PI * b
    out = np.empty(b.shape, dtype=complex)
    small = np.abs(z) < 0.5
    zs = z[small]
    # -(2pi)^2 sum_{n>=2} i^n z^(n-2) / n!
    acc = np.zeros(zs.shape, dtype=complex)
    for n in range(2, 24):
        acc += (1j**n) * zs ** (n - 2) / math.factorial(n)
    out[small] = -(TWO_PI**2) * acc
    zb, bb = z[~small], b[~small]
    out[~small] = (1 + 1j * zb - np.exp(1j * zb)) / bb**2
    return out


def dev_loop_amplitude(xi):
    """Complex J(xi) = int_0^{2pi} (2pi - s)(2 cos s - 1) sin s / 2 * e^{i xi s} ds."""
    x = np.asarray(xi, dtype=float)
    G = _ramp_transform
    s2 = (G(x + 2) - G(x - 2)) / 2j
    s1 = (G(x + 1) - G(x - 1)) / 2j
    return 0.5 * (s2 - s1)


def f_dev_loop(xi):
    x = _abs_nonzero(xi)
    j = dev_loop_amplitude(x)
    return _out(np.abs(j) ** 2 / 4)


def evaluate(kind: TransferKind, xi):
    kind = TransferKind(kind)
    if kind is TransferKind.HO:
        return f_ho(xi)
    if kind is TransferKind.DEV:
        return f_dev(xi)
    return f_dev_loop(xi)


# envelopes F(xi) <= c / xi^p valid for xi >= 10, used for the quadrature
# tail estimate; c tends to 1, 1 and pi^2/4 as xi grows
DECAY = {
    TransferKind.HO: (6, 1.14),
    TransferKind.DEV: (6, 1.08),
    TransferKind.DEV_LOOP: (4, 2.97),
}


@dataclass(frozen=True)
class NumericTransfer:
    """Transfer function built from sampled arm trajectories.

    ``mode`` picks x_R - x_L ("difference") or x_R + x_L ("sum"); ``power``
    squares the positions first ("quadratic").
    """

    t: np.ndarray
    x_R: np.ndarray
    x_L: np.ndarray
    mode: str = "difference"
    power: str = "linear"
    window: tuple | None = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or t.size < 3 or np.any(np.diff(t) <= 0):
            raise ValueError("t must be a strictly increasing 1-d grid")
        if np.shape(self.x_R) != t.shape or np.shape(self.x_L) != t.shape:
            raise ValueError("trajectories must be sampled on the time grid")
        if self.mode not in ("difference", "sum"):
            raise ValueError("mode must be 'difference' or 'sum'")
        if self.power not in ("linear", "quadratic"):
            raise ValueError("power must be 'linear' or 'quadratic'")
        ti, tf = self.window if self.window is not None else (t[0], t[-1])
        if not tf > ti:
            raise ValueError("window must satisfy t_f > t_i")
        object.__setattr__(self, "window", (float(ti), float(tf)))

    def signal(self):
        """(t, y) restricted to the window."""
        t = np.asarray(self.t, dtype=float)
        ti, tf = self.window
        tol = 1e-9 * (t[-1] - t[0])
        sel = (t >= ti - tol) & (t <= tf + tol)
        xr, xl = np.asarray(self.x_R, float)[sel], np.asarray(self.x_L, float)[sel]
        if self.power == "quadratic":
            xr, xl = xr**2, xl**2
        y = xr - xl if self.mode == "difference" else xr + xl
        return t[sel], y


def fourier_amplitude(t, y, omega, min_samples_per_period: int = 16):
    """Trapezoid estimate of int y(t) e^{i omega t} dt on a uniform grid."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0):
        raise ValueError("trajectory grid must be uniform")
    h = dt[0]
    bad = np.abs(omega) * h > TWO_PI / min_samples_per_period
    if np.any(bad):
        w = float(np.abs(omega[bad]).max())
        raise AliasingError(
            f"omega = {w:.6g} rad/s under-resolved: fewer than "
            f"{min_samples_per_period} samples per period"
        )
    wts = np.full(t.shape, h)
    wts[0] = wts[-1] = h / 2
    yw = y * wts
    out = np.empty(omega.shape, dtype=complex)
    chunk = max(1, 2_000_000 // max(t.size, 1))
    for i in range(0, omega.size, chunk):
        w = omega[i : i + chunk]
        out[i : i + chunk] = np.exp(1j * np.outer(w, t)) @ yw
    return out


def numeric_transfer(kind: NumericTransfer, omega):
    t, y = kind.signal()
    out = np.abs(fourier_amplitude(t, y, omega)) ** 2
    return float(out[0]) if np.ndim(omega) == 0 else out
