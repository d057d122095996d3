"""Power spectral density models for gradient noise.

Angular frequency (rad/s) is the frequency variable everywhere. ``S`` is in
T^2 m^-2 s. Flicker noise is S = mu0 K I^2 / (2 pi d^2) * omega_ref^(alpha-1) / |omega|^alpha.
With the default omega_ref = 1 rad/s this is the plain SI power law and K
carries an extra s^(1 - alpha) when alpha != 1; any other omega_ref keeps K in
its alpha = 1 units and pins the spectra for different alpha together at
omega_ref.
"""
from __future__ import annotations

import csv
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import constants

from .physics import DerivedQuantities, ExperimentParams


class DivergentPSDError(ValueError):
    pass


@dataclass(frozen=True)
class White:
    A: float  # T m^-1 Hz^-1/2

    def __post_init__(self):
        if not self.A >= 0:
            raise ValueError("White: A must be >= 0")

    def psd(self, omega):
        omega = np.asarray(omega, dtype=float)
        return np.full_like(omega, self.A**2)


@dataclass(frozen=True)
class Flicker:
    K: float
    alpha: float
    I: float  # A
    d: float  # m
    mu0: float = constants.mu_0
    omega_ref: float = 1.0  # rad/s

    def __post_init__(self):
        if not self.omega_ref > 0:
            raise ValueError("Flicker: omega_ref must be > 0")
        if not self.K >= 0:
            raise ValueError("Flicker: K must be >= 0")
        if not 0 <= self.alpha <= 2:
            raise ValueError("Flicker: alpha must lie in [0, 2]")
        if not (self.I > 0 and self.d > 0):
            raise ValueError("Flicker: I and d must be positive")

    @classmethod
    def from_params(
        cls, K: float, params: ExperimentParams, alpha: float = 1.0, omega_ref: float = 1.0
    ) -> Flicker:
        return cls(K=K, alpha=alpha, I=params.I, d=params.d, mu0=params.mu0, omega_ref=omega_ref)

    @property
    def source_factor(self) -> float:
        """mu0 I^2 / (2 pi d^2) * omega_ref^(alpha - 1): S |omega|^alpha per unit K."""
        return self.mu0 * self.I**2 / (2 * math.pi * self.d**2) * self.omega_ref ** (self.alpha - 1)

    @property
    def prefactor(self) -> float:
        """S(omega) * |omega|^alpha."""
        return self.K * self.source_factor

    def psd(self, omega):
        w = np.abs(np.asarray(omega, dtype=float))
        if self.alpha > 0 and np.any(w == 0):
            raise DivergentPSDError("divergent PSD at DC for flicker noise")
        return self.prefactor / w**self.alpha


@dataclass(frozen=True)
class Custom:
    """Tabulated PSD, interpolated linearly in log-log space."""

    omega: tuple
    S: tuple

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        s = np.asarray(self.S, dtype=float)
        if w.ndim != 1 or w.shape != s.shape or w.size < 2:
            raise ValueError("Custom: need at least two (omega, S) pairs")
        if np.any(w <= 0) or np.any(np.diff(w) <= 0):
            raise ValueError("Custom: omega must be positive and strictly increasing")
        if np.any(s < 0):
            raise ValueError("Custom: S must be >= 0")
        object.__setattr__(self, "omega", tuple(w.tolist()))
        object.__setattr__(self, "S", tuple(s.tolist()))

    @classmethod
    def from_csv(cls, path) -> Custom:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise ValueError(f"{path}: empty PSD table")
        header, body = rows[0], rows[1:]
        try:
            float(header[0])
        except ValueError:
            pass
        else:
            raise ValueError(f"{path}: header row required (omega,S)")
        data = [(float(r[0]), float(r[1])) for r in body if r and r[0].strip()]
        w, s = zip(*data)
        return cls(omega=w, S=s)

    def psd(self, omega):
        w = np.abs(np.asarray(omega, dtype=float))
        lo, hi = self.omega[0], self.omega[-1]
        if np.any(w < lo * (1 - 1e-12)) or np.any(w > hi * (1 + 1e-12)):
            raise ValueError(f"omega outside tabulated range [{lo:g}, {hi:g}] rad/s")
        w = np.clip(w, lo, hi)
        s = np.asarray(self.S)
        with np.errstate(divide="ignore"):
            logs = np.log(s)
        # zero entries interpolate to zero instead of producing nan
        out = np.exp(np.interp(np.log(w), np.log(self.omega), logs))
        return np.nan_to_num(out, nan=0.0)


NoiseSpectrum = Union[White, Flicker, Custom]


def evaluate_psd(spec: NoiseSpectrum, omega):
    """One-sided PSD S(omega); even in omega."""
    out = spec.psd(omega)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class NormalizedSpectrum:
    """PSD as a function of xi = omega / omega0.

    ``ktilde`` is A for white noise and the flicker amplitude at omega0
    (so that S(xi) = ktilde^2 / |xi|^alpha); None for tabulated spectra.
    """

    ktilde: float | None
    alpha: float
    omega0: float
    rule: Callable = None

    def __call__(self, xi):
        out = self.rule(np.asarray(xi, dtype=float))
        return float(out) if np.ndim(out) == 0 else out


def normalize(spec: NoiseSpectrum, dq: DerivedQuantities) -> NormalizedSpectrum:
    w0 = dq.omega0
    if w0 <= 0:
        raise ValueError("omega0 must be positive")
    if isinstance(spec, White):
        return NormalizedSpectrum(spec.A, 0.0, w0, lambda xi: spec.psd(xi * w0))
    if isinstance(spec, Flicker):
        kt = math.sqrt(spec.prefactor / w0**spec.alpha)
        return NormalizedSpectrum(kt, spec.alpha, w0, lambda xi: spec.psd(xi * w0))
    return NormalizedSpectrum(None, float("nan"), w0, lambda xi: spec.psd(xi * w0))
