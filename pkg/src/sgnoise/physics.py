"""Experiment parameters, derived trap quantities and unperturbed arm trajectories.

Everything is SI. The gradient ``eta0`` is kept signed (negative for a wire
above the particle); ``omega0`` is always the positive trap frequency.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field, fields
from enum import IntEnum

import numpy as np
from scipy import constants


class InvariantError(ValueError):
    """Raised when physical inputs violate a model invariant."""


class Arm(IntEnum):
    """Interferometer arm labelled by its x-basis spin eigenvalue."""

    R = 1
    L = -1

    @property
    def spin(self) -> int:
        return int(self)


@dataclass(frozen=True)
class ExperimentParams:
    gamma_e: float  # s^-1 T^-1
    B0: float  # T
    I: float  # A
    d: float  # m
    rho: float  # kg m^-3
    chi_rho: float  # m^3 kg^-1
    m: float  # kg
    mu0: float = constants.mu_0
    hbar: float = constants.hbar
    D_zfs: float = 2.87e9  # Hz; spin-symmetric, never enters the dynamics

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool) or not isinstance(v, numbers.Real) or not math.isfinite(v):
                raise InvariantError(f"{f.name}: must be a finite number, got {v!r}")
        checks = [
            ("d > 0", self.d > 0),
            ("I > 0", self.I > 0),
            ("m > 0", self.m > 0),
            ("B0 >= 0", self.B0 >= 0),
            ("chi_rho < 0", self.chi_rho < 0),
            ("mu0 > 0", self.mu0 > 0),
            ("hbar > 0", self.hbar > 0),
        ]
        for name, ok in checks:
            if not ok:
                raise InvariantError(f"invariant violated: {name}")

    def replace(self, **changes) -> ExperimentParams:
        kw = {f.name: getattr(self, f.name) for f in fields(self)}
        kw.update(changes)
        return ExperimentParams(**kw)


def table1_params(m: float = 1.0e-15, **overrides) -> ExperimentParams:
    """Nanodiamond / chip-wire parameter set used throughout the examples."""
    kw = dict(
        gamma_e=1.761e11,
        B0=0.2,
        I=12.0,
        d=20e-6,
        rho=3.5e3,
        chi_rho=-6.286e-9,
        m=m,
    )
    kw.update(overrides)
    return ExperimentParams(**kw)


@dataclass(frozen=True)
class DerivedQuantities:
    eta0: float
    omega0: float
    H: float
    T_exp: float
    C_R: float
    C_L: float
    dx_max: float
    sigma_x: float
    sigma_p: float
    params: ExperimentParams = field(repr=False, compare=False)

    def C(self, arm: Arm) -> float:
        return self.C_R if Arm(arm) is Arm.R else self.C_L


def gradient(params: ExperimentParams) -> float:
    """Field gradient of an infinite thin wire at distance d (signed)."""
    return -params.mu0 * params.I / (2 * math.pi * params.d**2)


def derive_quantities(params: ExperimentParams) -> DerivedQuantities:
    p = params
    eta0 = gradient(p)
    omega0 = abs(math.sqrt(-p.chi_rho / p.mu0) * eta0)
    H = 4 * p.gamma_e * p.B0 * eta0 * p.chi_rho / p.mu0
    dia = p.chi_rho * p.m / p.mu0 * p.B0
    C_R = Arm.R.spin * p.hbar * p.gamma_e - dia
    C_L = Arm.L.spin * p.hbar * p.gamma_e - dia
    dx_max = abs(4 * p.hbar * p.gamma_e * eta0 / (p.m * omega0**2))
    sigma_x = math.sqrt(p.hbar / (2 * p.m * omega0))
    return DerivedQuantities(
        eta0=eta0,
        omega0=omega0,
        H=H,
        T_exp=2 * math.pi / omega0,
        C_R=C_R,
        C_L=C_L,
        dx_max=dx_max,
        sigma_x=sigma_x,
        sigma_p=p.hbar / (2 * sigma_x),
        params=p,
    )


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    return t


def classical_trajectory(dq: DerivedQuantities, params: ExperimentParams, arm: Arm, t):
    """x_j(t) for x_j(0) = 0, v_j(0) = 0."""
    t = _check_time(t)
    amp = dq.C(arm) * dq.eta0 / (params.m * dq.omega0**2)
    return amp * (np.cos(dq.omega0 * t) - 1.0)


def classical_momentum(dq: DerivedQuantities, params: ExperimentParams, arm: Arm, t):
    t = _check_time(t)
    return -(dq.C(arm) * dq.eta0 / dq.omega0) * np.sin(dq.omega0 * t)


def energy(dq: DerivedQuantities, params: ExperimentParams, arm: Arm, t):
    """Energy of the shifted oscillator, constant along the closed-form solution."""
    x = classical_trajectory(dq, params, arm, t)
    p = classical_momentum(dq, params, arm, t)
    m = params.m
    return p**2 / (2 * m) + 0.5 * m * dq.omega0**2 * x**2 + dq.C(arm) * dq.eta0 * x
