"""Parameter sweeps and log10-log10 power-law fits.

A sweep is the cartesian product of its axes, evaluated point by point.
A point whose parameters violate a physics invariant gets a status message
and NaN values, and the sweep carries on.
"""
from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import dephasing
from .dephasing import IntegrationConfig
from .physics import ExperimentParams, derive_quantities, table1_params
from .spectra import Flicker, White

PARAM_AXES = ("d", "I", "m", "B0", "chi_rho", "gamma_e")
NOISE_AXES = ("A", "K", "alpha", "gamma_target")
AXES = PARAM_AXES + NOISE_AXES

COLUMNS = (
    "gamma_white",
    "gamma_flicker",
    "coherence_white",
    "coherence_flicker",
    "dx_max",
    "dI_over_I",
    "T_exp",
)


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    num: int
    spacing: str = "log"

    def __post_init__(self):
        if self.name not in AXES:
            raise ValueError(f"unknown sweep axis {self.name!r}; choose from {', '.join(AXES)}")
        if self.num < 1:
            raise ValueError(f"axis {self.name}: num must be >= 1")
        if self.spacing not in ("log", "linear"):
            raise ValueError(f"axis {self.name}: spacing must be 'log' or 'linear'")
        if self.spacing == "log" and not (self.start > 0 and self.stop > 0):
            raise ValueError(f"axis {self.name}: log spacing needs positive bounds")

    @property
    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.logspace(math.log10(self.start), math.log10(self.stop), self.num)
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple
    base: ExperimentParams = field(default_factory=table1_params)
    A: float | None = None  # white amplitude; None skips the white columns
    K: float | None = None  # flicker constant; None skips the flicker columns
    alpha: float = 1.0
    flicker_omega_ref: float | str = 1.0  # rad/s, or "omega0" for each point's trap frequency
    gamma_target: float | None = None  # None: coherence 0.1 after one loop
    integration: IntegrationConfig = field(default_factory=IntegrationConfig)
    columns: tuple = COLUMNS

    def __post_init__(self):
        axes = tuple(self.axes)
        if not axes:
            raise ValueError("sweep needs at least one axis")
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise ValueError("sweep axes must be distinct")
        bad = [c for c in self.columns if c not in COLUMNS]
        if bad:
            raise ValueError(f"unknown output column(s): {', '.join(bad)}")
        ref = self.flicker_omega_ref
        if not (ref == "omega0" or (not isinstance(ref, str) and ref > 0)):
            raise ValueError("flicker_omega_ref must be > 0 or 'omega0'")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "columns", tuple(self.columns))

    def points(self):
        names = [a.name for a in self.axes]
        for combo in itertools.product(*(a.values for a in self.axes)):
            yield dict(zip(names, (float(v) for v in combo)))


@dataclass
class Table:
    columns: list
    rows: list

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def status(self) -> list:
        i = self.columns.index("status")
        return [r[i] for r in self.rows]

    def ok(self) -> Table:
        i = self.columns.index("status")
        return Table(list(self.columns), [r for r in self.rows if r[i] == "ok"])


def _evaluate_point(spec: SweepSpec, point: dict) -> tuple:
    cols = spec.columns
    try:
        params = spec.base.replace(**{k: v for k, v in point.items() if k in PARAM_AXES})
        dq = derive_quantities(params)
        A = point.get("A", spec.A)
        K = point.get("K", spec.K)
        alpha = point.get("alpha", spec.alpha)
        gt = point.get("gamma_target", spec.gamma_target)
        if gt is None:
            gt = math.log(10) / dq.T_exp
        out = dict.fromkeys(COLUMNS, math.nan)
        out["dx_max"] = dq.dx_max
        out["T_exp"] = dq.T_exp
        out["dI_over_I"] = dephasing.current_noise_ratio(gt, dq)
        if A is not None:
            r = dephasing.gamma(White(A), dq, cfg=spec.integration)
            out["gamma_white"], out["coherence_white"] = r.gamma, r.coherence
        if K is not None:
            ref = dq.omega0 if spec.flicker_omega_ref == "omega0" else spec.flicker_omega_ref
            fl = Flicker.from_params(K, params, alpha, omega_ref=ref)
            r = dephasing.gamma(fl, dq, cfg=spec.integration)
            out["gamma_flicker"], out["coherence_flicker"] = r.gamma, r.coherence
        status = "ok"
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        out = dict.fromkeys(COLUMNS, math.nan)
        status = str(exc).replace(",", ";")
    return tuple(point.values()) + tuple(out[c] for c in cols) + (status,)


def run_sweep(spec: SweepSpec, workers: int = 1) -> Table:
    """Evaluate every grid point; rows come back in grid order for any ``workers``."""
    points = list(spec.points())
    columns = [a.name for a in spec.axes] + list(spec.columns) + ["status"]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            rows = list(ex.map(_evaluate_point, [spec] * len(points), points))
    else:
        rows = [_evaluate_point(spec, p) for p in points]
    return Table(columns, rows)


def write_csv(table: Table, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(table.columns)
        for r in table.rows:
            w.writerow([f"{v:.8e}" if isinstance(v, float) else v for v in r])


# -- fits ---------------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual_rms: float
    n: int


def loglog_fit(table: Table | tuple, x_col: str | None = None, y_col: str | None = None) -> FitResult:
    """Least squares of log10 y against log10 x.

    ``table`` is a Table (with column names) or an (x, y) pair of arrays.
    """
    if isinstance(table, Table):
        x, y = table.column(x_col), table.column(y_col)
    else:
        x, y = (np.asarray(v, dtype=float) for v in table)
    if x.shape != y.shape or x.size < 3:
        raise ValueError("loglog_fit needs at least three (x, y) points")
    for i, (a, b) in enumerate(zip(x, y)):
        if not (a > 0 and b > 0):
            raise ValueError(f"row {i}: non-positive value (x={a!r}, y={b!r}) in log-log fit")
    lx, ly = np.log10(x), np.log10(y)
    r = stats.linregress(lx, ly)
    resid = ly - (r.slope * lx + r.intercept)
    return FitResult(float(r.slope), float(r.intercept), float(np.sqrt(np.mean(resid**2))), int(x.size))


def amplitude_fit(
    family: str,
    d: float,
    base: ExperimentParams | None = None,
    values=None,
    alpha: float = 1.0,
    cfg: IntegrationConfig | None = None,
) -> FitResult:
    """log10 Gamma against log10 A (white) or log10 K (flicker) at wire distance d."""
    base = (base or table1_params()).replace(d=d)
    cfg = cfg or IntegrationConfig()
    if family == "white":
        values = np.logspace(-8, -5, 7) if values is None else values
        axis = Axis("A", values[0], values[-1], len(values))
        spec = SweepSpec((axis,), base, A=1.0, integration=cfg)
        table = run_sweep(spec)
        return loglog_fit(table.ok(), "A", "gamma_white")
    if family == "flicker":
        values = np.logspace(-16, -12, 7) if values is None else values
        axis = Axis("K", values[0], values[-1], len(values))
        spec = SweepSpec((axis,), base, K=1.0, alpha=alpha, integration=cfg)
        table = run_sweep(spec)
        return loglog_fit(table.ok(), "K", "gamma_flicker")
    raise ValueError("family must be 'white' or 'flicker'")


@dataclass(frozen=True)
class InterceptFit:
    family: str
    d: tuple
    intercepts: tuple
    fit: FitResult  # intercept against log10 d


def intercept_vs_distance(family: str, d_values, base=None, cfg=None) -> InterceptFit:
    """Fit the amplitude-fit intercept c(d) as slope * log10 d + offset."""
    d_values = tuple(float(v) for v in d_values)
    cs = tuple(amplitude_fit(family, d, base, cfg=cfg).intercept for d in d_values)
    lx = np.log10(d_values)
    r = stats.linregress(lx, cs)
    resid = np.asarray(cs) - (r.slope * lx + r.intercept)
    fit = FitResult(float(r.slope), float(r.intercept), float(np.sqrt(np.mean(resid**2))), len(cs))
    return InterceptFit(family, d_values, cs, fit)


# -- signal-to-noise against distance -----------------------------------------------


def snr_vs_distance(
    base: ExperimentParams, gamma_target: float, d_range, cfg: IntegrationConfig | None = None
) -> Table:
    """delta I/I at each d by the closed form and by the white and flicker bound routes."""
    if not gamma_target > 0:
        raise ValueError("target must be positive")
    cols = ["d", "dI_closed", "dI_white", "dI_flicker", "spread", "status"]
    rows = []
    for d in d_range:
        try:
            params = base.replace(d=float(d))
            dq = derive_quantities(params)
            closed = dephasing.current_noise_ratio(gamma_target, dq)
            A = dephasing.bound_white(gamma_target, dq, cfg=cfg)
            tmpl = Flicker.from_params(1.0, params)
            K = dephasing.bound_flicker(gamma_target, dq, tmpl, cfg=cfg)
            w = dephasing.current_noise_ratio_from_spectrum(White(A), dq, cfg)
            f = dephasing.current_noise_ratio_from_spectrum(Flicker.from_params(K, params), dq, cfg)
            vals = (closed, w, f)
            spread = (max(vals) - min(vals)) / min(vals)
            rows.append((float(d), closed, w, f, spread, "ok"))
        except (ValueError, ArithmeticError, RuntimeError) as exc:
            rows.append((float(d),) + (math.nan,) * 4 + (str(exc).replace(",", ";"),))
    return Table(cols, rows)
