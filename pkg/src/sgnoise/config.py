"""JSON run configuration: parsing, validation and the effective-config dump.

Every section except ``experiment`` is optional; missing fields take the
defaults below. Unknown keys are an error at every level.

Units: experiment block in SI (gamma_e s^-1 T^-1, B0 T, I A, d m, rho kg m^-3,
chi_rho m^3 kg^-1, m kg); noise.A in T m^-1 Hz^-1/2; noise.K in the units that
make S = mu0 K I^2 / (2 pi d^2 |omega|) a PSD in T^2 m^-2 s at alpha = 1;
noise.omega_ref in rad/s; integration limits are in units of omega0.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from importlib import resources

from .dephasing import IntegrationConfig
from .physics import ExperimentParams, InvariantError
from .spectra import Custom, Flicker, NoiseSpectrum, White
from .sweeps import Axis, SweepSpec


class ConfigError(ValueError):
    pass


REQUIRED_EXPERIMENT = ("gamma_e", "B0", "I", "d", "rho", "chi_rho", "m")
OPTIONAL_EXPERIMENT = ("mu0", "hbar", "D_zfs")
FAMILIES = ("white", "flicker", "custom", "none")


@dataclass(frozen=True)
class NoiseConfig:
    family: str = "white"
    A: float = 0.0
    K: float = 0.0
    alpha: float = 1.0
    omega_ref: float = 1.0
    table: str | None = None  # CSV path for family = custom

    def spectrum(self, params: ExperimentParams, family: str | None = None) -> NoiseSpectrum:
        fam = family or self.family
        if fam == "white":
            return White(self.A)
        if fam == "flicker":
            return Flicker.from_params(self.K, params, self.alpha, self.omega_ref)
        if fam == "custom":
            if not self.table:
                raise ConfigError("noise.table: required for family 'custom'")
            return Custom.from_csv(self.table)
        if fam == "none":
            return White(0.0)
        raise ConfigError(f"noise.family: must be one of {', '.join(FAMILIES)}")


@dataclass(frozen=True)
class SimulationConfig:
    samples_per_loop: int = 256
    loops: int = 8
    seed: int = 0
    M: int = 500
    xi_min: float = 1.0  # synthesized noise starts at xi_min * omega0


@dataclass(frozen=True)
class SweepConfig:
    axes: tuple = ()
    A: float | None = None
    K: float | None = None
    alpha: float = 1.0
    flicker_omega_ref: float | str = 1.0
    gamma_target: float | None = None

    def spec(self, base: ExperimentParams, integration: IntegrationConfig) -> SweepSpec:
        axes = tuple(Axis(**a) for a in self.axes)
        return SweepSpec(
            axes,
            base,
            A=self.A,
            K=self.K,
            alpha=self.alpha,
            flicker_omega_ref=self.flicker_omega_ref,
            gamma_target=self.gamma_target,
            integration=integration,
        )


@dataclass(frozen=True)
class RunConfig:
    experiment: ExperimentParams
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    integration: IntegrationConfig = field(default_factory=IntegrationConfig)
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    sweep: SweepConfig | None = None

    def to_dict(self) -> dict:
        out = {
            "experiment": asdict(self.experiment),
            "noise": asdict(self.noise),
            "integration": asdict(self.integration),
            "simulation": asdict(self.simulation),
        }
        if out["noise"]["table"] is None:
            del out["noise"]["table"]
        if self.sweep is not None:
            sw = asdict(self.sweep)
            sw["axes"] = [dict(a) for a in self.sweep.axes]
            out["sweep"] = sw
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"


def _number(section, key, v, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{section}.{key}: expected a number, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(f"{section}.{key}: must be finite")
    if integer:
        if int(v) != v:
            raise ConfigError(f"{section}.{key}: expected an integer")
        return int(v)
    return float(v)


def _check_keys(section: str, block, allowed):
    if not isinstance(block, dict):
        raise ConfigError(f"{section}: expected an object")
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"{section}: unknown key(s) {', '.join(unknown)}")


def _experiment(block) -> ExperimentParams:
    _check_keys("experiment", block, REQUIRED_EXPERIMENT + OPTIONAL_EXPERIMENT)
    for k in REQUIRED_EXPERIMENT:
        if k not in block:
            raise ConfigError(f"{k}: required")
    kw = {k: _number("experiment", k, v) for k, v in block.items()}
    try:
        return ExperimentParams(**kw)
    except InvariantError as exc:
        raise ConfigError(str(exc)) from None


def _plain(section, cls, block, ints=(), strings=(), optional=()):
    names = [f.name for f in fields(cls)]
    _check_keys(section, block, names)
    kw = {}
    for k, v in block.items():
        if k in strings or (k in optional and v is None):
            kw[k] = v
        else:
            kw[k] = _number(section, k, v, integer=k in ints)
    try:
        return cls(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}: {exc}") from None


def parse_config(data: dict) -> RunConfig:
    _check_keys("config", data, ("experiment", "noise", "integration", "simulation", "sweep"))
    if "experiment" not in data:
        raise ConfigError("experiment: required")
    exp = _experiment(data["experiment"])
    noise = _plain("noise", NoiseConfig, data.get("noise", {}), strings=("family", "table"))
    if noise.family not in FAMILIES:
        raise ConfigError(f"noise.family: must be one of {', '.join(FAMILIES)}")
    for k in ("A", "K"):
        if getattr(noise, k) < 0:
            raise ConfigError(f"noise.{k}: must be >= 0")
    try:
        noise.spectrum(exp, "flicker")
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}") from None
    integ = _plain("integration", IntegrationConfig, data.get("integration", {}))
    sim = _plain("simulation", SimulationConfig, data.get("simulation", {}), ints=("samples_per_loop", "loops", "seed", "M"))
    for k in ("samples_per_loop", "loops"):
        v = getattr(sim, k)
        if v < 1 or v & (v - 1):
            raise ConfigError(f"simulation.{k}: must be a power of two")
    if sim.samples_per_loop < 64:
        raise ConfigError("simulation.samples_per_loop: need >= 64 samples per trap period")
    if not 0 <= sim.seed < 2**64:
        raise ConfigError("simulation.seed: must be a 64-bit unsigned integer")
    if sim.M < 2:
        raise ConfigError("simulation.M: must be >= 2")
    if sim.xi_min < 0:
        raise ConfigError("simulation.xi_min: must be >= 0")
    sweep = None
    if "sweep" in data:
        block = data["sweep"]
        _check_keys("sweep", block, [f.name for f in fields(SweepConfig)])
        axes = block.get("axes", [])
        if not isinstance(axes, list) or not axes:
            raise ConfigError("sweep.axes: need a non-empty list")
        clean = []
        for i, a in enumerate(axes):
            sec = f"sweep.axes[{i}]"
            _check_keys(sec, a, ("name", "start", "stop", "num", "spacing"))
            for k in ("name", "start", "stop", "num"):
                if k not in a:
                    raise ConfigError(f"{sec}.{k}: required")
            ax = {
                "name": a["name"],
                "start": _number(sec, "start", a["start"]),
                "stop": _number(sec, "stop", a["stop"]),
                "num": _number(sec, "num", a["num"], integer=True),
                "spacing": a.get("spacing", "log"),
            }
            try:
                Axis(**ax)
            except ValueError as exc:
                raise ConfigError(f"{sec}: {exc}") from None
            clean.append(ax)
        rest = {k: v for k, v in block.items() if k != "axes"}
        sweep = _plain(
            "sweep",
            SweepConfig,
            rest,
            strings=("flicker_omega_ref",) if isinstance(rest.get("flicker_omega_ref"), str) else (),
            optional=("A", "K", "gamma_target"),
        )
        sweep = SweepConfig(**{**asdict(sweep), "axes": tuple(clean)})
        try:
            sweep.spec(exp, integ)
        except ValueError as exc:
            raise ConfigError(f"sweep: {exc}") from None
    return RunConfig(exp, noise, integ, sim, sweep)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return parse_config(data)


def bundled_table1() -> dict:
    text = resources.files("sgnoise").joinpath("data/table1.json").read_text(encoding="utf-8")
    return json.loads(text)
