"""File-backed run configuration (TOML).

Every section is optional; missing keys take the defaults below. Unknown keys
and out-of-range values raise :class:`ConfigError` naming the field path.
"""

from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import tomli_w

from .aero import AeroModel, AnalyticPolar, PolarError, default_polar, load_polar_csv
from .controller import AllocationConfig, Controller, ControllerGains, SaturationFn
from .model import PhysicalParams, VehicleState
from .sim import INTEGRATORS, SimConfig
from .trajectory import RampSpec, TransitionDirection, TransitionProfile

PRESETS = ("hover_to_cruise", "cruise_to_hover")


class ConfigError(ValueError):
    pass


@dataclass
class PhysicalSection:
    g: float = 9.81
    airspeed_floor: float = 0.01


@dataclass
class AeroSection:
    rho: float = 1.225
    # wing area per unit mass (m^2/kg); ignored when K is given
    S: float = 2.0
    K: float | None = None
    polar: str = "default"  # "default", "analytic" or a CSV path
    c1: float = 0.8
    cd0: float = 0.02
    cd90: float = 1.0
    coverage_deg: list = field(default_factory=lambda: [-10.0, 90.0])


@dataclass
class TrajectorySection:
    L_u: float = 0.7
    M_u: float = 1.0
    L_alpha_deg: float = 4.0
    M_alpha_deg: float = 6.0
    u_time_scale: float = 5.0
    mirror_duration: float = 30.0
    allow_degenerate: bool = False


@dataclass
class ControllerSection:
    k_theta: float = 5.0
    k_q: float = 3.0
    sigma1: dict = field(default_factory=lambda: {"L": 0.9, "M": 1.0})
    sigma2: dict = field(default_factory=lambda: {"L": 0.9, "M": 1.0})
    sigma3: dict = field(default_factory=lambda: {"L": 0.9, "M": 1.0})
    tau_f: float = 0.05
    gravity_normalized: bool = True
    beta: float = 1.0
    d_max: float = math.inf
    clamp_thrust: bool = False


@dataclass
class SimSection:
    dt: float = 1e-3
    t_end: float = 60.0
    integrator: str = "rk4"
    scenario: str = "hover_to_cruise"
    u0: float = 0.0
    w0: float = 0.0
    theta0_deg: float = 90.0
    q0: float = 0.0


@dataclass
class MonitorSection:
    attitude_threshold_deg: float = 0.25
    transient_band_deg: float = 5.0


@dataclass
class CheckSection:
    """Pass bands for the run's exit status; ``[lo, hi]`` lists or empty for "no check"."""

    u_error_max: float = math.inf
    w_error_max: float = math.inf
    theta_error_deg_max: float = math.inf
    alpha_deg: list = field(default_factory=list)
    theta_deg: list = field(default_factory=list)
    T_over_g: list = field(default_factory=list)
    speed_max: float = math.inf


@dataclass
class OutputSection:
    decimation: int = 10
    plots: bool = True


@dataclass
class RunConfig:
    physical: PhysicalSection = field(default_factory=PhysicalSection)
    aero: AeroSection = field(default_factory=AeroSection)
    trajectory: TrajectorySection = field(default_factory=TrajectorySection)
    controller: ControllerSection = field(default_factory=ControllerSection)
    sim: SimSection = field(default_factory=SimSection)
    monitor: MonitorSection = field(default_factory=MonitorSection)
    check: CheckSection = field(default_factory=CheckSection)
    output: OutputSection = field(default_factory=OutputSection)
    # directory used to resolve a relative polar path
    base_dir: Path | None = field(default=None, compare=False)

    # builders -----------------------------------------------------------

    def physical_params(self) -> PhysicalParams:
        return PhysicalParams(self.physical.g, self.physical.airspeed_floor)

    def polar(self):
        a = self.aero
        if a.polar == "default":
            return default_polar()
        if a.polar == "analytic":
            return AnalyticPolar(a.c1, a.cd0, a.cd90)
        path = Path(a.polar)
        if not path.is_absolute() and self.base_dir is not None:
            path = self.base_dir / path
        return load_polar_csv(path)

    def aero_model(self) -> AeroModel:
        a = self.aero
        provider = self.polar()
        if a.K is not None:
            return AeroModel.from_K(a.K, provider, rho=a.rho)
        return AeroModel(a.rho, a.S, provider)

    def gains(self) -> ControllerGains:
        c = self.controller
        return ControllerGains(
            k_theta=c.k_theta, k_q=c.k_q,
            sigma1=SaturationFn(c.sigma1["L"], c.sigma1["M"]),
            sigma2=SaturationFn(c.sigma2["L"], c.sigma2["M"]),
            sigma3=SaturationFn(c.sigma3["L"], c.sigma3["M"]),
            tau_f=c.tau_f, gravity_normalized=c.gravity_normalized)

    def controller_obj(self, aero: AeroModel | None = None) -> Controller:
        c = self.controller
        return Controller(aero or self.aero_model(), self.gains(), self.physical_params(),
                          AllocationConfig(c.beta, c.d_max), dt=self.sim.dt, clamp_thrust=c.clamp_thrust)

    def profile(self) -> TransitionProfile:
        t = self.trajectory
        return TransitionProfile(TransitionDirection(self.sim.scenario), RampSpec(t.L_u, t.M_u),
                                 RampSpec(t.L_alpha_deg, t.M_alpha_deg), t.u_time_scale, t.mirror_duration)

    def sim_config(self) -> SimConfig:
        s = self.sim
        return SimConfig(dt=s.dt, t_end=s.t_end, integrator=s.integrator,
                         initial=VehicleState(s.u0, s.w0, math.radians(s.theta0_deg), s.q0),
                         attitude_threshold=math.radians(self.monitor.attitude_threshold_deg),
                         transient_band=math.radians(self.monitor.transient_band_deg))

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        if d["aero"]["K"] is None:
            del d["aero"]["K"]
        return d

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())


_SECTIONS = {
    "physical": PhysicalSection, "aero": AeroSection, "trajectory": TrajectorySection,
    "controller": ControllerSection, "sim": SimSection, "monitor": MonitorSection,
    "check": CheckSection, "output": OutputSection,
}


def _num(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _coerce(section_cls, raw: dict, path: str):
    defaults = section_cls()
    out = {}
    for key, value in raw.items():
        fpath = f"{path}.{key}"
        if not hasattr(defaults, key):
            allowed = ", ".join(f for f in section_cls.__dataclass_fields__)
            raise ConfigError(f"{fpath}: unknown key (allowed: {allowed})")
        default = getattr(defaults, key)
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"{fpath}: expected true/false, got {value!r}")
        elif isinstance(default, int):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{fpath}: expected an integer, got {value!r}")
        elif isinstance(default, float) or (default is None and key == "K"):
            value = _num(value, fpath)
        elif isinstance(default, str):
            if not isinstance(value, str):
                raise ConfigError(f"{fpath}: expected a string, got {value!r}")
        elif isinstance(default, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{fpath}: expected a table {{L = .., M = ..}}, got {value!r}")
            extra = set(value) - {"L", "M"}
            if extra:
                raise ConfigError(f"{fpath}.{sorted(extra)[0]}: unknown key (allowed: L, M)")
            value = {**default, **{k: _num(v, f"{fpath}.{k}") for k, v in value.items()}}
        elif isinstance(default, list):
            if not isinstance(value, list):
                raise ConfigError(f"{fpath}: expected a list, got {value!r}")
            value = [_num(v, f"{fpath}[{i}]") for i, v in enumerate(value)]
        out[key] = value
    return section_cls(**{**asdict(defaults), **out})


def _require(cond, path, msg):
    if not cond:
        raise ConfigError(f"{path}: {msg}")


def _check_sat(d, path):
    L, M = d["L"], d["M"]
    _require(L > 0, f"{path}.L", f"must be > 0, got {L}")
    _require(math.isfinite(M), f"{path}.M", f"must be finite, got {M}")
    _require(L <= M, path, f"saturation requires L_s <= M_s (linear band inside the bound), got L={L}, M={M}")


def validate(cfg: RunConfig) -> RunConfig:
    p, a, t, c, s, m, k, o = (cfg.physical, cfg.aero, cfg.trajectory, cfg.controller, cfg.sim,
                              cfg.monitor, cfg.check, cfg.output)
    _require(p.g > 0 and math.isfinite(p.g), "physical.g", f"must be in (0, inf), got {p.g}")
    _require(p.airspeed_floor >= 0, "physical.airspeed_floor", f"must be >= 0, got {p.airspeed_floor}")
    _require(a.rho > 0, "aero.rho", f"must be > 0, got {a.rho}")
    _require(a.S > 0, "aero.S", f"must be > 0, got {a.S}")
    if a.K is not None:
        _require(a.K > 0 and math.isfinite(a.K), "aero.K", f"must be in (0, inf), got {a.K}")
    _require(a.cd0 > 0, "aero.cd0", f"must be > 0, got {a.cd0}")
    _require(a.cd90 >= 0, "aero.cd90", f"must be >= 0, got {a.cd90}")
    _require(len(a.coverage_deg) == 2 and a.coverage_deg[0] < a.coverage_deg[1], "aero.coverage_deg",
             f"must be [lo, hi] with lo < hi, got {a.coverage_deg}")
    for name in ("u", "alpha"):
        lo, hi = (t.L_u, t.M_u) if name == "u" else (t.L_alpha_deg, t.M_alpha_deg)
        sect = "L_u" if name == "u" else "L_alpha_deg"
        _require(lo > 0, f"trajectory.{sect}", f"must be > 0, got {lo}")
        _require(lo <= hi, f"trajectory.{sect}", f"ramp requires L <= M, got L={lo}, M={hi}")
        if lo == hi:
            _require(t.allow_degenerate, f"trajectory.{sect}",
                     "L == M gives a non-C1 profile; set trajectory.allow_degenerate = true to accept it")
    _require(t.u_time_scale > 0, "trajectory.u_time_scale", f"must be > 0, got {t.u_time_scale}")
    _require(t.mirror_duration > 0, "trajectory.mirror_duration", f"must be > 0, got {t.mirror_duration}")
    _require(c.k_theta > 0, "controller.k_theta", f"must be > 0, got {c.k_theta}")
    _require(c.k_q > 0, "controller.k_q", f"must be > 0, got {c.k_q}")
    for name in ("sigma1", "sigma2", "sigma3"):
        _check_sat(getattr(c, name), f"controller.{name}")
    _require(c.sigma2["M"] <= 1.0, "controller.sigma2.M", f"must be <= 1 (eps is a cosine), got {c.sigma2['M']}")
    _require(0.0 <= c.beta <= 1.0, "controller.beta", f"must be in [0, 1], got {c.beta}")
    _require(c.d_max >= 0, "controller.d_max", f"must be >= 0, got {c.d_max}")
    _require(0 < s.dt <= 0.01, "sim.dt", f"must be in (0, 0.01], got {s.dt}")
    _require(c.tau_f >= s.dt, "controller.tau_f", f"must be >= sim.dt ({s.dt}), got {c.tau_f}")
    _require(s.t_end >= 0 and math.isfinite(s.t_end), "sim.t_end", f"must be in [0, inf), got {s.t_end}")
    _require(s.integrator in INTEGRATORS, "sim.integrator", f"must be one of {INTEGRATORS}, got {s.integrator!r}")
    _require(s.scenario in PRESETS, "sim.scenario", f"must be one of {PRESETS}, got {s.scenario!r}")
    _require(0.0 <= s.theta0_deg <= 180.0, "sim.theta0_deg", f"must be in [0, 180], got {s.theta0_deg}")
    for key in ("u0", "w0", "q0"):
        _require(math.isfinite(getattr(s, key)), f"sim.{key}", "must be finite")
    _require(m.attitude_threshold_deg > 0, "monitor.attitude_threshold_deg",
             f"must be > 0, got {m.attitude_threshold_deg}")
    _require(m.transient_band_deg > 0, "monitor.transient_band_deg", f"must be > 0, got {m.transient_band_deg}")
    for key in ("alpha_deg", "theta_deg", "T_over_g"):
        band = getattr(k, key)
        _require(len(band) in (0, 2) and (not band or band[0] <= band[1]), f"check.{key}",
                 f"must be [] or [lo, hi] with lo <= hi, got {band}")
    _require(o.decimation >= 1, "output.decimation", f"must be >= 1, got {o.decimation}")
    return cfg


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in over.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def from_dict(raw: dict, base_dir: Path | None = None) -> RunConfig:
    sections = {}
    for name, body in raw.items():
        if name not in _SECTIONS:
            raise ConfigError(f"{name}: unknown section (allowed: {', '.join(_SECTIONS)})")
        if not isinstance(body, dict):
            raise ConfigError(f"{name}: expected a [section] table")
        sections[name] = _coerce(_SECTIONS[name], body, name)
    return validate(RunConfig(**sections, base_dir=base_dir))


def parse_toml(text: str, source: str = "<string>") -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: parse error: {exc}") from None


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r} (choose from {', '.join(PRESETS)})")
    return resources.files("tailsitter").joinpath(f"data/presets/{name}.toml").read_text(encoding="utf-8")


def load_config(path: str | Path | None = None, preset: str | None = None) -> RunConfig:
    """Load a TOML config, optionally layered over a shipped preset."""
    raw = parse_toml(preset_text(preset), f"preset:{preset}") if preset else {}
    base_dir = None
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
        raw = _merge(raw, parse_toml(text, str(path)))
        base_dir = path.parent
    return from_dict(raw, base_dir)


def load_preset(name: str) -> RunConfig:
    return load_config(preset=name)


__all__ = ["ConfigError", "RunConfig", "PRESETS", "load_config", "load_preset", "from_dict", "validate",
           "PolarError"]
