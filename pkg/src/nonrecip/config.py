"""Run configuration: a small sectioned key = value format and the built-in reference presets.

The format has ``[section]`` headers, ``key = value`` lines and ``#`` comments.
Values are SI (rad/s, s, W, V). Unknown sections or keys are rejected with
the offending line number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (PAPER_LITERAL, SUSCEPTIBILITY_MODES, BareParams, DriveConfig, FrameConfig,
                   NonrecipError, drive_rate_from_power, rf_drive_rate)
from .design import DesignPoint, build_design
from .frame import apply_resonance_conditions, make_frame
from .optimizer import BaseDesign
from .rwa_audit import DEFAULT_MARGIN
from .scattering import IO_CONVENTIONS

RESONANCE_CHECK_REL = 1e-9


class ConfigError(NonrecipError):
    """Malformed configuration; ``lineno`` is 1-based or None."""

    def __init__(self, msg: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)


@dataclass(frozen=True)
class SweepSettings:
    omega_min: float = -5e4
    omega_max: float = 5e4
    points: int = 2001
    io_convention: str = "paper"
    omega_iso: float = 0.0
    margin: float = DEFAULT_MARGIN

    def grid(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.points)


@dataclass(frozen=True)
class OracleSettings:
    t_end: float | None = None
    tol: float = 1e-10
    drive_scale: float = 1.0
    periods: int = 8
    mode: str = "drive-shifted"


@dataclass(frozen=True)
class RunConfig:
    bare: BareParams
    drives: DriveConfig
    frame: FrameConfig
    resolve: bool = True  # bare Delta_L, omega_LC0 solved from the frame targets
    isolate: bool = True  # rf magnitude and phase solved for isolation
    mode: str = PAPER_LITERAL
    sweep: SweepSettings = field(default_factory=SweepSettings)
    oracle: OracleSettings = field(default_factory=OracleSettings)

    def design(self) -> DesignPoint:
        return build_design(self.bare, self.drives, self.frame, isolate=self.isolate,
                            mode=self.mode, resolve=self.resolve,
                            io_convention=self.sweep.io_convention, omega_iso=self.sweep.omega_iso)

    def base_design(self) -> BaseDesign:
        return BaseDesign(self.bare, self.drives, self.frame, self.mode,
                          self.sweep.io_convention, self.sweep.margin)

    def with_drives(self, drives: DriveConfig) -> "RunConfig":
        return replace(self, drives=drives, isolate=False)


# key -> (kind, required); kinds: float, int, str, bool
_SCHEMA = {
    "bare": {
        "g0_11": ("float", True), "g0_12": ("float", True), "g0_21": ("float", True),
        "g0_22": ("float", True), "kappa": ("float", True), "gamma_LC": ("float", True),
        "gamma_m1": ("float", True), "gamma_m2": ("float", True),
        "Delta_L": ("float", False), "omega_LC0": ("float", False),
        "omega_1": ("float", False), "omega_2": ("float", False),
        "nbar_1": ("float", False), "nbar_2": ("float", False), "ntilde_2": ("float", False),
    },
    "drives": {
        "E1": ("float", False), "E2": ("float", False),
        "P1": ("float", False), "P2": ("float", False),
        "kappa_in": ("float", False), "omega_L": ("float", False),
        "phi_11": ("float", False), "phi_12": ("float", False),
        "V_mag": ("float", False), "V_AC": ("float", False), "q_zpf": ("float", False),
        "phi_X": ("float", False), "omega_X": ("float", True),
    },
    "frame": {
        "omega_LC": ("float", True), "delta": ("float", True), "Delta": ("float", False),
        "susceptibility_mode": ("str", False),
    },
    "sweep": {
        "omega_min": ("float", False), "omega_max": ("float", False), "points": ("int", False),
        "io_convention": ("str", False), "omega_iso": ("float", False), "margin": ("float", False),
    },
    "oracle": {
        "t_end": ("float", False), "tol": ("float", False), "drive_scale": ("float", False),
        "periods": ("int", False), "mode": ("str", False),
    },
}


def _convert(kind: str, raw: str, lineno: int):
    try:
        if kind == "float":
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if kind == "int":
            return int(raw)
        if kind == "bool":
            if raw.lower() in ("true", "yes", "1"):
                return True
            if raw.lower() in ("false", "no", "0"):
                return False
            raise ValueError
        return raw
    except ValueError:
        raise ConfigError(f"cannot read {raw!r} as {kind}", lineno) from None


def parse_sections(text: str) -> dict[str, dict[str, tuple[object, int]]]:
    """Parse into {section: {key: (value, lineno)}} and validate names."""
    out: dict[str, dict] = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if s.startswith("["):
            if not s.endswith("]"):
                raise ConfigError(f"malformed section header {s!r}", lineno)
            section = s[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"unknown section [{section}]", lineno)
            if section in out:
                raise ConfigError(f"duplicate section [{section}]", lineno)
            out[section] = {}
            continue
        if "=" not in s:
            raise ConfigError(f"expected 'key = value', got {s!r}", lineno)
        if section is None:
            raise ConfigError("key outside of any section", lineno)
        key, raw = (p.strip() for p in s.split("=", 1))
        if key not in _SCHEMA[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno)
        if key in out[section]:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        out[section][key] = (_convert(_SCHEMA[section][key][0], raw, lineno), lineno)
    for sec, keys in _SCHEMA.items():
        for key, (_, required) in keys.items():
            if required and key not in out.get(sec, {}):
                raise ConfigError(f"missing required key {key!r} in [{sec}]")
    return out


def loads(text: str) -> RunConfig:
    sec = parse_sections(text)
    get = lambda s, k, d=None: sec.get(s, {}).get(k, (d, None))[0]
    line = lambda s, k: sec.get(s, {}).get(k, (None, None))[1]

    omega_LC, omega_X, delta = get("frame", "omega_LC"), get("drives", "omega_X"), get("frame", "delta")
    Delta, w1, w2, wp = apply_resonance_conditions(omega_LC, omega_X, delta)
    for s, k, expect in (("frame", "Delta", Delta), ("bare", "omega_1", w1), ("bare", "omega_2", w2)):
        given = get(s, k)
        if given is not None and abs(given - expect) > RESONANCE_CHECK_REL * abs(omega_LC):
            raise ConfigError(f"{k} = {given!r} violates the resonance conditions (expected {expect!r})",
                              line(s, k))

    DL, w0 = get("bare", "Delta_L"), get("bare", "omega_LC0")
    if (DL is None) != (w0 is None):
        raise ConfigError("give both Delta_L and omega_LC0, or neither",
                          line("bare", "Delta_L") or line("bare", "omega_LC0"))
    resolve = DL is None

    E = {}
    for j in (1, 2):
        if get("drives", f"E{j}") is not None:
            if get("drives", f"P{j}") is not None:
                raise ConfigError(f"give E{j} or P{j}, not both", line("drives", f"P{j}"))
            E[j] = get("drives", f"E{j}")
        elif get("drives", f"P{j}") is not None:
            kin, wL = get("drives", "kappa_in"), get("drives", "omega_L")
            if kin is None or wL is None:
                raise ConfigError(f"P{j} needs kappa_in and omega_L", line("drives", f"P{j}"))
            E[j] = drive_rate_from_power(get("drives", f"P{j}"), kin, wL)
        else:
            raise ConfigError(f"missing optical drive: give E{j} or P{j}")

    phi_X = get("drives", "phi_X", 0.0)
    V = get("drives", "V_mag")
    if get("drives", "V_AC") is not None:
        if V is not None:
            raise ConfigError("give V_mag or V_AC, not both", line("drives", "V_AC"))
        if get("drives", "q_zpf") is None:
            raise ConfigError("V_AC needs q_zpf", line("drives", "V_AC"))
        V = abs(rf_drive_rate(get("drives", "V_AC"), get("drives", "q_zpf")))
    isolate = V is None

    mode = get("frame", "susceptibility_mode", PAPER_LITERAL)
    if mode not in SUSCEPTIBILITY_MODES:
        raise ConfigError(f"unknown susceptibility_mode {mode!r}", line("frame", "susceptibility_mode"))
    io = get("sweep", "io_convention", "paper")
    if io not in IO_CONVENTIONS:
        raise ConfigError(f"unknown io_convention {io!r}", line("sweep", "io_convention"))
    omode = get("oracle", "mode", "drive-shifted")
    if omode not in SUSCEPTIBILITY_MODES:
        raise ConfigError(f"unknown oracle mode {omode!r}", line("oracle", "mode"))

    try:
        bare = BareParams(
            g0_11=get("bare", "g0_11"), g0_12=get("bare", "g0_12"), g0_21=get("bare", "g0_21"),
            g0_22=get("bare", "g0_22"), kappa=get("bare", "kappa"), gamma_LC=get("bare", "gamma_LC"),
            gamma_m1=get("bare", "gamma_m1"), gamma_m2=get("bare", "gamma_m2"), omega_1=w1, omega_2=w2,
            omega_LC0=omega_LC if resolve else w0, Delta_L=Delta if resolve else DL,
            nbar_1=get("bare", "nbar_1", 0.0), nbar_2=get("bare", "nbar_2", 0.0),
            ntilde_2=get("bare", "ntilde_2", 0.0))
        drives = DriveConfig(E1=E[1], E2=E[2], phi_11=get("drives", "phi_11", 0.0),
                             phi_12=get("drives", "phi_12", 0.0), V_mag=0.0 if V is None else V,
                             phi_X=phi_X, omega_plus=wp, omega_X=omega_X)
        sweep = SweepSettings(omega_min=get("sweep", "omega_min", -5e4),
                              omega_max=get("sweep", "omega_max", 5e4),
                              points=get("sweep", "points", 2001), io_convention=io,
                              omega_iso=get("sweep", "omega_iso", 0.0),
                              margin=get("sweep", "margin", DEFAULT_MARGIN))
        oracle = OracleSettings(t_end=get("oracle", "t_end"), tol=get("oracle", "tol", 1e-10),
                                drive_scale=get("oracle", "drive_scale", 1.0),
                                periods=get("oracle", "periods", 8), mode=omode)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if sweep.points < 1 or not sweep.omega_min <= sweep.omega_max:
        raise ConfigError("sweep needs points >= 1 and omega_min <= omega_max")
    return RunConfig(bare=bare, drives=drives, frame=make_frame(Delta, omega_LC, delta, bare),
                     resolve=resolve, isolate=isolate, mode=mode, sweep=sweep, oracle=oracle)


def load(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(cfg: RunConfig) -> str:
    """Serialize so that ``loads(dumps(cfg)) == cfg``."""
    b, d, f, s, o = cfg.bare, cfg.drives, cfg.frame, cfg.sweep, cfg.oracle
    r = repr
    lines = ["[bare]"]
    lines += [f"{k} = {r(float(getattr(b, k)))}" for k in
              ("g0_11", "g0_12", "g0_21", "g0_22", "kappa", "gamma_LC", "gamma_m1", "gamma_m2")]
    if not cfg.resolve:
        lines += [f"Delta_L = {r(b.Delta_L)}", f"omega_LC0 = {r(b.omega_LC0)}"]
    lines += [f"{k} = {r(float(getattr(b, k)))}" for k in ("nbar_1", "nbar_2", "ntilde_2")]
    lines += ["", "[drives]", f"E1 = {r(d.E1)}", f"E2 = {r(d.E2)}", f"phi_11 = {r(d.phi_11)}",
              f"phi_12 = {r(d.phi_12)}", f"omega_X = {r(d.omega_X)}"]
    if not cfg.isolate:
        lines += [f"V_mag = {r(d.V_mag)}", f"phi_X = {r(d.phi_X)}"]
    else:
        lines += [f"phi_X = {r(d.phi_X)}"]
    lines += ["", "[frame]", f"omega_LC = {r(f.omega_LC)}", f"delta = {r(f.delta)}",
              f"susceptibility_mode = {cfg.mode}"]
    lines += ["", "[sweep]", f"omega_min = {r(s.omega_min)}", f"omega_max = {r(s.omega_max)}",
              f"points = {s.points}", f"io_convention = {s.io_convention}",
              f"omega_iso = {r(s.omega_iso)}", f"margin = {r(s.margin)}"]
    lines += ["", "[oracle]"]
    if o.t_end is not None:
        lines.append(f"t_end = {r(o.t_end)}")
    lines += [f"tol = {r(o.tol)}", f"drive_scale = {r(o.drive_scale)}", f"periods = {o.periods}",
              f"mode = {o.mode}"]
    return "\n".join(lines) + "\n"


FIG3_SHARED = dict(g0_11=8.0, g0_12=20.0, g0_21=20.0, g0_22=4.0, omega_LC=6e6, omega_X=20e6)
FIG3_PANELS = {
    "a": dict(delta=-2.6e3, gamma_LC=7.88e4, gamma_m=4e3, kappa=8e5, E1=48.4e9, E2=97e9),
    "b": dict(delta=-4e3, gamma_LC=9e4, gamma_m=6e3, kappa=9e5, E1=48.7e9, E2=97e9),
}


def fig3_preset(panel: str) -> RunConfig:
    """Built-in reference parameter set ``a`` or ``b`` (all rates in rad/s)."""
    try:
        p = FIG3_PANELS[panel]
    except KeyError:
        raise ConfigError(f"unknown panel {panel!r}; choose 'a' or 'b'") from None
    sh = FIG3_SHARED
    text = f"""
[bare]
g0_11 = {sh['g0_11']!r}
g0_12 = {sh['g0_12']!r}
g0_21 = {sh['g0_21']!r}
g0_22 = {sh['g0_22']!r}
kappa = {p['kappa']!r}
gamma_LC = {p['gamma_LC']!r}
gamma_m1 = {p['gamma_m']!r}
gamma_m2 = {p['gamma_m']!r}

[drives]
E1 = {p['E1']!r}
E2 = {p['E2']!r}
omega_X = {sh['omega_X']!r}

[frame]
omega_LC = {sh['omega_LC']!r}
delta = {p['delta']!r}
"""
    return loads(text)
