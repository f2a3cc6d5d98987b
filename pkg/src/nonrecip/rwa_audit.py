"""Oscillating coefficients of the linearized equations and the RWA audit."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import BareParams, FrameConfig, MisconfiguredFrameError
from .couplings import EffectiveCouplings
from .meanfield import HarmonicCatalog, amplitude_at_time

STATIC_LABELS = ("G-_{1,1,0,+}", "G-_{1,2,2,-}", "G-_{2,1,-,+2}", "G-_{2,2,1,0}")
ZERO_FREQ_REL = 1e-6  # relative to omega_plus
RESONANCE_REL = 1e-9  # relative to omega_LC
DEFAULT_MARGIN = 0.1

_SIGN = {1: "+", -1: "-"}


@dataclass(frozen=True)
class CoefficientEntry:
    name: str
    family: str  # Theta_l, G-_{l,j}, G+_{l,j} or Gamma
    amplitude: complex
    frequency: float


@dataclass(frozen=True)
class CoefficientCatalog:
    entries: list[CoefficientEntry]
    static_terms: dict[str, CoefficientEntry]
    g_static: dict[str, complex]
    delta: float
    omega_plus: float

    def family(self, fam: str) -> list[CoefficientEntry]:
        return [e for e in self.entries if e.family == fam]

    def families(self) -> list[str]:
        return sorted({e.family for e in self.entries})

    def by_name(self) -> dict[str, CoefficientEntry]:
        return {e.name: e for e in self.entries}

    def resum(self, fam: str, t):
        """Sum of a family's harmonics at time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        return sum(e.amplitude * np.exp(1j * e.frequency * t) for e in self.family(fam))


def coefficient_catalog(catalog: HarmonicCatalog, bare: BareParams,
                        frame: FrameConfig) -> CoefficientCatalog:
    wp, wx = catalog.omega_plus, catalog.omega_X
    resid = [frame.Delta - (frame.omega_LC - wp), frame.omega_tilde_1 - frame.omega_LC,
             frame.omega_tilde_2 - (frame.omega_LC + wx), wx - 2 * wp]
    worst = max(abs(r) for r in resid)
    if worst > RESONANCE_REL * frame.omega_LC:
        raise MisconfiguredFrameError(f"resonance conditions violated (worst residual {worst:.3e} rad/s)")

    c = catalog
    g0 = bare.g0
    entries: list[CoefficientEntry] = []

    def add(name, fam, amp, freq):
        entries.append(CoefficientEntry(name, fam, complex(amp), float(freq)))

    # frequency shifts of the electromagnetic modes
    for ell in (1, 2):
        pref = -((-2) ** ell) / 2
        for s in (1, -1):
            amp_p = pref * sum(g0[ell - 1, j - 1] * (c[f"b{j}", 1, 2 * s, 0]
                                                     + np.conj(c[f"b{j}", 1, -2 * s, 0])) for j in (1, 2))
            amp_x = pref * sum(g0[ell - 1, j - 1] * (c[f"b{j}", 1, 0, 2 * s]
                                                     + np.conj(c[f"b{j}", 1, 0, -2 * s])) for j in (1, 2))
            add(f"Theta_{{{ell},+,{_SIGN[s]}}}", f"Theta_{ell}", amp_p, 2 * s * wp)
            add(f"Theta_{{{ell},X,{_SIGN[s]}}}", f"Theta_{ell}", amp_x, 2 * s * wx)

    # optomechanical enhanced couplings
    for sgn in (-1, 1):
        for j in (1, 2):
            g = g0[0, j - 1]
            base = frame.Delta + sgn * frame.omega_tilde(j)
            fam = f"G{_SIGN[sgn]}_{{1,{j}}}"
            for vs in (0, 2, -2):
                for xi in (1, -1):
                    if vs == 0:
                        amp = g * (c["a1", 0, xi, 0] + c["a1", 2, xi, 0])
                    elif np.sign(vs) == xi:
                        amp = g * c["a1", 2, xi, vs]
                    else:
                        xp = int(np.sign(vs))
                        amp = g * (c["a1", 2, -xp, 2 * xp] + c["a1", 2, 3 * xp, 0])
                    name = f"G{_SIGN[sgn]}_{{1,{j},{vs},{_SIGN[xi]}}}"
                    add(name, fam, amp, base + vs * wx + xi * wp)

    # electromechanical enhanced couplings
    a2 = lambda npl, nx: c["a2", 2, npl, nx]
    a2X0 = c["a2", 0, 0, 1]
    for sgn in (-1, 1):
        for j in (1, 2):
            g = g0[1, j - 1]
            base = frame.omega_LC + sgn * frame.omega_tilde(j)
            fam = f"G{_SIGN[sgn]}_{{2,{j}}}"
            pre = f"G{_SIGN[sgn]}_{{2,{j},"
            add(pre + "1,0}", fam, -2 * g * (a2X0 + a2(0, 1) + np.conj(a2(0, -1))), base + wx)
            add(pre + "-1,0}", fam, -2 * g * (np.conj(a2X0) + np.conj(a2(0, 1)) + a2(0, -1)), base - wx)
            for xi in (1, -1):
                add(pre + f"{3 * xi},0}}", fam, -2 * g * (a2(0, 3 * xi) + np.conj(a2(0, -3 * xi))),
                    base + 3 * xi * wx)
            for xi in (1, -1):
                add(pre + f"{_SIGN[xi]},{'+' if xi > 0 else '-'}2}}", fam,
                    -2 * g * (a2(2 * xi, xi) + np.conj(a2(-2 * xi, -xi))), base + xi * wx + 2 * xi * wp)
            add(pre + "-,+2}", fam, -4 * g * (a2(-2, 1) + a2(2, -1)).real, base - wx + 2 * wp)

    # rf self-interaction
    names = {e.name: e for e in entries}
    gamma0 = -2 * sum(g0[1, j - 1] * c[f"b{j}", 1, 0, 0].real for j in (1, 2))
    add("Gamma_0", "Gamma", gamma0, 2 * frame.omega_LC)
    for vs, w in (("+", wp), ("X", wx)):
        for s in (1, -1):
            theta = names[f"Theta_{{2,{vs},{_SIGN[s]}}}"]
            add(f"Gamma_{{{vs},{_SIGN[s]}}}", "Gamma", theta.amplitude / 2, 2 * (frame.omega_LC + s * w))

    static = {e.name: e for e in entries if abs(e.frequency) < ZERO_FREQ_REL * wp}
    g_static = {}
    by = {e.name: e for e in entries}
    if set(static) == set(STATIC_LABELS):
        g_static = {
            "g11": by["G-_{1,1,0,+}"].amplitude,
            "g12": by["G-_{1,2,2,-}"].amplitude,
            "g21": -by["G-_{2,1,-,+2}"].amplitude,
            "g22": -np.conj(by["G-_{2,2,1,0}"].amplitude),
        }
    return CoefficientCatalog(entries=entries, static_terms=static, g_static=g_static,
                              delta=frame.delta, omega_plus=wp)


def direct_coefficients(catalog: HarmonicCatalog, bare: BareParams, frame: FrameConfig, t) -> dict:
    """Time-dependent coefficients evaluated from the assembled mean fields."""
    t = np.asarray(t, dtype=float)
    a1, a2, b1, b2 = amplitude_at_time(catalog, t)
    beta = {1: b1, 2: b2}
    bdc = {j: catalog[f"b{j}", 1, 0, 0] for j in (1, 2)}
    g0 = bare.g0
    out = {}
    for ell in (1, 2):
        out[f"Theta_{ell}"] = -((-2) ** ell) * sum(
            g0[ell - 1, j - 1] * (beta[j] - bdc[j]).real for j in (1, 2)) + 0j
    for sgn in (-1, 1):
        for j in (1, 2):
            wt = frame.omega_tilde(j)
            out[f"G{_SIGN[sgn]}_{{1,{j}}}"] = g0[0, j - 1] * a1 * np.exp(1j * (frame.Delta + sgn * wt) * t)
            out[f"G{_SIGN[sgn]}_{{2,{j}}}"] = (-4 * g0[1, j - 1] * a2.real
                                               * np.exp(1j * (frame.omega_LC + sgn * wt) * t))
    out["Gamma"] = (-2 * sum(g0[1, j - 1] * beta[j].real for j in (1, 2))
                    * np.exp(2j * frame.omega_LC * t))
    return out


@dataclass(frozen=True)
class AuditRow:
    name: str
    amplitude: float
    frequency: float
    ratio: float


@dataclass(frozen=True)
class AuditReport:
    rows: list[AuditRow]
    worst_ratio: float
    worst_label: str
    delta_ratio: float
    margin: float
    rwa_pass: bool
    delta_pass: bool
    gamma_m_ratio: float = float("nan")  # informational only
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.rwa_pass and self.delta_pass

    def to_dict(self) -> dict:
        return {
            "entries": [{"name": r.name, "amplitude": r.amplitude, "frequency": r.frequency,
                         "ratio": r.ratio} for r in self.rows],
            "worst_ratio": self.worst_ratio,
            "worst_label": self.worst_label,
            "delta_ratio": self.delta_ratio,
            "gamma_m_ratio": self.gamma_m_ratio,
            "margin": self.margin,
            "pass": self.passed,
        }


def rwa_margin(cat: CoefficientCatalog, kappa: float, gamma_LC: float,
               margin: float = DEFAULT_MARGIN, couplings: EffectiveCouplings | None = None,
               gamma_m: tuple[float, float] | None = None) -> AuditReport:
    """Check every non-static coefficient against its oscillation frequency.

    The delta bound uses ``couplings`` when given, otherwise the static terms.
    """
    if not 0 < margin <= 1:
        raise ValueError("margin must lie in (0, 1]")
    rows = []
    floor = max(kappa, gamma_LC / 2)
    for e in cat.entries:
        if e.name in cat.static_terms:
            continue
        ratio = max(abs(e.amplitude), floor) / abs(e.frequency)
        rows.append(AuditRow(e.name, abs(e.amplitude), e.frequency, ratio))
    rows.sort(key=lambda r: r.name)
    worst = max(rows, key=lambda r: r.ratio)

    if couplings is not None:
        gmax = couplings.max_abs()
    elif cat.g_static:
        gmax = max(abs(v) for v in cat.g_static.values())
    else:
        gmax = 0.0
    delta_ratio = abs(cat.delta) / gmax if gmax > 0 else (0.0 if cat.delta == 0 else float("inf"))

    gm_ratio = float("nan")
    if gamma_m is not None:
        gm_ratio = max(gamma_m) / 2 / min(abs(r.frequency) for r in rows)
    return AuditReport(rows=rows, worst_ratio=worst.ratio, worst_label=worst.name,
                       delta_ratio=delta_ratio, margin=margin, rwa_pass=worst.ratio <= margin,
                       delta_pass=delta_ratio <= 1.0, gamma_m_ratio=gm_ratio)
