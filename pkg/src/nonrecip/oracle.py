"""Independent checks: nonlinear mean-field integration and S-matrix equivalence.

The classical mean-field equations are integrated to a periodic steady state
with an adaptive explicit Runge-Kutta scheme; Fourier projections of the
final window are compared with the perturbative harmonic catalog.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import DOP853, solve_ivp

from .core import (DRIVE_SHIFTED, PAPER_LITERAL, BareParams, DriveConfig, FrameConfig, InvalidParameterError,
                   NonrecipError, susceptibilities)
from .couplings import EffectiveCouplings
from .meanfield import MODES, HarmonicCatalog, HarmonicKey, amplitude_at_time, perturbative_harmonics
from .scattering import smatrix, smatrix_direct

MIN_TRANSIENT_DECAYS = 8.0  # t_end >= this / min(gamma_m)
DEFAULT_TRANSIENT_DECAYS = 10.0
SAMPLES_FACTOR = 40


class IntegrationError(NonrecipError):
    pass


class StiffnessError(IntegrationError):
    pass


class DivergenceError(IntegrationError):
    pass


class TransientError(IntegrationError):
    pass


class ProjectionLeakageError(NonrecipError):
    pass


@dataclass
class Trajectory:
    t: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    omega_plus: float
    omega_X: float
    integrator_stats: dict = field(default_factory=dict)

    def state(self) -> np.ndarray:
        return np.vstack([self.alpha1, self.alpha2, self.beta1, self.beta2])

    def mode(self, name: str) -> np.ndarray:
        return {"a1": self.alpha1, "a2": self.alpha2, "b1": self.beta1, "b2": self.beta2}[name]


class _TrackedDOP853(DOP853):
    """DOP853 that remembers the largest accepted scaled error norm."""

    record: dict = {}

    def _estimate_error_norm(self, K, h, scale):
        norm = super()._estimate_error_norm(K, h, scale)
        if norm < 1:
            self.record["max"] = max(self.record.get("max", 0.0), float(norm))
        return norm


def mean_field_rhs(bare: BareParams, drives: DriveConfig):
    """Right-hand side of the classical equations for (alpha1, alpha2, beta1, beta2)."""
    d1 = bare.kappa + 1j * bare.Delta_L
    d2 = bare.gamma_LC / 2 + 1j * bare.omega_LC0
    dm1 = bare.gamma_m1 / 2 + 1j * bare.omega_1
    dm2 = bare.gamma_m2 / 2 + 1j * bare.omega_2
    E1, E2, V = drives.calE1, drives.calE2, drives.Vc
    wp, wx = drives.omega_plus, drives.omega_X
    g11, g12, g21, g22 = bare.g0_11, bare.g0_12, bare.g0_21, bare.g0_22

    def rhs(t, y):
        a1, a2, b1, b2 = y
        x1 = 2 * b1.real
        x2 = 2 * b2.real
        q = 2 * a2.real
        n1 = a1.real**2 + a1.imag**2
        ep = complex(math.cos(wp * t), math.sin(wp * t))
        ex = complex(math.cos(wx * t), math.sin(wx * t))
        return np.array([
            -d1 * a1 - 1j * (E1 * ep + E2 * ep.conjugate()) - 1j * a1 * (g11 * x1 + g12 * x2),
            -d2 * a2 + 2j * q * (g21 * x1 + g22 * x2) + 1j * V * ex,
            -dm1 * b1 - 1j * g11 * n1 + 1j * g21 * q * q,
            -dm2 * b2 - 1j * g12 * n1 + 1j * g22 * q * q,
        ])

    return rhs


def _window_grid(drives: DriveConfig, bare: BareParams, t_end: float, periods: int):
    wmax = max(3 * drives.omega_X, 3 * drives.omega_plus, bare.omega_LC0)
    base = 2 * np.pi / drives.omega_plus
    per = int(math.ceil(SAMPLES_FACTOR * wmax / drives.omega_plus))
    n = periods * per
    t0 = t_end - periods * base
    return t0, t0 + base * np.arange(n + 1) / per, per


def _solve(rhs, t_span, y0, tol, atol, t_eval):
    record = {"max": 0.0}
    solver = type("_S", (_TrackedDOP853,), {"record": record})
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(rhs, t_span, y0, method=solver, rtol=tol, atol=atol, t_eval=t_eval,
                        first_step=min(1e-10, (t_span[1] - t_span[0]) / 10))
    if sol.status != 0:
        if "step size" in sol.message:
            raise StiffnessError(f"integrator step size collapsed at t={sol.t[-1]:.4e}: {sol.message}")
        raise IntegrationError(sol.message)
    if not np.all(np.isfinite(sol.y)):
        raise DivergenceError("non-finite state encountered during integration")
    return sol, record["max"]


def _scale(bare, drives, y0):
    chis = susceptibilities(bare, drives, DRIVE_SHIFTED)
    guess = np.abs(np.array(amplitude_at_time(perturbative_harmonics(bare, drives, chis), 0.0)))
    return np.maximum(np.maximum(guess, np.abs(y0)), 1e-6)


def integrate_classical(bare: BareParams, drives: DriveConfig, t_end: float | None = None,
                        tol: float = 1e-10, *, y0=None, periods: int = 8,
                        extend: bool = True, periodicity_factor: float = 10.0) -> Trajectory:
    """Integrate the mean-field equations and resample the last ``periods`` base periods.

    ``y0`` defaults to the drive-shifted perturbative state at t = 0, which keeps
    the initial transient at the size of the truncation error. Pass zeros to
    start from the empty system.
    """
    gmin = min(bare.gamma_m1, bare.gamma_m2)
    if t_end is None:
        t_end = DEFAULT_TRANSIENT_DECAYS / gmin
    if t_end < MIN_TRANSIENT_DECAYS / gmin * (1 - 1e-12):
        raise InvalidParameterError(f"t_end must be >= {MIN_TRANSIENT_DECAYS}/min(gamma_m)")
    if not 1e-12 <= tol <= 1e-6:
        raise InvalidParameterError("tol must lie in [1e-12, 1e-6]")
    if y0 is None:
        chis = susceptibilities(bare, drives, DRIVE_SHIFTED)
        y0 = np.array(amplitude_at_time(perturbative_harmonics(bare, drives, chis), 0.0))
    y0 = np.asarray(y0, dtype=complex)
    atol = tol * _scale(bare, drives, y0)
    rhs = mean_field_rhs(bare, drives)

    t_start = 0.0
    state = y0
    steps = nfev = 0
    err = 0.0
    total = t_end
    for attempt in range(2):
        t0, grid, per = _window_grid(drives, bare, total, periods)
        if t0 > t_start:
            sol, e = _solve(rhs, (t_start, t0), state, tol, atol, [t0])
            state = sol.y[:, -1]
            steps += sol.t.size
            nfev += sol.nfev
            err = max(err, e)
        sol, e = _solve(rhs, (t0, grid[-1]), state, tol, atol, grid)
        nfev += sol.nfev
        err = max(err, e)
        X = sol.y
        resid = _periodicity(X, per)
        if resid <= periodicity_factor * tol or not extend or attempt == 1:
            break
        # extend the run once, continuing from the end of the transient phase
        t_start, total = t0, 2 * t_end
    traj = Trajectory(t=grid, alpha1=X[0], alpha2=X[1], beta1=X[2], beta2=X[3],
                      omega_plus=drives.omega_plus, omega_X=drives.omega_X)
    traj.integrator_stats = {"nfev": int(nfev), "t_end": float(grid[-1]), "tol": tol,
                             "max_error_norm": err, "max_local_error": err * tol,
                             "periodicity_residual": resid, "extended": attempt == 1,
                             "samples_per_period": per}
    if extend and resid > periodicity_factor * tol:
        raise TransientError(f"no periodic steady state: residual {resid:.3e} after extension")
    return traj


def _periodicity(X: np.ndarray, per: int) -> float:
    """max_t ||x(t + T) - x(t)|| / max_t ||x(t)|| over the sampled window."""
    diff = np.linalg.norm(X[:, per:] - X[:, :-per], axis=0)
    return float(np.max(diff) / np.max(np.linalg.norm(X, axis=0)))


def periodicity_residual(traj: Trajectory) -> float:
    per = int(round((2 * np.pi / traj.omega_plus) / (traj.t[1] - traj.t[0])))
    return _periodicity(traj.state(), per)


def _freq_index(key, omega_plus: float, omega_X: float) -> int:
    """Frequency of a label in units of omega_plus (requires commensurate tones)."""
    ratio = omega_X / omega_plus
    if abs(ratio - round(ratio)) > 1e-12 * ratio:
        raise ProjectionLeakageError("drive tones are not commensurate; harmonics overlap")
    return int(key.n_plus + key.n_X * round(ratio))


def project(signal: np.ndarray, t: np.ndarray, omega: float, omega_plus: float) -> complex:
    """(1/window) * integral of signal * exp(-i omega t) by the trapezoid rule."""
    span = t[-1] - t[0]
    n_periods = span * omega_plus / (2 * np.pi)
    if abs(n_periods - round(n_periods)) > 1e-9 * max(1.0, n_periods) or round(n_periods) < 1:
        raise ProjectionLeakageError(f"window spans {n_periods:.6f} base periods, not an integer")
    if abs(omega * span / (2 * np.pi) - round(omega * span / (2 * np.pi))) > 1e-6:
        raise ProjectionLeakageError("projection frequency is not periodic on the window")
    return complex(np.trapezoid(signal * np.exp(-1j * omega * t), t) / span)


def extract_harmonics(traj: Trajectory, keys) -> dict:
    """Fourier coefficient of each requested (mode, ..., n_plus, n_X) label."""
    span = traj.t[-1] - traj.t[0]
    if round(span * traj.omega_plus / (2 * np.pi)) < 4:
        raise ProjectionLeakageError("analysis window must span at least 4 base periods")
    out = {}
    for key in keys:
        m = _freq_index(key, traj.omega_plus, traj.omega_X)
        out[key] = project(traj.mode(key.mode), traj.t, m * traj.omega_plus, traj.omega_plus)
    return out


@dataclass(frozen=True)
class ComparisonRow:
    mode: str
    freq_index: int  # frequency / omega_plus
    keys: tuple
    max_order: int
    min_order: int
    analytic: complex
    measured: complex
    rel_err: float

    @property
    def label(self) -> str:
        return f"{self.mode}@{self.freq_index:+d}w+"


@dataclass(frozen=True)
class HarmonicComparison:
    rows: list[ComparisonRow]
    worst_key: str
    worst_rel_err: float
    worst_order2: float
    scaling_check: tuple | None  # (worst order-2 err at 1, at 1/2, ratio)
    dc_beta: dict
    minus_X_relations: dict
    outside_energy_fraction: float
    mode_flag: str
    stats: dict

    def to_dict(self) -> dict:
        return {
            "rows": [{"label": r.label, "keys": [list(k) for k in r.keys],
                      "analytic": [r.analytic.real, r.analytic.imag],
                      "measured": [r.measured.real, r.measured.imag],
                      "rel_err": r.rel_err} for r in self.rows],
            "worst_key": self.worst_key,
            "worst_rel_err": self.worst_rel_err,
            "worst_order2": self.worst_order2,
            "scaling_check": list(self.scaling_check) if self.scaling_check else None,
            "dc_beta": {k: [v.real, v.imag] for k, v in self.dc_beta.items()},
            "minus_X_relations": self.minus_X_relations,
            "outside_energy_fraction": self.outside_energy_fraction,
            "mode": self.mode_flag,
            "stats": self.stats,
        }


def grouped_catalog(catalog: HarmonicCatalog) -> dict:
    """Catalog entries summed per (mode, frequency index)."""
    groups: dict = {}
    for k, v in catalog.entries.items():
        m = _freq_index(k, catalog.omega_plus, catalog.omega_X)
        g = groups.setdefault((k.mode, m), {"keys": [], "value": 0j})
        g["keys"].append(k)
        g["value"] += v
    return groups


def compare_to_catalog(traj: Trajectory, catalog: HarmonicCatalog):
    """Rows of analytic vs measured coefficients, grouped by physical frequency."""
    rows = []
    for (mode, m), g in grouped_catalog(catalog).items():
        measured = project(traj.mode(mode), traj.t, m * traj.omega_plus, traj.omega_plus)
        analytic = g["value"]
        rel = abs(analytic - measured) / max(abs(measured), np.finfo(float).tiny)
        orders = [k.order for k in g["keys"]]
        rows.append(ComparisonRow(mode, m, tuple(g["keys"]), max(orders), min(orders),
                                  complex(analytic), measured, float(rel)))
    return rows


def outside_energy_fraction(traj: Trajectory, catalog: HarmonicCatalog) -> float:
    """AC energy at frequencies absent from the catalog, relative to total AC energy."""
    total_ac = outside = 0.0
    groups = grouped_catalog(catalog)
    span = traj.t[-1] - traj.t[0]
    n_per = int(round(span * traj.omega_plus / (2 * np.pi)))
    for mode in MODES:
        x = traj.mode(mode)[:-1]  # drop the duplicated endpoint: exact DFT over the window
        spec = np.fft.fft(x) / x.size
        freqs = np.fft.fftfreq(x.size, d=1.0 / x.size)  # cycles per window
        power = np.abs(spec) ** 2
        known = {m for (md, m) in groups if md == mode}
        for f, p in zip(freqs, power):
            if f == 0:
                continue
            total_ac += p
            if f % n_per != 0 or int(f // n_per) not in known:
                outside += p
    return float(outside / total_ac) if total_ac > 0 else 0.0


def _order2_worst(rows) -> float:
    pure = [r.rel_err for r in rows if r.min_order == 2]
    return max(pure) if pure else float("nan")


def verify_expansion(bare: BareParams, drives: DriveConfig, *, mode: str = DRIVE_SHIFTED,
                     drive_scale: float = 1.0, tol: float = 1e-10, t_end: float | None = None,
                     periods: int = 8, scaling: bool = True) -> HarmonicComparison:
    """Compare the perturbative catalog with the integrated steady state.

    With ``scaling`` the comparison is repeated at half the drive amplitudes and
    the ratio of the worst pure second-order errors is reported.
    """
    def run(scale):
        dr = drives.scaled(scale)
        cat = perturbative_harmonics(bare, dr, susceptibilities(bare, dr, mode))
        traj = integrate_classical(bare, dr, t_end, tol, periods=periods)
        return cat, traj, compare_to_catalog(traj, cat)

    cat, traj, rows = run(drive_scale)
    worst = max(rows, key=lambda r: r.rel_err)
    w2 = _order2_worst(rows)
    scaling_check = None
    if scaling:
        _, _, rows_half = run(drive_scale / 2)
        w2h = _order2_worst(rows_half)
        scaling_check = (w2, w2h, w2h / w2)

    dc = {f"b{j}": {"analytic": cat[f"b{j}", 1, 0, 0],
                    "measured": project(traj.mode(f"b{j}"), traj.t, 0.0, traj.omega_plus)}
          for j in (1, 2)}
    dc_flat = {f"{k}_{kind}": v for k, d in dc.items() for kind, v in d.items()}

    # alpha_{2,-X}: measured vs the optical-phase conjugation relation and the rf-phase one
    a2X = cat["a2", 2, 0, 1]
    meas = project(traj.alpha2, traj.t, -drives.omega_X, traj.omega_plus)
    lit = susceptibilities(bare, drives.scaled(drive_scale), PAPER_LITERAL)
    c1, cLC = lit.chi_1, lit.chi_LC
    rel = {
        "measured": [meas.real, meas.imag],
        "shifted_expansion_rel_err": abs(cat["a2", 2, 0, -1] - meas) / abs(meas),
        "chi1_relation_rel_err": abs(-(c1 / np.conj(c1)) * np.conj(a2X) - meas) / abs(meas),
        "chiLC_relation_rel_err": abs(-(cLC / np.conj(cLC)) * np.conj(a2X) - meas) / abs(meas),
    }
    return HarmonicComparison(
        rows=sorted(rows, key=lambda r: (MODES.index(r.mode), r.freq_index)),
        worst_key=worst.label, worst_rel_err=worst.rel_err, worst_order2=w2,
        scaling_check=scaling_check, dc_beta=dc_flat, minus_X_relations=rel,
        outside_energy_fraction=outside_energy_fraction(traj, cat), mode_flag=mode,
        stats=traj.integrator_stats,
    )


@dataclass(frozen=True)
class EquivalenceReport:
    max_deviation: float
    excluded: np.ndarray  # omega values flagged singular


def smatrix_equivalence(bare: BareParams, frame: FrameConfig, couplings: EffectiveCouplings,
                        omega_grid, io_convention: str = "paper", eps: float = 1e-300) -> EquivalenceReport:
    """Max relative deviation between the closed form and the direct four-mode solve."""
    closed = smatrix(bare, frame, couplings, omega_grid, io_convention)
    direct = smatrix_direct(bare, frame, couplings, omega_grid, io_convention)
    ok = ~(closed.singular | direct.singular)
    a = np.concatenate([closed.S[ok].reshape(ok.sum(), -1), closed.T[ok].reshape(ok.sum(), -1)], axis=1)
    b = np.concatenate([direct.S[ok].reshape(ok.sum(), -1), direct.T[ok].reshape(ok.sum(), -1)], axis=1)
    dev = np.abs(a - b) / np.maximum(np.abs(a), eps)
    return EquivalenceReport(float(np.max(dev)) if dev.size else 0.0, closed.omega_grid[~ok])
