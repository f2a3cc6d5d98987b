"""Scattering matrix of the rotating-wave model and the isolation conditions.

Outputs follow ``a_out = s_f * sqrt(rate) * delta_a + s_in * a_in``. The
input-output convention picks the two signs:

* ``paper``    : (+1, +1), the default sign choice of the model
* ``flip-in``  : (+1, -1), passive reflection for a decoupled cavity
* ``flip-out`` : (-1, +1), reproduces the minus sign in front of F/D
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (BareParams, DriveConfig, FrameConfig, NoPhysicalDriveError, NonrecipError,
                   SingularConfigurationError, Susceptibilities)
from .couplings import (EffectiveCouplings, effective_couplings_closed, mu_nu, r_param,
                        varphi_of)

IO_CONVENTIONS = {"paper": (1.0, 1.0), "flip-in": (1.0, -1.0), "flip-out": (-1.0, 1.0)}
SINGULAR_D = 1e-30
ISOLATION_CAP_DB = 300.0


@dataclass(frozen=True)
class ScatteringResult:
    omega_grid: np.ndarray
    S: np.ndarray  # (n, 2, 2)
    T: np.ndarray  # (n, 2, 2), columns = mechanical inputs
    F12: np.ndarray
    F21: np.ndarray
    D: np.ndarray
    chi_m1: np.ndarray
    chi_m2: np.ndarray
    singular: np.ndarray

    def abs2(self, which: str) -> np.ndarray:
        """|X_jk|^2 for a label such as ``'S12'`` or ``'T21'``."""
        mat = self.S if which[0] == "S" else self.T
        return np.abs(mat[:, int(which[1]) - 1, int(which[2]) - 1]) ** 2

    def at(self, omega: float) -> int:
        return int(np.argmin(np.abs(self.omega_grid - omega)))


@dataclass(frozen=True)
class NonrecipSolution:
    required_phase: float
    required_Vmag: float
    phase_assignment: tuple[float, float, float]
    residual_S12: float
    backward_S21: float
    F21_at_zero: complex
    G_param: float
    r: complex
    drives: DriveConfig
    couplings: EffectiveCouplings

    def to_dict(self) -> dict:
        return {
            "required_phase": self.required_phase,
            "required_Vmag": self.required_Vmag,
            "phase_assignment": {"phi_11": self.phase_assignment[0],
                                 "phi_12": self.phase_assignment[1],
                                 "phi_X": self.phase_assignment[2]},
            "residual_S12": self.residual_S12,
            "backward_S21": self.backward_S21,
            "F21_at_zero": [self.F21_at_zero.real, self.F21_at_zero.imag],
            "G_param": self.G_param,
            "r": [self.r.real, self.r.imag],
        }


def mechanical_susceptibility(gamma_m: float, j: int, delta: float, omega):
    """Interaction-picture mechanical response 1/(gamma/2 + i((-1)^j delta - omega))."""
    return 1.0 / (gamma_m / 2 + 1j * ((-1) ** j * delta - np.asarray(omega, dtype=float)))


def _io(io_convention: str):
    try:
        return IO_CONVENTIONS[io_convention]
    except KeyError:
        raise NonrecipError(f"unknown input-output convention {io_convention!r}") from None


def smatrix(bare: BareParams, frame: FrameConfig, couplings: EffectiveCouplings, omega,
            io_convention: str = "paper") -> ScatteringResult:
    """Closed-form S and T after eliminating the mechanical modes."""
    sf, sin = _io(io_convention)
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    k, gLC = bare.kappa, bare.gamma_LC
    g11, g12, g21, g22 = couplings.g11, couplings.g12, couplings.g21, couplings.g22
    cm1 = mechanical_susceptibility(bare.gamma_m1, 1, frame.delta, w)
    cm2 = mechanical_susceptibility(bare.gamma_m2, 2, frame.delta, w)

    F12 = g11 * cm1 * g21 + g12 * cm2 * g22
    F21 = np.conj(g11) * cm1 * np.conj(g21) + np.conj(g12) * cm2 * np.conj(g22)
    N11 = abs(g11) ** 2 * cm1 + abs(g12) ** 2 * cm2 + k - 1j * w
    N22 = abs(g21) ** 2 * cm1 + abs(g22) ** 2 * cm2 + gLC / 2 - 1j * w
    D = N11 * N22 - F12 * F21
    singular = np.abs(D) < SINGULAR_D
    with np.errstate(divide="ignore", invalid="ignore"):
        invD = 1.0 / D
        r1, r2 = np.sqrt(2 * k), np.sqrt(gLC)
        S = np.empty((w.size, 2, 2), dtype=complex)
        S[:, 0, 0] = sin + sf * r1 * r1 * N22 * invD
        S[:, 0, 1] = sf * r1 * r2 * F12 * invD
        S[:, 1, 0] = sf * r1 * r2 * F21 * invD
        S[:, 1, 1] = sin + sf * r2 * r2 * N11 * invD

        # effective drive of each em mode by mechanical input j: (c1j, c2j)
        c1 = (-1j * g11 * cm1, -1j * g12 * cm2)
        c2 = (1j * np.conj(g21) * cm1, 1j * np.conj(g22) * cm2)
        sg = (np.sqrt(bare.gamma_m1), np.sqrt(bare.gamma_m2))
        T = np.empty((w.size, 2, 2), dtype=complex)
        for j in range(2):
            T[:, 0, j] = sf * r1 * (N22 * c1[j] + F12 * c2[j]) * invD * sg[j]
            T[:, 1, j] = sf * r2 * (F21 * c1[j] + N11 * c2[j]) * invD * sg[j]
    return ScatteringResult(w, S, T, F12, F21, D, cm1, cm2, singular)


def response_matrix(bare: BareParams, frame: FrameConfig, couplings: EffectiveCouplings) -> np.ndarray:
    """Drift matrix M of d/dt (a1, a2, b1, b2) = M x + inputs, from the RWA equations."""
    g11, g12, g21, g22 = couplings.g11, couplings.g12, couplings.g21, couplings.g22
    d = frame.delta
    return np.array([
        [-bare.kappa, 0, -1j * g11, -1j * g12],
        [0, -bare.gamma_LC / 2, 1j * np.conj(g21), 1j * np.conj(g22)],
        [-1j * np.conj(g11), 1j * g21, -(bare.gamma_m1 / 2 - 1j * d), 0],
        [-1j * np.conj(g12), 1j * g22, 0, -(bare.gamma_m2 / 2 + 1j * d)],
    ], dtype=complex)


def smatrix_direct(bare: BareParams, frame: FrameConfig, couplings: EffectiveCouplings, omega,
                   io_convention: str = "paper") -> ScatteringResult:
    """Numerical solve of the full four-mode frequency-domain system."""
    sf, sin = _io(io_convention)
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    M = response_matrix(bare, frame, couplings)
    B = np.diag([np.sqrt(2 * bare.kappa), np.sqrt(bare.gamma_LC),
                 np.sqrt(bare.gamma_m1), np.sqrt(bare.gamma_m2)]).astype(complex)
    A = -1j * w[:, None, None] * np.eye(4) - M[None]
    singular = np.zeros(w.size, dtype=bool)
    try:
        X = np.linalg.solve(A, np.broadcast_to(B, A.shape))
    except np.linalg.LinAlgError:
        X = np.full(A.shape, np.nan, dtype=complex)
        for i in range(w.size):
            try:
                X[i] = np.linalg.solve(A[i], B)
            except np.linalg.LinAlgError:
                singular[i] = True
    out_rates = np.array([np.sqrt(2 * bare.kappa), np.sqrt(bare.gamma_LC)])
    S = sf * out_rates[None, :, None] * X[:, :2, :2] + sin * np.eye(2)[None]
    T = sf * out_rates[None, :, None] * X[:, :2, 2:]

    # diagnostics share the closed-form definitions
    closed = smatrix(bare, frame, couplings, w, io_convention)
    singular |= closed.singular
    return ScatteringResult(w, S, T, closed.F12, closed.F21, closed.D, closed.chi_m1,
                            closed.chi_m2, singular)


def isolation_solve(bare: BareParams, drives_partial: DriveConfig, chis: Susceptibilities,
                    frame: FrameConfig, omega: float = 0.0,
                    io_convention: str = "paper") -> NonrecipSolution:
    """Choose |V'| and the rf phase so that forward conversion S12 vanishes at ``omega``.

    The optical phases of ``drives_partial`` are kept; ``phi_X`` absorbs the
    required phase combination.
    """
    mu, nu = mu_nu(bare, chis)
    if mu == 0:
        raise SingularConfigurationError("mu vanishes; nu/mu is undefined")
    cm1 = mechanical_susceptibility(bare.gamma_m1, 1, frame.delta, omega)
    cm2 = mechanical_susceptibility(bare.gamma_m2, 2, frame.delta, omega)
    r = r_param(bare, chis, complex(cm1 / cm2))
    q = nu / mu
    if q + r == 0:
        raise SingularConfigurationError("nu/mu + r vanishes")
    cLC = chis.chi_LC
    rhs = (cLC / np.conj(cLC)) * (q + np.conj(r)) / (q + r)
    if abs(abs(rhs) - 1) > 1e-12:
        raise NonrecipError(f"phase condition lost unit modulus: |rhs| = {abs(rhs)!r}")
    G = q + 2 * r.real
    if not G > 0:
        raise NoPhysicalDriveError(f"isolation needs G = nu/mu + 2 Re r > 0, got {G:.6g}")
    if drives_partial.E1 == 0:
        raise SingularConfigurationError("isolation needs a nonzero optical drive E1")
    target = float(np.angle(rhs))
    Vmag = abs(chis.chi_1 * drives_partial.calE1 / cLC) * np.sqrt(G)
    phi_11, phi_12 = drives_partial.phi_11, drives_partial.phi_12
    phi_X = phi_11 - phi_12 - (target + np.pi) / 2
    drives = drives_partial.with_(V_mag=float(Vmag), phi_X=float(phi_X))
    assert abs(np.exp(1j * varphi_of(drives)) - rhs) < 1e-9

    cpl = effective_couplings_closed(bare, drives, chis)
    res = smatrix(bare, frame, cpl, omega, io_convention)
    return NonrecipSolution(
        required_phase=target, required_Vmag=float(Vmag), phase_assignment=(phi_11, phi_12, phi_X),
        residual_S12=float(res.abs2("S12")[0]), backward_S21=float(res.abs2("S21")[0]),
        F21_at_zero=complex(res.F21[0]), G_param=float(G), r=r, drives=drives, couplings=cpl,
    )


def isolation_db(result: ScatteringResult) -> np.ndarray:
    """10 log10(|S21|^2/|S12|^2), capped at +-300 dB."""
    s12, s21 = result.abs2("S12"), result.abs2("S21")
    with np.errstate(divide="ignore", invalid="ignore"):
        iso = 10 * np.log10(s21 / s12)
    iso = np.where((s12 == 0) & (s21 > 0), ISOLATION_CAP_DB, iso)
    iso = np.where((s12 == 0) & (s21 == 0), 0.0, iso)
    return np.clip(iso, -ISOLATION_CAP_DB, ISOLATION_CAP_DB)


def isolation_bandwidth(result: ScatteringResult, floor: float = 20.0) -> tuple[float, float]:
    """Width of the contiguous band around omega = 0 where isolation >= floor (dB)."""
    w = result.omega_grid
    i0 = result.at(0.0)
    if abs(w[i0]) > 1e-9 * max(1.0, float(np.max(np.abs(w)))):
        raise NonrecipError("the frequency grid must contain omega = 0")
    iso = isolation_db(result)
    peak = float(np.max(iso))
    if not iso[i0] >= floor:
        return 0.0, peak
    lo = hi = i0
    while lo > 0 and iso[lo - 1] >= floor:
        lo -= 1
    while hi < w.size - 1 and iso[hi + 1] >= floor:
        hi += 1
    return float(w[hi] - w[lo]), peak
