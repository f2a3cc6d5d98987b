"""Physical parameters, drive configuration and fixed susceptibilities.

All frequencies and rates are angular (rad/s); times are in seconds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

HBAR = 1.054571817e-34  # J s

PAPER_LITERAL = "paper-literal"
DRIVE_SHIFTED = "drive-shifted"
SusceptibilityMode = Literal["paper-literal", "drive-shifted"]
SUSCEPTIBILITY_MODES = (PAPER_LITERAL, DRIVE_SHIFTED)


class NonrecipError(Exception):
    """Base class for domain errors raised by this package."""


class InvalidParameterError(NonrecipError, ValueError):
    pass


class FrameResolutionError(NonrecipError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e} rad/s)")
        self.residual = residual


class MisconfiguredFrameError(NonrecipError):
    pass


class IncompleteCatalogError(NonrecipError, KeyError):
    pass


class SingularConfigurationError(NonrecipError):
    pass


class NoPhysicalDriveError(NonrecipError):
    pass


def _require_positive(**values: float) -> None:
    for name, v in values.items():
        if not (v > 0 and math.isfinite(v)):
            raise InvalidParameterError(f"{name} must be positive and finite, got {v!r}")


def _require_nonnegative(**values: float) -> None:
    for name, v in values.items():
        if not (v >= 0 and math.isfinite(v)):
            raise InvalidParameterError(f"{name} must be >= 0 and finite, got {v!r}")


@dataclass(frozen=True)
class BareParams:
    """Static constants of the four-mode system.

    ``Delta_L`` and ``omega_LC0`` are the bare (unshifted) optical detuning and
    rf frequency; the thermal occupations are stored but never used.
    """

    g0_11: float
    g0_12: float
    g0_21: float
    g0_22: float
    kappa: float
    gamma_LC: float
    gamma_m1: float
    gamma_m2: float
    omega_1: float
    omega_2: float
    omega_LC0: float
    Delta_L: float
    nbar_1: float = 0.0
    nbar_2: float = 0.0
    ntilde_2: float = 0.0

    def __post_init__(self):
        _require_positive(kappa=self.kappa, gamma_LC=self.gamma_LC, gamma_m1=self.gamma_m1,
                          gamma_m2=self.gamma_m2, omega_1=self.omega_1, omega_2=self.omega_2,
                          omega_LC0=self.omega_LC0)
        _require_nonnegative(nbar_1=self.nbar_1, nbar_2=self.nbar_2, ntilde_2=self.ntilde_2)
        for name in ("g0_11", "g0_12", "g0_21", "g0_22", "Delta_L"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")

    @property
    def g0(self) -> np.ndarray:
        """Bare couplings as a 2x2 array indexed [em mode, mechanical mode]."""
        return np.array([[self.g0_11, self.g0_12], [self.g0_21, self.g0_22]])

    def gamma_m(self, j: int) -> float:
        return self.gamma_m1 if j == 1 else self.gamma_m2

    def omega_m(self, j: int) -> float:
        return self.omega_1 if j == 1 else self.omega_2

    def with_(self, **changes) -> "BareParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class DriveConfig:
    """Two optical tones at +-omega_plus and one rf tone at omega_X."""

    E1: float
    E2: float
    phi_11: float
    phi_12: float
    V_mag: float
    phi_X: float
    omega_plus: float
    omega_X: float

    def __post_init__(self):
        _require_nonnegative(E1=self.E1, E2=self.E2, V_mag=self.V_mag)
        _require_positive(omega_plus=self.omega_plus, omega_X=self.omega_X)

    @property
    def calE1(self) -> complex:
        return self.E1 * np.exp(1j * self.phi_11)

    @property
    def calE2(self) -> complex:
        return self.E2 * np.exp(1j * self.phi_12)

    @property
    def Vc(self) -> complex:
        return self.V_mag * np.exp(1j * self.phi_X)

    def scaled(self, factor: float) -> "DriveConfig":
        return replace(self, E1=self.E1 * factor, E2=self.E2 * factor, V_mag=self.V_mag * factor)

    def with_(self, **changes) -> "DriveConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class FrameConfig:
    """Interaction-picture frame: shifted detuning/rf frequency and delta."""

    Delta: float
    omega_LC: float
    delta: float
    omega_tilde_1: float
    omega_tilde_2: float

    def omega_tilde(self, j: int) -> float:
        return self.omega_tilde_1 if j == 1 else self.omega_tilde_2


@dataclass(frozen=True)
class Susceptibilities:
    """Linear response functions of the four modes.

    In paper-literal mode the denominators ignore the frequency of the
    harmonic being driven; in drive-shifted mode ``optical(w)`` etc. return
    the response at frequency ``w`` in the frame of the mean-field equations.
    The stored ``chi_*`` fields are the values at the drive tones
    (``+omega_plus`` for optics, ``+omega_X`` for rf, dc for mechanics).
    """

    chi_1: complex
    chi_LC: complex
    chi_m1_prime: complex
    chi_m2_prime: complex
    mode_flag: str
    kappa: float
    Delta_L: float
    gamma_LC: float
    omega_LC0: float
    gamma_m: tuple[float, float]
    omega_m: tuple[float, float]

    @property
    def shifted(self) -> bool:
        return self.mode_flag == DRIVE_SHIFTED

    def optical(self, w: float = 0.0) -> complex:
        w = w if self.shifted else 0.0
        return 1.0 / (self.kappa + 1j * (self.Delta_L + w))

    def rf(self, w: float = 0.0) -> complex:
        w = w if self.shifted else 0.0
        return 1.0 / (self.gamma_LC / 2 + 1j * (self.omega_LC0 + w))

    def mech(self, j: int, w: float = 0.0) -> complex:
        w = w if self.shifted else 0.0
        return 1.0 / (self.gamma_m[j - 1] / 2 + 1j * (self.omega_m[j - 1] + w))

    def chi_m_prime(self, j: int) -> complex:
        return self.chi_m1_prime if j == 1 else self.chi_m2_prime


def drive_rate_from_power(P: float, kappa_in: float, omega_L: float) -> float:
    """Optical driving rate E = sqrt(2 kappa_in P / (hbar omega_L))."""
    _require_positive(kappa_in=kappa_in, omega_L=omega_L)
    _require_nonnegative(P=P)
    return math.sqrt(2.0 * kappa_in * P / (HBAR * omega_L))


def rf_drive_rate(V_AC: float, q_zpf: float, phi_X: float = 0.0) -> complex:
    """Complex rf driving rate from the voltage amplitude and charge zero-point fluctuation."""
    _require_positive(q_zpf=q_zpf)
    _require_nonnegative(V_AC=V_AC)
    return q_zpf * V_AC / (2.0 * HBAR * math.sqrt(2.0)) * np.exp(1j * phi_X)


def susceptibilities(bare: BareParams, drives: DriveConfig | None = None,
                     mode: str = PAPER_LITERAL) -> Susceptibilities:
    if mode not in SUSCEPTIBILITY_MODES:
        raise InvalidParameterError(f"unknown susceptibility mode {mode!r}")
    if mode == DRIVE_SHIFTED and drives is None:
        raise InvalidParameterError("drive-shifted susceptibilities need the drive tones")
    proto = Susceptibilities(
        chi_1=0j, chi_LC=0j, chi_m1_prime=0j, chi_m2_prime=0j, mode_flag=mode,
        kappa=bare.kappa, Delta_L=bare.Delta_L, gamma_LC=bare.gamma_LC,
        omega_LC0=bare.omega_LC0, gamma_m=(bare.gamma_m1, bare.gamma_m2),
        omega_m=(bare.omega_1, bare.omega_2),
    )
    wp = drives.omega_plus if drives is not None else 0.0
    wx = drives.omega_X if drives is not None else 0.0
    return replace(proto, chi_1=proto.optical(wp), chi_LC=proto.rf(wx),
                   chi_m1_prime=proto.mech(1), chi_m2_prime=proto.mech(2))
