"""Static effective couplings of the rotating-wave model and derived quantities."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (BareParams, DriveConfig, NonrecipError, SingularConfigurationError,
                   Susceptibilities)
from .meanfield import HarmonicCatalog

CLOSED_FORM = "closed-form"
ASSEMBLED = "assembled"
REAL_GUARD = 1e-12


@dataclass(frozen=True)
class EffectiveCouplings:
    g11: complex
    g12: complex
    g21: complex
    g22: complex
    mu: float
    nu: float
    source_tag: str

    def as_array(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g21, self.g22]])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.as_array())))


@dataclass(frozen=True)
class IsolationQuantities:
    r: complex
    s: complex
    G_param: float
    varphi: float


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > REAL_GUARD * max(abs(z), np.finfo(float).tiny):
        raise NonrecipError(f"{what} has a non-negligible imaginary part: {z!r}")
    return float(z.real)


def mu_nu(bare: BareParams, chis: Susceptibilities) -> tuple[float, float]:
    im1 = complex(chis.chi_m1_prime).imag
    im2 = complex(chis.chi_m2_prime).imag
    mu = complex(bare.g0_11 * bare.g0_21 * im1 + bare.g0_12 * bare.g0_22 * im2)
    nu = complex(bare.g0_11**2 * im1 + bare.g0_12**2 * im2)
    return _real(mu, "mu"), _real(nu, "nu")


def effective_couplings_closed(bare: BareParams, drives: DriveConfig,
                               chis: Susceptibilities) -> EffectiveCouplings:
    """Leading-order closed forms for g11, g12, g21, g22."""
    mu, nu = mu_nu(bare, chis)
    c1, cLC = chis.chi_1, chis.chi_LC
    E1, E2, V = drives.calE1, drives.calE2, drives.Vc
    g11 = -1j * bare.g0_11 * c1 * E1
    g12 = -2 * bare.g0_12 * c1**2 * (abs(c1) ** 2 * E1**2 * np.conj(E2) * nu
                                     + cLC**2 * E2 * V**2 * mu)
    g21 = (-32 * bare.g0_21 * abs(c1) ** 2 * cLC.imag
           * (np.conj(cLC) * E1 * np.conj(E2) * np.conj(V)).imag * mu)
    g22 = -2j * bare.g0_22 * np.conj(cLC) * np.conj(V)
    return EffectiveCouplings(complex(g11), complex(g12), complex(g21), complex(g22),
                              mu, nu, CLOSED_FORM)


def effective_couplings_assembled(catalog: HarmonicCatalog, bare: BareParams,
                                  chis: Susceptibilities | None = None) -> EffectiveCouplings:
    """Couplings assembled from the mean-field harmonic coefficients.

    ``chis`` is only used to attach mu and nu; without it they are NaN.
    """
    g11 = bare.g0_11 * catalog["a1", 0, 1, 0]
    g12 = bare.g0_12 * (catalog["a1", 2, -1, 2] + catalog["a1", 2, 3, 0])
    g21 = 4 * bare.g0_21 * (catalog["a2", 2, -2, 1] + catalog["a2", 2, 2, -1]).real
    g22 = 2 * bare.g0_22 * np.conj(catalog["a2", 0, 0, 1])
    mu, nu = mu_nu(bare, chis) if chis is not None else (float("nan"), float("nan"))
    return EffectiveCouplings(complex(g11), complex(g12), complex(g21), complex(g22),
                              mu, nu, ASSEMBLED)


def second_order_bounds(catalog: HarmonicCatalog) -> tuple[float, float]:
    """Relative size of the dropped second-order corrections to g11 and g22."""
    b11 = abs(catalog["a1", 2, 1, 0]) / abs(catalog["a1", 0, 1, 0])
    b22 = (abs(catalog["a2", 2, 0, 1] + np.conj(catalog["a2", 2, 0, -1]))
           / abs(catalog["a2", 0, 0, 1]))
    return b11, b22


def varphi_of(drives: DriveConfig) -> float:
    """Drive-phase combination 2(phi_11 - phi_12 - phi_X) - pi wrapped to (-pi, pi]."""
    raw = 2 * (drives.phi_11 - drives.phi_12 - drives.phi_X) - np.pi
    return float(raw - 2 * np.pi * np.ceil((raw - np.pi) / (2 * np.pi)))


def r_param(bare: BareParams, chis: Susceptibilities, chi_m_ratio: complex) -> complex:
    if bare.g0_12 * bare.g0_22 == 0:
        raise SingularConfigurationError("r is undefined: g0_12 * g0_22 vanishes")
    if chis.chi_1 == 0:
        raise SingularConfigurationError("r is undefined: chi_1 vanishes")
    return complex(4 * chis.chi_LC.imag * bare.g0_11 * bare.g0_21
                   / (1j * chis.chi_1 * bare.g0_12 * bare.g0_22) * chi_m_ratio)


def isolation_quantities(bare: BareParams, drives: DriveConfig, chis: Susceptibilities,
                         chi_m_ratio: complex) -> IsolationQuantities:
    mu, _ = mu_nu(bare, chis)
    r = r_param(bare, chis, chi_m_ratio)
    c1, cLC = chis.chi_1, chis.chi_LC
    E1, E2, V = drives.calE1, drives.calE2, drives.Vc
    s = (-4j * mu * bare.g0_12 * bare.g0_22 * c1**2 * abs(c1) ** 2 * cLC
         * abs(E1) ** 2 * E2 * V)
    if E1 == 0:
        raise SingularConfigurationError("G is undefined: the optical drive E1 vanishes")
    G = abs(cLC * V / (c1 * E1)) ** 2
    return IsolationQuantities(r=r, s=complex(s), G_param=float(G), varphi=varphi_of(drives))
