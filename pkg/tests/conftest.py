import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nonrecip.config import fig3_preset
from nonrecip.core import BareParams, DriveConfig
from nonrecip.couplings import EffectiveCouplings
from nonrecip.frame import FrameStrainWarning

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def fig3a():
    return fig3_preset("a").design()


@pytest.fixture(scope="session")
def fig3b():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FrameStrainWarning)
        return fig3_preset("b").design()


def small_bare(**kw):
    """Slow toy system for quick time-domain runs (not in the RWA regime)."""
    base = dict(g0_11=0.5, g0_12=0.8, g0_21=0.6, g0_22=0.3, kappa=50.0, gamma_LC=40.0,
                gamma_m1=20.0, gamma_m2=20.0, omega_1=300.0, omega_2=1300.0, omega_LC0=400.0,
                Delta_L=-200.0)
    base.update(kw)
    return BareParams(**base)


def small_drives(**kw):
    base = dict(E1=1e3, E2=1.5e3, phi_11=0.0, phi_12=0.0, V_mag=2e3, phi_X=0.3,
                omega_plus=500.0, omega_X=1000.0)
    base.update(kw)
    return DriveConfig(**base)


def random_couplings(rng, scale=1e4) -> EffectiveCouplings:
    g = scale * (rng.normal(size=4) + 1j * rng.normal(size=4))
    return EffectiveCouplings(*g, mu=float("nan"), nu=float("nan"), source_tag="random")


def random_bare(rng, *, equal_gamma=False):
    gm1 = rng.uniform(1e3, 1e4)
    gm2 = gm1 if equal_gamma else rng.uniform(1e3, 1e4)
    return BareParams(g0_11=8.0, g0_12=20.0, g0_21=20.0, g0_22=4.0,
                      kappa=rng.uniform(1e5, 1e6), gamma_LC=rng.uniform(1e4, 2e5),
                      gamma_m1=gm1, gamma_m2=gm2, omega_1=6e6, omega_2=26e6,
                      omega_LC0=6e6, Delta_L=-4e6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def harmonic_balance_residuals(bare, drives, catalog, samples=4096):
    """Per-harmonic residual of the mean-field equations with the catalog substituted.

    Each residual is normalized by the size of the linear term for that harmonic,
    so it measures the relative error of the coefficient. Zero harmonics are skipped.
    """
    from nonrecip.meanfield import amplitude_at_time
    from nonrecip.oracle import grouped_catalog, mean_field_rhs

    T = 2 * np.pi / drives.omega_plus
    t = np.arange(samples) * T / samples
    X = np.array(amplitude_at_time(catalog, t))
    rhs = mean_field_rhs(bare, drives)
    F = np.array([rhs(tt, X[:, i]) for i, tt in enumerate(t)]).T
    out = {}
    for (mode, m), g in grouped_catalog(catalog).items():
        if g["value"] == 0:
            continue
        w = m * drives.omega_plus
        i = ["a1", "a2", "b1", "b2"].index(mode)
        Fk = np.mean(F[i] * np.exp(-1j * w * t))
        if mode == "a1":
            lin = bare.kappa + 1j * (bare.Delta_L + w)
        elif mode == "a2":
            lin = bare.gamma_LC / 2 + 1j * (bare.omega_LC0 + w)
        else:
            j = int(mode[1])
            lin = bare.gamma_m(j) / 2 + 1j * (bare.omega_m(j) + w)
        out[(mode, m)] = abs(1j * w * g["value"] - Fk) / abs(lin * g["value"])
    return out


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
