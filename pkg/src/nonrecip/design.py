"""End-to-end design point: resonance frame, bare-parameter resolution and isolation."""
from __future__ import annotations

from dataclasses import dataclass

from .core import (PAPER_LITERAL, BareParams, DriveConfig, FrameConfig, Susceptibilities,
                   susceptibilities)
from .couplings import EffectiveCouplings, effective_couplings_assembled, effective_couplings_closed
from .frame import FRAME_TOL, FrameReport, apply_resonance_conditions, make_frame, resolve_frame
from .meanfield import HarmonicCatalog, perturbative_harmonics
from .scattering import NonrecipSolution, isolation_solve

MAX_OUTER = 50


@dataclass(frozen=True)
class DesignPoint:
    bare: BareParams
    drives: DriveConfig
    frame: FrameConfig
    chis: Susceptibilities
    catalog: HarmonicCatalog
    couplings: EffectiveCouplings
    couplings_assembled: EffectiveCouplings
    isolation: NonrecipSolution | None
    frame_report: FrameReport | None


def from_targets(*, g0_11, g0_12, g0_21, g0_22, kappa, gamma_LC, gamma_m1, gamma_m2,
                 omega_LC, omega_X, delta, E1, E2, phi_11=0.0, phi_12=0.0, V_mag=0.0,
                 phi_X=0.0, nbar_1=0.0, nbar_2=0.0, ntilde_2=0.0):
    """Build (bare, drives, frame) with the resonance conditions applied.

    The bare detuning and rf frequency start at the shifted targets; call
    ``build_design`` to resolve them.
    """
    Delta, w1, w2, wp = apply_resonance_conditions(omega_LC, omega_X, delta)
    bare = BareParams(g0_11=g0_11, g0_12=g0_12, g0_21=g0_21, g0_22=g0_22, kappa=kappa,
                      gamma_LC=gamma_LC, gamma_m1=gamma_m1, gamma_m2=gamma_m2, omega_1=w1,
                      omega_2=w2, omega_LC0=omega_LC, Delta_L=Delta, nbar_1=nbar_1,
                      nbar_2=nbar_2, ntilde_2=ntilde_2)
    drives = DriveConfig(E1=E1, E2=E2, phi_11=phi_11, phi_12=phi_12, V_mag=V_mag, phi_X=phi_X,
                         omega_plus=wp, omega_X=omega_X)
    return bare, drives, make_frame(Delta, omega_LC, delta, bare)


def build_design(bare: BareParams, drives: DriveConfig, frame: FrameConfig, *,
                 isolate: bool = True, mode: str = PAPER_LITERAL, resolve: bool = True,
                 io_convention: str = "paper", omega_iso: float = 0.0) -> DesignPoint:
    """Alternate isolation and frame resolution until the bare values settle.

    ``frame`` carries the shifted targets (Delta, omega_LC, delta). With
    ``isolate`` the rf drive magnitude and phase are replaced by the solution
    nulling S12 at ``omega_iso``.
    """
    b = bare
    if resolve:
        b = b.with_(Delta_L=frame.Delta, omega_LC0=frame.omega_LC)
    report = None
    for _ in range(MAX_OUTER):
        if isolate:
            chis = susceptibilities(b, drives, mode)
            drives = isolation_solve(b, drives, chis, frame, omega_iso, io_convention).drives
        if not resolve:
            break
        DL, w0, _, report = resolve_frame(b, drives, frame.Delta, frame.omega_LC,
                                          delta=frame.delta, mode=mode)
        moved = max(abs(DL - b.Delta_L), abs(w0 - b.omega_LC0))
        b = b.with_(Delta_L=DL, omega_LC0=w0)
        if moved < FRAME_TOL or not isolate:
            break

    chis = susceptibilities(b, drives, mode)
    sol = None
    if isolate:
        sol = isolation_solve(b, drives, chis, frame, omega_iso, io_convention)
        drives = sol.drives
    catalog = perturbative_harmonics(b, drives, chis)
    return DesignPoint(
        bare=b, drives=drives, frame=frame, chis=chis, catalog=catalog,
        couplings=sol.couplings if sol else effective_couplings_closed(b, drives, chis),
        couplings_assembled=effective_couplings_assembled(catalog, b, chis),
        isolation=sol, frame_report=report,
    )
