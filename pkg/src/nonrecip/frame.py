"""Resonance conditions and bare-vs-shifted frame resolution."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

from .core import (PAPER_LITERAL, BareParams, DriveConfig, FrameConfig, FrameResolutionError,
                   _require_positive, susceptibilities)
from .meanfield import beta_dc

FRAME_DAMPING = 0.8
FRAME_MAX_ITER = 50
FRAME_TOL = 1e-6  # rad/s


class FrameStrainWarning(UserWarning):
    """The mean-field frequency shift is large compared to the detuning."""


def apply_resonance_conditions(omega_LC: float, omega_X: float, delta: float):
    """Return (Delta, omega_1, omega_2, omega_plus) selected by the resonance conditions."""
    _require_positive(omega_LC=omega_LC, omega_X=omega_X)
    omega_plus = omega_X / 2
    Delta = omega_LC - omega_plus
    omega_1 = omega_LC - delta
    omega_2 = omega_LC + omega_X + delta
    return Delta, omega_1, omega_2, omega_plus


def resonance_residuals(frame: FrameConfig, drives: DriveConfig) -> list[float]:
    """Residuals of the four resonance conditions (all zero when they hold)."""
    return [
        frame.Delta - (frame.omega_LC - drives.omega_plus),
        frame.omega_tilde_1 - frame.omega_LC,
        frame.omega_tilde_2 - (frame.omega_LC + drives.omega_X),
        drives.omega_X - 2 * drives.omega_plus,
    ]


def make_frame(Delta: float, omega_LC: float, delta: float, bare: BareParams) -> FrameConfig:
    return FrameConfig(Delta=Delta, omega_LC=omega_LC, delta=delta,
                       omega_tilde_1=bare.omega_1 + delta, omega_tilde_2=bare.omega_2 - delta)


@dataclass(frozen=True)
class FrameReport:
    iterations: int
    residual: float
    shift_Delta: float  # Delta - Delta_L
    shift_omega_LC: float  # omega_LC - omega_LC0
    strained: bool


def frame_shifts(bare: BareParams, drives: DriveConfig, mode: str = PAPER_LITERAL):
    """Mean-field shifts (Delta - Delta_L, omega_LC - omega_LC0) at the given bare values."""
    b1, b2 = beta_dc(bare, drives, susceptibilities(bare, drives, mode))
    re = (b1.real, b2.real)
    dDelta = 2 * (bare.g0_11 * re[0] + bare.g0_12 * re[1])
    dLC = -4 * (bare.g0_21 * re[0] + bare.g0_22 * re[1])
    return dDelta, dLC


def resolve_frame(bare: BareParams, drives: DriveConfig, target_Delta: float,
                  target_omega_LC: float, *, delta: float, mode: str = PAPER_LITERAL):
    """Find the bare Delta_L and omega_LC0 that produce the requested shifted values.

    Returns ``(Delta_L, omega_LC0, frame, report)``.
    """
    x = [target_Delta, target_omega_LC]
    resid = float("inf")
    for it in range(1, FRAME_MAX_ITER + 1):
        trial = bare.with_(Delta_L=x[0], omega_LC0=x[1])
        dD, dW = frame_shifts(trial, drives, mode)
        r = (x[0] + dD - target_Delta, x[1] + dW - target_omega_LC)
        resid = max(abs(r[0]), abs(r[1]))
        if resid < FRAME_TOL:
            break
        x = [x[0] - FRAME_DAMPING * r[0], x[1] - FRAME_DAMPING * r[1]]
        if x[1] <= 0:
            raise FrameResolutionError("bare rf frequency became non-positive", resid)
    else:
        raise FrameResolutionError(f"no convergence in {FRAME_MAX_ITER} iterations", resid)

    frame = make_frame(target_Delta, target_omega_LC, delta, bare)
    strained = abs(dD) > 0.01 * abs(target_Delta)
    if strained:
        warnings.warn(f"mean-field shift ({dD:.3e}, {dW:.3e}) rad/s exceeds 1% of "
                      "|Delta|; the perturbative frame may be strained", FrameStrainWarning,
                      stacklevel=2)
    report = FrameReport(iterations=it, residual=resid, shift_Delta=dD, shift_omega_LC=dW,
                         strained=strained)
    return x[0], x[1], frame, report
