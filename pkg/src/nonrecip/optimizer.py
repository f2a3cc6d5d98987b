"""Maximize backward conversion |S21(0)|^2 under the isolation and RWA constraints."""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .core import PAPER_LITERAL, BareParams, DriveConfig, FrameConfig, InvalidParameterError, NonrecipError
from .design import DesignPoint, build_design
from .frame import FrameStrainWarning, apply_resonance_conditions, make_frame
from .rwa_audit import DEFAULT_MARGIN, AuditReport, coefficient_catalog, rwa_margin

FREE_VARS = ("delta", "gamma_LC", "gamma_m1", "gamma_m2", "kappa", "E1", "E2")
GRID_POINTS = 25
FATOL = 1e-10
XATOL = 1e-8  # in unit-box coordinates

OK = "ok"
RWA_FAIL = "rwa-fail"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class BaseDesign:
    """Targets the optimizer perturbs: resonant frame targets plus fixed settings."""
    bare: BareParams
    drives: DriveConfig
    frame: FrameConfig
    mode: str = PAPER_LITERAL
    io_convention: str = "paper"
    margin: float = DEFAULT_MARGIN

    def values(self) -> dict[str, float]:
        return {"delta": self.frame.delta, "gamma_LC": self.bare.gamma_LC,
                "gamma_m1": self.bare.gamma_m1, "gamma_m2": self.bare.gamma_m2,
                "kappa": self.bare.kappa, "E1": self.drives.E1, "E2": self.drives.E2}

    def at(self, point: dict[str, float]) -> "BaseDesign":
        """Copy with the named values replaced and the resonance conditions re-applied."""
        unknown = set(point) - set(FREE_VARS)
        if unknown:
            raise InvalidParameterError(f"unknown free variables: {sorted(unknown)}")
        v = {**self.values(), **{k: float(x) for k, x in point.items()}}
        Delta, w1, w2, wp = apply_resonance_conditions(self.frame.omega_LC, self.drives.omega_X, v["delta"])
        bare = self.bare.with_(gamma_LC=v["gamma_LC"], gamma_m1=v["gamma_m1"], gamma_m2=v["gamma_m2"],
                               kappa=v["kappa"], omega_1=w1, omega_2=w2)
        drives = self.drives.with_(E1=v["E1"], E2=v["E2"], omega_plus=wp)
        frame = make_frame(Delta, self.frame.omega_LC, v["delta"], bare)
        return BaseDesign(bare, drives, frame, self.mode, self.io_convention, self.margin)


@dataclass(frozen=True)
class PointEvaluation:
    point: dict[str, float]
    objective: float
    audit: AuditReport | None
    status: str  # ok, rwa-fail or infeasible
    message: str = ""
    backward_S21: float = float("nan")

    @property
    def rwa_pass(self) -> bool:
        return self.audit is not None and self.audit.passed


@dataclass
class OptimizationReport:
    best_point: dict[str, float] | None
    best_objective: float
    trace: list[PointEvaluation] = field(default_factory=list)
    running_best: list[float] = field(default_factory=list)
    evaluations: int = 0
    status: str = OK
    grid_points: int = 0

    @property
    def constraint_status(self) -> list[dict]:
        return [{"rwa_pass": e.rwa_pass, "status": e.status,
                 "worst_label": e.audit.worst_label if e.audit else None} for e in self.trace]

    def to_dict(self) -> dict:
        return {
            "best_point": self.best_point,
            "best_objective": self.best_objective,
            "evaluations": self.evaluations,
            "grid_points": self.grid_points,
            "status": self.status,
            "trace": [{"point": e.point, "objective": e.objective, "rwa_pass": e.rwa_pass,
                       "status": e.status} for e in self.trace],
            "constraint_status": self.constraint_status,
        }


class _BudgetExhausted(Exception):
    pass


def evaluate_design(base: BaseDesign) -> tuple[DesignPoint, AuditReport]:
    d = build_design(base.bare, base.drives, base.frame, isolate=True, mode=base.mode,
                     io_convention=base.io_convention)
    cat = coefficient_catalog(d.catalog, d.bare, d.frame)
    audit = rwa_margin(cat, d.bare.kappa, d.bare.gamma_LC, base.margin, couplings=d.couplings,
                       gamma_m=(d.bare.gamma_m1, d.bare.gamma_m2))
    return d, audit


def objective_eval(point: dict[str, float], base: BaseDesign) -> PointEvaluation:
    """|S21(0)|^2 at ``point`` if the RWA audit passes, otherwise 0."""
    point = {k: float(v) for k, v in point.items()}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", FrameStrainWarning)
            d, audit = evaluate_design(base.at(point))
    except (NonrecipError, ValueError) as exc:
        return PointEvaluation(point, 0.0, None, INFEASIBLE, str(exc))
    s21 = d.isolation.backward_S21
    if not audit.passed:
        msg = f"worst offender {audit.worst_label} (ratio {audit.worst_ratio:.4g})"
        if not audit.delta_pass:
            msg += f"; |delta|/max|g| = {audit.delta_ratio:.4g}"
        return PointEvaluation(point, 0.0, audit, RWA_FAIL, msg, s21)
    return PointEvaluation(point, float(s21), audit, OK, "", s21)


def _check_bounds(free_vars, bounds):
    if not free_vars:
        raise InvalidParameterError("free_vars must be nonempty")
    for v in free_vars:
        if v not in FREE_VARS:
            raise InvalidParameterError(f"{v!r} cannot be optimized; choose from {FREE_VARS}")
        lo, hi = bounds.get(v, (None, None))
        if lo is None or not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise InvalidParameterError(f"bounds for {v!r} must be finite with lo < hi")


def maximize_backward(base: BaseDesign, free_vars, bounds: dict[str, tuple[float, float]],
                      budget: int = 2000, grid_points: int = GRID_POINTS) -> OptimizationReport:
    """Grid scan then bounded Nelder-Mead over the unit-scaled free variables.

    ``budget`` caps the total number of pipeline evaluations; the first one is
    always the base point. The grid resolution shrinks if the budget cannot
    hold a full grid.
    """
    free_vars = list(free_vars)
    _check_bounds(free_vars, bounds)
    if budget < 1:
        raise InvalidParameterError("budget must be >= 1")
    lo = np.array([bounds[v][0] for v in free_vars], dtype=float)
    hi = np.array([bounds[v][1] for v in free_vars], dtype=float)
    n = len(free_vars)
    rep = OptimizationReport(best_point=None, best_objective=0.0)
    best: list[PointEvaluation | None] = [None]

    def to_point(u):
        x = lo + np.clip(u, 0.0, 1.0) * (hi - lo)
        return dict(zip(free_vars, map(float, x)))

    def record(ev: PointEvaluation):
        rep.trace.append(ev)
        if ev.rwa_pass and (best[0] is None or ev.objective > best[0].objective):
            best[0] = ev
        rep.running_best.append(best[0].objective if best[0] else 0.0)

    base_vals = base.values()
    record(objective_eval({v: base_vals[v] for v in free_vars}, base))

    gn = min(grid_points, int(math.floor((budget - 1) ** (1.0 / n) + 1e-9)))
    grid_best_u = None
    if gn >= 2:
        rep.grid_points = gn
        axis = np.linspace(0.0, 1.0, gn)
        grid_best = -1.0
        for u in itertools.product(axis, repeat=n):
            ev = objective_eval(to_point(np.array(u)), base)
            record(ev)
            if ev.objective > grid_best:
                grid_best, grid_best_u = ev.objective, np.array(u)

    remaining = budget - len(rep.trace)
    if remaining > n + 1:
        if grid_best_u is None or (best[0] is not None and best[0] is rep.trace[0]):
            base_u = np.array([(base_vals[v] - l) / (h - l) for v, l, h in zip(free_vars, lo, hi)])
            start = np.clip(base_u, 0.0, 1.0)
        else:
            start = grid_best_u
        step = 1.0 / (gn - 1) if gn >= 2 else 0.05
        simplex = [start]
        for i in range(n):
            e = start.copy()
            e[i] = e[i] + step if e[i] + step <= 1.0 else e[i] - step
            simplex.append(e)

        def neg(u):
            if len(rep.trace) >= budget:
                raise _BudgetExhausted
            ev = objective_eval(to_point(u), base)
            record(ev)
            return -ev.objective

        try:
            minimize(neg, start, method="Nelder-Mead", bounds=[(0.0, 1.0)] * n,
                     options={"initial_simplex": np.array(simplex), "fatol": FATOL,
                              "xatol": XATOL, "maxfev": remaining})
        except _BudgetExhausted:
            pass

    rep.evaluations = len(rep.trace)
    if best[0] is None:
        rep.status = "optimization-failed"
        rep.best_point, rep.best_objective = None, 0.0
    else:
        rep.best_point, rep.best_objective = dict(best[0].point), best[0].objective
    return rep


def grid_maximum(base: BaseDesign, free_vars, bounds, points: int = 101) -> PointEvaluation | None:
    """Exhaustive grid maximum (inclusive of the bounds) for regression checks."""
    free_vars = list(free_vars)
    _check_bounds(free_vars, bounds)
    axes = [np.linspace(bounds[v][0], bounds[v][1], points) for v in free_vars]
    best = None
    for x in itertools.product(*axes):
        ev = objective_eval(dict(zip(free_vars, map(float, x))), base)
        if ev.rwa_pass and (best is None or ev.objective > best.objective):
            best = ev
    return best
