import numpy as np
import pytest

from nonrecip.config import fig3_preset
from nonrecip.core import InvalidParameterError
from nonrecip.optimizer import (INFEASIBLE, OK, RWA_FAIL, grid_maximum, maximize_backward,
                                objective_eval)


@pytest.fixture(scope="module")
def base():
    return fig3_preset("a").base_design()


def test_base_point_objective(base):
    ev = objective_eval({"delta": -2.6e3}, base)
    assert ev.status == OK and ev.rwa_pass
    assert ev.objective == pytest.approx(2.364e-5, rel=2e-3)


def test_delta_zero_gives_zero(base):
    ev = objective_eval({"delta": 0.0}, base)
    assert ev.objective == 0.0
    assert ev.status in (RWA_FAIL, INFEASIBLE)


def test_rwa_violation_named(base):
    ev = objective_eval({"kappa": 3e6}, base)
    assert ev.status == RWA_FAIL
    assert ev.objective == 0.0
    assert "worst offender" in ev.message
    assert ev.audit.worst_label in ev.message


def test_infeasible_point(base):
    ev = objective_eval({"delta": -4e3}, base)
    assert ev.status == INFEASIBLE and ev.objective == 0.0 and ev.message


def test_budget_one(base):
    rep = maximize_backward(base, ["delta"], {"delta": (-1e4, -100.0)}, budget=1)
    assert rep.evaluations == 1
    assert rep.best_point == {"delta": -2.6e3}
    assert rep.best_objective == pytest.approx(2.364e-5, rel=2e-3)


def test_budget_respected(base):
    rep = maximize_backward(base, ["delta", "gamma_LC"],
                            {"delta": (-1e4, -100.0), "gamma_LC": (2e4, 2e5)}, budget=60)
    assert rep.evaluations <= 60
    assert rep.grid_points == 7


def test_one_dimensional_improves_on_base(base):
    rep = maximize_backward(base, ["delta"], {"delta": (-1e4, -100.0)}, budget=200)
    assert rep.status == OK
    assert rep.best_objective >= 2.364e-5
    assert rep.best_objective == pytest.approx(8.26e-5, rel=0.02)
    assert rep.best_point["delta"] == pytest.approx(-2650.0, rel=0.02)


def test_running_best_monotone_and_reproducible(base):
    rep = maximize_backward(base, ["delta", "gamma_LC"],
                            {"delta": (-1e4, -100.0), "gamma_LC": (2e4, 2e5)}, budget=300)
    rb = np.array(rep.running_best)
    assert np.all(np.diff(rb) >= 0)
    assert rb[-1] == rep.best_objective
    again = objective_eval(rep.best_point, base)
    assert again.objective == rep.best_objective
    assert again.rwa_pass
    assert all(len(c) == 3 for c in rep.constraint_status)
    d = rep.to_dict()
    assert len(d["trace"]) == rep.evaluations


def test_all_infeasible_reports_failure(base):
    bad = base.at({"kappa": 3e6})
    rep = maximize_backward(bad, ["kappa"], {"kappa": (2.5e6, 5e6)}, budget=15)
    assert rep.evaluations == 15
    assert rep.status == "optimization-failed"
    assert rep.best_point is None and rep.best_objective == 0.0


def test_grid_maximum_small(base):
    ev = grid_maximum(base, ["delta"], {"delta": (-3e3, -2e3)}, points=11)
    assert ev.rwa_pass
    # the continuous optimum sits near -2650
    assert ev.point["delta"] in (-2.6e3, -2.7e3)


@pytest.mark.parametrize("free,bounds", [
    ([], {}),
    (["omega_X"], {"omega_X": (1.0, 2.0)}),
    (["delta"], {"delta": (1.0, 1.0)}),
    (["delta"], {"delta": (-np.inf, 1.0)}),
    (["delta"], {}),
])
def test_bad_arguments(base, free, bounds):
    with pytest.raises(InvalidParameterError):
        maximize_backward(base, free, bounds)


def test_unknown_point_key(base):
    with pytest.raises(InvalidParameterError):
        base.at({"g0_11": 1.0})
