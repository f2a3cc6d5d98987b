import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonrecip.core import NoPhysicalDriveError, SingularConfigurationError, susceptibilities
from nonrecip.couplings import EffectiveCouplings
from nonrecip.design import build_design
from nonrecip.frame import make_frame
from nonrecip.optimizer import BaseDesign
from nonrecip.scattering import (isolation_bandwidth, isolation_db, isolation_solve,
                                 mechanical_susceptibility, smatrix, smatrix_direct)

from conftest import random_bare, random_couplings

GRID = np.linspace(-5e4, 5e4, 2001)
ZERO = EffectiveCouplings(0j, 0j, 0j, 0j, mu=0.0, nu=0.0, source_tag="zero")


def test_uncoupled_is_bare_reflection(fig3a):
    for conv, s11 in (("paper", 3.0), ("flip-in", 1.0), ("flip-out", 1.0)):
        res = smatrix(fig3a.bare, fig3a.frame, ZERO, GRID, conv)
        assert np.all(res.abs2("S12") == 0) and np.all(res.abs2("S21") == 0)
        assert np.all(res.abs2("T11") == 0)
        assert abs(res.S[res.at(0.0), 0, 0]) == pytest.approx(s11, rel=1e-12)


def test_uncoupled_reflection_lorentzian(fig3a):
    k = fig3a.bare.kappa
    res = smatrix(fig3a.bare, fig3a.frame, ZERO, GRID, "flip-in")
    expected = (k + 1j * GRID) / (k - 1j * GRID)
    assert np.allclose(res.S[:, 0, 0], expected, atol=1e-14)


def test_mechanical_susceptibility_sign():
    assert mechanical_susceptibility(2.0, 1, 5.0, 0.0) == pytest.approx(1 / (1 - 5j))
    assert mechanical_susceptibility(2.0, 2, 5.0, 0.0) == pytest.approx(1 / (1 + 5j))


@given(seed=st.integers(0, 2**31))
def test_closed_matches_direct(seed):
    rng = np.random.default_rng(seed)
    bare = random_bare(rng)
    frame = make_frame(bare.Delta_L, bare.omega_LC0, rng.uniform(-5e3, 5e3), bare)
    cpl = random_couplings(rng)
    w = rng.uniform(-5e4, 5e4, 17)
    for conv in ("paper", "flip-in"):
        a = smatrix(bare, frame, cpl, w, conv)
        b = smatrix_direct(bare, frame, cpl, w, conv)
        ok = ~a.singular
        scale = np.max(np.abs(a.S[ok]))
        assert np.max(np.abs(a.S[ok] - b.S[ok])) <= 1e-9 * scale
        assert np.max(np.abs(a.T[ok] - b.T[ok])) <= 1e-9 * max(scale, np.max(np.abs(a.T[ok])))


@given(seed=st.integers(0, 2**31))
def test_reciprocal_when_couplings_mirror(seed):
    # with g11 g21 real-symmetric products F12 = conj(F21) and |S12| = |S21|
    rng = np.random.default_rng(seed)
    bare = random_bare(rng)
    frame = make_frame(bare.Delta_L, bare.omega_LC0, rng.uniform(-5e3, 5e3), bare)
    g = rng.uniform(1e3, 3e4, 4)
    cpl = EffectiveCouplings(*(g + 0j), mu=0.0, nu=0.0, source_tag="real")
    res = smatrix(bare, frame, cpl, np.array([0.0]), "flip-in")
    assert res.abs2("S12")[0] == pytest.approx(res.abs2("S21")[0], rel=1e-10)


def test_passivity_flip_in(rng):
    for _ in range(20):
        bare = random_bare(rng)
        frame = make_frame(bare.Delta_L, bare.omega_LC0, rng.uniform(-5e3, 5e3), bare)
        res = smatrix(bare, frame, random_couplings(rng), GRID[::50], "flip-in")
        # unitarity of the full 4x4 map: photon flux into each em output sums to one
        tot = np.sum(np.abs(res.S) ** 2, axis=2) + np.sum(np.abs(res.T) ** 2, axis=2)
        assert np.allclose(tot, 1.0, atol=1e-9)


def test_isolation_nulls_forward(fig3a):
    sol = fig3a.isolation
    res = smatrix(fig3a.bare, fig3a.frame, fig3a.couplings, np.array([0.0]))
    scale = abs(res.F21[0])
    assert abs(res.F12[0]) <= 1e-12 * scale
    assert sol.residual_S12 < 1e-20
    assert sol.backward_S21 == pytest.approx(2.364e-5, rel=2e-3)
    assert sol.G_param > 0


def test_F21_closed_form(fig3a):
    chis, bare, frame = fig3a.chis, fig3a.bare, fig3a.frame
    sol = fig3a.isolation
    from nonrecip.couplings import isolation_quantities, mu_nu
    mu, nu = mu_nu(bare, chis)
    cm1 = mechanical_susceptibility(bare.gamma_m1, 1, frame.delta, 0.0)
    cm2 = mechanical_susceptibility(bare.gamma_m2, 2, frame.delta, 0.0)
    iq = isolation_quantities(bare, fig3a.drives, chis, cm1 / cm2)
    r, q, c1 = iq.r, nu / mu, chis.chi_1
    F21 = (-np.conj(iq.s) * cm2 * 2 * (q + r.real) * (c1 * r / np.conj(c1) + np.conj(r))
           / (q + np.conj(r)))
    assert abs(F21 - sol.F21_at_zero) <= 1e-10 * abs(sol.F21_at_zero)
    assert iq.G_param == pytest.approx(sol.G_param, rel=1e-10)


def test_no_physical_drive(fig3a):
    # at delta = -4e3 with panel (a) rates the required G is negative
    base = BaseDesign(fig3a.bare, fig3a.drives, fig3a.frame).at({"delta": -4e3})
    chis = susceptibilities(base.bare, base.drives)
    with pytest.raises(NoPhysicalDriveError):
        isolation_solve(base.bare, base.drives, chis, base.frame)


def test_singular_r(fig3a):
    bare = fig3a.bare.with_(g0_12=0.0)
    with pytest.raises(SingularConfigurationError):
        isolation_solve(bare, fig3a.drives, fig3a.chis, fig3a.frame)


def test_bandwidth_fig3a(fig3a):
    res = smatrix(fig3a.bare, fig3a.frame, fig3a.couplings, GRID)
    bw, peak = isolation_bandwidth(res)
    assert bw == pytest.approx(800.0, abs=50.0)
    assert peak == 300.0


def test_bandwidth_reciprocal(fig3a):
    res = smatrix(fig3a.bare, fig3a.frame, ZERO, GRID)
    assert np.all(isolation_db(res) == 0)
    assert isolation_bandwidth(res) == (0.0, 0.0)


def test_bandwidth_requires_zero(fig3a):
    res = smatrix(fig3a.bare, fig3a.frame, ZERO, GRID + 0.3)
    with pytest.raises(Exception):
        isolation_bandwidth(res)


def _iso_at_zero_fixed_drives(fig3a, delta):
    base = BaseDesign(fig3a.bare, fig3a.drives, fig3a.frame).at({"delta": delta})
    d = build_design(base.bare, base.drives, base.frame, isolate=False, resolve=False)
    res = smatrix(d.bare, d.frame, d.couplings, np.array([0.0]))
    return float(isolation_db(res)[0])


def test_delta_to_zero_continuity(fig3a):
    deltas = [-1e3, -500.0, -100.0, -10.0, -1.0]
    iso = [abs(_iso_at_zero_fixed_drives(fig3a, d)) for d in deltas]
    assert all(a > b for a, b in zip(iso, iso[1:]))
    assert iso[-1] < 0.01
    assert _iso_at_zero_fixed_drives(fig3a, 0.0) == pytest.approx(0.0, abs=1e-9)


def test_paper_convention_is_not_passive(fig3a):
    res = smatrix(fig3a.bare, fig3a.frame, fig3a.couplings, np.array([0.0]), "paper")
    assert res.abs2("S11")[0] > 1.0
    res2 = smatrix(fig3a.bare, fig3a.frame, fig3a.couplings, np.array([0.0]), "flip-in")
    assert res2.abs2("S11")[0] <= 1.0
    # the conversion magnitudes do not depend on the convention
    assert res.abs2("S21")[0] == pytest.approx(res2.abs2("S21")[0], rel=1e-12)


def test_unknown_convention(fig3a):
    with pytest.raises(Exception, match="convention"):
        smatrix(fig3a.bare, fig3a.frame, ZERO, GRID, "nope")
