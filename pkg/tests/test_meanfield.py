import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonrecip.core import DRIVE_SHIFTED, PAPER_LITERAL, IncompleteCatalogError, susceptibilities
from nonrecip.meanfield import (HarmonicCatalog, HarmonicKey, amplitude_at_time, catalog_symbols,
                                perturbative_harmonics)

from conftest import harmonic_balance_residuals, small_bare, small_drives

EXPECTED_LABELS = {
    "a1": {(1, 0), (-1, 0), (3, 0), (-3, 0), (1, 2), (-1, 2), (1, -2), (-1, -2)},
    "a2": {(0, 1), (0, -1), (0, 3), (0, -3), (2, 1), (-2, 1), (2, -1), (-2, -1)},
    "b1": {(0, 0), (2, 0), (-2, 0), (0, 2), (0, -2)},
    "b2": {(0, 0), (2, 0), (-2, 0), (0, 2), (0, -2)},
}


def catalog(bare=None, drives=None, mode=PAPER_LITERAL):
    bare, drives = bare or small_bare(), drives or small_drives()
    return perturbative_harmonics(bare, drives, susceptibilities(bare, drives, mode))


def test_key_set_is_complete_and_exact():
    keys = set(catalog().keys())
    assert len(keys) == 29
    assert keys == set(catalog_symbols())
    for mode, labels in EXPECTED_LABELS.items():
        assert {(k.n_plus, k.n_X) for k in keys if k.mode == mode} == labels
    assert len(set(catalog_symbols().values())) == 29


def test_missing_key_raises():
    with pytest.raises(IncompleteCatalogError):
        catalog()["a1", 0, 5, 0]


def test_zero_coupling_truncates():
    cat = catalog(small_bare(g0_11=0.0, g0_12=0.0, g0_21=0.0, g0_22=0.0))
    nonzero = {k for k, v in cat.entries.items() if v != 0}
    assert nonzero == {HarmonicKey("a1", 0, 1, 0), HarmonicKey("a1", 0, -1, 0),
                       HarmonicKey("a2", 0, 0, 1)}


def test_order_zero_and_one_closed_forms():
    b, d = small_bare(), small_drives(phi_11=0.2, phi_12=-0.7)
    c = susceptibilities(b)
    cat = catalog(b, d)
    ap, am, A = -1j * c.chi_1 * d.calE1, -1j * c.chi_1 * d.calE2, 1j * c.chi_LC * d.Vc
    assert cat["a1", 0, 1, 0] == pytest.approx(ap, rel=1e-14)
    assert cat["a1", 0, -1, 0] == pytest.approx(am, rel=1e-14)
    assert cat["a2", 0, 0, 1] == pytest.approx(A, rel=1e-14)
    for j, (g1, g2) in enumerate(((b.g0_11, b.g0_21), (b.g0_12, b.g0_22)), start=1):
        chim = c.chi_m_prime(j)
        dc = -1j * chim * (g1 * (abs(ap) ** 2 + abs(am) ** 2) - 2 * g2 * abs(A) ** 2)
        assert cat[f"b{j}", 1, 0, 0] == pytest.approx(dc, rel=1e-14)
        assert cat[f"b{j}", 1, 2, 0] == pytest.approx(-1j * chim * g1 * ap * np.conj(am), rel=1e-14)
        assert cat[f"b{j}", 1, -2, 0] == pytest.approx(-1j * chim * g1 * am * np.conj(ap), rel=1e-14)
        assert cat[f"b{j}", 1, 0, 2] == pytest.approx(1j * chim * g2 * A**2, rel=1e-14)
        # conjugate pairing of the -2X term
        assert cat[f"b{j}", 1, 0, -2] == pytest.approx(1j * chim * g2 * np.conj(A) ** 2, rel=1e-14)


def test_conjugation_relation_for_negative_rf_harmonics():
    b, d = small_bare(), small_drives()
    cat = catalog(b, d)
    ph = susceptibilities(b).chi_1 / np.conj(susceptibilities(b).chi_1)
    assert cat["a2", 2, 0, 1] == pytest.approx(-ph * np.conj(cat["a2", 2, 0, -1]), rel=1e-13)
    assert cat["a2", 2, 0, 3] == pytest.approx(-ph * np.conj(cat["a2", 2, 0, -3]), rel=1e-13)


@pytest.mark.parametrize("mode", [PAPER_LITERAL, DRIVE_SHIFTED])
@given(lam=st.floats(0.2, 5.0))
def test_drive_homogeneity(mode, lam):
    b, d = small_bare(), small_drives()
    c1 = catalog(b, d, mode)
    c2 = catalog(b, d.scaled(lam), mode)
    for k, v in c1.entries.items():
        assert c2[k] == pytest.approx(lam ** (k.order + 1) * v, rel=1e-10, abs=1e-300)


def test_amplitude_at_time_zero_and_period():
    cat = catalog()
    at0 = amplitude_at_time(cat, 0.0)
    for mode, x in zip(("a1", "a2", "b1", "b2"), at0):
        assert x == pytest.approx(sum(cat.by_mode(mode).values()), rel=1e-14)
    T = 2 * np.pi / cat.omega_plus
    ts = np.linspace(0.0, T, 7)
    for x0, x1 in zip(amplitude_at_time(cat, ts), amplitude_at_time(cat, ts + T)):
        assert np.max(np.abs(x1 - x0)) <= 1e-12 * np.max(np.abs(x0))


def test_records_roundtrip():
    cat = catalog()
    recs = cat.to_records()
    assert [(r["mode"], r["order"], r["n_plus"], r["n_X"]) for r in recs] == list(cat.keys())
    assert all(r["re"] + 1j * r["im"] == cat[r["mode"], r["order"], r["n_plus"], r["n_X"]]
               for r in recs)


def test_drive_shifted_single_tone_exact():
    b = small_bare(g0_11=0.0, g0_12=0.0, g0_21=0.0, g0_22=0.0)
    d = small_drives()
    cat = catalog(b, d, DRIVE_SHIFTED)
    assert cat["a1", 0, 1, 0] == -1j * d.E1 / (b.kappa + 1j * (b.Delta_L + d.omega_plus))
    res = harmonic_balance_residuals(b, d, cat)
    assert set(res) == {("a1", 1), ("a1", -1), ("a2", 2)}
    assert max(res.values()) < 1e-12


def test_drive_shifted_solves_equations_to_second_order(fig3a):
    b, d = fig3a.bare, fig3a.drives
    res = {}
    for s in (1.0, 0.5):
        ds = d.scaled(s)
        res[s] = harmonic_balance_residuals(b, ds, catalog(b, ds, DRIVE_SHIFTED))
    # the remaining residual is fourth order: halving the drives divides it by four
    for key, r in res[1.0].items():
        if r > 1e-5:
            assert res[0.5][key] / r == pytest.approx(0.25, abs=0.02), key


def test_paper_literal_denominator_offset(fig3a):
    b, d = fig3a.bare, fig3a.drives
    res = harmonic_balance_residuals(b, d, catalog(b, d, PAPER_LITERAL))
    # evaluating susceptibilities at zero frequency misses the tone offsets
    assert res[("a1", 1)] > 0.5
