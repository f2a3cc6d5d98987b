"""Second-order perturbative expansion of the classical mean amplitudes.

The long-time mean fields are sums of harmonics ``c * exp(i (n_plus*omega_plus
+ n_X*omega_X) t)``. Each coefficient is stored under a ``HarmonicKey``
together with the symbol it carries in the analytic expansion.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import BareParams, DriveConfig, IncompleteCatalogError, Susceptibilities

MODES = ("a1", "a2", "b1", "b2")


class HarmonicKey(NamedTuple):
    mode: str
    order: int
    n_plus: int
    n_X: int


# (mode, order, n_plus, n_X) -> symbol, in a fixed order.
_A1_ORDER2 = {
    (1, 0): "alpha^(2)_{1,+}",
    (-1, 0): "alpha^(2)_{1,-}",
    (3, 0): "alpha^(2)_{1,+3}",
    (-3, 0): "alpha^(2)_{1,-3}",
    (1, 2): "alpha^(2)_{1,2X,+}",
    (-1, 2): "alpha^(2)_{1,2X,-}",
    (1, -2): "alpha^(2)_{1,-2X,+}",
    (-1, -2): "alpha^(2)_{1,-2X,-}",
}
_A2_ORDER2 = {
    (0, 1): "alpha^(2)_{2,X}",
    (0, -1): "alpha^(2)_{2,-X}",
    (0, 3): "alpha^(2)_{2,3X}",
    (0, -3): "alpha^(2)_{2,-3X}",
    (2, 1): "alpha^(2)_{2,X,+2}",
    (-2, 1): "alpha^(2)_{2,X,-2}",
    (2, -1): "alpha^(2)_{2,-X,+2}",
    (-2, -1): "alpha^(2)_{2,-X,-2}",
}
_B_ORDER1 = {
    (0, 0): "beta_{j}^dc",
    (2, 0): "beta^(1)_{j,+2}",
    (-2, 0): "beta^(1)_{j,-2}",
    (0, 2): "beta^(1)_{j,2X}",
    (0, -2): "beta^(1)_{j,-2X}",
}


def catalog_symbols() -> dict[HarmonicKey, str]:
    """The complete key set of the expansion, mapped to symbol names."""
    out: dict[HarmonicKey, str] = {
        HarmonicKey("a1", 0, 1, 0): "alpha^(0)_{1,+}",
        HarmonicKey("a1", 0, -1, 0): "alpha^(0)_{1,-}",
        HarmonicKey("a2", 0, 0, 1): "alpha^(0)_{2,X}",
    }
    for j in (1, 2):
        for (npl, nx), sym in _B_ORDER1.items():
            out[HarmonicKey(f"b{j}", 1, npl, nx)] = sym.replace("{j", "{%d" % j)
    for (npl, nx), sym in _A1_ORDER2.items():
        out[HarmonicKey("a1", 2, npl, nx)] = sym
    for (npl, nx), sym in _A2_ORDER2.items():
        out[HarmonicKey("a2", 2, npl, nx)] = sym
    return out


@dataclass(frozen=True)
class HarmonicCatalog:
    entries: dict[HarmonicKey, complex]
    symbols: dict[HarmonicKey, str]
    omega_plus: float
    omega_X: float
    mode_flag: str

    def __getitem__(self, key) -> complex:
        key = HarmonicKey(*key)
        try:
            return self.entries[key]
        except KeyError:
            raise IncompleteCatalogError(f"catalog has no entry {key}") from None

    def frequency(self, key: HarmonicKey) -> float:
        return key.n_plus * self.omega_plus + key.n_X * self.omega_X

    def keys(self):
        return self.entries.keys()

    def by_mode(self, mode: str) -> dict[HarmonicKey, complex]:
        return {k: v for k, v in self.entries.items() if k.mode == mode}

    def to_records(self) -> list[dict]:
        return [
            {"mode": k.mode, "order": k.order, "n_plus": k.n_plus, "n_X": k.n_X,
             "re": float(v.real), "im": float(v.imag), "symbol": self.symbols[k]}
            for k, v in self.entries.items()
        ]


def order0_amplitudes(drives: DriveConfig, chis: Susceptibilities) -> tuple[complex, complex, complex]:
    """Linear-response amplitudes (alpha_{1,+}, alpha_{1,-}, alpha_{2,X})."""
    wp, wx = drives.omega_plus, drives.omega_X
    ap = -1j * chis.optical(wp) * drives.calE1
    am = -1j * chis.optical(-wp) * drives.calE2
    A = 1j * chis.rf(wx) * drives.Vc
    return complex(ap), complex(am), complex(A)


def beta_dc(bare: BareParams, drives: DriveConfig, chis: Susceptibilities) -> tuple[complex, complex]:
    """Time-independent part of the mechanical mean amplitudes (first order)."""
    ap, am, A = order0_amplitudes(drives, chis)
    g0 = bare.g0
    out = []
    for j in (1, 2):
        src = g0[0, j - 1] * (abs(ap) ** 2 + abs(am) ** 2) - 2 * g0[1, j - 1] * abs(A) ** 2
        out.append(complex(-1j * chis.mech(j, 0.0) * src))
    return out[0], out[1]


def perturbative_harmonics(bare: BareParams, drives: DriveConfig,
                           chis: Susceptibilities) -> HarmonicCatalog:
    """Mean-field harmonics to second order in the bare couplings."""
    wp, wx = drives.omega_plus, drives.omega_X
    g0 = bare.g0
    ap, am, A = order0_amplitudes(drives, chis)
    e: dict[HarmonicKey, complex] = {
        HarmonicKey("a1", 0, 1, 0): ap,
        HarmonicKey("a1", 0, -1, 0): am,
        HarmonicKey("a2", 0, 0, 1): A,
    }

    bdc = beta_dc(bare, drives, chis)
    beta = {}
    for j in (1, 2):
        g1, g2 = g0[0, j - 1], g0[1, j - 1]
        chim = chis.mech
        beta[j] = {
            (0, 0): bdc[j - 1],
            (2, 0): -1j * chim(j, 2 * wp) * g1 * ap * np.conj(am),
            (-2, 0): -1j * chim(j, -2 * wp) * g1 * am * np.conj(ap),
            (0, 2): 1j * chim(j, 2 * wx) * g2 * A**2,
            (0, -2): 1j * chim(j, -2 * wx) * g2 * np.conj(A) ** 2,
        }
        for lbl, v in beta[j].items():
            e[HarmonicKey(f"b{j}", 1, *lbl)] = complex(v)

    def P(j, s):  # beta_{j,s2} + beta_{j,-s2}^*
        return beta[j][(2 * s, 0)] + np.conj(beta[j][(-2 * s, 0)])

    def Q(j, s):  # beta_{j,s2X} + beta_{j,-s2X}^*
        return beta[j][(0, 2 * s)] + np.conj(beta[j][(0, -2 * s)])

    def re_dc(j):
        return beta[j][(0, 0)].real

    def opt(sum_terms, w):
        return complex(-1j * chis.optical(w) * sum_terms)

    def rf(sum_terms, w):
        return complex(2j * chis.rf(w) * sum_terms)

    g1 = g0[0]
    g2 = g0[1]
    J = (1, 2)
    a1 = {
        (1, 0): opt(sum(g1[j - 1] * (2 * ap * re_dc(j) + am * P(j, +1)) for j in J), wp),
        (-1, 0): opt(sum(g1[j - 1] * (2 * am * re_dc(j) + ap * P(j, -1)) for j in J), -wp),
        (3, 0): opt(sum(g1[j - 1] * ap * P(j, +1) for j in J), 3 * wp),
        (-3, 0): opt(sum(g1[j - 1] * am * P(j, -1) for j in J), -3 * wp),
        (1, 2): opt(sum(g1[j - 1] * ap * Q(j, +1) for j in J), wp + 2 * wx),
        (-1, 2): opt(sum(g1[j - 1] * am * Q(j, +1) for j in J), -wp + 2 * wx),
        (1, -2): opt(sum(g1[j - 1] * ap * Q(j, -1) for j in J), wp - 2 * wx),
        (-1, -2): opt(sum(g1[j - 1] * am * Q(j, -1) for j in J), -wp - 2 * wx),
    }
    Ac = np.conj(A)
    a2 = {
        (0, 1): rf(sum(g2[j - 1] * (2 * A * re_dc(j) + Ac * Q(j, +1)) for j in J), wx),
        (0, 3): rf(sum(g2[j - 1] * A * Q(j, +1) for j in J), 3 * wx),
        (2, 1): rf(sum(g2[j - 1] * A * P(j, +1) for j in J), 2 * wp + wx),
        (-2, 1): rf(sum(g2[j - 1] * A * P(j, -1) for j in J), -2 * wp + wx),
        (2, -1): rf(sum(g2[j - 1] * Ac * P(j, +1) for j in J), 2 * wp - wx),
        (-2, -1): rf(sum(g2[j - 1] * Ac * P(j, -1) for j in J), -2 * wp - wx),
    }
    if chis.shifted:
        a2[(0, -1)] = rf(sum(g2[j - 1] * (2 * Ac * re_dc(j) + A * Q(j, -1)) for j in J), -wx)
        a2[(0, -3)] = rf(sum(g2[j - 1] * Ac * Q(j, -1) for j in J), -3 * wx)
    else:
        # Negative-frequency partners from the conjugation relation with the optical
        # susceptibility: alpha_{2,X} = -(chi_1/chi_1^*) alpha_{2,-X}^*.
        phase = chis.chi_1 / np.conj(chis.chi_1)
        a2[(0, -1)] = complex(-phase * np.conj(a2[(0, 1)]))
        a2[(0, -3)] = complex(-phase * np.conj(a2[(0, 3)]))

    for lbl in _A1_ORDER2:
        e[HarmonicKey("a1", 2, *lbl)] = a1[lbl]
    for lbl in _A2_ORDER2:
        e[HarmonicKey("a2", 2, *lbl)] = a2[lbl]

    symbols = catalog_symbols()
    ordered = {k: e[k] for k in sorted(symbols, key=_sort_key)}
    return HarmonicCatalog(entries=ordered, symbols={k: symbols[k] for k in ordered},
                           omega_plus=wp, omega_X=wx, mode_flag=chis.mode_flag)


def _sort_key(k: HarmonicKey):
    return (MODES.index(k.mode), k.order, k.n_plus, k.n_X)


def amplitude_at_time(catalog: HarmonicCatalog, t) -> tuple:
    """Assembled (alpha_1, alpha_2, beta_1, beta_2) at time(s) ``t``."""
    t = np.asarray(t, dtype=float)
    out = []
    for mode in MODES:
        total = np.zeros(t.shape, dtype=complex)
        for k, c in catalog.by_mode(mode).items():
            total = total + c * np.exp(1j * catalog.frequency(k) * t)
        out.append(total[()] if total.ndim == 0 else total)
    return tuple(out)
