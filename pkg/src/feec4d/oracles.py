"""Independent reference formulas for the 4D operators.

Two oracles, both independent of the Levi-Civita enumeration in
:mod:`feec4d.exterior`:

* Hand-unrolled component formulas written out entry by entry. They take a
  derivative table ``d[c][j]`` holding the partial derivative along axis j
  of component c (1-based names in the comments, 0-based indices in code).
* Central finite differences, which produce such a table numerically.
"""
import numpy as np

from .exterior import PAIR_INDEX


def _skew(w, i, j):
    """Entry F_ij (1-based) of the skew matrix with upper triangle ``w``."""
    if i == j:
        return 0.0 * w[0]
    if i < j:
        return w[PAIR_INDEX[(i - 1, j - 1)]]
    return -w[PAIR_INDEX[(j - 1, i - 1)]]


def _d(table, comp, axis):
    """Partial derivative d_axis of component comp (both 1-based)."""
    return table[comp - 1][axis - 1]


def _dF(table, k, l, j):
    """d_j F_kl (1-based) from the derivative table of the six stored entries."""
    col = [row[j - 1] for row in table]
    return _skew(col, k, l)


# -- operators ------------------------------------------------------------

def grad_unrolled(du):
    return [du[0][0], du[0][1], du[0][2], du[0][3]]


def skwgrad_unrolled(dE):
    """Upper triangle (12, 13, 14, 23, 24, 34) of 1/2 (Grad E^T - Grad E)."""
    return [
        0.5 * (_d(dE, 2, 1) - _d(dE, 1, 2)),
        0.5 * (_d(dE, 3, 1) - _d(dE, 1, 3)),
        0.5 * (_d(dE, 4, 1) - _d(dE, 1, 4)),
        0.5 * (_d(dE, 3, 2) - _d(dE, 2, 3)),
        0.5 * (_d(dE, 4, 2) - _d(dE, 2, 4)),
        0.5 * (_d(dE, 4, 3) - _d(dE, 3, 4)),
    ]


def curl_unrolled(dF):
    def f(k, l, j):
        return _dF(dF, k, l, j)

    return [
        (f(3, 4, 2) - f(4, 3, 2)) + (f(4, 2, 3) - f(2, 4, 3)) + (f(2, 3, 4) - f(3, 2, 4)),
        (f(4, 3, 1) - f(3, 4, 1)) + (f(1, 4, 3) - f(4, 1, 3)) + (f(3, 1, 4) - f(1, 3, 4)),
        (f(2, 4, 1) - f(4, 2, 1)) + (f(4, 1, 2) - f(1, 4, 2)) + (f(1, 2, 4) - f(2, 1, 4)),
        (f(3, 2, 1) - f(2, 3, 1)) + (f(1, 3, 2) - f(3, 1, 2)) + (f(2, 1, 3) - f(1, 2, 3)),
    ]


def div_unrolled(dG):
    return [_d(dG, 1, 1) + _d(dG, 2, 2) + _d(dG, 3, 3) + _d(dG, 4, 4)]


def aux_curl_unrolled(dE):
    """Upper triangle of Curl E."""
    return [
        _d(dE, 4, 3) - _d(dE, 3, 4),
        _d(dE, 2, 4) - _d(dE, 4, 2),
        _d(dE, 3, 2) - _d(dE, 2, 3),
        _d(dE, 4, 1) - _d(dE, 1, 4),
        _d(dE, 1, 3) - _d(dE, 3, 1),
        _d(dE, 2, 1) - _d(dE, 1, 2),
    ]


def aux_div_unrolled(dF):
    def f(i, j, axis):
        return _dF(dF, i, j, axis)

    return [
        f(1, 2, 2) + f(1, 3, 3) + f(1, 4, 4),
        f(2, 1, 1) + f(2, 3, 3) + f(2, 4, 4),
        f(3, 1, 1) + f(3, 2, 2) + f(3, 4, 4),
        f(4, 1, 1) + f(4, 2, 2) + f(4, 3, 3),
    ]


# -- cross products -------------------------------------------------------

def cross_vv_unrolled(M, N):
    M1, M2, M3, M4 = M
    N1, N2, N3, N4 = N
    return [
        M3 * N4 - M4 * N3,
        M4 * N2 - M2 * N4,
        M2 * N3 - M3 * N2,
        M1 * N4 - M4 * N1,
        M3 * N1 - M1 * N3,
        M1 * N2 - M2 * N1,
    ]


def cross_vs_unrolled(M, U):
    M1, M2, M3, M4 = M

    def F(i, j):
        return _skew(U, i, j)

    return [
        M2 * (F(3, 4) - F(4, 3)) + M3 * (F(4, 2) - F(2, 4)) + M4 * (F(2, 3) - F(3, 2)),
        M1 * (F(4, 3) - F(3, 4)) + M3 * (F(1, 4) - F(4, 1)) + M4 * (F(3, 1) - F(1, 3)),
        M1 * (F(2, 4) - F(4, 2)) + M2 * (F(4, 1) - F(1, 4)) + M4 * (F(1, 2) - F(2, 1)),
        M1 * (F(3, 2) - F(2, 3)) + M2 * (F(1, 3) - F(3, 1)) + M3 * (F(2, 1) - F(1, 2)),
    ]


def cross_ss_unrolled(U, V):
    U12, U13, U14, U23, U24, U34 = U
    V12, V13, V14, V23, V24, V34 = V
    return U12 * V34 - U13 * V24 + U14 * V23 + U23 * V14 - U24 * V13 + U34 * V12


# -- derivative tables ----------------------------------------------------

def symbolic_table(F, x):
    """d[c][j] = exact partial derivative of component c along axis j at x."""
    return [[c.diff(j)(x) for j in range(4)] for c in F.comps]


def poly_table(F):
    """d[c][j] as polynomials, so the unrolled formulas return polynomials."""
    return [[c.diff(j) for j in range(4)] for c in F.comps]


def fd_table(F, x, h=1e-5):
    """Central-difference derivative table of a FormField (or any callable
    returning component values) at one point."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        cols.append((np.asarray(F(x + e)) - np.asarray(F(x - e))) / (2.0 * h))
    return np.stack(cols, axis=1).tolist()


UNROLLED = {
    "grad": (0, grad_unrolled),
    "skw_grad": (1, skwgrad_unrolled),
    "curl": (2, curl_unrolled),
    "div": (3, div_unrolled),
    "aux_curl": (1, aux_curl_unrolled),
    "aux_div": (2, aux_div_unrolled),
}
