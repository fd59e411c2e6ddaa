"""Multilinear algebra in four dimensions and the proxy differential operators.

Proxy conventions
-----------------
* 0- and 4-form proxies are scalars (one component).
* 1- and 3-form proxies are 4-vectors.
* 2-form proxies are skew 4x4 matrices stored by their upper triangle in the
  order (w12, w13, w14, w23, w24, w34), i.e. the image of the L map.

The factor 1/2 that relates the coefficients of a 2-form to its proxy lives
only in :func:`upsilon` / :func:`upsilon_inv`.
"""
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .tensorpoly import NDIM, TensorPoly4, from_legendre, tp_eval

SKEW_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PAIR_INDEX = {p: n for n, p in enumerate(SKEW_PAIRS)}
N_COMPONENTS = (1, 4, 6, 4, 1)


def permutation_sign(perm):
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def _levi_civita():
    eps = np.zeros((NDIM,) * 4)
    for perm in permutations(range(NDIM)):
        eps[perm] = permutation_sign(perm)
    eps.setflags(write=False)
    return eps


LEVI_CIVITA = _levi_civita()
# the 24 non-vanishing (i, j, k, l, sign) entries
EPS_TERMS = tuple((*perm, permutation_sign(perm)) for perm in permutations(range(NDIM)))


def skew_entry(w, i, j):
    """Entry (i, j) of the skew matrix whose upper triangle is ``w``."""
    if i == j:
        return 0
    if i < j:
        return w[PAIR_INDEX[(i, j)]]
    return -w[PAIR_INDEX[(j, i)]]


def lmap(w):
    """Pack six values (w12, ..., w34) into a 4x4 skew-symmetric array."""
    w = np.asarray(w, dtype=float)
    out = np.zeros((NDIM, NDIM) + w.shape[1:])
    for n, (i, j) in enumerate(SKEW_PAIRS):
        out[i, j] = w[n]
        out[j, i] = -w[n]
    return out


def lmap_inv(M):
    M = np.asarray(M, dtype=float)
    return np.stack([M[i, j] for i, j in SKEW_PAIRS])


def _as_poly(c):
    return c if isinstance(c, TensorPoly4) else TensorPoly4.constant(float(c))


@dataclass(frozen=True)
class FormField:
    """Proxy of an s-form with polynomial components.

    ``comps`` holds 1, 4, 6, 4, 1 TensorPoly4 entries for s = 0..4.
    """

    s: int
    comps: tuple

    def __post_init__(self):
        comps = tuple(_as_poly(c) for c in self.comps)
        if not 0 <= self.s <= 4:
            raise ValueError(f"form degree must be in 0..4, got {self.s}")
        if len(comps) != N_COMPONENTS[self.s]:
            raise ValueError(
                f"{self.s}-form proxy needs {N_COMPONENTS[self.s]} components, got {len(comps)}"
            )
        object.__setattr__(self, "comps", comps)

    @classmethod
    def zero(cls, s):
        return cls(s, (TensorPoly4.zero(),) * N_COMPONENTS[s])

    @classmethod
    def scalar(cls, p, s=0):
        return cls(s, (p,))

    @property
    def ncomp(self):
        return len(self.comps)

    @property
    def is_skew(self):
        return self.s == 2

    def __call__(self, x):
        """Component values at one point (ncomp,) or many points (ncomp, n)."""
        return np.array([tp_eval(c, x) for c in self.comps])

    def matrix(self, x):
        """Full 4x4 skew matrix values of a 2-form proxy."""
        if self.s != 2:
            raise ValueError("matrix view only exists for 2-form proxies")
        return lmap(self(x))

    def __add__(self, other):
        self._check_same(other)
        return FormField(self.s, tuple(a + b for a, b in zip(self.comps, other.comps)))

    def __sub__(self, other):
        self._check_same(other)
        return FormField(self.s, tuple(a - b for a, b in zip(self.comps, other.comps)))

    def __neg__(self):
        return FormField(self.s, tuple(-c for c in self.comps))

    def __mul__(self, scale):
        return FormField(self.s, tuple(c * float(scale) for c in self.comps))

    __rmul__ = __mul__

    def _check_same(self, other):
        if not isinstance(other, FormField) or other.s != self.s:
            raise ValueError("form degree mismatch")

    def max_degree(self):
        return max(max(c.degrees) for c in self.comps)

    def coeff_shape(self):
        return tuple(max(c.shape[a] for c in self.comps) for a in range(NDIM))

    def coeff_array(self, shape=None):
        """Stacked, zero-padded coefficient tensors, shape (ncomp, *shape)."""
        shape = self.coeff_shape() if shape is None else tuple(shape)
        return np.stack([c.padded(shape) for c in self.comps])

    def max_abs_coeff(self):
        return max(c.max_abs_coeff() for c in self.comps)

    def coeff_distance(self, other):
        """Max coefficientwise difference to ``other``."""
        self._check_same(other)
        shape = tuple(max(a, b) for a, b in zip(self.coeff_shape(), other.coeff_shape()))
        return float(np.max(np.abs(self.coeff_array(shape) - other.coeff_array(shape))))

    def trim(self, tol=0.0):
        return FormField(self.s, tuple(c.trim(tol) for c in self.comps))


def as_field(u, s=0):
    if isinstance(u, FormField):
        return u
    if isinstance(u, TensorPoly4):
        return FormField(s, (u,))
    return FormField(s, tuple(u))


@dataclass(frozen=True)
class CoeffForm:
    """Coefficient functions of an s-form keyed by increasing index tuples."""

    s: int
    comps: dict

    def __post_init__(self):
        expected = set(combinations(range(NDIM), self.s))
        if set(self.comps) != expected:
            raise ValueError(f"{self.s}-form needs components {sorted(expected)}")

    @classmethod
    def from_list(cls, s, values):
        return cls(s, dict(zip(combinations(range(NDIM), s), (_as_poly(v) for v in values))))

    def ordered(self):
        return [self.comps[I] for I in combinations(range(NDIM), self.s)]


# Levi-Civita bookkeeping for 3-form proxies: slot i holds the coefficient of
# the complementary triple, with the alternating sign of the proxy table.
_THREE_FORM_SLOTS = (((1, 2, 3), 1.0), ((0, 2, 3), -1.0), ((0, 1, 3), 1.0), ((0, 1, 2), -1.0))


def _check_degree(s, obj):
    if obj.s != s:
        raise ValueError(f"expected a {s}-form, got a {obj.s}-form")


def upsilon(s, f):
    """Proxy of a form given by its coefficient functions."""
    _check_degree(s, f)
    if s == 0:
        return FormField(0, (f.comps[()],))
    if s == 1:
        return FormField(1, tuple(f.comps[(i,)] for i in range(NDIM)))
    if s == 2:
        return FormField(2, tuple(0.5 * f.comps[p] for p in SKEW_PAIRS))
    if s == 3:
        return FormField(3, tuple(sign * f.comps[I] for I, sign in _THREE_FORM_SLOTS))
    return FormField(4, (f.comps[(0, 1, 2, 3)],))


def upsilon_inv(s, F):
    _check_degree(s, F)
    if s == 0:
        return CoeffForm(0, {(): F.comps[0]})
    if s == 1:
        return CoeffForm(1, {(i,): F.comps[i] for i in range(NDIM)})
    if s == 2:
        return CoeffForm(2, {p: 2.0 * F.comps[n] for n, p in enumerate(SKEW_PAIRS)})
    if s == 3:
        return CoeffForm(3, {I: sign * F.comps[n] for n, (I, sign) in enumerate(_THREE_FORM_SLOTS)})
    return CoeffForm(4, {(0, 1, 2, 3): F.comps[0]})


# -- generic component algebra (works on floats, arrays and TensorPoly4) --

def _combine(terms):
    total = 0
    for t in terms:
        total = total + t
    return total


def cross_vv(M, N):
    """[M x N]_ij = sum_kl eps_ijkl M_k N_l, returned as six upper-triangle entries."""
    out = []
    for i, j in SKEW_PAIRS:
        out.append(_combine(
            sgn * M[k] * N[l] for (a, b, k, l, sgn) in EPS_TERMS if (a, b) == (i, j)
        ))
    return tuple(out)


def cross_vs(M, U):
    """[M x U]_i = sum_jkl eps_ijkl M_j U_kl for a 4-vector M and skew U (6 entries)."""
    out = []
    for i in range(NDIM):
        out.append(_combine(
            sgn * M[j] * skew_entry(U, k, l) for (a, j, k, l, sgn) in EPS_TERMS if a == i
        ))
    return tuple(out)


def cross_ss(U, V):
    """U x V = sum_{i<j} sum_{k<l} eps_ijkl U_ij V_kl."""
    return _combine(
        sgn * U[PAIR_INDEX[(i, j)]] * V[PAIR_INDEX[(k, l)]]
        for (i, j, k, l, sgn) in EPS_TERMS
        if i < j and k < l
    )


def frobenius_skew(U, V):
    """Full double contraction U : V of two skew matrices given by upper triangles."""
    return _combine(2.0 * U[n] * V[n] for n in range(6))


def dot4(a, b):
    return _combine(a[i] * b[i] for i in range(NDIM))


# -- differential operators ----------------------------------------------

def grad4(u):
    u = as_field(u)
    _check_degree(0, u)
    u = u.comps[0]
    return FormField(1, tuple(u.diff(a) for a in range(NDIM)))


def skw_grad(E):
    """1/2 (Grad E^T - Grad E), entry (i, j) = 1/2 (d_i E_j - d_j E_i)."""
    _check_degree(1, E)
    E = E.comps
    return FormField(2, tuple(0.5 * (E[j].diff(i) - E[i].diff(j)) for i, j in SKEW_PAIRS))


def curl4(F):
    """[curl F]_i = sum_jkl eps_ijkl d_j F_kl."""
    _check_degree(2, F)
    F = F.comps
    out = []
    for i in range(NDIM):
        out.append(_combine(
            sgn * skew_entry(F, k, l).diff(j) for (a, j, k, l, sgn) in EPS_TERMS if a == i
        ))
    return FormField(3, tuple(out))


def div4(G):
    _check_degree(3, G)
    G = G.comps
    return FormField(4, (_combine(G[i].diff(i) for i in range(NDIM)),))


def aux_curl(E):
    """[Curl E]_ij = sum_kl eps_ijkl d_k E_l (skew-valued)."""
    _check_degree(1, E)
    E = E.comps
    out = []
    for i, j in SKEW_PAIRS:
        out.append(_combine(
            sgn * E[l].diff(k) for (a, b, k, l, sgn) in EPS_TERMS if (a, b) == (i, j)
        ))
    return FormField(2, tuple(out))


def aux_div(F):
    """[Div F]_i = sum_j d_j F_ij (vector-valued)."""
    _check_degree(2, F)
    F = F.comps
    out = []
    for i in range(NDIM):
        out.append(_combine(skew_entry(F, i, j).diff(j) for j in range(NDIM) if j != i))
    return FormField(3, tuple(out))


_COMPLEX = {0: grad4, 1: skw_grad, 2: curl4, 3: div4}


def d_proxy(F):
    """The s-th operator of the complex grad -> skwGrad -> curl -> div."""
    if F.s not in _COMPLEX:
        raise ValueError("no derivative is defined on 4-form proxies")
    return _COMPLEX[F.s](F)


def exterior_derivative(f):
    """Exterior derivative on coefficient functions.

    Works directly with wedge monomials: d(w_I dx^I) = sum_j d_j w_I dx^j ^ dx^I,
    where dx^j is moved into sorted position at the cost of one sign per index
    of I smaller than j.
    """
    if f.s >= 4:
        raise ValueError("exterior derivative of a 4-form is zero-dimensional; s must be <= 3")
    out = {J: [] for J in combinations(range(NDIM), f.s + 1)}
    for I, w in f.comps.items():
        for j in range(NDIM):
            if j in I:
                continue
            J = tuple(sorted(I + (j,)))
            sign = -1.0 if sum(1 for i in I if i < j) % 2 else 1.0
            out[J].append(sign * w.diff(j))
    return CoeffForm(f.s + 1, {J: _as_poly(_combine(t)) for J, t in out.items()})


# -- random fields --------------------------------------------------------

def random_poly(degrees, rng):
    """Polynomial with Legendre coefficients uniform in [-1, 1]."""
    if np.isscalar(degrees):
        degrees = (int(degrees),) * NDIM
    L = rng.uniform(-1.0, 1.0, size=tuple(d + 1 for d in degrees))
    return from_legendre(L)


def random_field(s, degree, rng):
    return FormField(s, tuple(random_poly(degree, rng) for _ in range(N_COMPONENTS[s])))


def random_coeff_form(s, degree, rng):
    return CoeffForm.from_list(
        s, [random_poly(degree, rng) for _ in combinations(range(NDIM), s)]
    )
