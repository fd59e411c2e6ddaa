"""Tensor-product polynomials on the reference 4-cube and Gauss-Legendre rules.

A :class:`TensorPoly4` stores its coefficients in the monomial basis as a
dense rank-4 array ``c[i, j, k, l]`` multiplying ``x1**i x2**j x3**k x4**l``.
Axes are numbered 0..3 throughout the package.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import legendre as _leg
from scipy.signal import convolve

NDIM = 4
DEFAULT_RTOL = 1e-12


def legendre_family(k):
    """Legendre polynomials P_0..P_k in the monomial basis.

    Built with Bonnet's recurrence ``(n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}``.
    """
    if k < 0:
        return []
    x = Polynomial([0.0, 1.0])
    family = [Polynomial([1.0])]
    if k >= 1:
        family.append(x)
    for n in range(1, k):
        nxt = ((2 * n + 1) * x * family[n] - n * family[n - 1]) / (n + 1)
        family.append(nxt)
    return family


@lru_cache(maxsize=None)
def legendre_coefficients(k):
    """Monomial coefficient matrix ``C[i, :]`` of P_i, shape (k+1, k+1)."""
    out = np.zeros((max(k + 1, 0), max(k + 1, 0)))
    for i, p in enumerate(legendre_family(k)):
        out[i, : len(p.coef)] = p.coef
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class QuadRule1D:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def npoints(self):
        return len(self.nodes)

    @property
    def exact_degree(self):
        return 2 * len(self.nodes) - 1

    def integrate(self, values):
        return self.weights @ values


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """n-point Gauss-Legendre rule on [-1, 1]; exact through degree 2n-1."""
    if n < 1:
        raise ValueError(f"Gauss-Legendre rule needs n >= 1, got {n}")
    nodes, weights = _leg.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule1D(nodes, weights)


@dataclass(frozen=True)
class QuadRule4D:
    """Tensor grid of four 1D rules."""

    rules: tuple

    @classmethod
    def uniform(cls, n):
        rule = gauss_legendre(n)
        return cls((rule,) * NDIM)

    @property
    def exact_degrees(self):
        return tuple(r.exact_degree for r in self.rules)

    def points(self):
        grids = np.meshgrid(*[r.nodes for r in self.rules], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def weights(self):
        w = self.rules[0].weights
        for r in self.rules[1:]:
            w = np.multiply.outer(w, r.weights)
        return w.ravel()


class TensorPoly4:
    """Polynomial in Q^{l,m,n,q}(x1, x2, x3, x4) with monomial coefficients.

    Instances are treated as immutable; arithmetic returns new objects.
    """

    __slots__ = ("coeffs",)
    __array_priority__ = 100

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim != NDIM:
            raise ValueError(f"coefficient tensor must be rank 4, got shape {c.shape}")
        if 0 in c.shape:
            c = np.zeros((1, 1, 1, 1))
        c.setflags(write=False)
        self.coeffs = c

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, value):
        return cls(np.full((1, 1, 1, 1), float(value)))

    @classmethod
    def zero(cls):
        return cls.constant(0.0)

    @classmethod
    def coordinate(cls, axis):
        shape = [1] * NDIM
        shape[axis] = 2
        c = np.zeros(shape)
        c[(0,) * NDIM] = 0.0
        idx = [0] * NDIM
        idx[axis] = 1
        c[tuple(idx)] = 1.0
        return cls(c)

    @classmethod
    def from_factors(cls, factors):
        """Separable product f1(x1) f2(x2) f3(x3) f4(x4) of 1D coefficient vectors."""
        c = np.asarray(factors[0], dtype=float)
        for f in factors[1:]:
            c = np.multiply.outer(c, np.asarray(f, dtype=float))
        return cls(c)

    @classmethod
    def from_monomial(cls, exponents, scale=1.0):
        c = np.zeros([e + 1 for e in exponents])
        c[tuple(exponents)] = scale
        return cls(c)

    # -- bookkeeping --------------------------------------------------
    @property
    def shape(self):
        return self.coeffs.shape

    @property
    def degrees(self):
        """Per-axis storage degrees (l, m, n, q)."""
        return tuple(s - 1 for s in self.coeffs.shape)

    def effective_degrees(self, tol=0.0):
        """Per-axis degrees after discarding coefficients with |c| <= tol."""
        mask = np.abs(self.coeffs) > tol
        if not mask.any():
            return (-1,) * NDIM
        degs = []
        for axis in range(NDIM):
            other = tuple(a for a in range(NDIM) if a != axis)
            nz = np.nonzero(mask.any(axis=other))[0]
            degs.append(int(nz[-1]))
        return tuple(degs)

    def trim(self, tol=0.0):
        degs = self.effective_degrees(tol)
        if degs[0] < 0:
            return TensorPoly4.zero()
        return TensorPoly4(self.coeffs[tuple(slice(0, d + 1) for d in degs)])

    def padded(self, shape):
        """Coefficient array zero-padded (never truncated) to ``shape``."""
        if any(s < t for s, t in zip(shape, self.shape)):
            trimmed = self.trim()
            if any(s < t for s, t in zip(shape, trimmed.shape)):
                raise ValueError(f"cannot pad shape {self.shape} into {shape}")
            return trimmed.padded(shape)
        out = np.zeros(shape)
        out[tuple(slice(0, s) for s in self.shape)] = self.coeffs
        return out

    def max_abs_coeff(self):
        return float(np.max(np.abs(self.coeffs)))

    def is_zero(self, tol=0.0):
        return self.max_abs_coeff() <= tol

    # -- arithmetic ---------------------------------------------------
    def _binary_shape(self, other):
        return tuple(max(a, b) for a, b in zip(self.shape, other.shape))

    def __add__(self, other):
        if isinstance(other, TensorPoly4):
            shape = self._binary_shape(other)
            return TensorPoly4(self.padded(shape) + other.padded(shape))
        if np.isscalar(other):
            c = np.array(self.coeffs)
            c[(0,) * NDIM] += other
            return TensorPoly4(c)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return TensorPoly4(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TensorPoly4):
            return TensorPoly4(convolve(self.coeffs, other.coeffs, method="direct"))
        if np.isscalar(other):
            return TensorPoly4(self.coeffs * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return TensorPoly4(self.coeffs / other)
        return NotImplemented

    def diff(self, axis):
        """Partial derivative along ``axis`` (0-based)."""
        n = self.shape[axis]
        if n == 1:
            shape = list(self.shape)
            return TensorPoly4(np.zeros(shape))
        powers = np.arange(1, n, dtype=float)
        bshape = [1] * NDIM
        bshape[axis] = n - 1
        sliced = np.take(self.coeffs, np.arange(1, n), axis=axis)
        return TensorPoly4(sliced * powers.reshape(bshape))

    # -- evaluation ---------------------------------------------------
    def __call__(self, x):
        return tp_eval(self, x)

    def restrict(self, axis, value):
        """Substitute ``x_axis = value``; result is constant along ``axis``."""
        powers = float(value) ** np.arange(self.shape[axis])
        c = np.tensordot(self.coeffs, powers, axes=([axis], [0]))
        return TensorPoly4(np.expand_dims(c, axis))

    def total_degree(self):
        nz = np.nonzero(self.coeffs)
        return int(max(sum(nz))) if nz[0].size else 0

    def compose_affine(self, A, b):
        """Return p(A xi + b) as a polynomial in xi.

        Horner's scheme per axis, vectorized over the remaining coefficient
        slices. After folding in axes a..3 the partial results have total
        degree at most the sum of those axis degrees, so each stage works on
        arrays capped at that degree.
        """
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        c = self.trim().coeffs
        total = self.total_degree()

        def times_linear(P, i, m):
            out = b[i] * P
            lead = P.ndim - NDIM
            for j in range(NDIM):
                if A[i, j] != 0.0 and m > 1:
                    dst = [slice(None)] * P.ndim
                    src = [slice(None)] * P.ndim
                    dst[lead + j] = slice(1, None)
                    src[lead + j] = slice(0, m - 1)
                    out[tuple(dst)] += A[i, j] * P[tuple(src)]
            return out

        # acc holds stacked polynomials indexed by the not-yet-summed axes
        acc, degree = None, 0
        for axis in range(NDIM - 1, -1, -1):
            n = c.shape[axis]
            m = min(degree + n - 1, total) + 1
            if acc is None:
                def term(e):
                    out = np.zeros(c.shape[:axis] + (m,) * NDIM)
                    out[(Ellipsis,) + (0,) * NDIM] = c[..., e]
                    return out
            else:
                grow = m - acc.shape[-1]
                prev = np.pad(acc, [(0, 0)] * (acc.ndim - NDIM) + [(0, grow)] * NDIM)
                term = lambda e, prev=prev: prev[(slice(None),) * axis + (e,)]
            new = term(n - 1)
            for e in range(n - 2, -1, -1):
                new = times_linear(new, axis, m) + term(e)
            acc, degree = new, degree + n - 1
        return TensorPoly4(acc)

    def allclose(self, other, rtol=DEFAULT_RTOL, atol=0.0):
        shape = self._binary_shape(other)
        a, b = self.padded(shape), other.padded(shape)
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
        return bool(np.max(np.abs(a - b)) <= rtol * scale + atol)

    def __repr__(self):
        return f"TensorPoly4(degrees={self.degrees})"


def _sum_polys(polys):
    if not polys:
        return TensorPoly4.zero()
    shape = tuple(max(p.shape[a] for p in polys) for a in range(NDIM))
    total = np.zeros(shape)
    for p in polys:
        total[tuple(slice(0, s) for s in p.shape)] += p.coeffs
    return TensorPoly4(total)


def sum_polys(polys):
    """Sum of a list of TensorPoly4 (zero for an empty list)."""
    return _sum_polys(list(polys))


def vandermonde(x, degree):
    x = np.asarray(x, dtype=float)
    return x[..., None] ** np.arange(degree + 1)


def tp_eval(p, x):
    """Evaluate ``p`` at one point (shape (4,)) or many points (shape (n, 4))."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    V = [vandermonde(pts[:, a], p.degrees[a]) for a in range(NDIM)]
    t = np.tensordot(p.coeffs, V[3], axes=([3], [1]))
    t = np.einsum("ijkp,pk->ijp", t, V[2])
    t = np.einsum("ijp,pj->ip", t, V[1])
    vals = np.einsum("ip,pi->p", t, V[0])
    return float(vals[0]) if single else vals


def tabulate_grid(coeffs, grids):
    """Evaluate stacked coefficient tensors on a tensor grid.

    ``coeffs`` has shape (..., d1, d2, d3, d4); ``grids`` holds four 1D node
    arrays. Returns shape (..., n1, n2, n3, n4).
    """
    out = np.asarray(coeffs, dtype=float)
    lead = out.ndim - NDIM
    for a in range(NDIM):
        V = vandermonde(grids[a], out.shape[lead + a] - 1)  # (n_a, d_a)
        out = np.tensordot(out, V, axes=([lead + a], [1]))
        out = np.moveaxis(out, -1, lead + a)
    return out


def tp_add(a, b):
    return a + b


def tp_scale(a, s):
    return a * float(s)


def tp_mul(a, b):
    return a * b


def tp_diff(p, axis):
    return p.diff(axis)


def _moments(rule, degree):
    return vandermonde(rule.nodes, degree).T @ rule.weights


def tp_integrate(p, rule):
    """Integral of ``p`` over [-1, 1]^4 using a tensor rule.

    Raises ValueError if any per-axis degree exceeds the rule's exactness.
    """
    degs = p.degrees
    for a, (d, r) in enumerate(zip(degs, rule.rules)):
        if d > r.exact_degree:
            raise ValueError(
                f"rule too weak on axis {a}: degree {d} > exactness {r.exact_degree}"
            )
    m = [_moments(rule.rules[a], degs[a]) for a in range(NDIM)]
    return float(np.einsum("ijkl,i,j,k,l->", p.coeffs, *m))


def integrate(p):
    """Exact integral over [-1, 1]^4 with the smallest sufficient Gauss rule."""
    n = max(p.degrees) // 2 + 1
    return tp_integrate(p, QuadRule4D.uniform(n))


def integrate_axes(p, axes):
    """Integrate ``p`` over [-1, 1] along ``axes``; other axes are left as-is.

    The result keeps all four axes (integrated ones collapse to degree 0).
    """
    c = p.coeffs
    for a in axes:
        n = c.shape[a] // 2 + 1
        m = _moments(gauss_legendre(n), c.shape[a] - 1)
        c = np.expand_dims(np.tensordot(c, m, axes=([a], [0])), a)
    return TensorPoly4(c)


def from_legendre(L):
    """TensorPoly4 from a rank-4 tensor of Legendre coefficients."""
    L = np.asarray(L, dtype=float)
    mats = [legendre_coefficients(s - 1) for s in L.shape]
    return TensorPoly4(np.einsum("abcd,ai,bj,ck,dl->ijkl", L, *mats, optimize=True))
