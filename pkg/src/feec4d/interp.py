"""Facet traces, interpolation, and the structural checks built on them.

* :func:`hyperplane_trace` restricts a proxy to a facet of the reference cube.
* :func:`interpolate` is the canonical interpolant defined by the DOFs.
* :func:`commuting_check`, :func:`ibp_identity_check`,
  :func:`conformity_pair_check` and :func:`maxwell_demo` turn the structural
  statements into residuals.
"""
import math
from dataclasses import dataclass

import numpy as np

from .dofs import build_dofset, solve_gram
from .exterior import (
    SKEW_PAIRS,
    FormField,
    aux_curl,
    aux_div,
    cross_ss,
    cross_vs,
    cross_vv,
    curl4,
    d_proxy,
    div4,
    dot4,
    frobenius_skew,
    grad4,
    random_field,
    skew_entry,
    skw_grad,
)
from .geometry import TesseractMap, chart, entity_quadrature, reference_topology
from .pullback import push
from .spaces import space_basis
from .tensorpoly import NDIM, TensorPoly4, gauss_legendre

IBP_TAGS = ("1A", "1C", "2A", "2C", "2D", "3")


# -- traces ---------------------------------------------------------------

@dataclass(frozen=True)
class TraceResult:
    """Trace of an s-form proxy on one facet.

    ``comps`` are polynomials in the facet's free coordinates (stored as
    4-variable polynomials constant along the frozen axis): one scalar for
    s = 0, 3 and one entry per free axis for s = 1, 2. For s = 1,
    ``bivector`` keeps the six entries of 1/2 (E n^T - n E^T).
    """

    facet: int
    s: int
    free: tuple
    comps: tuple
    bivector: tuple = None

    def __call__(self, t):
        """Values at facet coordinates ``t`` of shape (n, 3); returns (ncomp, n)."""
        x = chart("facet", self.facet).embed(np.atleast_2d(t))
        return np.array([c(x) for c in self.comps])

    def max_abs_coeff(self):
        return max(c.max_abs_coeff() for c in self.comps)


def _restrict(p, axis, value):
    return p.restrict(axis, value) if isinstance(p, TensorPoly4) else TensorPoly4.constant(p)


def hyperplane_trace(s, F, facet):
    """Trace of ``F`` on the facet with index ``facet`` (outward normal)."""
    if s == 4:
        raise ValueError("traces of 4-forms are not defined")
    if F.s != s:
        raise ValueError(f"form degree mismatch: s={s}, field has s={F.s}")
    ch = chart("facet", facet)
    n = ch.normal()
    (axis, sign), = ch.entity.frozen
    free = ch.entity.free
    bivector = None
    if s == 0:
        comps = (F.comps[0],)
    elif s == 1:
        comps = tuple(F.comps[a] for a in free)
        bivector = tuple(
            _restrict(0.5 * (F.comps[p] * n[q] - F.comps[q] * n[p]), axis, sign)
            for p, q in SKEW_PAIRS
        )
    elif s == 2:
        full = cross_vs(n, F.comps)
        comps = tuple(full[a] for a in free)
    else:
        comps = (dot4(F.comps, n),)
    comps = tuple(_restrict(c, axis, sign) for c in comps)
    return TraceResult(facet, s, free, comps, bivector)


# -- interpolation --------------------------------------------------------

@dataclass(frozen=True)
class Interpolant:
    k: int
    s: int
    coeffs: np.ndarray
    dof_values: np.ndarray

    @property
    def field(self):
        return space_basis(self.k, self.s).combine(self.coeffs)


def interpolate(k, s, target):
    """Canonical interpolant: the member of V^{k,s} sharing all DOF values with ``target``."""
    values = build_dofset(k, s).evaluate(target)[0]
    return Interpolant(k, s, solve_gram(k, s, values), values)


def commuting_check(k, s, p):
    """Relative coefficient residual of op_s(Pi^s p) - Pi^{s+1}(op_s p).

    Scaled by max(1, largest coefficient of op_s p).
    """
    if not 0 <= s <= 3:
        raise ValueError("commuting check needs s <= 3")
    dp = d_proxy(p)
    lhs = d_proxy(interpolate(k, s, p).field)
    rhs = interpolate(k, s + 1, dp).field
    return lhs.coeff_distance(rhs) / max(1.0, dp.max_abs_coeff())


# -- integration by parts --------------------------------------------------

def _ibp_parts(which, a, b):
    """Boundary integrand, derived fields and volume integrand of one identity.

    Integrands act on point values: ``A``, ``B`` are the values of the two
    arguments, ``D`` those of the derived fields and ``n`` the outward normal.
    """
    if which == "1A":
        E, F = a, b
        return (
            lambda A, B, n: frobenius_skew(cross_vv(n, A), B),
            (aux_curl(E), curl4(F)),
            lambda A, B, D: frobenius_skew(D[0], B) - dot4(D[1], A),
        )
    if which == "1C":
        E, F = a, b

        def bnd(A, B, n):
            T = tuple(0.5 * (A[p] * n[q] - n[p] * A[q]) for p, q in SKEW_PAIRS)
            return frobenius_skew(T, B)

        return bnd, (aux_div(F), skw_grad(E)), lambda A, B, D: dot4(D[0], A) - frobenius_skew(B, D[1])
    if which == "2A":
        F, E = a, b
        return (
            lambda A, B, n: dot4(cross_vs(n, A), B),
            (curl4(F), aux_curl(E)),
            lambda A, B, D: dot4(D[0], B) - frobenius_skew(D[1], A),
        )
    if which in ("2C", "2D"):
        M, E = a, b

        def bnd(A, B, n):
            Mn = [sum(skew_entry(A, i, j) * n[j] for j in range(NDIM)) for i in range(NDIM)]
            return dot4(Mn, B)

        if which == "2C":
            return (bnd, (aux_div(M), skw_grad(E)),
                    lambda A, B, D: dot4(D[0], B) - frobenius_skew(A, D[1]))
        return (bnd, (aux_div(M), aux_curl(E)),
                lambda A, B, D: dot4(D[0], B) - cross_ss(A, D[1]))
    if which == "3":
        G, u = a, b
        return (
            lambda A, B, n: dot4(A, n) * B[0],
            (div4(G), grad4(u)),
            lambda A, B, D: D[0][0] * B[0] + dot4(A, D[1]),
        )
    raise ValueError(f"unknown identity tag {which!r}; expected one of {IBP_TAGS}")


def _ibp_sides(which, a, b):
    """Both sides by Gauss quadrature, exact for the polynomial integrands."""
    bnd, derived, vol = _ibp_parts(which, a, b)
    n = (max(a.coeff_shape()) + max(b.coeff_shape()) - 2) // 2 + 1
    boundary = 0.0
    for f in reference_topology().facets:
        ch = chart("facet", f.index)
        rule = entity_quadrature(ch, 1, n=n)
        x = rule.points()
        boundary += float(rule.integrate(bnd(a(x), b(x), ch.normal())))
    rule = gauss_legendre(n)
    mesh = np.meshgrid(*([rule.nodes] * NDIM), indexing="ij")
    x = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    w = np.ones(1)
    for _ in range(NDIM):
        w = np.multiply.outer(w, rule.weights).reshape(-1)
    volume = float(vol(a(x), b(x), [D(x) for D in derived]) @ w)
    return boundary, volume


def ibp_identity_check(which, a, b):
    """Boundary side minus volume side of one integration-by-parts identity.

    Argument order: 1A, 1C: (E, F); 2A: (F, E); 2C, 2D: (M, E); 3: (G, u).
    """
    bnd, vol = _ibp_sides(which, a, b)
    scale = max(1.0, abs(bnd), abs(vol))
    return {
        "which": which,
        "boundary": bnd,
        "volume": vol,
        "residual": abs(bnd - vol),
        "scale": scale,
    }


def ibp_fields(which, rng, degree=3):
    """Random field pair in the argument order expected by ibp_identity_check."""
    first, second = {"1A": (1, 2), "1C": (1, 2), "2A": (2, 1), "2C": (2, 1),
                     "2D": (2, 1), "3": (3, 0)}[which]
    return random_field(first, degree, rng), random_field(second, degree, rng)


# -- two-element conformity -------------------------------------------------

def unit_stack_pair(axis=3):
    """Two unit tesseracts [0,1]^4 and [0,1]^4 + e_axis sharing a facet."""
    A = 0.5 * np.eye(NDIM)
    b1 = 0.5 * np.ones(NDIM)
    b2 = b1.copy()
    b2[axis] += 1.0
    return TesseractMap.from_affine(A, b1), TesseractMap.from_affine(A, b2)


def _shared_facet(phi1, phi2, tol=1e-10):
    topo = reference_topology()
    for f1 in topo.facets:
        v1 = phi1.vertices[list(f1.vertex_ids())]
        for f2 in topo.facets:
            v2 = phi2.vertices[list(f2.vertex_ids())]
            d = np.linalg.norm(v1[:, None, :] - v2[None, :, :], axis=-1)
            if np.all(d.min(axis=1) < tol) and np.all(d.min(axis=0) < tol):
                return f1, f2
    raise ValueError("the two maps do not share a facet")


def _matching_entity(ent, f1, f2):
    """Entity of element 2 that coincides with ``ent`` (inside facet f1 of element 1)."""
    (axis, _), = f1.frozen
    (_, sign2), = f2.frozen
    frozen = tuple((a, sign2 if a == axis else s) for a, s in ent.frozen)
    for cand in reference_topology()[ent.kind]:
        if cand.frozen == frozen:
            return cand
    raise AssertionError("no matching entity")


def conformity_pair_check(k, s, phi1=None, phi2=None, rng=None, npts=20):
    """Shared DOFs equal => physical traces agree across the shared facet.

    Supported pairs share a facet whose reference coordinates line up: the
    free axes of the two reference facets map to the same physical tangents.
    """
    if not 0 <= s <= 3:
        raise ValueError("conformity is checked for s <= 3")
    if phi1 is None or phi2 is None:
        phi1, phi2 = unit_stack_pair()
    rng = np.random.default_rng(0) if rng is None else rng
    f1, f2 = _shared_facet(phi1, phi2)
    (axis1, _), = f1.frozen
    (axis2, _), = f2.frozen
    A1, _ = phi1.affine_parts()
    A2, _ = phi2.affine_parts()
    if axis1 != axis2 or not np.allclose(A1[:, list(f1.free)], A2[:, list(f2.free)], atol=1e-12):
        raise ValueError("shared facet is not aligned in reference coordinates")

    ds = build_dofset(k, s)
    vals1 = rng.uniform(-1.0, 1.0, len(ds))
    vals2 = rng.uniform(-1.0, 1.0, len(ds))
    index = {(f.kind, f.entity, f.slot, f.test): n for n, f in enumerate(ds.functionals)}
    topo = reference_topology()
    shared = 0
    for n, func in enumerate(ds.functionals):
        if func.kind == "volume":
            continue
        ent = topo.entity(func.kind, func.entity)
        if not f1.contains(ent):
            continue
        twin = _matching_entity(ent, f1, f2)
        vals2[index[(func.kind, twin.index, func.slot, func.test)]] = vals1[n]
        shared += 1

    basis = space_basis(k, s)
    u1 = push(s, basis.combine(solve_gram(k, s, vals1)), phi1)
    u2 = push(s, basis.combine(solve_gram(k, s, vals2)), phi2)

    t = rng.uniform(-1.0, 1.0, size=(npts, 3))
    y = phi1(chart("facet", f1.index).embed(t))
    nvec = np.linalg.inv(A1).T[:, axis1]
    nvec = nvec / np.linalg.norm(nvec)
    tr1, tr2 = _physical_trace(s, u1, y, nvec), _physical_trace(s, u2, y, nvec)
    scale = max(1.0, float(np.max(np.abs(tr1))))
    return {
        "k": k,
        "s": s,
        "shared_dofs": shared,
        "facets": (f1.index, f2.index),
        "max_jump": float(np.max(np.abs(tr1 - tr2))) / scale,
    }


def _physical_trace(s, u, y, n):
    vals = u(y)
    if s == 0:
        return vals
    if s == 1:
        return vals - np.outer(n, n @ vals)
    if s == 2:
        return np.array(cross_vs(n, vals))
    return n @ vals


# -- Maxwell ----------------------------------------------------------------

def maxwell_fields(E, B, rho=0.0, j=(0.0, 0.0, 0.0), c=1.0):
    """Faraday proxy F, Maxwell proxy H and source proxy G.

    Coordinates are (x1, x2, x3, x4) = (t, x, y, z).
    """
    Ex, Ey, Ez = E
    Bx, By, Bz = B
    F = FormField(2, (-c * Bx / 2, -c * By / 2, -c * Bz / 2, -Ez / 2, Ey / 2, -Ex / 2))
    H = FormField(2, (-c * Ex / 2, -c * Ey / 2, -c * Ez / 2, Bz / 2, -By / 2, Bx / 2))
    G = FormField(3, tuple(-1.0 * v for v in (rho, *j)))
    return F, H, G


def maxwell_demo(E, B, rho=0.0, j=(0.0, 0.0, 0.0), c=1.0):
    """Residuals of the four-dimensional Maxwell system for given fields and sources."""
    E = [_as_poly(v) for v in E]
    B = [_as_poly(v) for v in B]
    F, H, G = maxwell_fields(E, B, _as_poly(rho), [_as_poly(v) for v in j], c)
    curl_F = curl4(F)
    G_induced = curl_F * (1.0 / (4.0 * math.pi))
    return {
        "F": F,
        "H": H,
        "G": G,
        "curl_F": curl_F,
        "div_induced_current": div4(G_induced).max_abs_coeff(),
        "div_curl_F": div4(curl_F).max_abs_coeff(),
        "source_residual": (curl_F - 4.0 * math.pi * G).max_abs_coeff(),
        "curl_H": curl4(H).max_abs_coeff(),
    }


def _as_poly(v):
    return v if isinstance(v, TensorPoly4) else TensorPoly4.constant(float(v))
