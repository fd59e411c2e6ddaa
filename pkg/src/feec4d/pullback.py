"""Pullbacks of form proxies under tesseract maps.

With J = D phi:

* s=0: u o phi
* s=1: J^T (E o phi)
* s=2: J^T (F o phi) J
* s=3: det(J) J^{-1} (G o phi)
* s=4: det(J) (q o phi)

For affine maps the pullback of a polynomial field is again a polynomial and
:func:`pull` returns it exactly. For general multilinear maps use
:func:`pull_values`, which evaluates pointwise.
"""
import numpy as np

from .dofs import build_dofset
from .exterior import SKEW_PAIRS, FormField, d_proxy, lmap, lmap_inv
from .geometry import TesseractMap, reference_topology
from .tensorpoly import NDIM, gauss_legendre

DET_TOL = 1e-12


def _transform(s, values, J):
    """Apply the s-form pullback matrices to component values.

    ``values`` has shape (ncomp, ...) and ``J`` is a constant 4x4 matrix.
    """
    det = np.linalg.det(J)
    if abs(det) <= DET_TOL:
        raise ValueError(f"singular jacobian (det = {det:.3e})")
    if s == 0:
        return values
    if s == 1:
        return np.tensordot(J.T, values, axes=1)
    if s == 2:
        M = lmap(values)
        return lmap_inv(np.einsum("ki,kl...,lj->ij...", J, M, J))
    if s == 3:
        return det * np.tensordot(np.linalg.inv(J), values, axes=1)
    return det * values


def _transform_polys(s, comps, J):
    """Same as :func:`_transform` for lists of polynomial components."""
    n = len(comps)
    basis = np.eye(n)
    # columns of the linear map, applied to unit component vectors
    cols = np.stack([_transform(s, basis[:, c], J) for c in range(n)], axis=1)
    out = []
    for r in range(n):
        terms = [cols[r, c] * comps[c] for c in range(n) if cols[r, c] != 0.0]
        total = terms[0] if terms else 0.0 * comps[0]
        for t in terms[1:]:
            total = total + t
        out.append(total)
    return tuple(out)


def pull(s, F, phi):
    """Reference-element proxy of the physical field ``F`` under affine ``phi``."""
    if F.s != s:
        raise ValueError(f"form degree mismatch: s={s}, field has s={F.s}")
    A, b = phi.affine_parts()
    composed = [c.compose_affine(A, b) for c in F.comps]
    return FormField(s, _transform_polys(s, composed, A))


def push(s, F, phi):
    """Physical proxy of a reference field under affine ``phi`` (inverse of pull)."""
    return pull(s, F, phi.inverse())


def pull_values(s, F, phi, x):
    """Pointwise pullback for any (possibly non-affine) map.

    ``x`` is (n, 4); returns (ncomp, n).
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = phi(x)
    vals = F(y)
    J = phi.jacobian(x)
    return np.stack([_transform(s, vals[:, p], J[p]) for p in range(len(x))], axis=1)


def naturality_check(s, F, phi, rng=None, npts=20):
    """Relative max |op_s(pull F) - pull(op_s F)| at ``npts`` random reference points."""
    if not 0 <= s <= 3:
        raise ValueError("naturality is defined for s <= 3")
    rng = np.random.default_rng(0) if rng is None else rng
    x = rng.uniform(-1.0, 1.0, size=(npts, NDIM))
    lhs = d_proxy(pull(s, F, phi))(x)
    rhs = pull(s + 1, d_proxy(F), phi)(x)
    return _relative(lhs, rhs)


def functoriality_check(s, F, phi, psi, rng=None, npts=20):
    """Relative max |pull(F, phi o psi) - pull(pull(F, phi), psi)| at random points.

    The outer pullback on the right is evaluated pointwise.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    x = rng.uniform(-1.0, 1.0, size=(npts, NDIM))
    lhs = pull(s, F, phi.compose(psi))(x)
    rhs = pull_values(s, pull(s, F, phi), psi, x)
    return _relative(lhs, rhs)


def _relative(lhs, rhs):
    """Max-norm difference scaled by max(1, max |values|)."""
    scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    return float(np.max(np.abs(lhs - rhs))) / scale


def random_affine(rng, scale=0.3, det_sign=1):
    """A random affine map near a random similarity, with the requested det sign."""
    A = np.eye(NDIM) + scale * rng.uniform(-1.0, 1.0, size=(NDIM, NDIM))
    A *= rng.uniform(0.5, 2.0)
    if np.sign(np.linalg.det(A)) != det_sign:
        A[:, 0] = -A[:, 0]
    b = rng.uniform(-1.0, 1.0, size=NDIM)
    return TesseractMap.from_affine(A, b)


# -- DOF invariance -------------------------------------------------------

def _unit(v):
    return v / np.linalg.norm(v)


def _physical_block(block, s, ent, A, b, F, n):
    """Physical-entity moments for one DOF block and the factor that maps them
    to the reference DOF values (ref = factor * phys)."""
    rule = gauss_legendre(n)
    free = ent.free
    T = A[:, list(free)]
    J_f = float(np.sqrt(np.linalg.det(T.T @ T))) if free else 1.0
    frozen = dict(ent.frozen)
    grids = [np.asarray(rule.nodes) if a in free else np.array([float(frozen[a])]) for a in range(NDIM)]
    weights = [np.asarray(rule.weights) if a in free else np.array([1.0]) for a in range(NDIM)]
    mesh = np.meshgrid(*grids, indexing="ij")
    x = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    y = x @ A.T + b
    vals = F(y)  # (ncomp, npts)

    if s in (0, 4):
        integrand = vals[0]
        if s == 4:
            factor = np.sign(np.linalg.det(A))
        else:
            factor = 1.0 / J_f
    elif s == 1:
        (c, coef), = block.terms
        t = A[:, c]
        integrand = coef * (_unit(t) @ vals)
        factor = np.linalg.norm(t) / J_f
    elif s == 2 and block.kind == "face":
        e1 = _unit(T[:, 0])
        e2 = _unit(T[:, 1] - (T[:, 1] @ e1) * e1)
        integrand = np.einsum("i,ij...,j->...", e1, lmap(vals), e2)
        factor = 1.0
    elif s == 2:
        (pair, coef), = block.terms
        p, q = SKEW_PAIRS[pair]
        tp, tq = A[:, p], A[:, q]
        integrand = coef * np.einsum("i,ij...,j->...", _unit(tp), lmap(vals), _unit(tq))
        factor = np.linalg.norm(tp) * np.linalg.norm(tq) / J_f
    else:
        (i, _), = block.terms
        cof = np.linalg.det(A) * np.linalg.inv(A).T
        nvec = cof[:, i]
        integrand = _unit(nvec) @ vals
        factor = 1.0

    integrand = integrand.reshape([len(g) for g in grids])
    W = integrand * J_f
    for a in range(NDIM):
        d = block.degrees[a]
        if d is None:
            mat = np.ones((1, 1))
        else:
            mat = np.polynomial.legendre.legvander(grids[a], d).T * weights[a]
        W = np.moveaxis(np.tensordot(W, mat, axes=([a], [1])), -1, a)
    return factor * W.reshape(-1)


def dof_invariance_check(k, s, phi, F):
    """Compare reference DOFs of pull(F) with physical-entity moments of F.

    Trace DOFs (and the volume DOFs for s=4) are checked. Physical moments use
    physical points, unit tangents/normals and the entity measure; the
    expected scaling between the two sides is the change-of-variables factor.
    Maps with det < 0 are flagged rather than judged.
    """
    A, b = phi.affine_parts()
    det = float(np.linalg.det(A))
    ds = build_dofset(k, s)
    ref_field = pull(s, F, phi)
    deg = max(max(F.coeff_shape()), max(ref_field.coeff_shape())) - 1
    n = max(k + 1, (deg + k) // 2 + 1)
    ref = ds.evaluate(ref_field, n=n)[0]
    topo = reference_topology()
    worst, scale, col, checked = 0.0, 0.0, 0, 0
    for block in ds.blocks:
        size = block.size
        if block.kind != "volume" or s == 4:
            ent = topo.entity(block.kind, block.entity)
            phys = _physical_block(block, s, ent, A, b, F, n)
            worst = max(worst, float(np.max(np.abs(phys - ref[col:col + size]))))
            scale = max(scale, float(np.max(np.abs(ref[col:col + size]))))
            checked += size
        col += size
    return {
        "k": k,
        "s": s,
        "det": det,
        "flagged": det < 0,
        "checked": checked,
        "max_discrepancy": worst,
        "scale": scale,
    }
