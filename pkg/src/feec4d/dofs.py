"""Degrees of freedom on the reference tesseract, Gram matrices and unisolvence.

Every DOF is a moment of a linear combination of proxy components against a
tensor Legendre test polynomial in the entity's free coordinates. DOFs that
share an entity and a component combination form a :class:`DofBlock`, which
is evaluated for many fields at once on a tensor Gauss grid.

Orientation: entity tangents are +e_a for each free axis a and facet DOFs use
the canonical normal +e_i of the frozen axis, so shared DOFs agree between
neighbouring elements regardless of which side they sit on.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.linalg import lu_factor, lu_solve

from .exterior import LEVI_CIVITA, PAIR_INDEX, SKEW_PAIRS, FormField
from .geometry import KINDS, reference_topology
from .spaces import space_basis, space_dim, trace_dof_dim, vol_dof_dim
from .tensorpoly import NDIM, gauss_legendre, tabulate_grid

PIVOT_THRESHOLD = 1e-8
ADMISSIBLE = {
    0: ("vertex", "edge", "face", "facet", "volume"),
    1: ("edge", "face", "facet", "volume"),
    2: ("face", "facet", "volume"),
    3: ("facet", "volume"),
    4: ("volume",),
}


@dataclass(frozen=True)
class DofBlock:
    """Moments of sum(coef * F[comp]) on one entity against a tensor test space.

    ``degrees[a]`` is the Legendre degree bound on free axis a (None on frozen
    axes). The block holds prod(degrees + 1) functionals, ordered
    lexicographically over the free axes.
    """

    kind: str
    entity: int
    slot: int
    terms: tuple
    degrees: tuple

    @property
    def size(self):
        return int(np.prod([d + 1 for d in self.degrees if d is not None]))

    def test_indices(self):
        ranges = [np.arange(d + 1) for d in self.degrees if d is not None]
        if not ranges:
            return [()]
        mesh = np.meshgrid(*ranges, indexing="ij")
        return [tuple(int(m) for m in idx) for idx in zip(*(m.reshape(-1) for m in mesh))]


@dataclass(frozen=True)
class DofFunctional:
    kind: str
    entity: int
    k: int
    s: int
    slot: int
    test: tuple  # Legendre multi-index over the entity's free axes
    block: int  # position of the owning block inside its DofSet
    offset: int  # position inside the owning block

    @property
    def is_trace(self):
        return self.kind != "volume"


def _free_degrees(entity, rule):
    """Per-axis test degrees: ``rule(axis)`` on free axes, None on frozen ones."""
    return tuple(rule(a) if a in entity.free else None for a in range(NDIM))


def _blocks_for(k, s, kind, entity):
    free = entity.free
    if kind == "vertex":
        return [(((0, 1.0),), (None,) * NDIM)]
    if s == 0:
        return [(((0, 1.0),), _free_degrees(entity, lambda a: k - 2))]
    if s == 1:
        if kind == "edge":
            (a,) = free
            return [(((a, 1.0),), _free_degrees(entity, lambda _: k - 1))]
        if kind == "face":
            a, b = free
            return [
                (((b, 1.0),), _free_degrees(entity, lambda x: k - 2 if x == a else k - 1)),
                (((a, -1.0),), _free_degrees(entity, lambda x: k - 1 if x == a else k - 2)),
            ]
        return [
            (((c, 1.0),), _free_degrees(entity, lambda x, c=c: k - 1 if x == c else k - 2))
            for c in free
        ]
    if s == 2:
        if kind == "face":
            return [(((PAIR_INDEX[free], 1.0),), _free_degrees(entity, lambda _: k - 1))]
        if kind == "facet":
            (i, _), = entity.frozen
            out = []
            for a in free:
                terms = tuple(
                    (PAIR_INDEX[(p, q)], 2.0 * LEVI_CIVITA[a, i, p, q])
                    for p, q in SKEW_PAIRS
                    if LEVI_CIVITA[a, i, p, q] != 0
                )
                out.append((terms, _free_degrees(entity, lambda x, a=a: k - 2 if x == a else k - 1)))
            return out
        return [
            (((n, 2.0),), _free_degrees(entity, lambda x, p=p: k - 1 if x in p else k - 2))
            for n, p in enumerate(SKEW_PAIRS)
        ]
    if s == 3:
        if kind == "facet":
            (i, _), = entity.frozen
            return [(((i, 1.0),), _free_degrees(entity, lambda _: k - 1))]
        return [
            (((c, 1.0),), _free_degrees(entity, lambda x, c=c: k - 2 if x == c else k - 1))
            for c in range(NDIM)
        ]
    return [(((0, 1.0),), _free_degrees(entity, lambda _: k - 1))]


class DofSet:
    """Ordered DOF functionals of V^{k,s}: vertices, edges, faces, facets, volume."""

    def __init__(self, k, s):
        if k < 1 or not 0 <= s <= 4:
            raise ValueError(f"invalid (k, s) = ({k}, {s})")
        self.k, self.s = k, s
        topo = reference_topology()
        blocks, functionals = [], []
        for kind in KINDS:
            if kind not in ADMISSIBLE[s]:
                continue
            for ent in topo[kind]:
                for slot, (terms, degrees) in enumerate(_blocks_for(k, s, kind, ent)):
                    if any(d is not None and d < 0 for d in degrees):
                        continue
                    block = DofBlock(kind, ent.index, slot, terms, degrees)
                    for pos, test in enumerate(block.test_indices()):
                        functionals.append(
                            DofFunctional(kind, ent.index, k, s, slot, test, len(blocks), pos)
                        )
                    blocks.append(block)
        self.blocks = tuple(blocks)
        self.functionals = tuple(functionals)
        self._rules = {}

    def __len__(self):
        return len(self.functionals)

    def __iter__(self):
        return iter(self.functionals)

    def __getitem__(self, i):
        return self.functionals[i]

    def counts(self):
        out = {}
        for f in self.functionals:
            out[f.kind] = out.get(f.kind, 0) + 1
        return out

    def trace_count(self):
        return sum(1 for f in self.functionals if f.is_trace)

    def indices(self, kind=None, entity=None):
        return [
            n
            for n, f in enumerate(self.functionals)
            if (kind is None or f.kind == kind) and (entity is None or f.entity == entity)
        ]

    def _entity_rule(self, kind, index, n):
        key = (kind, index, n)
        if key not in self._rules:
            ent = reference_topology().entity(kind, index)
            frozen = dict(ent.frozen)
            rule = gauss_legendre(n)
            grids = tuple(
                np.array([float(frozen[a])]) if a in frozen else np.asarray(rule.nodes)
                for a in range(NDIM)
            )
            self._rules[key] = grids
        return self._rules[key]

    def evaluate(self, coeffs, n=None):
        """DOF values of stacked fields.

        ``coeffs`` is (N, ncomp, d1, d2, d3, d4) or a single FormField /
        list of FormFields. Returns an (N, len(self)) array.
        """
        return self._evaluate_blocks(_stack(coeffs, self.s), self.blocks, n)

    def evaluate_block(self, index, coeffs, n=None):
        return self._evaluate_blocks(_stack(coeffs, self.s), (self.blocks[index],), n)

    def _evaluate_blocks(self, coeffs, blocks, n):
        if n is None:
            n = max(self.k + 1, (max(coeffs.shape[2:]) - 1 + self.k) // 2 + 1)
        rule = gauss_legendre(n)
        out = np.empty((coeffs.shape[0], sum(b.size for b in blocks)))
        col = 0
        cache_key, values = None, None
        for block in blocks:
            key = (block.kind, block.entity)
            if key != cache_key:
                values = tabulate_grid(coeffs, self._entity_rule(block.kind, block.entity, n))
                cache_key = key
            W = sum(coef * values[:, comp] for comp, coef in block.terms)
            for a in range(NDIM):
                d = block.degrees[a]
                if d is None:
                    mat = np.ones((1, 1))
                else:
                    mat = npleg.legvander(rule.nodes, d).T * rule.weights
                W = np.moveaxis(np.tensordot(W, mat, axes=([1 + a], [1])), -1, 1 + a)
            out[:, col:col + block.size] = W.reshape(W.shape[0], -1)
            col += block.size
        return out


def _stack(fields, s):
    if isinstance(fields, np.ndarray):
        return fields
    if isinstance(fields, FormField):
        fields = [fields]
    fields = list(fields)
    for f in fields:
        if f.s != s:
            raise ValueError(f"form degree mismatch: DOFs for s={s}, field has s={f.s}")
    shape = tuple(max(f.coeff_shape()[a] for f in fields) for a in range(NDIM))
    return np.stack([f.coeff_array(shape) for f in fields])


@lru_cache(maxsize=None)
def build_dofset(k, s):
    return DofSet(k, s)


def dof_apply(ell, F):
    """Value of one functional on a field."""
    if ell.s != F.s:
        raise ValueError(f"form degree mismatch: functional s={ell.s}, field s={F.s}")
    ds = build_dofset(ell.k, ell.s)
    return float(ds.evaluate_block(ell.block, F)[0, ell.offset])


@lru_cache(maxsize=None)
def gram(k, s):
    """M[i, j] = ell_i(b_j) for the DofSet rows and the space basis columns."""
    basis = space_basis(k, s)
    M = build_dofset(k, s).evaluate(basis.coeff_tensor()).T
    M.setflags(write=False)
    return M


@lru_cache(maxsize=None)
def gram_lu(k, s):
    return lu_factor(gram(k, s), check_finite=False)


def solve_gram(k, s, rhs):
    return lu_solve(gram_lu(k, s), rhs, check_finite=False)


def pivot_ratio(k, s):
    U = np.abs(np.diag(gram_lu(k, s)[0]))
    return float(U.min() / U.max())


def expected_counts(k, s):
    """Per-kind DOF tallies from the closed-form entity products."""
    table = {
        0: {"vertex": 16, "edge": 32 * (k - 1), "face": 24 * (k - 1) ** 2,
            "facet": 8 * (k - 1) ** 3, "volume": (k - 1) ** 4},
        1: {"edge": 32 * k, "face": 48 * k * (k - 1), "facet": 24 * k * (k - 1) ** 2,
            "volume": 4 * k * (k - 1) ** 3},
        2: {"face": 24 * k**2, "facet": 24 * k**2 * (k - 1), "volume": 6 * k**2 * (k - 1) ** 2},
        3: {"facet": 8 * k**3, "volume": 4 * k**3 * (k - 1)},
        4: {"volume": k**4},
    }
    return {kind: n for kind, n in table[s].items() if n > 0}


def check_unisolvence(k, s, threshold=PIVOT_THRESHOLD):
    ds = build_dofset(k, s)
    counts = ds.counts()
    expected = expected_counts(k, s)
    size = len(ds)
    ratio = pivot_ratio(k, s) if size == space_dim(k, s) else 0.0
    counts_ok = (
        counts == expected
        and size == space_dim(k, s)
        and ds.trace_count() == trace_dof_dim(k, s)
        and size - ds.trace_count() == vol_dof_dim(k, s)
    )
    return {
        "k": k,
        "s": s,
        "size": size,
        "pivot_ratio": ratio,
        "counts": counts,
        "expected_counts": expected,
        "pass": bool(counts_ok and ratio > threshold),
    }
