"""Reference tesseract topology, element maps, entity charts and quadrature.

Entities are described by the axes they freeze (each at -1 or +1) and the
axes left free. Free axes are always listed in increasing order, and the
orientation of an entity is the one induced by +e_a for each free axis a.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .tensorpoly import NDIM, TensorPoly4, gauss_legendre, sum_polys

# v1..v16: x1, x2 run around the square, x3 then x4 switch on.
_SQUARE = ((-1, -1), (1, -1), (1, 1), (-1, 1))
VERTICES = np.array(
    [(a, b, c, d) for d in (-1, 1) for c in (-1, 1) for (a, b) in _SQUARE], dtype=float
)
VERTICES.setflags(write=False)

KINDS = ("vertex", "edge", "face", "facet", "volume")
KIND_DIM = {"vertex": 0, "edge": 1, "face": 2, "facet": 3, "volume": 4}


@dataclass(frozen=True)
class Entity:
    kind: str
    index: int
    free: tuple
    frozen: tuple  # ((axis, sign), ...) sorted by axis

    @property
    def dim(self):
        return len(self.free)

    @property
    def frozen_axes(self):
        return tuple(a for a, _ in self.frozen)

    def vertex_ids(self):
        ids = []
        for n, v in enumerate(VERTICES):
            if all(v[a] == s for a, s in self.frozen):
                ids.append(n)
        return tuple(ids)

    def contains(self, other):
        """True if ``other`` is a sub-entity (closure) of this entity."""
        mine = dict(self.frozen)
        theirs = dict(other.frozen)
        return all(theirs.get(a) == s for a, s in mine.items())


def _entities(kind):
    d = KIND_DIM[kind]
    out = []
    if kind == "vertex":
        for n, v in enumerate(VERTICES):
            out.append(Entity(kind, n, (), tuple((a, int(v[a])) for a in range(NDIM))))
        return out
    for free in combinations(range(NDIM), d):
        fixed = [a for a in range(NDIM) if a not in free]
        for signs in product((-1, 1), repeat=len(fixed)):
            out.append(Entity(kind, len(out), free, tuple(zip(fixed, signs))))
    return out


@dataclass(frozen=True)
class TesseractTopology:
    vertices: np.ndarray
    entities: dict

    def __getitem__(self, kind):
        return self.entities[kind]

    def count(self, kind):
        return len(self.entities[kind])

    @property
    def edges(self):
        return self.entities["edge"]

    @property
    def faces(self):
        return self.entities["face"]

    @property
    def facets(self):
        return self.entities["facet"]

    def entity(self, kind, index):
        ents = self.entities.get(kind)
        if ents is None:
            raise ValueError(f"unknown entity kind {kind!r}")
        if not 0 <= index < len(ents):
            raise ValueError(f"{kind} index {index} out of range 0..{len(ents) - 1}")
        return ents[index]


@lru_cache(maxsize=None)
def reference_topology():
    ents = {kind: tuple(_entities(kind)) for kind in KINDS}
    return TesseractTopology(VERTICES, ents)


def facet_index(axis, sign):
    """Index of the facet {x_axis = sign}."""
    for f in reference_topology().facets:
        if f.frozen == ((axis, sign),):
            return f.index
    raise ValueError(f"no facet x{axis} = {sign}")


# -- shape functions and element maps ----------------------------------

def shape_functions(x):
    """The 16 multilinear nodal functions at one point or an (n, 4) array."""
    x = np.asarray(x, dtype=float)
    return np.prod(1.0 + x[..., None, :] * VERTICES, axis=-1) / 16.0


@lru_cache(maxsize=None)
def _shape_polys():
    polys = []
    for v in VERTICES:
        factors = [np.array([1.0, v[a]]) / 2.0 for a in range(NDIM)]
        polys.append(TensorPoly4.from_factors(factors))
    return tuple(polys)


class TesseractMap:
    """Multilinear map sum_i v'_i N_i from the reference tesseract."""

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float)
        if v.shape != (16, NDIM):
            raise ValueError("a tesseract map needs 16 vertices in R^4")
        v.setflags(write=False)
        self.vertices = v
        N = _shape_polys()
        self.components = tuple(
            sum_polys(float(v[i, c]) * N[i] for i in range(16)).trim(1e-15) for c in range(NDIM)
        )
        self._grads = tuple(tuple(p.diff(a) for a in range(NDIM)) for p in self.components)

    @classmethod
    def from_affine(cls, A, b):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        return cls(VERTICES @ A.T + b)

    @classmethod
    def identity(cls):
        return cls(VERTICES)

    def __call__(self, x):
        return map_eval(self, x)

    def jacobian(self, x):
        return jacobian(self, x)

    def is_affine(self, tol=1e-12):
        """True if every monomial of total degree > 1 vanishes."""
        scale = max(1.0, float(np.max(np.abs(self.vertices))))
        for p in self.components:
            total = sum(np.indices(p.shape))
            if np.any(np.abs(p.coeffs[total > 1]) > tol * scale):
                return False
        return True

    def affine_parts(self):
        """(A, b) with phi(x) = A x + b; raises if the map is not affine."""
        if not self.is_affine():
            raise ValueError("map is not affine")
        b = self(np.zeros(NDIM))
        A = self.jacobian(np.zeros(NDIM))
        return A, b

    def compose(self, inner):
        """self o inner, for affine maps."""
        A1, b1 = self.affine_parts()
        A2, b2 = inner.affine_parts()
        return TesseractMap.from_affine(A1 @ A2, A1 @ b2 + b1)

    def inverse(self):
        A, b = self.affine_parts()
        Ai = np.linalg.inv(A)
        return TesseractMap.from_affine(Ai, -Ai @ b)


def map_eval(phi, x):
    x = np.asarray(x, dtype=float)
    return shape_functions(x) @ phi.vertices


def jacobian(phi, x):
    """D phi at one point (4x4) or at many points (n, 4, 4)."""
    x = np.asarray(x, dtype=float)
    return np.stack(
        [np.stack([g(x) for g in row], axis=-1) for row in phi._grads], axis=-2
    )


# -- entity charts -----------------------------------------------------

@dataclass(frozen=True)
class EntityChart:
    """Embedding of the d-cube onto a reference entity.

    Reference coordinates t_1..t_d map to the free axes in increasing order;
    frozen axes sit at their signs.
    """

    entity: Entity

    @property
    def dim(self):
        return self.entity.dim

    def embed(self, t):
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape[:-1] + (NDIM,))
        for r, a in enumerate(self.entity.free):
            out[..., a] = t[..., r]
        for a, s in self.entity.frozen:
            out[..., a] = s
        return out

    def frame(self):
        """4 x d matrix of unit tangents (+e_a for each free axis a)."""
        F = np.zeros((NDIM, self.dim))
        for r, a in enumerate(self.entity.free):
            F[a, r] = 1.0
        return F

    def normal(self):
        """Outward unit normal of a facet."""
        if self.entity.kind != "facet":
            raise ValueError("only facets carry a normal")
        (a, s), = self.entity.frozen
        n = np.zeros(NDIM)
        n[a] = s
        return n


def chart(kind, index):
    return EntityChart(reference_topology().entity(kind, index))


def facet_normal(facet):
    return chart("facet", facet).normal()


def edge_tangent(edge):
    return chart("edge", edge).frame()[:, 0]


@dataclass(frozen=True)
class QuadEntityRule:
    """Tensor Gauss rule on an entity, stored as a 4-axis grid.

    Frozen axes carry a single node at the frozen value with weight 1.
    """

    chart: EntityChart
    grids: tuple
    weights: tuple

    def points(self):
        mesh = np.meshgrid(*self.grids, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)

    def weight_tensor(self):
        w = self.weights[0]
        for a in range(1, NDIM):
            w = np.multiply.outer(w, self.weights[a])
        return w

    def flat_weights(self):
        return self.weight_tensor().reshape(-1)

    def integrate(self, values):
        """Integrate values given on ``points()`` (last axis = points)."""
        return np.asarray(values) @ self.flat_weights()


def entity_quadrature(ch, k, n=None):
    """Gauss rule on an entity exact to per-free-axis degree 2k+1 (or 2n-1)."""
    if n is None:
        if k < 1:
            raise ValueError("k must be >= 1")
        n = k + 1
    rule = gauss_legendre(n)
    grids, weights = [], []
    frozen = dict(ch.entity.frozen)
    for a in range(NDIM):
        if a in frozen:
            grids.append(np.array([float(frozen[a])]))
            weights.append(np.array([1.0]))
        else:
            grids.append(np.asarray(rule.nodes))
            weights.append(np.asarray(rule.weights))
    return QuadEntityRule(ch, tuple(grids), tuple(weights))
