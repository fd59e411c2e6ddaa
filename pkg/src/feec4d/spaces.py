"""Tensor polynomial form spaces V^{k,s} on the reference tesseract and their bubbles.

Each space is a list of *slots*: a proxy component together with the maximal
Legendre degree per axis and the axes that carry a (1 - x^2) bubble factor.
Basis members are tensor Legendre products inside each slot.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from .exterior import N_COMPONENTS, SKEW_PAIRS, FormField
from .tensorpoly import NDIM, TensorPoly4, legendre_coefficients

_BUBBLE_FACTOR = np.array([1.0, 0.0, -1.0])


@dataclass(frozen=True)
class SpaceSpec:
    k: int
    s: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"order k must be >= 1, got {self.k}")
        if not 0 <= self.s <= 4:
            raise ValueError(f"form degree s must be in 0..4, got {self.s}")


@dataclass(frozen=True)
class Slot:
    """One component block: Legendre degree bound per axis plus bubble axes.

    ``order`` is the axis order used to enumerate the multi-indices.
    """

    comp: int
    degrees: tuple
    bubble_axes: tuple = ()
    order: tuple = (0, 1, 2, 3)

    @property
    def size(self):
        return int(np.prod([max(d + 1, 0) for d in self.degrees]))

    def multi_indices(self):
        if self.size == 0:
            return []
        ranges = [range(self.degrees[a] + 1) for a in self.order]
        out = []
        for idx in product(*ranges):
            full = [0] * NDIM
            for a, i in zip(self.order, idx):
                full[a] = i
            out.append(tuple(full))
        return out

    def poly(self, index):
        factors = []
        for a in range(NDIM):
            f = legendre_coefficients(index[a])[index[a]]
            if a in self.bubble_axes:
                f = np.convolve(f, _BUBBLE_FACTOR)
            factors.append(f)
        return TensorPoly4.from_factors(factors)


@dataclass(frozen=True)
class BasisSet:
    k: int
    s: int
    slots: tuple
    members: tuple
    labels: tuple  # (slot number, multi-index)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def max_shape(self):
        shape = [1] * NDIM
        for m in self.members:
            shape = [max(a, b) for a, b in zip(shape, m.coeff_shape())]
        return tuple(shape)

    def coeff_tensor(self, shape=None):
        """Stacked coefficients, shape (N, ncomp, *shape)."""
        shape = self.max_shape() if shape is None else tuple(shape)
        if shape not in self._cache:
            arr = np.zeros((len(self.members), N_COMPONENTS[self.s]) + shape)
            for n, m in enumerate(self.members):
                arr[n] = m.coeff_array(shape)
            arr.setflags(write=False)
            self._cache[shape] = arr
        return self._cache[shape]

    def combine(self, coeffs):
        """The field sum_n c_n b_n."""
        coeffs = np.asarray(coeffs, dtype=float)
        arr = np.tensordot(coeffs, self.coeff_tensor(), axes=(0, 0))
        return FormField(self.s, tuple(TensorPoly4(c) for c in arr))


def space_slots(k, s):
    SpaceSpec(k, s)
    if s == 0:
        return (Slot(0, (k,) * NDIM),)
    if s == 1:
        return tuple(
            Slot(i, tuple(k - 1 if a == i else k for a in range(NDIM))) for i in range(NDIM)
        )
    if s == 2:
        return tuple(
            Slot(n, tuple(k - 1 if a in pair else k for a in range(NDIM)))
            for n, pair in enumerate(SKEW_PAIRS)
        )
    if s == 3:
        return tuple(
            Slot(i, tuple(k if a == i else k - 1 for a in range(NDIM))) for i in range(NDIM)
        )
    return (Slot(0, (k - 1,) * NDIM),)


def _leading(first):
    """Axis order with ``first`` axes leading, the others increasing."""
    first = tuple(first)
    return first + tuple(a for a in range(NDIM) if a not in first)


def bubble_slots(k, s):
    SpaceSpec(k, s)
    if s == 4:
        return space_slots(k, s)
    everything = tuple(range(NDIM))
    if s == 0:
        return (Slot(0, (k - 2,) * NDIM, everything),)
    if s == 1:
        return tuple(
            Slot(
                i,
                tuple(k - 1 if a == i else k - 2 for a in range(NDIM)),
                tuple(a for a in everything if a != i),
                _leading((i,)),
            )
            for i in range(NDIM)
        )
    if s == 2:
        return tuple(
            Slot(
                n,
                tuple(k - 1 if a in pair else k - 2 for a in range(NDIM)),
                tuple(a for a in everything if a not in pair),
                _leading(pair),
            )
            for n, pair in enumerate(SKEW_PAIRS)
        )
    return tuple(
        Slot(i, tuple(k - 2 if a == i else k - 1 for a in range(NDIM)), (i,), _leading((i,)))
        for i in range(NDIM)
    )


def _build(k, s, slots):
    members, labels = [], []
    zero = TensorPoly4.zero()
    for n, slot in enumerate(slots):
        for idx in slot.multi_indices():
            comps = [zero] * N_COMPONENTS[s]
            comps[slot.comp] = slot.poly(idx)
            members.append(FormField(s, tuple(comps)))
            labels.append((n, idx))
    return BasisSet(k, s, tuple(slots), tuple(members), tuple(labels))


@lru_cache(maxsize=None)
def space_basis(k, s):
    """Tensor Legendre basis of V^{k,s}."""
    return _build(k, s, space_slots(k, s))


@lru_cache(maxsize=None)
def bubble_basis(k, s):
    """Basis of the zero-trace subspace of V^{k,s}; for s = 4 the whole space."""
    return _build(k, s, bubble_slots(k, s))


def space_dim(k, s):
    SpaceSpec(k, s)
    return (
        (k + 1) ** 4,
        4 * k * (k + 1) ** 3,
        6 * k**2 * (k + 1) ** 2,
        4 * k**3 * (k + 1),
        k**4,
    )[s]


def trace_dof_dim(k, s):
    SpaceSpec(k, s)
    return (8 * k * (k**2 + 1), 8 * k * (3 * k**2 + 1), 24 * k**3, 8 * k**3, 0)[s]


def vol_dof_dim(k, s):
    SpaceSpec(k, s)
    return (
        (k - 1) ** 4,
        4 * k * (k - 1) ** 3,
        6 * k**2 * (k - 1) ** 2,
        4 * k**3 * (k - 1),
        k**4,
    )[s]


def span_residual(basis, fields):
    """Largest relative least-squares residual of ``fields`` against span(basis).

    Each residual is a coefficient max-norm divided by the field's largest coefficient.
    """
    fields = list(fields)
    shape = tuple(
        max([basis.max_shape()[a]] + [f.coeff_shape()[a] for f in fields]) for a in range(NDIM)
    )
    rhs = np.stack([f.coeff_array(shape).reshape(-1) for f in fields], axis=1)
    scale = np.abs(rhs).max(axis=0)
    if len(basis) == 0:
        res = scale
    else:
        B = basis.coeff_tensor(shape).reshape(len(basis), -1).T
        c, *_ = np.linalg.lstsq(B, rhs, rcond=None)
        res = np.abs(B @ c - rhs).max(axis=0)
    rel = np.where(scale > 0, res / np.where(scale > 0, scale, 1.0), 0.0)
    return float(rel.max()) if rel.size else 0.0
