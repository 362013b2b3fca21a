"""Vectors in F_q^d, the quadratic norm, spheres, and dense point sets.

A vector (x_1, ..., x_d) is stored as the mixed-radix index
``x_1 + x_2 q + ... + x_d q^(d-1)``.  Point sets are boolean masks over all
q^d indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError
from .field_core import FieldContext, make_field


class Space:
    """Index bookkeeping for F_q^d: coordinates, norms, vector arithmetic."""

    def __init__(self, ctx: FieldContext, d: int):
        if d < 1:
            raise ShapeError("dimension must be positive")
        self.ctx = ctx
        self.d = d
        self.q = ctx.q
        self.size = ctx.q**d
        self.radix = ctx.q ** np.arange(d, dtype=np.int64)
        idx = np.arange(self.size, dtype=np.int64)
        self.coords = (idx[:, None] // self.radix[None, :]) % ctx.q
        self.coords.setflags(write=False)
        sq = ctx.mul_table[self.coords, self.coords]
        norms = np.zeros(self.size, dtype=np.int64)
        for k in range(d):
            norms = ctx.add_table[norms, sq[:, k]]
        self.norms = norms
        self.norms.setflags(write=False)
        self._neg = self.encode(ctx.neg_table[self.coords])
        self._neg.setflags(write=False)

    def __repr__(self) -> str:
        return f"Space(q={self.q}, d={self.d})"

    # -- encoding ---------------------------------------------------------------
    def encode(self, vecs) -> np.ndarray:
        vecs = np.asarray(vecs, dtype=np.int64)
        if vecs.shape[-1] != self.d:
            raise ShapeError(f"expected vectors of length {self.d}, got {vecs.shape}")
        return vecs @ self.radix

    def decode(self, idx) -> np.ndarray:
        return self.coords[idx]

    # -- arithmetic on indices ----------------------------------------------------
    def add(self, i, j):
        return self.encode(self.ctx.add_table[self.coords[i], self.coords[j]])

    def sub(self, i, j):
        return self.add(i, self._neg[j])

    def neg(self, i):
        return self._neg[i]

    def scale(self, s: int, i):
        return self.encode(self.ctx.mul_table[s, self.coords[i]])

    def dot(self, i, j):
        ctx = self.ctx
        prod = ctx.mul_table[self.coords[i], self.coords[j]]
        out = np.zeros(prod.shape[:-1], dtype=np.int64)
        for k in range(self.d):
            out = ctx.add_table[out, prod[..., k]]
        return out

    def norm(self, i):
        return self.norms[i]

    def matrix_action(self, g) -> np.ndarray:
        """perm[i] = index of g @ x_i, for a d x d matrix g over F_q."""
        g = np.asarray(g, dtype=np.int64)
        if g.shape != (self.d, self.d):
            raise ShapeError(f"matrix shape {g.shape} does not match d={self.d}")
        ctx = self.ctx
        out = np.zeros((self.size, self.d), dtype=np.int64)
        for r in range(self.d):
            acc = np.zeros(self.size, dtype=np.int64)
            for c in range(self.d):
                acc = ctx.add_table[acc, ctx.mul_table[g[r, c], self.coords[:, c]]]
            out[:, r] = acc
        return self.encode(out)

    def translation(self, z: int) -> np.ndarray:
        """perm[i] = index of x_i + z."""
        return self.add(np.arange(self.size), np.full(self.size, z))

    def as_group_shape(self) -> tuple:
        """Shape under which an indicator becomes an array over (Z/p)^(d*ell).

        Digits run least significant first, so reshape with ``order='F'``.
        """
        return (self.ctx.p,) * (self.d * self.ctx.ell)


@lru_cache(maxsize=None)
def _space(p: int, ell: int, d: int) -> Space:
    return Space(make_field(p, ell), d)


def space(ctx: FieldContext, d: int) -> Space:
    return _space(ctx.p, ctx.ell, d)


def norm(ctx: FieldContext, v: Sequence[int]) -> int:
    """x_1^2 + ... + x_d^2 for a single coordinate vector."""
    acc = 0
    for x in v:
        acc = int(ctx.add_table[acc, ctx.mul_table[x, x]])
    return acc


@dataclass(frozen=True, eq=False)
class PointSet:
    """A subset of F_q^d held as a boolean mask over all q^d indices."""

    space: Space
    bits: np.ndarray

    def __post_init__(self):
        if self.bits.shape != (self.space.size,) or self.bits.dtype != bool:
            raise ShapeError("mask must be a boolean array of length q^d")
        self.bits.setflags(write=False)

    # -- constructors ---------------------------------------------------------------
    @classmethod
    def empty(cls, sp: Space) -> "PointSet":
        return cls(sp, np.zeros(sp.size, dtype=bool))

    @classmethod
    def full(cls, sp: Space) -> "PointSet":
        return cls(sp, np.ones(sp.size, dtype=bool))

    @classmethod
    def from_indices(cls, sp: Space, indices: Iterable[int]) -> "PointSet":
        bits = np.zeros(sp.size, dtype=bool)
        idx = np.fromiter(indices, dtype=np.int64) if not isinstance(indices, np.ndarray) else indices
        if idx.size and (idx.min() < 0 or idx.max() >= sp.size):
            raise ShapeError("index out of range")
        bits[idx] = True
        return cls(sp, bits)

    @classmethod
    def from_vectors(cls, sp: Space, vectors) -> "PointSet":
        vectors = np.asarray(vectors, dtype=np.int64).reshape(-1, sp.d)
        if vectors.size and (vectors.min() < 0 or vectors.max() >= sp.q):
            raise ShapeError("coordinate out of range")
        return cls.from_indices(sp, sp.encode(vectors))

    @classmethod
    def random(cls, sp: Space, density: float, rng: np.random.Generator) -> "PointSet":
        return cls(sp, rng.random(sp.size) < density)

    # -- basic queries ------------------------------------------------------------------
    @property
    def d(self) -> int:
        return self.space.d

    @property
    def ctx(self) -> FieldContext:
        return self.space.ctx

    @property
    def card(self) -> int:
        return int(np.count_nonzero(self.bits))

    def __len__(self) -> int:
        return self.card

    def __contains__(self, v) -> bool:
        if isinstance(v, (int, np.integer)):
            return bool(self.bits[v])
        return bool(self.bits[int(self.space.encode(v))])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.space is other.space and bool(np.array_equal(self.bits, other.bits))

    __hash__ = None

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def vectors(self) -> np.ndarray:
        return self.space.coords[self.indices()]

    def indicator(self) -> np.ndarray:
        return self.bits.astype(np.float64)

    # -- set algebra --------------------------------------------------------------------
    def _check(self, other: "PointSet") -> None:
        if self.space is not other.space:
            raise ShapeError("point sets live in different spaces")

    def union(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.space, self.bits | other.bits)

    def intersect(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.space, self.bits & other.bits)

    def difference(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.space, self.bits & ~other.bits)

    def issubset(self, other: "PointSet") -> bool:
        self._check(other)
        return not bool(np.any(self.bits & ~other.bits))

    __or__ = union
    __and__ = intersect
    __sub__ = difference

    # -- geometric transforms -------------------------------------------------------------
    def _remap(self, perm: np.ndarray) -> "PointSet":
        bits = np.zeros(self.space.size, dtype=bool)
        bits[perm[self.bits]] = True
        return PointSet(self.space, bits)

    def translate(self, z) -> "PointSet":
        if not isinstance(z, (int, np.integer)):
            z = int(self.space.encode(z))
        return self._remap(self.space.translation(z))

    def negate(self) -> "PointSet":
        return self._remap(self.space._neg)

    def apply(self, g) -> "PointSet":
        return self._remap(self.space.matrix_action(g))

    # -- text format ----------------------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"q={self.space.q} d={self.d}"]
        lines += [",".join(str(int(c)) for c in v) for v in self.vectors()]
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())


def apply_matrix(g, S: PointSet) -> PointSet:
    return S.apply(g)


def translate(S: PointSet, z) -> PointSet:
    return S.translate(z)


def negate(S: PointSet) -> PointSet:
    return S.negate()


def sphere(sp: Space, j: int) -> PointSet:
    """S_j = {x : x_1^2 + ... + x_d^2 = j}."""
    return PointSet(sp, sp.norms == j)


def parse_point_set(text: str, ctx: FieldContext | None = None) -> PointSet:
    """Parse the ``q=<q> d=<d>`` text format.

    When ``ctx`` is omitted, q must be prime or the square of a prime.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ShapeError("empty point-set file")
    header = dict(tok.split("=", 1) for tok in lines[0].split())
    try:
        q, d = int(header["q"]), int(header["d"])
    except (KeyError, ValueError) as exc:
        raise ShapeError(f"bad header {lines[0]!r}") from exc
    if ctx is None:
        ctx = field_for_order(q)
    elif ctx.q != q:
        raise ShapeError(f"file is over F_{q}, context is F_{ctx.q}")
    sp = space(ctx, d)
    vecs = []
    for ln in lines[1:]:
        parts = [int(t) for t in ln.split(",")]
        if len(parts) != d:
            raise ShapeError(f"vector {ln!r} does not have {d} coordinates")
        if any(c < 0 or c >= q for c in parts):
            raise ShapeError(f"coordinate out of range in {ln!r}")
        vecs.append(parts)
    return PointSet.from_vectors(sp, np.array(vecs, dtype=np.int64).reshape(-1, d))


def load_point_set(path, ctx: FieldContext | None = None) -> PointSet:
    return parse_point_set(Path(path).read_text(), ctx)


def field_for_order(q: int) -> FieldContext:
    from .field_core import is_prime

    if is_prime(q):
        return make_field(q, 1)
    r = int(round(q**0.5))
    if r * r == q and is_prime(r):
        return make_field(r, 2)
    raise ShapeError(f"q={q} is neither an odd prime nor the square of one")


class PairSet(PointSet):
    """A subset P of F_q^d x F_q^d.

    Lives in the 2d-dimensional space; the pair (x, y) has index
    ``ix + q^d * iy`` so the x-coordinates are the low-order digits.
    """

    @property
    def base(self) -> Space:
        return space(self.ctx, self.space.d // 2)

    @classmethod
    def from_pairs(cls, base: Space, xs, ys) -> "PairSet":
        big = space(base.ctx, 2 * base.d)
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        bits = np.zeros(big.size, dtype=bool)
        bits[xs + base.size * ys] = True
        return cls(big, bits)

    @classmethod
    def product(cls, A: PointSet, B: PointSet) -> "PairSet":
        A._check(B)
        base = A.space
        bits = np.outer(B.bits, A.bits).reshape(-1)  # row iy, column ix
        return cls(space(base.ctx, 2 * base.d), bits)

    @classmethod
    def random_pairs(cls, base: Space, density: float, rng: np.random.Generator) -> "PairSet":
        big = space(base.ctx, 2 * base.d)
        return cls(big, rng.random(big.size) < density)

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        idx = self.indices()
        n = self.base.size
        return idx % n, idx // n
