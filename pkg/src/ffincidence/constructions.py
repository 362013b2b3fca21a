"""Builders for the explicit extremal examples: isotropic lattices, subspace
examples, small/large difference sets and the projection counterexample.

Builders only construct sets; every claimed property is checked separately
by the counting engines (see ``harness``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConstructionError
from .field_core import FieldContext
from .motions import transpose
from .projections import Subspace, enumerate_grassmannian, orthogonal_complement, subspace_from_vectors, rref
from .vector_geometry import PointSet, Space, space


@dataclass(frozen=True)
class Infeasible:
    """No family of the requested size exists; ``explored`` nodes were searched exhaustively."""

    ambient_dim: int
    count: int
    explored: int
    candidates: int = 0
    reason: str = "exhaustive search found no solution"

    def __bool__(self) -> bool:
        return False


def arithmetic_progression(ctx: FieldContext, length: int, start: int = 0, step: int = 1) -> np.ndarray:
    """{start + i * step : 0 <= i < length} as field elements."""
    if step == 0 and length > 1:
        raise ConstructionError("step must be nonzero")
    out = [start]
    for _ in range(length - 1):
        out.append(int(ctx.add_table[out[-1], step]))
    arr = np.array(out[:length], dtype=np.int64)
    if np.unique(arr).size != arr.size:
        raise ConstructionError(f"progression of length {length} wraps around in F_{ctx.q}")
    return arr


def _normalized_isotropic(sp: Space) -> np.ndarray:
    """Nonzero v with v.v = 0 and first nonzero coordinate 1, in index order."""
    idx = np.flatnonzero(sp.norms == 0)[1:]
    coords = sp.coords[idx]
    lead = coords[np.arange(len(idx)), np.argmax(coords != 0, axis=1)]
    return idx[lead == 1]


def mutually_isotropic_vectors(ctx: FieldContext, ambient_dim: int, count: int):
    """Independent v_1..v_count in F_q^ambient_dim with v_i . v_j = 0 for all i <= j.

    Returns an (count, ambient_dim) array, or an Infeasible value when the
    backtracking search is exhausted.
    """
    if count == 0:
        return np.zeros((0, ambient_dim), dtype=np.int64)
    if 2 * count > ambient_dim:
        return Infeasible(ambient_dim, count, 0, 0, "a totally isotropic subspace has dimension at most half the space")
    sp = space(ctx, ambient_dim)
    cands = _normalized_isotropic(sp)
    explored = 0

    def search(chosen: list[int], pool: np.ndarray):
        nonlocal explored
        if len(chosen) == count:
            return chosen
        for i, c in enumerate(pool):
            explored += 1
            rest = pool[i + 1 :]
            rest = rest[sp.dot(rest, np.full(rest.shape, c)) == 0]
            vecs = sp.coords[chosen + [int(c)]]
            if rref(ctx, vecs)[0].shape[0] < len(chosen) + 1:
                continue
            found = search(chosen + [int(c)], rest)
            if found:
                return found
        return None

    found = search([], cands)
    if found is None:
        return Infeasible(ambient_dim, count, explored, len(cands))
    return sp.coords[found].copy()


def _lift(vectors: np.ndarray, d: int) -> np.ndarray:
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.int64))
    if vectors.shape[1] == d - 1:
        vectors = np.hstack([vectors, np.zeros((len(vectors), 1), dtype=np.int64)])
    if vectors.shape[1] != d:
        raise ConstructionError(f"vectors must have {d - 1} or {d} coordinates")
    if np.any(vectors[:, d - 1] != 0):
        raise ConstructionError("vectors must have last coordinate 0")
    return vectors


def _check_isotropic_family(ctx: FieldContext, vectors: np.ndarray) -> None:
    sp = space(ctx, vectors.shape[1])
    idx = sp.encode(vectors)
    gram = sp.dot(idx[:, None], idx[None, :])
    if np.any(gram != 0):
        raise ConstructionError("vectors are not mutually isotropic")
    if rref(ctx, vectors)[0].shape[0] != len(vectors):
        raise ConstructionError("vectors are linearly dependent")


def _combinations(ctx: FieldContext, vectors: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """All sum_i c_i v_i with every c_i ranging over ``coeffs``; rows of coordinates."""
    d = vectors.shape[1]
    pts = np.zeros((1, d), dtype=np.int64)
    for v in vectors:
        step = ctx.mul_table[coeffs[:, None], v[None, :]]  # (|coeffs|, d)
        pts = ctx.add_table[pts[:, None, :], step[None, :, :]].reshape(-1, d)
    return pts


def _with_last(ctx: FieldContext, base_pts: np.ndarray, X: np.ndarray) -> np.ndarray:
    d = base_pts.shape[1]
    last = np.zeros((len(X), d), dtype=np.int64)
    last[:, d - 1] = X
    return ctx.add_table[base_pts[:, None, :], last[None, :, :]].reshape(-1, d)


def build_ap_lattice_sets(ctx: FieldContext, d: int, X, vectors) -> tuple[PointSet, PointSet]:
    """A = B = F_q v_1 + ... + F_q v_k + X e_d for mutually isotropic v_i."""
    vecs = _lift(vectors, d)
    _check_isotropic_family(ctx, vecs)
    X = np.asarray(X, dtype=np.int64)
    pts = _with_last(ctx, _combinations(ctx, vecs, np.arange(ctx.q)), X)
    A = PointSet.from_vectors(space(ctx, d), pts)
    return A, A


def build_small_large_sets(ctx: FieldContext, d: int, X, vectors) -> tuple[PointSet, PointSet]:
    """A = X v_1 + ... + X v_k and B = A + X e_d."""
    vecs = _lift(vectors, d)
    _check_isotropic_family(ctx, vecs)
    X = np.asarray(X, dtype=np.int64)
    base = _combinations(ctx, vecs, X)
    sp = space(ctx, d)
    return PointSet.from_vectors(sp, base), PointSet.from_vectors(sp, _with_last(ctx, base, X))


def build_rotated_slab(ctx: FieldContext, d: int, g0, X) -> tuple[PointSet, PointSet]:
    """A = F_q^k x {0}^k x X with k = (d-1)/2, and B = g0^{-1} A."""
    if d % 2 == 0:
        raise ConstructionError("needs odd d")
    k = (d - 1) // 2
    sp = space(ctx, d)
    X = np.asarray(X, dtype=np.int64)
    head = space(ctx, k).coords if k else np.zeros((1, 0), dtype=np.int64)
    pts = np.zeros((len(head) * len(X), d), dtype=np.int64)
    pts[:, :k] = np.repeat(head, len(X), axis=0)
    pts[:, d - 1] = np.tile(X, len(head))
    A = PointSet.from_vectors(sp, pts)
    g0 = np.asarray(g0, dtype=np.int64)
    B = A.apply(transpose(g0))  # g0 is orthogonal, so g0^{-1} = g0^T
    return A, B


def build_subspace_example(ctx: FieldContext, d: int, basis) -> tuple[PointSet, PointSet]:
    """A = B = the span of ``basis``."""
    W = subspace_from_vectors(ctx, basis, d)
    A = PointSet.from_indices(space(ctx, d), W.elements())
    return A, A


@dataclass
class ProjectionSharpness:
    A: PointSet
    B: PointSet
    L: list[Subspace]
    directions: np.ndarray  # the field elements c excluded through span((c, 1))


def build_projection_sharpness(ctx: FieldContext, c: Fraction | float, B_prime=None) -> ProjectionSharpness:
    """Sets A, B in F_q^2 (q = p^2) and lines L on which the projections never meet.

    A_1 is the union of cp cosets a + F_p with a = k t (k < cp), A_2 = F_p,
    A = {(x, y) : y != 0, x / y in A_1, 1 / y in A_2} and B = -B' x {0}.
    Every difference a - b has direction (s, 1) with s in A_1 + B' A_2, so
    L keeps the lines W whose complement avoids those directions.
    """
    if ctx.ell != 2:
        raise ConstructionError("needs q = p^2")
    p, q = ctx.p, ctx.q
    c = Fraction(c).limit_denominator(p) if not isinstance(c, Fraction) else c
    cosets = c * p
    if cosets.denominator != 1 or not 0 < cosets < p:
        raise ConstructionError(f"c * p must be an integer in (0, p), got {cosets}")
    cosets = int(cosets)
    prime_field = np.arange(p)
    if B_prime is None:
        B_prime = prime_field
    B_prime = np.asarray(B_prime, dtype=np.int64)
    reps = np.array([k * p for k in range(cosets)], dtype=np.int64)  # k * t
    A1 = np.unique(ctx.add_table[reps[:, None], prime_field[None, :]])
    A2 = prime_field
    sp = space(ctx, 2)
    x, y = sp.coords[:, 0], sp.coords[:, 1]
    nz = y != 0
    ratio = np.where(nz, ctx.mul_table[x, ctx.inv_table[y]], 0)
    recip = np.where(nz, ctx.inv_table[y], 0)
    in_A = nz & np.isin(ratio, A1) & np.isin(recip, A2)
    A = PointSet(sp, in_A)
    Bv = np.zeros((len(B_prime), 2), dtype=np.int64)
    Bv[:, 0] = ctx.neg_table[B_prime]
    B = PointSet.from_vectors(sp, Bv)
    C = np.unique(ctx.add_table[A1[:, None], np.unique(ctx.mul_table[B_prime[:, None], A2[None, :]]).reshape(1, -1)])
    excluded = {subspace_from_vectors(ctx, [[int(s), 1]]).key for s in C}
    L = [W for W in enumerate_grassmannian(ctx, 2, 1) if orthogonal_complement(W).key not in excluded]
    return ProjectionSharpness(A, B, L, C)


# -- declarative specs --------------------------------------------------------------------------

KINDS = ("subspace_example", "ap_lattice", "isotropic_lattice", "small_A_large_B", "projection_sharpness", "rotated_slab")


@dataclass
class ConstructionSpec:
    kind: str
    p: int
    ell: int = 1
    d: int = 3
    c: Fraction | None = None
    x_length: int | None = None
    vectors: list[list[int]] | None = None
    params: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConstructionError(f"unknown construction kind {self.kind!r}")
        if self.kind == "projection_sharpness" and self.ell != 2:
            raise ConstructionError("projection_sharpness needs q = p^2")
        if self.kind in ("ap_lattice", "isotropic_lattice", "small_A_large_B", "rotated_slab") and self.d % 2 == 0:
            raise ConstructionError(f"{self.kind} needs odd d")


def build(spec: ConstructionSpec) -> dict[str, PointSet]:
    """Run the builder named by ``spec.kind``; returns the named sets."""
    from .field_core import make_field

    spec.validate()
    ctx = make_field(spec.p, spec.ell)
    d = spec.d
    if spec.kind == "projection_sharpness":
        res = build_projection_sharpness(ctx, spec.c if spec.c is not None else Fraction(1, spec.p))
        return {"A": res.A, "B": res.B}
    if spec.kind == "subspace_example":
        basis = spec.vectors if spec.vectors is not None else np.eye(d, dtype=np.int64)[: max(1, d // 2)]
        A, B = build_subspace_example(ctx, d, basis)
        return {"A": A, "B": B}
    length = spec.x_length if spec.x_length is not None else max(1, ctx.q // 3)
    X = arithmetic_progression(ctx, length)
    if spec.kind == "rotated_slab":
        g0 = np.asarray(spec.params.get("g0", np.eye(d, dtype=np.int64)), dtype=np.int64)
        A, B = build_rotated_slab(ctx, d, g0, X)
        return {"A": A, "B": B}
    vecs = spec.vectors
    if vecs is None:
        found = mutually_isotropic_vectors(ctx, d - 1, (d - 1) // 2)
        if isinstance(found, Infeasible):
            raise ConstructionError(f"no {(d - 1) // 2} mutually isotropic vectors in F_{ctx.q}^{d - 1}")
        vecs = found
    if spec.kind in ("ap_lattice", "isotropic_lattice"):
        A, B = build_ap_lattice_sets(ctx, d, X, vecs)
    else:
        A, B = build_small_large_sets(ctx, d, X, vecs)
    return {"A": A, "B": B}
