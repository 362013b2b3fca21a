"""The orthogonal group O(d, q), stabilizers, and rigid motions x -> g x + z."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DomainError, ResourceError, ShapeError
from .field_core import FieldContext, make_field
from .vector_geometry import PointSet, Space, space

MAX_DIM = 5
GROUP_BUDGET = 2_000_000  # group elements


def mat_mul(ctx: FieldContext, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix product over F_q; broadcasts over leading batch axes."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    prod = ctx.mul_table[A[..., :, :, None], B[..., None, :, :]]  # (..., i, j, k)
    out = prod[..., 0, :]
    for j in range(1, A.shape[-1]):
        out = ctx.add_table[out, prod[..., j, :]]
    return out


def transpose(g: np.ndarray) -> np.ndarray:
    return np.swapaxes(np.asarray(g), -1, -2)


def is_orthogonal(ctx: FieldContext, g: np.ndarray) -> np.ndarray | bool:
    g = np.asarray(g, dtype=np.int64)
    d = g.shape[-1]
    gram = mat_mul(ctx, transpose(g), g)
    ok = np.all(gram == np.eye(d, dtype=np.int64), axis=(-1, -2))
    return bool(ok) if ok.ndim == 0 else ok


def orthogonal_group_order(q: int, d: int) -> int:
    """|O(d, q)| for the form x_1^2 + ... + x_d^2, q odd."""
    if d == 1:
        return 2
    m = d // 2
    prod = 1
    if d % 2:
        for i in range(1, m + 1):
            prod *= q ** (2 * i) - 1
        return 2 * q ** (m * m) * prod
    # plus type iff (-1)^m is a square in F_q
    minus_one_square = q % 4 == 1
    eps = 1 if (m % 2 == 0 or minus_one_square) else -1
    for i in range(1, m):
        prod *= q ** (2 * i) - 1
    return 2 * q ** (m * (m - 1)) * (q**m - eps) * prod


def _canonical_sort(mats: np.ndarray) -> np.ndarray:
    if len(mats) == 0:
        return mats
    flat = mats.reshape(len(mats), -1)
    order = np.lexsort(flat.T[::-1])
    flat = flat[order]
    keep = np.ones(len(flat), dtype=bool)
    keep[1:] = np.any(flat[1:] != flat[:-1], axis=1)
    return mats[order][keep]


def enumerate_orthogonal_column_extension(ctx: FieldContext, d: int) -> np.ndarray:
    """All g with g^T g = I, built one orthonormal column at a time."""
    sp = space(ctx, d)
    units = np.flatnonzero(sp.norms == 1)
    found: list[tuple[int, ...]] = []

    def extend(cols: list[int], cands: np.ndarray) -> None:
        if len(cols) == d:
            found.append(tuple(cols))
            return
        for c in cands:
            nxt = cands[sp.dot(cands, np.full(cands.shape, c)) == 0]
            extend(cols + [int(c)], nxt)

    extend([], units)
    if not found:
        return np.zeros((0, d, d), dtype=np.int64)
    cols = np.array(found, dtype=np.int64)  # (N, d) column indices
    mats = np.transpose(sp.coords[cols], (0, 2, 1))  # entry [n, row, col]
    return _canonical_sort(np.ascontiguousarray(mats))


def enumerate_orthogonal_brute_force(ctx: FieldContext, d: int) -> np.ndarray:
    """Filter all q^(d^2) matrices; independent oracle for small cases."""
    n = ctx.q ** (d * d)
    if n > 5_000_000:
        raise ResourceError(f"brute force over {n} matrices is too large")
    idx = np.arange(n, dtype=np.int64)
    entries = (idx[:, None] // (ctx.q ** np.arange(d * d))[None, :]) % ctx.q
    mats = entries.reshape(n, d, d)
    return _canonical_sort(mats[is_orthogonal(ctx, mats)])


class OrthogonalGroup:
    """An enumerated O(d, q) in canonical (row-major lexicographic) order."""

    def __init__(self, ctx: FieldContext, d: int, matrices: np.ndarray):
        self.ctx = ctx
        self.d = d
        self.space: Space = space(ctx, d)
        self.matrices = matrices
        self.matrices.setflags(write=False)
        self._actions: np.ndarray | None = None
        self._lookup = {m.tobytes(): k for k, m in enumerate(self.matrices)}

    def __len__(self) -> int:
        return len(self.matrices)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.matrices[k]

    def __iter__(self):
        return iter(self.matrices)

    def index_of(self, g: np.ndarray) -> int:
        key = np.ascontiguousarray(np.asarray(g, dtype=np.int64)).tobytes()
        try:
            return self._lookup[key]
        except KeyError:
            raise DomainError("matrix is not in the group") from None

    def __contains__(self, g) -> bool:
        key = np.ascontiguousarray(np.asarray(g, dtype=np.int64)).tobytes()
        return key in self._lookup

    @property
    def actions(self) -> np.ndarray:
        """actions[k, i] = index of g_k x_i."""
        if self._actions is None:
            acts = np.stack([self.space.matrix_action(g) for g in self.matrices]) if len(self) else np.zeros((0, self.space.size), dtype=np.int64)
            acts.setflags(write=False)
            self._actions = acts
        return self._actions

    def action(self, k: int) -> np.ndarray:
        return self.actions[k]

    def identity_index(self) -> int:
        return self.index_of(np.eye(self.d, dtype=np.int64))


def enumerate_orthogonal_group(ctx: FieldContext, d: int) -> OrthogonalGroup:
    """O(d, q) via column extension, cached per (p, ell, d)."""
    return _group(ctx.p, ctx.ell, d)


@lru_cache(maxsize=None)
def _group(p: int, ell: int, d: int) -> OrthogonalGroup:
    ctx = make_field(p, ell)
    if d < 1 or d > MAX_DIM:
        raise ResourceError(f"d={d} outside supported range 1..{MAX_DIM}")
    est = orthogonal_group_order(ctx.q, d)
    if est > GROUP_BUDGET:
        raise ResourceError(f"|O({d},{ctx.q})| = {est} exceeds budget {GROUP_BUDGET}")
    mats = enumerate_orthogonal_column_extension(ctx, d)
    return OrthogonalGroup(ctx, d, mats)


def stabilizer(group: OrthogonalGroup, v) -> np.ndarray:
    """Indices of the g in the group with g v = v (v nonzero)."""
    if not isinstance(v, (int, np.integer)):
        v = int(group.space.encode(v))
    if v == 0:
        raise DomainError("the stabilizer of 0 is the whole group")
    return np.flatnonzero(group.actions[:, v] == v)


def stabilizer_ratio(group: OrthogonalGroup) -> dict:
    """max and min of |stab(v)| / |O(d-1, q)| over nonzero v."""
    sizes = np.sum(group.actions == np.arange(group.space.size)[None, :], axis=0)[1:]
    base = orthogonal_group_order(group.ctx.q, group.d - 1) if group.d > 1 else 1
    return {
        "max_stab": int(sizes.max()),
        "min_stab": int(sizes.min()),
        "order_d_minus_1": base,
        "max_ratio": float(sizes.max() / base),
    }


# -- rigid motions -----------------------------------------------------------------------


@dataclass(frozen=True)
class RigidMotion:
    g: int  # index into the group
    z: int  # vector index

    def apply(self, group: OrthogonalGroup, x):
        return group.space.add(group.actions[self.g, x], np.full(np.shape(x), self.z))


def compose(group: OrthogonalGroup, second: RigidMotion, first: RigidMotion) -> RigidMotion:
    """(g2, z2) o (g1, z1) = (g2 g1, g2 z1 + z2)."""
    g = mat_mul(group.ctx, group[second.g], group[first.g])
    z = group.space.add(group.actions[second.g, first.z], second.z)
    return RigidMotion(group.index_of(g), int(z))


class MotionSet:
    """A deduplicated set of rigid motions in canonical (g, z) order."""

    def __init__(self, group: OrthogonalGroup, g_idx, z_idx):
        g_idx = np.asarray(g_idx, dtype=np.int64).reshape(-1)
        z_idx = np.asarray(z_idx, dtype=np.int64).reshape(-1)
        if g_idx.shape != z_idx.shape:
            raise ShapeError("g and z arrays differ in length")
        n = group.space.size
        key = np.unique(g_idx * n + z_idx)
        self.group = group
        self.g = key // n
        self.z = key % n
        self.g.setflags(write=False)
        self.z.setflags(write=False)

    def __len__(self) -> int:
        return len(self.g)

    def __iter__(self):
        for g, z in zip(self.g, self.z):
            yield RigidMotion(int(g), int(z))

    def by_group(self) -> dict[int, np.ndarray]:
        """g index -> array of z indices."""
        out: dict[int, np.ndarray] = {}
        if len(self) == 0:
            return out
        bounds = np.flatnonzero(np.diff(self.g)) + 1
        for zs, gs in zip(np.split(self.z, bounds), np.split(self.g, bounds)):
            out[int(gs[0])] = zs
        return out

    def indicator(self) -> np.ndarray:
        """(|O|, q^d) boolean table of membership."""
        tab = np.zeros((len(self.group), self.group.space.size), dtype=bool)
        tab[self.g, self.z] = True
        return tab

    def filter(self, predicate: Callable[[int, int], bool]) -> "MotionSet":
        keep = [k for k, (g, z) in enumerate(zip(self.g, self.z)) if predicate(int(g), int(z))]
        return MotionSet(self.group, self.g[keep], self.z[keep])


def all_rigid_motions(group: OrthogonalGroup) -> MotionSet:
    n = group.space.size
    g = np.repeat(np.arange(len(group)), n)
    z = np.tile(np.arange(n), len(group))
    return MotionSet(group, g, z)


def motion_subset(group: OrthogonalGroup, predicate: Callable[[int, int], bool]) -> MotionSet:
    return all_rigid_motions(group).filter(predicate)


def random_motions(group: OrthogonalGroup, density: float, rng: np.random.Generator) -> MotionSet:
    mask = rng.random((len(group), group.space.size)) < density
    g, z = np.nonzero(mask)
    return MotionSet(group, g, z)


# -- cache file ---------------------------------------------------------------------------

_HEADER = struct.Struct("<4i")


def save_group(group: OrthogonalGroup, path) -> None:
    """Binary layout: int32 (p, ell, d, count), then uint16 entries row-major."""
    ctx = group.ctx
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(ctx.p, ctx.ell, group.d, len(group)))
        fh.write(group.matrices.astype("<u2").tobytes())


def load_group(path) -> OrthogonalGroup:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ShapeError("group cache file truncated")
    p, ell, d, count = _HEADER.unpack_from(raw)
    body = np.frombuffer(raw, dtype="<u2", offset=_HEADER.size)
    if body.size != count * d * d:
        raise ShapeError("group cache entry count does not match header")
    ctx = make_field(p, ell)
    mats = body.astype(np.int64).reshape(count, d, d)
    if np.any(mats >= ctx.q) or not np.all(is_orthogonal(ctx, mats)):
        raise ShapeError("group cache contains a non-orthogonal matrix")
    return OrthogonalGroup(ctx, d, _canonical_sort(mats))

