"""Subspaces of F_q^d, the Grassmannian, coset projections and affine flats.

A subspace is stored by its reduced row-echelon basis, which is unique, so
two subspaces are equal iff their bases are.  The projection of E onto W is
the set of cosets x + W^perp that meet E; each coset is keyed by the
reduction of x modulo the echelon basis of W^perp.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ResourceError, ShapeError
from .field_core import FieldContext
from .theorems import Instance, evaluate, flats_main_term
from .vector_geometry import PointSet, Space, space

GRASSMANNIAN_BUDGET = 2_000_000


# -- linear algebra over F_q ----------------------------------------------------------------


def rref(ctx: FieldContext, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form and pivot columns; zero rows dropped."""
    R = np.array(M, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise ShapeError("rref expects a matrix")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        R[[r, k]] = R[[k, r]]
        R[r] = ctx.mul_table[ctx.inv_table[R[r, c]], R[r]]
        for i in range(rows):
            if i != r and R[i, c]:
                R[i] = ctx.sub(R[i], ctx.mul_table[R[i, c], R[r]])
        pivots.append(c)
        r += 1
    return R[:r], pivots


def gaussian_binomial(q: int, d: int, m: int) -> int:
    """Number of m-dimensional subspaces of F_q^d."""
    if m < 0 or m > d:
        return 0
    num = den = 1
    for i in range(m):
        num *= q ** (d - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@dataclass(frozen=True, eq=False)
class Subspace:
    ctx: FieldContext
    d: int
    basis: np.ndarray  # (m, d) in reduced row-echelon form
    pivots: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.pivots)

    @property
    def key(self) -> bytes:
        return self.basis.tobytes() + bytes([self.m, self.d])

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self.ctx is other.ctx and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def serialize(self) -> str:
        if self.m == 0:
            return "0"
        return ";".join(" ".join(str(int(v)) for v in row) for row in self.basis)

    def __repr__(self) -> str:
        return f"Subspace(q={self.ctx.q}, d={self.d}, basis=[{self.serialize()}])"

    def reduce(self, sp: Space, idx=None) -> np.ndarray:
        """Index of the canonical representative of x + self, for each x."""
        coords = sp.coords if idx is None else sp.coords[np.asarray(idx)]
        coords = np.array(coords, dtype=np.int64, copy=True)
        ctx = self.ctx
        for row, c in zip(self.basis, self.pivots):
            coef = coords[:, c].copy()
            coords = ctx.sub(coords, ctx.mul_table[coef[:, None], row[None, :]])
        return sp.encode(coords)

    def contains_vectors(self, sp: Space, idx) -> np.ndarray:
        return self.reduce(sp, idx) == 0

    def elements(self) -> np.ndarray:
        """All q^m vector indices in the subspace."""
        sp = space(self.ctx, self.d)
        if self.m == 0:
            return np.zeros(1, dtype=np.int64)
        coeffs = space(self.ctx, self.m).coords  # (q^m, m)
        ctx = self.ctx
        out = np.zeros((len(coeffs), self.d), dtype=np.int64)
        for i in range(self.m):
            out = ctx.add_table[out, ctx.mul_table[coeffs[:, i][:, None], self.basis[i][None, :]]]
        return np.sort(sp.encode(out))


def subspace_from_vectors(ctx: FieldContext, vectors, d: int | None = None) -> Subspace:
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.int64))
    if d is None:
        d = vectors.shape[1]
    if vectors.size == 0:
        return Subspace(ctx, d, np.zeros((0, d), dtype=np.int64), ())
    R, piv = rref(ctx, vectors)
    R.setflags(write=False)
    return Subspace(ctx, d, R, tuple(piv))


def enumerate_grassmannian(ctx: FieldContext, d: int, m: int) -> list[Subspace]:
    """All m-dimensional subspaces, one per pivot pattern and free-entry choice."""
    if not 0 <= m <= d:
        raise ShapeError("need 0 <= m <= d")
    total = gaussian_binomial(ctx.q, d, m)
    if total > GRASSMANNIAN_BUDGET:
        raise ResourceError(f"G({d},{m}) over F_{ctx.q} has {total} elements")
    out: list[Subspace] = []
    for piv in itertools.combinations(range(d), m):
        free = [(i, j) for i, c in enumerate(piv) for j in range(c + 1, d) if j not in piv]
        for vals in itertools.product(range(ctx.q), repeat=len(free)):
            B = np.zeros((m, d), dtype=np.int64)
            for i, c in enumerate(piv):
                B[i, c] = 1
            for (i, j), v in zip(free, vals):
                B[i, j] = v
            B.setflags(write=False)
            out.append(Subspace(ctx, d, B, piv))
    out.sort(key=lambda W: (W.pivots, W.basis.tobytes()))
    return out


def enumerate_grassmannian_brute_force(ctx: FieldContext, d: int, m: int) -> list[Subspace]:
    """Span every m-tuple of vectors and keep the distinct rank-m results (oracle)."""
    sp = space(ctx, d)
    if sp.size**m > 5_000_000:
        raise ResourceError("brute-force Grassmannian too large")
    seen: dict[bytes, Subspace] = {}
    for tup in itertools.product(range(1, sp.size), repeat=m):
        W = subspace_from_vectors(ctx, sp.coords[list(tup)], d)
        if W.m == m:
            seen.setdefault(W.key, W)
    return sorted(seen.values(), key=lambda W: (W.pivots, W.basis.tobytes()))


def orthogonal_complement(W: Subspace) -> Subspace:
    """{x : w . x = 0 for all w in W}; always of dimension d - m."""
    ctx, d = W.ctx, W.d
    free = [c for c in range(d) if c not in W.pivots]
    vecs = []
    for f in free:
        x = np.zeros(d, dtype=np.int64)
        x[f] = 1
        for row, c in zip(W.basis, W.pivots):
            x[c] = ctx.neg_table[row[f]]
        vecs.append(x)
    if not vecs:
        return Subspace(ctx, d, np.zeros((0, d), dtype=np.int64), ())
    return subspace_from_vectors(ctx, np.array(vecs), d)


# -- projections -------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProjectionImage:
    W: Subspace
    keys: np.ndarray  # sorted coset keys

    @property
    def card(self) -> int:
        return int(self.keys.size)

    def __len__(self) -> int:
        return self.card

    def intersect(self, other: "ProjectionImage") -> np.ndarray:
        return np.intersect1d(self.keys, other.keys, assume_unique=True)


class Projector:
    """Coset keys of x + W^perp for every x, cached per W."""

    def __init__(self, W: Subspace):
        self.W = W
        self.perp = orthogonal_complement(W)
        self.sp = space(W.ctx, W.d)
        self.key_of = self.perp.reduce(self.sp)

    def image(self, E: PointSet) -> ProjectionImage:
        return ProjectionImage(self.W, np.unique(self.key_of[E.bits]))


def project(E: PointSet, W: Subspace) -> ProjectionImage:
    if E.d != W.d or E.ctx is not W.ctx:
        raise ShapeError("set and subspace live in different spaces")
    return Projector(W).image(E)


def project_brute_force(E: PointSet, W: Subspace) -> int:
    """|pi_W(E)| by scanning the q^m cosets, each labelled by its values w_i . x (oracle)."""
    sp = E.space
    if W.m == 0:
        return 1 if E.card else 0
    basis_idx = sp.encode(W.basis)
    xs = E.indices()
    sig = np.stack([sp.dot(xs, np.full(xs.shape, b)) for b in basis_idx], axis=1) if xs.size else np.zeros((0, W.m), dtype=np.int64)
    labels = space(W.ctx, W.m)
    present = np.zeros(labels.size, dtype=bool)
    if xs.size:
        present[labels.encode(sig)] = True
    return int(np.count_nonzero(present))


# -- projection-count checks ---------------------------------------------------------------------


@dataclass
class CountCheck:
    N: int
    count: int
    bound: float

    @property
    def ok(self) -> bool:
        return self.count <= self.bound


def projection_sizes(E: PointSet, subspaces: list[Subspace], projectors: list[Projector] | None = None) -> np.ndarray:
    if projectors is None:
        projectors = [Projector(W) for W in subspaces]
    return np.array([pr.image(E).card for pr in projectors], dtype=np.int64)


def projection_count_checks(E: PointSet, m: int, sizes: np.ndarray) -> list[CountCheck]:
    """#{W : |pi_W(E)| <= N} against 4 q^((d-m)m-m) N, for every integer N < |E|/2."""
    ctx = E.ctx
    out = []
    for N in range(0, (E.card + 1) // 2):
        if not N < E.card / 2:
            break
        b = evaluate("projection_count", Instance(ctx.p, ctx.ell, E.d, m=m, N=N, E=E.card))
        out.append(CountCheck(N, int(np.count_nonzero(sizes <= N)), b.value))
    return out


def projection_density_checks(E: PointSet, m: int, sizes: np.ndarray, deltas=(0.1, 0.25, 0.5, 0.75, 0.9)) -> list[dict]:
    ctx, q = E.ctx, E.ctx.q
    out = []
    for delta in deltas:
        b = evaluate("projection_density", Instance(ctx.p, ctx.ell, E.d, m=m, delta=delta, E=E.card))
        cnt = int(np.count_nonzero(sizes <= delta * q**m))
        out.append({"delta": delta, "count": cnt, "bound": b.value, "ok": cnt <= b.value})
    return out


@dataclass
class SweepRow:
    index: int
    W: Subspace
    size_A: int
    size_B: int
    common: int


@dataclass
class ProjectionSweep:
    m: int
    rows: list[SweepRow]
    summary: dict
    count_checks_A: list[CountCheck]
    count_checks_B: list[CountCheck]

    @property
    def count_bound_ok(self) -> bool:
        return all(c.ok for c in self.count_checks_A) and all(c.ok for c in self.count_checks_B)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["W", "basis", "proj_A", "proj_B", "common"])
        for r in self.rows:
            w.writerow([r.index, r.W.serialize(), r.size_A, r.size_B, r.common])
        return buf.getvalue()


def projection_intersection_sweep(A: PointSet, B: PointSet, m: int) -> ProjectionSweep:
    """|pi_W(A) cap pi_W(B)| for every W in G(d, m), with summary counts."""
    A._check(B)
    ctx, d, q = A.ctx, A.d, A.ctx.q
    subspaces = enumerate_grassmannian(ctx, d, m)
    rows = []
    for k, W in enumerate(subspaces):
        pr = Projector(W)
        ia, ib = pr.image(A), pr.image(B)
        rows.append(SweepRow(k, W, ia.card, ib.card, int(ia.intersect(ib).size)))
    sa = np.array([r.size_A for r in rows])
    sb = np.array([r.size_B for r in rows])
    common = np.array([r.common for r in rows])
    qm = q**m
    summary = {
        "subspaces": len(rows),
        "half_full": int(np.count_nonzero(2 * common > qm)),
        "full": int(np.count_nonzero(common == qm)),
        "tenth_of_B": int(np.count_nonzero(10 * common >= B.card)),
        "empty": int(np.count_nonzero(common == 0)),
        "generic_count": q ** (m * (d - m)),
    }
    return ProjectionSweep(m, rows, summary, projection_count_checks(A, m, sa), projection_count_checks(B, m, sb))


# -- affine flats -----------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Flat:
    """x + U with x reduced modulo U."""

    direction: Subspace
    offset: int

    @property
    def dim(self) -> int:
        return self.direction.m

    def points(self) -> np.ndarray:
        sp = space(self.direction.ctx, self.direction.d)
        return np.sort(sp.add(self.direction.elements(), np.full(self.direction.elements().shape, self.offset)))


def make_flat(U: Subspace, x) -> Flat:
    sp = space(U.ctx, U.d)
    if not isinstance(x, (int, np.integer)):
        x = int(sp.encode(x))
    return Flat(U, int(U.reduce(sp, [x])[0]))


def enumerate_affine_flats(ctx: FieldContext, d: int, k: int) -> list[Flat]:
    sp = space(ctx, d)
    out = []
    for U in enumerate_grassmannian(ctx, d, k):
        for off in np.unique(U.reduce(sp)):
            out.append(Flat(U, int(off)))
    return out


def flat_contains(big: Flat, small: Flat) -> bool:
    """small is a subset of big (direct check)."""
    sp = space(big.direction.ctx, big.direction.d)
    return bool(np.all(np.isin(small.points(), big.points())))


def flats_incidences(K: list[Flat], H: list[Flat]) -> int:
    """#{(a, b) in K x H : a is contained in b}."""
    if not K or not H:
        return 0
    U0 = K[0].direction
    ctx, d = U0.ctx, U0.d
    sp = space(ctx, d)
    k = K[0].dim
    h = H[0].dim
    if any(f.dim != k or f.direction.d != d for f in K) or any(f.dim != h or f.direction.d != d for f in H):
        raise ShapeError("flats must share dimension and ambient space")
    by_dir: dict[bytes, tuple[Subspace, list[int]]] = {}
    for f in H:
        by_dir.setdefault(f.direction.key, (f.direction, []))[1].append(f.offset)
    k_dirs: dict[bytes, tuple[Subspace, list[int]]] = {}
    for f in K:
        k_dirs.setdefault(f.direction.key, (f.direction, []))[1].append(f.offset)
    total = 0
    for V, offsets in by_dir.values():
        key_V = V.reduce(sp)
        counts = np.zeros(sp.size, dtype=np.int64)
        for U, k_offsets in k_dirs.values():
            if U.m and not np.all(V.contains_vectors(sp, sp.encode(U.basis))):
                continue
            np.add.at(counts, key_V[np.asarray(k_offsets)], 1)
        total += int(counts[key_V[np.asarray(offsets)]].sum())
    return total


def flats_incidences_naive(K: list[Flat], H: list[Flat]) -> int:
    return sum(flat_contains(b, a) for a in K for b in H)


@dataclass
class FlatsReport:
    count: int
    main_term: float
    deviation: float
    bound: float
    flags: tuple[str, ...]

    @property
    def ratio(self) -> float:
        return abs(self.deviation) / self.bound if self.bound else math.inf


def flats_incidence_report(K: list[Flat], H: list[Flat]) -> FlatsReport:
    count = flats_incidences(K, H)
    U = (K or H)[0].direction
    ctx, d = U.ctx, U.d
    k, h = K[0].dim, H[0].dim
    main = flats_main_term(ctx.q, d, k, h, len(K), len(H))
    b = evaluate("flats_incidence", Instance(ctx.p, ctx.ell, d, k=k, h=h, K=len(K), H=len(H)))
    return FlatsReport(count, main, count - main, b.value, b.flags)
