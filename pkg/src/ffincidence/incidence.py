"""Counting quantities for points and rigid motions.

I(P, R), N(P), the intersection histograms |A cap (gB + z)|, the images
S_g(P) = {x - g y}, and the exact Fourier identities tying them together.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

from .errors import ResourceError, ShapeError
from .motions import MotionSet, OrthogonalGroup, orthogonal_group_order, transpose
from .spectral import Spectrum, dft, pair_spectrum_norm_sums, spectral_sum_equal_norms, spectral_sum_unequal_norms
from .vector_geometry import PairSet, PointSet, Space, space

NAIVE_LIMIT = 10_000_000


# -- group-algebra helpers ------------------------------------------------------------------


def _as_group_array(sp: Space, values: np.ndarray) -> np.ndarray:
    return np.asarray(values).reshape(sp.as_group_shape(), order="F")


def correlate(sp: Space, f: np.ndarray, h: np.ndarray) -> np.ndarray:
    """c[z] = sum_x f(x) h(x - z), exact for integer inputs (rounded)."""
    F = np.fft.fftn(_as_group_array(sp, f.astype(np.float64)))
    H = np.fft.fftn(_as_group_array(sp, h.astype(np.float64)))
    c = np.fft.ifftn(F * np.conj(H)).real.reshape(-1, order="F")
    out = np.rint(c)
    if out.size and np.max(np.abs(c - out)) > 1e-6:
        raise ArithmeticError("correlation lost integrality")
    return out.astype(np.int64)


def difference_counts(A: PointSet) -> np.ndarray:
    """c[w] = #{(x, y) in A x A : x - y = w}."""
    return correlate(A.space, A.bits, A.bits)


# -- histograms and images ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Histogram:
    """z -> |A cap (gB + z)| for a fixed g."""

    counts: np.ndarray
    g: np.ndarray
    size_A: int
    size_B: int

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def support_size(self) -> int:
        """|A - gB|: the number of z with a nonempty intersection."""
        return int(np.count_nonzero(self.counts))


def intersection_histogram(A: PointSet, B: PointSet, g, method: Literal["fft", "pairs"] = "fft") -> Histogram:
    A._check(B)
    g = np.asarray(g, dtype=np.int64)
    gB = B.apply(g)
    if method == "fft":
        counts = correlate(A.space, A.bits, gB.bits)
    elif method == "pairs":
        sp = A.space
        a = A.indices()
        b = gB.indices()
        if a.size * b.size > NAIVE_LIMIT:
            raise ResourceError("pairwise histogram too large")
        zs = sp.sub(np.repeat(a, b.size), np.tile(b, a.size))
        counts = np.bincount(zs, minlength=sp.size)
    else:
        raise ValueError(method)
    return Histogram(counts=counts, g=g, size_A=A.card, size_B=B.card)


def sg_values(P: PairSet, action: np.ndarray) -> np.ndarray:
    """x - g y for every (x, y) in P, given the action table of g."""
    xs, ys = P.pairs()
    return P.base.sub(xs, action[ys])


def sg_image(P: PairSet, g=None, action: np.ndarray | None = None) -> PointSet:
    base = P.base
    if action is None:
        action = base.matrix_action(g)
    return PointSet.from_indices(base, np.unique(sg_values(P, action)))


def difference_set_size(A: PointSet, B: PointSet, g) -> int:
    """|A - gB|."""
    return intersection_histogram(A, B, g).support_size()


# -- incidences ------------------------------------------------------------------------------------


@dataclass
class IncidenceResult:
    count: int
    main_term: Fraction
    error_observed: Fraction
    error_budget: float | None = None
    theorem_id: str | None = None

    @property
    def constant(self) -> float | None:
        if not self.error_budget:
            return None
        return abs(float(self.error_observed)) / self.error_budget


def _check_pair_motion(P: PairSet, R: MotionSet) -> None:
    if P.space.d != 2 * R.group.d or P.ctx is not R.group.ctx:
        raise ShapeError("point pairs and motions live over different spaces")


def count_incidences(P: PairSet, R: MotionSet) -> IncidenceResult:
    """I(P, R) = #{(x, y, g, z) : (x, y) in P, (g, z) in R, x = g y + z}."""
    _check_pair_motion(P, R)
    base = P.base
    total = 0
    for gi, zs in R.by_group().items():
        hist = np.bincount(sg_values(P, R.group.actions[gi]), minlength=base.size)
        total += int(hist[zs].sum())
    main = Fraction(P.card * len(R), base.size)
    return IncidenceResult(count=total, main_term=main, error_observed=total - main)


def count_incidences_naive(P: PairSet, R: MotionSet) -> int:
    """Direct loop over P x R; test oracle."""
    _check_pair_motion(P, R)
    xs, ys = P.pairs()
    if len(xs) * len(R) > NAIVE_LIMIT:
        raise ResourceError("naive incidence count too large")
    base = P.base
    total = 0
    for gi, zi in zip(R.g, R.z):
        img = base.add(R.group.actions[gi, ys], np.full(ys.shape, zi))
        total += int(np.count_nonzero(img == xs))
    return total


def incidence_fourier_expansion(P: PairSet, R: MotionSet, spectrum: Spectrum | None = None) -> tuple[float, complex]:
    """(main, error) with main + error = I(P, R).

    error = q^d sum_{m != 0} sum_{(g, z) in R} P^(-m, g^T m) chi(-m.z),
    summed per g through the transform of the z-set of that g.
    """
    _check_pair_motion(P, R)
    base = P.base
    n = base.size
    if spectrum is None:
        spectrum = dft(P.space, P)
    coeffs = spectrum.coeffs
    m = np.arange(n)
    neg_m = base.neg(m)
    err = 0j
    for gi, zs in R.by_group().items():
        gT = transpose(R.group[gi])
        gTm = base.matrix_action(gT)
        zmask = np.zeros(n, dtype=float)
        zmask[zs] = 1.0
        zhat = dft(base, zmask).coeffs  # q^-d sum_z chi(-m.z)
        terms = coeffs[neg_m + n * gTm] * zhat
        err += terms[1:].sum()
    err *= float(n) * n
    main = P.card * len(R) / n
    return main, complex(err)


# -- N(P) ---------------------------------------------------------------------------------------------


def nu(A: PointSet) -> np.ndarray:
    """nu_A(j) = #{(x, y) in A x A : ||x - y|| = j}."""
    c = difference_counts(A)
    return np.bincount(A.space.norms, weights=c, minlength=A.space.q).astype(np.int64)


def count_N(P: PairSet) -> int:
    """N(P) = #{((x, y), (u, v)) in P x P : ||x - u|| = ||y - v||}."""
    base = P.base
    c = difference_counts(P)  # over F_q^{2d}, index = w1 + q^d w2
    n = base.size
    idx = np.arange(P.space.size)
    on_v = base.norms[idx % n] == base.norms[idx // n]
    return int(c[on_v].sum())


def count_N_product(A: PointSet, B: PointSet) -> int:
    """N(A x B) = sum_t nu_A(t) nu_B(t)."""
    return int(np.dot(nu(A), nu(B)))


def count_N_naive(P: PairSet) -> int:
    """Quadruple loop, vectorized by rows; test oracle."""
    xs, ys = P.pairs()
    if len(xs) ** 2 > NAIVE_LIMIT:
        raise ResourceError("naive N(P) count too large")
    base = P.base
    total = 0
    for k in range(len(xs)):
        dx = base.norms[base.sub(np.full(xs.shape, xs[k]), xs)]
        dy = base.norms[base.sub(np.full(ys.shape, ys[k]), ys)]
        total += int(np.count_nonzero(dx == dy))
    return total


def n_general_identity(P: PairSet, spectrum: Spectrum | None = None) -> float:
    """Right side of the general-set identity for N(P).

    (1/q + (q-1)/q^(d+1)) |P|^2
      + q^(3d-1) (q-1) sum_{(m,m') != 0, ||m||=||m'||} |P^|^2
      - q^(3d-1) sum_{||m|| != ||m'||} |P^|^2
    """
    base = P.base
    q, d = base.q, base.d
    _, eq_star, neq = pair_spectrum_norm_sums(spectrum if spectrum is not None else P)
    size = P.card
    return (1 / q + (q - 1) / q ** (d + 1)) * size**2 + q ** (3 * d - 1) * (q - 1) * eq_star - q ** (3 * d - 1) * neq


def n_product_identity(A: PointSet, B: PointSet, sA: Spectrum | None = None, sB: Spectrum | None = None) -> float:
    """Right side of the product-set identity for N(A x B).

    |P|^2/q + q^(3d-1) (q-1) sum_{||m||=||m'||} |A^|^2|B^|^2 - q^(3d-1) sum_{||m||!=||m'||} ...
    """
    sA = sA if sA is not None else dft(A.space, A)
    sB = sB if sB is not None else dft(B.space, B)
    q, d = A.space.q, A.space.d
    eq = spectral_sum_equal_norms(sA, sB)
    neq = spectral_sum_unequal_norms(sA, sB)
    size = A.card * B.card
    return size**2 / q + q ** (3 * d - 1) * (q - 1) * eq - q ** (3 * d - 1) * neq


def n_product_identity_q3d(A: PointSet, B: PointSet, sA: Spectrum | None = None, sB: Spectrum | None = None) -> float:
    """The same identity with coefficient q^(3d) on the equal-norm sum.

    Kept for the discrepancy check: it exceeds N(A x B) by exactly
    q^(3d-1) * sum_{||m||=||m'||} |A^|^2 |B^|^2.
    """
    sA = sA if sA is not None else dft(A.space, A)
    sB = sB if sB is not None else dft(B.space, B)
    q, d = A.space.q, A.space.d
    size = A.card * B.card
    return size**2 / q - q ** (3 * d - 1) * spectral_sum_unequal_norms(sA, sB) + q ** (3 * d) * spectral_sum_equal_norms(sA, sB)


def _rel_ok(lhs: float, rhs: float, rel: float) -> bool:
    return abs(lhs - rhs) <= rel * max(1.0, abs(lhs))


def verify_N_identities(P: PairSet, A: PointSet | None = None, B: PointSet | None = None, rel: float = 1e-6) -> dict:
    """Check the N(P) identities; return a report dict.

    ``A`` and ``B`` are given when P = A x B, which enables the product check.
    """
    base = P.base
    q, d = base.q, base.d
    N = count_N(P)
    sP = dft(P.space, P)
    general = n_general_identity(P, sP)
    report = {
        "N": N,
        "general_rhs": general,
        "general_ok": _rel_ok(N, general, rel),
        "quadruple_ratio": abs(N - P.card**2 / q) / (q**d * P.card) if P.card else 0.0,
    }
    if A is not None and B is not None:
        sA, sB = dft(A.space, A), dft(B.space, B)
        prod = n_product_identity(A, B, sA, sB)
        report["N_product"] = count_N_product(A, B)
        report["product_rhs"] = prod
        report["product_ok"] = _rel_ok(N, prod, rel) and report["N_product"] == N
        report["product_q3d_rhs"] = n_product_identity_q3d(A, B, sA, sB)
    return report


# -- exceptional sets -----------------------------------------------------------------------------------


@dataclass
class ExceptionalSetReport:
    theorem_id: str
    criterion: str
    E: list[int]
    bound: float | None
    flags: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.E)

    @property
    def observed_constant(self) -> float | None:
        if not self.bound:
            return None
        return self.size / self.bound


def _order_below(group: OrthogonalGroup) -> int:
    return orthogonal_group_order(group.ctx.q, group.d - 1) if group.d > 1 else 1


def intersection_exceptions(A: PointSet, B: PointSet, group: OrthogonalGroup) -> tuple[list[int], list[int]]:
    """g in E1 (too many small fibres) or E2 (too many large fibres), with c = 1/4.

    E1: #{z : |A cap (gB+z)| <= |A||B|/(2 q^d)} >= q^d/4
    E2: #{z : |A cap (gB+z)| >= 3|A||B|/(2 q^d)} >= q^d/4
    Returns (E, window_counts) where window_counts[g] counts z inside the
    factor-[1/2, 3/2] window.
    """
    n = A.space.size
    ab = A.card * B.card
    E, window = [], []
    for k, g in enumerate(group.matrices):
        h = intersection_histogram(A, B, g).counts
        low = np.count_nonzero(2 * n * h <= ab)
        high = np.count_nonzero(2 * n * h >= 3 * ab)
        window.append(int(np.count_nonzero((2 * n * h >= ab) & (2 * n * h <= 3 * ab))))
        if 4 * low >= n or 4 * high >= n:
            E.append(k)
    return E, window


def exceptional_set(
    A: PointSet,
    B: PointSet,
    group: OrthogonalGroup,
    criterion: Literal["intersection", "image", "growth"] = "intersection",
    eps: float | None = None,
    P: PairSet | None = None,
) -> ExceptionalSetReport:
    """Sweep the whole group and collect the g where the generic behaviour fails."""
    sp = A.space
    q, d, n = sp.q, sp.d, sp.size
    below = _order_below(group)
    flags: list[str] = []
    details: dict = {}
    if criterion == "intersection":
        ab = A.card * B.card
        E, window = intersection_exceptions(A, B, group)
        bound = below * q ** (2 * d) / ab if ab else None
        if ab < q ** (d + 1):
            flags.append("VALIDITY_RANGE")
        good = [w for k, w in enumerate(window) if k not in set(E)]
        details["min_window_outside_E"] = min(good) if good else None
        return ExceptionalSetReport("exceptional_intersection", "intersection", E, bound, flags, details)
    if criterion == "image":
        if P is None:
            P = PairSet.product(A, B)
        E = [k for k in range(len(group)) if 2 * np.unique(sg_values(P, group.actions[k])).size < n]
        bound = q ** (2 * d) * below / P.card if P.card else None
        return ExceptionalSetReport("exceptional_image", "image", E, bound, flags, details)
    if criterion == "growth":
        if eps is None:
            raise ValueError("growth criterion needs eps")
        return growth_experiment(A, B, eps, group)
    raise ValueError(f"unknown criterion {criterion!r}")


def growth_experiment(A: PointSet, B: PointSet, eps: float, group: OrthogonalGroup) -> ExceptionalSetReport:
    """E = {g : |A - gB| <= |B|^(1+eps)} against |O(d-1)| q^d |B|^eps / |A|."""
    sp = A.space
    q, d = sp.q, sp.d
    lam = B.card ** (1 + eps)
    flags = []
    if not (A.card <= B.card and lam < q**d / 2):
        flags.append("VALIDITY_RANGE")
    sizes = [difference_set_size(A, B, g) for g in group.matrices]
    E = [k for k, s in enumerate(sizes) if s <= lam]
    bound = _order_below(group) * q**d * B.card**eps / A.card if A.card else None
    return ExceptionalSetReport(
        "growth_general", "growth", E, bound, flags, {"lambda": lam, "min_difference_set": min(sizes) if sizes else None}
    )
