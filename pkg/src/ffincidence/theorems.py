"""Registry of the inequality bounds checked by the harness.

Every bound is an explicit expression in q (or p), d and the set sizes.
Bounds whose constant is stated are tier EXACT and get asserted; the rest
are ESTIMATED: the harness reports observed / expression as an implied
constant.  Case selection follows the size ranges attached to each bound,
and an instance outside every range raises NotApplicable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import NotApplicable
from .motions import orthogonal_group_order

EXACT = "EXACT"
ESTIMATED = "ESTIMATED"


@dataclass(frozen=True)
class Instance:
    """Sizes and field data for one bound evaluation."""

    p: int
    ell: int
    d: int
    A: int | None = None
    B: int | None = None
    P: int | None = None
    R: int | None = None
    eps: float | None = None
    m: int | None = None
    N: float | None = None
    delta: float | None = None
    E: int | None = None
    k: int | None = None
    h: int | None = None
    K: int | None = None
    H: int | None = None

    @property
    def q(self) -> int:
        return self.p**self.ell

    def need(self, *names: str) -> tuple:
        vals = tuple(getattr(self, n) for n in names)
        missing = [n for n, v in zip(names, vals) if v is None]
        if missing:
            raise NotApplicable(f"missing sizes: {', '.join(missing)}")
        return vals


@dataclass(frozen=True)
class Bound:
    theorem_id: str
    case: str
    value: float
    tier: str
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class TheoremInfo:
    theorem_id: str
    tier: str
    kind: str  # incidence | exceptional | growth | spectral | counting | projection
    summary: str
    evaluate: Callable[[Instance], tuple[str, float, tuple[str, ...]]] = field(repr=False)


REGISTRY: dict[str, TheoremInfo] = {}


def _register(theorem_id: str, tier: str, kind: str, summary: str):
    def deco(fn):
        REGISTRY[theorem_id] = TheoremInfo(theorem_id, tier, kind, summary, fn)
        return fn

    return deco


def evaluate(theorem_id: str, inst: Instance) -> Bound:
    try:
        info = REGISTRY[theorem_id]
    except KeyError:
        raise KeyError(f"unknown theorem id {theorem_id!r}") from None
    case, value, flags = info.evaluate(inst)
    return Bound(theorem_id, case, float(value), info.tier, tuple(flags))


# -- shared predicates ------------------------------------------------------------------------


def order_below(q: int, d: int) -> int:
    """|O(d-1, q)|, with the convention |O(0)| = 1."""
    return orthogonal_group_order(q, d - 1) if d > 1 else 1


def restriction_friendly(d: int, q: int) -> bool:
    """d >= 3 odd, or d = 2 mod 4 with q = 3 mod 4."""
    return (d >= 3 and d % 2 == 1) or (d % 4 == 2 and q % 4 == 3)


def _restricted_flags(d: int, q: int) -> tuple[str, ...]:
    return () if restriction_friendly(d, q) else ("EXPLORATORY",)


def _require_plane_3mod4(inst: Instance) -> None:
    if inst.d != 2 or inst.q % 4 != 3:
        raise NotApplicable("needs d = 2 and q = 3 mod 4")


def _require_prime_plane(inst: Instance) -> None:
    if inst.d != 2 or inst.ell != 1 or inst.p % 4 != 3:
        raise NotApplicable("needs d = 2 over a prime field with p = 3 mod 4")


def _ordered(inst: Instance) -> tuple[int, int]:
    a, b = inst.need("A", "B")
    if a > b:
        raise NotApplicable("needs |A| <= |B|")
    return a, b


def _between(x: float, lo: float, hi: float) -> bool:
    return lo <= x <= hi


# -- incidences between point pairs and rigid motions ---------------------------------------


@_register("incidence_universal", ESTIMATED, "incidence", "|I - |P||R|/q^d| vs q^((d^2-d+2)/4) sqrt(|P||R|)")
def _incidence_universal(inst: Instance):
    P, R = inst.need("P", "R")
    q, d = inst.q, inst.d
    return "all", q ** ((d * d - d + 2) / 4) * math.sqrt(P * R), ()


@_register("incidence_product_restricted", ESTIMATED, "incidence", "product sets, restriction-friendly (d, q)")
def _incidence_product_restricted(inst: Instance):
    a, b = inst.need("A", "B")
    P, R = a * b, inst.need("R")[0]
    q, d = inst.q, inst.d
    flags = _restricted_flags(d, q)
    if a < q ** ((d - 1) / 2):
        return "small_A", q ** ((d * d - d) / 4) * math.sqrt(P * R), flags
    if a <= q ** ((d + 1) / 2):
        return "medium_A", q ** ((d * d - 2 * d + 1) / 4) * math.sqrt(P * R * a), flags
    raise NotApplicable("|A| above q^((d+1)/2)")


@_register("incidence_plane", ESTIMATED, "incidence", "d = 2, q = 3 mod 4, product sets")
def _incidence_plane(inst: Instance):
    _require_plane_3mod4(inst)
    a, b, R = inst.need("A", "B", "R")
    q = inst.q
    return "all", math.sqrt(q * a * b * R) * min(a, b) ** 0.25, ()


@_register("incidence_prime_small_a", ESTIMATED, "incidence", "prime plane, |A| <= p and |B| <= p^(4/3)")
def _incidence_prime_small_a(inst: Instance):
    _require_prime_plane(inst)
    a, b = _ordered(inst)
    (R,) = inst.need("R")
    p, P = inst.p, a * b
    if _between(a, p**0.75, p) and _between(b, p**1.25, p ** (4 / 3)):
        return "1", p ** (1 / 16) * P**0.75 * R**0.5 * a ** (1 / 12), ()
    if a <= p and _between(b, p, p**1.25):
        return "2", p**3 * math.sqrt(P * R) * math.sqrt(p**-5 + P ** (1 / 3) * a ** (1 / 3) / p ** (17 / 3)), ()
    if a <= p and b <= p:
        return "3", p**3 * math.sqrt(P * R) * math.sqrt(p**-5 + P ** (2 / 3) / p**6), ()
    raise NotApplicable("sizes outside the small-A ranges")


@_register("incidence_prime_medium_a", ESTIMATED, "incidence", "prime plane, |A| >= p and |B| <= p^(4/3)")
def _incidence_prime_medium_a(inst: Instance):
    _require_prime_plane(inst)
    a, b = _ordered(inst)
    (R,) = inst.need("R")
    p, P = inst.p, a * b
    if _between(a, p, p**1.25) and _between(b, p, p**1.25):
        return "1", p ** (1 / 3) * P ** (2 / 3) * R**0.5, ()
    if _between(a, p, p**1.25) and _between(b, p**1.25, p ** (4 / 3)):
        return "2", p ** (11 / 48) * P ** (2 / 3) * R**0.5 * b ** (1 / 12), ()
    if _between(a, p**1.25, p ** (4 / 3)) and _between(b, p**1.25, p ** (4 / 3)):
        return "3", p ** (1 / 8) * P**0.75 * R**0.5, ()
    raise NotApplicable("sizes outside the medium-A ranges")


@_register("incidence_prime_large_b", ESTIMATED, "incidence", "prime plane, |B| > p^(4/3)")
def _incidence_prime_large_b(inst: Instance):
    _require_prime_plane(inst)
    a, b = _ordered(inst)
    (R,) = inst.need("R")
    p, P = inst.p, a * b
    if b <= p ** (4 / 3):
        raise NotApplicable("needs |B| > p^(4/3)")
    if _between(a, p, p**1.25):
        return "1", p ** (5 / 12) * P ** (5 / 8) * R**0.5 * a ** (1 / 24), ()
    if _between(a, p**1.25, p ** (4 / 3)):
        return "2", p ** (5 / 16) * P ** (5 / 8) * R**0.5 * a ** (1 / 8), ()
    raise NotApplicable("|A| outside [p, p^(4/3)]")


@_register("incidence_cauchy_schwarz", ESTIMATED, "incidence", "I <= |R|^(1/2)|O(d-1)|^(1/2)(|P|^2/q + q^d|P|)^(1/2) + |R|")
def _incidence_cauchy_schwarz(inst: Instance):
    P, R = inst.need("P", "R")
    q, d = inst.q, inst.d
    return "upper", math.sqrt(R * order_below(q, d) * (P * P / q + q**d * P)) + R, ()


@_register("incidence_trivial", ESTIMATED, "incidence", "I <= |P||R|^(1/2)|O(d-1)|^(1/2) + |R|")
def _incidence_trivial(inst: Instance):
    P, R = inst.need("P", "R")
    return "upper", P * math.sqrt(R * order_below(inst.q, inst.d)) + R, ()


@_register("incidence_prime_tiny", ESTIMATED, "incidence", "prime plane, |A|, |B| <= p: I <= |P|^(5/6)|R|^(1/2) + |R|")
def _incidence_prime_tiny(inst: Instance):
    _require_prime_plane(inst)
    a, b, R = inst.need("A", "B", "R")
    if max(a, b) > inst.p:
        raise NotApplicable("needs |A|, |B| <= p")
    return "upper", (a * b) ** (5 / 6) * math.sqrt(R) + R, ()


# -- exceptional sets for intersection patterns ---------------------------------------------


@_register("exceptional_intersection", ESTIMATED, "exceptional", "|E| vs |O(d-1)| q^(2d) / (|A||B|)")
def _exceptional_intersection(inst: Instance):
    a, b = inst.need("A", "B")
    q, d = inst.q, inst.d
    flags = ("VALIDITY_RANGE",) if a * b < q ** (d + 1) else ()
    return "all", order_below(q, d) * q ** (2 * d) / (a * b), flags


@_register("exceptional_intersection_restricted", ESTIMATED, "exceptional", "restriction-friendly (d, q), small or medium A")
def _exceptional_intersection_restricted(inst: Instance):
    a, b = inst.need("A", "B")
    q, d = inst.q, inst.d
    flags = _restricted_flags(d, q)
    if a < q ** ((d - 1) / 2):
        return "small_A", q ** ((d * d + d) / 2) / (a * b), flags
    if a <= q ** ((d + 1) / 2):
        return "medium_A", q ** ((d * d + 1) / 2) / b, flags
    raise NotApplicable("|A| above q^((d+1)/2)")


@_register("exceptional_intersection_plane", ESTIMATED, "exceptional", "d = 2, q = 3 mod 4: q^3 / (min^(1/2) max)")
def _exceptional_intersection_plane(inst: Instance):
    _require_plane_3mod4(inst)
    a, b = inst.need("A", "B")
    return "all", inst.q**3 / (min(a, b) ** 0.5 * max(a, b)), ()


@_register("exceptional_intersection_prime_medium", ESTIMATED, "exceptional", "prime plane, medium A")
def _exceptional_intersection_prime_medium(inst: Instance):
    _require_prime_plane(inst)
    a, b = _ordered(inst)
    p = inst.p
    if not _between(b, p**1.25, p ** (4 / 3)):
        raise NotApplicable("needs p^(5/4) <= |B| <= p^(4/3)")
    if _between(a, p, p**1.25):
        return "1", p ** (59 / 24) / (a ** (2 / 3) * b**0.5), ()
    if _between(a, p**1.25, p ** (4 / 3)):
        return "2", p ** (9 / 4) / (a * b) ** 0.5, ()
    raise NotApplicable("|A| outside [p, p^(4/3)]")


@_register("exceptional_intersection_prime_large_b", ESTIMATED, "exceptional", "prime plane, |B| > p^(4/3)")
def _exceptional_intersection_prime_large_b(inst: Instance):
    _require_prime_plane(inst)
    a, b = _ordered(inst)
    p = inst.p
    if b <= p ** (4 / 3):
        raise NotApplicable("needs |B| > p^(4/3)")
    if _between(a, p, p**1.25):
        return "1", p ** (17 / 6) / (a ** (2 / 3) * b**0.75), ()
    if _between(a, p**1.25, p ** (4 / 3)):
        return "2", p ** (21 / 8) / (a**0.5 * b**0.75), ()
    raise NotApplicable("|A| outside [p, p^(4/3)]")


@_register("exceptional_image", ESTIMATED, "exceptional", "|E| vs q^(2d) |O(d-1)| / |P| for |S_g(P)| < q^d / 2")
def _exceptional_image(inst: Instance):
    (P,) = inst.need("P")
    q, d = inst.q, inst.d
    return "all", q ** (2 * d) * order_below(q, d) / P, ()


# -- growth of A - gB ---------------------------------------------------------------------------


def _growth_common(inst: Instance) -> tuple[int, int, float, tuple[str, ...]]:
    a, b, eps = inst.need("A", "B", "eps")
    flags = ()
    if not (a <= b and b ** (1 + eps) < inst.q**inst.d / 2):
        flags = ("VALIDITY_RANGE",)
    return a, b, eps, flags


@_register("growth_general", ESTIMATED, "growth", "|E| vs |O(d-1)| q^d |B|^eps / |A|")
def _growth_general(inst: Instance):
    a, b, eps, flags = _growth_common(inst)
    q, d = inst.q, inst.d
    return "all", order_below(q, d) * q**d * b**eps / a, flags


@_register("growth_restricted", ESTIMATED, "growth", "restriction-friendly (d, q), small or medium A")
def _growth_restricted(inst: Instance):
    a, b, eps, flags = _growth_common(inst)
    q, d = inst.q, inst.d
    flags = flags + _restricted_flags(d, q)
    if a < q ** ((d - 1) / 2):
        return "small_A", q ** ((d * d - d) / 2) * b**eps / a, flags
    if a <= q ** ((d + 1) / 2):
        return "medium_A", q ** ((d * d - 2 * d + 1) / 2) * b**eps, flags
    raise NotApplicable("|A| above q^((d+1)/2)")


@_register("growth_plane", ESTIMATED, "growth", "d = 2, q = 3 mod 4: q |B|^eps / |A|^(1/2)")
def _growth_plane(inst: Instance):
    _require_plane_3mod4(inst)
    a, b, eps, flags = _growth_common(inst)
    return "all", inst.q * b**eps / a**0.5, flags


@_register("growth_prime_small_a", ESTIMATED, "growth", "prime plane, small A")
def _growth_prime_small_a(inst: Instance):
    _require_prime_plane(inst)
    a, b, eps, flags = _growth_common(inst)
    p, P = inst.p, a * b
    if _between(a, p**0.75, p) and _between(b, p**1.25, p ** (4 / 3)):
        return "1", p ** (1 / 8) * b ** (0.5 + eps) / a ** (1 / 3), flags
    if a <= p and _between(b, p, p**1.25):
        return "2", (p * b**eps + p ** (1 / 3) * b**eps * P ** (1 / 3) * a ** (1 / 3)) / a, flags
    if a <= p and b <= p:
        return "3", b**eps * P ** (2 / 3) / a, flags
    raise NotApplicable("sizes outside the small-A ranges")


@_register("growth_prime_medium_a", ESTIMATED, "growth", "prime plane, medium A")
def _growth_prime_medium_a(inst: Instance):
    _require_prime_plane(inst)
    a, b, eps, flags = _growth_common(inst)
    p = inst.p
    if _between(a, p, p**1.25) and _between(b, p, p**1.25):
        return "1", p ** (2 / 3) * b ** (1 / 3 + eps) / a ** (2 / 3), flags
    if _between(a, p, p**1.25) and _between(b, p**1.25, p ** (4 / 3)):
        return "2", p ** (11 / 24) * b ** (0.5 + eps) / a ** (2 / 3), flags
    if _between(a, p**1.25, p ** (4 / 3)) and _between(b, p**1.25, p ** (4 / 3)):
        return "3", p**0.25 * b ** (0.5 + eps) / a**0.5, flags
    raise NotApplicable("sizes outside the medium-A ranges")


@_register("growth_prime_large_b", ESTIMATED, "growth", "prime plane, |B| > p^(4/3)")
def _growth_prime_large_b(inst: Instance):
    _require_prime_plane(inst)
    a, b, eps, flags = _growth_common(inst)
    p = inst.p
    if b <= p ** (4 / 3):
        raise NotApplicable("needs |B| > p^(4/3)")
    if _between(a, p, p**1.25):
        return "1", p ** (5 / 6) * b ** (0.25 + eps) / a ** (2 / 3), flags
    if _between(a, p**1.25, p ** (4 / 3)):
        return "2", p ** (5 / 8) * b ** (0.25 + eps) / a**0.5, flags
    raise NotApplicable("|A| outside [p, p^(4/3)]")


# -- spectral sums and distance counts -----------------------------------------------------------


@_register("spectral_plancherel", EXACT, "spectral", "sum_{||m||=||m'||} |A^|^2|B^|^2 <= |A||B| / q^(2d)")
def _spectral_plancherel(inst: Instance):
    a, b = inst.need("A", "B")
    return "all", a * b / inst.q ** (2 * inst.d), ()


@_register("spectral_restricted", ESTIMATED, "spectral", "equal-norm sum, restriction-friendly (d, q)")
def _spectral_restricted(inst: Instance):
    a, b = inst.need("A", "B")
    q, d = inst.q, inst.d
    flags = _restricted_flags(d, q)
    if a <= q ** ((d - 1) / 2):
        return "small_A", a * b / q ** (2 * d + 1), flags
    if a <= q ** ((d + 1) / 2):
        return "medium_A", a * a * b / q ** ((5 * d + 1) / 2), flags
    raise NotApplicable("|A| above q^((d+1)/2)")


@_register("spectral_plane", ESTIMATED, "spectral", "d = 2, q = 3 mod 4: sum without (0,0) vs |A||B| min^(1/2) / q^5")
def _spectral_plane(inst: Instance):
    _require_plane_3mod4(inst)
    a, b = inst.need("A", "B")
    return "all", a * b * min(a, b) ** 0.5 / inst.q**5, ()


@_register("sphere_restriction", ESTIMATED, "spectral", "largest sphere mass of A^ (M* for even d, M for odd d)")
def _sphere_restriction(inst: Instance):
    (a,) = inst.need("A")
    q, d = inst.q, inst.d
    if d == 2:
        return "plane", q**-3 * a**1.5, ()
    env = min(a / q**d, a / q ** (d + 1) + a * a / q ** ((3 * d + 1) / 2))
    return ("even" if d % 2 == 0 else "odd"), env, ()


@_register("zero_sphere", ESTIMATED, "spectral", "mass of A^ on S_0 for d = 2 mod 4, q = 3 mod 4")
def _zero_sphere(inst: Instance):
    (a,) = inst.need("A")
    q, d = inst.q, inst.d
    if d % 4 != 2 or q % 4 != 3:
        raise NotApplicable("needs d = 2 mod 4 and q = 3 mod 4")
    return "all", a / q ** (d + 1) + a * a / q ** ((3 * d + 2) / 2), ()


@_register("quadruple", ESTIMATED, "counting", "|N(P) - |P|^2/q| vs q^d |P|")
def _quadruple(inst: Instance):
    (P,) = inst.need("P")
    return "all", inst.q**inst.d * P, ()


@_register("spectral_general", ESTIMATED, "spectral", "q^(3d-1)(q-1) sum_{(m,m') != 0, ||m||=||m'||} |P^|^2 vs q^d |P|")
def _spectral_general(inst: Instance):
    (P,) = inst.need("P")
    return "all", inst.q**inst.d * P, ()


@_register("isosceles_prime", ESTIMATED, "counting", "prime plane: N(A x A) - |A|^4/p vs min(p^(2/3)|A|^(8/3) + p^(1/4)|A|^3, |A|^(10/3))")
def _isosceles_prime(inst: Instance):
    _require_prime_plane(inst)
    (a,) = inst.need("A")
    p = inst.p
    flags = ("VALIDITY_RANGE",) if a > p ** (4 / 3) else ()
    return "all", min(p ** (2 / 3) * a ** (8 / 3) + p**0.25 * a**3, a ** (10 / 3)), flags


def _iaa(a: int, p: int) -> float:
    return (p * a * a + a ** (10 / 3)) ** 0.5


@_register("spectral_prime", ESTIMATED, "spectral", "prime plane: p^6 sum_{||m||=||m'||} |A^|^2|B^|^2 by size range")
def _spectral_prime(inst: Instance):
    _require_prime_plane(inst)
    a, b = _ordered(inst)
    p = inst.p
    lo, mid, hi = p, p**1.25, p ** (4 / 3)
    if a <= lo:
        if _between(b, mid, hi):
            return "1", p**0.125 * _iaa(a, p) * b**1.5, ()
        if _between(b, lo, mid):
            return "2", _iaa(a, p) * p ** (1 / 3) * b ** (4 / 3), ()
        if b <= lo:
            return "3", _iaa(a, p) * _iaa(b, p), ()
        return "7", p**0.5 * _iaa(a, p) * b**1.25, ()
    if a <= mid:
        if b <= mid:
            return "4", p ** (2 / 3) * (a * b) ** (4 / 3), ()
        if b <= hi:
            return "5", p ** (11 / 24) * a ** (4 / 3) * b**1.5, ()
        return "8", p ** (5 / 6) * a ** (4 / 3) * b**1.25, ()
    if a <= hi:
        if b <= hi:
            return "6", p**0.25 * (a * b) ** 1.5, ()
        return "9", p**0.625 * a**1.5 * b**1.25, ()
    raise NotApplicable("|A| above p^(4/3)")


# -- projections and flats -----------------------------------------------------------------------


@_register("projection_count", EXACT, "projection", "#{W : |pi_W(E)| <= N} <= 4 q^((d-m)m-m) N for N < |E|/2")
def _projection_count(inst: Instance):
    m, N, E = inst.need("m", "N", "E")
    if not N < E / 2:
        raise NotApplicable("needs N < |E|/2")
    return "all", 4 * inst.q ** ((inst.d - m) * m - m) * N, ()


@_register("projection_density", ESTIMATED, "projection", "#{W : |pi_W(E)| <= delta q^m} <= 2 delta/(1-delta) q^(m(d-m)+m) / |E|")
def _projection_density(inst: Instance):
    m, delta, E = inst.need("m", "delta", "E")
    if not 0 < delta < 1:
        raise NotApplicable("needs 0 < delta < 1")
    return "all", 2 * delta / (1 - delta) * inst.q ** (m * (inst.d - m) + m) / E, ()


@_register("projection_size", ESTIMATED, "projection", "counts of W with small or non-full projections, by |E| = q^s")
def _projection_size(inst: Instance):
    m, E = inst.need("m", "E")
    q, d = inst.q, inst.d
    s = math.log(E, q)
    if s <= m:
        # threshold q^t / 10 with t = s
        return "small_E", 0.5 * q ** (m * (d - m - 1)) * E, ()
    if s > 2 * m:
        return "large_E", 4 * q ** ((d - m) * (m + 1)) / E, ()
    return "medium_E", 0.5 * q ** (m * (d - m + 1)) / E, ()


@_register("projection_intersection", ESTIMATED, "projection", "#{W : good common projection} vs q^(m(d-m)), a lower bound")
def _projection_intersection(inst: Instance):
    m, a, b = inst.need("m", "A", "B")
    q, d = inst.q, inst.d
    flags = ()
    if a > q ** (2 * m) and b > q ** (2 * m):
        case = "2"
    elif a > q**m and b > q**m:
        case = "1"
    elif 2 * m >= d and a > 100 * q**m and 2 * b < q**m and a * b > 160 * q ** (2 * m):
        case = "3"
    else:
        case, flags = "none", ("VALIDITY_RANGE",)
    return case, q ** (m * (d - m)), flags


def flats_constant(k: int) -> int:
    return (2 * k + 1) * math.comb(k, k // 2)


@_register("flats_incidence", ESTIMATED, "projection", "|I(K, H) - |K||H|/q^((d-h)(k+1))| vs sqrt(c_k) q^(...) sqrt(|K||H|)")
def _flats_incidence(inst: Instance):
    k, h, K, H = inst.need("k", "h", "K", "H")
    d = inst.d
    flags = () if h >= 2 * k + 1 else ("VALIDITY_RANGE",)
    expo = ((d - h) * h + k * (2 * h - d - k + 1)) / 2
    return "all", math.sqrt(flats_constant(k)) * inst.q**expo * math.sqrt(K * H), flags


def flats_main_term(q: int, d: int, k: int, h: int, K: int, H: int) -> float:
    return K * H / q ** ((d - h) * (k + 1))


def explicit_constant(theorem_id: str) -> bool:
    return REGISTRY[theorem_id].tier == EXACT
