"""Arithmetic in F_q for q = p or p^2 (p odd), plus characters and Gauss sums.

Elements are integer indices in ``[0, q)``.  For ``ell == 2`` the index
``a0 + a1 * p`` stands for ``a0 + a1 * t`` where ``t^2 = n`` and ``n`` is the
smallest quadratic non-residue mod p.  All arithmetic goes through small
lookup tables, so every operation accepts numpy integer arrays as well as
plain ints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, InvalidField, Unsupported


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def smallest_nonresidue(p: int) -> int:
    squares = {(x * x) % p for x in range(1, p)}
    for n in range(2, p):
        if n not in squares:
            return n
    raise InvalidField(f"no quadratic non-residue mod {p}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FieldContext:
    """The finite field F_q with q = p**ell.

    Immutable; the lookup tables are read-only numpy arrays, so a context can
    be shared freely.
    """

    p: int
    ell: int
    q: int
    nonresidue: int | None
    add_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)
    neg_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)
    trace_table: np.ndarray = field(repr=False)
    eta_table: np.ndarray = field(repr=False)
    chi_table: np.ndarray = field(repr=False)

    # -- element arithmetic (scalar or array) ---------------------------------
    def add(self, a, b):
        return self.add_table[a, b]

    def sub(self, a, b):
        return self.add_table[a, self.neg_table[b]]

    def mul(self, a, b):
        return self.mul_table[a, b]

    def neg(self, a):
        return self.neg_table[a]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise DomainError("zero has no inverse")
        return self.inv_table[a]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a: int, e: int) -> int:
        r, base = 1, int(a)
        while e:
            if e & 1:
                r = int(self.mul_table[r, base])
            base = int(self.mul_table[base, base])
            e >>= 1
        return r

    def frobenius(self, a):
        """a -> a^p."""
        a = np.asarray(a)
        out = np.ones_like(a)
        for _ in range(self.p):
            out = self.mul_table[out, a]
        return out

    def from_int(self, k: int) -> int:
        """Image of the integer k in the prime subfield."""
        return k % self.p

    def elements(self) -> np.ndarray:
        return np.arange(self.q)

    def digits(self, a) -> tuple:
        """(a0, a1) coordinates over F_p (a1 = 0 when ell = 1)."""
        a = np.asarray(a)
        return a % self.p, a // self.p

    def __repr__(self) -> str:
        if self.ell == 1:
            return f"FieldContext(F_{self.p})"
        return f"FieldContext(F_{self.q} = F_{self.p}[t]/(t^2 - {self.nonresidue}))"


def make_field(p: int, ell: int = 1) -> FieldContext:
    """Build F_{p^ell} for an odd prime p and ell in {1, 2}."""
    return _make_field(int(p), int(ell))


@lru_cache(maxsize=None)
def _make_field(p: int, ell: int) -> FieldContext:
    if not is_prime(p) or p == 2:
        raise InvalidField(f"p={p} must be an odd prime")
    if ell not in (1, 2):
        raise Unsupported(f"extension degree {ell} not supported (only 1 or 2)")
    q = p**ell
    idx = np.arange(q)
    a0, a1 = idx % p, idx // p
    if ell == 1:
        n = None
        add = (idx[:, None] + idx[None, :]) % p
        mul = (idx[:, None] * idx[None, :]) % p
    else:
        n = smallest_nonresidue(p)
        s0 = (a0[:, None] + a0[None, :]) % p
        s1 = (a1[:, None] + a1[None, :]) % p
        add = s0 + p * s1
        # (a0 + a1 t)(b0 + b1 t) = a0 b0 + n a1 b1 + (a0 b1 + a1 b0) t
        m0 = (a0[:, None] * a0[None, :] + n * a1[:, None] * a1[None, :]) % p
        m1 = (a0[:, None] * a1[None, :] + a1[:, None] * a0[None, :]) % p
        mul = m0 + p * m1
    add = add.astype(np.int64)
    mul = mul.astype(np.int64)
    neg = np.argmin(add, axis=1).astype(np.int64)  # add[a, neg[a]] == 0
    inv = np.zeros(q, dtype=np.int64)
    ones_r, ones_c = np.nonzero(mul == 1)
    inv[ones_r] = ones_c

    # a^p by repeated multiplication, then Tr(a) = a + a^p for ell = 2
    frob = np.ones(q, dtype=np.int64)
    for _ in range(p):
        frob = mul[frob, idx]
    trace = idx.copy() if ell == 1 else add[idx, frob]
    if np.any(trace >= p):
        raise AssertionError("trace left the prime field")

    # eta(a) = a^((q-1)/2) in {1, -1}, eta(0) = 0
    e = (q - 1) // 2
    pw = np.ones(q, dtype=np.int64)
    base = idx.copy()
    while e:
        if e & 1:
            pw = mul[pw, base]
        base = mul[base, base]
        e >>= 1
    eta = np.zeros(q, dtype=np.int64)
    eta[pw == 1] = 1
    eta[(pw != 1) & (idx != 0)] = -1

    chi = np.exp(2j * np.pi * trace / p)

    if ell == 2 and np.any(eta[1:p] != 1):
        # every element of F_p* is a square in F_{p^2}
        raise AssertionError("extension arithmetic inconsistent")

    return FieldContext(
        p=p,
        ell=ell,
        q=q,
        nonresidue=n,
        add_table=_frozen(add),
        mul_table=_frozen(mul),
        neg_table=_frozen(neg),
        inv_table=_frozen(inv),
        trace_table=_frozen(trace.astype(np.int64)),
        eta_table=_frozen(eta),
        chi_table=_frozen(chi),
    )


def trace(ctx: FieldContext, x):
    """Absolute trace F_q -> F_p."""
    return ctx.trace_table[x]


def add_char(ctx: FieldContext, x):
    """Canonical additive character chi(x) = exp(2 pi i Tr(x) / p)."""
    return ctx.chi_table[x]


def quad_char(ctx: FieldContext, x):
    """Quadratic character eta with eta(0) = 0."""
    return ctx.eta_table[x]


def gauss_sum(ctx: FieldContext, a: int) -> complex:
    """G_a = sum over t != 0 of eta(t) chi(a t), by direct summation."""
    if a == 0:
        raise DomainError("Gauss sum requires a != 0")
    t = np.arange(1, ctx.q)
    return complex(np.sum(ctx.eta_table[t] * ctx.chi_table[ctx.mul_table[a, t]]))


def gauss_sum_closed_form(ctx: FieldContext) -> complex:
    """Closed form of G_1 for the canonical character."""
    sign = (-1) ** (ctx.ell - 1)
    root = math.sqrt(ctx.q)
    if ctx.p % 4 == 1:
        return complex(sign * root)
    return complex(sign * (1j**ctx.ell) * root)


def complete_square_sum(ctx: FieldContext, s: int, beta) -> complex:
    """Direct evaluation of sum_alpha chi(s alpha.alpha + beta.alpha) over F_q^k."""
    beta = np.atleast_1d(np.asarray(beta, dtype=np.int64))
    k = beta.size
    q = ctx.q
    # per-coordinate factorization: the sum splits into a product of 1-D sums
    total = 1.0 + 0j
    alpha = np.arange(q)
    sq = ctx.mul_table[alpha, alpha]
    for i in range(k):
        arg = ctx.add_table[ctx.mul_table[s, sq], ctx.mul_table[beta[i], alpha]]
        total *= complex(np.sum(ctx.chi_table[arg]))
    return total


def complete_square_closed_form(ctx: FieldContext, s: int, beta) -> complex:
    """eta^k(s) G_1^k chi(||beta|| / (-4 s))."""
    if s == 0:
        raise DomainError("s must be nonzero")
    beta = np.atleast_1d(np.asarray(beta, dtype=np.int64))
    k = beta.size
    nb = 0
    for b in beta:
        nb = int(ctx.add_table[nb, ctx.mul_table[b, b]])
    four_s = ctx.mul(ctx.from_int(4), s)
    arg = ctx.div(nb, ctx.neg(four_s))
    g1 = gauss_sum_closed_form(ctx)
    return (int(ctx.eta_table[s]) ** k) * g1**k * complex(ctx.chi_table[arg])


__all__ = [
    "FieldContext",
    "make_field",
    "trace",
    "add_char",
    "quad_char",
    "gauss_sum",
    "gauss_sum_closed_form",
    "complete_square_sum",
    "complete_square_closed_form",
    "is_prime",
    "smallest_nonresidue",
]
