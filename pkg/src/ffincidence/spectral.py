"""Fourier analysis on F_q^n and the closed-form spectra of spheres and of V.

Normalization: ``f^(m) = q^-n * sum_x chi(-m.x) f(x)`` and
``f(x) = sum_m chi(m.x) f^(m)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ResourceError
from .field_core import FieldContext, gauss_sum_closed_form
from .vector_geometry import PairSet, PointSet, Space, space

DFT_BUDGET = 2_000_000_000  # character multiply-adds


def _kernel(ctx: FieldContext, sign: int) -> np.ndarray:
    """K[m, x] = chi(sign * m x)."""
    e = np.arange(ctx.q)
    prod = ctx.mul_table[e[:, None], e[None, :]]
    if sign < 0:
        prod = ctx.neg_table[prod]
    return ctx.chi_table[prod]


def _transform(sp: Space, values: np.ndarray, sign: int) -> np.ndarray:
    cost = sp.d * sp.q ** (sp.d + 1)
    if cost > DFT_BUDGET:
        raise ResourceError(f"transform on F_{sp.q}^{sp.d} needs {cost:.2e} ops (budget {DFT_BUDGET:.1e})")
    K = _kernel(sp.ctx, sign)
    arr = np.asarray(values, dtype=np.complex128).reshape((sp.q,) * sp.d, order="F")
    for axis in range(sp.d):
        arr = np.moveaxis(np.tensordot(K, arr, axes=([1], [axis])), 0, axis)
    return arr.reshape(-1, order="F")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients of a function on F_q^n, indexed like the space."""

    space: Space
    coeffs: np.ndarray

    @property
    def n(self) -> int:
        return self.space.d

    def power(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def __getitem__(self, m) -> complex:
        if not isinstance(m, (int, np.integer)):
            m = int(self.space.encode(m))
        return complex(self.coeffs[m])

    def norm_class_sums(self, exclude_zero: bool = False) -> np.ndarray:
        """T(j) = sum over m in S_j of |f^(m)|^2, for every j in F_q."""
        w = self.power()
        if exclude_zero:
            w = w.copy()
            w[0] = 0.0
        return np.bincount(self.space.norms, weights=w, minlength=self.space.q)

    def inverse(self) -> np.ndarray:
        return _transform(self.space, self.coeffs, +1)


def dft(sp: Space, f) -> Spectrum:
    """Transform of f (array over the q^n indices, or a PointSet)."""
    if isinstance(f, PointSet):
        f = f.indicator()
    f = np.asarray(f)
    if f.shape != (sp.size,):
        raise ValueError(f"function must have {sp.size} values")
    return Spectrum(sp, _transform(sp, f, -1) / sp.size)


def naive_dft(sp: Space, f, ms) -> np.ndarray:
    """Direct O(q^n) evaluation of f^ at each index in ``ms`` (test oracle)."""
    if isinstance(f, PointSet):
        f = f.indicator()
    f = np.asarray(f)
    xs = np.arange(sp.size)
    out = np.empty(len(ms), dtype=np.complex128)
    for k, m in enumerate(ms):
        phase = sp.ctx.chi_table[sp.ctx.neg_table[sp.dot(np.full(sp.size, m), xs)]]
        out[k] = np.sum(phase * f) / sp.size
    return out


# -- spheres --------------------------------------------------------------------


def sphere_fourier_closed(sp: Space, j: int, m) -> np.ndarray | complex:
    """Closed-form S_j^(m), vectorized over the index array ``m``.

    q^-1 delta_0(m) + q^(-d-1) eta^d(-1) G_1^d sum_{r != 0} eta^d(r) chi(j r + ||m|| / (4 r))
    """
    ctx, d, q = sp.ctx, sp.d, sp.q
    scalar = np.ndim(m) == 0
    m = np.atleast_1d(np.asarray(m, dtype=np.int64))
    r = np.arange(1, q)
    inv4r = ctx.inv_table[ctx.mul_table[ctx.from_int(4), r]]
    nm = sp.norms[m]
    arg = ctx.add_table[ctx.mul_table[j, r][None, :], ctx.mul_table[nm[:, None], inv4r[None, :]]]
    eta_d = ctx.eta_table[r].astype(float) ** d
    inner = (ctx.chi_table[arg] * eta_d[None, :]).sum(axis=1)
    pref = float(ctx.eta_table[ctx.neg_table[1]]) ** d * gauss_sum_closed_form(ctx) ** d / q ** (d + 1)
    out = pref * inner + (m == 0) / q
    return complex(out[0]) if scalar else out


def sphere_spectra(sp: Space) -> np.ndarray:
    """Array of shape (q, q^d): row j is the DFT of S_j."""
    return np.stack([dft(sp, (sp.norms == j).astype(float)).coeffs for j in range(sp.q)])


def sphere_pair_sum_direct(sp: Space, m: int, m2: int, spectra: np.ndarray | None = None) -> complex:
    """sum_j S_j^(m) conj(S_j^(m2)) from the DFTs of all spheres."""
    if spectra is None:
        spectra = sphere_spectra(sp)
    return complex(np.sum(spectra[:, m] * np.conj(spectra[:, m2])))


def sphere_pair_sum_closed(sp: Space, m: int, m2: int) -> float:
    """delta_0(m) delta_0(m2) / q + q^(-d-1) sum_{s != 0} chi(s(||m|| - ||m2||))."""
    q, d = sp.q, sp.d
    same = sp.norms[m] == sp.norms[m2]
    tail = (q - 1) if same else -1
    return (1.0 / q if (m == 0 and m2 == 0) else 0.0) + tail / q ** (d + 1)


# -- the variety ||x|| = ||y|| in F_q^{2d} --------------------------------------------


def variety_indicator(sp: Space) -> PairSet:
    """V = {(x, y) : ||x|| = ||y||} as a PairSet over sp."""
    bits = (sp.norms[None, :] == sp.norms[:, None]).reshape(-1)  # row y, column x
    return PairSet(space(sp.ctx, 2 * sp.d), bits)


def variety_fourier(sp: Space, m, m2) -> np.ndarray | float:
    """Three-case closed form of V^(m, m2); vectorized over index arrays."""
    q, d = sp.q, sp.d
    m = np.asarray(m)
    m2 = np.asarray(m2)
    zero = (m == 0) & (m2 == 0)
    same = sp.norms[m] == sp.norms[m2]
    mid = q**d * (q - 1) / q ** (2 * d + 1)
    out = np.where(zero, 1.0 / q + mid, np.where(same, mid, -1.0 / q ** (d + 1)))
    return float(out) if out.ndim == 0 else out


# -- spectral sums ------------------------------------------------------------------------

Variant = Literal["all", "exclude_zero_pair", "exclude_zero_each"]


def spectral_sum_equal_norms(A: PointSet | Spectrum, B: PointSet | Spectrum, variant: Variant = "all") -> float:
    """sum over ||m|| = ||m'|| of |A^(m)|^2 |B^(m')|^2 via per-radius aggregates."""
    sA = A if isinstance(A, Spectrum) else dft(A.space, A)
    sB = B if isinstance(B, Spectrum) else dft(B.space, B)
    if variant == "exclude_zero_each":
        return float(np.dot(sA.norm_class_sums(True), sB.norm_class_sums(True)))
    total = float(np.dot(sA.norm_class_sums(), sB.norm_class_sums()))
    if variant == "exclude_zero_pair":
        total -= float(sA.power()[0] * sB.power()[0])
    elif variant != "all":
        raise ValueError(f"unknown variant {variant!r}")
    return total


def spectral_sum_unequal_norms(A: PointSet | Spectrum, B: PointSet | Spectrum) -> float:
    sA = A if isinstance(A, Spectrum) else dft(A.space, A)
    sB = B if isinstance(B, Spectrum) else dft(B.space, B)
    return float(sA.power().sum() * sB.power().sum()) - spectral_sum_equal_norms(sA, sB)


def pair_spectrum_norm_sums(P: PairSet | Spectrum) -> tuple[float, float, float]:
    """For P in F_q^{2d}: (sum_{||m||=||m'||}, same without (0,0), sum_{||m||!=||m'||}) of |P^|^2."""
    sP = P if isinstance(P, Spectrum) else dft(P.space, P)
    base = space(sP.space.ctx, sP.space.d // 2)
    w = sP.power().reshape(base.size, base.size)  # row m', column m
    same = base.norms[None, :] == base.norms[:, None]
    eq = float(w[same].sum())
    return eq, eq - float(w[0, 0]), float(w[~same].sum())


def restriction_maxima(A: PointSet | Spectrum) -> tuple[float, float]:
    """(M*(A), M(A)): the largest T(j) over j != 0 and over all j."""
    sA = A if isinstance(A, Spectrum) else dft(A.space, A)
    T = sA.norm_class_sums()
    return float(T[1:].max()), float(T.max())


def zero_sphere_mass(A: PointSet | Spectrum) -> float:
    sA = A if isinstance(A, Spectrum) else dft(A.space, A)
    return float(sA.norm_class_sums()[0])
