from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffincidence import spectral as spec
from ffincidence.field_core import make_field
from ffincidence.vector_geometry import PointSet, space, sphere

GRID = [(3, 1, 2), (5, 1, 2), (3, 2, 2), (3, 1, 3)]


def test_transform_of_point_and_constant():
    sp = space(make_field(5), 2)
    delta = spec.dft(sp, PointSet.from_indices(sp, [0]))
    assert np.allclose(delta.coeffs, 1 / sp.size)
    one = spec.dft(sp, PointSet.full(sp))
    assert np.allclose(one.coeffs, np.eye(1, sp.size)[0])


@pytest.mark.parametrize("p,ell,d", GRID)
def test_fft_matches_naive_transform(p, ell, d, rng):
    sp = space(make_field(p, ell), d)
    A = PointSet.random(sp, 0.4, rng)
    ms = rng.integers(0, sp.size, 10)
    assert np.allclose(spec.dft(sp, A).coeffs[ms], spec.naive_dft(sp, A, ms), atol=1e-12)


@given(st.sampled_from(GRID), st.integers(0, 2**32 - 1))
def test_plancherel_and_inversion(grid, seed):
    rng = np.random.default_rng(seed)
    sp = space(make_field(grid[0], grid[1]), grid[2])
    A = PointSet.random(sp, rng.uniform(0, 1), rng)
    sA = spec.dft(sp, A)
    assert abs(sA.power().sum() - A.card / sp.size) < 1e-9
    assert np.allclose(sA.inverse(), A.indicator(), atol=1e-9)


def test_sphere_closed_form_examples():
    sp = space(make_field(3), 2)
    S1 = spec.dft(sp, sphere(sp, 1))
    m = int(sp.encode([1, 0]))
    assert abs(spec.sphere_fourier_closed(sp, 1, m) - S1[m]) < 1e-12
    sp3 = space(make_field(5), 3)
    m = int(sp3.encode([1, 1, 1]))
    assert abs(spec.sphere_fourier_closed(sp3, 0, m) - spec.naive_dft(sp3, sphere(sp3, 0), [m])[0]) < 1e-8
    for j in range(3):
        assert abs(spec.sphere_fourier_closed(sp, j, 0) - sphere(sp, j).card / sp.size) < 1e-12


@pytest.mark.parametrize("p,ell,d", [(3, 1, 2), (7, 1, 2), (3, 2, 2), (3, 1, 3), (5, 1, 3)])
def test_sphere_closed_form_everywhere(p, ell, d):
    sp = space(make_field(p, ell), d)
    idx = np.arange(sp.size)
    for j in range(sp.q):
        direct = spec.dft(sp, sphere(sp, j)).coeffs
        assert np.max(np.abs(direct - spec.sphere_fourier_closed(sp, j, idx))) < 1e-8


def test_sphere_pair_sum_examples():
    sp = space(make_field(7), 2)
    q, d = 7, 2
    assert spec.sphere_pair_sum_closed(sp, 0, 0) == pytest.approx(1 / q + (q - 1) / q ** (d + 1))
    a, b = int(sp.encode([1, 0])), int(sp.encode([0, 1]))
    assert abs(spec.sphere_pair_sum_direct(sp, a, b) - spec.sphere_pair_sum_closed(sp, a, b)) < 1e-8
    c = int(sp.encode([1, 1]))  # norm 2 differs from norm 1
    assert spec.sphere_pair_sum_closed(sp, a, c) == pytest.approx(-(q ** (-d - 1)))
    assert abs(spec.sphere_pair_sum_direct(sp, a, c) - spec.sphere_pair_sum_closed(sp, a, c)) < 1e-8


def test_variety_spot_values():
    sp = space(make_field(3), 1)
    V = spec.variety_indicator(sp)
    assert V.card == 5  # x^2 = y^2 over F_3
    assert Fraction(spec.variety_fourier(sp, 0, 0)).limit_denominator(1000) == Fraction(5, 9)
    assert abs(spec.dft(V.space, V)[0] - 5 / 9) < 1e-12
    assert spec.variety_fourier(sp, 1, 0) == pytest.approx(-1 / 9)
    sp5 = space(make_field(5), 2)
    m, m2 = int(sp5.encode([1, 0])), int(sp5.encode([0, 1]))
    assert spec.variety_fourier(sp5, m, m2) == pytest.approx(4 / 125)
    V5 = spec.variety_indicator(sp5)
    assert spec.dft(V5.space, V5)[m + sp5.size * m2] == pytest.approx(4 / 125)


@pytest.mark.parametrize("p,d", [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2)])
def test_variety_closed_form_matches_dft(p, d):
    sp = space(make_field(p), d)
    V = spec.variety_indicator(sp)
    idx = np.arange(V.space.size)
    closed = spec.variety_fourier(sp, idx % sp.size, idx // sp.size)
    assert np.max(np.abs(spec.dft(V.space, V).coeffs - closed)) < 1e-8


def test_equal_norm_sum_examples():
    sp = space(make_field(5), 2)
    full = PointSet.full(sp)
    assert spec.spectral_sum_equal_norms(full, full) == pytest.approx(1.0)
    pt = PointSet.from_indices(sp, [7])
    sizes = np.array([sphere(sp, j).card for j in range(sp.q)])
    assert spec.spectral_sum_equal_norms(pt, pt) == pytest.approx(float(np.sum(sizes**2)) / sp.size**4)


@given(st.integers(0, 2**32 - 1))
def test_equal_norm_sum_bounded_by_sizes(seed):
    rng = np.random.default_rng(seed)
    sp = space(make_field(7), 2)
    A, B = PointSet.random(sp, rng.uniform(), rng), PointSet.random(sp, rng.uniform(), rng)
    total = spec.spectral_sum_equal_norms(A, B) + spec.spectral_sum_unequal_norms(A, B)
    assert total == pytest.approx(A.card * B.card / sp.size**2, abs=1e-12)
    assert spec.spectral_sum_equal_norms(A, B) <= A.card * B.card / sp.size**2 + 1e-12


def test_equal_norm_variants(rng):
    sp = space(make_field(5), 2)
    A, B = PointSet.random(sp, 0.3, rng), PointSet.random(sp, 0.3, rng)
    sA, sB = spec.dft(sp, A), spec.dft(sp, B)
    full = spec.spectral_sum_equal_norms(sA, sB)
    pair = spec.spectral_sum_equal_norms(sA, sB, "exclude_zero_pair")
    each = spec.spectral_sum_equal_norms(sA, sB, "exclude_zero_each")
    assert full - pair == pytest.approx(sA.power()[0] * sB.power()[0])
    assert each <= pair + 1e-15
    with pytest.raises(ValueError):
        spec.spectral_sum_equal_norms(sA, sB, "nope")


def test_restriction_maxima_examples():
    sp = space(make_field(7), 2)
    m_star, _ = spec.restriction_maxima(PointSet.full(sp))
    assert m_star == pytest.approx(0.0, abs=1e-20)
    T = spec.dft(sp, PointSet.from_indices(sp, [3])).norm_class_sums()
    sizes = np.array([sphere(sp, j).card for j in range(sp.q)])
    assert np.allclose(T, sizes / sp.size**2)


def test_pair_spectrum_sums_partition(rng):
    from ffincidence.vector_geometry import PairSet

    sp = space(make_field(3), 2)
    P = PairSet.random_pairs(sp, 0.2, rng)
    eq, eq_star, neq = spec.pair_spectrum_norm_sums(P)
    assert eq + neq == pytest.approx(P.card / P.space.size)
    assert eq - eq_star == pytest.approx((P.card / P.space.size) ** 2)
