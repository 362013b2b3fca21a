import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffincidence.field_core import make_field
from ffincidence.projections import (
    Projector,
    projection_count_checks,
    enumerate_affine_flats,
    enumerate_grassmannian,
    enumerate_grassmannian_brute_force,
    flats_incidence_report,
    flats_incidences,
    flats_incidences_naive,
    gaussian_binomial,
    make_flat,
    orthogonal_complement,
    project,
    project_brute_force,
    projection_intersection_sweep,
    projection_sizes,
    rref,
    subspace_from_vectors,
)
from ffincidence.vector_geometry import PointSet, space


def test_rref_example():
    ctx = make_field(5)
    R, piv = rref(ctx, [[2, 4, 1], [1, 2, 4], [0, 0, 0]])
    assert piv == [0, 2]
    assert R.tolist() == [[1, 2, 0], [0, 0, 1]]


@pytest.mark.parametrize("p,d,m", [(3, 2, 1), (3, 3, 1), (3, 3, 2), (5, 2, 1), (5, 3, 1), (3, 4, 2)])
def test_grassmannian_size(p, d, m):
    ctx = make_field(p)
    subs = enumerate_grassmannian(ctx, d, m)
    assert len(subs) == gaussian_binomial(p, d, m)
    if p ** (d * m) <= 10**5:
        assert set(subs) == set(enumerate_grassmannian_brute_force(ctx, d, m))


def test_grassmannian_small_examples():
    assert len(enumerate_grassmannian(make_field(3), 2, 1)) == 4
    assert len(enumerate_grassmannian(make_field(3), 3, 1)) == 13
    top = enumerate_grassmannian(make_field(3), 3, 3)
    assert len(top) == 1 and top[0].m == 3


def test_complement_examples():
    ctx = make_field(5)
    e1 = subspace_from_vectors(ctx, [[1, 0]])
    assert orthogonal_complement(e1) == subspace_from_vectors(ctx, [[0, 1]])
    iso = subspace_from_vectors(ctx, [[1, 2]])
    assert orthogonal_complement(iso) == iso


@pytest.mark.parametrize("p,ell,d", [(3, 1, 3), (5, 1, 2), (3, 2, 2), (3, 1, 4)])
def test_double_complement(p, ell, d):
    ctx = make_field(p, ell)
    for m in range(1, d):
        for W in enumerate_grassmannian(ctx, d, m):
            perp = orthogonal_complement(W)
            assert W.m + perp.m == d
            assert orthogonal_complement(perp) == W


def test_projection_extremes():
    ctx = make_field(5)
    sp = space(ctx, 2)
    W = enumerate_grassmannian(ctx, 2, 1)[0]
    assert project(PointSet.full(sp), W).card == 5
    assert project(PointSet.from_indices(sp, [7]), W).card == 1


@given(st.integers(0, 2**32 - 1))
def test_projection_matches_coset_scan(seed):
    rng = np.random.default_rng(seed)
    ctx = make_field(5)
    sp = space(ctx, 3)
    E = PointSet.random(sp, rng.uniform(0, 0.2), rng)
    subs = enumerate_grassmannian(ctx, 3, 1)
    W = subs[int(rng.integers(len(subs)))]
    assert project(E, W).card == project_brute_force(E, W)


def test_full_sets_share_every_coset():
    ctx = make_field(3)
    sp = space(ctx, 3)
    full = PointSet.full(sp)
    sweep = projection_intersection_sweep(full, full, 1)
    assert all(r.common == 3 for r in sweep.rows)
    assert sweep.summary["full"] == 13


@pytest.mark.parametrize("p", [3, 5, 7])
def test_count_bound_with_constant_four(p, rng):
    ctx = make_field(p)
    sp = space(ctx, 2)
    subs = enumerate_grassmannian(ctx, 2, 1)
    for dens in (0.05, 0.2, 0.5):
        E = PointSet.random(sp, dens, rng)
        checks = projection_count_checks(E, 1, projection_sizes(E, subs))
        assert all(c.ok for c in checks)


def test_projection_csv_layout(rng):
    sp = space(make_field(3), 2)
    A, B = PointSet.random(sp, 0.5, rng), PointSet.random(sp, 0.5, rng)
    text = projection_intersection_sweep(A, B, 1).to_csv().splitlines()
    assert text[0] == "W,basis,proj_A,proj_B,common"
    assert len(text) == 5


def test_flats_all_points_all_lines():
    ctx = make_field(3)
    pts = enumerate_affine_flats(ctx, 2, 0)
    lines = enumerate_affine_flats(ctx, 2, 1)
    assert (len(pts), len(lines)) == (9, 12)
    rep = flats_incidence_report(pts, lines)
    assert rep.count == flats_incidences_naive(pts, lines) == 36
    assert rep.main_term == 36 and rep.deviation == 0


def test_points_on_one_line():
    ctx = make_field(5)
    line = enumerate_affine_flats(ctx, 2, 1)[3]
    K = [make_flat(enumerate_grassmannian(ctx, 2, 0)[0], int(x)) for x in line.points()]
    assert flats_incidences(K, [line]) == 5


@given(st.integers(0, 2**32 - 1))
def test_flat_counts_match_naive(seed):
    rng = np.random.default_rng(seed)
    ctx = make_field(3)
    for k, h in [(0, 2), (1, 2), (0, 1)]:
        ks = enumerate_affine_flats(ctx, 3, k)
        hs = enumerate_affine_flats(ctx, 3, h)
        K = [ks[i] for i in rng.choice(len(ks), 6, replace=False)]
        H = [hs[i] for i in rng.choice(len(hs), 6, replace=False)]
        assert flats_incidences(K, H) == flats_incidences_naive(K, H)


def test_projector_reuse(rng):
    ctx = make_field(5)
    sp = space(ctx, 2)
    W = enumerate_grassmannian(ctx, 2, 1)[2]
    pr = Projector(W)
    A = PointSet.random(sp, 0.3, rng)
    assert pr.image(A).card == project(A, W).card
