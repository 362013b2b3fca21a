import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffincidence import incidence as inc
from ffincidence.field_core import make_field
from ffincidence.motions import MotionSet, all_rigid_motions, enumerate_orthogonal_group, random_motions, stabilizer
from ffincidence.spectral import dft, spectral_sum_equal_norms
from ffincidence.vector_geometry import PairSet, PointSet, space, sphere

GRID = [(3, 1, 2), (5, 1, 2), (3, 2, 2), (3, 1, 3)]


def _sp(p, ell, d):
    return space(make_field(p, ell), d)


def test_histogram_examples(rng):
    sp = _sp(5, 1, 2)
    A = PointSet.random(sp, 0.4, rng)
    origin = PointSet.from_indices(sp, [0])
    g = np.eye(2, dtype=int)
    assert np.array_equal(inc.intersection_histogram(A, origin, g).counts, A.indicator().astype(int))
    full = PointSet.full(sp)
    assert np.all(inc.intersection_histogram(full, full, g).counts == sp.size)


def test_histogram_on_a_line_and_its_stabilizer():
    sp = _sp(3, 1, 2)
    A = PointSet.from_vectors(sp, [[0, 0], [1, 0], [2, 0]])
    G = enumerate_orthogonal_group(sp.ctx, 2)
    for k in stabilizer(G, [1, 0]):
        counts = inc.intersection_histogram(A, A, G[k]).counts
        assert np.array_equal(counts, np.where(A.bits, A.card, 0))


@given(st.sampled_from(GRID), st.integers(0, 2**32 - 1))
def test_histogram_sums_to_product_and_routes_agree(grid, seed):
    rng = np.random.default_rng(seed)
    sp = _sp(*grid)
    A, B = PointSet.random(sp, rng.uniform(), rng), PointSet.random(sp, rng.uniform(), rng)
    G = enumerate_orthogonal_group(sp.ctx, sp.d)
    g = G[int(rng.integers(len(G)))]
    h = inc.intersection_histogram(A, B, g)
    assert h.total == A.card * B.card
    assert np.array_equal(h.counts, inc.intersection_histogram(A, B, g, method="pairs").counts)


def test_sg_image_examples(rng):
    sp = _sp(5, 1, 2)
    A = PointSet.random(sp, 0.3, rng)
    img = inc.sg_image(PairSet.product(A, A), np.eye(2, dtype=int))
    assert 0 in img.indices()
    P = PairSet.from_pairs(sp, [7], [3])
    G = enumerate_orthogonal_group(sp.ctx, 2)
    g = G[5]
    expected = sp.sub(7, G.actions[5][3])
    assert inc.sg_image(P, g).indices().tolist() == [expected]


@given(st.integers(0, 2**32 - 1))
def test_sg_image_lower_bound(seed):
    rng = np.random.default_rng(seed)
    sp = _sp(3, 1, 2)
    P = PairSet.random_pairs(sp, rng.uniform(), rng)
    G = enumerate_orthogonal_group(sp.ctx, 2)
    for k in range(len(G)):
        assert inc.sg_image(P, action=G.actions[k]).card * sp.size >= P.card


def test_incidence_examples(rng):
    sp = _sp(3, 1, 2)
    G = enumerate_orthogonal_group(sp.ctx, 2)
    single = PairSet.from_pairs(sp, [4], [2])
    assert inc.count_incidences(single, all_rigid_motions(G)).count == len(G)
    A, B = PointSet.random(sp, 0.5, rng), PointSet.random(sp, 0.5, rng)
    res = inc.count_incidences(PairSet.product(A, B), all_rigid_motions(G))
    assert res.count == len(G) * A.card * B.card


@given(st.sampled_from(GRID), st.integers(0, 2**32 - 1))
def test_incidences_match_naive_loop(grid, seed):
    rng = np.random.default_rng(seed)
    sp = _sp(*grid)
    G = enumerate_orthogonal_group(sp.ctx, sp.d)
    P = PairSet.random_pairs(sp, min(0.5, 30 / sp.size), rng)
    R = random_motions(G, min(0.5, 100 / (len(G) * sp.size)), rng)
    assert inc.count_incidences(P, R).count == inc.count_incidences_naive(P, R)


@given(st.sampled_from(GRID), st.integers(0, 2**32 - 1))
def test_fourier_expansion_is_exact(grid, seed):
    rng = np.random.default_rng(seed)
    sp = _sp(*grid)
    G = enumerate_orthogonal_group(sp.ctx, sp.d)
    P = PairSet.random_pairs(sp, min(0.5, 30 / sp.size), rng)
    R = random_motions(G, min(0.5, 100 / (len(G) * sp.size)), rng)
    main, err = inc.incidence_fourier_expansion(P, R)
    assert main + err.real == pytest.approx(inc.count_incidences(P, R).count, abs=1e-6)
    assert abs(err.imag) < 1e-6


def test_full_pair_set_has_no_error_term():
    sp = _sp(3, 1, 2)
    G = enumerate_orthogonal_group(sp.ctx, 2)
    P = PairSet.full(space(sp.ctx, 4))
    R = MotionSet(G, [0, 3, 3], [1, 2, 5])
    _, err = inc.incidence_fourier_expansion(P, R)
    assert abs(err) < 1e-9


def test_count_N_examples():
    sp = _sp(3, 1, 2)
    assert inc.count_N(PairSet.from_pairs(sp, [5], [1])) == 1
    full = PairSet.full(space(sp.ctx, 4))
    sizes = np.array([sphere(sp, t).card for t in range(3)])
    assert inc.count_N(full) == sp.size**2 * int(np.sum(sizes**2))


@given(st.sampled_from(GRID), st.integers(0, 2**32 - 1))
def test_count_N_routes_agree(grid, seed):
    rng = np.random.default_rng(seed)
    sp = _sp(*grid)
    A, B = PointSet.random(sp, rng.uniform(0, 0.5), rng), PointSet.random(sp, rng.uniform(0, 0.5), rng)
    P = PairSet.product(A, B)
    N = inc.count_N(P)
    assert N == inc.count_N_product(A, B)
    if P.card <= 2000:
        assert N == inc.count_N_naive(P)


@given(st.sampled_from(GRID), st.integers(0, 2**32 - 1))
def test_N_identities_hold(grid, seed):
    rng = np.random.default_rng(seed)
    sp = _sp(*grid)
    A, B = PointSet.random(sp, rng.uniform(0.05, 0.6), rng), PointSet.random(sp, rng.uniform(0.05, 0.6), rng)
    rep = inc.verify_N_identities(PairSet.product(A, B), A, B)
    assert rep["general_ok"] and rep["product_ok"]
    P = PairSet.random_pairs(sp, min(0.5, 40 / sp.size), rng)
    assert inc.verify_N_identities(P)["general_ok"]


@pytest.mark.parametrize("p,ell,d", GRID)
def test_q3d_coefficient_overshoots_by_the_equal_norm_term(p, ell, d, rng):
    sp = _sp(p, ell, d)
    A, B = PointSet.random(sp, 0.4, rng), PointSet.random(sp, 0.4, rng)
    rep = inc.verify_N_identities(PairSet.product(A, B), A, B)
    offset = sp.q ** (3 * d - 1) * spectral_sum_equal_norms(dft(sp, A), dft(sp, B))
    assert rep["product_q3d_rhs"] - rep["N"] == pytest.approx(offset, rel=1e-9)
    assert offset > 0


def test_nu_sums_to_square(rng):
    sp = _sp(5, 1, 2)
    A = PointSet.random(sp, 0.3, rng)
    assert inc.nu(A).sum() == A.card**2
    assert inc.nu(A)[0] >= A.card


def test_full_sets_have_no_exceptions():
    sp = _sp(5, 1, 2)
    full = PointSet.full(sp)
    G = enumerate_orthogonal_group(sp.ctx, 2)
    rep = inc.exceptional_set(full, full, G, "intersection")
    assert rep.E == [] and rep.theorem_id == "exceptional_intersection"


def test_exceptional_intersection_on_random_sets(rng):
    sp = _sp(7, 1, 2)
    G = enumerate_orthogonal_group(sp.ctx, 2)
    A, B = PointSet.random(sp, 0.5, rng), PointSet.random(sp, 0.5, rng)
    assert A.card * B.card >= sp.q ** (sp.d + 1)
    rep = inc.exceptional_set(A, B, G, "intersection")
    assert "VALIDITY_RANGE" not in rep.flags
    assert rep.observed_constant is not None and np.isfinite(rep.observed_constant)


def test_line_family_exceptions_are_the_diagonal_maps():
    from ffincidence.harness import line_family

    sp = _sp(11, 1, 2)
    G = enumerate_orthogonal_group(sp.ctx, 2)
    L = line_family(sp, 4)
    E, _ = inc.intersection_exceptions(L, L, G)
    diagonal = [k for k in range(len(G)) if G[k][0, 1] == 0 and G[k][1, 0] == 0]
    assert sorted(E) == diagonal and len(E) == 4


def test_growth_empty_when_threshold_below_set_size(rng):
    sp = _sp(5, 1, 2)
    G = enumerate_orthogonal_group(sp.ctx, 2)
    A = PointSet.random(sp, 0.3, rng)
    rep = inc.growth_experiment(A, A, -0.5, G)
    assert rep.E == []


def test_growth_catches_aligned_lines():
    from ffincidence.harness import line_family

    sp = _sp(7, 1, 2)
    G = enumerate_orthogonal_group(sp.ctx, 2)
    L = line_family(sp, 1)
    rep = inc.growth_experiment(L, L, 0.0, G)  # |A - gB| <= |B| only when g keeps the line
    assert sorted(rep.E) == sorted(k for k in range(len(G)) if G[k][1, 0] == 0)
