import math

import pytest

from ffincidence.errors import NotApplicable
from ffincidence.motions import orthogonal_group_order
from ffincidence.theorems import (
    ESTIMATED,
    EXACT,
    REGISTRY,
    Instance,
    evaluate,
    explicit_constant,
    flats_constant,
    order_below,
    restriction_friendly,
)


def test_only_stated_constants_are_exact():
    exact = sorted(k for k, v in REGISTRY.items() if v.tier == EXACT)
    assert exact == ["projection_count", "spectral_plancherel"]
    assert all(v.tier in (EXACT, ESTIMATED) for v in REGISTRY.values())
    assert explicit_constant("projection_count")


def test_unknown_id():
    with pytest.raises(KeyError):
        evaluate("nope", Instance(3, 1, 2))


def test_missing_sizes_are_not_applicable():
    with pytest.raises(NotApplicable):
        evaluate("incidence_universal", Instance(5, 1, 2, P=10))


def test_order_below():
    assert order_below(5, 1) == 1
    assert order_below(5, 3) == orthogonal_group_order(5, 2)


def test_restriction_friendly():
    assert restriction_friendly(3, 5)
    assert restriction_friendly(2, 7)
    assert not restriction_friendly(2, 5)
    assert not restriction_friendly(4, 3)


def test_universal_bound_value():
    b = evaluate("incidence_universal", Instance(5, 1, 2, P=100, R=40))
    assert b.value == pytest.approx(5 ** 1 * math.sqrt(4000))


def test_plancherel_bound_is_the_size_product():
    b = evaluate("spectral_plancherel", Instance(7, 1, 2, A=10, B=20))
    assert b.value == pytest.approx(200 / 7**4)
    assert b.tier == EXACT


def test_projection_count_has_constant_four():
    b = evaluate("projection_count", Instance(5, 1, 2, m=1, N=3, E=10))
    assert b.value == 4 * 5 ** 0 * 3
    with pytest.raises(NotApplicable):
        evaluate("projection_count", Instance(5, 1, 2, m=1, N=5, E=10))


def test_prime_plane_families_require_three_mod_four():
    with pytest.raises(NotApplicable):
        evaluate("incidence_prime_small_a", Instance(5, 1, 2, A=3, B=4, R=10))
    with pytest.raises(NotApplicable):
        evaluate("spectral_prime", Instance(7, 2, 2, A=3, B=4))
    assert evaluate("incidence_prime_small_a", Instance(7, 1, 2, A=3, B=4, R=10)).case == "3"


def test_exceptional_intersection_validity_flag():
    small = evaluate("exceptional_intersection", Instance(7, 1, 2, A=5, B=5))
    big = evaluate("exceptional_intersection", Instance(7, 1, 2, A=30, B=30))
    assert "VALIDITY_RANGE" in small.flags and "VALIDITY_RANGE" not in big.flags
    assert big.value == pytest.approx(2 * 7**4 / 900)


def test_restricted_bounds_mark_exploratory_fields():
    b = evaluate("spectral_restricted", Instance(5, 1, 2, A=5, B=10))
    assert "EXPLORATORY" in b.flags


def test_projection_intersection_cases():
    assert evaluate("projection_intersection", Instance(5, 1, 2, m=1, A=30, B=30)).case == "2"
    assert evaluate("projection_intersection", Instance(5, 1, 2, m=1, A=8, B=8)).case == "1"
    none = evaluate("projection_intersection", Instance(5, 1, 2, m=1, A=2, B=2))
    assert none.case == "none" and "VALIDITY_RANGE" in none.flags


def test_flats_constant():
    assert [flats_constant(k) for k in range(4)] == [1, 3, 10, 21]


@pytest.mark.parametrize("tid", sorted(REGISTRY))
def test_every_bound_is_positive_somewhere(tid):
    sizes = dict(A=40, B=60, P=2400, R=500, eps=0.1, m=1, N=3, delta=0.5, E=40, k=0, h=2, K=20, H=30)
    values = []
    for p, ell, d in [(7, 1, 2), (11, 1, 2), (5, 1, 3), (3, 1, 3), (5, 1, 2), (3, 2, 2)]:
        for a, b in [(40, 60), (8, 12), (5, 6), (12, 100)]:
            try:
                values.append(evaluate(tid, Instance(p, ell, d, **{**sizes, "A": a, "B": b})).value)
            except NotApplicable:
                pass
    assert values and all(v > 0 and math.isfinite(v) for v in values)
