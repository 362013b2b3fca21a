import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffincidence.errors import InvalidField, Unsupported
from ffincidence.field_core import (
    add_char,
    complete_square_closed_form,
    complete_square_sum,
    gauss_sum,
    gauss_sum_closed_form,
    is_prime,
    make_field,
    quad_char,
    smallest_nonresidue,
    trace,
)

FIELDS = [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2)]


def test_prime_field_is_plain_modular_arithmetic():
    ctx = make_field(3, 1)
    assert ctx.q == 3
    for a in range(3):
        for b in range(3):
            assert ctx.add(a, b) == (a + b) % 3
            assert ctx.mul(a, b) == (a * b) % 3


def test_f9_uses_two_as_the_nonresidue():
    # squares mod 3 are {0, 1}, so 2 is the smallest non-residue
    assert {(x * x) % 3 for x in range(3)} == {0, 1}
    ctx = make_field(3, 2)
    assert ctx.nonresidue == 2
    t = 3  # a0 + a1 p with a1 = 1
    assert ctx.mul(t, t) == 2


@pytest.mark.parametrize("p,ell,exc", [(2, 1, InvalidField), (9, 1, InvalidField), (3, 3, Unsupported)])
def test_bad_parameters(p, ell, exc):
    with pytest.raises(exc):
        make_field(p, ell)


def test_smallest_nonresidue_matches_enumeration():
    for p in (3, 5, 7, 11, 13, 17, 23):
        squares = {(x * x) % p for x in range(p)}
        assert smallest_nonresidue(p) == min(set(range(1, p)) - squares)


def test_is_prime():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_trace_examples():
    assert trace(make_field(5, 1), 4) == 4
    ctx = make_field(3, 2)
    for x in range(3):
        assert trace(ctx, x) == (2 * x) % 3
    assert trace(ctx, 3) == 0  # t + t^3 = 3t


def test_character_examples():
    for p, ell in [(7, 1), (3, 2)]:
        ctx = make_field(p, ell)
        assert add_char(ctx, 0) == 1
        assert abs(np.sum(add_char(ctx, ctx.elements()))) < 1e-12


def test_quadratic_character_examples():
    assert quad_char(make_field(5, 1), 0) == 0
    assert quad_char(make_field(5, 1), 4) == 1
    assert quad_char(make_field(3, 1), 2) == -1


@pytest.mark.parametrize("p,ell", FIELDS)
def test_tables_against_scalar_ops(p, ell):
    ctx = make_field(p, ell)
    q = ctx.q
    for a in range(q):
        assert ctx.add(a, ctx.neg(a)) == 0
        if a:
            assert ctx.mul(a, ctx.inv(a)) == 1
    assert np.all(ctx.power(2, q - 1) == 1)


@pytest.mark.parametrize("p,ell", FIELDS)
def test_frobenius_fixes_exactly_the_prime_field(p, ell):
    ctx = make_field(p, ell)
    fixed = [a for a in range(ctx.q) if ctx.frobenius(a) == a]
    assert fixed == list(range(p))


@given(st.sampled_from(FIELDS), st.data())
def test_field_axioms(field, data):
    ctx = make_field(*field)
    a, b, c = (data.draw(st.integers(0, ctx.q - 1)) for _ in range(3))
    assert ctx.add(a, b) == ctx.add(b, a)
    assert ctx.mul(a, ctx.mul(b, c)) == ctx.mul(ctx.mul(a, b), c)
    assert ctx.mul(a, ctx.add(b, c)) == ctx.add(ctx.mul(a, b), ctx.mul(a, c))
    assert ctx.sub(ctx.add(a, b), b) == a


@given(st.sampled_from(FIELDS), st.data())
def test_characters_are_homomorphisms(field, data):
    ctx = make_field(*field)
    a, b = (data.draw(st.integers(0, ctx.q - 1)) for _ in range(2))
    assert abs(add_char(ctx, ctx.add(a, b)) - add_char(ctx, a) * add_char(ctx, b)) < 1e-12
    assert quad_char(ctx, ctx.mul(a, b)) == quad_char(ctx, a) * quad_char(ctx, b)


def test_gauss_sum_branch_values():
    assert abs(gauss_sum(make_field(5, 1), 1) - math.sqrt(5)) < 1e-9
    assert abs(gauss_sum(make_field(3, 1), 1) - 1j * math.sqrt(3)) < 1e-9


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
@pytest.mark.parametrize("ell", [1, 2])
def test_gauss_sum_magnitude_and_closed_form(p, ell):
    ctx = make_field(p, ell)
    assert abs(gauss_sum(ctx, 1) - gauss_sum_closed_form(ctx)) < 1e-9
    for a in range(1, ctx.q):
        assert abs(abs(gauss_sum(ctx, a)) - math.sqrt(ctx.q)) < 1e-9


@pytest.mark.parametrize("p,ell", FIELDS)
def test_gauss_sum_twists_by_eta(p, ell):
    ctx = make_field(p, ell)
    g1 = gauss_sum(ctx, 1)
    for a in range(1, ctx.q):
        assert cmath.isclose(gauss_sum(ctx, a), quad_char(ctx, a) * g1, abs_tol=1e-9)


@pytest.mark.parametrize("p,ell", [(3, 1), (5, 1), (3, 2)])
def test_complete_square_against_full_enumeration(p, ell):
    ctx = make_field(p, ell)
    q = ctx.q
    # all alpha in F_q^2, no factorization
    alphas = [(x, y) for x in range(q) for y in range(q)]
    for s in range(1, q):
        for beta in [(0, 0), (1, 2 % q), (q - 1, 1)]:
            direct = 0j
            for a0, a1 in alphas:
                sq = ctx.add(ctx.mul(a0, a0), ctx.mul(a1, a1))
                lin = ctx.add(ctx.mul(beta[0], a0), ctx.mul(beta[1], a1))
                direct += add_char(ctx, ctx.add(ctx.mul(s, sq), lin))
            assert abs(direct - complete_square_closed_form(ctx, s, beta)) < 1e-9
            assert abs(direct - complete_square_sum(ctx, s, beta)) < 1e-9
