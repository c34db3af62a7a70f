import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normgraph.gf import FieldCtx, FieldError, arith, find_irreducible

SMALL = [(2, 1, 2), (2, 1, 3), (3, 1, 3), (2, 2, 3), (5, 1, 3), (2, 1, 4), (3, 1, 4), (3, 2, 3)]


def _has_factor(f, p):
    """Brute force: does some monic g with 1 <= deg g <= deg f / 2 divide f?"""
    d = len(f) - 1
    for dg in range(1, d // 2 + 1):
        for low in itertools.product(range(p), repeat=dg):
            g = list(low) + [1]
            r = list(f)
            for shift in range(d - dg, -1, -1):
                c = r[shift + dg] % p
                for i, gi in enumerate(g):
                    r[shift + i] = (r[shift + i] - c * gi) % p
            if not any(r):
                return True
    return False


def _lex_first_irreducible(p, d):
    # lex order on (c_{d-1}, ..., c_0)
    for top in itertools.product(range(p), repeat=d):
        f = list(reversed(top)) + [1]
        if not _has_factor(f, p):
            return tuple(f)


@pytest.mark.parametrize("p,d,expected", [(2, 2, (1, 1, 1)), (3, 2, (1, 0, 1)), (2, 3, (1, 1, 0, 1))])
def test_find_irreducible_examples(p, d, expected):
    assert find_irreducible(p, d) == expected
    assert _lex_first_irreducible(p, d) == expected


@pytest.mark.parametrize("p,d", [(2, 4), (2, 6), (3, 3), (5, 2), (7, 3), (2, 9), (3, 4)])
def test_find_irreducible_matches_brute_force(p, d):
    assert find_irreducible(p, d) == _lex_first_irreducible(p, d)


def test_degree_one_modulus_is_x():
    assert find_irreducible(5, 1) == (0, 1)
    F = FieldCtx(5, 1, 2)
    assert F.order == 5 and F.mul(3, 4) == 2 and F.add(3, 4) == 2


@pytest.mark.parametrize("p", [1, 4, 9, 15])
def test_non_prime_rejected(p):
    with pytest.raises(FieldError):
        find_irreducible(p, 2)
    with pytest.raises(FieldError):
        FieldCtx(p, 1, 3)


def test_bad_parameters():
    with pytest.raises(FieldError):
        FieldCtx(2, 0, 3)
    with pytest.raises(FieldError):
        FieldCtx(2, 1, 1)
    with pytest.raises(FieldError):
        FieldCtx(2, 70, 2)  # order 2^70 above the cap


def test_f4_examples():
    F = FieldCtx(2, 1, 3)
    x = F.x()
    assert x.coeffs == (0, 1)
    assert x * (x + 1) == F.one()
    assert x.inv() == x + 1
    assert arith(x, x + 1, "mul") == F.one()
    assert arith(x, None, "inv") == x + 1
    for a in F.elements():
        assert arith(a, F.zero(), "add") == a
    assert arith(x, None, "pow", 3) == F.one()


def test_schoolbook_oracle_f4():
    # x^2 + x reduced mod x^2 + x + 1 is 1
    F = FieldCtx(2, 1, 3)
    for a, b in itertools.product(range(4), repeat=2):
        ca, cb = F.coeffs(a), F.coeffs(b)
        prod = [0, 0, 0]
        for i in range(2):
            for j in range(2):
                prod[i + j] ^= ca[i] & cb[j]
        if prod[2]:
            prod = [prod[0] ^ 1, prod[1] ^ 1, 0]
        assert F.mul(a, b) == F.encode(prod[:2])


def test_inverse_of_zero_is_an_error():
    F = FieldCtx(3, 1, 3)
    with pytest.raises(ZeroDivisionError):
        F.zero().inv()
    with pytest.raises(ZeroDivisionError):
        FieldCtx(3, 1, 3, use_tables=False).inv(0)
    with pytest.raises(FieldError):
        arith(F.one(), None, "pow", -1)
    with pytest.raises(FieldError):
        arith(F.one(), F.one(), "div")


def test_frobenius_examples():
    F = FieldCtx(3, 1, 3)
    x = F.x()
    assert x.frobenius_q(0) == x
    assert x.frobenius_q(1) == 2 * x
    assert x**3 == 2 * x
    for a in F.elements():
        assert a.frobenius_q(F.t - 1) == a


def test_norm_examples():
    F = FieldCtx(2, 1, 3)
    assert F.zero().norm() == F.zero()
    for a in F.elements()[1:]:
        assert a.norm() == F.one()
    F = FieldCtx(3, 1, 3)
    x = F.x()
    assert x.norm() == x**4 == F.one()
    assert (x + 1).norm() == F.element([2, 0])


def test_subfield():
    F = FieldCtx(3, 1, 3)
    assert F.zero().in_subfield() and F.one().in_subfield()
    assert not F.x().in_subfield()
    assert [str(a) for a in F.subfield_elements()] == ["0,0", "1,0", "2,0"]
    assert [int(a) for a in FieldCtx(2, 1, 3).subfield_elements()] == [0, 1]


@pytest.mark.parametrize("args", SMALL + [(2, 3, 4), (7, 1, 4), (2, 2, 4)])
def test_subfield_cardinality_and_order(args):
    F = FieldCtx(*args)
    sub = F.subfield
    assert len(sub) == F.q
    assert list(sub) == sorted(sub) and len(set(sub)) == len(sub)
    if F.order <= 3**6:
        assert [a for a in range(F.order) if F.in_subfield(a)] == list(sub)
    assert len(F.subfield_nonzero) == F.q - 1


@pytest.mark.parametrize("args", [a for a in SMALL if FieldCtx(*a).order <= 81])
def test_exhaustive_field_properties(args):
    F = FieldCtx(*args)
    els = range(F.order)
    for a in els:
        if a:
            assert F.mul(a, F.inv(a)) == 1
        assert F.in_subfield(F.norm(a))
        for b in els:
            for e in range(F.t):
                assert F.frobenius_q(F.add(a, b), e) == F.add(F.frobenius_q(a, e), F.frobenius_q(b, e))
            assert F.norm(F.mul(a, b)) == F.mul(F.norm(a), F.norm(b))
            assert F.sub(F.add(a, b), b) == a


@pytest.mark.parametrize("args", [(2, 1, 3), (3, 1, 3), (2, 2, 3), (5, 1, 3), (3, 1, 4), (2, 3, 3), (3, 1, 5), (3, 2, 4)])
def test_norm_fibres_uniform(args):
    F = FieldCtx(*args)
    assert F.order <= 3**6
    counts = {}
    for a in range(1, F.order):
        v = F.norm(a)
        counts[v] = counts.get(v, 0) + 1
    assert sorted(counts) == list(F.subfield_nonzero)
    assert set(counts.values()) == {(F.order - 1) // (F.q - 1)}


@pytest.mark.parametrize("args", [(2, 3, 4), (7, 1, 4), (5, 1, 4)])
def test_sampled_field_properties(args):
    F = FieldCtx(*args)
    rng = random.Random(1234)
    for _ in range(10_000):
        a, b = rng.randrange(F.order), rng.randrange(F.order)
        e = rng.randrange(F.t)
        assert F.frobenius_q(F.add(a, b), e) == F.add(F.frobenius_q(a, e), F.frobenius_q(b, e))
        assert F.norm(F.mul(a, b)) == F.mul(F.norm(a), F.norm(b))
        assert F.in_subfield(F.norm(a))


@pytest.mark.parametrize("args", [(2, 1, 3), (3, 1, 3), (2, 2, 3), (3, 2, 3), (7, 1, 3), (2, 3, 4)])
def test_tables_agree_with_polynomial_arithmetic(args):
    fast, slow = FieldCtx(*args), FieldCtx(*args, use_tables=False)
    rng = random.Random(7)
    pairs = [(rng.randrange(fast.order), rng.randrange(fast.order)) for _ in range(300)]
    for a, b in pairs:
        assert fast.add(a, b) == slow.add(a, b)
        assert fast.mul(a, b) == slow.mul(a, b)
        assert fast.sub(a, b) == slow.sub(a, b)
        assert fast.norm(a) == slow.norm(a)
        assert fast.pow(a, b) == slow.pow(a, b)
        if a:
            assert fast.inv(a) == slow.inv(a)
    assert fast.subfield == slow.subfield


@st.composite
def triples(draw, F):
    return tuple(draw(st.integers(0, F.order - 1)) for _ in range(3))


F512 = FieldCtx(2, 3, 4)
F343 = FieldCtx(7, 1, 4)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([F512, F343]).flatmap(lambda F: st.tuples(st.just(F), triples(F))))
def test_field_axioms_random_triples(case):
    F, (a, b, c) = case
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == 0


def test_text_form_round_trip():
    F = FieldCtx(3, 1, 4)
    for a in F.elements():
        assert F.parse(str(a)) == a
        assert len(a.coeffs) == F.d and all(0 <= c < 3 for c in a.coeffs)
    assert str(F.element(5)) == "2,1,0"
    with pytest.raises(FieldError):
        F.parse("1,2")
    with pytest.raises(FieldError):
        F.parse("3,0,0")


def test_vectorised_ops_match_scalar():
    import numpy as np

    F = FieldCtx(3, 2, 3)
    a = np.arange(F.order)
    b = (a * 7 + 3) % F.order
    assert F.add_array(a, b).tolist() == [F.add(int(x), int(y)) for x, y in zip(a, b)]
    assert F.mul_array(a, b).tolist() == [F.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert F.norm_table.tolist() == [F.norm(int(x)) for x in a]
