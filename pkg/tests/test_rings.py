from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from twistfloer.errors import RingNotEuclideanError, TwistFloerError
from twistfloer.notation import parse_coefficient
from twistfloer.rings import (
    F2,
    F2T,
    F2U,
    LAMBDA_U,
    LAURENT,
    NOVIKOV,
    RATFUNC,
    ZZ,
    F2Poly,
    LaurentPoly,
    NovikovElem,
    RatFunc,
    TwistClass,
    clgcd,
    clmul,
    cldivmod,
    make_rng,
    novikov_arith,
    novikov_invert_truncated,
    poly_ring,
    ring_from_name,
    twist_action,
)

ALL_RINGS = [ZZ, F2, F2T, LAURENT, RATFUNC, NOVIKOV, F2U, LAMBDA_U, poly_ring(RATFUNC, ("U_z", "U_w0"))]
EUCLIDEAN = [ZZ, F2, F2T, LAURENT, RATFUNC, F2U, LAMBDA_U]
seeds = st.integers(0, 2**32 - 1)


def nv(*exps):
    return NovikovElem([Fraction(e) for e in exps])


# -- carry-less arithmetic ----------------------------------------------------


def test_clmul_matches_schoolbook():
    # (1 + t)(1 + t) = 1 + t^2 over F2
    assert clmul(0b11, 0b11) == 0b101
    assert clmul(0b101, 0b11) == 0b1111


@given(st.integers(0, 2**20), st.integers(1, 2**12))
def test_cldivmod_reconstructs(a, b):
    q, r = cldivmod(a, b)
    assert clmul(q, b) ^ r == a
    assert r.bit_length() < b.bit_length()


@given(st.integers(1, 2**16), st.integers(1, 2**16))
def test_clgcd_divides_both(a, b):
    g = clgcd(a, b)
    assert cldivmod(a, g)[1] == 0
    assert cldivmod(b, g)[1] == 0


# -- ring axioms --------------------------------------------------------------


@pytest.mark.parametrize("R", ALL_RINGS, ids=lambda r: r.name)
@given(seed=seeds)
def test_ring_axioms(R, seed):
    rng = make_rng(seed)
    a, b, c = R.random(rng), R.random(rng), R.random(rng)
    assert R.eq(R.add(a, b), R.add(b, a))
    assert R.eq(R.mul(a, b), R.mul(b, a))
    assert R.eq(R.mul(R.mul(a, b), c), R.mul(a, R.mul(b, c)))
    assert R.eq(R.mul(a, R.add(b, c)), R.add(R.mul(a, b), R.mul(a, c)))
    assert R.is_zero(R.sub(a, a))
    assert R.eq(R.mul(a, R.one), a)


@pytest.mark.parametrize("R", EUCLIDEAN, ids=lambda r: r.name)
@given(seed=seeds)
def test_euclidean_division(R, seed):
    rng = make_rng(seed)
    a, b = R.random(rng), R.random(rng)
    if R.is_zero(b):
        return
    q, r = R.divmod(a, b)
    assert R.eq(R.add(R.mul(q, b), r), a)
    assert R.is_zero(r) or R.norm(r) < R.norm(b)


@pytest.mark.parametrize("R", EUCLIDEAN, ids=lambda r: r.name)
@given(seed=seeds)
def test_unit_normal_is_a_unit(R, seed):
    a = R.random(make_rng(seed))
    if R.is_zero(a):
        return
    u = R.unit_normal(a)
    assert R.is_unit(u)
    # associates normalize to the same element
    v = R.unit_normal(R.mul(a, u))
    assert R.eq(R.mul(R.mul(a, u), v), R.mul(a, u))


@pytest.mark.parametrize("R", [F2, RATFUNC], ids=lambda r: r.name)
@given(seed=seeds)
def test_field_inverse(R, seed):
    a = R.random(make_rng(seed))
    if R.is_zero(a):
        return
    assert R.eq(R.mul(a, R.inverse(a)), R.one)


def test_non_euclidean_rings_refuse_division():
    with pytest.raises(RingNotEuclideanError):
        NOVIKOV.divmod(NOVIKOV.one, NOVIKOV.one)
    R2 = poly_ring(RATFUNC, ("U_z", "U_w0"))
    with pytest.raises(RingNotEuclideanError):
        R2.divmod(R2.one, R2.var("U_z"))


# -- formatting and parsing round trip ---------------------------------------


@pytest.mark.parametrize("R", ALL_RINGS, ids=lambda r: r.name)
@given(seed=seeds)
def test_format_parse_round_trip(R, seed):
    a = R.random(make_rng(seed))
    assert R.eq(parse_coefficient(R.format(a), R), a)


# -- concrete elements ---------------------------------------------------------


def test_laurent_normal_form():
    x = LaurentPoly.from_terms([-2, 0, 3])
    assert x.low == -2 and x.terms == {-2: 1, 0: 1, 3: 1}
    assert LaurentPoly.from_terms([1, 1]) == LaurentPoly()
    assert LAURENT.is_unit(LaurentPoly.monomial(-5))
    assert not LAURENT.is_unit(LaurentPoly.from_terms([0, 1]))


def test_ratfunc_is_reduced():
    t = RATFUNC.gen("t")
    one_plus_t = RATFUNC.add(RATFUNC.one, t)
    x = RATFUNC.divide(RATFUNC.mul(one_plus_t, t), one_plus_t)
    assert RATFUNC.eq(x, t)
    assert isinstance(x, RatFunc)


def test_f2poly_degree():
    assert F2Poly.from_exponents([0, 3]).degree == 3
    assert F2Poly().degree == -1


# -- Novikov field -----------------------------------------------------------


def test_novikov_examples():
    half = nv(0, Fraction(1, 2))
    assert half * half == nv(0, 1)
    assert nv(Fraction(3, 4)) * nv(Fraction(1, 4)) == nv(1)
    assert novikov_arith(nv(0, 1), nv(0, 2), "add") == nv(1, 2)


def test_novikov_truncated_inverse_examples():
    assert novikov_invert_truncated(nv(0, 1), 3) == nv(0, 1, 2)
    assert novikov_invert_truncated(nv(-2), 5) == nv(2)
    assert novikov_invert_truncated(nv(1, 2), 2) == nv(-1, 0)
    with pytest.raises(ZeroDivisionError):
        novikov_invert_truncated(nv(), 3)
    with pytest.raises(ValueError):
        novikov_invert_truncated(nv(5), 3)


@given(seed=seeds, horizon=st.integers(1, 6))
def test_novikov_truncated_inverse_residual(seed, horizon):
    a = NOVIKOV.random(make_rng(seed))
    if not a:
        return
    horizon += a.min_exp
    b = novikov_invert_truncated(a, horizon)
    residual = a * b + nv(0)
    assert not residual or residual.min_exp >= horizon


def test_twist_action():
    assert twist_action(TwistClass(1), 1, nv(0)) == nv(1)
    assert twist_action(TwistClass(Fraction(1, 2)), 2, nv(Fraction(1, 2))) == nv(Fraction(3, 2))
    assert twist_action(TwistClass(0), 7, nv(3)) == nv(3)
    assert not TwistClass(0).nonzero


# -- ring tags -----------------------------------------------------------------


def test_ring_from_name():
    assert ring_from_name("ZZ") is ZZ
    assert ring_from_name("F2(t)[U]") is LAMBDA_U
    assert ring_from_name("Lambda[U]") is LAMBDA_U
    R = ring_from_name("F2(t)[U_z,U_w0]")
    assert R.names == ("U_z", "U_w0")
    with pytest.raises(TwistFloerError):
        ring_from_name("Q[x]")
