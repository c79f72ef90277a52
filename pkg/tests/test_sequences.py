from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from twistfloer.complexes import ChainComplex, FreeField, GradedModule, Tower, UTorsion, dualize, homology
from twistfloer.errors import (
    AmbiguousTriangleError,
    DegenerateFormError,
    InconsistentInputError,
    UnsupportedError,
    ZeroTwistError,
)
from twistfloer.rings import LAMBDA_U, TwistClass, make_rng
from twistfloer.sequences import (
    NON_INCREASING,
    CobordismData,
    GradedDims,
    InfinityModel,
    c1_square,
    grading_shift,
    novikov_base_change,
    orientation_reverse,
    random_u_module,
    reconstruct_plus,
    surgery_triangle_cobordisms,
    triangle_chase,
)

H = Fraction(1, 2)
SHIFTS = {"f1": -H, "f2": -H, "f3": NON_INCREASING}
seeds = st.integers(0, 2**32 - 1)


# -- grading arithmetic --------------------------------------------------------


def test_grading_shift_examples():
    assert grading_shift(CobordismData(1, 0, 0)) == -H
    assert grading_shift(CobordismData(0, 0, 0)) == 0
    assert grading_shift(CobordismData(1, -1, -1)) == 0


def test_triangle_cobordisms():
    w1, w2, w3 = surgery_triangle_cobordisms()
    assert grading_shift(w1) == grading_shift(w2) == -H
    assert (w1.sigma, w2.sigma, w3.sigma) == (0, 0, -1)


def test_c1_square_examples():
    assert c1_square(-1, 0) == -1
    assert c1_square(-1, 1) == -1
    assert c1_square(1, 0) == 1
    with pytest.raises(DegenerateFormError):
        c1_square(0, 3)


@given(st.integers(-200, 200))
def test_third_map_never_raises_grading(j):
    assert grading_shift(surgery_triangle_cobordisms(j)[2]) == (c1_square(-1, j) + 1) / 4 <= 0


# -- triangle chase --------------------------------------------------------------


def test_chase_for_twist_knots():
    a = GradedDims.of("F2", {0: 1})
    c = GradedDims.of("F2", {-1: 1, -2: 2})
    assert triangle_chase(a, c, SHIFTS) == GradedDims.of("L(t)", {-H: 2, -3 * H: 2})


def test_chase_with_an_empty_side():
    a = GradedDims.of("F2", {0: 1, 2: 3})
    assert triangle_chase(a, GradedDims(), SHIFTS) == GradedDims.of("L(t)", {-H: 1, Fraction(3, 2): 3})
    c = GradedDims.of("F2", {-1: 4})
    assert triangle_chase(GradedDims(), c, SHIFTS) == GradedDims.of("L(t)", {-H: 4})


def test_chase_refuses_to_guess():
    a = GradedDims.of("F2", {0: 1})
    with pytest.raises(AmbiguousTriangleError):
        triangle_chase(a, GradedDims.of("F2", {0: 1}), SHIFTS)
    with pytest.raises(AmbiguousTriangleError):
        triangle_chase(a, GradedDims.of("F2", {1: 1}), {"f1": 0, "f2": 0, "f3": -1})
    # an exact shift that misses A is fine
    assert triangle_chase(a, GradedDims.of("F2", {1: 1}), {"f1": 0, "f2": 0, "f3": -2}).total() == 2


def test_chase_needs_exact_shifts():
    with pytest.raises(InconsistentInputError):
        triangle_chase(GradedDims(), GradedDims(), {"f1": "small", "f2": 0})


@given(seed=seeds)
def test_chase_adds_dimensions(seed):
    rng = make_rng(seed)
    a = GradedDims.of("F2", {rng.randint(0, 4): rng.randint(1, 3) for _ in range(3)})
    c = GradedDims.of("F2", {rng.randint(-6, -1): rng.randint(1, 3) for _ in range(3)})
    b = triangle_chase(a, c, SHIFTS)
    assert b.total() == a.total() + c.total()


# -- hat to plus -----------------------------------------------------------------


def test_reconstruct_twist_knot_plus():
    for n in (1, 2, 5):
        hat = GradedDims.of("L(t)", {-H: n, -3 * H: n})
        assert reconstruct_plus(hat, InfinityModel(-H)) == GradedModule([FreeField("L(t)", n, -3 * H), Tower(-H, "F2")])


def test_reconstruct_sphere_and_zero():
    assert reconstruct_plus(GradedDims.of("F2", {0: 1}), InfinityModel(0)) == GradedModule([Tower(0, "F2")])
    assert reconstruct_plus(GradedDims(), None).is_zero()


def test_reconstruct_long_strings():
    hat = GradedDims.of("F2", {1: 1, -4: 1})
    assert reconstruct_plus(hat, None) == GradedModule([UTorsion(3, 0, "F2")])


def test_reconstruct_errors():
    with pytest.raises(InconsistentInputError):
        reconstruct_plus(GradedDims.of("F2", {0: 1}), InfinityModel(H))
    with pytest.raises(InconsistentInputError):
        reconstruct_plus(GradedDims.of("F2", {0: 1, -2: 1}), None)
    with pytest.raises(AmbiguousTriangleError):
        reconstruct_plus(GradedDims.of("F2", {1: 1, 0: 1, -2: 1}), None)


def _hat_of(plus):
    out = {}
    for s in plus:
        if isinstance(s, Tower):
            out[s.bottom] = out.get(s.bottom, 0) + 1
        else:
            k = getattr(s, "k", 1)
            top = s.top if isinstance(s, UTorsion) else s.grading
            for g in (top + 1, top - 2 * (k - 1)):
                out[g] = out.get(g, 0) + s.rank
    return out


@given(seed=seeds)
def test_reconstruction_reproduces_its_hat(seed):
    rng = make_rng(seed)
    plus = [UTorsion(rng.randint(1, 3), rng.randint(-8, 8), "F2", rng.randint(1, 2)) for _ in range(rng.randint(0, 3))]
    bottom = rng.randint(-4, 4)
    hat = _hat_of(plus + [Tower(bottom, "F2")])
    try:
        rebuilt = reconstruct_plus(GradedDims.of("F2", hat), InfinityModel(bottom))
    except AmbiguousTriangleError:
        return
    assert _hat_of(rebuilt) == hat


# -- base change and duality -------------------------------------------------------


def test_base_change_examples():
    m = GradedModule([Tower(-H, "F2"), FreeField("L(t)", 3, -3 * H)])
    assert novikov_base_change(m, TwistClass(1)) == GradedModule([FreeField("Lambda", 3, -3 * H)])
    assert novikov_base_change(GradedModule([Tower(0, "F2")]), TwistClass(1)).is_zero()
    assert novikov_base_change(GradedModule([FreeField("L(t)", 1, 0)]), TwistClass(H)) == GradedModule(
        [FreeField("Lambda", 1, 0)]
    )
    with pytest.raises(ZeroTwistError):
        novikov_base_change(m, TwistClass(0))


def test_orientation_reverse_examples():
    lam = GradedModule([FreeField("Lambda", 4, 0)])
    assert orientation_reverse(lam).field_rank("Lambda") == 4
    free = GradedModule([FreeField("Lambda", 2, 3, u_free=True)])
    assert orientation_reverse(free) == GradedModule([FreeField("Lambda", 2, -3, u_free=True)])
    with pytest.raises(UnsupportedError):
        orientation_reverse(GradedModule([Tower(0, "F2")]))


def test_orientation_reverse_of_a_long_string_matches_ext():
    U = LAMBDA_U.var("U")
    c = ChainComplex.from_entries([("a", -5), ("b", 0)], LAMBDA_U, [("b", "a", LAMBDA_U.power(U, 3))])
    h = homology(c)
    assert h == GradedModule([UTorsion(3, 0, "F2(t)")])
    assert orientation_reverse(h) == homology(dualize(c)) == GradedModule([UTorsion(3, 5, "F2(t)")])


@given(seed=seeds)
def test_orientation_reverse_is_an_involution(seed):
    m = random_u_module(make_rng(seed))
    assert orientation_reverse(orientation_reverse(m)) == m
