from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from twistfloer.errors import RingNotEuclideanError, ShapeError
from twistfloer.matrix import (
    F2Span,
    RingMatrix,
    determinant,
    divisibility_chain_holds,
    exponent_spread,
    f2_kernel,
    fraction_field_rank,
    novikov_rank,
    signature,
    smith_normal_form,
)
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
    make_rng,
    poly_ring,
)

SNF_RINGS = [ZZ, F2, F2T, LAURENT, RATFUNC, F2U, LAMBDA_U]
seeds = st.integers(0, 2**32 - 1)


def random_matrix(R, rng, max_size=6):
    r, c = rng.randint(1, max_size), rng.randint(1, max_size)
    return RingMatrix(R, [[R.random(rng) for _ in range(c)] for _ in range(r)], c)


# -- examples -----------------------------------------------------------------


def test_snf_linking_matrix():
    diag, rank, (P, Q) = smith_normal_form(RingMatrix(ZZ, [[-1, 1], [1, 0]]))
    assert diag == [1, 1] and rank == 2


def test_snf_identity_over_f2_polynomials():
    res = smith_normal_form(RingMatrix.identity(F2T, 3))
    assert res.diagonal == [F2Poly(1)] * 3 and res.rank == 3


def test_snf_diagonal_u_matrix():
    U = LAMBDA_U.var("U")
    m = RingMatrix(LAMBDA_U, [[U, LAMBDA_U.zero], [LAMBDA_U.zero, LAMBDA_U.power(U, 2)]])
    res = smith_normal_form(m)
    assert res.diagonal == [U, LAMBDA_U.power(U, 2)] and res.rank == 2


def test_snf_integer_torsion():
    res = smith_normal_form(RingMatrix(ZZ, [[2, 4], [6, 8]]))
    assert res.diagonal == [2, 4]


def test_snf_rejects_non_euclidean_rings():
    R2 = poly_ring(RATFUNC, ("U_z", "U_w0"))
    with pytest.raises(RingNotEuclideanError):
        smith_normal_form(RingMatrix.identity(R2, 2))
    with pytest.raises(RingNotEuclideanError):
        smith_normal_form(RingMatrix.identity(NOVIKOV, 2))


def test_signature_examples():
    assert signature([[-1, 1], [1, 0]]) == 0
    assert signature([[1]]) == 1
    assert signature([[-1]]) == -1
    assert signature([[0, 1], [1, 0]]) == 0
    with pytest.raises(ShapeError):
        signature([[0, 1], [2, 0]])


def test_determinant():
    assert determinant(RingMatrix(ZZ, [[-1, 1], [1, 0]])) == -1
    t = F2T.gen("t")
    m = RingMatrix(F2T, [[F2T.add(t, F2T.one), F2T.one], [F2T.one, t]])
    # (t+1)t + 1 = t^2 + t + 1
    assert determinant(m) == F2Poly(0b111)


# -- properties ---------------------------------------------------------------


@pytest.mark.parametrize("R", SNF_RINGS, ids=lambda r: r.name)
@given(seed=seeds)
def test_snf_properties(R, seed):
    m = random_matrix(R, make_rng(seed))
    res = smith_normal_form(m)
    D = res.P @ m @ res.Q
    assert D == res.D and D.is_diagonal()
    assert res.P @ res.p_inv == RingMatrix.identity(R, m.nrows)
    assert res.Q @ res.q_inv == RingMatrix.identity(R, m.ncols)
    diag = [D[i, i] for i in range(res.rank)]
    assert diag == list(res.diagonal)
    assert all(not R.is_zero(d) for d in diag)
    assert all(R.is_zero(D[i, i]) for i in range(res.rank, min(m.nrows, m.ncols)))
    assert divisibility_chain_holds(R, diag)
    assert res.rank == fraction_field_rank(m)


@given(seed=seeds)
def test_integer_snf_preserves_determinant(seed):
    rng = make_rng(seed)
    n = rng.randint(1, 5)
    m = RingMatrix(ZZ, [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)])
    res = smith_normal_form(m)
    prod = 1
    for d in res.diagonal:
        prod *= d
    assert abs(determinant(m)) == (prod if res.rank == n else 0)


@given(seed=seeds)
def test_signature_is_a_congruence_invariant(seed):
    rng = make_rng(seed)
    n = rng.randint(1, 4)
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            A[i][j] = A[j][i] = rng.randint(-3, 3)
    # random unimodular congruence
    P = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(3):
        i, j = rng.randrange(n), rng.randrange(n)
        if i != j:
            k = rng.randint(-2, 2)
            P[i] = [a + k * b for a, b in zip(P[i], P[j])]
    Pm = RingMatrix(ZZ, P)
    B = Pm @ RingMatrix(ZZ, A) @ Pm.transpose()
    assert signature(B) == signature(A)
    assert abs(signature(A)) <= fraction_field_rank(RingMatrix(ZZ, A))


def _novikov_matrix(rng, n, m):
    rows = []
    for _ in range(n):
        rows.append([NovikovElem(Fraction(rng.randint(-4, 8), 4) for _ in range(rng.randint(0, 3))) for _ in range(m)])
    return rows


@given(seed=seeds)
def test_novikov_rank_matches_laurent_oracle(seed):
    # exponents in (1/4)Z: substitute s = t^(1/4) and compute an exact rank over F2(s)
    rng = make_rng(seed)
    n, m = rng.randint(1, 4), rng.randint(1, 4)
    rows = _novikov_matrix(rng, n, m)
    spread = exponent_spread(rows)
    horizon = min(n, m) * spread + 1
    lrows = [[LaurentPoly.from_terms([int(4 * e) for e in a.support]) for a in r] for r in rows]
    exact = fraction_field_rank(RingMatrix(LAURENT, lrows, m))
    assert novikov_rank(rows, horizon) == exact


@given(seed=seeds)
def test_novikov_rank_with_three_spreads(seed):
    # horizon 3 * spread (positive when the spread is 0) reproduces the rank over F2(t)
    rng = make_rng(seed)
    n, m = rng.randint(1, 6), rng.randint(1, 6)
    M = RingMatrix(LAURENT, [[LAURENT.random(rng) for _ in range(m)] for _ in range(n)], m)
    horizon = 3 * exponent_spread(M) or 1
    assert novikov_rank(M, horizon) == fraction_field_rank(M)


def test_novikov_rank_example():
    one, t = NovikovElem([0]), NovikovElem([1])
    assert novikov_rank([[one, t], [t, t * t]], 5) == 1
    assert novikov_rank([[one, t], [t, one]], 5) == 2


# -- F2 bitmask linear algebra -------------------------------------------------


@given(st.lists(st.integers(0, 255), max_size=10))
def test_f2_span_and_kernel(cols):
    span = F2Span(cols)
    assert all(c in span for c in cols)
    kernel = f2_kernel(cols)
    assert len(span) + len(kernel) == len(cols)
    for comb in kernel:
        acc = 0
        for k, c in enumerate(cols):
            if comb >> k & 1:
                acc ^= c
        assert acc == 0
