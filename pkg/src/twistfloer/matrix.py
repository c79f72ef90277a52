"""Dense matrices over the rings of :mod:`twistfloer.rings` and their reductions."""

from __future__ import annotations

from fractions import Fraction

from .errors import RingNotEuclideanError, ShapeError
from .rings import (
    F2,
    F2T,
    LAURENT,
    NOVIKOV,
    RATFUNC,
    ZZ,
    NovikovElem,
    PolyRing,
    Ring,
    novikov_invert_truncated,
)


class RingMatrix:
    """Rectangular matrix with entries in a single ring.

    Rows are stored as tuples; the object is treated as immutable.
    """

    __slots__ = ("ring", "rows", "nrows", "ncols")

    def __init__(self, ring: Ring, rows, ncols=None):
        rows = tuple(tuple(ring.coerce(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ShapeError("rows have different lengths")
        self.ring = ring
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def zeros(cls, ring, nrows, ncols):
        return cls(ring, [[ring.zero] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, ring, n):
        return cls(ring, [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_sparse(cls, ring, nrows, ncols, entries):
        """Build from ``(row, col, value)`` triples; repeated positions add up."""
        rows = [[ring.zero] * ncols for _ in range(nrows)]
        for i, j, v in entries:
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise ShapeError(f"entry ({i}, {j}) outside a {nrows}x{ncols} matrix")
            rows[i][j] = ring.add(rows[i][j], ring.coerce(v))
        return cls(ring, rows, ncols)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def tolist(self):
        return [list(r) for r in self.rows]

    def column(self, j):
        return [r[j] for r in self.rows]

    def nonzero_entries(self):
        z = self.ring.is_zero
        return [(i, j, v) for i, r in enumerate(self.rows) for j, v in enumerate(r) if not z(v)]

    def transpose(self):
        return RingMatrix(self.ring, [list(c) for c in zip(*self.rows)] if self.nrows else [], self.nrows)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        R = self.ring
        cols = other.transpose().rows
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = R.zero
                for a, b in zip(r, c):
                    if not R.is_zero(a) and not R.is_zero(b):
                        acc = R.add(acc, R.mul(a, b))
                row.append(acc)
            out.append(row)
        return RingMatrix(R, out, other.ncols)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ShapeError("shape mismatch in addition")
        R = self.ring
        return RingMatrix(R, [[R.add(a, b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def scale(self, c):
        R = self.ring
        return RingMatrix(R, [[R.mul(c, a) for a in r] for r in self.rows], self.ncols)

    def map(self, fn, ring=None):
        ring = ring or self.ring
        return RingMatrix(ring, [[fn(a) for a in r] for r in self.rows], self.ncols)

    def is_zero(self):
        return all(self.ring.is_zero(a) for r in self.rows for a in r)

    def is_diagonal(self):
        return all(self.ring.is_zero(a) for i, r in enumerate(self.rows) for j, a in enumerate(r) if i != j)

    def submatrix(self, rows, cols):
        return RingMatrix(self.ring, [[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def __eq__(self, other):
        if not isinstance(other, RingMatrix) or self.shape != other.shape:
            return False
        R = self.ring
        return all(R.eq(a, b) for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def __hash__(self):
        return hash((self.ring.name, self.rows))

    def __repr__(self):
        fmt = self.ring.format
        body = "; ".join(", ".join(fmt(a) for a in r) for r in self.rows)
        return f"RingMatrix({self.ring.name}, [{body}])"


def as_matrix(m, ring=None) -> RingMatrix:
    if isinstance(m, RingMatrix):
        return m
    return RingMatrix(ring or ZZ, m)


# ---------------------------------------------------------------------------
# Smith normal form


class SNFResult:
    """Result of :func:`smith_normal_form`.

    Unpacks as ``(diagonal, rank, (P, Q))``; the inverses of ``P`` and ``Q``
    are kept as ``p_inv`` and ``q_inv``.
    """

    __slots__ = ("diagonal", "rank", "P", "Q", "p_inv", "q_inv", "D")

    def __init__(self, diagonal, rank, P, Q, p_inv, q_inv, D):
        self.diagonal = diagonal
        self.rank = rank
        self.P = P
        self.Q = Q
        self.p_inv = p_inv
        self.q_inv = q_inv
        self.D = D

    @property
    def transforms(self):
        return (self.P, self.Q)

    def __iter__(self):
        return iter((self.diagonal, self.rank, (self.P, self.Q)))

    def __repr__(self):
        fmt = self.P.ring.format
        return f"SNFResult(diag=[{', '.join(fmt(d) for d in self.diagonal)}], rank={self.rank})"


SNF_RINGS = ("ZZ", "F2", "F2[t]", "L(t)", "F2(t)")


def _check_euclidean(ring):
    if ring.name in SNF_RINGS:
        return
    if isinstance(ring, PolyRing) and ring.is_euclidean:
        return
    raise RingNotEuclideanError(f"smith_normal_form does not support ring {ring.name}")


class _Reducer:
    """Mutable working state: A together with P, P^-1, Q, Q^-1."""

    def __init__(self, m: RingMatrix):
        R = self.R = m.ring
        self.A = [list(r) for r in m.rows]
        self.nr, self.nc = m.nrows, m.ncols
        eye = lambda n: [[R.one if i == j else R.zero for j in range(n)] for i in range(n)]
        self.P, self.Pi = eye(self.nr), eye(self.nr)
        self.Q, self.Qi = eye(self.nc), eye(self.nc)

    # row i <- row i + c * row j
    def add_row(self, i, j, c):
        R = self.R
        for M in (self.A, self.P):
            M[i] = [R.add(a, R.mul(c, b)) for a, b in zip(M[i], M[j])]
        # P^-1 <- P^-1 * (I - c e_ij): column j -= c * column i
        for r in self.Pi:
            r[j] = R.sub(r[j], R.mul(c, r[i]))

    # column j <- column j + c * column i
    def add_col(self, j, i, c):
        R = self.R
        for M in (self.A, self.Q):
            for r in M:
                r[j] = R.add(r[j], R.mul(c, r[i]))
        # Q^-1 <- (I - c e_ij) * Q^-1: row i -= c * row j
        self.Qi[i] = [R.sub(a, R.mul(c, b)) for a, b in zip(self.Qi[i], self.Qi[j])]

    def swap_rows(self, i, j):
        if i == j:
            return
        for M in (self.A, self.P):
            M[i], M[j] = M[j], M[i]
        for r in self.Pi:
            r[i], r[j] = r[j], r[i]

    def swap_cols(self, i, j):
        if i == j:
            return
        for M in (self.A, self.Q):
            for r in M:
                r[i], r[j] = r[j], r[i]
        self.Qi[i], self.Qi[j] = self.Qi[j], self.Qi[i]

    def scale_row(self, i, u):
        R = self.R
        ui = R.inverse(u)
        for M in (self.A, self.P):
            M[i] = [R.mul(u, a) for a in M[i]]
        for r in self.Pi:
            r[i] = R.mul(r[i], ui)

    def min_entry(self, cells):
        R = self.R
        best = None
        for i, j in cells:
            a = self.A[i][j]
            if R.is_zero(a):
                continue
            key = (R.norm(a), i, j)
            if best is None or key < best:
                best = key
        return best


def smith_normal_form(m) -> SNFResult:
    """Smith normal form ``P * m * Q = D`` over a Euclidean domain.

    Pivots are entries of least Euclidean norm (ties go to the lowest
    row, then column).  Diagonal entries are normalized: positive over ZZ,
    monic otherwise, Laurent polynomials with lowest exponent 0.
    """
    m = as_matrix(m)
    R = m.ring
    _check_euclidean(R)
    w = _Reducer(m)
    A = w.A
    nr, nc = w.nr, w.nc
    t = 0
    while t < min(nr, nc):
        best = w.min_entry((i, j) for i in range(t, nr) for j in range(t, nc))
        if best is None:
            break
        _, i0, j0 = best
        w.swap_rows(t, i0)
        w.swap_cols(t, j0)
        while True:
            piv = A[t][t]
            for i in range(t + 1, nr):
                if not R.is_zero(A[i][t]):
                    q, _ = R.divmod(A[i][t], piv)
                    w.add_row(i, t, R.neg(q))
            for j in range(t + 1, nc):
                if not R.is_zero(A[t][j]):
                    q, _ = R.divmod(A[t][j], piv)
                    w.add_col(j, t, R.neg(q))
            cells = [(i, t) for i in range(t + 1, nr)] + [(t, j) for j in range(t + 1, nc)]
            rest = w.min_entry(cells)
            if rest is not None:
                # a remainder survived; it has smaller norm than the pivot
                _, i1, j1 = rest
                w.swap_rows(t, i1)
                w.swap_cols(t, j1)
                continue
            bad = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    a = A[i][j]
                    if not R.is_zero(a) and not R.is_zero(R.divmod(a, piv)[1]):
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            w.add_row(t, bad, R.one)
        u = R.unit_normal(A[t][t])
        if not R.is_zero(R.sub(u, R.one)):
            w.scale_row(t, u)
        t += 1
    rank = t
    diag = [A[i][i] for i in range(rank)]
    mk = lambda rows, n: RingMatrix(R, rows, n)
    return SNFResult(diag, rank, mk(w.P, nr), mk(w.Q, nc), mk(w.Pi, nr), mk(w.Qi, nc), mk(A, nc))


def divisibility_chain_holds(ring, diag) -> bool:
    for a, b in zip(diag, diag[1:]):
        if ring.is_field:
            continue
        if not ring.is_zero(ring.divmod(b, a)[1]):
            return False
    return True


def determinant(m) -> object:
    """Determinant by fraction-free cofactor-free elimination over the fraction field."""
    m = as_matrix(m)
    if m.nrows != m.ncols:
        raise ShapeError("determinant of a non-square matrix")
    R = m.ring
    if R is ZZ:
        rows = [[Fraction(a) for a in r] for r in m.rows]
        return int(_field_det(rows, Fraction(0), Fraction(1)))
    if R is RATFUNC:
        return _field_det([list(r) for r in m.rows], R.zero, R.one)
    if R is F2:
        rows = [[RATFUNC.coerce(a) for a in r] for r in m.rows]
        return 1 if _field_det(rows, RATFUNC.zero, RATFUNC.one) else 0
    if R is F2T or R is LAURENT:
        rows = [[RATFUNC.coerce(a) for a in r] for r in m.rows]
        d = _field_det(rows, RATFUNC.zero, RATFUNC.one)
        if R is F2T:
            assert d.den.bits == 1
            return d.num
        return d.to_laurent()
    # general commutative ring: Laplace expansion (small matrices only)
    return _laplace(m.tolist(), R)


def _field_det(rows, zero, one):
    n = len(rows)
    det = one
    for k in range(n):
        p = next((i for i in range(k, n) if rows[i][k] != zero), None)
        if p is None:
            return zero
        if p != k:
            rows[k], rows[p] = rows[p], rows[k]
            det = -det
        piv = rows[k][k]
        det = det * piv
        inv = one / piv
        for i in range(k + 1, n):
            if rows[i][k] != zero:
                f = rows[i][k] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[k])]
    return det


def _laplace(rows, R):
    n = len(rows)
    if n == 0:
        return R.one
    out = R.zero
    for j in range(n):
        a = rows[0][j]
        if R.is_zero(a):
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = R.mul(a, _laplace(minor, R))
        out = R.add(out, term if j % 2 == 0 else R.neg(term))
    return out


# ---------------------------------------------------------------------------
# rank over the fraction field (independent of SNF)


def fraction_field_rank(m) -> int:
    """Rank by plain Gaussian elimination over the fraction field of the entry ring."""
    m = as_matrix(m)
    R = m.ring
    if R is ZZ:
        rows = [[Fraction(a) for a in r] for r in m.rows]
        zero = Fraction(0)
    elif R in (F2, F2T, LAURENT, RATFUNC):
        rows = [[RATFUNC.coerce(a) for a in r] for r in m.rows]
        zero = RATFUNC.zero
    elif isinstance(R, PolyRing):
        return _poly_rank(m)
    else:
        raise RingNotEuclideanError(f"no fraction field available for {R.name}")
    return _eliminate_rank(rows, zero, lambda a, b: a / b)


def _eliminate_rank(rows, zero, div):
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        p = next((i for i in range(rank, len(rows)) if rows[i][c] != zero), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        piv = rows[rank][c]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != zero:
                f = div(rows[i][c], piv)
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _poly_rank(m):
    """Rank over the fraction field of a polynomial ring via evaluation.

    The rank over K(U...) equals the maximum rank of specializations; we
    use fraction-free elimination on the polynomials themselves instead,
    which is exact.
    """
    R = m.ring
    rows = [list(r) for r in m.rows]
    rank = 0
    ncols = m.ncols
    for c in range(ncols):
        p = next((i for i in range(rank, len(rows)) if not R.is_zero(rows[i][c])), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        piv = rows[rank][c]
        for i in range(len(rows)):
            if i != rank and not R.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [R.sub(R.mul(piv, a), R.mul(f, b)) for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# signature


def signature(m) -> int:
    """Signature of a symmetric integer matrix by congruence diagonalization over QQ."""
    m = as_matrix(m)
    if m.nrows != m.ncols:
        raise ShapeError("signature needs a square matrix")
    A = [[Fraction(int(a)) for a in r] for r in m.rows]
    n = len(A)
    for i in range(n):
        for j in range(i):
            if A[i][j] != A[j][i]:
                raise ShapeError("signature needs a symmetric matrix")
    pos = neg = 0
    for k in range(n):
        if A[k][k] == 0:
            j = next((j for j in range(k + 1, n) if A[j][j] != 0), None)
            if j is not None:
                A[k], A[j] = A[j], A[k]
                for r in A:
                    r[k], r[j] = r[j], r[k]
            else:
                j = next((j for j in range(k + 1, n) if A[k][j] != 0), None)
                if j is None:
                    continue
                # row k += row j, column k += column j; new A[k][k] = 2 A[k][j]
                A[k] = [a + b for a, b in zip(A[k], A[j])]
                for r in A:
                    r[k] = r[k] + r[j]
        piv = A[k][k]
        for i in range(k + 1, n):
            if A[i][k] != 0:
                f = A[i][k] / piv
                A[i] = [a - f * b for a, b in zip(A[i], A[k])]
                for r in A:
                    r[i] = r[i] - f * r[k]
        if piv > 0:
            pos += 1
        elif piv < 0:
            neg += 1
    return pos - neg


# ---------------------------------------------------------------------------
# rank over the Novikov field with finite precision


def novikov_rank(m, horizon) -> int:
    """Rank of a matrix of Novikov elements, computed modulo ``t^horizon``.

    The matrix is first scaled by a monomial so its least exponent is 0.
    Full pivoting on least valuation keeps every entry at absolute
    precision ``horizon``; an entry counts as zero when it has no term
    below the horizon.  Ranks are exact once the horizon exceeds the
    valuation of a nonzero maximal minor, which is at most
    ``size * spread`` for a matrix of exponent spread ``spread``.
    """
    if isinstance(m, RingMatrix):
        rows = [[NOVIKOV.coerce(a) for a in r] for r in m.rows]
    else:
        rows = [[NOVIKOV.coerce(a) for a in r] for r in m]
    horizon = Fraction(horizon)
    lows = [a.min_exp for r in rows for a in r if a]
    if not lows:
        return 0
    low = min(lows)
    rows = [[a.shift(-low) for a in r] for r in rows]
    nr, nc = len(rows), len(rows[0])
    cut = lambda a: a.truncate(horizon)
    rows = [[cut(a) for a in r] for r in rows]
    rank = 0
    live_rows = list(range(nr))
    live_cols = list(range(nc))
    while True:
        best = None
        for i in live_rows:
            for j in live_cols:
                a = rows[i][j]
                if a:
                    key = (a.min_exp, i, j)
                    if best is None or key < best:
                        best = key
        if best is None:
            return rank
        _, pi, pj = best
        inv = novikov_invert_truncated(rows[pi][pj], horizon)
        for i in live_rows:
            if i == pi or not rows[i][pj]:
                continue
            q = cut(rows[i][pj] * inv)
            rows[i] = [cut(a + q * b) for a, b in zip(rows[i], rows[pi])]
            rows[i][pj] = NovikovElem()
        live_rows.remove(pi)
        live_cols.remove(pj)
        rank += 1


def exponent_spread(m) -> Fraction:
    """Largest exponent minus smallest exponent over all entries."""
    rows = m.rows if isinstance(m, RingMatrix) else m
    exps = []
    for r in rows:
        for a in r:
            a = NOVIKOV.coerce(a)
            exps.extend(a.support)
    return max(exps) - min(exps) if exps else Fraction(0)


# ---------------------------------------------------------------------------
# GF(2) vectors as int bitmasks


class F2Span:
    """Echelon basis of a subspace of F2^n; vectors are int bitmasks."""

    __slots__ = ("basis",)

    def __init__(self, vectors=()):
        self.basis = {}  # leading bit -> vector
        for v in vectors:
            self.add(v)

    def reduce(self, v):
        while v:
            lead = v.bit_length() - 1
            b = self.basis.get(lead)
            if b is None:
                return v
            v ^= b
        return 0

    def add(self, v):
        """Insert ``v``; return True if it enlarged the span."""
        v = self.reduce(v)
        if v:
            self.basis[v.bit_length() - 1] = v
            return True
        return False

    def __contains__(self, v):
        return self.reduce(v) == 0

    def __len__(self):
        return len(self.basis)

    def copy(self):
        out = F2Span()
        out.basis = dict(self.basis)
        return out


def f2_kernel(columns):
    """Kernel of the map sending basis vector ``k`` to ``columns[k]`` (bitmasks).

    Returns kernel vectors as bitmasks over the source indices.
    """
    pivots = {}  # leading bit -> (image, combination)
    kernel = []
    for k, col in enumerate(columns):
        img, comb = col, 1 << k
        while img:
            lead = img.bit_length() - 1
            hit = pivots.get(lead)
            if hit is None:
                break
            img ^= hit[0]
            comb ^= hit[1]
        if img:
            pivots[img.bit_length() - 1] = (img, comb)
        else:
            kernel.append(comb)
    return kernel
