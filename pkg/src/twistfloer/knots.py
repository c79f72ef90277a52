"""Full knot complexes of thin knots and the large-surgery formula.

A thin knot's complex is a staircase (carrying tau) plus a number of
acyclic square "boxes".  Generators carry an Alexander grading ``A`` and a
Maslov grading ``M``; an arrow with drops ``(a, b)`` goes from ``[x, i, j]``
to ``[y, i - a, j - b]``, so ``M(y) - 2a = M(x) - 1`` and
``A(y) = A(x) + a - b``.
"""

from __future__ import annotations

import random as _random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .complexes import ChainComplex, FreeField, GradedModule, Tower, UTorsion, homology
from .errors import FormulaRangeError, SpecError, TruncationError
from .matrix import F2Span, RingMatrix, f2_kernel
from .rings import F2

# absolute shift applied to M + 2i on surgery subquotients; the value 0
# puts D-(U,1), p=1, s=0 at grading -2
SURGERY_GRADING_SHIFT = Fraction(0)

MAX_TRUNCATION = 512


@dataclass(frozen=True)
class ThinKnotSpec:
    """Symmetric Alexander coefficients ``a_{-g}..a_g`` and the signature."""

    alexander: tuple
    sigma: int
    name: str = ""

    def __post_init__(self):
        coeffs = tuple(int(a) for a in self.alexander)
        object.__setattr__(self, "alexander", coeffs)
        if len(coeffs) % 2 == 0:
            raise SpecError("the Alexander list must have odd length (exponents -g..g)")
        if coeffs != coeffs[::-1]:
            raise SpecError("the Alexander polynomial must be symmetric")
        if self.sigma % 2:
            raise SpecError("the signature of a knot is even")
        if sum(coeffs) not in (1, -1):
            raise SpecError("a knot's Alexander polynomial satisfies Delta(1) = +-1")

    @property
    def tau(self) -> int:
        return -self.sigma // 2

    @property
    def delta(self) -> int:
        """The constant A - M on generators."""
        return self.tau

    @property
    def genus(self) -> int:
        """Degree of the symmetrized Alexander polynomial (the genus for thin knots)."""
        coeffs = self.coefficients()
        nz = [s for s, a in coeffs.items() if a]
        return max(abs(s) for s in nz) if nz else 0

    def coefficients(self) -> dict:
        g = (len(self.alexander) - 1) // 2
        return {s: a for s, a in zip(range(-g, g + 1), self.alexander)}

    @classmethod
    def from_dict(cls, d):
        if "alexander" not in d or "sigma" not in d:
            raise SpecError("a thin knot spec needs 'alexander' and 'sigma'")
        return cls(tuple(d["alexander"]), int(d["sigma"]), str(d.get("name", "")))

    def to_dict(self):
        out = {"alexander": list(self.alexander), "sigma": self.sigma}
        if self.name:
            out["name"] = self.name
        return out


def twist_knot_spec(n: int) -> ThinKnotSpec:
    """D-(U, n) for n >= 1: Delta = n(t + 1/t) + 1 - 2n, sigma = -2."""
    if n < 1:
        raise SpecError("twist_knot_spec needs n >= 1; use the mirror for the other sign")
    return ThinKnotSpec((n, 1 - 2 * n, n), -2, f"D-(U,{n})")


UNKNOT = ThinKnotSpec((1,), 0, "unknot")


@dataclass(frozen=True)
class Arrow:
    source: str
    target: str
    idrop: int
    jdrop: int


@dataclass(frozen=True)
class KnotComplex:
    """Generators ``(name, A, M)`` and filtered arrows; validated on construction."""

    generators: tuple
    arrows: tuple
    name: str = ""
    _index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        gens = tuple((str(n), int(a), Fraction(m)) for n, a, m in self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "arrows", tuple(self.arrows))
        object.__setattr__(self, "_index", {g[0]: k for k, g in enumerate(gens)})
        if len(self._index) != len(gens):
            raise SpecError("generator names must be distinct")
        self._validate()

    def _validate(self):
        for ar in self.arrows:
            if ar.source not in self._index or ar.target not in self._index:
                raise SpecError(f"arrow {ar} refers to an unknown generator")
            if ar.idrop < 0 or ar.jdrop < 0:
                raise SpecError("filtration drops must be non-negative")
            _, ax, mx = self.gen(ar.source)
            _, ay, my = self.gen(ar.target)
            if my - 2 * ar.idrop != mx - 1:
                raise SpecError(f"arrow {ar.source}->{ar.target} does not drop M by 1")
            if ay != ax + ar.idrop - ar.jdrop:
                raise SpecError(f"arrow {ar.source}->{ar.target} is inconsistent with A")
        # d^2 = 0 in CFK-infinity: paths x -> y -> z cancel per (z, total drop)
        out = {}
        for ar in self.arrows:
            out.setdefault(ar.source, []).append(ar)
        for x in self._index:
            count = {}
            for a1 in out.get(x, []):
                for a2 in out.get(a1.target, []):
                    key = (a2.target, a1.idrop + a2.idrop, a1.jdrop + a2.jdrop)
                    count[key] = count.get(key, 0) ^ 1
            if any(count.values()):
                raise SpecError(f"d^2 is nonzero on {x}")

    def gen(self, name):
        return self.generators[self._index[name]]

    @property
    def names(self):
        return [g[0] for g in self.generators]

    def alexander_counts(self) -> dict:
        out = {}
        for _, a, _ in self.generators:
            out[a] = out.get(a, 0) + 1
        return dict(sorted(out.items()))

    def mirror(self) -> "KnotComplex":
        """Dual complex: negate A and M and reverse every arrow."""
        gens = [(n, -a, -m) for n, a, m in self.generators]
        arrows = [Arrow(ar.target, ar.source, ar.idrop, ar.jdrop) for ar in self.arrows]
        return KnotComplex(tuple(gens), tuple(arrows), f"mirror({self.name})" if self.name else "")

    def genus(self) -> int:
        return max((abs(a) for _, a, _ in self.generators), default=0)

    def to_dict(self):
        idx = self._index
        return {
            "generators": [
                {"name": n, "grading": _fmt(m), "alexander": a} for n, a, m in self.generators
            ],
            "ring": "F2",
            "entries": [
                {"row": idx[ar.target], "col": idx[ar.source], "coeff": "1", "idrop": ar.idrop, "jdrop": ar.jdrop}
                for ar in self.arrows
            ],
        }

    @classmethod
    def from_dict(cls, d):
        gens = [(g["name"], int(g["alexander"]), Fraction(g["grading"])) for g in d["generators"]]
        names = [g[0] for g in gens]
        arrows = [Arrow(names[e["col"]], names[e["row"]], int(e["idrop"]), int(e["jdrop"])) for e in d["entries"]]
        return cls(tuple(gens), tuple(arrows))


def _sign(k):
    return -1 if k % 2 else 1


def _fmt(g):
    g = Fraction(g)
    return str(g.numerator) if g.denominator == 1 else f"{g.numerator}/{g.denominator}"


# ---------------------------------------------------------------------------
# building thin complexes


def box_counts(spec: ThinKnotSpec) -> dict:
    """Number of boxes centred at each Alexander grading ``s``.

    Solves ``(Delta - staircase) / (t - 1)^2 = sum_s (-1)^(s + 1 - delta) b_s t^(s-1)``
    where Delta is normalized so Delta(1) = 1.
    """
    tau = abs(spec.tau)
    delta = tau
    sign = 1 if sum(spec.alexander) == 1 else -1
    coeffs = {s: sign * a for s, a in spec.coefficients().items()}
    for k in range(2 * tau + 1):
        s = tau - k
        coeffs[s] = coeffs.get(s, 0) - _sign(k)
    # divide the Laurent polynomial by (t - 1)^2 = t^2 - 2t + 1, top-down
    rem = {s: a for s, a in coeffs.items() if a}
    quot = {}
    while rem:
        top = max(rem)
        c = rem[top]
        e = top - 2
        quot[e] = c
        for shift, k in ((2, 1), (1, -2), (0, 1)):
            key = e + shift
            rem[key] = rem.get(key, 0) - c * k
            if rem[key] == 0:
                del rem[key]
        if quot and min(quot) < -len(spec.alexander) - 2:
            raise SpecError("Delta minus the staircase is not divisible by (t-1)^2")
    counts = {}
    for e, c in quot.items():
        s = e + 1
        b = c * _sign(s + 1 - delta)
        if b < 0:
            raise SpecError(
                f"the Alexander polynomial needs {b} boxes at A={s}; no thin complex with tau={spec.tau} realizes it"
            )
        if b:
            counts[s] = b
    return dict(sorted(counts.items()))


def _staircase(tau):
    """Staircase for tau >= 0, named a_1..a_{2tau+1} by ascending A."""
    gens, arrows = [], []
    names = {}
    for k in range(2 * tau + 1):
        a = tau - k
        name = f"a_{2 * tau + 1 - k}"
        names[k] = name
        gens.append((name, a, a - tau))
    for k in range(1, 2 * tau + 1, 2):
        arrows.append(Arrow(names[k], names[k - 1], 1, 0))
        arrows.append(Arrow(names[k], names[k + 1], 0, 1))
    return gens, arrows


def _box(s, delta, i):
    m = s - delta
    x, y, z, w = (f"{c}_{i}" for c in "xyzw")
    gens = [(x, s, m), (y, s + 1, m + 1), (z, s - 1, m - 1), (w, s, m)]
    arrows = [Arrow(x, y, 1, 0), Arrow(x, z, 0, 1), Arrow(y, w, 0, 1), Arrow(z, w, 1, 0)]
    return gens, arrows


def build_thin_complex(spec: ThinKnotSpec) -> KnotComplex:
    """The staircase-plus-boxes model of a thin knot's full complex."""
    tau = spec.tau
    counts = box_counts(spec)
    t = abs(tau)
    gens, arrows = _staircase(t)
    i = 1
    for s, b in counts.items():
        for _ in range(b):
            g, a = _box(s, t, i)
            gens += g
            arrows += a
            i += 1
    kc = KnotComplex(tuple(gens), tuple(arrows), spec.name)
    if tau < 0:
        kc = kc.mirror()
        kc = KnotComplex(kc.generators, kc.arrows, spec.name)
    return kc


def random_thin_spec(rng, max_genus=3) -> ThinKnotSpec:
    """A random realizable spec: pick tau and A-symmetric box counts, then read off Delta."""
    tau = rng.randint(-max_genus, max_genus)
    t = abs(tau)
    coeffs = {}
    for k in range(2 * t + 1):
        coeffs[t - k] = coeffs.get(t - k, 0) + _sign(k)
    for s in range(0, max_genus):
        b = rng.randint(0, 2)
        if not b:
            continue
        centres = [0] if s == 0 else [s, -s]
        for c in centres:
            sign = _sign(c + 1 - t)
            for shift, k in ((1, 1), (0, -2), (-1, 1)):
                coeffs[c + shift] = coeffs.get(c + shift, 0) + sign * b * k
    g = max((abs(s) for s, a in coeffs.items() if a), default=0)
    alex = [coeffs.get(s, 0) for s in range(-g, g + 1)]
    return ThinKnotSpec(tuple(alex), -2 * tau, "random")


# ---------------------------------------------------------------------------
# invariants


def euler_characteristic_column(k: KnotComplex) -> dict:
    """Sum over generators of (-1)^M t^A, as exponent -> integer coefficient."""
    out = {}
    for _, a, m in k.generators:
        if m.denominator != 1:
            raise SpecError("Maslov gradings of a knot complex are integers")
        out[a] = out.get(a, 0) + (1 if int(m) % 2 == 0 else -1)
    return {a: c for a, c in sorted(out.items()) if c}


def _column_complex(k: KnotComplex, keep) -> ChainComplex:
    names = k.names
    idx = {n: i for i, n in enumerate(names)}
    gens = [(n, m) for n, _, m in k.generators]
    trip = [(idx[ar.target], idx[ar.source], 1) for ar in k.arrows if keep(ar)]
    return ChainComplex(gens, F2, RingMatrix.from_sparse(F2, len(gens), len(gens), trip))


def vertical_homology(k: KnotComplex) -> GradedModule:
    """Homology of the column C{i=0} (arrows with no horizontal drop), graded by M."""
    return homology(_column_complex(k, lambda ar: ar.idrop == 0))


def hfk_hat(k: KnotComplex) -> dict:
    """Dimensions of the associated graded homology, keyed by (A, M)."""
    out = {}
    for a in sorted({a for _, a, _ in k.generators}):
        sub = [g for g in k.generators if g[1] == a]
        names = {g[0] for g in sub}
        arrows = [ar for ar in k.arrows if (ar.idrop, ar.jdrop) == (0, 0) and ar.source in names]
        piece = KnotComplex(tuple(sub), tuple(arrows))
        for s in homology(_column_complex(piece, lambda ar: True)):
            out[(a, s.grading)] = s.rank
    return dict(sorted(out.items()))


# ---------------------------------------------------------------------------
# large surgery


@dataclass(frozen=True)
class SurgeryRequest:
    p: int
    s: int = 0
    flavor: str = "hat"
    truncation: Optional[int] = None

    def __post_init__(self):
        if self.flavor not in ("hat", "plus"):
            raise ValueError("flavor must be 'hat' or 'plus'")


def _check_range(k: KnotComplex, req: SurgeryRequest):
    g = k.genus()
    if req.p < 2 * g - 1:
        raise FormulaRangeError(f"the large surgery formula needs p >= 2g-1 = {2 * g - 1}, got p={req.p}")
    if 2 * abs(req.s) > req.p:
        raise FormulaRangeError(f"the Spin^c index must satisfy |s| <= p/2, got s={req.s}, p={req.p}")


def surgery_hat_complex(k: KnotComplex, s: int) -> ChainComplex:
    """The finite subquotient C{max(i, j - s) = 0} as an F2 complex."""
    cells = {}
    for n, a, m in k.generators:
        i = 0 if a <= s else s - a
        cells[n] = (i, i + a)
    gens, idx = [], {}
    for n, a, m in k.generators:
        i, j = cells[n]
        idx[n] = len(gens)
        gens.append((f"[{n},{i},{j}]", m + 2 * i + SURGERY_GRADING_SHIFT))
    trip = []
    for ar in k.arrows:
        i, j = cells[ar.source]
        ti, tj = i - ar.idrop, j - ar.jdrop
        if max(ti, tj - s) == 0 and cells[ar.target] == (ti, tj):
            trip.append((idx[ar.target], idx[ar.source], 1))
    n = len(gens)
    return ChainComplex(gens, F2, RingMatrix.from_sparse(F2, n, n, trip))


def large_surgery(k: KnotComplex, req: SurgeryRequest) -> GradedModule:
    """Floer homology of large surgery on the knot, via the subquotient complexes."""
    _check_range(k, req)
    if req.flavor == "hat":
        return homology(surgery_hat_complex(k, req.s))
    return _plus_flavor(k, req)


def _plus_flavor(k, req):
    if req.truncation is not None:
        cur = plus_truncated(k, req.s, req.truncation)
        if cur is None or cur != plus_truncated(k, req.s, 2 * req.truncation):
            raise TruncationError(
                f"HF+ has not stabilized at truncation {req.truncation}",
                suggested_n=_stable_truncation(k, req.s)[0],
            )
        return cur
    return _stable_truncation(k, req.s)[1]


def _stable_truncation(k, s):
    """Double N from 2g+4 until two consecutive truncations agree."""
    n = 2 * k.genus() + 4
    prev = plus_truncated(k, s, n)
    while n <= MAX_TRUNCATION:
        cur = plus_truncated(k, s, 2 * n)
        if cur is not None and cur == prev:
            return n, cur
        prev = cur
        n *= 2
    raise TruncationError(f"HF+ did not stabilize up to truncation {MAX_TRUNCATION}", suggested_n=2 * n)


def plus_truncated(k: KnotComplex, s: int, N: int):
    """HF+ read off from C{0 <= max(i, j - s) <= N}; None if the tower is not isolated.

    This truncation is the kernel of U^(N+1) on the chain level, so its
    homology is ker U^(N+1) on HF+ (one U-string of length N+1 plus the
    reduced part) together with coker U^(N+1), a copy of the reduced part
    shifted up by 2N+1.  Strings with top above bottom + N are that copy.
    """
    cells = []  # (name, i, j, grading)
    where = {}
    for n, a, m in k.generators:
        c = max(0, a - s)
        for i in range(-c, N - c + 1):
            where[(n, i)] = len(cells)
            cells.append((n, i, i + a, m + 2 * i + SURGERY_GRADING_SHIFT))
    out_arrows = {}
    for ar in k.arrows:
        out_arrows.setdefault(ar.source, []).append(ar)
    size = len(cells)
    dcols = []
    ucols = []
    for n, i, j, g in cells:
        v = 0
        for ar in out_arrows.get(n, []):
            t = where.get((ar.target, i - ar.idrop))
            if t is not None:
                v ^= 1 << t
        dcols.append(v)
        t = where.get((n, i - 1))
        ucols.append(1 << t if t is not None else 0)
    by_grading = {}
    for idx, c in enumerate(cells):
        by_grading.setdefault(c[3], []).append(idx)

    def apply(cols, vec):
        out = 0
        while vec:
            low = vec & -vec
            out ^= cols[low.bit_length() - 1]
            vec ^= low
        return out

    cycles, bounds = {}, {}
    for g, members in by_grading.items():
        ker = f2_kernel([dcols[m] for m in members])
        cycles[g] = [_lift(v, members) for v in ker]
    for g in by_grading:
        members = by_grading.get(g + 1, [])
        bounds[g] = F2Span(dcols[m] for m in members)

    dims = {g: len(cycles[g]) - len(bounds[g]) for g in by_grading}
    dims = {g: d for g, d in dims.items() if d}

    def u_rank(g, power):
        target = g - 2 * power
        if target not in bounds or g not in cycles:
            return 0
        span = bounds[target].copy()
        base = len(span)
        for z in cycles[g]:
            v = z
            for _ in range(power):
                v = apply(ucols, v)
            span.add(v)
        return len(span) - base

    memo = {}

    def a(g, power):
        key = (g, power)
        if key not in memo:
            memo[key] = u_rank(g, power) if power > 0 else dims.get(g, 0)
        return memo[key]

    blocks = []
    for g in sorted(dims):
        for length in range(1, N + 2):
            cnt = (a(g, length - 1) - a(g, length)) - (a(g + 2, length) - a(g + 2, length + 1))
            if cnt:
                blocks.append((g, length, cnt))
    long = [b for b in blocks if b[1] == N + 1]
    if len(long) != 1 or long[0][2] != 1:
        return None
    top, length, _ = long[0]
    bottom = top - 2 * (length - 1)
    summands = [Tower(bottom, "F2")]
    for g, length, cnt in blocks:
        if length == N + 1 or g > bottom + N:
            continue
        if length > N // 2:
            return None  # a reduced string this long means the truncation is too small
        summands.append(UTorsion(length, g, "F2", cnt))
    return GradedModule(summands)


def _lift(vec, members):
    out = 0
    k = 0
    while vec:
        if vec & 1:
            out |= 1 << members[k]
        vec >>= 1
        k += 1
    return out
