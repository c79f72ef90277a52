"""The acceptance sweep: ten exact checks, each against an independent oracle."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .complexes import FreeField, GradedModule, Tower, graded_dimensions, homology, stabilize, random_upoly_complex
from .errors import TwistFloerError
from .excision import (
    compute_borromean_zero_surgery,
    compute_two_bridge,
    compute_twist_knot_zero_surgery,
    compute_whitehead_zero_surgery,
    non_relatedness_check,
)
from .knots import (
    SurgeryRequest,
    build_thin_complex,
    euler_characteristic_column,
    large_surgery,
    random_thin_spec,
    twist_knot_spec,
    vertical_homology,
)
from .matrix import RingMatrix, divisibility_chain_holds, fraction_field_rank, smith_normal_form
from .rings import F2, F2T, F2U, LAURENT, RATFUNC, ZZ, make_rng, poly_ring
from .sequences import c1_square, grading_shift, orientation_reverse, random_u_module, surgery_triangle_cobordisms

SEED = 20240601
LAMBDA = "Lambda"


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    anchor: str
    passed: bool
    detail: str

    def to_dict(self):
        return {
            "criterion": self.number,
            "title": self.title,
            "anchor": self.anchor,
            "passed": self.passed,
            "detail": self.detail,
        }


def _only_lambda(m: GradedModule):
    """(rank, number of distinct gradings) if m is a sum of finite Lambda-vector spaces, else None."""
    if any(not isinstance(s, FreeField) or s.u_free or s.ring != LAMBDA for s in m):
        return None
    return m.field_rank(LAMBDA), len({s.grading for s in m})


def check_surgery_table(nmax=20):
    bad = []
    for n in range(1, nmax + 1):
        hat = large_surgery(build_thin_complex(twist_knot_spec(n)), SurgeryRequest(1, 0, "hat"))
        want = {g: d for g, d in ((-1, n - 1), (-2, n)) if d}
        if hat.dims() != want:
            bad.append(f"n={n}: {hat.dims()}")
    return not bad, f"n=1..{nmax}" + ("" if not bad else "; " + "; ".join(bad))


def check_twisted_zero_surgery(nmax=10):
    bad = []
    for n in [k for k in range(-nmax, nmax + 1) if k]:
        got = _only_lambda(compute_twist_knot_zero_surgery(n))
        if got != (abs(n), 1):
            bad.append(f"n={n}: {got}")
    return not bad, f"n in [-{nmax}, {nmax}] without 0" + ("" if not bad else "; " + "; ".join(bad))


def _kunneth_oracle(a, b):
    # rank of the Kronecker product of identities, by Gaussian elimination
    rows = [[RATFUNC.one if i == j else RATFUNC.zero for j in range(a * b)] for i in range(a * b)]
    return fraction_field_rank(RingMatrix(RATFUNC, rows, a * b)) if a * b else 0


def check_whitehead_borromean(kmax=8):
    bad = []
    vals = [k for k in range(-kmax, kmax + 1) if k]
    wh = {}
    for n in vals:
        wh[n] = compute_whitehead_zero_surgery(n)
        if wh[n].field_rank(LAMBDA) != abs(n):
            bad.append(f"Wh({n})")
    for m in vals:
        for n in vals:
            got = compute_borromean_zero_surgery(m, n)
            oracle = _kunneth_oracle(abs(m), abs(n))
            if _only_lambda(got) is None or got.field_rank(LAMBDA) != abs(m * n) or oracle != abs(m * n):
                bad.append(f"B({m},{n})")
    return not bad, f"1 <= |m|,|n| <= {kmax}" + ("" if not bad else "; failed " + ", ".join(bad[:10]))


def check_two_bridge(kmax=6):
    bad, count = [], 0
    for m in range(-kmax, kmax + 1):
        for n in range(-kmax, kmax + 1):
            if not m or not n or abs(m + n) > 1:
                continue
            count += 1
            got = compute_two_bridge(m, 1, n)
            towers = [s for s in got if isinstance(s, Tower)]
            finite = GradedModule([s for s in got if not isinstance(s, Tower)])
            ok = _only_lambda(finite) is not None and finite.field_rank(LAMBDA) == abs(m * n)
            ok = ok and len(towers) == (0 if m == -n else 1)
            if not ok:
                bad.append(f"({m},{n})")
    return not bad, f"{count} pairs" + ("" if not bad else "; failed " + ", ".join(bad))


def check_grading_arithmetic(jmax=20):
    w1, w2, _ = surgery_triangle_cobordisms()
    shifts = (grading_shift(w1), grading_shift(w2))
    ok = shifts == (Fraction(-1, 2), Fraction(-1, 2))
    worst = max((c1_square(-1, j) + 1) / 4 for j in range(-jmax, jmax + 1))
    for j in range(-jmax, jmax + 1):
        if grading_shift(surgery_triangle_cobordisms(j)[2]) != (c1_square(-1, j) + 1) / 4:
            ok = False
    ok = ok and worst <= 0
    return ok, f"shifts {shifts[0]}, {shifts[1]}; max f3 shift over j in [-{jmax}, {jmax}] is {worst}"


def check_stabilization(samples=100):
    rng = make_rng(SEED + 6)
    ring = poly_ring(RATFUNC, ("U_z",))
    bad = 0
    for _ in range(samples):
        c = random_upoly_complex(rng, ring)
        lo, hi = min(c.gradings) - 8, max(c.gradings) + 1
        if graded_dimensions(stabilize(c), lo, hi) != homology(c).graded_dims(lo, hi):
            bad += 1
    return not bad, f"{samples} random complexes, {bad} mismatches"


SNF_TEST_RINGS = (ZZ, F2, F2T, LAURENT, RATFUNC, F2U)


def _snf_ok(m):
    R = m.ring
    s = smith_normal_form(m)
    D = s.P @ m @ s.Q
    if D != s.D or not D.is_diagonal():
        return False
    diag = [D[i, i] for i in range(min(m.nrows, m.ncols))]
    nonzero = [d for d in diag if not R.is_zero(d)]
    if nonzero != list(s.diagonal[: len(nonzero)]) or len(nonzero) != s.rank:
        return False
    if not divisibility_chain_holds(R, nonzero):
        return False
    return s.rank == fraction_field_rank(m)


def check_snf(samples=200):
    rng = make_rng(SEED + 7)
    bad = []
    for R in SNF_TEST_RINGS:
        for _ in range(samples):
            r, c = rng.randint(1, 6), rng.randint(1, 6)
            m = RingMatrix(R, [[R.random(rng) for _ in range(c)] for _ in range(r)], c)
            if not _snf_ok(m):
                bad.append(R.name)
                break
    names = ", ".join(R.name for R in SNF_TEST_RINGS)
    return not bad, f"{samples} matrices over each of {names}" + ("" if not bad else "; failed " + ", ".join(bad))


def check_thin_complexes(samples=50):
    rng = make_rng(SEED + 8)
    bad = 0
    for _ in range(samples):
        spec = random_thin_spec(rng, 3)
        kc = build_thin_complex(spec)
        g = spec.genus
        sign = 1 if sum(spec.alexander) == 1 else -1
        alex = {s - g: sign * a for s, a in enumerate(spec.alexander) if a}
        vert = vertical_homology(kc).dims()
        if euler_characteristic_column(kc) != alex or vert != {Fraction(0): 1}:
            bad += 1
    return not bad, f"{samples} random thin specs of genus <= 3, {bad} failures"


def check_duality(samples=100):
    rng = make_rng(SEED + 9)
    bad = 0
    for _ in range(samples):
        m = random_u_module(rng)
        if orientation_reverse(orientation_reverse(m)) != m:
            bad += 1
    return not bad, f"{samples} random modules, {bad} failures"


def check_non_relatedness(kmax=6):
    bad = []
    vals = [k for k in range(-kmax, kmax + 1) if k]
    for n in vals:
        for m in vals:
            if non_relatedness_check(n, m).obstructed != (abs(n) != abs(m)):
                bad.append(f"({n},{m})")
    return not bad, f"{len(vals) ** 2} pairs" + ("" if not bad else "; failed " + ", ".join(bad))


CRITERIA = (
    (1, "twist-knot surgery table", "hat of +1-surgery on twist knots", check_surgery_table),
    (2, "twisted 0-surgery on twist knots", "Lambda^|n| in a single grading", check_twisted_zero_surgery),
    (3, "Whitehead and Borromean", "excision and the Kunneth formula", check_whitehead_borromean),
    (4, "two-bridge links", "exact sequence with the Borromean term", check_two_bridge),
    (5, "grading arithmetic", "2-handle cobordism degree shifts", check_grading_arithmetic),
    (6, "mapping-cone stabilization", "quotient form of the stabilized complex", check_stabilization),
    (7, "Smith normal form oracle", "Euclidean reduction", check_snf),
    (8, "thin-complex oracle", "staircase plus boxes", check_thin_complexes),
    (9, "duality involution", "orientation reversal", check_duality),
    (10, "non-relatedness sweep", "ranks distinguish Whitehead 0-surgeries", check_non_relatedness),
)


def run_sweep(only=None):
    out = []
    for number, title, anchor, fn in CRITERIA:
        if only and number not in only:
            continue
        try:
            passed, detail = fn()
        except TwistFloerError as exc:
            passed, detail = False, f"{exc.code}: {exc}"
        out.append(CriterionResult(number, title, anchor, bool(passed), detail))
    return out


def format_table(results, fmt="markdown"):
    if fmt == "json":
        return json.dumps([r.to_dict() for r in results], indent=2, ensure_ascii=False)
    lines = ["| # | criterion | anchor | result | detail |", "|---|---|---|---|---|"]
    for r in results:
        lines.append(f"| {r.number} | {r.title} | {r.anchor} | {'PASS' if r.passed else 'FAIL'} | {r.detail} |")
    return "\n".join(lines)
