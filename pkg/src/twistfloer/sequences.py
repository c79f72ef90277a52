"""Grading arithmetic, exact-triangle chases and the passage from hat to plus to Novikov coefficients."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .complexes import Cyclic, FreeField, GradedModule, Tower, UTorsion
from .errors import (
    AmbiguousTriangleError,
    DegenerateFormError,
    InconsistentInputError,
    UnsupportedError,
    ZeroTwistError,
)
from .matrix import signature
from .rings import TwistClass

F2_TAG = "F2"
LT_TAG = "L(t)"
LAMBDA_TAG = "Lambda"

# rings whose modules are free over F2[t, 1/t] (F2(t) is its localization)
_LT_FREE = ("L(t)", "F2(t)", "F2[t,1/t]")


# ---------------------------------------------------------------------------
# grading arithmetic


@dataclass(frozen=True)
class CobordismData:
    euler: int
    sigma: int
    c1sq: Fraction
    role: str = ""

    def __post_init__(self):
        object.__setattr__(self, "c1sq", Fraction(self.c1sq))


def grading_shift(c: CobordismData) -> Fraction:
    """Degree shift (c1^2 - 2 chi - 3 sigma) / 4 of a cobordism map."""
    return (c.c1sq - 2 * c.euler - 3 * c.sigma) / 4


def c1_square(p: int, j: int) -> Fraction:
    """Square of the characteristic class evaluating to 2j+p on a p-framed 2-handle."""
    if p == 0:
        raise DegenerateFormError("c1^2 needs a nondegenerate intersection form (p != 0)")
    return Fraction((2 * j + p) ** 2, p)


def surgery_triangle_cobordisms(j: int = 0):
    """The three 2-handle cobordisms S^3 -> Y_0 -> Y_1 -> S^3 used for twist knots.

    W1 adds a 0-framed handle; W1 u W2 has linking matrix [[-1, 1], [1, 0]];
    W3 reverses a +1-framed handle, so sigma = -1 and p = -1.
    """
    s1 = signature([[0]])
    s12 = signature([[-1, 1], [1, 0]])
    w1 = CobordismData(1, s1, 0, "f1")
    w2 = CobordismData(1, s12 - s1, 0, "f2")
    w3 = CobordismData(1, -1, c1_square(-1, j), "f3")
    return w1, w2, w3


# ---------------------------------------------------------------------------
# graded dimension tables


class GradedDims:
    """grading -> (ring tag, dimension), with caller-declared assumptions."""

    __slots__ = ("data", "assumptions")

    def __init__(self, data=None, assumptions=()):
        clean = {}
        for g, v in (data or {}).items():
            tag, dim = v
            if dim < 0:
                raise InconsistentInputError("dimensions must be non-negative")
            if dim:
                clean[Fraction(g)] = (str(tag), int(dim))
        self.data = dict(sorted(clean.items(), reverse=True))
        self.assumptions = tuple(assumptions)

    @classmethod
    def from_module(cls, m: GradedModule, tag=None, assumptions=()):
        """Dimensions of a module of FreeField summands (e.g. a hat group)."""
        out = {}
        for s in m:
            if not isinstance(s, FreeField) or s.u_free:
                raise UnsupportedError("only finite FreeField summands have a dimension table")
            t = tag or s.ring
            old = out.get(s.grading, (t, 0))
            if old[0] != t:
                raise InconsistentInputError(f"mixed ring tags at grading {s.grading}")
            out[s.grading] = (t, old[1] + s.rank)
        return cls(out, assumptions)

    @classmethod
    def of(cls, tag, dims: dict, assumptions=()):
        return cls({g: (tag, d) for g, d in dims.items()}, assumptions)

    def dims(self):
        return {g: d for g, (_, d) in self.data.items()}

    def total(self):
        return sum(d for _, d in self.data.values())

    def support(self):
        return set(self.data)

    def shifted(self, s):
        return GradedDims({g + s: v for g, v in self.data.items()}, self.assumptions)

    def __eq__(self, other):
        return isinstance(other, GradedDims) and self.data == other.data

    def __repr__(self):
        body = ", ".join(f"{g}: {d} over {t}" for g, (t, d) in self.data.items())
        return f"GradedDims({{{body}}})"


def _add_dims(out, g, tag, d):
    if not d:
        return
    old_tag, old = out.get(g, (tag, 0))
    if old_tag != tag:
        raise InconsistentInputError(f"mixed ring tags at grading {g}")
    out[g] = (tag, old + d)


NON_INCREASING = "non-increasing"


def triangle_chase(a: GradedDims, c: GradedDims, shifts: dict, tag=LT_TAG) -> GradedDims:
    """Middle term of an exact triangle ``A -f1-> B -f2-> C -f3-> A`` when f3 must vanish.

    ``shifts['f1']`` and ``shifts['f2']`` are exact degree shifts;
    ``shifts['f3']`` is either an exact shift or ``"non-increasing"``.  If no
    grading of C can reach a grading of A under f3, then f3 = 0, the triangle
    splits into ``0 -> A -> B -> C -> 0`` and
    ``dim B[g] = dim A[g - s1] + dim C[g + s2]``.  Both parts are tagged
    ``tag`` (the group-ring coefficients of the twisted sequence).
    """
    try:
        s1 = Fraction(shifts["f1"])
        s2 = Fraction(shifts["f2"])
    except (KeyError, TypeError, ValueError):
        raise InconsistentInputError("f1 and f2 need exact rational shifts") from None
    s3 = shifts.get("f3", NON_INCREASING)
    supp_a, supp_c = a.support(), c.support()
    if s3 == NON_INCREASING or s3 == "<=0":
        clash = [(gc, ga) for gc in supp_c for ga in supp_a if ga <= gc]
    else:
        s3 = Fraction(s3)
        clash = [(gc, gc + s3) for gc in supp_c if gc + s3 in supp_a]
    if clash:
        gc, ga = sorted(clash)[-1]
        raise AmbiguousTriangleError(
            f"f3 could map grading {gc} of C to grading {ga} of A; the chase cannot decide whether it vanishes"
        )
    out = {}
    for g, (_, d) in a.data.items():
        _add_dims(out, g + s1, tag, d)
    for g, (_, d) in c.data.items():
        _add_dims(out, g - s2, tag, d)
    return GradedDims(out, a.assumptions + c.assumptions)


# ---------------------------------------------------------------------------
# from hat to plus


@dataclass(frozen=True)
class InfinityModel:
    """Declared HF-infinity: one U-tower with plus-bottom ``bottom`` and trivial t-action.

    This is input data imported from the literature, not computed.
    """

    bottom: Fraction
    trivial_t_action: bool = True
    provenance: str = "twisted HF-infinity of a torsion Spin^c structure is F2[U, 1/U] with trivial action"

    def __post_init__(self):
        object.__setattr__(self, "bottom", Fraction(self.bottom))
        if self.bottom.denominator not in (1, 2, 4):
            raise InconsistentInputError("tower gradings have denominator dividing 4")


def reconstruct_plus(hat: GradedDims, inf: Optional[InfinityModel]) -> GradedModule:
    """Rebuild HF+ from the hat group and the declared tower.

    Uses the exact sequence ``hat_i -> HF+_i -U-> HF+_(i-2) -> hat_(i-1)``
    (connecting map of degree +1): a string ``F[U]/U^k`` with top ``h``
    contributes hat classes at ``h + 1`` and at ``h - 2(k - 1)``; the tower
    contributes one class at its bottom.  Over L(t) a tower with trivial
    t-action is torsion and uses no L(t)-rank.  Remaining classes are paired
    from the top down; a string of length 1 is reported as ``FreeField`` in
    its grading.
    """
    left = {g: [tag, d] for g, (tag, d) in hat.data.items()}
    gradings = list(left)
    if inf is not None:
        gradings.append(inf.bottom)
    for g in gradings:
        if (g - gradings[0]).denominator != 1:
            raise InconsistentInputError("hat gradings and the tower bottom must differ by integers")
    summands = []
    if inf is not None:
        b = inf.bottom
        if b not in left:
            raise InconsistentInputError(f"the tower bottom {b} is not in the hat support")
        tag = left[b][0]
        if tag == F2_TAG:
            left[b][1] -= 1
        elif tag not in _LT_FREE or not inf.trivial_t_action:
            raise InconsistentInputError(f"cannot place a tower on hat classes over {tag}")
        summands.append(Tower(b, F2_TAG if inf.trivial_t_action else tag))
    while True:
        live = sorted((g for g, (_, d) in left.items() if d > 0), reverse=True)
        if not live:
            break
        upper = live[0]
        tag, d_up = left[upper]
        partners = [g for g in live[1:] if (upper - g) % 2 == 1 and left[g][0] == tag]
        if not partners:
            raise InconsistentInputError(f"hat classes at {upper} have no partner; no HF+ module produces them")
        if len(partners) > 1:
            raise AmbiguousTriangleError(
                f"hat classes at {upper} could pair with gradings {partners}; the U-action is not determined"
            )
        lower = partners[0]
        n = min(d_up, left[lower][1])
        k = int((upper - lower + 1) // 2)
        top = upper - 1
        if k == 1:
            summands.append(FreeField(tag, n, top))
        else:
            summands.append(UTorsion(k, top, tag, n))
        left[upper][1] -= n
        left[lower][1] -= n
    return GradedModule(summands)


# ---------------------------------------------------------------------------
# Novikov base change and duality


def _survives(s) -> bool:
    """Whether ``s (x) Lambda`` is nonzero: only summands free over L(t) survive.

    A summand L(t)/(f) with f != 0 dies because f(t^d) is a nonzero element
    of the field Lambda, hence a unit; the same unit kills Tor_1.  Trivial
    t-action means f = 1 + t.
    """
    if isinstance(s, Tower):
        return False
    if isinstance(s, Cyclic):
        return False
    return s.ring in _LT_FREE or s.ring == LAMBDA_TAG


def novikov_base_change(m: GradedModule, omega: TwistClass) -> GradedModule:
    """Tensor a module over F2[t, 1/t] with the Novikov field via ``t -> t^d``."""
    if omega.weight == 0:
        raise ZeroTwistError("the twisting class must pair nontrivially (d != 0)")
    out = []
    for s in m:
        if not _survives(s):
            continue
        if isinstance(s, FreeField):
            out.append(FreeField(LAMBDA_TAG, s.rank, s.grading, s.u_free))
        elif isinstance(s, UTorsion):
            out.append(UTorsion(s.k, s.top, LAMBDA_TAG, s.rank))
    return GradedModule(out, m.notes)


def orientation_reverse(m: GradedModule) -> GradedModule:
    """Homology of the dual complex, from Hom and Ext over K[U].

    Free generators in grading g dualize to grading -g.  ``K[U]/U^k`` with
    top g comes from Ext^1 and has top ``-g + 2k - 1``; a FreeField over a
    field counts as copies of ``K[U]/U`` and moves from g to ``1 - g``.
    """
    out = []
    for s in m:
        if isinstance(s, Tower):
            raise UnsupportedError("orientation reversal is defined for HF-minus type modules without towers")
        if isinstance(s, Cyclic):
            raise UnsupportedError("orientation reversal needs K[U]-modules")
        if isinstance(s, FreeField):
            g = None if s.grading is None else (-s.grading if s.u_free else 1 - s.grading)
            out.append(FreeField(s.ring, s.rank, g, s.u_free))
        else:
            top = None if s.top is None else -s.top + 2 * s.k - 1
            out.append(UTorsion(s.k, top, s.ring, s.rank))
    return GradedModule(out, m.notes)


def random_u_module(rng, ring=LAMBDA_TAG, max_summands=6, span=8):
    """Random finite K[U]-module (no towers) with quarter-integer gradings."""
    out = []
    for _ in range(rng.randint(0, max_summands)):
        g = Fraction(rng.randint(-4 * span, 4 * span), 4)
        r = rng.randint(1, 3)
        kind = rng.randrange(3)
        if kind == 0:
            out.append(FreeField(ring, r, g))
        elif kind == 1:
            out.append(FreeField(ring, r, g, u_free=True))
        else:
            out.append(UTorsion(rng.randint(1, 4), g, ring, r))
    return GradedModule(out)
