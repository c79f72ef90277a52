"""Exact coefficient rings of characteristic two.

Binary polynomials are stored as Python integers (bit ``k`` is the
coefficient of ``t^k``).  Every element type is immutable and hashable.

Ring objects (``ZZ``, ``F2``, ``F2T``, ``LAURENT``, ``RATFUNC``,
``NOVIKOV`` and ``PolyRing`` instances) give a uniform interface used by
the matrix and complex code: ``add``, ``mul``, ``neg``, ``is_zero``,
``divmod``, ``norm``, ``unit_normal`` and friends.

The Novikov field is modelled by ``NovikovElem`` (finite support, rational
exponents).  Rank and homology computations use ``RATFUNC`` = F2(t) instead:
every entry that occurs is a Laurent polynomial, and F2(t) embeds in the
Novikov field through ``t -> t^d`` for any nonzero weight ``d``, so ranks
agree.
"""

from __future__ import annotations

import random as _random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .errors import RingNotEuclideanError, TwistFloerError

ZERO_DEGREE = -1  # degree of the zero polynomial


# ---------------------------------------------------------------------------
# carry-less helpers on int bitmasks


def clmul(a: int, b: int) -> int:
    if a.bit_length() < b.bit_length():
        a, b = b, a
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def cldivmod(a: int, b: int):
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    db = b.bit_length()
    q = 0
    while a.bit_length() >= db:
        s = a.bit_length() - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def clgcd(a: int, b: int) -> int:
    while b:
        a, b = b, cldivmod(a, b)[1]
    return a


def _exp_str(var, e):
    if e == 1:
        return var
    if isinstance(e, Fraction) and e.denominator != 1:
        return f"{var}^{{{e.numerator}/{e.denominator}}}"
    e = int(e)
    if e < 0 or e > 9:
        return f"{var}^{{{e}}}"
    return f"{var}^{e}"


def _terms_str(var, exps):
    """Render a sum of monomials in descending exponent order."""
    if not exps:
        return "0"
    parts = ["1" if e == 0 else _exp_str(var, e) for e in sorted(exps, reverse=True)]
    return "+".join(parts)


def _bits_exps(bits):
    k = 0
    out = []
    while bits:
        if bits & 1:
            out.append(k)
        bits >>= 1
        k += 1
    return out


# ---------------------------------------------------------------------------
# element types


class F2Poly:
    """Polynomial over F2 in one variable, as an int bitmask."""

    __slots__ = ("bits",)

    def __init__(self, bits=0):
        if isinstance(bits, F2Poly):
            bits = bits.bits
        if bits < 0:
            raise ValueError("bitmask must be non-negative")
        object.__setattr__(self, "bits", int(bits))

    def __setattr__(self, name, value):
        raise AttributeError("F2Poly is immutable")

    @classmethod
    def from_exponents(cls, exps):
        bits = 0
        for e in exps:
            bits ^= 1 << e
        return cls(bits)

    @classmethod
    def monomial(cls, k):
        return cls(1 << k)

    @property
    def degree(self):
        return self.bits.bit_length() - 1 if self.bits else ZERO_DEGREE

    @property
    def coefficients(self):
        return [(self.bits >> k) & 1 for k in range(self.bits.bit_length())]

    def __bool__(self):
        return self.bits != 0

    def __eq__(self, other):
        if isinstance(other, int):
            return self.bits == other % 2 and other in (0, 1)
        return isinstance(other, F2Poly) and other.bits == self.bits

    def __hash__(self):
        return hash(("F2Poly", self.bits))

    def __add__(self, other):
        return F2Poly(self.bits ^ _f2p(other).bits)

    __radd__ = __sub__ = __rsub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        return F2Poly(clmul(self.bits, _f2p(other).bits))

    __rmul__ = __mul__

    def __pow__(self, k):
        return reduce(lambda a, b: a * b, [self] * k, F2Poly(1))

    def __divmod__(self, other):
        q, r = cldivmod(self.bits, _f2p(other).bits)
        return F2Poly(q), F2Poly(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def gcd(self, other):
        return F2Poly(clgcd(self.bits, _f2p(other).bits))

    def __repr__(self):
        return f"F2Poly({self})"

    def __str__(self):
        return _terms_str("t", _bits_exps(self.bits))


def _f2p(x):
    if isinstance(x, F2Poly):
        return x
    if isinstance(x, int):
        return F2Poly(x & 1)
    raise TypeError(f"cannot coerce {x!r} to F2Poly")


class LaurentPoly:
    """Element of F2[t, 1/t]: ``t^low * bits`` with ``bits`` odd (or zero)."""

    __slots__ = ("low", "bits")

    def __init__(self, bits=0, low=0):
        if bits:
            while not bits & 1:
                bits >>= 1
                low += 1
        else:
            low = 0
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def from_terms(cls, terms):
        """Build from an iterable of exponents or a dict exponent -> coefficient."""
        if isinstance(terms, dict):
            exps = [e for e, c in terms.items() if c % 2]
        else:
            exps = list(terms)
        if not exps:
            return cls()
        low = min(exps)
        bits = 0
        for e in exps:
            bits ^= 1 << (e - low)
        return cls(bits, low)

    @classmethod
    def monomial(cls, k):
        return cls(1, k)

    @property
    def terms(self):
        return {self.low + e: 1 for e in _bits_exps(self.bits)}

    @property
    def min_exp(self):
        return self.low if self.bits else None

    @property
    def max_exp(self):
        return self.low + self.bits.bit_length() - 1 if self.bits else None

    @property
    def span(self):
        return self.bits.bit_length() - 1 if self.bits else ZERO_DEGREE

    def is_monomial(self):
        return self.bits == 1

    def __bool__(self):
        return self.bits != 0

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly(other & 1)
        return isinstance(other, LaurentPoly) and (self.low, self.bits) == (other.low, other.bits)

    def __hash__(self):
        return hash(("Laurent", self.low, self.bits))

    def __add__(self, other):
        other = _lp(other)
        if not other.bits:
            return self
        if not self.bits:
            return other
        low = min(self.low, other.low)
        return LaurentPoly((self.bits << (self.low - low)) ^ (other.bits << (other.low - low)), low)

    __radd__ = __sub__ = __rsub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        other = _lp(other)
        return LaurentPoly(clmul(self.bits, other.bits), self.low + other.low)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            if not self.is_monomial():
                raise ZeroDivisionError(f"{self} is not a unit in F2[t,1/t]")
            return LaurentPoly(1, self.low * k)
        return reduce(lambda a, b: a * b, [self] * k, LaurentPoly(1))

    def substitute_power(self, d):
        """Return the Novikov element obtained by t -> t^d."""
        return NovikovElem({Fraction(e) * d: 1 for e in self.terms})

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        return _terms_str("t", list(self.terms))


def _lp(x):
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly(x & 1)
    if isinstance(x, F2Poly):
        return LaurentPoly(x.bits)
    raise TypeError(f"cannot coerce {x!r} to LaurentPoly")


class RatFunc:
    """Reduced fraction of binary polynomials (element of F2(t))."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        num = _f2p(num) if not isinstance(num, F2Poly) else num
        den = _f2p(den) if not isinstance(den, F2Poly) else den
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            den = F2Poly(1)
        else:
            g = num.gcd(den)
            if g.bits != 1:
                num, den = num // g, den // g
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    @classmethod
    def from_laurent(cls, p):
        p = _lp(p)
        if p.low >= 0:
            return cls(F2Poly(p.bits << p.low))
        return cls(F2Poly(p.bits), F2Poly.monomial(-p.low))

    def to_laurent(self):
        """Return the Laurent polynomial if the denominator is a power of t."""
        if self.den.bits & (self.den.bits - 1):
            return None
        return LaurentPoly(self.num.bits, -self.den.degree)

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, (int, F2Poly, LaurentPoly)):
            other = _rf(other)
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash(("RatFunc", self.num.bits, self.den.bits))

    def __add__(self, other):
        other = _rf(other)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __sub__ = __rsub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        other = _rf(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        if not self:
            raise ZeroDivisionError("zero is not invertible in F2(t)")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * _rf(other).inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num ** k, self.den ** k)

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        lp = self.to_laurent()
        if lp is not None:
            return str(lp)
        n, d = str(self.num), str(self.den)
        if "+" in n:
            n = f"({n})"
        if "+" in d:
            d = f"({d})"
        return f"{n}/{d}"


def _rf(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, (int, F2Poly)):
        return RatFunc(_f2p(x))
    if isinstance(x, LaurentPoly):
        return RatFunc.from_laurent(x)
    raise TypeError(f"cannot coerce {x!r} to RatFunc")


class NovikovElem:
    """Finite sum of ``t^r`` over F2 with exact rational exponents ``r``.

    Since the coefficients lie in F2 an element is just its support.
    """

    __slots__ = ("_exps",)

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            exps = frozenset(Fraction(e) for e, c in terms.items() if c % 2)
        else:
            acc = set()
            for e in terms:
                acc ^= {Fraction(e)}
            exps = frozenset(acc)
        object.__setattr__(self, "_exps", exps)

    def __setattr__(self, name, value):
        raise AttributeError("NovikovElem is immutable")

    @classmethod
    def monomial(cls, r):
        return cls([r])

    @property
    def terms(self):
        return {e: 1 for e in sorted(self._exps)}

    @property
    def support(self):
        return self._exps

    @property
    def min_exp(self):
        return min(self._exps) if self._exps else None

    @property
    def max_exp(self):
        return max(self._exps) if self._exps else None

    def __bool__(self):
        return bool(self._exps)

    def __eq__(self, other):
        if isinstance(other, int):
            other = NovikovElem([0] if other % 2 else [])
        return isinstance(other, NovikovElem) and self._exps == other._exps

    def __hash__(self):
        return hash(("Novikov", self._exps))

    def __add__(self, other):
        return NovikovElem(self._exps ^ _nv(other)._exps)

    __radd__ = __sub__ = __rsub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        other = _nv(other)
        acc = set()
        for a in self._exps:
            for b in other._exps:
                acc ^= {a + b}
        return NovikovElem(acc)

    __rmul__ = __mul__

    def shift(self, r):
        """Multiply by the monomial ``t^r``."""
        r = Fraction(r)
        return NovikovElem(e + r for e in self._exps)

    def truncate(self, horizon):
        """Drop every term with exponent >= horizon."""
        return NovikovElem(e for e in self._exps if e < horizon)

    def __pow__(self, k):
        if k < 0:
            if len(self._exps) != 1:
                raise ZeroDivisionError("only monomials have exact finite inverses")
            (e,) = self._exps
            return NovikovElem([e * k])
        return reduce(lambda a, b: a * b, [self] * k, NovikovElem([0]))

    def __repr__(self):
        return f"NovikovElem({self})"

    def __str__(self):
        return _terms_str("t", self._exps)


def _nv(x):
    if isinstance(x, NovikovElem):
        return x
    if isinstance(x, int):
        return NovikovElem([0] if x % 2 else [])
    if isinstance(x, LaurentPoly):
        return NovikovElem(x.terms)
    raise TypeError(f"cannot coerce {x!r} to NovikovElem")


def novikov_arith(a: NovikovElem, b: NovikovElem, which: str) -> NovikovElem:
    if which == "add":
        return a + b
    if which == "mul":
        return a * b
    raise ValueError(f"unknown operation {which!r}")


def novikov_invert_truncated(a: NovikovElem, horizon) -> NovikovElem:
    """Return ``b`` with every exponent of ``a*b - 1`` at least ``horizon``.

    Writes ``a = t^v (1 + x)`` with ``x`` of positive valuation and sums the
    geometric series of ``x`` far enough.
    """
    if not a:
        raise ZeroDivisionError("zero has no inverse in the Novikov field")
    horizon = Fraction(horizon)
    v = a.min_exp
    if horizon <= v:
        raise ValueError(f"the horizon {horizon} must exceed the least exponent {v}")
    x = a.shift(-v) + NovikovElem([0])
    series = NovikovElem([0])
    if x:
        step = x.min_exp
        power = NovikovElem([0])
        k = 0
        while (k + 1) * step < horizon:
            power = (power * x).truncate(horizon)
            series = series + power
            k += 1
    return series.shift(-v)


@dataclass(frozen=True)
class TwistClass:
    """A real 2-class recorded through its pairing weight ``d`` with the twisting loop."""

    weight: Fraction
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "weight", Fraction(self.weight))

    @property
    def nonzero(self) -> bool:
        return self.weight != 0


def twist_action(omega: TwistClass, k: int, x: NovikovElem) -> NovikovElem:
    """Action of the k-th power of the group-ring generator: ``t^(k d) * x``."""
    return x.shift(k * omega.weight)


# ---------------------------------------------------------------------------
# ring objects


class Ring:
    """Common interface; subclasses override what they support."""

    name = "ring"
    is_field = False
    is_euclidean = False
    gens = ()

    def __repr__(self):
        return f"<ring {self.name}>"

    def __eq__(self, other):
        return isinstance(other, Ring) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        return a

    def eq(self, a, b):
        return self.is_zero(self.sub(a, b))

    def is_unit(self, a):
        raise NotImplementedError

    def inverse(self, a):
        raise NotImplementedError

    def divmod(self, a, b):
        raise RingNotEuclideanError(f"{self.name} is not a Euclidean domain")

    def norm(self, a):
        raise RingNotEuclideanError(f"{self.name} is not a Euclidean domain")

    def unit_normal(self, a):
        """A unit ``u`` such that ``a*u`` is the normalized associate of ``a``."""
        return self.one

    def divide(self, a, b):
        """Exact division ``a / b``; raises ArithmeticError if inexact."""
        if self.is_field:
            return self.mul(a, self.inverse(b))
        if self.is_unit(b):
            return self.mul(a, self.inverse(b))
        q, r = self.divmod(a, b)
        if not self.is_zero(r):
            raise ArithmeticError(f"{a} is not divisible by {b} in {self.name}")
        return q

    def power(self, a, e):
        e = Fraction(e)
        if e.denominator != 1:
            raise ArithmeticError(f"rational powers are not defined in {self.name}")
        e = int(e)
        if e < 0:
            a, e = self.inverse(a), -e
        out = self.one
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def gen(self, name):
        raise KeyError(f"{self.name} has no generator {name!r}")

    def u_degree(self, a):
        """Total U-degree of a homogeneous element, None if inhomogeneous."""
        return 0

    def format(self, a):
        return str(a)

    def sum(self, items):
        out = self.zero
        for x in items:
            out = self.add(out, x)
        return out


class IntegerRing(Ring):
    name = "ZZ"
    is_euclidean = True
    zero = 0
    one = 1

    def coerce(self, x):
        return int(x)

    def from_int(self, k):
        return int(k)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a in (1, -1)

    def inverse(self, a):
        if a not in (1, -1):
            raise ZeroDivisionError(f"{a} is not a unit in ZZ")
        return a

    def divmod(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        q, r = divmod(a, b)
        # least absolute remainder keeps the Euclidean norm strictly decreasing
        if r and abs(r) * 2 > abs(b):
            q, r = q + 1, r - b
        return q, r

    def norm(self, a):
        return abs(a)

    def unit_normal(self, a):
        return -1 if a < 0 else 1

    def random(self, rng, bound=5):
        return rng.randint(-bound, bound)


class F2Field(Ring):
    name = "F2"
    is_field = True
    is_euclidean = True
    zero = 0
    one = 1

    def coerce(self, x):
        return int(x) & 1

    def from_int(self, k):
        return k & 1

    def add(self, a, b):
        return a ^ b

    def mul(self, a, b):
        return a & b

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a == 1

    def inverse(self, a):
        if a != 1:
            raise ZeroDivisionError("zero is not invertible in F2")
        return 1

    def divmod(self, a, b):
        return self.divide(a, b), 0

    def norm(self, a):
        return 0

    def random(self, rng, density=0.5):
        return 1 if rng.random() < density else 0


class F2PolyRing(Ring):
    name = "F2[t]"
    is_euclidean = True
    gens = ("t",)
    zero = F2Poly(0)
    one = F2Poly(1)

    def coerce(self, x):
        return _f2p(x)

    def from_int(self, k):
        return F2Poly(k & 1)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return not a

    def is_unit(self, a):
        return a.bits == 1

    def inverse(self, a):
        if a.bits != 1:
            raise ZeroDivisionError(f"{a} is not a unit in F2[t]")
        return a

    def divmod(self, a, b):
        return divmod(a, b)

    def norm(self, a):
        return a.degree

    def gen(self, name):
        if name != "t":
            return super().gen(name)
        return F2Poly(2)

    def random(self, rng, max_degree=3):
        return F2Poly(rng.getrandbits(max_degree + 1))


class LaurentRing(Ring):
    """F2[t, 1/t]; Euclidean with norm = span (max exponent - min exponent)."""

    name = "L(t)"
    is_euclidean = True
    gens = ("t",)
    zero = LaurentPoly(0)
    one = LaurentPoly(1)

    def coerce(self, x):
        return _lp(x)

    def from_int(self, k):
        return LaurentPoly(k & 1)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return not a

    def is_unit(self, a):
        return a.is_monomial()

    def inverse(self, a):
        return a ** -1

    def divmod(self, a, b):
        if not b:
            raise ZeroDivisionError("division by zero")
        if not a:
            return self.zero, self.zero
        q, r = cldivmod(a.bits, b.bits)
        # a = t^la A, b = t^lb B with A, B having nonzero constant term
        return LaurentPoly(q, a.low - b.low), LaurentPoly(r, a.low)

    def norm(self, a):
        return a.span

    def unit_normal(self, a):
        return LaurentPoly(1, -a.low) if a else self.one

    def gen(self, name):
        if name != "t":
            return super().gen(name)
        return LaurentPoly(1, 1)

    def random(self, rng, max_span=3, max_shift=2):
        bits = rng.getrandbits(max_span + 1)
        return LaurentPoly(bits, rng.randint(-max_shift, max_shift))


class RatFuncField(Ring):
    """F2(t): the computational stand-in for the Novikov field."""

    name = "F2(t)"
    is_field = True
    is_euclidean = True
    gens = ("t",)
    zero = RatFunc(0)
    one = RatFunc(1)

    def coerce(self, x):
        return _rf(x)

    def from_int(self, k):
        return RatFunc(k & 1)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return not a

    def is_unit(self, a):
        return bool(a)

    def inverse(self, a):
        return a.inverse()

    def divmod(self, a, b):
        return a / b, self.zero

    def norm(self, a):
        return 0

    def unit_normal(self, a):
        return a.inverse() if a else self.one

    def gen(self, name):
        if name != "t":
            return super().gen(name)
        return RatFunc(F2Poly(2))

    def random(self, rng, max_degree=2, density=0.6):
        if rng.random() > density:
            return self.zero
        num = F2Poly(rng.getrandbits(max_degree + 1) | 1)
        den = F2Poly(rng.getrandbits(max_degree + 1) | 1)
        return RatFunc(num, den) * RatFunc.from_laurent(LaurentPoly(1, rng.randint(-1, 1)))


class NovikovField(Ring):
    """Finite-support model of the Novikov field; arithmetic only, no SNF."""

    name = "Lambda"
    is_field = True
    gens = ("t",)
    zero = NovikovElem()
    one = NovikovElem([0])

    def coerce(self, x):
        return _nv(x)

    def from_int(self, k):
        return self.one if k % 2 else self.zero

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return not a

    def is_unit(self, a):
        return len(a.support) == 1

    def inverse(self, a):
        return a ** -1

    def power(self, a, e):
        e = Fraction(e)
        if len(a.support) == 1:
            (r,) = a.support
            return NovikovElem([r * e])
        return super().power(a, e)

    def gen(self, name):
        if name != "t":
            return super().gen(name)
        return NovikovElem([1])

    def random(self, rng, terms=3, denominators=(1, 2, 4), span=3):
        out = set()
        for _ in range(rng.randint(1, terms)):
            q = rng.choice(denominators)
            out ^= {Fraction(rng.randint(-span * q, span * q), q)}
        return NovikovElem(out)


class UPoly:
    """Polynomial in the U variables of a ``PolyRing``; dict exponent-tuple -> coefficient."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        base = ring.base
        clean = {}
        for k, c in terms.items():
            if not base.is_zero(c):
                clean[tuple(k)] = c
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("UPoly is immutable")

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        return isinstance(other, UPoly) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring.name, frozenset(self.terms.items())))

    def __add__(self, other):
        return self.ring.add(self, self.ring.coerce(other))

    __radd__ = __sub__ = __rsub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        return self.ring.mul(self, self.ring.coerce(other))

    __rmul__ = __mul__

    def __pow__(self, k):
        return self.ring.power(self, k)

    @property
    def degree(self):
        return max((sum(k) for k in self.terms), default=ZERO_DEGREE)

    def __repr__(self):
        return f"UPoly({self})"

    def __str__(self):
        return self.ring.format(self)


class PolyRing(Ring):
    """Polynomials over a field in one or more U variables (all of degree -2)."""

    def __init__(self, base, names=("U",)):
        self.base = base
        self.names = tuple(names)
        self.gens = self.names + tuple(base.gens)
        self.name = f"{base.name}[{','.join(self.names)}]"
        self.is_euclidean = len(self.names) == 1 and base.is_field
        self.zero = UPoly(self, {})
        self.one = UPoly(self, {(0,) * len(self.names): base.one})

    def coerce(self, x):
        if isinstance(x, UPoly):
            if x.ring != self:
                raise TypeError(f"element of {x.ring.name} used in {self.name}")
            return x
        return self.constant(self.base.coerce(x))

    def constant(self, c):
        return UPoly(self, {(0,) * len(self.names): c})

    def monomial(self, exps, c=None):
        return UPoly(self, {tuple(exps): self.base.one if c is None else c})

    def from_int(self, k):
        return self.constant(self.base.from_int(k))

    def var(self, name):
        i = self.names.index(name)
        exps = [0] * len(self.names)
        exps[i] = 1
        return self.monomial(exps)

    def gen(self, name):
        if name in self.names:
            return self.var(name)
        return self.constant(self.base.gen(name))

    def add(self, a, b):
        base = self.base
        out = dict(a.terms)
        for k, c in b.terms.items():
            out[k] = base.add(out[k], c) if k in out else c
        return UPoly(self, out)

    def mul(self, a, b):
        base = self.base
        out = {}
        for ka, ca in a.terms.items():
            for kb, cb in b.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                c = base.mul(ca, cb)
                out[k] = base.add(out[k], c) if k in out else c
        return UPoly(self, out)

    def is_zero(self, a):
        return not a.terms

    def is_unit(self, a):
        return len(a.terms) == 1 and all(e == 0 for e in next(iter(a.terms))) and \
            self.base.is_unit(next(iter(a.terms.values())))

    def inverse(self, a):
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{self.format(a)} is not a unit in {self.name}")
        return self.constant(self.base.inverse(next(iter(a.terms.values()))))

    def _lead(self, a):
        k = max(a.terms)
        return k, a.terms[k]

    def divmod(self, a, b):
        if not self.is_euclidean:
            raise RingNotEuclideanError(f"{self.name} is not a Euclidean domain")
        if not b.terms:
            raise ZeroDivisionError("division by zero")
        base = self.base
        (db,), lb = self._lead(b)
        inv = base.inverse(lb)
        q = {}
        r = a
        while r.terms:
            (dr,), lr = self._lead(r)
            if dr < db:
                break
            c = base.mul(lr, inv)
            q[(dr - db,)] = c
            r = self.sub(r, self.mul(self.monomial((dr - db,), c), b))
        return UPoly(self, q), r

    def norm(self, a):
        if not self.is_euclidean:
            raise RingNotEuclideanError(f"{self.name} is not a Euclidean domain")
        return a.degree

    def unit_normal(self, a):
        if not a.terms:
            return self.one
        return self.constant(self.base.inverse(self._lead(a)[1]))

    def u_degree(self, a):
        degs = {sum(k) for k in a.terms}
        if len(degs) > 1:
            return None
        return degs.pop() if degs else 0

    def is_monomial(self, a):
        return len(a.terms) == 1

    def substitute(self, a, target, images):
        """Ring map sending each U variable to ``images[name]`` in ``target``."""
        out = target.zero
        for k, c in a.terms.items():
            term = target.constant(target.base.coerce(c)) if isinstance(target, PolyRing) else c
            for name, e in zip(self.names, k):
                term = target.mul(term, target.power(images[name], e))
            out = target.add(out, term)
        return out

    def format(self, a):
        if not a.terms:
            return "0"
        parts = []
        for k in sorted(a.terms, reverse=True):
            c = a.terms[k]
            mono = "*".join(_exp_str(n, e) for n, e in zip(self.names, k) if e)
            cs = self.base.format(c)
            if not mono:
                parts.append(cs if "+" not in cs else f"({cs})")
            elif self.base.is_zero(self.base.sub(c, self.base.one)):
                parts.append(mono)
            else:
                if "+" in cs or "/" in cs:
                    cs = f"({cs})"
                parts.append(f"{cs}*{mono}")
        return "+".join(parts)

    def random(self, rng, max_degree=2, terms=2):
        out = self.zero
        for _ in range(rng.randint(0, terms)):
            exps = [rng.randint(0, max_degree) for _ in self.names]
            c = self.base.random(rng)
            out = self.add(out, self.monomial(exps, c))
        return out

    def random_homogeneous(self, rng, degree, terms=2):
        """Random element of total U-degree ``degree`` (possibly zero)."""
        out = self.zero
        for _ in range(rng.randint(1, terms)):
            exps = _random_composition(rng, degree, len(self.names))
            out = self.add(out, self.monomial(exps, self.base.random(rng)))
        return out


def _random_composition(rng, total, parts):
    cuts = sorted(rng.randint(0, total) for _ in range(parts - 1))
    bounds = [0] + cuts + [total]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


ZZ = IntegerRing()
F2 = F2Field()
F2T = F2PolyRing()
LAURENT = LaurentRing()
RATFUNC = RatFuncField()
NOVIKOV = NovikovField()

_POLY_CACHE = {}


def poly_ring(base, names=("U",)):
    key = (base.name, tuple(names))
    if key not in _POLY_CACHE:
        _POLY_CACHE[key] = PolyRing(base, names)
    return _POLY_CACHE[key]


F2U = poly_ring(F2)
LAMBDA_U = poly_ring(RATFUNC)

_NAMED = {r.name: r for r in (ZZ, F2, F2T, LAURENT, RATFUNC, NOVIKOV)}
_ALIASES = {
    "integers": "ZZ",
    "Z": "ZZ",
    "F2Poly": "F2[t]",
    "LaurentPoly": "L(t)",
    "F2[t,1/t]": "L(t)",
    "RatFunc": "F2(t)",
    "Novikov": "Lambda",
}


def ring_from_name(name: str) -> Ring:
    """Parse a ring tag such as ``F2(t)[U]`` or ``F2(t)[U_z,U_w0]``."""
    name = name.strip()
    name = _ALIASES.get(name, name)
    if name in _NAMED:
        return _NAMED[name]
    if name.endswith("]") and "[" in name:
        cut = name.rindex("[")
        base_name, inner = name[:cut], name[cut + 1:-1]
        if base_name in ("RatFunc", "Lambda"):
            base_name = "F2(t)"
        base = ring_from_name(base_name)
        if base in (F2, RATFUNC):
            names = tuple(v.strip() for v in inner.split(",") if v.strip())
            if names and all(v.startswith("U") for v in names):
                return poly_ring(base, names)
    raise TwistFloerError(f"unknown ring tag {name!r}")


def make_rng(seed=None):
    return _random.Random(seed)
