"""Exact scalar fields and filtration levels.

Two fields are supported: the rationals (``fractions.Fraction``) and prime
fields F_p through the small :class:`ModP` element type.  Levels are always
rationals; floats are rejected so that every comparison stays exact.
"""
from __future__ import annotations

from fractions import Fraction
from functools import total_ordering


class ModP:
    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, ModP):
            if other.p != self.p:
                raise ValueError("mixing different prime fields")
            return other.v
        if isinstance(other, bool):
            return NotImplemented
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return ModP(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.v == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return ModP(o * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return ModP(-self.v, self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.v == o

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return "ModP(%d, %d)" % (self.v, self.p)

    def __str__(self):
        return str(self.v)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


class Field:
    """The scalar field of a session: ``Field.rational()`` or ``Field.prime(p)``."""

    __slots__ = ("p",)

    def __init__(self, p: int = 0):
        if p and not _is_prime(p):
            raise ValueError("%d is not prime" % p)
        self.p = p

    @classmethod
    def rational(cls) -> "Field":
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(p)

    @classmethod
    def from_spec(cls, spec: str) -> "Field":
        s = spec.strip().lower()
        if s in ("q", "qq", "rational", "rationals"):
            return cls.rational()
        for prefix in ("fp:", "prime:", "prime ", "f"):
            if s.startswith(prefix) and s[len(prefix):].strip().isdigit():
                return cls.prime(int(s[len(prefix):]))
        raise ValueError("unknown field spec %r" % spec)

    @property
    def name(self) -> str:
        return "q" if self.p == 0 else "fp:%d" % self.p

    @property
    def is_prime(self) -> bool:
        return self.p != 0

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "Field(%s)" % self.name

    @property
    def zero(self):
        return ModP(0, self.p) if self.p else Fraction(0)

    @property
    def one(self):
        return ModP(1, self.p) if self.p else Fraction(1)

    def __call__(self, x):
        """Coerce an int, Fraction, string or field element into this field."""
        if isinstance(x, bool) or isinstance(x, float):
            raise TypeError("refusing to coerce %r into an exact field" % (x,))
        if isinstance(x, str):
            x = Fraction(x.strip())
        if self.p:
            if isinstance(x, ModP):
                if x.p != self.p:
                    raise ValueError("element of F_%d used in F_%d" % (x.p, self.p))
                return x
            if isinstance(x, int):
                return ModP(x, self.p)
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise ZeroDivisionError("denominator divisible by %d" % self.p)
                return ModP(x.numerator * pow(x.denominator, -1, self.p), self.p)
            raise TypeError("cannot coerce %r" % (x,))
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        if isinstance(x, ModP):
            raise TypeError("prime-field element used over Q")
        raise TypeError("cannot coerce %r" % (x,))

    def elements(self):
        if not self.p:
            raise ValueError("Q is infinite")
        return [ModP(v, self.p) for v in range(self.p)]

    def fmt(self, x) -> str:
        """Canonical text for a scalar: ``p/q`` over Q, the residue over F_p."""
        if self.p:
            return str(int(x))
        x = Fraction(x)
        return "%d/%d" % (x.numerator, x.denominator)

    def vec(self, entries) -> tuple:
        return tuple(self(x) for x in entries)

    def zeros(self, n: int) -> tuple:
        z = self.zero
        return (z,) * n


@total_ordering
class _Infinity:
    """+inf sentinel for levels; compares above every rational."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("inf")

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __neg__(self):
        raise ValueError("-inf is not a level")

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def level(x) -> Fraction:
    """Coerce to an exact level; floats and bools are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a level")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError("level must be int, Fraction or str, got %r" % (x,))


def fmt_level(x) -> str:
    if x is INF:
        return "inf"
    x = Fraction(x)
    return "%d/%d" % (x.numerator, x.denominator)


def parse_level(s: str):
    s = s.strip()
    if s in ("inf", "+inf", "oo"):
        return INF
    return Fraction(s)
