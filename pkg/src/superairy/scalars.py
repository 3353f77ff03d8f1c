"""Exact scalars: rationals (fractions.Fraction) and the quadratic field Q(sqrt 3)."""
from __future__ import annotations

from fractions import Fraction
from typing import Union

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


class QSqrt3:
    """a + b*sqrt(3) with a, b rational. Immutable."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("QSqrt3 is immutable")

    @staticmethod
    def _coerce(other):
        if isinstance(other, QSqrt3):
            return other
        if isinstance(other, (int, Fraction)):
            return QSqrt3(other, 0)
        return NotImplemented

    def _wrap(self, a, b):
        # collapse back to a plain rational when the irrational part vanishes
        if b == 0:
            return Fraction(a)
        return QSqrt3(a, b)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt3(-self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conjugate(self):
        return QSqrt3(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 3 * self.b * self.b

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt3)")
        num = self * o.conjugate()
        if isinstance(num, Fraction):
            return num / n
        return self._wrap(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __eq__(self, other):
        if isinstance(other, QSqrt3):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        return f"QSqrt3({self.a}, {self.b})"

    def __str__(self):
        if self.a == 0:
            return f"{self.b}*sqrt3"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}*sqrt3"


SQRT3 = QSqrt3(0, 1)

Scalar = Union[Fraction, QSqrt3]


def as_scalar(v) -> Scalar:
    """Coerce ints, strings "p/q", Fractions or QSqrt3 into a canonical exact scalar."""
    if isinstance(v, QSqrt3):
        return v if v.b != 0 else v.a
    if isinstance(v, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(v, (int, Fraction, str)):
        return Fraction(v)
    if isinstance(v, dict):
        return as_scalar(QSqrt3(Fraction(v.get("rat", 0)), Fraction(v.get("sqrt3", 0))))
    raise TypeError(f"cannot interpret {v!r} as an exact scalar")


def fmt_rational(q: Fraction) -> str:
    # lowest terms, q > 0, integers without "/1"
    return str(Fraction(q))


def scalar_to_json(v):
    if isinstance(v, QSqrt3):
        if v.b == 0:
            return fmt_rational(v.a)
        return {"rat": fmt_rational(v.a), "sqrt3": fmt_rational(v.b)}
    return fmt_rational(v)


def scalar_from_json(obj) -> Scalar:
    if isinstance(obj, dict):
        if set(obj) - {"rat", "sqrt3"}:
            raise ValueError(f"unexpected scalar keys {sorted(obj)}")
        return as_scalar(obj)
    if isinstance(obj, str):
        return Fraction(obj)
    if isinstance(obj, int) and not isinstance(obj, bool):
        return Fraction(obj)
    raise ValueError(f"bad scalar {obj!r}")
