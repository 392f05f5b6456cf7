"""Exact Gaussian rationals ``re + im*i`` with ``Fraction`` parts."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class GaussRat:
    """An element of Q(i). Immutable and hashable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    @classmethod
    def coerce(cls, x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact")
        return cls(x, 0)

    @classmethod
    def parse(cls, text: str) -> "GaussRat":
        """Parse ``a``, ``b*I``, ``a+b*I``, ``a-I`` with rational ``a``, ``b``."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty scalar")
        try:
            if "I" not in s:
                return cls(Fraction(s))
            if not s.endswith("I") or s.count("I") != 1:
                raise ValueError
            body = s[:-1]
            if body.endswith("*"):
                body = body[:-1]
            cut = max(body.rfind("+"), body.rfind("-"))
            if cut > 0:
                real, imag = body[:cut], body[cut:]
            else:
                real, imag = "0", body
            if imag in ("", "+", "-"):
                imag += "1"
            return cls(Fraction(real), Fraction(imag))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"malformed Gaussian rational {text!r}") from None

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = GaussRat.coerce(other)
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussRat.coerce(other)
        return GaussRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussRat.coerce(other) - self

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __mul__(self, other):
        o = GaussRat.coerce(other)
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def inverse(self) -> "GaussRat":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussRat.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = GaussRat(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparisons --------------------------------------------------------
    def __eq__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"GaussRat({self})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return _imag_str(self.im, leading=True)
        return f"{self.re}{_imag_str(self.im, leading=False)}"


def _imag_str(im: Fraction, leading: bool) -> str:
    sign = "-" if im < 0 else ("" if leading else "+")
    mag = abs(im)
    body = "I" if mag == 1 else f"{mag}*I"
    return sign + body


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)


def unit_power(k: int) -> GaussRat:
    """``i**k`` for any integer ``k``."""
    return (ONE, I, -ONE, -I)[k % 4]
