"""Exact complex literals: parsing, formatting and conversion to gmpy2."""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr, mpq

_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_COMPLEX = re.compile(
    rf"^(?P<re>[+-]?{_NUMBER})?(?:(?P<im>[+-](?:{_NUMBER})?|(?:{_NUMBER}))[ij])?$"
)


def parse_rational(text: str) -> Fraction:
    """Parse ``"3/5"``, ``"-0.25"`` or ``"1e-3"`` into an exact fraction."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def format_rational(x: Fraction) -> str:
    """Shortest exact text for ``x``: a decimal when it terminates, else ``n/d``."""
    x = Fraction(x)
    d = x.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    text = format(Decimal(x.numerator) / Decimal(x.denominator), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


@dataclass(frozen=True)
class RationalComplex:
    """A complex number with exact rational parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def parse(cls, text: str) -> "RationalComplex":
        """Accept ``re``, ``re+imi``, ``re-imi`` and ``imi`` with decimal or n/d parts."""
        s = text.strip().replace(" ", "")
        if s in ("i", "+i", "j", "+j"):
            return cls(Fraction(0), Fraction(1))
        if s in ("-i", "-j"):
            return cls(Fraction(0), Fraction(-1))
        m = _COMPLEX.match(s)
        if not s or m is None or (m.group("re") is None and m.group("im") is None):
            raise ValueError(f"not a complex literal: {text!r}")
        re_part = parse_rational(m.group("re")) if m.group("re") else Fraction(0)
        im_text = m.group("im")
        if im_text is None:
            im_part = Fraction(0)
        elif im_text in ("+", "-"):
            im_part = Fraction(1 if im_text == "+" else -1)
        else:
            im_part = parse_rational(im_text)
        return cls(re_part, im_part)

    def __str__(self) -> str:
        if self.im == 0:
            return format_rational(self.re)
        mag = abs(self.im)
        im_text = "" if mag == 1 else format_rational(mag)
        if self.re == 0:
            return ("-" if self.im < 0 else "") + im_text + "i"
        sign = "-" if self.im < 0 else "+"
        return f"{format_rational(self.re)}{sign}{im_text}i"

    def __neg__(self) -> "RationalComplex":
        return RationalComplex(-self.re, -self.im)

    def __mul__(self, other: "RationalComplex") -> "RationalComplex":
        other = as_rational_complex(other)
        return RationalComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: "RationalComplex") -> "RationalComplex":
        other = as_rational_complex(other)
        n = other.abs2()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        return self * RationalComplex(other.re / n, -other.im / n)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def to_mpc(self) -> mpc:
        """Round to the precision of the active gmpy2 context."""
        return mpc(mpfr(mpq(self.re)), mpfr(mpq(self.im)))


def as_rational_complex(x) -> RationalComplex:
    if isinstance(x, RationalComplex):
        return x
    if isinstance(x, str):
        return RationalComplex.parse(x)
    if isinstance(x, complex):
        return RationalComplex(Fraction(x.real), Fraction(x.imag))
    return RationalComplex(Fraction(x))


def to_mpc(x) -> mpc:
    """Convert a supported scalar to an mpc in the active gmpy2 context."""
    if isinstance(x, mpc):
        return mpc(x)
    if isinstance(x, RationalComplex):
        return x.to_mpc()
    if isinstance(x, str):
        return RationalComplex.parse(x).to_mpc()
    if isinstance(x, Fraction):
        return mpc(mpfr(mpq(x)))
    if isinstance(x, complex):
        return mpc(x)
    if isinstance(x, (int, float)) or type(x).__name__ in ("mpfr", "mpz", "mpq"):
        return mpc(mpfr(x))
    raise TypeError(f"cannot convert {type(x).__name__} to a complex number")


def to_mpfr(x) -> mpfr:
    """Convert a real scalar (or a complex one with zero imaginary part)."""
    if isinstance(x, Fraction):
        return mpfr(mpq(x))
    if isinstance(x, str):
        r = RationalComplex.parse(x)
        if r.im != 0:
            raise ValueError(f"expected a real literal, got {x!r}")
        return mpfr(mpq(r.re))
    if isinstance(x, RationalComplex):
        if x.im != 0:
            raise ValueError("expected a real number")
        return mpfr(mpq(x.re))
    if isinstance(x, mpc):
        if x.imag != 0:
            raise ValueError("expected a real number")
        return mpfr(x.real)
    return mpfr(x)


def format_mpfr(x: mpfr, digits: int) -> str:
    """Deterministic scientific notation with ``digits`` significant digits."""
    if gmpy2.is_nan(x):
        return "nan"
    if gmpy2.is_infinite(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0." + "0" * (digits - 1) + "e+00"
    mant, exp, _ = x.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    e = exp - 1
    return f"{sign}{mant[0]}.{mant[1:]}e{'+' if e >= 0 else '-'}{abs(e):02d}"


def format_mpc(z: mpc, digits: int) -> dict[str, str]:
    return {"re": format_mpfr(z.real, digits), "im": format_mpfr(z.imag, digits)}
