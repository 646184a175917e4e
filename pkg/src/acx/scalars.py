"""Exact Gaussian-rational scalars.

Every coefficient in the engine is an element of Q(i): a complex number whose
real and imaginary parts are arbitrary-precision rationals.  Structure
constants, Hodge stars of rational Hermitian metrics and Fourier eigenvalues
(with the 2*pi factor absorbed into the eigenvalue convention) all live in
this field, so nothing in the engine ever rounds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True, slots=True)
class Scalar:
    """An element a + b*i of Q(i)."""

    re: Fraction
    im: Fraction

    def __add__(self, other: Scalar) -> Scalar:
        other = as_scalar(other)
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> Scalar:
        other = as_scalar(other)
        return Scalar(self.re - other.re, self.im - other.im)

    def __neg__(self) -> Scalar:
        return Scalar(-self.re, -self.im)

    def __mul__(self, other: Scalar) -> Scalar:
        other = as_scalar(other)
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> Scalar:
        other = as_scalar(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return Scalar(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __pow__(self, k: int) -> Scalar:
        if k < 0:
            return (self ** (-k)).inverse()
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> Scalar:
        return ONE / self

    def conj(self) -> Scalar:
        return Scalar(self.re, -self.im)

    def abs2(self) -> Fraction:
        """|s|^2, a nonnegative rational; zero iff s == 0."""
        return self.re * self.re + self.im * self.im

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"Scalar({format_scalar(self)!r})"


_ZERO_F = Fraction(0)
_ONE_F = Fraction(1)

ZERO = Scalar(_ZERO_F, _ZERO_F)
ONE = Scalar(_ONE_F, _ZERO_F)
I = Scalar(_ZERO_F, _ONE_F)
MINUS_ONE = Scalar(-_ONE_F, _ZERO_F)


def integer(k: int) -> Scalar:
    return Scalar(Fraction(k), _ZERO_F)


def rational(p: int, q: int = 1) -> Scalar:
    return Scalar(Fraction(p, q), _ZERO_F)


def from_fraction(x: Fraction) -> Scalar:
    return Scalar(x, _ZERO_F)


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, int):
        return Scalar(Fraction(x), _ZERO_F)
    if isinstance(x, Fraction):
        return Scalar(x, _ZERO_F)
    raise TypeError(f"cannot coerce {x!r} into Q(i)")


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid rational {text!r}: {exc}") from None


def _rational_or_unit(text: str) -> Fraction:
    if text in ("", "+"):
        return _ONE_F
    if text == "-":
        return -_ONE_F
    return Fraction(text)


def parse_scalar(text: str) -> Scalar:
    """Parse 'p/q', 'p/q+r/s*i', 'r/s*i', 'i', '-i' into a Scalar."""
    t = re.sub(r"\s+", "", text)
    if not t:
        raise ValueError("empty Q(i) literal")
    try:
        if not t.endswith("i"):
            return Scalar(Fraction(t), _ZERO_F)
        body = t[:-1]
        if body.endswith("*"):
            body = body[:-1]
        split = None
        for k in range(1, len(body)):
            if body[k] in "+-":
                split = k
                break
        if split is None:
            return Scalar(_ZERO_F, _rational_or_unit(body))
        return Scalar(Fraction(body[:split]), _rational_or_unit(body[split:]))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"invalid Q(i) literal {text!r}") from None


def format_rational(x: Fraction) -> str:
    return str(x)


def format_scalar(s: Scalar) -> str:
    """Canonical 'p/q+r/s*i' rendering; inverse of parse_scalar."""
    if not s.im:
        return format_rational(s.re)
    im = f"{format_rational(s.im)}*i"
    if not s.re:
        return im
    sign = "+" if s.im > 0 else ""
    return f"{format_rational(s.re)}{sign}{im}"
