"""Exact arithmetic on the unit interval [0, 1].

Every value is a :class:`fractions.Fraction` kept inside [0, 1]; there is no
floating point anywhere on the computation path.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

UnitValue = Fraction
RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(-?\d+))?\s*$")


class RationalFormatError(ValueError):
    pass


class OutOfRangeError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or an integer literal into an exact rational."""
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise RationalFormatError(f"malformed rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den <= 0:
        raise RationalFormatError(f"malformed rational {text!r}: denominator must be positive")
    return Fraction(num, den)


def format_rational(value: Fraction) -> str:
    """Canonical ``p/q`` form; integers are written without a denominator."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def unit(value: RationalLike) -> Fraction:
    """Coerce to an exact rational and check it lies in [0, 1]."""
    if isinstance(value, str):
        q = parse_rational(value)
    elif isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        q = Fraction(value)
    else:
        raise TypeError(f"expected an exact rational, got {type(value).__name__}")
    if not ZERO <= q <= ONE:
        raise OutOfRangeError(f"constant {format_rational(q)} out of range [0, 1]")
    return q


def oplus(a: Fraction, b: Fraction) -> Fraction:
    s = a + b
    return s if s < ONE else ONE


def odot(a: Fraction, b: Fraction) -> Fraction:
    s = a + b - ONE
    return s if s > ZERO else ZERO


def join(a: Fraction, b: Fraction) -> Fraction:
    return a if a >= b else b


def meet(a: Fraction, b: Fraction) -> Fraction:
    return a if a <= b else b


def ominus_const(a: Fraction, lam: Fraction) -> Fraction:
    """``a ⊖ λ``, i.e. ``a ⊙ (1 - λ)`` = ``max(a - λ, 0)``."""
    return odot(a, ONE - lam)


def dist_up_scalar(a: Fraction, b: Fraction) -> Fraction:
    """Asymmetric distance ``(b - a)^+`` on the scalar carrier."""
    d = b - a
    return d if d > ZERO else ZERO


def dist_scalar(a: Fraction, b: Fraction) -> Fraction:
    return join(dist_up_scalar(a, b), dist_up_scalar(b, a))


def dyadic(n: int) -> Fraction:
    """``1/2**n``; negative exponents are allowed (``1/2**-1 == 2``)."""
    return Fraction(1, 2**n) if n >= 0 else Fraction(2 ** (-n))


def oplus_n(a: Fraction, n: int) -> Fraction:
    """n-fold truncated sum ``a ⊕ ... ⊕ a``; the empty sum is 0."""
    return min(ONE, a * n)


@dataclass(frozen=True)
class DyadicGrid:
    """All multiples of ``2**-k`` in [0, 1]."""

    denominator_exponent: int

    def __post_init__(self) -> None:
        if self.denominator_exponent < 0:
            raise ValueError("grid exponent must be nonnegative")

    @property
    def step(self) -> Fraction:
        return dyadic(self.denominator_exponent)

    def __len__(self) -> int:
        return 2**self.denominator_exponent + 1

    def __iter__(self) -> Iterator[Fraction]:
        d = 2**self.denominator_exponent
        return (Fraction(i, d) for i in range(d + 1))

    def __contains__(self, value: object) -> bool:
        if not isinstance(value, (Fraction, int)):
            return False
        q = Fraction(value)
        return ZERO <= q <= ONE and (2**self.denominator_exponent % q.denominator) == 0

    def values(self) -> tuple[Fraction, ...]:
        return tuple(self)
