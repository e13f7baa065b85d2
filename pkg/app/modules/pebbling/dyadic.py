from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

from .errors import CertificateError

DEFAULT_MAX_EXPONENT = 6


@total_ordering
@dataclass(frozen=True, init=False)
class DyadicRational:
    """
    Nonnegative rational numerator / 2**exponent, kept canonical: the
    numerator is odd whenever exponent > 0, and zero is 0/2**0.

    Sums, doubling and halving stay dyadic, so strategy arithmetic never
    rounds.
    """

    numerator: int
    exponent: int

    def __init__(self, numerator: int, exponent: int = 0) -> None:
        if numerator < 0 or exponent < 0:
            raise ValueError(f"dyadic rational needs numerator >= 0 and exponent >= 0, got {numerator}/2^{exponent}")
        if numerator == 0:
            exponent = 0
        while exponent > 0 and numerator % 2 == 0:
            numerator //= 2
            exponent -= 1
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "exponent", exponent)

    # ---------------------- Conversions ---------------------- #

    @classmethod
    def from_fraction(cls, value: Fraction) -> "DyadicRational":
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not dyadic")
        return cls(value.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> "DyadicRational":
        """Exact forms only: `<int>` or `<num>/<power of two>`."""
        text = text.strip()
        try:
            if "/" in text:
                num, den = text.split("/", 1)
                return cls.from_fraction(Fraction(int(num), int(den)))
            return cls(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise CertificateError(f"not an exact dyadic weight: {text!r} ({exc})") from exc

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    @property
    def denominator(self) -> int:
        return 1 << self.exponent

    def __float__(self) -> float:
        return self.numerator / self.denominator

    def __str__(self) -> str:
        if self.exponent == 0:
            return str(self.numerator)
        return f"{self.numerator}/{self.denominator}"

    def __repr__(self) -> str:
        return f"DyadicRational({self})"

    def to_decimal_string(self) -> str:
        # exact: 2^-e has at most e decimal digits
        whole, rest = divmod(self.numerator, self.denominator)
        if not rest:
            return str(whole)
        digits = str(rest * 10**self.exponent // self.denominator).rjust(self.exponent, "0").rstrip("0")
        return f"{whole}.{digits}"

    # ---------------------- Arithmetic ---------------------- #

    def _aligned(self, other: "DyadicRational"):
        e = max(self.exponent, other.exponent)
        return self.numerator << (e - self.exponent), other.numerator << (e - other.exponent), e

    def __add__(self, other: "DyadicRational") -> "DyadicRational":
        if isinstance(other, int):
            other = DyadicRational(other)
        if not isinstance(other, DyadicRational):
            return NotImplemented
        a, b, e = self._aligned(other)
        return DyadicRational(a + b, e)

    __radd__ = __add__

    def __mul__(self, k: int) -> "DyadicRational":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        return DyadicRational(self.numerator * k, self.exponent)

    __rmul__ = __mul__

    def double(self) -> "DyadicRational":
        return self * 2

    def halve(self) -> "DyadicRational":
        return DyadicRational(self.numerator, self.exponent + 1)

    def is_zero(self) -> bool:
        return self.numerator == 0

    def __bool__(self) -> bool:
        return self.numerator != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return other >= 0 and self == DyadicRational(other)
        if not isinstance(other, DyadicRational):
            return NotImplemented
        return self.numerator == other.numerator and self.exponent == other.exponent

    def __hash__(self) -> int:
        return hash((self.numerator, self.exponent))

    def __lt__(self, other: "DyadicRational") -> bool:
        if isinstance(other, int):
            return self.to_fraction() < other
        if not isinstance(other, DyadicRational):
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a < b


ZERO = DyadicRational(0)
ONE = DyadicRational(1)


def rationalize(x: Union[str, float, int, Fraction], max_exponent: int = DEFAULT_MAX_EXPONENT) -> DyadicRational:
    """
    Nearest dyadic rational with exponent <= max_exponent. Decimal strings
    are read exactly; ties go to the even scaled numerator.
    """
    if max_exponent < 0:
        raise ValueError("max_exponent must be >= 0")
    try:
        value = Fraction(x.strip()) if isinstance(x, str) else Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise CertificateError(f"not a number: {x!r}") from exc
    if value < 0:
        raise CertificateError(f"weights must be nonnegative, got {x}")
    scaled = round(value * (1 << max_exponent))
    return DyadicRational(scaled, max_exponent)
