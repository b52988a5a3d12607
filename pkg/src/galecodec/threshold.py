"""Dyadic under-approximation of capital values and their codewords."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bits import BitReader, BitString, dec_nat, enc_nat
from .errors import MalformedCode, NonPositiveInput, ParameterOutOfRange


@dataclass(frozen=True)
class Dyadic:
    """Positive dyadic rational ``mantissa * 2**exponent`` with odd mantissa."""

    mantissa: int
    exponent: int

    def __post_init__(self) -> None:
        if self.mantissa <= 0:
            raise ParameterOutOfRange("dyadic thresholds are positive")
        if self.mantissa % 2 == 0:
            raise ParameterOutOfRange("dyadic mantissa must be odd (canonical form)")

    @classmethod
    def normalized(cls, mantissa: int, exponent: int) -> Dyadic:
        if mantissa <= 0:
            raise ParameterOutOfRange("dyadic thresholds are positive")
        tz = (mantissa & -mantissa).bit_length() - 1
        return cls(mantissa >> tz, exponent + tz)

    @classmethod
    def from_fraction(cls, x: Fraction) -> Dyadic:
        x = Fraction(x)
        den = x.denominator
        if den & (den - 1):
            raise ParameterOutOfRange(f"{x} is not dyadic")
        return cls.normalized(x.numerator, -(den.bit_length() - 1))

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def __float__(self) -> float:
        return float(self.to_fraction())


def slack(i: int) -> Fraction:
    """Relative slack allowed below the capital at block ``i``."""
    return Fraction(1, 2) if i <= 1 else Fraction(1, i * i)


def mantissa_budget(i: int) -> int:
    """Significant bits kept: ``1 + ceil(log2(1/slack(i)))``."""
    inv = slack(i).denominator
    return 1 + (inv - 1).bit_length()


def floor_log2(x: Fraction) -> int:
    """Exact ``floor(log2(x))`` for positive rationals."""
    num, den = x.numerator, x.denominator
    e = num.bit_length() - den.bit_length()
    # 2**e <= num/den < 2**(e+1), corrected by one step if needed
    if e >= 0:
        if num < den << e:
            e -= 1
    elif num << -e < den:
        e -= 1
    return e


def approximate_below(r: Fraction, i: int) -> Dyadic:
    """Largest-mantissa dyadic ``d`` with ``r > d >= r (1 - slack(i))``.

    Keeps the leading ``mantissa_budget(i)`` bits of ``r``; when that
    truncation is exact, one unit in the last kept place is subtracted.
    """
    r = Fraction(r)
    if r <= 0:
        raise NonPositiveInput(f"cannot approximate non-positive {r} from below")
    if i < 0:
        raise ParameterOutOfRange("block index must be a natural number")
    g = mantissa_budget(i)
    ulp_exp = floor_log2(r) - g + 1
    num, den = r.numerator, r.denominator
    if ulp_exp >= 0:
        m, rem = divmod(num, den << ulp_exp)
    else:
        m, rem = divmod(num << -ulp_exp, den)
    if rem == 0:
        m -= 1
    return Dyadic.normalized(m, ulp_exp)


def zigzag(e: int) -> int:
    return 2 * e if e >= 0 else -2 * e - 1


def unzigzag(z: int) -> int:
    return z // 2 if z % 2 == 0 else -(z + 1) // 2


def encode_threshold(d: Dyadic) -> BitString:
    return enc_nat(zigzag(d.exponent)) + enc_nat(d.mantissa - 1)


def decode_threshold(reader: BitReader) -> tuple[Dyadic, int]:
    start = reader.pos
    z, _ = dec_nat(reader)
    m1, _ = dec_nat(reader)
    if (m1 + 1) % 2 == 0:
        raise MalformedCode("threshold mantissa is not odd")
    return Dyadic(m1 + 1, unzigzag(z)), reader.pos - start


def exceeds(x: Fraction, d: Dyadic, shift: int = 0) -> bool:
    """Exact test ``x * 2**shift > d`` without building huge powers of two.

    Magnitudes are compared from bit lengths first; the exact rational
    comparison runs only when they are within a couple of binades.
    """
    num, den = x.numerator, x.denominator
    if num <= 0:
        return False
    # 2**(lo) < x * 2**shift < 2**(hi)
    lo = num.bit_length() - 1 - den.bit_length() + shift
    hi = num.bit_length() - den.bit_length() + 1 + shift
    d_lo = d.exponent + d.mantissa.bit_length() - 1
    d_hi = d.exponent + d.mantissa.bit_length()
    if lo >= d_hi:
        return True
    if hi <= d_lo:
        return False
    e = d.exponent - shift
    if e >= 0:
        return num > (d.mantissa << e) * den
    return num << -e > d.mantissa * den
