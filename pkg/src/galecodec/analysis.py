"""Synthetic sources, per-block diagnostics and dimension reports.

Floating point appears only in the reported diagnostics; the quantities that
feed the codec stay exact.
"""

from __future__ import annotations

import io
import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .bits import BitString
from .blockcodec import BitSource, BlockSchedule, encode_blocks
from .errors import EmptyPattern, ParameterOutOfRange
from .gales import MartingaleModel, ScaledPow2, compare_pow2

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1


def splitmix64_block(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start .. start+count-1`` of the splitmix64 stream for ``seed``.

    Output ``j`` uses state ``seed + (j + 1) * gamma``, so any window can be
    produced without running through the earlier outputs.
    """
    j = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK) + j * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))


class ZerosSource:
    def prefix(self, n: int) -> BitString:
        return "0" * n

    def __repr__(self) -> str:
        return "zeros"


class PeriodicSource:
    def __init__(self, pattern: BitString):
        if not pattern:
            raise EmptyPattern("periodic pattern must be nonempty")
        if pattern.strip("01"):
            raise ParameterOutOfRange(f"pattern {pattern!r} is not a bit string")
        self.pattern = pattern

    def prefix(self, n: int) -> BitString:
        reps = -(-n // len(self.pattern))
        return (self.pattern * reps)[:n]

    def __repr__(self) -> str:
        return f"periodic:{self.pattern}"


class BernoulliSource:
    """Bit ``j`` is 1 iff splitmix64 output ``j`` is below ``floor(p * 2**64)``."""

    def __init__(self, p: Fraction, seed: int):
        p = Fraction(p)
        if not 0 < p < 1:
            raise ParameterOutOfRange(f"bernoulli source needs 0 < p < 1, got {p}")
        self.p = p
        self.seed = seed & _MASK
        self.cutoff = (p.numerator << 64) // p.denominator

    def prefix(self, n: int) -> BitString:
        if n == 0:
            return ""
        draws = splitmix64_block(self.seed, 0, n)
        ones = draws < np.uint64(self.cutoff)
        return ones.astype(np.uint8).tobytes().translate(bytes.maketrans(b"\x00\x01", b"01")).decode()

    def __repr__(self) -> str:
        return f"bernoulli:{self.p}:{self.seed}"


class RegimeSource:
    """Switches between sub-sources at fixed offsets, cycling through them.

    Bits before the first switch come from ``sources[0]``, the next segment
    from ``sources[1]`` and so on; bit ``j`` of a segment is bit ``j`` of its
    sub-source.
    """

    def __init__(self, sources: Sequence[BitSource], switches: Sequence[int]):
        if not sources:
            raise EmptyPattern("regime source needs at least one sub-source")
        if any(b <= a for a, b in zip(switches, switches[1:])) or any(s <= 0 for s in switches):
            raise ParameterOutOfRange("switch offsets must be positive and strictly increasing")
        self.sources = list(sources)
        self.switches = list(switches)

    def prefix(self, n: int) -> BitString:
        bounds = [0] + [s for s in self.switches if s < n] + [n]
        parts = []
        for seg, (a, b) in enumerate(zip(bounds, bounds[1:])):
            parts.append(self.sources[seg % len(self.sources)].prefix(b)[a:b])
        return "".join(parts)


class LiteralSource:
    def __init__(self, bits: BitString):
        self.bits = bits

    def prefix(self, n: int) -> BitString:
        if n > len(self.bits):
            raise ParameterOutOfRange(f"source has only {len(self.bits)} bits, {n} requested")
        return self.bits[:n]


def zeros_source() -> ZerosSource:
    return ZerosSource()


def periodic_source(pattern: BitString) -> PeriodicSource:
    return PeriodicSource(pattern)


def bernoulli_source(p: Fraction, seed: int) -> BernoulliSource:
    return BernoulliSource(p, seed)


def regime_source(sources: Sequence[BitSource], switches: Sequence[int]) -> RegimeSource:
    return RegimeSource(sources, switches)


def geometric_switches(base: int, limit: int) -> list[int]:
    """``base**1, base**2, ...`` up to ``limit``."""
    out, x = [], base
    while x <= limit:
        out.append(x)
        x *= base
    return out


def entropy(p: Fraction) -> float:
    p = Fraction(p)
    if not 0 < p < 1:
        raise ParameterOutOfRange(f"entropy needs 0 < p < 1, got {p}")
    x = float(p)
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def log2_fraction(x: Fraction) -> float:
    return math.log2(x.numerator) - math.log2(x.denominator)


@dataclass(frozen=True)
class ReportRow:
    block: int
    k: int
    n_end: int
    admitted_size: int
    log2_admitted: float
    l_value: float
    index_bits: int
    threshold_bits: int
    index_sum: float
    usage: int

    @property
    def index_ratio(self) -> float:
        return self.index_sum / self.n_end

    @property
    def total_ratio(self) -> Fraction:
        return Fraction(self.usage, self.n_end)

    @property
    def overhead_ratio(self) -> float:
        return float(self.total_ratio) - self.index_ratio


@dataclass(frozen=True)
class DimensionReport:
    """Per-block sizes of the admitted sets and cumulative bit accounting.

    ``l_value`` is the exponent loss of the block: capital grew by a factor
    ``2**(k - l)``.  All ratios are finite-n measurements, not limits.
    """

    rows: tuple[ReportRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def final(self) -> ReportRow:
        return self.rows[-1]


def dimension_report(source: Union[BitString, BitSource], m: MartingaleModel,
                     sched: BlockSchedule, B: int) -> DimensionReport:
    stream = encode_blocks(source, m, sched, B)
    rows = []
    index_sum = 0.0
    usage = 0
    for rec in stream.records:
        log_a = math.log2(rec.admitted_size)
        index_sum += log_a
        usage += rec.index_bits + rec.threshold_bits
        gain = log2_fraction(rec.capital_after) - log2_fraction(rec.capital_before)
        rows.append(ReportRow(rec.block, rec.k, rec.start + rec.k, rec.admitted_size, log_a,
                              rec.k - gain, rec.index_bits, rec.threshold_bits,
                              index_sum, usage))
    return DimensionReport(tuple(rows))


CSV_HEADER = ("i", "k", "n_end", "sizeA", "enc_p_bits", "thresh_bits",
              "index_ratio", "total_ratio")


def export_csv(report: DimensionReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in report.rows:
        writer.writerow([r.block, r.k, r.n_end, r.admitted_size, r.index_bits,
                         r.threshold_bits, f"{r.index_ratio:.6f}",
                         f"{float(r.total_ratio):.6f}"])
    return buf.getvalue()


def capital_curve(m: MartingaleModel, source: Union[BitString, BitSource], n_max: int,
                  s: Fraction) -> list[tuple[int, int]]:
    """``(n, sign)`` comparing ``value(S|n)`` against ``2**((1-s) n) value(lambda)``."""
    bits = source if isinstance(source, str) else source.prefix(n_max)
    s = Fraction(s)
    state = m.start()
    start = m.capital(state)
    table = []
    for n in range(n_max + 1):
        if n:
            state = m.step(state, bits[n - 1])
        sign = compare_pow2(ScaledPow2(m.capital(state), 0), ScaledPow2(start, (1 - s) * n))
        table.append((n, sign))
    return table
