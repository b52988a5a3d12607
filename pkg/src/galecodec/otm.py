"""Oracle machines with exact query accounting.

A machine computes the first ``n`` bits of its output sequence while reading
an oracle through :class:`Oracle`, which records every queried index in a
:class:`QueryLedger`.  Repeated queries to one index are counted once.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .bits import BitReader, BitString
from .blockcodec import BlockSchedule, decode_blocks
from .errors import OracleExhausted, OutputMismatch, ParameterOutOfRange
from .gales import MartingaleModel

LedgerMode = str  # "distinct" or "rightmost"


class QueryLedger:
    """Distinct oracle indices read so far.

    ``mode="rightmost"`` reports usage as one past the largest index queried,
    as if every bit to its left had been read too.
    """

    def __init__(self, mode: LedgerMode = "distinct"):
        if mode not in ("distinct", "rightmost"):
            raise ParameterOutOfRange(f"unknown ledger mode {mode!r}")
        self.mode = mode
        self.indices: set[int] = set()

    def record(self, index: int) -> None:
        self.indices.add(index)

    @property
    def count(self) -> int:
        if self.mode == "rightmost":
            return max(self.indices) + 1 if self.indices else 0
        return len(self.indices)


class Oracle:
    """Query interface over a finite bit string or a bit-valued function."""

    def __init__(self, bits: Union[BitString, Callable[[int], int]],
                 ledger: Optional[QueryLedger] = None):
        self._bits = bits
        self.ledger = ledger if ledger is not None else QueryLedger()

    def query(self, index: int) -> int:
        if index < 0:
            raise OracleExhausted(f"negative oracle index {index}")
        if isinstance(self._bits, str):
            if index >= len(self._bits):
                raise OracleExhausted(
                    f"query to index {index} of a {len(self._bits)}-bit oracle")
            bit = self._bits[index] == "1"
        else:
            bit = bool(self._bits(index))
        self.ledger.record(index)
        return int(bit)


class OracleMachine:
    name = "machine"

    def compute(self, n: int, oracle: Oracle) -> BitString:
        raise NotImplementedError

    def extend(self, done: BitString, n: int, oracle: Oracle) -> BitString:
        """First ``n`` output bits given the first ``len(done)`` already computed.

        Machines whose output bits are computed independently override this
        to skip the recomputation; the set of queries made must match ``compute``.
        """
        return self.compute(n, oracle)

    def __repr__(self) -> str:
        return self.name


class BitCopier(OracleMachine):
    name = "copier"

    def compute(self, n: int, oracle: Oracle) -> BitString:
        return self.extend("", n, oracle)

    def extend(self, done: BitString, n: int, oracle: Oracle) -> BitString:
        return done + "".join(str(oracle.query(j)) for j in range(len(done), n))


class Inflate(OracleMachine):
    """Reads ``m`` oracle bits per output bit and keeps the first of each group."""

    def __init__(self, m: int):
        if m < 1:
            raise ParameterOutOfRange("inflation factor must be >= 1")
        self.m = m
        self.name = f"inflate({m})"

    def compute(self, n: int, oracle: Oracle) -> BitString:
        return self.extend("", n, oracle)

    def extend(self, done: BitString, n: int, oracle: Oracle) -> BitString:
        out = [done]
        for j in range(len(done), n):
            bits = [oracle.query(self.m * j + r) for r in range(self.m)]
            out.append(str(bits[0]))
        return "".join(out)


class BlockDecoderMachine(OracleMachine):
    """Block-codec decoder reading its records straight from the oracle."""

    def __init__(self, model: MartingaleModel, sched: BlockSchedule):
        self.model = model
        self.sched = sched
        self.name = f"decoder({model!r})"

    def compute(self, n: int, oracle: Oracle) -> BitString:
        return decode_blocks(BitReader(oracle), n, self.model, self.sched)


class _DerivedOracle(Oracle):
    """Bits of an intermediate sequence produced on demand by an inner machine."""

    def __init__(self, machine: OracleMachine, outer: Oracle):
        super().__init__(self._bit)
        self._machine = machine
        self._outer = outer
        self._cache = ""

    def _bit(self, index: int) -> int:
        if index >= len(self._cache):
            # only as many bits as needed, so the outer ledger sees minimal usage
            self._cache = self._machine.extend(self._cache, index + 1, self._outer)
        return int(self._cache[index] == "1")


class Composed(OracleMachine):
    """``first`` reads an intermediate sequence that ``second`` computes from the oracle."""

    def __init__(self, first: OracleMachine, second: OracleMachine):
        self.first = first
        self.second = second
        self.name = f"({first.name} o {second.name})"

    def compute(self, n: int, oracle: Oracle) -> BitString:
        return self.first.compute(n, _DerivedOracle(self.second, oracle))


def compose(m1: OracleMachine, m2: OracleMachine) -> Composed:
    return Composed(m1, m2)


def copier() -> BitCopier:
    return BitCopier()


def inflate(m: int) -> Inflate:
    return Inflate(m)


def run(machine: OracleMachine, oracle: Union[BitString, Callable[[int], int], Oracle], n: int,
        mode: LedgerMode = "distinct") -> tuple[BitString, QueryLedger]:
    if not isinstance(oracle, Oracle):
        oracle = Oracle(oracle, QueryLedger(mode))
    out = machine.compute(n, oracle)
    return out, oracle.ledger


def spread(bits: BitString, m: int, filler: str = "0") -> BitString:
    """Oracle for ``inflate(m)``: each bit followed by ``m - 1`` filler bits."""
    return "".join(b + filler * (m - 1) for b in bits)


@dataclass(frozen=True)
class RatioProfile:
    """Exact usage ratios at every ``n`` in a range; finite-n proxies only."""

    entries: tuple[tuple[int, int, Fraction], ...]
    window: int

    def _tail(self) -> list[Fraction]:
        return [r for _, _, r in self.entries[-self.window:]]

    @property
    def tail_min(self) -> Fraction:
        return min(self._tail())

    @property
    def tail_max(self) -> Fraction:
        return max(self._tail())

    def ratios(self) -> list[Fraction]:
        return [r for _, _, r in self.entries]


def ratio_profile(machine: OracleMachine, oracle: Union[BitString, Callable[[int], int]],
                  expected: BitString, n_max: int, window: int, n_min: int = 1,
                  mode: LedgerMode = "distinct") -> RatioProfile:
    """Usage/n for ``n_min <= n <= n_max``, each ``n`` run on a fresh ledger."""
    if window < 1:
        raise ParameterOutOfRange("window must be >= 1")
    entries = []
    for n in range(max(n_min, 1), n_max + 1):
        out, ledger = run(machine, oracle, n, mode)
        if out != expected[:n]:
            raise OutputMismatch(f"{machine.name} does not reproduce the expected prefix at n={n}")
        entries.append((n, ledger.count, Fraction(ledger.count, n)))
    return RatioProfile(tuple(entries), window)
