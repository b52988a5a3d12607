"""Block-wise enumerative coding driven by a martingale.

The source is cut into blocks; block ``i`` covers bits ``[n(i), n(i+1))``.
For each block the encoder picks a dyadic threshold ``d_i`` just below the
capital reached at the end of the block and writes the block's rank among
all same-length extensions whose capital clears ``d_i``.  The decoder
replays the same enumeration to turn ranks back into bits.

Admission order is lexicographic for ordinary models.  Models flagged with
``staged_order`` are enumerated the way a lower-semicomputable martingale
would be: stage ``t = 0, 1, ...`` admits, in lexicographic order, every
extension whose staged capital at ``t`` clears the threshold.

Exchangeable models (capital depends only on the number of ones) are ranked
by binomial counting; everything else goes through a pruned depth-first walk
of the extension tree.  Both paths produce identical ranks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, isqrt
from typing import Any, Iterator, Literal, Optional, Protocol, Union

from .bits import BitReader, BitString, BitWriter, dec_nat, enc_nat
from .errors import (
    IndexOutOfRange,
    InsufficientBlocks,
    ModelMismatch,
    NotAdmitted,
    ParameterOutOfRange,
)
from .gales import MartingaleModel
from .threshold import Dyadic, approximate_below, decode_threshold, encode_threshold, exceeds

Order = Literal["exact", "staged"]

STAGE_BUDGET = 1 << 20
DEFAULT_KMAX = 24

MODE_PASSTHROUGH = 0
MODE_BLOCKS = 1


@dataclass(frozen=True)
class BlockSchedule:
    """Block lengths ``k(i) = i + 1``, optionally capped at ``kmax``."""

    kmax: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kmax is not None and not 1 <= self.kmax <= 0xFFFF:
            raise ParameterOutOfRange("kmax must lie in [1, 65535]")

    @property
    def header_kmax(self) -> int:
        return 0 if self.kmax is None else self.kmax

    @classmethod
    def from_header(cls, kmax: int) -> BlockSchedule:
        return cls(None if kmax == 0 else kmax)

    def k(self, i: int) -> int:
        return i + 1 if self.kmax is None else min(i + 1, self.kmax)

    def n(self, i: int) -> int:
        """Offset of the first bit of block ``i``."""
        if self.kmax is None or i <= self.kmax:
            return i * (i + 1) // 2
        c = self.kmax
        return c * (c + 1) // 2 + (i - c) * c

    def locate(self, n: int) -> int:
        """The block ``i`` with ``n(i) <= n < n(i+1)``."""
        if n < 0:
            raise ValueError("bit offset must be >= 0")
        if self.kmax is not None and n >= self.n(self.kmax):
            return self.kmax + (n - self.n(self.kmax)) // self.kmax
        i = (isqrt(8 * n + 1) - 1) // 2
        return i

    def blocks_for(self, n: int) -> int:
        """Number of leading blocks needed to cover ``n`` bits."""
        return 0 if n == 0 else self.locate(n - 1) + 1


def triangular_schedule() -> BlockSchedule:
    return BlockSchedule(None)


def capped_schedule(kmax: int = DEFAULT_KMAX) -> BlockSchedule:
    return BlockSchedule(kmax)


def locate_block(sched: BlockSchedule, n: int) -> int:
    return sched.locate(n)


@dataclass(frozen=True)
class BlockRecord:
    block: int
    k: int
    start: int
    index: int
    threshold: Dyadic
    admitted_size: int
    capital_before: Fraction
    capital_after: Fraction
    index_bits: int
    threshold_bits: int


@dataclass(frozen=True)
class OracleStream:
    """The compressed oracle sequence plus the header fields that frame it."""

    mode: int
    model_bytes: bytes
    kmax: int
    blocks: int
    payload: BitString
    records: tuple[BlockRecord, ...] = field(default=(), compare=False, repr=False)

    @property
    def payload_bits(self) -> int:
        return len(self.payload)


def _resolve_order(model: MartingaleModel, order: Optional[Order]) -> Order:
    if order is None:
        return "staged" if model.staged_order else "exact"
    if order not in ("exact", "staged"):
        raise ParameterOutOfRange(f"unknown admission order {order!r}")
    return order


def admission_stage(model: MartingaleModel, state: Any, d: Dyadic,
                    budget: int = STAGE_BUDGET) -> int:
    """First stage ``t`` at which the staged capital of ``state`` clears ``d``."""
    for t in range(budget):
        if exceeds(model.staged_capital(state, t), d):
            return t
    raise IndexOutOfRange(f"stage budget {budget} exhausted before admission")


def _admitted_lex(model: MartingaleModel, state: Any, k: int, d: Dyadic) -> Iterator[tuple[BitString, Any]]:
    # prune v when capital(v) * 2**(k - |v|) <= d: no extension can clear d
    stack: list[tuple[str, Any]] = [("", state)]
    while stack:
        v, st = stack.pop()
        if not exceeds(model.capital(st), d, k - len(v)):
            continue
        if len(v) == k:
            yield v, st
            continue
        stack.append((v + "1", model.step(st, "1")))
        stack.append((v + "0", model.step(st, "0")))


class _TreeIndex:
    """Admitted set found by a pruned walk of the extension tree.

    Lexicographic order is produced lazily so ranking an early string stops
    the walk early; staged order needs every admitted string up front.
    """

    def __init__(self, model: MartingaleModel, state: Any, k: int, d: Dyadic,
                 order: Order, budget: int):
        walk = _admitted_lex(model, state, k, d)
        if order == "staged":
            keyed = sorted((admission_stage(model, st, d, budget), u) for u, st in walk)
            self._seen = [u for _, u in keyed]
            self._rest: Iterator[BitString] = iter(())
        else:
            self._seen = []
            self._rest = (u for u, _ in walk)

    def __iter__(self) -> Iterator[BitString]:
        i = 0
        while True:
            if i < len(self._seen):
                yield self._seen[i]
                i += 1
                continue
            u = next(self._rest, None)
            if u is None:
                return
            self._seen.append(u)

    def size(self) -> int:
        return sum(1 for _ in self)

    def rank(self, u: BitString) -> int:
        for p, v in enumerate(self, start=1):
            if v == u:
                return p
        raise NotAdmitted(f"{u!r} is not in the admitted set")

    def unrank(self, p: int) -> BitString:
        if p >= 1:
            for q, v in enumerate(self, start=1):
                if q == p:
                    return v
        raise IndexOutOfRange(f"rank {p} exceeds the admitted set")


class _CountingIndex:
    """Admitted set of an exchangeable model, described by ones-counts.

    Extensions sharing a ones-count share their capital, so the admitted set
    is a union of weight classes.  Each class gets an admission key (its
    stage, or 0 in lexicographic order); ranks count earlier keys first and
    then lexicographic predecessors within the same key.
    """

    def __init__(self, model: MartingaleModel, state: Any, k: int, d: Dyadic,
                 order: Order, budget: int):
        self.k = k
        profile = model.ones_profile(state, k)
        groups: dict[int, list[int]] = {}
        for j, cap in enumerate(profile):
            if not exceeds(cap, d):
                continue
            if order == "staged":
                rep = model.extend(state, "1" * j + "0" * (k - j))
                key = admission_stage(model, rep, d, budget)
            else:
                key = 0
            groups.setdefault(key, []).append(j)
        self._keys = sorted(groups)
        self._groups = [groups[key] for key in self._keys]
        self._sizes = [sum(comb(k, j) for j in g) for g in self._groups]

    def size(self) -> int:
        return sum(self._sizes)

    def _count_completions(self, free: int, ones: int, weights: list[int]) -> int:
        return sum(comb(free, w - ones) for w in weights if 0 <= w - ones <= free)

    def rank(self, u: BitString) -> int:
        if len(u) != self.k or u.strip("01"):
            raise NotAdmitted(f"{u!r} is not a length-{self.k} bit string")
        weight = u.count("1")
        for g, group in enumerate(self._groups):
            if weight in group:
                break
        else:
            raise NotAdmitted(f"{u!r} is not in the admitted set")
        before = sum(self._sizes[:g])
        ones = 0
        for pos, b in enumerate(u):
            if b == "1":
                before += self._count_completions(self.k - pos - 1, ones, group)
                ones += 1
        return before + 1

    def unrank(self, p: int) -> BitString:
        if p < 1 or p > self.size():
            raise IndexOutOfRange(f"rank {p} outside [1, {self.size()}]")
        p -= 1
        for group, size in zip(self._groups, self._sizes):
            if p < size:
                break
            p -= size
        out = []
        ones = 0
        for pos in range(self.k):
            zero_branch = self._count_completions(self.k - pos - 1, ones, group)
            if p < zero_branch:
                out.append("0")
            else:
                p -= zero_branch
                out.append("1")
                ones += 1
        return "".join(out)


BlockIndex = Union[_TreeIndex, _CountingIndex]


def block_index(model: MartingaleModel, state: Any, k: int, d: Dyadic,
                order: Optional[Order] = None, *, counting: Optional[bool] = None,
                budget: int = STAGE_BUDGET) -> BlockIndex:
    """Build the admitted-set index for one block starting from ``state``.

    ``counting`` forces (True) or forbids (False) the binomial-counting path;
    by default it is used whenever the model is exchangeable.
    """
    if k < 1:
        raise ParameterOutOfRange("block length must be >= 1")
    order = _resolve_order(model, order)
    use_counting = model.exchangeable if counting is None else counting
    if use_counting and not model.exchangeable:
        raise ParameterOutOfRange("counting index requires an exchangeable model")
    cls = _CountingIndex if use_counting else _TreeIndex
    return cls(model, state, k, d, order, budget)


def enumerate_admitted(m: MartingaleModel, prefix: BitString, k: int, d: Dyadic,
                       order: Optional[Order] = None) -> Iterator[tuple[BitString, int]]:
    """Yield ``(u, rank)`` for every admitted extension, in admission order."""
    index = _TreeIndex(m, m.state_of(prefix), k, d, _resolve_order(m, order), STAGE_BUDGET)
    for rank, u in enumerate(index, start=1):
        yield u, rank


def string_to_index(m: MartingaleModel, prefix: BitString, k: int, d: Dyadic, u: BitString,
                    order: Optional[Order] = None) -> int:
    if len(u) != k:
        raise NotAdmitted(f"block {u!r} does not have length {k}")
    return block_index(m, m.state_of(prefix), k, d, order).rank(u)


def index_to_string(m: MartingaleModel, prefix: BitString, k: int, d: Dyadic, p: int,
                    order: Optional[Order] = None) -> BitString:
    return block_index(m, m.state_of(prefix), k, d, order).unrank(p)


class BitSource(Protocol):
    def prefix(self, n: int) -> BitString: ...


def source_bits(source: Union[BitString, BitSource], n: int) -> BitString:
    if isinstance(source, str):
        if len(source) < n:
            raise InsufficientBlocks(f"source has {len(source)} bits, {n} needed")
        return source[:n]
    return source.prefix(n)


def encode_blocks(source: Union[BitString, BitSource], m: MartingaleModel,
                  sched: BlockSchedule, B: int) -> OracleStream:
    """Encode the first ``B`` blocks of ``source`` into an oracle stream."""
    if B < 1:
        raise ParameterOutOfRange("at least one block is required")
    bits = source_bits(source, sched.n(B))
    order = _resolve_order(m, None)
    writer = BitWriter()
    records = []
    state = m.start()
    for i in range(B):
        k, start = sched.k(i), sched.n(i)
        block = bits[start:start + k]
        end_state = m.extend(state, block)
        before, after = m.capital(state), m.capital(end_state)
        d = approximate_below(after, i)
        index = block_index(m, state, k, d, order)
        p = index.rank(block)
        p_code, d_code = enc_nat(p), encode_threshold(d)
        writer.write(p_code)
        writer.write(d_code)
        records.append(BlockRecord(i, k, start, p, d, index.size(), before, after,
                                   len(p_code), len(d_code)))
        state = end_state
    return OracleStream(MODE_BLOCKS, m.to_bytes(), sched.header_kmax, B,
                        writer.getvalue(), tuple(records))


def decode_blocks(reader: BitReader, n: int, m: MartingaleModel, sched: BlockSchedule,
                  available: Optional[int] = None) -> BitString:
    """Decode ``n`` bits by reading records sequentially from ``reader``.

    Only the records for blocks overlapping ``[0, n)`` are read.
    """
    needed = sched.blocks_for(n)
    if available is not None and needed > available:
        raise InsufficientBlocks(f"{n} bits need {needed} blocks, stream has {available}")
    order = _resolve_order(m, None)
    out = []
    state = m.start()
    for i in range(needed):
        p, _ = dec_nat(reader)
        d, _ = decode_threshold(reader)
        block = block_index(m, state, sched.k(i), d, order).unrank(p)
        out.append(block)
        state = m.extend(state, block)
    return "".join(out)[:n]


def decode_prefix(P: OracleStream, n: int, m: MartingaleModel,
                  sched: BlockSchedule) -> tuple[BitString, int]:
    """Recover the first ``n`` source bits; returns them with the query usage."""
    if P.mode != MODE_BLOCKS:
        raise ModelMismatch("stream is not block-coded")
    if m.to_bytes() != P.model_bytes:
        raise ModelMismatch("model differs from the one recorded in the stream header")
    if sched.header_kmax != P.kmax:
        raise ModelMismatch("block schedule differs from the stream header")
    if n < 0:
        raise ValueError("n must be >= 0")
    reader = BitReader(P.payload)
    bits = decode_blocks(reader, n, m, sched, available=P.blocks)
    return bits, reader.pos


def passthrough_encode(source: Union[BitString, BitSource], n: int) -> OracleStream:
    from .gales import uniform_model

    return OracleStream(MODE_PASSTHROUGH, uniform_model().to_bytes(), 0, 0,
                        source_bits(source, n))


def passthrough_decode(P: OracleStream, n: int) -> tuple[BitString, int]:
    if P.mode != MODE_PASSTHROUGH:
        raise ModelMismatch("stream is not a passthrough copy")
    reader = BitReader(P.payload)
    bits = reader.read(n)
    return bits, reader.pos
