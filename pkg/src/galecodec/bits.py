"""Bit strings, the standard string enumeration and self-delimiting codes.

Bit strings are plain ``str`` objects over the alphabet ``{"0", "1"}``.  They
are immutable, hashable, compare lexicographically within a length, and the
prefix relation is ``str.startswith``.  The empty string plays the role of
lambda.
"""

from __future__ import annotations

from typing import Protocol, Union

from .errors import MalformedCode

BitString = str

EMPTY: BitString = ""


def is_bitstring(w: object) -> bool:
    return isinstance(w, str) and not w.strip("01")


def shortlex_key(w: BitString) -> tuple[int, str]:
    """Sort key for the standard (length, then lexicographic) order."""
    return (len(w), w)


def is_prefix(x: BitString, y: BitString) -> bool:
    return y.startswith(x)


def sigma(n: int) -> BitString:
    """Return the n-th string of the standard enumeration.

    ``sigma(0) == ""``, ``sigma(1) == "0"``, ``sigma(2) == "1"``,
    ``sigma(3) == "00"``; equivalently the binary form of ``n + 1`` with its
    leading 1 removed.
    """
    if n < 0:
        raise ValueError("sigma is defined on naturals only")
    return bin(n + 1)[3:]


def sigma_inverse(w: BitString) -> int:
    return int("1" + w, 2) - 1


def e0(w: BitString) -> BitString:
    """Unary length prefix: ``0^|w| 1 w``."""
    return "0" * len(w) + "1" + w


def enc_string(w: BitString) -> BitString:
    """Self-delimiting encoding ``e0(sigma_|w|) w``."""
    return e0(sigma(len(w))) + w


def enc_nat(n: int) -> BitString:
    if n < 0:
        raise ValueError("enc_nat is defined on naturals only")
    return enc_string(sigma(n))


def enc_nat_length(n: int) -> int:
    """Length of ``enc_nat(n)`` without building it."""
    payload = (n + 1).bit_length() - 1
    return 2 * ((payload + 1).bit_length() - 1) + 1 + payload


class _Queryable(Protocol):
    def query(self, index: int) -> int: ...


class BitReader:
    """Sequential cursor over a bit string or a queryable oracle.

    Running off the end of a string source raises :class:`MalformedCode`.
    Oracle sources report exhaustion themselves.
    """

    def __init__(self, source: Union[BitString, _Queryable], pos: int = 0):
        self._source = source
        self._is_str = isinstance(source, str)
        self.pos = pos

    @property
    def remaining(self) -> int | None:
        """Bits left for string sources; ``None`` for oracles."""
        if self._is_str:
            return len(self._source) - self.pos
        return None

    def read_bit(self) -> str:
        if self._is_str:
            if self.pos >= len(self._source):
                raise MalformedCode(f"bit stream exhausted at position {self.pos}")
            bit = self._source[self.pos]
        else:
            bit = "1" if self._source.query(self.pos) else "0"
        self.pos += 1
        return bit

    def read(self, count: int) -> BitString:
        if count < 0:
            raise ValueError("count must be >= 0")
        if self._is_str:
            end = self.pos + count
            if end > len(self._source):
                raise MalformedCode(
                    f"need {count} bits at position {self.pos}, "
                    f"only {len(self._source) - self.pos} left"
                )
            out = self._source[self.pos:end]
            self.pos = end
            return out
        return "".join(self.read_bit() for _ in range(count))


class BitWriter:
    def __init__(self) -> None:
        self._parts: list[str] = []
        self._length = 0

    def write(self, bits: BitString) -> None:
        self._parts.append(bits)
        self._length += len(bits)

    def __len__(self) -> int:
        return self._length

    def getvalue(self) -> BitString:
        return "".join(self._parts)


def _read_e0(reader: BitReader) -> BitString:
    zeros = 0
    while reader.read_bit() == "0":
        zeros += 1
        remaining = reader.remaining
        if remaining is not None and zeros > remaining:
            raise MalformedCode("unary length prefix is never terminated")
    return reader.read(zeros)


def dec(reader: BitReader) -> tuple[BitString, int]:
    """Decode one ``enc`` codeword; returns the string and bits consumed."""
    start = reader.pos
    length = sigma_inverse(_read_e0(reader))
    remaining = reader.remaining
    if remaining is not None and length > remaining:
        raise MalformedCode(
            f"codeword payload of {length} bits exceeds the {remaining} bits left"
        )
    w = reader.read(length)
    return w, reader.pos - start


def dec_nat(reader: BitReader) -> tuple[int, int]:
    w, used = dec(reader)
    return sigma_inverse(w), used


def pack_bits(bits: BitString) -> bytes:
    """Pack most-significant-bit first, zero-padding the final byte."""
    if not bits:
        return b""
    pad = -len(bits) % 8
    return int(bits + "0" * pad, 2).to_bytes((len(bits) + pad) // 8, "big")


def unpack_bits(data: bytes, nbits: int | None = None) -> BitString:
    if not data:
        out = ""
    else:
        out = bin(int.from_bytes(data, "big"))[2:].zfill(8 * len(data))
    return out if nbits is None else out[:nbits]
