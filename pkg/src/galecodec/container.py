"""Byte-level container for oracle streams.

Layout (little-endian fixed-width fields)::

    "GALE" | version u8 | mode u8 | model bytes | kmax u16 | blocks u32
    | payload bit length u64 | payload, MSB-first, zero-padded
"""

from __future__ import annotations

import struct

from .bits import pack_bits, unpack_bits
from .blockcodec import MODE_BLOCKS, MODE_PASSTHROUGH, OracleStream
from .errors import MalformedCode
from .gales import model_from_bytes

MAGIC = b"GALE"
VERSION = 0x01

_TAIL = struct.Struct("<HIQ")


def write_container(stream: OracleStream) -> bytes:
    head = MAGIC + bytes([VERSION, stream.mode]) + stream.model_bytes
    return head + _TAIL.pack(stream.kmax, stream.blocks, stream.payload_bits) + pack_bits(stream.payload)


def read_container(data: bytes) -> OracleStream:
    if len(data) < 6 or data[:4] != MAGIC:
        raise MalformedCode("not a GALE container (bad magic)")
    if data[4] != VERSION:
        raise MalformedCode(f"unsupported container version {data[4]}")
    mode = data[5]
    if mode not in (MODE_PASSTHROUGH, MODE_BLOCKS):
        raise MalformedCode(f"unknown mode byte {mode}")
    _, used = model_from_bytes(data, 6)
    model_bytes = data[6:6 + used]
    pos = 6 + used
    if len(data) < pos + _TAIL.size:
        raise MalformedCode("truncated container header")
    kmax, blocks, nbits = _TAIL.unpack_from(data, pos)
    body = data[pos + _TAIL.size:]
    if not nbits <= 8 * len(body) < nbits + 8:
        raise MalformedCode(
            f"declared payload of {nbits} bits does not match {len(body)} payload bytes")
    payload = unpack_bits(body)
    if "1" in payload[nbits:]:
        raise MalformedCode("nonzero padding after the payload")
    return OracleStream(mode, bytes(model_bytes), kmax, blocks, payload[:nbits])
