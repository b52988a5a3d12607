"""Command-line front end: ``galecodec {encode,decode,analyze,selftest}``.

Exit codes: 0 success, 2 bad source/model/schedule spec, 3 I/O failure,
4 malformed container or model mismatch, 5 requested length out of range.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import analysis
from .bits import pack_bits, unpack_bits
from .blockcodec import (
    MODE_BLOCKS,
    BlockSchedule,
    BitSource,
    decode_prefix,
    encode_blocks,
    passthrough_decode,
    passthrough_encode,
)
from .container import read_container, write_container
from .errors import GaleError, InsufficientBlocks
from .gales import (
    MartingaleModel,
    bernoulli_model,
    kt_model,
    mixture_model,
    model_from_bytes,
    slow_staged_wrapper,
    uniform_model,
)
from .selftest import run_selftest

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_IO = 3
EXIT_CORRUPT = 4
EXIT_RANGE = 5


class SpecError(ValueError):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"bad rational {text!r}") from exc


def parse_model(spec: str) -> MartingaleModel:
    """``uniform | kt | bernoulli:<q> | mix:<w>*<model>+... | slow:<model>``."""
    try:
        if spec == "uniform":
            return uniform_model()
        if spec == "kt":
            return kt_model()
        if spec.startswith("bernoulli:"):
            return bernoulli_model(_fraction(spec.split(":", 1)[1]))
        if spec.startswith("slow:"):
            return slow_staged_wrapper(parse_model(spec[5:]))
        if spec.startswith("mix:"):
            models, weights = [], []
            for term in spec[4:].split("+"):
                weight, _, sub = term.partition("*")
                if not sub:
                    raise SpecError(f"mixture term {term!r} needs <weight>*<model>")
                weights.append(_fraction(weight))
                models.append(parse_model(sub))
            return mixture_model(models, weights)
    except GaleError as exc:
        raise SpecError(str(exc)) from exc
    raise SpecError(f"unknown model spec {spec!r}")


def parse_source(spec: str) -> BitSource:
    """``zeros | periodic:<bits> | bernoulli:<p>:<seed> | regime:<a>|<b>@<offsets> | file:<path>``.

    Regime offsets are a comma list or ``pow:<base>`` for base, base**2, ...
    A file source supplies its raw bytes, most significant bit first.
    """
    try:
        if spec == "zeros":
            return analysis.zeros_source()
        if spec.startswith("periodic:"):
            return analysis.periodic_source(spec[9:])
        if spec.startswith("bernoulli:"):
            parts = spec.split(":")
            if len(parts) != 3:
                raise SpecError("bernoulli source needs bernoulli:<p>:<seed>")
            return analysis.bernoulli_source(_fraction(parts[1]), int(parts[2], 0))
        if spec.startswith("regime:"):
            subs, _, offsets = spec[7:].rpartition("@")
            if not subs:
                raise SpecError("regime source needs regime:<src>|<src>...@<offsets>")
            if offsets.startswith("pow:"):
                switches = analysis.geometric_switches(int(offsets[4:], 0), 1 << 62)
            else:
                switches = [int(x, 0) for x in offsets.split(",")]
            return analysis.regime_source([parse_source(s) for s in subs.split("|")], switches)
        if spec.startswith("file:"):
            return analysis.LiteralSource(unpack_bits(Path(spec[5:]).read_bytes()))
    except GaleError as exc:
        raise SpecError(str(exc)) from exc
    except ValueError as exc:
        raise SpecError(f"bad source spec {spec!r}: {exc}") from exc
    raise SpecError(f"unknown source spec {spec!r}")


def _schedule(args: argparse.Namespace) -> BlockSchedule:
    if args.kmax is not None:
        if not 1 <= args.kmax <= 0xFFFF:
            raise SpecError("--kmax must lie in [1, 65535]")
        return BlockSchedule(args.kmax)
    return BlockSchedule(None)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--source", required=True)
    p.add_argument("--model", default="kt")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--paper-schedule", "--triangular", dest="triangular", action="store_true",
                       help="block lengths 1, 2, 3, ... (default)")
    group.add_argument("--kmax", type=int, help="cap block lengths at KMAX")
    p.add_argument("-B", "--blocks", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="galecodec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="encode a source into a container")
    _add_common(enc)
    enc.add_argument("--passthrough", action="store_true",
                     help="copy n(B) source bits verbatim instead of block coding")
    enc.add_argument("-o", "--output", required=True)

    dec = sub.add_parser("decode", help="decode a prefix from a container")
    dec.add_argument("container")
    dec.add_argument("-n", type=int, help="bits to decode (default: everything)")
    dec.add_argument("--raw", action="store_true", help="write packed bytes instead of ASCII")
    dec.add_argument("-o", "--output", help="write bits here instead of stdout")

    ana = sub.add_parser("analyze", help="per-block dimension report as CSV")
    _add_common(ana)
    ana.add_argument("--csv", help="output path (default: stdout)")

    st = sub.add_parser("selftest", help="run the exhaustive invariant sweep")
    st.add_argument("--inject-fault", choices=["enc"], help=argparse.SUPPRESS)
    return parser


def _err(msg: str) -> None:
    print(f"galecodec: {msg}", file=sys.stderr)


def cmd_encode(args: argparse.Namespace) -> int:
    if args.blocks < 1:
        raise SpecError("-B must be at least 1")
    sched = _schedule(args)
    source = parse_source(args.source)
    model = parse_model(args.model)
    try:
        if args.passthrough:
            stream = passthrough_encode(source, sched.n(args.blocks))
        else:
            stream = encode_blocks(source, model, sched, args.blocks)
    except GaleError as exc:
        raise SpecError(str(exc)) from exc
    try:
        Path(args.output).write_bytes(write_container(stream))
    except OSError as exc:
        _err(f"cannot write {args.output}: {exc}")
        return EXIT_IO
    return EXIT_OK


def decode_bytes(data: bytes, n: Optional[int]) -> tuple[str, int]:
    """Decode a container image; returns the bits and the query usage."""
    stream = read_container(data)
    if stream.mode == MODE_BLOCKS:
        model, _ = model_from_bytes(stream.model_bytes)
        sched = BlockSchedule.from_header(stream.kmax)
        total = sched.n(stream.blocks)
        n = total if n is None else n
        if not 0 <= n <= total:
            raise InsufficientBlocks(f"n={n} outside [0, {total}]")
        return decode_prefix(stream, n, model, sched)
    n = stream.payload_bits if n is None else n
    if not 0 <= n <= stream.payload_bits:
        raise InsufficientBlocks(f"n={n} outside [0, {stream.payload_bits}]")
    return passthrough_decode(stream, n)


def decode_outcome(data: bytes, n: Optional[int]) -> tuple[int, str, int, str]:
    """Classify a decode request: (exit code, bits, usage, diagnostic)."""
    try:
        out, usage = decode_bytes(data, n)
    except InsufficientBlocks as exc:
        return EXIT_RANGE, "", 0, str(exc)
    except GaleError as exc:
        return EXIT_CORRUPT, "", 0, f"{type(exc).__name__}: {exc}"
    return EXIT_OK, out, usage, ""


def cmd_decode(args: argparse.Namespace) -> int:
    try:
        data = Path(args.container).read_bytes()
    except OSError as exc:
        _err(f"cannot read {args.container}: {exc}")
        return EXIT_IO
    code, out, usage, msg = decode_outcome(data, args.n)
    if code != EXIT_OK:
        _err(msg)
        return code
    blob = pack_bits(out) if args.raw else (out + "\n").encode()
    try:
        if args.output:
            Path(args.output).write_bytes(blob)
        else:
            sys.stdout.buffer.write(blob)
            sys.stdout.flush()
    except OSError as exc:
        _err(f"cannot write output: {exc}")
        return EXIT_IO
    ratio = usage / len(out) if out else 0.0
    print(f"bits={len(out)} usage={usage} ratio={ratio:.6f}", file=sys.stderr)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    if args.blocks < 1:
        raise SpecError("-B must be at least 1")
    sched = _schedule(args)
    source = parse_source(args.source)
    model = parse_model(args.model)
    try:
        report = analysis.dimension_report(source, model, sched, args.blocks)
    except GaleError as exc:
        raise SpecError(str(exc)) from exc
    text = analysis.export_csv(report)
    if args.csv is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        Path(args.csv).write_text(text, newline="")
    except OSError as exc:
        _err(f"cannot write {args.csv}: {exc}")
        return EXIT_IO
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    return EXIT_OK if run_selftest(args.inject_fault) else 1


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "analyze": cmd_analyze,
    "selftest": cmd_selftest,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except SpecError as exc:
        _err(str(exc))
        return EXIT_SPEC
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
