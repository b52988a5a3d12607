"""Quick exhaustive invariant sweep used by ``galecodec selftest``."""

from __future__ import annotations

import contextlib
import itertools
import time
from fractions import Fraction
from typing import Callable, Iterator
from unittest import mock

from . import bits
from .blockcodec import capped_schedule, decode_prefix, encode_blocks, triangular_schedule
from .gales import (
    all_strings,
    builtin_models,
    capital_sum,
    count_exceeding,
    is_fair_at,
    slow_staged_wrapper,
    kt_model,
)
from .threshold import Dyadic, approximate_below, decode_threshold, encode_threshold, slack


def check_codes() -> None:
    for n in range(1 << 12):
        assert bits.sigma_inverse(bits.sigma(n)) == n
    codes = {}
    for k in range(9):
        for w in all_strings(k):
            code = bits.enc_string(w)
            assert bits.dec(bits.BitReader(code + "01")) == (w, len(code)), w
            codes[w] = code
    words = sorted(codes.values())
    for a, b in zip(words, words[1:]):
        assert not b.startswith(a), (a, b)


def check_gales() -> None:
    for m in builtin_models():
        for k in range(9):
            assert capital_sum(m, k) == (1 << k) * m.initial
            for w in all_strings(min(k, 6)):
                assert is_fair_at(m, w)
        assert count_exceeding(m, "", 6, Fraction(1, 2), 3) < 16


def check_thresholds() -> None:
    for i in range(2, 40):
        for num in range(1, 60, 7):
            r = Fraction(num * 37 + i, 11)
            d = approximate_below(r, i)
            assert r > d.to_fraction() >= r * (1 - slack(i))
            code = encode_threshold(d)
            assert decode_threshold(bits.BitReader(code)) == (d, len(code))
    assert approximate_below(Fraction(100), 3) == Dyadic.from_fraction(Fraction(96))


def check_codec() -> None:
    models = builtin_models() + [slow_staged_wrapper(kt_model())]
    for m in models:
        for sched, blocks in ((triangular_schedule(), 4), (capped_schedule(2), 5)):
            for s in itertools.islice(all_strings(sched.n(blocks)), 0, None, 7):
                stream = encode_blocks(s, m, sched, blocks)
                for n in range(len(s) + 1):
                    assert decode_prefix(stream, n, m, sched)[0] == s[:n]


CHECKS: list[tuple[str, Callable[[], None]]] = [
    ("codes", check_codes),
    ("gales", check_gales),
    ("thresholds", check_thresholds),
    ("codec", check_codec),
]


def _broken_enc(w: str) -> str:
    code = bits.e0(bits.sigma(len(w))) + w
    return code[:-1] + ("1" if code[-1] == "0" else "0")


@contextlib.contextmanager
def fault(name: str | None) -> Iterator[None]:
    if name is None:
        yield
    elif name == "enc":
        with mock.patch.object(bits, "enc_string", _broken_enc):
            yield
    else:
        raise ValueError(f"unknown fault {name!r}")


def run_selftest(inject: str | None = None, echo: Callable[[str], None] = print) -> bool:
    ok = True
    with fault(inject):
        for name, check in CHECKS:
            t0 = time.perf_counter()
            try:
                check()
            except Exception as exc:  # any escape is a failed check
                ok = False
                echo(f"FAIL {name}: {type(exc).__name__}: {exc}")
            else:
                echo(f"ok   {name} ({time.perf_counter() - t0:.2f}s)")
    return ok
