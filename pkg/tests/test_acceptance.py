"""Exit criteria of the build, each with its runtime budget."""

import itertools
import math
import random
import time
from fractions import Fraction as F

import pytest

from fuzzing import fuzz_cli, fuzz_images
from galecodec.analysis import bernoulli_source, dimension_report, entropy, zeros_source
from galecodec.bits import BitReader, dec, e0, enc_string, sigma, sigma_inverse
from galecodec.blockcodec import (
    capped_schedule,
    decode_prefix,
    encode_blocks,
    enumerate_admitted,
    triangular_schedule,
)
from galecodec.cli import EXIT_CORRUPT, main
from galecodec.gales import (
    all_strings,
    bernoulli_model,
    builtin_models,
    count_exceeding,
    count_exceeding_prefix_max,
    extension_values,
    kt_model,
    slow_staged_wrapper,
)
from galecodec.otm import BlockDecoderMachine, compose, copier, inflate, ratio_profile, run, spread
from galecodec.threshold import Dyadic, approximate_below, encode_threshold, mantissa_budget, slack

acceptance = pytest.mark.acceptance
MODELS = builtin_models()
MODEL_IDS = ["uniform", "bernoulli", "kt", "mixture"]


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f}s, budget {self.seconds}s"


def strings_up_to(n):
    for k in range(n + 1):
        yield from all_strings(k)


@acceptance(1, "exhaustive codec round trip, B=4, four models")
def test_exhaustive_round_trip():
    sched = triangular_schedule()
    assert sched.n(4) == 10
    with Budget(60):
        for m in MODELS:
            for x in all_strings(10):
                P = encode_blocks(x, m, sched, 4)
                assert decode_prefix(P, 10, m, sched)[0] == x


@acceptance(2, "enc/e0/sigma codes")
def test_code_suite():
    with Budget(10):
        for w in strings_up_to(12):
            code = enc_string(w)
            assert dec(BitReader(code + "01")) == (w, len(code))
            assert e0(w) == "0" * len(w) + "1" + w
            n = len(w)
            if n >= 2:
                assert len(code) <= n + 2 * math.log2(n) + 3
            else:
                assert len(code) <= 4
        codes = [enc_string(w) for w in strings_up_to(8)]
        # a prefix of another code sorts immediately before its extensions
        codes.sort()
        for a, b in zip(codes, codes[1:]):
            assert not b.startswith(a), (a, b)
        for n in range((1 << 16) + 1):
            assert sigma_inverse(sigma(n)) == n


@acceptance(3, "fairness and capital-sum law, k <= 12")
@pytest.mark.parametrize("m", MODELS, ids=MODEL_IDS)
def test_gale_laws(m):
    with Budget(30 / len(MODELS)):
        level = [("", m.start())]
        root = m.capital(level[0][1])
        for k in range(1, 13):
            nxt = []
            for w, state in level:
                s0, s1 = m.step(state, "0"), m.step(state, "1")
                assert 2 * m.capital(state) == m.capital(s0) + m.capital(s1), w
                nxt += [(w + "0", s0), (w + "1", s1)]
            level = nxt
            assert sum(m.capital(s) for _, s in level) == 2**k * root


def saturated(m, w, k, alpha, l):
    threshold = alpha * F(2) ** (k - l) * m.value(w)
    return all(v == threshold for _, v in extension_values(m, w, k))


@acceptance(4, "counting bounds by brute force")
@pytest.mark.parametrize("m", MODELS, ids=MODEL_IDS)
def test_counting_bounds(m):
    with Budget(60 / len(MODELS)):
        for w in ["", "1", "0100"]:
            for k in range(11):
                for alpha in (F(1, 4), F(1, 2), F(1), F(2)):
                    for l in range(k + 1):
                        count = count_exceeding(m, w, k, alpha, l)
                        bound = F(2) ** l / alpha
                        if saturated(m, w, k, alpha, l):
                            assert count == bound
                        else:
                            assert count < bound, (w, k, alpha, l)
        for w in ["", "0110"]:
            for k in range(9):
                for s in (F(1, 2), F(1)):
                    for alpha in (F(1, 2), F(2)):
                        assert count_exceeding_prefix_max(m, w, k, s, alpha) < F(2) ** k / alpha


@acceptance(5, "threshold sandwich and budgets")
def test_threshold_sandwich():
    with Budget(30):
        assert approximate_below(F(100), 3) == Dyadic(3, 5)
        rng = random.Random(0x5A4D)
        for _ in range(10_000):
            i = rng.randint(0, 50)
            top = max(i, 1) ** 2
            r = F(rng.randrange(1, 1 << (top + 8)), rng.randrange(1, 1 << 24))
            r = min(r, F(2) ** top)
            d = approximate_below(r, i)
            assert r > d.to_fraction() >= r * (1 - slack(i))
            assert d.mantissa.bit_length() <= mantissa_budget(i)
            if i >= 2:
                assert d.mantissa.bit_length() <= 1 + math.ceil(2 * math.log2(i))
                assert len(encode_threshold(d)) <= 12 * math.log2(i + 2) + 24


def _tracking(p, blocks):
    with Budget(120):
        report = dimension_report(bernoulli_source(p, 0xDEC0DE), kt_model(), triangular_schedule(), blocks)
    ratio = report.final.index_ratio
    print(f"p={p} n={report.final.n_end} index ratio {ratio:.4f} vs H(p) {entropy(p):.4f}")
    return ratio


@acceptance(6, "entropy tracking of the index ratio")
def test_entropy_tracking_sixteenth():
    assert triangular_schedule().n(40) == 820
    assert abs(_tracking(F(1, 16), 40) - 0.3373) <= 0.10


@acceptance(6, "entropy tracking of the index ratio")
def test_entropy_tracking_eighth():
    assert abs(_tracking(F(1, 8), 34) - 0.5436) <= 0.10


@acceptance(7, "dimension-zero source")
def test_zeros_source():
    assert triangular_schedule().n(300) == 45_150
    with Budget(120):
        report = dimension_report(zeros_source(), bernoulli_model(F(1, 4)), triangular_schedule(), 300)
    rows = report.rows
    assert all(row.admitted_size == 1 and row.log2_admitted == 0 for row in rows[2:])
    totals = [row.total_ratio for row in rows[8:301]]
    assert all(a > b for a, b in zip(totals, totals[1:]))
    assert report.final.total_ratio <= F(1, 2)


@acceptance(8, "reduction composition harness")
def test_composition_harness():
    sched = triangular_schedule()
    n_max = sched.n(20)
    with Budget(30):
        for source, model in ((zeros_source(), bernoulli_model(F(1, 4))),
                              (bernoulli_source(F(1, 8), 11), kt_model())):
            bits = source.prefix(n_max)
            P = encode_blocks(bits, model, sched, 20)
            dec = BlockDecoderMachine(model, sched)
            for m in (1, 2, 3):
                R = spread(P.payload, m, filler="1")
                machine = compose(dec, inflate(m))
                for n in range(n_max + 1):
                    out, ledger = run(machine, R, n)
                    assert out == bits[:n]
                    assert ledger.count == m * decode_prefix(P, n, model, sched)[1]
        data = "".join(random.Random(8).choice("01") for _ in range(3000))
        machines = [copier(), inflate(2), inflate(3)]
        for first, second in itertools.product(machines, repeat=2):
            mid = run(second, data, 900)[0]
            out = run(first, mid, 300)[0]
            composed = ratio_profile(compose(first, second), data, out, 300, window=50)
            p1 = ratio_profile(first, mid, out, 300, window=50)
            p2 = ratio_profile(second, data, mid, 900, window=50)
            assert composed.tail_max <= p1.tail_max * p2.tail_max
            assert composed.tail_min <= p1.tail_min * p2.tail_max


@acceptance(9, "staged admission order")
def test_staged_order():
    plain = kt_model()
    slow = slow_staged_wrapper(plain)
    sched = triangular_schedule()
    rng = random.Random(9)
    with Budget(60):
        for k in range(1, 9):
            for prefix in strings_up_to(3):
                caps = sorted({v for _, v in extension_values(plain, prefix, k)})
                thresholds = {approximate_below(v, k) for v in caps}
                thresholds.add(approximate_below(caps[0] / 2, k))
                for d in thresholds:
                    staged = [u for u, _ in enumerate_admitted(slow, prefix, k, d)]
                    exact = [u for u, _ in enumerate_admitted(plain, prefix, k, d)]
                    assert set(staged) == set(exact)
                    assert len(staged) == len(set(staged))
            # round trip with the final block of length k running over all values
            head = sched.n(k - 1)
            for _ in range(3):
                prefix = "".join(rng.choice("01") for _ in range(head))
                for u in all_strings(k):
                    P = encode_blocks(prefix + u, slow, sched, k)
                    assert decode_prefix(P, head + k, slow, sched)[0] == prefix + u
        for kmax in range(1, 9):
            capped = capped_schedule(kmax)
            x = "".join(rng.choice("01") for _ in range(capped.n(12)))
            P = encode_blocks(x, slow, capped, 12)
            assert decode_prefix(P, len(x), slow, capped)[0] == x


@acceptance(10, "container fuzz and determinism")
def test_container_robustness(tmp_path):
    with Budget(60):
        images = []
        specs = ["kt", "uniform", "bernoulli:1/4", "mix:1/2*kt+1/2*bernoulli:1/4", "slow:kt"]
        for i, model in enumerate(specs):
            for extra in ([], ["--passthrough"]):
                args = ["encode", "--source", f"bernoulli:1/6:{i}", "--model", model,
                        "--kmax", "6", "-B", "14", *extra]
                assert main([*args, "-o", str(tmp_path / "a")]) == 0
                assert main([*args, "-o", str(tmp_path / "b")]) == 0
                a = (tmp_path / "a").read_bytes()
                assert a == (tmp_path / "b").read_bytes()
                images.append(a)
        codes = fuzz_images(images, 10_000, seed=10)
        codes_cli = fuzz_cli(images, 200, tmp_path, seed=11)
    print("exit codes in memory", codes, "through files", codes_cli)
    assert codes[EXIT_CORRUPT] > 5000
