from fractions import Fraction as F

import pytest

from galecodec.blockcodec import decode_prefix, encode_blocks, triangular_schedule
from galecodec.errors import OracleExhausted, OutputMismatch
from galecodec.gales import bernoulli_model, kt_model
from galecodec.otm import (
    BlockDecoderMachine,
    Oracle,
    OracleMachine,
    QueryLedger,
    compose,
    copier,
    inflate,
    ratio_profile,
    run,
    spread,
)

SCHED = triangular_schedule()
BETTOR = bernoulli_model(F(1, 4))


@pytest.fixture(scope="module")
def zeros_stream():
    bits = "0" * SCHED.n(40)
    return bits, encode_blocks(bits, BETTOR, SCHED, 40)


class Probe(OracleMachine):
    name = "probe"

    def compute(self, n, oracle):
        oracle.query(10**6)
        return "0" * n


def test_copier_example():
    out, ledger = run(copier(), "110", 2)
    assert out == "11"
    assert ledger.indices == {0, 1} and ledger.count == 2


def test_oracle_exhausted():
    with pytest.raises(OracleExhausted):
        run(Probe(), "0" * 10, 1)
    with pytest.raises(OracleExhausted):
        run(copier(), "01", 3)


def test_inflate_examples():
    assert run(inflate(1), "0110", 4)[0] == "0110"
    out, ledger = run(inflate(2), "101010", 3)
    assert out == "111" and ledger.count == 6
    out, ledger = run(inflate(3), "", 0)
    assert out == "" and ledger.count == 0


def test_query_idempotence():
    oracle = Oracle("1011")
    for _ in range(3):
        oracle.query(2)
    assert oracle.ledger.count == 1
    oracle.query(0)
    assert oracle.ledger.count == 2


def test_rightmost_mode():
    ledger = QueryLedger("rightmost")
    oracle = Oracle("10110", ledger)
    oracle.query(3)
    assert ledger.count == 4
    for m in (1, 2, 3):
        out, led = run(inflate(m), "1" * 30, 7, mode="rightmost")
        assert led.count == 7 * m


def test_decoder_machine_matches_decode_prefix(zeros_stream):
    bits, P = zeros_stream
    machine = BlockDecoderMachine(BETTOR, SCHED)
    for n in (0, 1, 2, 17, 300, len(bits)):
        out, ledger = run(machine, P.payload, n)
        assert (out, ledger.count) == decode_prefix(P, n, BETTOR, SCHED)
        # sequential reader: distinct and rightmost accounting coincide
        assert run(machine, P.payload, n, mode="rightmost")[1].count == ledger.count


def test_copier_composition_is_copier():
    data = "0110100111"
    for n in range(len(data) + 1):
        out, ledger = run(compose(copier(), copier()), data, n)
        assert out == data[:n] and ledger.count == n


def test_usage_composition_identity(zeros_stream):
    bits, P = zeros_stream
    dec = BlockDecoderMachine(BETTOR, SCHED)
    for m in (1, 2, 3, 4):
        R = spread(P.payload, m, filler="1")
        machine = compose(dec, inflate(m))
        for n in list(range(0, 60)) + list(range(60, 821, 37)):
            out, ledger = run(machine, R, n)
            usage = decode_prefix(P, n, BETTOR, SCHED)[1]
            assert out == bits[:n]
            assert ledger.count == run(inflate(m), R, usage)[1].count == m * usage


def test_usage_identity_to_two_thousand():
    sched = triangular_schedule()
    rng_bits = "".join("1" if (i * 7919) % 13 == 0 else "0" for i in range(sched.n(63)))
    P = encode_blocks(rng_bits, kt_model(), sched, 63)
    dec = BlockDecoderMachine(kt_model(), sched)
    for m in (2, 4):
        R = spread(P.payload, m)
        for n in (1, 250, 999, 1500, 2000):
            out, ledger = run(compose(dec, inflate(m)), R, n)
            assert out == rng_bits[:n]
            assert ledger.count == m * decode_prefix(P, n, kt_model(), sched)[1]


def test_associativity():
    data = "".join("1" if i % 3 else "0" for i in range(400))
    a = compose(compose(copier(), inflate(2)), inflate(3))
    b = compose(copier(), compose(inflate(2), inflate(3)))
    for n in (0, 1, 5, 20, 66):
        ra, rb = run(a, data, n), run(b, data, n)
        assert ra[0] == rb[0]
        assert ra[1].indices == rb[1].indices


def test_profiles_of_exact_machines():
    data = "1" * 400
    prof = ratio_profile(copier(), data, data, 100, window=20)
    assert set(prof.ratios()) == {1}
    prof2 = ratio_profile(inflate(2), data, data[:200], 100, window=20)
    assert set(prof2.ratios()) == {2}
    with pytest.raises(OutputMismatch):
        ratio_profile(copier(), data, "0" * 10, 5, window=2)


def test_decoder_ratio_decreases_across_blocks(zeros_stream):
    bits, P = zeros_stream
    prof = ratio_profile(BlockDecoderMachine(BETTOR, SCHED), P.payload, bits, 500, window=50, n_min=100)
    ratio = dict((n, r) for n, _, r in prof.entries)
    ends = [SCHED.n(i) for i in range(60) if 100 <= SCHED.n(i) <= 500]
    at_ends = [ratio[n] for n in ends]
    assert all(a > b for a, b in zip(at_ends, at_ends[1:]))
    # within a block usage is flat, so the ratio falls with every extra bit
    for a, b in zip(prof.entries, prof.entries[1:]):
        if SCHED.blocks_for(a[0]) == SCHED.blocks_for(b[0]):
            assert b[2] < a[2]


def test_product_bounds_exact_machines():
    data = "".join("1" if (i * i) % 5 == 1 else "0" for i in range(2000))
    for m1, m2 in [(1, 1), (1, 2), (2, 3), (3, 2)]:
        first, second = inflate(m1), inflate(m2)
        mid = run(second, data, 400)[0]
        out = run(first, mid, 100)[0]
        composed = ratio_profile(compose(first, second), data, out, 100, window=30)
        p1 = ratio_profile(first, mid, out, 100, window=30)
        p2 = ratio_profile(second, data, mid, 300, window=30)
        assert composed.tail_max <= p1.tail_max * p2.tail_max
        assert composed.tail_min <= p1.tail_min * p2.tail_max


def test_product_bounds_decoder(zeros_stream):
    bits, P = zeros_stream
    dec = BlockDecoderMachine(BETTOR, SCHED)
    for m in (1, 2, 3):
        R = spread(P.payload, m)
        composed = ratio_profile(compose(dec, inflate(m)), R, bits, 210, window=40)
        p1 = ratio_profile(dec, P.payload, bits, 210, window=40)
        p2 = ratio_profile(inflate(m), R, P.payload, 200, window=40)
        assert p2.tail_max == m
        assert composed.tail_max <= p1.tail_max * p2.tail_max
        assert composed.tail_min <= p1.tail_min * p2.tail_max


@pytest.mark.parametrize("machine", [copier(), inflate(1), inflate(3)], ids=repr)
def test_extend_matches_compute(machine):
    data = "".join("1" if (i * 5) % 7 < 3 else "0" for i in range(300))
    for start, n in [(0, 0), (0, 9), (4, 9), (9, 9), (20, 60)]:
        whole, ledger = run(machine, data, n)
        oracle = Oracle(data)
        done = machine.compute(start, oracle)
        assert machine.extend(done, n, oracle) == whole
        assert oracle.ledger.indices == ledger.indices
