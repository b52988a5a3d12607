"""Block coding: each block is stored as its rank among the strings the bettor admits."""

from fractions import Fraction as F

from galecodec.analysis import bernoulli_source
from galecodec.blockcodec import capped_schedule, decode_prefix, encode_blocks, triangular_schedule
from galecodec.gales import kt_model

sched = triangular_schedule()
model = kt_model()
source = bernoulli_source(F(1, 8), 2024)
stream = encode_blocks(source, model, sched, 12)

print("block  k  |A_i|  rank  index bits  threshold bits")
for rec in stream.records:
    print(f"{rec.block:5d} {rec.k:2d} {rec.admitted_size:6d} {rec.index:5d} {rec.index_bits:11d} {rec.threshold_bits:15d}")

n = sched.n(12)
bits, usage = decode_prefix(stream, n, model, sched)
assert bits == source.prefix(n)
print(f"\nDecoded {n} bits exactly, reading {usage} payload bits.")

for prefix_len in (1, 10, 40):
    _, used = decode_prefix(stream, prefix_len, model, sched)
    print(f"  a prefix of {prefix_len:2d} bits needs only {used} payload bits")

capped = capped_schedule(8)
long_stream = encode_blocks(source, model, capped, 200)
total = capped.n(200)
print(f"\nWith block lengths capped at 8, {total} source bits take {long_stream.payload_bits} payload bits.")
