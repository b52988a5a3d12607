"""Oracle machines: counting how many oracle bits a computation reads."""

from fractions import Fraction as F

from galecodec.analysis import zeros_source
from galecodec.blockcodec import encode_blocks, triangular_schedule
from galecodec.gales import bernoulli_model
from galecodec.otm import BlockDecoderMachine, compose, inflate, ratio_profile, run, spread

sched = triangular_schedule()
bettor = bernoulli_model(F(1, 4))
bits = zeros_source().prefix(sched.n(30))
stream = encode_blocks(bits, bettor, sched, 30)
decoder = BlockDecoderMachine(bettor, sched)

print("Reading the all-zeros sequence back from its compressed oracle:")
for n in (10, 100, 300, 465):
    out, ledger = run(decoder, stream.payload, n)
    print(f"  n={n:3d}: {ledger.count:4d} oracle bits, ratio {ledger.count / n:.3f}")

print("\nPadding the oracle with inflate(m) multiplies usage by exactly m:")
for m in (1, 2, 3):
    machine = compose(decoder, inflate(m))
    out, ledger = run(machine, spread(stream.payload, m), 300)
    print(f"  m={m}: {ledger.count} oracle bits for 300 output bits")

profile = ratio_profile(decoder, stream.payload, bits, 465, window=100, n_min=200)
print(f"\nOver the last 100 positions the ratio lies in "
      f"[{float(profile.tail_min):.3f}, {float(profile.tail_max):.3f}].")
