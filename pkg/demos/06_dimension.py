"""Compression ratios against sources of known information density."""

from fractions import Fraction as F

from galecodec.analysis import (
    bernoulli_source,
    capital_curve,
    dimension_report,
    entropy,
    geometric_switches,
    regime_source,
    zeros_source,
)
from galecodec.blockcodec import triangular_schedule
from galecodec.gales import bernoulli_model, kt_model

sched = triangular_schedule()
print("Biased coins, kt model, 40 blocks (820 bits):")
for p in (F(1, 16), F(1, 8), F(1, 4), F(1, 2)):
    final = dimension_report(bernoulli_source(p, 0xDEC0DE), kt_model(), sched, 40).final
    print(f"  p={str(p):<5} H(p)={entropy(p):.4f}  index ratio={final.index_ratio:.4f}"
          f"  with thresholds={float(final.total_ratio):.4f}")
print("The index ratio sits a little below H(p): part of each block's content is")
print("carried by its threshold, which the total ratio pays for.")

report = dimension_report(zeros_source(), bernoulli_model(F(1, 4)), sched, 300)
print("\nAll zeros, bernoulli(1/4) bettor: every admitted set is a single string.")
for i in (10, 50, 100, 200, 299):
    row = report.rows[i]
    print(f"  n={row.n_end:6d} total ratio {float(row.total_ratio):.4f}")

mixed = regime_source([zeros_source(), bernoulli_source(F(1, 2), 1)], geometric_switches(8, 10**6))
rows = dimension_report(mixed, kt_model(), sched, 60).rows
ratios = [float(row.total_ratio) for row in rows[20:]]
print(f"\nAlternating calm and random stretches: total ratio swings between "
      f"{min(ratios):.3f} and {max(ratios):.3f}.")

curve = capital_curve(bernoulli_model(F(1, 4)), zeros_source(), 40, F(1, 2))
print("\nThe bettor as a 1/2-gale on zeros: "
      + ("succeeds" if curve[-1][1] > 0 else "fails") + f" at n={curve[-1][0]}.")
