"""Betting strategies: fair capital processes and what they say about counting."""

from fractions import Fraction as F

from galecodec.gales import (
    bernoulli_model,
    builtin_models,
    capital_sum,
    count_exceeding,
    kt_model,
)

sequences = ["0000000000", "0101010101", "1101001000"]
print("Capital after betting on each sequence (start capital 1):")
for m in builtin_models():
    row = "  ".join(f"{float(m.value(w)):9.3f}" for w in sequences)
    print(f"  {m!r:<40} {row}")

m = kt_model()
print("\nFairness means the average over all continuations equals the start:")
for k in (4, 8, 12):
    print(f"  k={k:<2} sum of capital over 2^k strings / 2^k = {capital_sum(m, k) / 2**k}")

print("\nSo few strings can make a lot of money. Strings of length 10 where the")
print("bernoulli(1/4) bettor reaches capital alpha * 2^(10-l), against the bound 2^l/alpha:")
bettor = bernoulli_model(F(1, 4))
for l in (2, 4, 6, 8):
    count = count_exceeding(bettor, "", 10, F(1), l)
    print(f"  l={l}: {count:4d} strings, bound {2**l}")
