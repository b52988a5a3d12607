"""Cheap thresholds: a dyadic number just below the capital, with few mantissa bits."""

from fractions import Fraction as F

from galecodec.threshold import approximate_below, encode_threshold, slack

print(f"{'i':>3} {'capital r':>16} {'threshold d':>16} {'d/r':>10} {'1-slack':>10} {'code bits':>9}")
for i, r in [(3, F(100)), (5, F(1000, 7)), (10, F(3) ** 40 / 2**20), (40, F(12345678901, 3))]:
    d = approximate_below(r, i)
    ratio = d.to_fraction() / r
    shown = f"{d.mantissa}*2^{d.exponent}"
    print(f"{i:>3} {float(r):16.4g} {shown:>16} {float(ratio):10.6f} "
          f"{float(1 - slack(i)):10.6f} {len(encode_threshold(d)):9d}")
print("\nThe threshold always sits strictly below r and within the slack, and its")
print("code grows only logarithmically with the block number.")
