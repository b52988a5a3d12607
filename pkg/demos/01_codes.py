"""Self-delimiting codes: how strings and naturals are framed in a bit stream."""

from galecodec.bits import BitReader, dec, e0, enc_nat, enc_string, sigma

print("Standard enumeration of binary strings:")
for n in range(8):
    print(f"  sigma({n}) = {sigma(n) or '(empty)'}")

print("\nTwo codes for the same string. e0 doubles the length; enc encodes the length first.")
for w in ["", "1", "0110", "1011001110"]:
    print(f"  w={w or '(empty)':<12} |e0|={len(e0(w)):<3} |enc|={len(enc_string(w)):<3} enc={enc_string(w)}")

print("\nConcatenated codes parse back without separators:")
stream = enc_nat(5) + enc_nat(0) + enc_string("111000")
reader = BitReader(stream)
parts = [dec(reader)[0] for _ in range(3)]
print(f"  stream {stream}")
print(f"  parsed {parts} using {reader.pos} bits")
