"""
Bernoulli numbers and irregular primes
======================================
"""
from kspgal import bernoulli, irregular_pairs, ksp_structure
from kspgal.exact_arith import primes_up_to

# The numerator of B_12 is the first place a large prime shows up.
print("B_12 =", bernoulli(12))

# A prime p is irregular when it divides the numerator of some B_2k with 2k <= p - 3.
irregular = [p for p in primes_up_to(200) if p > 2 and irregular_pairs(p)]
print("irregular primes below 200:", irregular)

for p in (37, 59, 67, 157):
    print(p, [x.index for x in irregular_pairs(p)])

# Each pair (p, 2k) switches on a piece of symplectic K-theory in degree 4k - 2.
for deg in (62, 58, 22):
    s = ksp_structure(deg, 37)
    print(f"KSp_{deg}(Z; Z_37):", s.shape, "kernel nonvanishing:", s.kernel_nonvanishing)
