"""
Relative class numbers of cyclotomic fields
===========================================

h^- is an exact resultant over the odd characters, cross-checked by an
interval product of generalized Bernoulli numbers.
"""
from kspgal.invariants import h_minus, h_minus_interval, irregular_pairs

for q in (23, 29, 31, 37, 41, 43, 47, 49, 53, 59, 61):
    h = h_minus(q)
    lo, hi = h_minus_interval(q)
    print(f"q = {q:3d}  h^- = {h:8d}  interval width {float(hi - lo):.1e}")

# Kummer: p divides h^-(p) exactly when p is irregular
for p in (37, 59, 61):
    print(p, h_minus(p) % p == 0, bool(irregular_pairs(p)))
