"""
Dimensions of the graded pieces
===============================

For small n the relation module is ranked block by block over two primes.
For n = 6 the middle blocks are ranked and the rest follow from the
reduction certificates or the colour-swap symmetry.
"""
from __future__ import annotations

from hyperdet import relalg as ra

for n in range(6):
    r = ra.dimension(n)
    print(f"n={n}: total {r.total}, by e1 count {r.split()}")

r = ra.dimension(6, samples=100)
print(f"n=6: total {r.total}")
for b in r.blocks:
    if b.dim or b.evidence == "rank":
        print(f"  p={b.p:2d} dim={b.dim} [{b.evidence}] {b.detail}")
