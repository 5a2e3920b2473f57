"""
Orbits under relabelling and colour swap
========================================

S_6 permutes the vertices and S_2 swaps the two colours.  The nontrivial
colourings fall into a handful of orbits, and the sign is constant on each.
"""
from __future__ import annotations

from hyperdet import combinat as cb
from hyperdet import epsilon as ep
from hyperdet import symmetry as sy

table, _ = ep.solve_epsilon()
nontrivial = ep.nontrivial_masks()
print(f"{len(nontrivial)} nontrivial colourings")

report = sy.classify_orbits(nontrivial, table)
print(f"{len(report.orbits)} orbits covering {report.total_masks} colourings\n")
print(f"{'rep':>6} {'size':>5} {'eps':>4} {'stab':>5}")
for o in report.orbits:
    print(f"{cb.mask_to_hex(o.rep, 6):>6} {o.size:>5} {o.eps:>4} {sy.stabilizer_order(o.rep):>5}")

# orbit-stabiliser: size * |stab| = 1440
assert all(o.size * sy.stabilizer_order(o.rep) == sy.GROUP_ORDER for o in report.orbits)

p1 = report.find(ep.p1_mask())
print(f"\nP1 sits in the orbit of {cb.mask_to_hex(p1.rep, 6)} (size {p1.size}, eps {p1.eps})")
