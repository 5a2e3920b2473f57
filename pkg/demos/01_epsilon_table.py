"""
Solving for the sign table on K_6^3
===================================

Every 2-colouring of the 20 triangles of K_6 with ten triangles per colour
gets an integer coefficient.  The pair-set equations pin these down up to a
scalar.  Here we build the system, solve it, and look at what comes out.
"""
from __future__ import annotations

import time

import numpy as np

from hyperdet import combinat as cb
from hyperdet import epsilon as ep

masks = cb.homogeneous_masks(6)
print(f"{len(masks)} homogeneous colourings")

# one row per (quad, rest) pair, one column per colouring
t = time.perf_counter()
system = ep.build_system()
print(f"system: {system.matrix.nrows} equations x {len(system.masks)} unknowns "
      f"({time.perf_counter() - t:.1f}s)")

# propagation fixes the whole table once one entry is seeded
table, report = ep.solve_epsilon(system)
print(f"corank {report.corank} via {report.method}")
print("histogram", table.histogram_line())

p1 = ep.p1_mask()
print(f"P1 = {cb.mask_to_hex(p1, 6)}: faces {cb.mask_faces(p1, 6)} -> eps {table[p1]}")

# The zero entries are exactly the 'trivial' colourings
flags = ep.trivial_flags(table.masks)
print("eps == 0 iff trivial:", bool(np.all(flags == (table.values == 0))))

m = int(table.masks[np.flatnonzero(flags)[0]])
print(f"a trivial colouring {cb.mask_to_hex(m, 6)}: witness {ep.is_trivial(m)}")
