"""
Two ways to evaluate the determinant
====================================

A tensor assigns a vector in Q^2 to each triangle.  The determinant is the
signed sum over colourings of products of first coordinates on one colour
and second coordinates on the other.  A sum of 60 products of 2x2 brackets
gives the same number.
"""
from __future__ import annotations

import random
from fractions import Fraction

from hyperdet import detfun as dt
from hyperdet import epsilon as ep

table, _ = ep.solve_epsilon()
eps = table.support()
terms = dt.load_brackets()
rng = random.Random(1)

c = dt.random_config(rng)
print("random tensor: sum =", dt.det_sum(c, eps), " brackets =", dt.det_bracket(c, terms))

# the normalising configuration
print("basis tensor of P1:", dt.det_sum(dt.basis_config(ep.p1_mask()), eps))

# GL_2 acts on all 20 vectors at once and scales by det(T)^10
T = [[2, 1], [1, 1]]
print("det(T)=", dt.det2(T), " ratio:", dt.det_sum(dt.transform_gl2(c, T), eps) / dt.det_sum(c, eps))
T = [[Fraction(1, 2), 0], [0, 1]]
print("det(T)=", dt.det2(T), " ratio:", dt.det_sum(dt.transform_gl2(c, T), eps) / dt.det_sum(c, eps))

# relabelling vertices leaves it fixed
sigma = (2, 1, 4, 3, 6, 5)
print("after (12)(34)(56):", dt.det_sum(dt.transform_perm(c, sigma), eps) == dt.det_sum(c, eps))

# all four triangles of a quad on one line -> zero
d = dt.degenerate_config((1, 3, 5, 6), rng)
print("degenerate on {1,3,5,6}:", dt.det_sum(d, eps), dt.det_bracket(d, terms))
print("terms that vanish:", dt.case_one_failures(dt.degenerate_config((1, 2, 3, 4), rng), terms) == [])
