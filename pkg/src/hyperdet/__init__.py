"""Exact reconstruction of the determinant-like map det^{S3} on 2-partitions of K_6^3.

Modules:
  combinat   faces, partition masks, the S_n x S_2 action
  exactnum   modular and rational sparse linear algebra
  relalg     relations, graded blocks, dimensions, slice-reduction certificates
  epsilon    the Pair-set system and its sign table
  symmetry   orbit classification under S_6 x S_2
  detfun     the two determinant evaluators and the symmetry transforms
"""
from __future__ import annotations

__version__ = "0.1.0"

from .combinat import GroupElement, act, enumerate_homogeneous, face_rank, face_unrank
from .detfun import TensorConfig, det_bracket, det_sum, load_brackets
from .epsilon import EpsilonTable, count_nontrivial, is_trivial, solve_epsilon
from .relalg import block_dimension, dimension, reduce_generator, verify_certificate
from .symmetry import canonical_rep, classify_orbits

__all__ = [
    "GroupElement", "act", "enumerate_homogeneous", "face_rank", "face_unrank",
    "TensorConfig", "det_bracket", "det_sum", "load_brackets",
    "EpsilonTable", "count_nontrivial", "is_trivial", "solve_epsilon",
    "block_dimension", "dimension", "reduce_generator", "verify_certificate",
    "canonical_rep", "classify_orbits",
]
