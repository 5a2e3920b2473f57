"""Faces of the complete 3-uniform hypergraph, partition masks and the S_n x S_2 action.

A 2-partition (H1, H2) of the faces of K_n^3 is stored as a plain ``int``:
bit ``r`` is set when the face of lexicographic rank ``r`` lies in H1.
The same integer names the basis tensor carrying e1 on the H1 faces and e2
elsewhere, so masks double as generator labels.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidFaceError, UnsupportedGradeError

Face = tuple[int, int, int]


def num_faces(n: int) -> int:
    return comb(n, 3)


def full_mask(n: int) -> int:
    return (1 << comb(n, 3)) - 1


@lru_cache(maxsize=None)
def faces(n: int) -> tuple[Face, ...]:
    """All sorted triples of ``{1..n}`` in lexicographic order."""
    return tuple(itertools.combinations(range(1, n + 1), 3))


@lru_cache(maxsize=None)
def _rank_table(n: int) -> dict[Face, int]:
    return {f: r for r, f in enumerate(faces(n))}


def normalize_face(face: Sequence[int], n: int) -> Face:
    """Sort a vertex triple, checking it names a face of K_n^3."""
    if len(face) != 3:
        raise InvalidFaceError(f"a face has three vertices, got {tuple(face)!r}")
    f = tuple(sorted(int(v) for v in face))
    if f[0] < 1 or f[2] > n or f[0] == f[1] or f[1] == f[2]:
        raise InvalidFaceError(f"{tuple(face)!r} is not a face of K_{n}^3")
    return f  # type: ignore[return-value]


def face_rank(face: Sequence[int], n: int) -> int:
    """Lexicographic rank of ``face`` among the C(n,3) faces.

    Vertex order inside ``face`` is irrelevant: (3,1,2) ranks like (1,2,3).
    """
    return _rank_table(n)[normalize_face(face, n)]


def face_unrank(r: int, n: int) -> Face:
    fs = faces(n)
    if not 0 <= r < len(fs):
        raise InvalidFaceError(f"rank {r} out of range for n={n}")
    return fs[r]


def face_bit(face: Sequence[int], n: int) -> int:
    return 1 << face_rank(face, n)


def mask_from_faces(face_list, n: int) -> int:
    m = 0
    for f in face_list:
        m |= face_bit(f, n)
    return m


def mask_faces(mask: int, n: int) -> list[Face]:
    """Faces of H1 for ``mask``, in rank order."""
    return [f for r, f in enumerate(faces(n)) if mask >> r & 1]


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def hex_width(n: int) -> int:
    return -(-comb(n, 3) // 4)


def mask_to_hex(mask: int, n: int) -> str:
    return format(mask, f"0{hex_width(n)}x")


def mask_from_hex(text: str, n: int) -> int:
    text = text.strip()
    if len(text) != hex_width(n):
        raise ValueError(f"mask {text!r} does not have {hex_width(n)} hex digits")
    m = int(text, 16)
    if m >> comb(n, 3):
        raise ValueError(f"mask {text!r} has bits beyond C({n},3)")
    return m


@dataclass(frozen=True)
class GroupElement:
    """Element (sigma, swap) of S_n x S_2.

    ``perm[i-1]`` is sigma(i).  ``swap`` exchanges H1 and H2 after relabelling.
    """

    perm: tuple[int, ...]
    swap: bool = False

    def __post_init__(self):
        if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
            raise ValueError(f"{self.perm!r} is not a permutation of 1..{len(self.perm)}")

    @classmethod
    def identity(cls, n: int) -> "GroupElement":
        return cls(tuple(range(1, n + 1)), False)

    @property
    def n(self) -> int:
        return len(self.perm)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        # (self * other) acts as other first, then self
        perm = tuple(self.perm[other.perm[i] - 1] for i in range(self.n))
        return GroupElement(perm, self.swap ^ other.swap)

    def inverse(self) -> "GroupElement":
        inv = [0] * self.n
        for i, s in enumerate(self.perm, start=1):
            inv[s - 1] = i
        return GroupElement(tuple(inv), self.swap)

    def __call__(self, v: int) -> int:
        return self.perm[v - 1]


def transposition(a: int, b: int, n: int) -> GroupElement:
    p = list(range(1, n + 1))
    p[a - 1], p[b - 1] = b, a
    return GroupElement(tuple(p))


@lru_cache(maxsize=4096)
def face_permutation(perm: tuple[int, ...]) -> tuple[int, ...]:
    """``out[r]`` is the rank of sigma applied to face ``r``."""
    n = len(perm)
    return tuple(face_rank((perm[a - 1], perm[b - 1], perm[c - 1]), n) for a, b, c in faces(n))


def act(g: GroupElement, mask: int) -> int:
    """Image of ``mask`` under ``g``: the bit of face F moves to sigma(F); then complement if swapping."""
    n = g.n
    image = 0
    for r, target in enumerate(face_permutation(g.perm)):
        if mask >> r & 1:
            image |= 1 << target
    if g.swap:
        image ^= full_mask(n)
    return image


def group_elements(n: int) -> Iterator[GroupElement]:
    """All n! * 2 elements of S_n x S_2, permutations in lexicographic order, swap=False first."""
    for swap in (False, True):
        for p in itertools.permutations(range(1, n + 1)):
            yield GroupElement(p, swap)


def masks_of_weight(n: int, p: int) -> np.ndarray:
    """Sorted array of all masks with exactly ``p`` of the C(n,3) bits set."""
    w = comb(n, 3)
    if not 0 <= p <= w:
        return np.zeros(0, dtype=np.int64)
    if w <= 24:
        allm = np.arange(1 << w, dtype=np.int64)
        return allm[np.bitwise_count(allm) == p]
    out = np.fromiter(
        (sum(1 << i for i in c) for c in itertools.combinations(range(w), p)),
        dtype=np.int64,
        count=comb(w, p),
    )
    out.sort()
    return out


def enumerate_homogeneous(n: int) -> Iterator[int]:
    """Yield every mask with popcount C(n,3)/2 once, in ascending order."""
    w = comb(n, 3)
    if w % 2:
        raise UnsupportedGradeError(f"C({n},3) = {w} is odd; no homogeneous 2-partitions")
    k = w // 2
    if k == 0:
        yield 0
        return
    m = (1 << k) - 1
    limit = 1 << w
    while m < limit:
        yield m
        # Gosper's hack: next integer with the same popcount
        c = m & -m
        r = m + c
        m = (((r ^ m) >> 2) // c) | r


def homogeneous_masks(n: int = 6) -> np.ndarray:
    """Array form of :func:`enumerate_homogeneous`."""
    w = comb(n, 3)
    if w % 2:
        raise UnsupportedGradeError(f"C({n},3) = {w} is odd; no homogeneous 2-partitions")
    return masks_of_weight(n, w // 2)


def quads(n: int) -> list[tuple[int, int, int, int]]:
    return list(itertools.combinations(range(1, n + 1), 4))


def quad_faces(quad: Sequence[int]) -> tuple[Face, Face, Face, Face]:
    """The four faces {x,y,z},{x,y,t},{x,z,t},{y,z,t} of a sorted quadruple."""
    x, y, z, t = quad
    return ((x, y, z), (x, y, t), (x, z, t), (y, z, t))


def quad_mask(quad: Sequence[int], n: int) -> int:
    q = tuple(sorted(quad))
    if len(set(q)) != 4 or q[0] < 1 or q[3] > n:
        raise InvalidFaceError(f"{tuple(quad)!r} is not a 4-subset of 1..{n}")
    return mask_from_faces(quad_faces(q), n)


@lru_cache(maxsize=None)
def face_perm_array(n: int) -> np.ndarray:
    """(n!, C(n,3)) array of face permutations for every sigma in S_n, lexicographic order."""
    return np.array(
        [face_permutation(p) for p in itertools.permutations(range(1, n + 1))],
        dtype=np.int8 if comb(n, 3) < 128 else np.int16,
    )


def act_many(perm_faces: np.ndarray, masks: np.ndarray, swap: bool, n: int) -> np.ndarray:
    """Vectorised :func:`act` for one face permutation over an array of masks (widths <= 62)."""
    masks = np.asarray(masks, dtype=np.int64)
    out = np.zeros_like(masks)
    for r, target in enumerate(perm_faces):
        out |= ((masks >> r) & 1) << int(target)
    if swap:
        out ^= full_mask(n)
    return out
