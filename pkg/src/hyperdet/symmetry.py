"""Orbits of homogeneous partitions of K_6^3 under S_6 x S_2.

Each permutation of the 20 faces is tabulated as two 1024-entry lookup
tables (low and high ten bits of the mask), so the whole group acts on an
array of masks with two gathers and an OR per permutation.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import combinat as cb
from .errors import DigestMismatch, StructuralFailure

N = 6
GROUP_ORDER = 1440
FULL = cb.full_mask(N)


@lru_cache(maxsize=1)
def _lookup() -> tuple[np.ndarray, np.ndarray]:
    fp = cb.face_perm_array(N).astype(np.int64)  # (720, 20)
    low = np.arange(1024, dtype=np.int64)
    bits = (low[:, None] >> np.arange(10)) & 1  # (1024, 10)
    lo = (bits[None, :, :] << fp[:, None, :10]).sum(axis=2)
    hi = (bits[None, :, :] << fp[:, None, 10:]).sum(axis=2)
    return lo, hi


def images(masks: np.ndarray) -> np.ndarray:
    """(720, len(masks)) array: row k holds the images under the k-th permutation (no swap)."""
    masks = np.asarray(masks, dtype=np.int64)
    lo, hi = _lookup()
    return lo[:, masks & 1023] | hi[:, masks >> 10]


def canonical_many(masks: np.ndarray, chunk: int = 8192) -> np.ndarray:
    masks = np.asarray(masks, dtype=np.int64)
    out = np.empty_like(masks)
    for s in range(0, len(masks), chunk):
        im = images(masks[s:s + chunk])
        out[s:s + chunk] = np.minimum(im.min(axis=0), (im ^ FULL).min(axis=0))
    return out


def canonical_rep(m: int) -> int:
    """Least integer in the S_6 x S_2 orbit of ``m``."""
    return int(canonical_many(np.array([m]))[0])


def orbit(m: int) -> np.ndarray:
    im = images(np.array([m]))[:, 0]
    return np.unique(np.concatenate([im, im ^ FULL]))


def orbit_size(m: int) -> int:
    return len(orbit(m))


def stabilizer_order(m: int) -> int:
    im = images(np.array([m]))[:, 0]
    return int(np.count_nonzero(im == m) + np.count_nonzero((im ^ FULL) == m))


@dataclass(frozen=True)
class Orbit:
    rep: int
    size: int
    eps: int


@dataclass
class OrbitReport:
    orbits: list[Orbit]

    @property
    def total_masks(self) -> int:
        return sum(o.size for o in self.orbits)

    def size_eps_multiset(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for o in self.orbits:
            out[(o.size, o.eps)] = out.get((o.size, o.eps), 0) + 1
        return out

    def find(self, mask: int) -> Orbit:
        rep = canonical_rep(mask)
        for o in self.orbits:
            if o.rep == rep:
                return o
        raise KeyError(f"{mask:#x} lies in no reported orbit")

    def body(self) -> str:
        lines = [f"{cb.mask_to_hex(o.rep, N)} {o.size} {o.eps}\n" for o in self.orbits]
        lines.append(f"# orbits {len(self.orbits)}\n")
        lines.append(f"# total {self.total_masks}\n")
        return "".join(lines)

    def dumps(self) -> str:
        body = self.body()
        return "# hyperdet orbits v1\n" + body + f"# sha256={hashlib.sha256(body.encode()).hexdigest()}\n"

    def save(self, path: str | Path) -> str:
        text = self.dumps()
        Path(path).write_text(text)
        return hashlib.sha256(text.encode()).hexdigest()

    @classmethod
    def loads(cls, text: str) -> "OrbitReport":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines or lines[0] != "# hyperdet orbits v1" or not lines[-1].startswith("# sha256="):
            raise DigestMismatch("malformed orbit report")
        body = "".join(ln + "\n" for ln in lines[1:-1])
        if hashlib.sha256(body.encode()).hexdigest() != lines[-1][len("# sha256="):]:
            raise DigestMismatch("orbit report digest does not match")
        orbits = []
        for ln in lines[1:-3]:
            h, size, eps = ln.split()
            orbits.append(Orbit(cb.mask_from_hex(h, N), int(size), int(eps)))
        rep = cls(orbits)
        if lines[-3] != f"# orbits {len(orbits)}" or lines[-2] != f"# total {rep.total_masks}":
            raise DigestMismatch("orbit report totals do not match its records")
        return rep

    @classmethod
    def load(cls, path: str | Path) -> "OrbitReport":
        return cls.loads(Path(path).read_text())


def classify_orbits(masks: np.ndarray, eps) -> OrbitReport:
    """Group ``masks`` by canonical form; ``eps`` is an EpsilonTable (or any mask -> int mapping).

    Sorted by descending size, then ascending representative.
    """
    masks = np.unique(np.asarray(masks, dtype=np.int64))
    canon = canonical_many(masks)
    values = np.array([eps[int(m)] for m in masks], dtype=np.int64)
    orbits = []
    for rep in np.unique(canon).tolist():
        sel = canon == rep
        vals = values[sel]
        if np.any(vals != vals[0]):
            bad = masks[sel][np.flatnonzero(vals != vals[0])[0]]
            raise StructuralFailure(
                f"epsilon differs on the orbit of {rep:#x}: {int(vals[0])} at the representative "
                f"class vs {int(values[np.searchsorted(masks, bad)])} at {int(bad):#x}")
        size = int(sel.sum())
        if size != orbit_size(rep):
            raise StructuralFailure(f"input set is not closed under the group near {rep:#x}")
        orbits.append(Orbit(rep, size, int(vals[0])))
    orbits.sort(key=lambda o: (-o.size, o.rep))
    return OrbitReport(orbits)


# (orbit size, epsilon) -> number of orbits
EXPECTED_ORBIT_MULTISET = {
    (1440, 1): 3, (1440, -1): 3, (720, -1): 2, (720, 1): 1, (360, 1): 4, (360, -1): 2,
    (240, -1): 1, (240, 1): 1, (120, 1): 1, (72, -1): 1, (12, -4): 1,
}
