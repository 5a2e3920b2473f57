"""The sign map on homogeneous 2-partitions of K_6^3.

The map is the unique solution, up to scale, of the Pair-set equations: for
every homogeneous mask and every quadruple, the values on all homogeneous
masks agreeing with it off the quadruple's four faces sum to zero.  It is
normalized to 1 at :data:`P1_FACES`.
"""
from __future__ import annotations

import hashlib
import itertools
import time
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from pathlib import Path
from typing import Sequence

import numpy as np

from . import combinat as cb
from .errors import DigestMismatch, StructuralFailure, UnsupportedGradeError
from .exactnum import SparseMatrix, eliminate, lift_symmetric, random_primes, verify_integer_solution
from .relalg import build_block

N = 6
NUM_HOMOGENEOUS = comb(20, 10)
EXPECTED_HISTOGRAM = {1: 6840, -1: 6792, -4: 12, 0: 171112}

P1_FACES: tuple[cb.Face, ...] = (
    (1, 2, 3), (1, 2, 4), (1, 3, 4), (1, 2, 5), (3, 4, 5),
    (1, 5, 6), (2, 4, 6), (2, 5, 6), (3, 4, 6), (4, 5, 6),
)


def p1_mask() -> int:
    return cb.mask_from_faces(P1_FACES, N)


# Sphere-like face configurations; a partition containing a labelled copy of
# one of them on either side vanishes in the quotient.
PATTERNS: dict[str, tuple[str, tuple[str, ...]]] = {
    "I": ("xyzt", ("xyz", "xyt", "xzt", "yzt")),
    "II": ("xyztu", ("xyz", "xyt", "xzt", "yzu", "ytu", "ztu")),
    "III": ("xyztuv", ("xyu", "xyv", "yzu", "xzu", "xtv", "ytv", "yzt", "xzt")),
    "IV": ("xyztuv", ("xyz", "xyt", "xzt", "xyu", "ytu", "xyv", "xuv", "yzv", "ztv", "tuv")),
}


@dataclass(frozen=True)
class TrivialityWitness:
    pattern: str
    side: int
    assignment: tuple[int, ...]  # values of the pattern variables, in the order they are named

    def faces(self) -> list[cb.Face]:
        names, fl = PATTERNS[self.pattern]
        a = dict(zip(names, self.assignment))
        return [cb.normalize_face([a[ch] for ch in f], N) for f in fl]


@lru_cache(maxsize=None)
def pattern_instances(pattern: str) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Every injective assignment of the pattern's variables, with its face mask."""
    names, fl = PATTERNS[pattern]
    out = []
    for tup in itertools.permutations(range(1, N + 1), len(names)):
        a = dict(zip(names, tup))
        out.append((tup, cb.mask_from_faces([[a[ch] for ch in f] for f in fl], N)))
    return tuple(out)


@lru_cache(maxsize=None)
def pattern_face_sets() -> np.ndarray:
    """Distinct face masks of all pattern instances."""
    return np.array(sorted({m for p in PATTERNS for _, m in pattern_instances(p)}), dtype=np.int64)


def _check_homogeneous(m: int) -> None:
    if m >> 20 or cb.popcount(m) != 10:
        raise UnsupportedGradeError(f"mask {m:#x} is not a homogeneous partition of K_6^3")


def is_trivial(m: int) -> TrivialityWitness | None:
    """First witness in scan order side 1, 2; patterns I..IV; assignments lexicographic."""
    _check_homogeneous(m)
    for side, bits in ((1, m), (2, m ^ cb.full_mask(N))):
        for name in PATTERNS:
            for tup, fm in pattern_instances(name):
                if bits & fm == fm:
                    return TrivialityWitness(name, side, tup)
    return None


def trivial_flags(masks: np.ndarray) -> np.ndarray:
    """Vectorised triviality test: True where some pattern sits inside H1 or H2."""
    masks = np.asarray(masks, dtype=np.int64)
    comp = masks ^ cb.full_mask(N)
    flags = np.zeros(len(masks), dtype=bool)
    for fm in pattern_face_sets():
        flags |= (masks & fm) == fm
        flags |= (comp & fm) == fm
    return flags


def nontrivial_masks() -> np.ndarray:
    h = cb.homogeneous_masks(N)
    return h[~trivial_flags(h)]


def count_nontrivial() -> int:
    return len(nontrivial_masks())


def pair_set(m: int, quad: Sequence[int]) -> list[int]:
    """All homogeneous masks agreeing with ``m`` off the four faces of ``quad`` (ascending)."""
    _check_homogeneous(m)
    qm = cb.quad_mask(quad, N)
    rest = m & ~qm
    need = 10 - cb.popcount(rest)
    bits = [1 << r for r in range(20) if qm >> r & 1]
    return sorted(rest | sum(c) for c in itertools.combinations(bits, need))


@dataclass(frozen=True)
class PairEquation:
    quad: tuple[int, int, int, int]
    rest: int
    members: tuple[int, ...]


@dataclass
class EpsilonSystem:
    """Pair-set equations: rows are (quad, rest) classes, columns the sorted homogeneous masks."""

    masks: np.ndarray
    matrix: SparseMatrix
    row_quad: np.ndarray
    row_rest: np.ndarray

    def equation(self, row: int) -> PairEquation:
        lo, hi = self.matrix.indptr[row], self.matrix.indptr[row + 1]
        members = tuple(int(self.masks[c]) for c in self.matrix.indices[lo:hi])
        return PairEquation(cb.quads(N)[int(self.row_quad[row])], int(self.row_rest[row]), tuple(sorted(members)))

    def column_of(self, mask: int) -> int:
        i = int(np.searchsorted(self.masks, mask))
        if i >= len(self.masks) or int(self.masks[i]) != mask:
            raise KeyError(f"{mask:#x} is not homogeneous")
        return i


def build_system() -> EpsilonSystem:
    # the equations are exactly the degree-10 relation rows
    blk = build_block(N, 10)
    return EpsilonSystem(blk.columns, blk.matrix, blk.row_quad, blk.row_rest)


class EpsilonTable:
    """Immutable map from the 184,756 homogeneous masks to integers."""

    HEADER = ("# hyperdet epsilon v1", "# n=6 faces=lex bit0=(1,2,3)")

    def __init__(self, masks: np.ndarray, values: np.ndarray):
        self.masks = np.asarray(masks, dtype=np.int64)
        self.values = np.asarray(values, dtype=np.int64)
        if self.masks.shape != self.values.shape:
            raise ValueError("masks and values differ in length")
        self.masks.setflags(write=False)
        self.values.setflags(write=False)

    def __len__(self) -> int:
        return len(self.masks)

    def __getitem__(self, mask: int) -> int:
        i = int(np.searchsorted(self.masks, mask))
        if i >= len(self.masks) or int(self.masks[i]) != mask:
            raise KeyError(f"{mask:#x} is not in the table")
        return int(self.values[i])

    def __eq__(self, other) -> bool:
        return (isinstance(other, EpsilonTable) and np.array_equal(self.masks, other.masks)
                and np.array_equal(self.values, other.values))

    def histogram(self) -> dict[int, int]:
        c = Counter(self.values.tolist())
        order = [v for v in (1, -1, -4, 0) if v in c] + sorted(set(c) - {1, -1, -4, 0})
        return {v: c[v] for v in order}

    def histogram_line(self) -> str:
        return " ".join(f"{v}:{k}" for v, k in self.histogram().items())

    def support(self) -> dict[int, int]:
        nz = np.flatnonzero(self.values)
        return dict(zip(self.masks[nz].tolist(), self.values[nz].tolist()))

    def body(self) -> str:
        return "".join(f"{cb.mask_to_hex(int(m), N)} {int(v)}\n" for m, v in zip(self.masks, self.values))

    def dumps(self) -> str:
        body = self.body()
        digest = hashlib.sha256(body.encode()).hexdigest()
        return "\n".join(self.HEADER) + "\n" + body + f"# sha256={digest}\n"

    def save(self, path: str | Path) -> str:
        text = self.dumps()
        Path(path).write_text(text)
        return hashlib.sha256(text.encode()).hexdigest()

    @classmethod
    def loads(cls, text: str) -> "EpsilonTable":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if tuple(lines[:2]) != cls.HEADER:
            raise DigestMismatch("missing epsilon table header")
        if not lines[-1].startswith("# sha256="):
            raise DigestMismatch("missing digest line")
        body_lines = lines[2:-1]
        if len(body_lines) != NUM_HOMOGENEOUS:
            raise DigestMismatch(f"expected {NUM_HOMOGENEOUS} entries, found {len(body_lines)}")
        body = "".join(ln + "\n" for ln in body_lines)
        if hashlib.sha256(body.encode()).hexdigest() != lines[-1][len("# sha256="):]:
            raise DigestMismatch("body digest does not match")
        masks = np.empty(len(body_lines), dtype=np.int64)
        values = np.empty(len(body_lines), dtype=np.int64)
        for i, ln in enumerate(body_lines):
            h, v = ln.split()
            masks[i] = cb.mask_from_hex(h, N)
            values[i] = int(v)
        if np.any(np.diff(masks) <= 0):
            raise DigestMismatch("entries are not strictly ascending")
        return cls(masks, values)

    @classmethod
    def load(cls, path: str | Path) -> "EpsilonTable":
        return cls.loads(Path(path).read_text())


@dataclass
class SolveReport:
    method: str
    rank: int
    corank: int
    forced_steps: int = 0
    zeroed_singletons: int = 0
    primes: list[int] = field(default_factory=list)
    seconds: float = 0.0
    certified: bool = False


def propagate(system: EpsilonSystem, seed_col: int) -> tuple[list[int | None], int, int]:
    """Zero the singleton-equation masks, set ``seed_col`` to 1 and propagate forced values.

    Returns the values (``None`` where unreached), the number of singleton
    zeros and the number of forced propagation steps.
    """
    m = system.matrix
    nrows, ncols = m.shape
    lens = m.row_lengths()
    ip = m.indptr.tolist()
    ind = m.indices.tolist()
    order = np.argsort(m.indices, kind="stable")
    rowof = np.repeat(np.arange(nrows, dtype=np.int64), lens)
    cr = rowof[order].tolist()
    cp = np.concatenate([[0], np.cumsum(m.column_counts())]).tolist()
    val: list[int | None] = [None] * ncols
    unknown = lens.tolist()
    rsum = [0] * nrows
    queue: deque[int] = deque()

    def assign(c: int, v: int) -> None:
        val[c] = v
        for k in range(cp[c], cp[c + 1]):
            r = cr[k]
            unknown[r] -= 1
            rsum[r] += v
            if unknown[r] == 1:
                queue.append(r)

    zeroed = 0
    for r in np.flatnonzero(lens == 1).tolist():
        c = ind[ip[r]]
        if val[c] is None:
            assign(c, 0)
            zeroed += 1
    if val[seed_col] is not None:
        raise StructuralFailure("the normalization mask lies in a singleton equation")
    assign(seed_col, 1)
    forced = 0
    while queue:
        r = queue.popleft()
        if unknown[r] != 1:
            continue
        for k in range(ip[r], ip[r + 1]):
            c = ind[k]
            if val[c] is None:
                break
        assign(c, -rsum[r])
        forced += 1
    return val, zeroed, forced


def solve_epsilon(system: EpsilonSystem | None = None, *, method: str = "propagation",
                  seed: int = 0) -> tuple[EpsilonTable, SolveReport]:
    """Solve the Pair-set system, normalized at P1, and certify it over the integers.

    ``method="propagation"`` falls back to modular elimination only when
    propagation leaves unknowns; ``method="elimination"`` goes there directly.
    """
    t0 = time.perf_counter()
    system = system or build_system()
    ncols = system.matrix.ncols
    seed_col = system.column_of(p1_mask())
    report: SolveReport
    values: list[int] | None = None
    if method == "propagation":
        val, zeroed, forced = propagate(system, seed_col)
        if all(v is not None for v in val):
            values = val  # type: ignore[assignment]
            # every value is forced from the seed, so the solution space has dimension <= 1
            report = SolveReport("propagation", ncols - 1, 1, forced, zeroed)
    elif method != "elimination":
        raise ValueError(f"unknown method {method!r}")
    if values is None:
        primes = random_primes(seed)
        lifted = []
        for q in primes:
            basis = eliminate(system.matrix, q, free_hint=[seed_col]).kernel()
            if len(basis) != 1:
                raise StructuralFailure(f"solution space has dimension {len(basis)} mod {q}, expected 1")
            vec = basis[0]
            if vec[seed_col] == 0:
                raise StructuralFailure("kernel vector vanishes at the normalization mask")
            inv = pow(vec[seed_col], -1, q)
            lifted.append(lift_symmetric([x * inv % q for x in vec], q))
        if lifted[0] != lifted[1]:
            raise StructuralFailure("kernel vectors for the two primes lift to different integers")
        values = lifted[0]
        report = SolveReport("elimination", ncols - 1, 1, primes=primes)
    if not verify_integer_solution(system.matrix, values):
        raise StructuralFailure("solved table violates a Pair-set equation")
    if values[seed_col] != 1:
        raise StructuralFailure("normalization lost")
    report.certified = True
    report.seconds = time.perf_counter() - t0
    return EpsilonTable(system.masks, np.array(values, dtype=np.int64)), report


@dataclass
class CorankReport:
    rank: int
    corank: int
    evidence: str


def verify_corank(system: EpsilonSystem | None = None, *, method: str = "propagation",
                  primes: Sequence[int] | None = None) -> CorankReport:
    """Co-rank of the Pair-set system, by propagation completeness or two-prime rank."""
    system = system or build_system()
    ncols = system.matrix.ncols
    if method == "propagation":
        val, _, forced = propagate(system, system.column_of(p1_mask()))
        if any(v is None for v in val):
            raise StructuralFailure("propagation stalled; use method='rank'")
        if not verify_integer_solution(system.matrix, val):  # type: ignore[arg-type]
            raise StructuralFailure("propagated values violate an equation")
        return CorankReport(ncols - 1, 1, f"propagation reached all {ncols} masks ({forced} forced steps) "
                            "and the result satisfies every equation exactly")
    from .exactnum import certified_rank

    primes = list(primes) if primes else random_primes(0)
    rank = certified_rank(system.matrix, primes)
    if ncols - rank != 1:
        raise StructuralFailure(f"co-rank {ncols - rank}, expected 1")
    return CorankReport(rank, 1, f"rank {rank} over primes {primes}")


def check_table(table: EpsilonTable, system: EpsilonSystem | None = None) -> list[str]:
    """Problems found when re-checking a loaded table; empty when it is sound."""
    problems = []
    system = system or build_system()
    if not np.array_equal(table.masks, system.masks):
        return ["table domain is not the set of homogeneous masks"]
    if not verify_integer_solution(system.matrix, table.values.tolist()):
        problems.append("some Pair-set equation fails")
    if table[p1_mask()] != 1:
        problems.append("value at P1 is not 1")
    if set(table.values.tolist()) - {-4, -1, 0, 1}:
        problems.append("values outside {-4,-1,0,1}")
    if table.histogram() != EXPECTED_HISTOGRAM:
        problems.append(f"histogram {table.histogram_line()} differs from the expected one")
    return problems
