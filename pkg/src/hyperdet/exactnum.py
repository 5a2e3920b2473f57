"""Exact arithmetic and sparse linear algebra over GF(p) and the integers.

Rationals are :class:`fractions.Fraction` throughout the package.  The sparse
routines work on :class:`SparseMatrix` (CSR with integer coefficients) and
are exact: ranks and kernels are computed modulo a prime, integer candidate
solutions are re-checked without any modular reduction.

Elimination strategy
--------------------
Rows whose only live column is ``c`` are pivoted first (zero fill); the value
of ``c`` is then a linear form in the columns declared *free*.  When no such
row is left, the live row with the fewest live entries is chosen (ties: lowest
row index) and its lowest live column is declared free.  Once every column is
either a pivot or free, the non-pivot rows are substituted into linear forms
over the free columns and reduced by dense elimination.  For the relation
systems of this package the number of free columns stays tiny, so the dense
step is negligible.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from sympy import isprime, nextprime

from .errors import StructuralFailure


@dataclass(frozen=True)
class PrimeField:
    """GF(p) for a prime p > 5 (characteristics 2 and 3 are excluded)."""

    p: int

    def __post_init__(self):
        if self.p <= 5 or not isprime(self.p):
            raise ValueError(f"modulus must be a prime > 5, got {self.p}")

    def __call__(self, x: int | Fraction) -> int:
        if isinstance(x, Fraction):
            return x.numerator % self.p * pow(x.denominator, -1, self.p) % self.p
        return x % self.p

    def inv(self, x: int) -> int:
        return pow(x % self.p, -1, self.p)

    def signed(self, x: int) -> int:
        """Symmetric representative in (-p/2, p/2]."""
        x %= self.p
        return x - self.p if x > self.p // 2 else x


def random_primes(seed: int, count: int = 2, bits: int = 30) -> list[int]:
    """``count`` distinct primes of exactly ``bits`` bits drawn from a seeded PRNG."""
    rng = random.Random(seed)
    out: list[int] = []
    while len(out) < count:
        q = nextprime(rng.randrange(1 << (bits - 1), (1 << bits) - 1))
        if q.bit_length() == bits and q not in out:
            out.append(int(q))
    return out


@dataclass
class SparseMatrix:
    """Row-compressed integer matrix; column indices strictly increase within a row."""

    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    ncols: int

    def __post_init__(self):
        self.indptr = np.asarray(self.indptr, dtype=np.int64)
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.data = np.asarray(self.data, dtype=np.int64)

    @classmethod
    def from_rows(cls, rows: Iterable[Mapping[int, int] | Sequence[tuple[int, int]]], ncols: int) -> "SparseMatrix":
        indptr = [0]
        indices: list[int] = []
        data: list[int] = []
        for row in rows:
            items = row.items() if isinstance(row, Mapping) else row
            acc: dict[int, int] = {}
            for c, v in items:
                if not 0 <= c < ncols:
                    raise IndexError(f"column {c} out of range 0..{ncols - 1}")
                acc[c] = acc.get(c, 0) + int(v)
            for c in sorted(acc):
                if acc[c]:
                    indices.append(c)
                    data.append(acc[c])
            indptr.append(len(indices))
        return cls(np.array(indptr), np.array(indices, dtype=np.int64), np.array(data, dtype=np.int64), ncols)

    @classmethod
    def from_dense(cls, a) -> "SparseMatrix":
        a = [list(r) for r in a]
        ncols = len(a[0]) if a else 0
        return cls.from_rows(({j: v for j, v in enumerate(r) if v} for r in a), ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(np.zeros(nrows + 1, dtype=np.int64), np.zeros(0), np.zeros(0), ncols)

    @property
    def nrows(self) -> int:
        return len(self.indptr) - 1

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def nnz(self) -> int:
        return int(self.indptr[-1])

    def row(self, i: int) -> list[tuple[int, int]]:
        a, b = self.indptr[i], self.indptr[i + 1]
        return list(zip(self.indices[a:b].tolist(), self.data[a:b].tolist()))

    def rows(self):
        for i in range(self.nrows):
            yield self.row(i)

    def row_lengths(self) -> np.ndarray:
        return np.diff(self.indptr)

    def column_counts(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.ncols)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i in range(self.nrows):
            for c, v in self.row(i):
                out[i][c] = v
        return out

    def check(self) -> None:
        """Raise if the CSR invariants (sorted unique columns, no explicit zeros) fail."""
        for i in range(self.nrows):
            cols = self.indices[self.indptr[i]:self.indptr[i + 1]]
            if len(cols) and (np.any(np.diff(cols) <= 0) or cols[0] < 0 or cols[-1] >= self.ncols):
                raise ValueError(f"row {i} has unsorted or out-of-range columns")
        if np.any(self.data == 0):
            raise ValueError("explicit zero stored")

    def matvec(self, x: Sequence[int]) -> list[int]:
        """Exact integer product ``M @ x``."""
        if len(x) != self.ncols:
            raise ValueError(f"vector has length {len(x)}, matrix has {self.ncols} columns")
        xs = np.asarray(x, dtype=object) if not isinstance(x, np.ndarray) else x
        xmax = max((abs(int(v)) for v in xs), default=0)
        dmax = int(np.abs(self.data).max()) if self.nnz else 0
        rmax = int(self.row_lengths().max()) if self.nrows else 0
        if xmax * dmax * max(rmax, 1) < 2**62:
            prod = self.data * np.asarray(xs, dtype=np.int64)[self.indices]
        else:
            prod = self.data.astype(object) * np.asarray(xs, dtype=object)[self.indices]
        out = [0] * self.nrows
        nonempty = np.flatnonzero(self.row_lengths())
        if len(nonempty):
            sums = np.add.reduceat(prod, self.indptr[nonempty])
            for i, s in zip(nonempty.tolist(), sums.tolist()):
                out[i] = int(s)
        return out


def verify_integer_solution(m: SparseMatrix, x: Sequence[int]) -> bool:
    """True iff ``m @ x == 0`` exactly over the integers."""
    if len(x) != m.ncols:
        raise ValueError(f"vector has length {len(x)}, matrix has {m.ncols} columns")
    return not any(m.matvec(x))


@dataclass
class Elimination:
    """Outcome of :func:`eliminate`: pivots, free columns and the reduced residual."""

    p: int
    ncols: int
    pivots: list[tuple[int, int]]
    free: list[int]
    expr: list[dict[int, int]]  # per column: linear form over indices into ``free``
    residual: list[dict[int, int]] = field(default_factory=list)  # echelon rows over free indices

    @property
    def rank(self) -> int:
        return len(self.pivots) + len(self.residual)

    def kernel(self) -> list[list[int]]:
        """Basis of the right kernel, one vector of length ``ncols`` per basis element."""
        p = self.p
        k = len(self.free)
        # reduced echelon form of the residual on the free coordinates
        rows = [dict(r) for r in self.residual]
        lead = []
        for r in rows:
            c = min(r)
            inv = pow(r[c], -1, p)
            for j in list(r):
                r[j] = r[j] * inv % p
            lead.append(c)
        for i, r in enumerate(rows):
            c = lead[i]
            for j, other in enumerate(rows):
                if j != i and c in other:
                    f = other[c]
                    for jj, v in r.items():
                        w = (other.get(jj, 0) - f * v) % p
                        if w:
                            other[jj] = w
                        else:
                            other.pop(jj, None)
        pivot_of = dict(zip(lead, rows))
        basis = []
        for s in range(k):
            if s in pivot_of:
                continue
            sval = [0] * k
            sval[s] = 1
            for c, r in pivot_of.items():
                sval[c] = (-r.get(s, 0)) % p
            vec = [0] * self.ncols
            for col, form in enumerate(self.expr):
                vec[col] = sum(v * sval[j] for j, v in form.items()) % p
            basis.append(vec)
        return basis


def eliminate(m: SparseMatrix, p: int, free_hint: Sequence[int] = ()) -> Elimination:
    """Singleton-first elimination of ``m`` over GF(p); see the module docstring.

    ``free_hint`` columns are declared free before anything else, in order.
    """
    PrimeField(p)
    nrows, ncols = m.shape
    data = (m.data % p).tolist()
    ind = m.indices.tolist()
    ip = m.indptr.tolist()
    # column -> rows incidence
    order = np.argsort(m.indices, kind="stable")
    rowof = np.repeat(np.arange(nrows, dtype=np.int64), m.row_lengths())
    col_rows = rowof[order].tolist()
    col_ptr = np.concatenate([[0], np.cumsum(m.column_counts())]).tolist()

    live = [0] * nrows
    for r in range(nrows):
        live[r] = sum(1 for k in range(ip[r], ip[r + 1]) if data[k])
    row_done = [False] * nrows
    expr: list[dict[int, int] | None] = [None] * ncols
    free: list[int] = []
    pivots: list[tuple[int, int]] = []
    queue: deque[int] = deque(r for r in range(nrows) if live[r] == 1)

    def settle(c: int, form: dict[int, int]) -> None:
        expr[c] = form
        for k in range(col_ptr[c], col_ptr[c + 1]):
            r = col_rows[k]
            if row_done[r]:
                continue
            live[r] -= 1
            if live[r] == 1:
                queue.append(r)

    def drain() -> None:
        while queue:
            r = queue.popleft()
            if row_done[r] or live[r] != 1:
                continue
            target = -1
            coef = 0
            acc: dict[int, int] = {}
            for k in range(ip[r], ip[r + 1]):
                v = data[k]
                if not v:
                    continue
                c = ind[k]
                form = expr[c]
                if form is None:
                    target, coef = c, v
                else:
                    for j, w in form.items():
                        acc[j] = (acc.get(j, 0) + v * w) % p
            row_done[r] = True
            pivots.append((r, target))
            f = (-pow(coef, -1, p)) % p
            settle(target, {j: w * f % p for j, w in acc.items() if w})

    for c in free_hint:
        if expr[c] is None:
            free.append(c)
            settle(c, {len(free) - 1: 1})
    drain()
    while True:
        # stalled: pick the live row with fewest live entries, free its lowest live column
        best = -1
        best_len = None
        for r in range(nrows):
            if not row_done[r] and live[r] >= 2 and (best_len is None or live[r] < best_len):
                best, best_len = r, live[r]
                if best_len == 2:
                    break
        if best < 0:
            break
        c = min(ind[k] for k in range(ip[best], ip[best + 1]) if data[k] and expr[ind[k]] is None)
        free.append(c)
        settle(c, {len(free) - 1: 1})
        drain()
    for c in range(ncols):
        if expr[c] is None:  # column untouched by any row
            free.append(c)
            expr[c] = {len(free) - 1: 1}

    # substitute the remaining rows and reduce them to echelon form
    residual: dict[int, dict[int, int]] = {}
    for r in range(nrows):
        if row_done[r]:
            continue
        acc: dict[int, int] = {}
        for k in range(ip[r], ip[r + 1]):
            v = data[k]
            if v:
                for j, w in expr[ind[k]].items():  # type: ignore[union-attr]
                    acc[j] = (acc.get(j, 0) + v * w) % p
        acc = {j: w for j, w in acc.items() if w}
        while acc:
            lead = min(acc)
            if lead not in residual:
                residual[lead] = acc
                break
            base = residual[lead]
            f = acc[lead] * pow(base[lead], -1, p) % p
            for j, w in base.items():
                x = (acc.get(j, 0) - f * w) % p
                if x:
                    acc[j] = x
                else:
                    acc.pop(j, None)
    return Elimination(p, ncols, pivots, free, expr, [residual[k] for k in sorted(residual)])  # type: ignore[arg-type]


def rank_mod_p(m: SparseMatrix, p: int) -> int:
    """Rank of ``m`` over GF(p)."""
    if m.nrows == 0 or m.ncols == 0 or m.nnz == 0:
        return 0
    return eliminate(m, p).rank


def nullspace_right_mod_p(m: SparseMatrix, p: int) -> list[list[int]]:
    """Basis of ``{x : m x = 0}`` over GF(p), entries in ``[0, p)``."""
    if m.ncols == 0:
        return []
    return eliminate(m, p).kernel()


def certified_rank(m: SparseMatrix, primes: Sequence[int]) -> int:
    """Rank computed independently for each prime; disagreement is a structural failure."""
    ranks = {q: rank_mod_p(m, q) for q in primes}
    if len(set(ranks.values())) != 1:
        raise StructuralFailure(f"rank depends on the prime: {ranks}")
    return next(iter(ranks.values()))


def lift_symmetric(vec: Sequence[int], p: int) -> list[int]:
    """Map residues to the symmetric range, the natural integer lift for small solutions."""
    h = p // 2
    return [v - p if v > h else v for v in (x % p for x in vec)]


# Dense rational elimination: the independent oracle for small instances.

def _rref_rational(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    a = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        piv = a[r][c]
        a[r] = [v / piv for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rank_rational_dense(m: SparseMatrix) -> int:
    rows = [[Fraction(v) for v in r] for r in m.to_dense()]
    return len(_rref_rational(rows, m.ncols)[1])


def nullspace_rational_dense(m: SparseMatrix) -> list[list[Fraction]]:
    rows = [[Fraction(v) for v in r] for r in m.to_dense()]
    red, piv = _rref_rational(rows, m.ncols)
    basis = []
    for f in (c for c in range(m.ncols) if c not in piv):
        vec = [Fraction(0)] * m.ncols
        vec[f] = Fraction(1)
        for row, c in zip(red, piv):
            vec[c] = -row[f]
        basis.append(vec)
    return basis
