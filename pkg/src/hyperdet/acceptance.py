"""Acceptance checks, one function per criterion, shared by ``hyperdet verify`` and the test-suite."""
from __future__ import annotations

import random
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Callable

import numpy as np

from . import combinat as cb
from . import detfun as dt
from . import epsilon as ep
from . import relalg as ra
from . import symmetry as sy
from .errors import DigestMismatch


@dataclass
class Outcome:
    ok: bool
    detail: str
    seconds: float = 0.0


class Context:
    """Lazily shared state: the Pair-set system, the solved table, the bracket terms."""

    def __init__(self, seed: int = 0, configs: int = 100):
        self.seed = seed
        self.configs = configs

    def rng(self, salt: str) -> random.Random:
        return random.Random(f"{self.seed}:{salt}")

    @cached_property
    def system(self) -> ep.EpsilonSystem:
        return ep.build_system()

    @cached_property
    def solved(self) -> tuple[ep.EpsilonTable, ep.SolveReport]:
        return ep.solve_epsilon(self.system, seed=self.seed)

    @property
    def table(self) -> ep.EpsilonTable:
        return self.solved[0]

    @cached_property
    def terms(self) -> list[dt.BracketTerm]:
        return dt.load_brackets()

    @cached_property
    def nontrivial(self) -> np.ndarray:
        return ep.nontrivial_masks()

    @cached_property
    def orbits(self) -> sy.OrbitReport:
        return sy.classify_orbits(self.nontrivial, self.table)


def _timed(budget: float, fn: Callable[[Context], tuple[bool, str]], ctx: Context) -> Outcome:
    t = time.perf_counter()
    ok, detail = fn(ctx)
    dt_ = time.perf_counter() - t
    if dt_ > budget:
        ok = False
        detail += f"; exceeded budget {budget:.0f}s"
    return Outcome(ok, f"{detail} [{dt_:.1f}s]", dt_)


def check_counts(ctx: Context) -> tuple[bool, str]:
    n_h = sum(1 for _ in cb.enumerate_homogeneous(6))
    n_nt = len(ctx.nontrivial)
    return n_h == 184_756 and n_nt == 13_644, f"homogeneous={n_h} nontrivial={n_nt}"


def check_epsilon(ctx: Context) -> tuple[bool, str]:
    table, rep = ctx.solved
    problems = ep.check_table(table, ctx.system)
    ok = not problems and rep.corank == 1 and rep.certified
    return ok, (f"corank={rep.corank} via {rep.method}, histogram {table.histogram_line()}, "
                f"eps(P1)={table[ep.p1_mask()]}" + ("; " + "; ".join(problems) if problems else ""))


def check_dichotomy(ctx: Context) -> tuple[bool, str]:
    table = ctx.table
    flags = ep.trivial_flags(table.masks)
    mismatches = np.flatnonzero(flags != (table.values == 0))
    # spot-check the witness-returning search against the vectorised one
    rng = ctx.rng("dichotomy")
    picks = rng.sample(range(len(table)), 500)
    witness_ok = all((ep.is_trivial(int(table.masks[i])) is not None) == bool(flags[i]) for i in picks)
    return len(mismatches) == 0 and witness_ok, f"{len(mismatches)} masks violate eps=0 <=> trivial"


def check_orbits(ctx: Context) -> tuple[bool, str]:
    rep = ctx.orbits
    p1 = rep.find(ep.p1_mask())
    ok = (len(rep.orbits) == 20 and rep.total_masks == 13_644
          and rep.size_eps_multiset() == sy.EXPECTED_ORBIT_MULTISET
          and (p1.size, p1.eps) == (1440, 1))
    return ok, f"{len(rep.orbits)} orbits, total {rep.total_masks}, P1 orbit size {p1.size} eps {p1.eps}"


def check_dims(ctx: Context) -> tuple[bool, str]:
    expected = {0: (1, None), 1: (1, None), 2: (1, None), 3: (2, None),
                4: (11, [0, 3, 5, 3, 0]), 5: (62, [0] * 4 + [15, 32, 15] + [0] * 4)}
    lines = []
    ok = True
    for n, (tot, split) in expected.items():
        r = ra.dimension(n, oracle=(n == 4), seed=ctx.seed)
        good = r.total == tot and (split is None or r.split() == split)
        ok &= good
        lines.append(f"n={n}:{r.total}")
    r6 = ra.dimension(6, samples=1000, seed=ctx.seed)
    ev = {b.p: b.evidence for b in r6.blocks}
    ok &= r6.total == 1 and all(ev[p] == "rank" for p in (9, 10, 11))
    ok &= all(ev[p] == "reduction-lemma" for p in range(12, 21)) and all(ev[p] == "symmetry" for p in range(9))
    lines.append(f"n=6:{r6.total}")
    return bool(ok), " ".join(lines)


def _random_T(rng: random.Random, det: int) -> list[list[int]]:
    """Integer 2x2 matrix with the given determinant (any det for the singular case)."""
    if det == 0:
        u = [rng.randint(-5, 5) for _ in range(2)]
        v = [rng.randint(-5, 5) for _ in range(2)]
        return [[u[0] * v[0], u[0] * v[1]], [u[1] * v[0], u[1] * v[1]]]
    m = [[det, 0], [0, 1]]
    for _ in range(3):  # mix by unimodular shears, which keep the determinant
        k = rng.randint(-3, 3)
        m = [[m[0][0] + k * m[1][0], m[0][1] + k * m[1][1]], m[1]]
        k = rng.randint(-3, 3)
        m = [m[0], [m[1][0] + k * m[0][0], m[1][1] + k * m[0][1]]]
    return m


def check_det(ctx: Context) -> tuple[bool, str]:
    eps = ctx.table.support()
    rng = ctx.rng("det")
    k = ctx.configs
    fails = []
    for q in cb.quads(6):  # (a)
        if any(dt.det_sum(dt.degenerate_config(q, rng), eps) != 0 for _ in range(k)):
            fails.append(f"vanishing {q}")
    for _ in range(k):  # (b)
        c = dt.random_config(rng)
        f = cb.face_unrank(rng.randrange(20), 6)
        a, b = Fraction(rng.randint(-9, 9), rng.randint(1, 7)), Fraction(rng.randint(-9, 9), rng.randint(1, 7))
        u, w = dt.random_vector(rng), dt.random_vector(rng)
        lhs = dt.det_sum(c.replace(f, (a * u[0] + b * w[0], a * u[1] + b * w[1])), eps)
        if lhs != a * dt.det_sum(c.replace(f, u), eps) + b * dt.det_sum(c.replace(f, w), eps):
            fails.append("multilinearity")
            break
    gens = [cb.transposition(i, i + 1, 6).perm for i in range(1, 6)] + [(2, 3, 4, 5, 6, 1)]
    for i in range(k):  # (c)
        c = dt.random_config(rng)
        sigma = gens[i] if i < len(gens) else tuple(rng.sample(range(1, 7), 6))
        if dt.det_sum(dt.transform_perm(c, sigma), eps) != dt.det_sum(c, eps):
            fails.append(f"S6 invariance {sigma}")
            break
    dets = [0, -1, 5]
    for i in range(k):  # (d)
        c = dt.random_config(rng)
        T = _random_T(rng, dets[i % 3])
        if dt.det_sum(dt.transform_gl2(c, T), eps) != dt.det2(T) ** 10 * dt.det_sum(c, eps):
            fails.append(f"GL2 covariance det={dt.det2(T)}")
            break
    p1 = dt.det_sum(dt.basis_config(ep.p1_mask()), eps)  # (e)
    if p1 != 1:
        fails.append(f"det(omega_P1)={p1}")
    return not fails, "all properties hold" if not fails else "failed: " + ", ".join(fails)


def check_brackets(ctx: Context) -> tuple[bool, str]:
    terms = ctx.terms  # loading enforces 60 terms x 10 factors, each face once per term
    eps = ctx.table.support()
    rng = ctx.rng("brackets")
    fails = []
    if dt.det_bracket(dt.basis_config(ep.p1_mask()), terms) != 1:
        fails.append("B(omega_P1) != 1")
    for _ in range(ctx.configs):
        c = dt.random_config(rng)
        if dt.det_bracket(c, terms) != dt.det_sum(c, eps):
            fails.append("B != det_sum")
            break
    for _ in range(20):
        bad = dt.case_one_failures(dt.degenerate_config((1, 2, 3, 4), rng), terms)
        if bad:
            fails.append(f"case I terms {bad}")
            break
    for _ in range(20):
        bad = dt.case_two_failures(dt.degenerate_config((2, 3, 4, 5), rng), terms)
        if bad:
            fails.append(f"case II rows {bad}")
            break
    return not fails, f"{len(terms)} terms; " + ("all checks hold" if not fails else "; ".join(fails))


def reduction_samples(n: int, count: int, rng: random.Random) -> list[int]:
    """Random generators with exactly C(n-1,2)+1 e1 entries, the fewest the lemma allows."""
    return [ra.random_generator(n, comb(n - 1, 2) + 1, rng) for _ in range(count)]


def check_reduction(ctx: Context, plan: tuple[tuple[int, int], ...] = ((6, 1000), (7, 200))) -> tuple[bool, str]:
    rng = ctx.rng("reduction")
    parts = []
    ok = True
    for n, count in plan:
        lengths = []
        for g in reduction_samples(n, count, rng):
            cert = ra.reduce_generator(g, n)
            if not ra.verify_certificate(cert):
                ok = False
            lengths.append(len(cert))
        parts.append(f"n={n}: {count} certificates, max {max(lengths)} steps")
    return ok, "; ".join(parts)


def check_roundtrip(ctx: Context) -> tuple[bool, str]:
    fails = []
    with tempfile.TemporaryDirectory() as d:
        p = Path(d) / "eps.txt"
        ctx.table.save(p)
        original = p.read_text()
        if ep.EpsilonTable.load(p).dumps() != original:
            fails.append("epsilon table round-trip")
        lines = original.split("\n")
        lines[5] = lines[5][:-1] + ("0" if lines[5][-1] != "0" else "1")
        try:
            ep.EpsilonTable.loads("\n".join(lines))
            fails.append("tampered epsilon table accepted")
        except DigestMismatch:
            pass
        try:
            ep.EpsilonTable.loads(original.replace("\n# sha256", "\n" + lines[3] + "\n# sha256"))
            fails.append("epsilon table with an extra line accepted")
        except DigestMismatch:
            pass
        q = Path(d) / "orbits.txt"
        ctx.orbits.save(q)
        otext = q.read_text()
        if sy.OrbitReport.load(q).dumps() != otext:
            fails.append("orbit report round-trip")
        try:
            sy.OrbitReport.loads(otext.replace(" 1440 ", " 1439 ", 1))
            fails.append("tampered orbit report accepted")
        except DigestMismatch:
            pass
    return not fails, "round-trips byte-identical, tampering rejected" if not fails else "; ".join(fails)


# name -> (criterion number, budget in seconds, check)
CRITERIA: dict[str, tuple[int, float, Callable[[Context], tuple[bool, str]]]] = {
    "counts": (1, 10, check_counts),
    "epsilon": (2, 900, check_epsilon),
    "dichotomy": (3, 300, check_dichotomy),
    "orbits": (4, 600, check_orbits),
    "dims": (5, 3600, check_dims),
    "det": (6, 120, check_det),
    "brackets": (7, 120, check_brackets),
    "reduction": (8, 300, check_reduction),
    "roundtrip": (9, 120, check_roundtrip),
}


def run(name: str, ctx: Context) -> Outcome:
    _, budget, fn = CRITERIA[name]
    return _timed(budget, fn, ctx)


def run_all(ctx: Context, names=None, echo: Callable[[str], None] | None = print) -> dict[str, Outcome]:
    out = {}
    for name in names or CRITERIA:
        res = run(name, ctx)
        out[name] = res
        if echo:
            echo(format_line(name, res))
    return out


def format_line(name: str, res: Outcome) -> str:
    num = CRITERIA[name][0]
    return f"[{'PASS' if res.ok else 'FAIL'}] criterion {num} ({name}): {res.detail}"
