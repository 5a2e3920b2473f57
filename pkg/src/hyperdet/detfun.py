"""Exact evaluation of det^{S3} on twenty vectors of a 2-dimensional space.

Two independent evaluators:

* :func:`det_sum` sums, over the partitions with nonzero sign, the sign times
  the monomial taking alpha on H1 faces and beta on H2 faces;
* :func:`det_bracket` evaluates a 60-term sum of products of ten 2x2
  brackets ``[u, v] = u1*v2 - u2*v1``, read from ``data/brackets.txt``.

Vectors are exact :class:`fractions.Fraction` pairs.  Both evaluators clear
denominators per face first, so the inner loops run on Python integers.
"""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from math import lcm, prod
from pathlib import Path
from typing import Mapping, Sequence

from . import combinat as cb
from .errors import ConfigError, MalformedTableError

N = 6
NF = 20
Vec = tuple[Fraction, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


@dataclass(frozen=True)
class TensorConfig:
    """One exact 2-vector per face of K_n^3, stored in face-rank order."""

    n: int
    vectors: tuple[Vec, ...]

    def __post_init__(self):
        if len(self.vectors) != cb.num_faces(self.n):
            raise ConfigError(f"expected {cb.num_faces(self.n)} face vectors, got {len(self.vectors)}")
        for v in self.vectors:
            if len(v) != 2 or not all(isinstance(x, Fraction) for x in v):
                raise ConfigError(f"malformed vector {v!r}")

    @classmethod
    def from_mapping(cls, entries: Mapping, n: int = N) -> "TensorConfig":
        """Build from ``{face: (alpha, beta)}``; faces may be triples or ``"i,j,k"`` strings."""
        vecs: list[Vec | None] = [None] * cb.num_faces(n)
        for key, val in entries.items():
            face = tuple(int(t) for t in key.split(",")) if isinstance(key, str) else tuple(key)
            try:
                r = cb.face_rank(face, n)
            except (ValueError, KeyError) as exc:
                raise ConfigError(f"bad face key {key!r}") from exc
            if vecs[r] is not None:
                raise ConfigError(f"face {face} given twice")
            a, b = val
            vecs[r] = (_frac(a), _frac(b))
        missing = [cb.face_unrank(r, n) for r, v in enumerate(vecs) if v is None]
        if missing:
            raise ConfigError(f"missing faces: {missing}")
        return cls(n, tuple(vecs))  # type: ignore[arg-type]

    def __getitem__(self, face: Sequence[int]) -> Vec:
        return self.vectors[cb.face_rank(face, self.n)]

    def replace(self, face: Sequence[int], vec: Sequence) -> "TensorConfig":
        vs = list(self.vectors)
        vs[cb.face_rank(face, self.n)] = (_frac(vec[0]), _frac(vec[1]))
        return TensorConfig(self.n, tuple(vs))

    def to_json(self) -> str:
        entries = {
            ",".join(map(str, f)): [f"{a.numerator}/{a.denominator}", f"{b.numerator}/{b.denominator}"]
            for f, (a, b) in zip(cb.faces(self.n), self.vectors)
        }
        return json.dumps({"n": self.n, "entries": entries}, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "TensorConfig":
        try:
            obj = json.loads(text)
            n = int(obj["n"])
            entries = obj["entries"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"not a tensor config: {exc}") from exc
        for key in entries:
            parts = key.split(",")
            if len(parts) != 3 or [int(p) for p in parts] != sorted(int(p) for p in parts):
                raise ConfigError(f"key {key!r} is not a sorted triple 'i,j,k'")
        return cls.from_mapping(entries, n)

    @classmethod
    def load(cls, path: str | Path) -> "TensorConfig":
        return cls.from_json(Path(path).read_text())


def basis_config(mask: int, n: int = N) -> TensorConfig:
    """The generator of ``mask``: e1 on H1 faces, e2 on the others."""
    one, zero = Fraction(1), Fraction(0)
    return TensorConfig(n, tuple((one, zero) if mask >> r & 1 else (zero, one) for r in range(cb.num_faces(n))))


def random_vector(rng: random.Random) -> Vec:
    return (Fraction(rng.randint(-9, 9), rng.randint(1, 7)), Fraction(rng.randint(-9, 9), rng.randint(1, 7)))


def random_config(rng: random.Random, n: int = N) -> TensorConfig:
    """Numerators uniform in [-9, 9], denominators in [1, 7]."""
    return TensorConfig(n, tuple(random_vector(rng) for _ in range(cb.num_faces(n))))


def degenerate_config(quad: Sequence[int], rng: random.Random, n: int = N) -> TensorConfig:
    """Random configuration whose four faces on ``quad`` share one random vector."""
    c = random_config(rng, n)
    v = random_vector(rng)
    for f in cb.quad_faces(sorted(quad)):
        c = c.replace(f, v)
    return c


def _scaled(c: TensorConfig) -> tuple[list[int], list[int], int]:
    """Integer vectors ``L_f * v_f`` and the product of the scales ``L_f``."""
    al, be, scale = [], [], 1
    for a, b in c.vectors:
        L = lcm(a.denominator, b.denominator)
        al.append(int(a * L))
        be.append(int(b * L))
        scale *= L
    return al, be, scale


def _support(eps) -> dict[int, int]:
    if hasattr(eps, "support"):
        return eps.support()
    return {int(m): int(v) for m, v in dict(eps).items() if v}


def monomial(c: TensorConfig, mask: int) -> Fraction:
    """Product of alpha over H1 faces and beta over H2 faces."""
    return prod((a if mask >> r & 1 else b for r, (a, b) in enumerate(c.vectors)), start=Fraction(1))


def _half_products(vals_on: list[int], vals_off: list[int]) -> list[int]:
    # products over a 10-face half for all 1024 bit patterns
    out = [1]
    for a, b in zip(vals_on, vals_off):
        out = [x * b for x in out] + [x * a for x in out]
    return out


def det_sum(c: TensorConfig, eps) -> Fraction:
    """Sum of ``eps(m) * monomial(c, m)`` over the support of ``eps`` (an EpsilonTable or mapping)."""
    if c.n != N:
        raise ConfigError("det_sum is defined for n = 6")
    al, be, scale = _scaled(c)
    lo = _half_products(al[:10], be[:10])
    hi = _half_products(al[10:], be[10:])
    total = 0
    for m, e in _support(eps).items():
        total += e * lo[m & 1023] * hi[m >> 10]
    return Fraction(total, scale)


@dataclass(frozen=True)
class BracketTerm:
    sign: int
    factors: tuple[tuple[int, int], ...]  # face ranks (a, b) of each bracket [v_a, v_b]

    def value(self, c: TensorConfig) -> Fraction:
        v = Fraction(self.sign)
        for a, b in self.factors:
            (a1, a2), (b1, b2) = c.vectors[a], c.vectors[b]
            v *= a1 * b2 - a2 * b1
        return v


def _check_term(t: BracketTerm, k: int) -> None:
    if t.sign not in (1, -1):
        raise MalformedTableError(f"term {k}: sign {t.sign} is not +1 or -1")
    if len(t.factors) != 10:
        raise MalformedTableError(f"term {k}: {len(t.factors)} factors, expected 10")
    used = sorted(r for ab in t.factors for r in ab)
    if used != list(range(NF)):
        raise MalformedTableError(f"term {k}: faces do not each occur exactly once")


def parse_brackets(text: str) -> list[BracketTerm]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[-1].startswith("# sha256="):
        raise MalformedTableError("bracket file has no digest line")
    records = [ln for ln in lines[:-1] if not ln.startswith("#")]
    body = "".join(ln + "\n" for ln in records)
    if hashlib.sha256(body.encode()).hexdigest() != lines[-1][len("# sha256="):]:
        raise MalformedTableError("bracket file digest does not match")
    terms = []
    for k, ln in enumerate(records, start=1):
        try:
            sign_part, fac_part = ln.split(";", 1)
            sign = int(sign_part.split(":")[1])
            pairs = json.loads(fac_part.split(":", 1)[1])
            factors = tuple(
                (cb.face_rank(tuple(map(int, a.split(","))), N), cb.face_rank(tuple(map(int, b.split(","))), N))
                for a, b in pairs
            )
        except (ValueError, IndexError, TypeError) as exc:
            raise MalformedTableError(f"term {k}: {exc}") from exc
        t = BracketTerm(sign, factors)
        _check_term(t, k)
        terms.append(t)
    if len(terms) != 60:
        raise MalformedTableError(f"{len(terms)} terms, expected 60")
    return terms


def load_brackets(path: str | Path | None = None) -> list[BracketTerm]:
    if path is None:
        text = resources.files("hyperdet").joinpath("data/brackets.txt").read_text()
    else:
        text = Path(path).read_text()
    return parse_brackets(text)


def bracket_terms(c: TensorConfig, terms: Sequence[BracketTerm]) -> list[Fraction]:
    return [t.value(c) for t in terms]


def det_bracket(c: TensorConfig, terms: Sequence[BracketTerm] | None = None) -> Fraction:
    terms = load_brackets() if terms is None else terms
    if c.n != N:
        raise ConfigError("det_bracket is defined for n = 6")
    al, be, scale = _scaled(c)
    total = 0
    for t in terms:
        p = t.sign
        for a, b in t.factors:
            p *= al[a] * be[b] - be[a] * al[b]
        total += p
    # every term uses each face once, so all terms share the scale prod(L_f)
    return Fraction(total, scale)


def transform_gl2(c: TensorConfig, T: Sequence[Sequence]) -> TensorConfig:
    """Apply the 2x2 matrix ``T`` to every face vector."""
    (p, q), (r, s) = [[_frac(x) for x in row] for row in T]
    return TensorConfig(c.n, tuple((p * a + q * b, r * a + s * b) for a, b in c.vectors))


def transform_perm(c: TensorConfig, sigma: Sequence[int]) -> TensorConfig:
    """Relabel vertices: the new vector at ``sigma(F)`` is the old vector at ``F``."""
    fp = cb.face_permutation(tuple(sigma))
    vs: list[Vec | None] = [None] * len(c.vectors)
    for r, target in enumerate(fp):
        vs[target] = c.vectors[r]
    return TensorConfig(c.n, tuple(vs))  # type: ignore[arg-type]


def det2(T: Sequence[Sequence]) -> Fraction:
    (p, q), (r, s) = [[_frac(x) for x in row] for row in T]
    return p * s - q * r


# Case II (quadruple 2,3,4,5 degenerate): term i cancels against term MATCHING[i] (1-based).
CASE_TWO_MATCHING = {
    1: 37, 2: 43, 3: 31, 4: 44, 5: 32, 6: 38, 7: 47, 8: 41, 9: 26, 10: 55,
    11: 25, 12: 56, 13: 45, 14: 35, 15: 28, 16: 57, 17: 27, 18: 58, 19: 39, 20: 33,
    21: 30, 22: 59, 23: 29, 24: 60, 25: 11, 26: 9, 27: 17, 28: 15, 29: 23, 30: 21,
    31: 3, 32: 5, 33: 20, 34: 51, 35: 14, 36: 53, 37: 1, 38: 6, 39: 19, 40: 49,
    41: 8, 42: 54, 43: 2, 44: 4, 45: 13, 46: 50, 47: 7, 48: 52, 49: 40, 50: 46,
    51: 34, 52: 48, 53: 36, 54: 42, 55: 10, 56: 12, 57: 16, 58: 18, 59: 22, 60: 24,
}


def case_one_failures(c: TensorConfig, terms: Sequence[BracketTerm]) -> list[int]:
    """1-based indices of terms that do not vanish individually (expects a (1,2,3,4)-degenerate config)."""
    return [k for k, v in enumerate(bracket_terms(c, terms), start=1) if v != 0]


def case_two_failures(c: TensorConfig, terms: Sequence[BracketTerm]) -> list[int]:
    """1-based indices ``i`` with ``term_i + term_match(i) != 0`` (expects a (2,3,4,5)-degenerate config)."""
    vals = bracket_terms(c, terms)
    return [i for i, j in CASE_TWO_MATCHING.items() if vals[i - 1] + vals[j - 1] != 0]
