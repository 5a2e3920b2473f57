from __future__ import annotations

import hashlib
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hyperdet import combinat as cb
from hyperdet import detfun as dt
from hyperdet import epsilon as ep
from hyperdet.errors import ConfigError, MalformedTableError

seeds = st.integers(0, 2**32)
fr = st.fractions(min_value=-20, max_value=20, max_denominator=9)
vec = st.tuples(fr, fr)


@pytest.fixture(scope="module")
def eps(table):
    return table.support()


def test_p1_normalisation(eps, terms):
    c = dt.basis_config(ep.p1_mask())
    assert dt.det_sum(c, eps) == 1
    assert dt.det_bracket(c, terms) == 1


def test_basis_configs_give_epsilon(table, eps):
    for m in (int(table.masks[i]) for i in range(0, 184_756, 9973)):
        assert dt.det_sum(dt.basis_config(m), eps) == table[m]


def test_det_sum_matches_monomial_sum(eps):
    c = dt.random_config(random.Random(3))
    naive = sum((e * dt.monomial(c, m) for m, e in eps.items()), Fraction(0))
    assert dt.det_sum(c, eps) == naive


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(cb.quads(6)))
def test_vanishing_on_degenerate_quadruples(eps, terms, seed, quad):
    c = dt.degenerate_config(quad, random.Random(seed))
    assert dt.det_sum(c, eps) == 0
    assert dt.det_bracket(c, terms) == 0


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(0, 19), fr, fr, vec, vec)
def test_multilinearity(eps, seed, r, a, b, u, w):
    c = dt.random_config(random.Random(seed))
    f = cb.face_unrank(r, 6)
    mix = (a * u[0] + b * w[0], a * u[1] + b * w[1])
    assert dt.det_sum(c.replace(f, mix), eps) == a * dt.det_sum(c.replace(f, u), eps) + b * dt.det_sum(c.replace(f, w), eps)


def test_scaling_one_face(eps):
    c = dt.random_config(random.Random(11))
    f = (2, 4, 6)
    v = c[f]
    assert dt.det_sum(c.replace(f, (3 * v[0], 3 * v[1])), eps) == 3 * dt.det_sum(c, eps)


@settings(max_examples=40, deadline=None)
@given(seeds, st.permutations(range(1, 7)).map(tuple))
def test_permutation_invariance(eps, terms, seed, sigma):
    c = dt.random_config(random.Random(seed))
    c2 = dt.transform_perm(c, sigma)
    assert dt.det_sum(c2, eps) == dt.det_sum(c, eps)
    assert dt.det_bracket(c2, terms) == dt.det_bracket(c, terms)


def test_transform_perm_semantics():
    c = dt.random_config(random.Random(2))
    sigma = (2, 3, 1, 4, 6, 5)
    c2 = dt.transform_perm(c, sigma)
    for f in cb.faces(6):
        image = tuple(sigma[v - 1] for v in f)
        assert c2[image] == c[f]
    assert dt.transform_perm(c, tuple(range(1, 7))) == c


@settings(max_examples=40, deadline=None)
@given(seeds, st.lists(st.integers(-4, 4), min_size=4, max_size=4))
def test_gl2_covariance(eps, seed, t):
    T = [t[:2], t[2:]]
    c = dt.random_config(random.Random(seed))
    assert dt.det_sum(dt.transform_gl2(c, T), eps) == dt.det2(T) ** 10 * dt.det_sum(c, eps)


@pytest.mark.parametrize("T,factor", [([[1, 0], [0, 1]], 1), ([[3, 0], [0, 1]], 3**10), ([[0, 1], [1, 0]], 1),
                                      ([[2, 1], [1, 3]], 5**10), ([[1, 2], [2, 4]], 0)])
def test_gl2_examples(eps, T, factor):
    c = dt.random_config(random.Random(5))
    assert dt.det_sum(dt.transform_gl2(c, T), eps) == factor * dt.det_sum(c, eps)
    if factor == 1 and T[0][0] == 1:
        assert dt.transform_gl2(c, T) == c


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_two_evaluators_agree(eps, terms, seed):
    c = dt.random_config(random.Random(seed))
    assert dt.det_bracket(c, terms) == dt.det_sum(c, eps)


def test_bracket_terms_structure(terms):
    assert len(terms) == 60
    for t in terms:
        assert len(t.factors) == 10
        assert sorted(r for ab in t.factors for r in ab) == list(range(20))
        assert t.sign in (1, -1)


def test_bracket_term_one_factors(terms):
    first = [(cb.face_unrank(a, 6), cb.face_unrank(b, 6)) for a, b in terms[0].factors]
    assert first[0] == ((1, 2, 3), (2, 3, 4))
    assert first[1] == ((1, 2, 4), (2, 4, 5))


def test_case_one_and_two(terms):
    rng = random.Random(9)
    for _ in range(10):
        assert dt.case_one_failures(dt.degenerate_config((1, 2, 3, 4), rng), terms) == []
        assert dt.case_two_failures(dt.degenerate_config((2, 3, 4, 5), rng), terms) == []
    c = dt.degenerate_config((2, 3, 4, 5), rng)
    vals = dt.bracket_terms(c, terms)
    assert vals[0] + vals[36] == 0


def test_matching_table_is_an_involution():
    m = dt.CASE_TWO_MATCHING
    assert sorted(m) == list(range(1, 61))
    assert all(m[m[i]] == i and m[i] != i for i in m)


def test_case_two_detects_sign_error(terms):
    flipped = list(terms)
    flipped[36] = dt.BracketTerm(-flipped[36].sign, flipped[36].factors)
    rng = random.Random(4)
    c = dt.degenerate_config((2, 3, 4, 5), rng)
    while dt.bracket_terms(c, terms)[0] == 0:  # a zero vector can kill the pair outright
        c = dt.degenerate_config((2, 3, 4, 5), rng)
    assert set(dt.case_two_failures(c, flipped)) == {1, 37}


def _bracket_file(records):
    body = "".join(r + "\n" for r in records)
    return "# test\n" + body + f"# sha256={hashlib.sha256(body.encode()).hexdigest()}\n"


def _records():
    text = (dt.resources.files("hyperdet") / "data/brackets.txt").read_text()
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def test_bracket_file_validation():
    recs = _records()
    assert len(dt.parse_brackets(_bracket_file(recs))) == 60
    with pytest.raises(MalformedTableError, match="60"):
        dt.parse_brackets(_bracket_file(recs[:-1]))
    sign, fac = recs[0].split(";", 1)
    pairs = json.loads(fac.split(":", 1)[1])
    short = f"{sign}; factors: {json.dumps(pairs[:9])}"
    with pytest.raises(MalformedTableError, match="10"):
        dt.parse_brackets(_bracket_file([short] + recs[1:]))
    pairs[2] = [pairs[2][0], pairs[0][1]]  # a face used twice, another missing
    with pytest.raises(MalformedTableError, match="once"):
        dt.parse_brackets(_bracket_file([f"{sign}; factors: {json.dumps(pairs)}"] + recs[1:]))
    with pytest.raises(MalformedTableError, match="digest"):
        dt.parse_brackets(_bracket_file(recs).replace("+1", "-1", 1))


def test_config_json_round_trip(tmp_path):
    c = dt.random_config(random.Random(1))
    p = tmp_path / "c.json"
    p.write_text(c.to_json())
    assert dt.TensorConfig.load(p) == c
    obj = json.loads(c.to_json())
    assert len(obj["entries"]) == 20 and obj["entries"]["1,2,3"][0].count("/") == 1


def test_config_errors():
    entries = {",".join(map(str, f)): ["1/1", "0/1"] for f in cb.faces(6)}
    dt.TensorConfig.from_json(json.dumps({"n": 6, "entries": entries}))
    missing = dict(entries)
    del missing["4,5,6"]
    with pytest.raises(ConfigError, match="missing"):
        dt.TensorConfig.from_json(json.dumps({"n": 6, "entries": missing}))
    unsorted = dict(missing)
    unsorted["6,5,4"] = ["1", "2"]
    with pytest.raises(ConfigError, match="sorted"):
        dt.TensorConfig.from_json(json.dumps({"n": 6, "entries": unsorted}))
    with pytest.raises(ConfigError):
        dt.TensorConfig.from_json("[1, 2]")
    with pytest.raises(ConfigError):
        dt.TensorConfig(6, ())
