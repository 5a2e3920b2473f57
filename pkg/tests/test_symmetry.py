from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperdet import combinat as cb
from hyperdet import epsilon as ep
from hyperdet import symmetry as sy
from hyperdet.errors import DigestMismatch, StructuralFailure

H = cb.homogeneous_masks(6)
homogeneous = st.integers(0, len(H) - 1).map(lambda i: int(H[i]))
elements = st.builds(cb.GroupElement, st.permutations(range(1, 7)).map(tuple), st.booleans())


@pytest.fixture(scope="module")
def report(table):
    return sy.classify_orbits(ep.nontrivial_masks(), table)


@given(homogeneous, elements)
def test_canonical_form(m, g):
    c = sy.canonical_rep(m)
    assert sy.canonical_rep(c) == c
    assert sy.canonical_rep(cb.act(g, m)) == c
    assert c <= m


def test_canonical_matches_brute_force():
    rng = random.Random(0)
    group = list(cb.group_elements(6))
    for m in rng.sample(H.tolist(), 5):
        assert sy.canonical_rep(m) == min(cb.act(g, m) for g in group)


@settings(max_examples=30, deadline=None)
@given(homogeneous)
def test_orbit_stabilizer(m):
    assert sy.orbit_size(m) * sy.stabilizer_order(m) == 1440


def test_p1_orbit():
    assert sy.orbit_size(ep.p1_mask()) == 1440 and sy.stabilizer_order(ep.p1_mask()) == 1


def test_classification(report):
    assert len(report.orbits) == 20
    assert report.total_masks == 13_644
    assert report.size_eps_multiset() == sy.EXPECTED_ORBIT_MULTISET
    assert sorted(o.size for o in report.orbits) == sorted([1440] * 6 + [720] * 3 + [360] * 6 + [240] * 2 + [120, 72, 12])
    assert [o.eps for o in report.orbits if o.size == 12] == [-4]
    assert report.find(ep.p1_mask()) == sy.Orbit(sy.canonical_rep(ep.p1_mask()), 1440, 1)
    keys = [(-o.size, o.rep) for o in report.orbits]
    assert keys == sorted(keys)
    assert all(1440 % o.size == 0 for o in report.orbits)


def test_epsilon_constant_on_all_orbits(table):
    canon = sy.canonical_many(table.masks)
    order = np.lexsort((table.values, canon))
    c, v = canon[order], table.values[order]
    same = c[1:] == c[:-1]
    assert np.all(v[1:][same] == v[:-1][same])


def test_inconsistent_epsilon_detected(table):
    nt = ep.nontrivial_masks()
    fake = dict(zip(table.masks.tolist(), table.values.tolist()))
    g = cb.GroupElement((2, 1, 3, 4, 5, 6))
    fake[cb.act(g, ep.p1_mask())] = -1
    with pytest.raises(StructuralFailure):
        sy.classify_orbits(nt, fake)


def test_report_file(report, tmp_path):
    p = tmp_path / "orbits.txt"
    report.save(p)
    text = p.read_text()
    assert "# orbits 20\n# total 13644\n" in text
    assert sy.OrbitReport.load(p).dumps() == text
    with pytest.raises(DigestMismatch):
        sy.OrbitReport.loads(text.replace(" 1440 1\n", " 1440 -1\n", 1))
