from __future__ import annotations

import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperdet import combinat as cb
from hyperdet.errors import InvalidFaceError, UnsupportedGradeError


@pytest.mark.parametrize("face,rank", [((1, 2, 3), 0), ((4, 5, 6), 19), ((1, 3, 4), 4)])
def test_face_rank_examples(face, rank):
    assert cb.face_rank(face, 6) == rank
    assert cb.face_unrank(rank, 6) == face


def test_face_rank_ignores_vertex_order():
    assert cb.face_rank((4, 1, 3), 6) == cb.face_rank((1, 3, 4), 6)


@pytest.mark.parametrize("bad", [(0, 1, 2), (1, 2, 7), (1, 1, 2), (1, 2)])
def test_invalid_faces(bad):
    with pytest.raises(InvalidFaceError):
        cb.face_rank(bad, 6)


@pytest.mark.parametrize("n", range(3, 10))
def test_rank_bijection(n):
    ranks = [cb.face_rank(f, n) for f in itertools.combinations(range(1, n + 1), 3)]
    assert ranks == list(range(comb(n, 3)))
    assert all(cb.face_rank(cb.face_unrank(r, n), n) == r for r in ranks)


def test_hex_round_trip_and_width():
    m = cb.mask_from_faces([(1, 2, 3), (4, 5, 6)], 6)
    assert cb.mask_to_hex(m, 6) == "80001"
    assert cb.mask_from_hex("80001", 6) == m
    with pytest.raises(ValueError):
        cb.mask_from_hex("0080001", 6)


perms6 = st.permutations(range(1, 7)).map(tuple)
elements = st.builds(cb.GroupElement, perms6, st.booleans())
masks20 = st.integers(0, (1 << 20) - 1)


def test_act_examples():
    m = cb.homogeneous_masks(6)[12345]
    assert cb.act(cb.GroupElement.identity(6), int(m)) == m
    comp = cb.act(cb.GroupElement(tuple(range(1, 7)), True), int(m))
    assert comp == cb.full_mask(6) ^ int(m) and cb.popcount(comp) == 10
    t = cb.transposition(1, 2, 6)
    assert cb.act(t, cb.face_bit((1, 3, 4), 6)) == cb.face_bit((2, 3, 4), 6)


@given(elements, elements, masks20)
def test_act_is_an_action(g, h, m):
    assert cb.act(g * h, m) == cb.act(g, cb.act(h, m))
    assert cb.act(g.inverse(), cb.act(g, m)) == m


@given(elements, masks20)
def test_act_popcount(g, m):
    expected = 20 - cb.popcount(m) if g.swap else cb.popcount(m)
    assert cb.popcount(cb.act(g, m)) == expected


@given(elements, elements)
def test_group_law(g, h):
    k = g * h
    assert k.swap == (g.swap ^ h.swap)
    assert all(k(i) == g(h(i)) for i in range(1, 7))
    assert g * cb.GroupElement.identity(6) == g


@given(perms6, st.lists(masks20, min_size=1, max_size=50))
def test_act_many_matches_act(perm, masks):
    fp = np.array(cb.face_permutation(perm))
    for swap in (False, True):
        got = cb.act_many(fp, np.array(masks), swap, 6).tolist()
        assert got == [cb.act(cb.GroupElement(perm, swap), m) for m in masks]


def test_enumerate_homogeneous():
    ms = list(cb.enumerate_homogeneous(6))
    assert len(ms) == 184_756
    assert ms[0] == (1 << 10) - 1
    assert ms == sorted(set(ms))
    assert np.array_equal(np.array(ms), cb.homogeneous_masks(6))
    assert len(list(cb.enumerate_homogeneous(4))) == 6


def test_odd_face_count_rejected():
    with pytest.raises(UnsupportedGradeError):
        next(cb.enumerate_homogeneous(7))


@settings(max_examples=25, deadline=None)
@given(elements)
def test_homogeneous_set_closed_under_action(g):
    h = cb.homogeneous_masks(6)
    image = cb.act_many(np.array(cb.face_permutation(g.perm)), h, g.swap, 6)
    assert np.array_equal(np.sort(image), h)


def test_group_elements_count():
    gs = list(cb.group_elements(4))
    assert len(gs) == 48 and len(set(gs)) == 48


def test_quad_faces():
    assert cb.quad_faces((1, 2, 3, 4)) == ((1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4))
    assert cb.popcount(cb.quad_mask((2, 3, 5, 6), 6)) == 4
    with pytest.raises(InvalidFaceError):
        cb.quad_mask((1, 1, 2, 3), 6)
