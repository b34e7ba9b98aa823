import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goodpants import lattice as lat
from goodpants import moebius as mb
from goodpants import synthetic as sy


words = st.lists(
    st.sampled_from([1, -1, 2, -2, 3, -3]), min_size=1, max_size=12
).map(tuple)


@given(words, st.integers(min_value=0, max_value=11))
@settings(max_examples=500, deadline=None)
def test_canonical_form_rotation_invariant(word, k):
    reduced = lat.reduce_word(word)
    if not reduced:
        return
    k %= len(reduced)
    rotated = reduced[k:] + reduced[:k]
    assert lat.canonical_form(reduced) == lat.canonical_form(rotated)


@given(words)
@settings(max_examples=200, deadline=None)
def test_canonical_form_stable_under_conjugation(word):
    conjugated = (3,) + tuple(word) + (-3,)
    assert lat.canonical_form(word) == lat.canonical_form(conjugated)


def test_canonical_form_examples():
    assert lat.canonical_form((1, 2, -1)) == lat.canonical_form((2,))
    forms = {lat.canonical_form(w) for w in [(1, 2, 3), (2, 3, 1), (3, 1, 2)]}
    assert len(forms) == 1


def test_primitivity():
    assert lat.is_primitive((1, 2))
    assert not lat.is_primitive((1, 2, 1, 2))
    assert not lat.is_primitive((1, 1, 1))


def test_single_generator_enumeration():
    pres = lat.GroupPresentation((mb.translation(4.0),))
    classes = lat.enumerate_conjugacy_classes(pres, 3, R=2.0, eps=0.1)
    assert [c.canonical_word for c in classes] == [(-1,), (1,)]
    for c in classes:
        assert abs(c.length - 4.0) < 1e-12


def _brute_classes(pres, max_len, R, eps):
    n = len(pres.generators)
    letters = [i for i in range(-n, n + 1) if i != 0]
    frontier = [()]
    found = set()
    for _ in range(max_len):
        new = []
        for w in frontier:
            for letter in letters:
                if w and letter == -w[-1]:
                    continue
                new.append(w + (letter,))
        for w in new:
            g = pres.element(w)
            try:
                ell = mb.complex_translation_length(g)
            except mb.NotLoxodromic:
                continue
            if lat.in_window(ell, R, eps) and lat.is_primitive(w):
                found.add(lat.canonical_form(w))
        frontier = new
    return sorted(found, key=lambda w: (len(w), w))


def test_schottky_enumeration_matches_brute_force():
    pres = sy.schottky_pair(4.0, 4.02)
    classes = lat.enumerate_conjugacy_classes(pres, 3, R=2.0, eps=0.05)
    got = [c.canonical_word for c in classes]
    assert got == _brute_classes(pres, 3, 2.0, 0.05)
    assert got == [(-2,), (-1,), (1,), (2,)]


def test_trace_matches_length():
    pres = sy.schottky_pair(4.0, 4.02)
    for c in lat.enumerate_conjugacy_classes(pres, 4, R=2.0, eps=0.5):
        expected = 2.0 * cmath_cosh_abs(c.length / 2.0)
        assert abs(abs(c.representative.trace) - expected) < 1e-8


def cmath_cosh_abs(z):
    import cmath

    return abs(cmath.cosh(z))


def test_enumeration_monotone_in_word_length():
    pres = sy.schottky_pair(4.0, 4.02)
    small = {c.canonical_word for c in
             lat.enumerate_conjugacy_classes(pres, 3, 2.0, 0.05)}
    large = {c.canonical_word for c in
             lat.enumerate_conjugacy_classes(pres, 4, 2.0, 0.05)}
    assert small <= large


def test_parallel_matches_serial():
    pres = sy.demo_presentation(2.0)
    serial = lat.enumerate_conjugacy_classes(pres, 3, 2.0, 0.3)
    parallel = lat.enumerate_conjugacy_classes(pres, 3, 2.0, 0.3, workers=4)
    assert [c.canonical_word for c in serial] == [c.canonical_word for c in parallel]


def test_empty_window():
    pres = lat.GroupPresentation((mb.GroupElement.identity(),))
    with pytest.raises(lat.EmptyWindow):
        lat.enumerate_conjugacy_classes(pres, 3, R=2.0, eps=0.1)


def test_group_file_round_trip(tmp_path):
    pres = sy.schottky_pair(4.0, 4.02)
    path = tmp_path / "group.txt"
    lat.write_group_file(path, pres)
    again = lat.read_group_file(path)
    for g, h in zip(pres.generators, again.generators):
        assert g.is_close(h, 1e-15)


def test_group_file_rejects_bad_determinant(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 0 0 0 0 0 2 0\n")
    with pytest.raises(ValueError):
        lat.read_group_file(path)


def test_trace_collisions_exclude_inverse_pairs():
    pres = sy.schottky_pair(4.0, 4.0)
    classes = lat.enumerate_conjugacy_classes(pres, 2, 2.0, 0.05)
    # a and b have identical traces here but are not inverses: flagged
    report = lat.trace_collision_report(classes)
    assert report, "equal-length distinct generators should collide"
    pres2 = lat.GroupPresentation((mb.translation(4.0),))
    classes2 = lat.enumerate_conjugacy_classes(pres2, 2, 2.0, 0.1)
    assert lat.trace_collision_report(classes2) == []
