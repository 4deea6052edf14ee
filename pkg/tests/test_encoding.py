import random
import string

import pytest
from hypothesis import given, strategies as st

from gazemine.encoding import (
    EncodedSequence,
    RleSequence,
    RleUnit,
    encode_path,
    parse_rle,
    project_to_level,
    rle_encode,
    rle_expand,
    to_transition_string,
)
from gazemine.model import BLANK_CHAR, GazePoint, Rect, ScanPath, flat_tree, make_group

from helpers import random_tree


@pytest.fixture
def ab_tree():
    return flat_tree([Rect(0, 0, 10, 10), Rect(20, 0, 10, 10)])


def _path(points):
    return ScanPath("P1", tuple(GazePoint(x, y, t) for t, (x, y) in enumerate(points)))


def test_encode_path_basic(ab_tree):
    seq = encode_path(_path([(5, 5), (5, 6), (25, 5), (50, 50)]), ab_tree)
    assert seq.chars == "AAB" + BLANK_CHAR


def test_encode_empty_path(ab_tree):
    assert encode_path(_path([]), ab_tree).chars == ""


def test_encode_uniform(ab_tree):
    seq = encode_path(_path([(1, 1)] * 5), ab_tree)
    assert seq.chars == "AAAAA"


def test_rle_encode_maximal_runs():
    rle = rle_encode(EncodedSequence("P1", "AAABBA"))
    assert rle.units == (RleUnit("A", 3), RleUnit("B", 2), RleUnit("A", 1))
    assert rle.render() == "A3B2A"


def test_rle_empty():
    assert rle_encode(EncodedSequence("P1", "")).render() == ""
    assert rle_expand(RleSequence("P1", ())).chars == ""


def test_rle_all_singletons():
    assert rle_encode(EncodedSequence("P1", "ABAB")).render() == "ABAB"


def test_rle_expand_inverse():
    assert rle_expand(parse_rle("A3B2A")).chars == "AAABBA"


def test_rle_expand_multidigit():
    assert rle_expand(parse_rle("Z10")).chars == "Z" * 10


def test_rle_expand_rejects_bad_length():
    with pytest.raises(ValueError):
        rle_expand(RleSequence("P1", (RleUnit("A", 0),)))


@given(st.text(alphabet=string.ascii_uppercase[:12], max_size=300))
def test_round_trip_property(s):
    seq = EncodedSequence("P", s)
    assert rle_expand(rle_encode(seq)).chars == s


@given(st.text(alphabet=string.ascii_uppercase[:8], max_size=200))
def test_no_adjacent_equal_units_and_reparse(s):
    rle = rle_encode(EncodedSequence("P", s))
    assert all(a.char != b.char for a, b in zip(rle.units, rle.units[1:]))
    assert parse_rle(rle.render()).units == rle.units


def test_project_merges_group_runs():
    tree = flat_tree([Rect(0, 0, 10, 10), Rect(20, 0, 10, 10), Rect(0, 20, 5, 5)])
    grouped = make_group(tree, [1, 2])  # A and B tie on area; A wins the group char
    projected = project_to_level(parse_rle("A2B3C"), grouped, 1)
    assert projected.render() == "A5C"


def test_project_identity_at_depth(ab_tree):
    rle = parse_rle("A2B3A")
    assert project_to_level(rle, ab_tree, ab_tree.depth).units == rle.units


def test_project_all_in_one_group_leaves_blank_and_one_char():
    tree = flat_tree([Rect(0, 0, 10, 10), Rect(20, 0, 10, 10), Rect(40, 0, 12, 10)])
    grouped = make_group(tree, [1, 2, 3])
    projected = project_to_level(parse_rle(f"A2{BLANK_CHAR}3B2C5"), grouped, 1)
    assert set(u.char for u in projected.units) <= {"C", BLANK_CHAR}


def test_projection_composes():
    rng = random.Random(23)
    for _ in range(50):
        tree = random_tree(rng, rng.randint(2, 10))
        depth = max(tree.depth, 1)
        chars = [n.char for n in tree.leaves()] + [BLANK_CHAR]
        raw = "".join(rng.choice(chars) * rng.randint(1, 4) for _ in range(30))
        rle = rle_encode(EncodedSequence("P", raw))
        k = rng.randint(1, depth)
        k2 = rng.randint(1, k)
        via = project_to_level(project_to_level(rle, tree, k), tree, k2)
        direct = project_to_level(rle, tree, k2)
        assert via.units == direct.units


def test_transition_blank_removal():
    assert to_transition_string(parse_rle(f"A3{BLANK_CHAR}2B2"), tau=1) == "AB"


def test_transition_threshold_and_merge():
    assert to_transition_string(parse_rle("A3B1A4"), tau=2) == "A"


def test_transition_all_blank():
    assert to_transition_string(parse_rle(f"{BLANK_CHAR}9"), tau=1) == ""


def test_transition_rejects_bad_tau():
    with pytest.raises(ValueError):
        to_transition_string(parse_rle("A3"), tau=0)


def test_transition_no_blank_no_duplicates_monotone():
    rng = random.Random(9)
    alphabet = "ABCD" + BLANK_CHAR
    for _ in range(100):
        raw = "".join(rng.choice(alphabet) * rng.randint(1, 8) for _ in range(20))
        rle = rle_encode(EncodedSequence("P", raw))
        previous = None
        for tau in (1, 2, 4, 8, 100):
            s = to_transition_string(rle, tau)
            assert BLANK_CHAR not in s
            assert all(a != b for a, b in zip(s, s[1:]))
            if previous is not None:
                assert len(s) <= len(previous)
            previous = s


def test_encode_path_uses_leaf_rects_under_groups():
    tree = flat_tree([Rect(0, 0, 10, 10), Rect(20, 0, 10, 10)])
    grouped = make_group(tree, [1, 2])
    seq = encode_path(_path([(5, 5), (25, 5), (50, 50)]), grouped)
    # encoding always happens at leaf granularity; levels come later
    assert seq.chars == "AB" + BLANK_CHAR
    projected = project_to_level(rle_encode(seq), grouped, 1)
    assert projected.render() == "A2" + BLANK_CHAR


def test_parse_rle_merges_handwritten_duplicates():
    rle = parse_rle("A2A3B")
    assert rle.units == (RleUnit("A", 5), RleUnit("B", 1))


def test_parse_rle_rejects_garbage():
    with pytest.raises(ValueError):
        parse_rle("3A")


def test_parse_rle_rejects_zero_count():
    with pytest.raises(ValueError):
        parse_rle("A0")
