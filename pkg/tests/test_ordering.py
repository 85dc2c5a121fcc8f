import itertools
import random

import pytest

from polyzeta.core import Composition, format_composition
from polyzeta.ordering import EQUAL, GREATER, LESS, compare, enumerate_weight, index_of, order_key

W3 = ["3", "2,1"]
W4 = ["4", "3,1", "2,2", "2,1^2"]
W5 = ["5", "4,1", "3,2", "2,3", "3,1^2", "2,2,1", "2,1,2", "2,1^3"]
# weight-6 column 13 of the printed table has a weight-5 misprint; the
# enumeration below carries the consistent value (3,1,1,1) in that slot
W6 = [
    "6", "5,1", "4,2", "3,3", "2,4",
    "4,1^2", "3,2,1", "2,3,1", "3,1,2", "2,1,3", "2,2,2",
    "3,1^3", "2,2,1^2", "2,1,2,1", "2,1^2,2", "2,1^4",
]


@pytest.mark.parametrize("w,table", [(3, W3), (4, W4), (5, W5), (6, W6)])
def test_small_weight_tables(w, table):
    assert [format_composition(c) for c in enumerate_weight(w)] == table


@pytest.mark.parametrize(
    "a,b,rel",
    [
        ((4, 1), (3, 2), LESS),       # depth ties, heights 1 < 2
        ((2, 2, 1), (2, 1, 2), LESS),  # 1-placements (0,1) beat (1,0) revlex
        ((3, 2), (2, 3), LESS),        # a-vectors (3,2) beat (2,3) lex
        ((5,), (2, 1, 1, 1), LESS),    # depth dominates
        ((2, 2), (2, 2), EQUAL),
        ((2, 3), (3, 2), GREATER),
    ],
)
def test_compare(a, b, rel):
    assert compare(Composition(a), Composition(b)) == rel


def test_compare_rejects_unequal_weights():
    with pytest.raises(ValueError, match="different weights"):
        compare(Composition((3,)), Composition((2, 2)))


def test_counts():
    for w in range(2, 13):
        comps = enumerate_weight(w)
        assert len(comps) == 2 ** (w - 2)
        assert len(set(comps)) == len(comps)
    assert len(enumerate_weight(10)) == 256


def test_enumerate_rejects_small_weight():
    with pytest.raises(ValueError):
        enumerate_weight(1)


def test_strictly_increasing():
    for w in range(2, 11):
        comps = enumerate_weight(w)
        keys = [order_key(c) for c in comps]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)  # injective: ties impossible


def test_inductive_structure():
    # bumping the last entry or appending a 1 produces weight w+1, each
    # exactly once, jointly exhausting it
    for w in range(2, 12):
        grown = set()
        for c in enumerate_weight(w):
            for child in (Composition(c[:-1] + (c[-1] + 1,)), Composition(c + (1,))):
                assert child not in grown
                grown.add(child)
        assert grown == set(enumerate_weight(w + 1))


def test_index_of():
    assert index_of(Composition((4,))) == 0
    assert index_of(Composition((2, 1, 1))) == 3
    assert index_of(Composition((2, 1, 2))) == 6
    for w in range(2, 9):
        for i, c in enumerate(enumerate_weight(w)):
            assert index_of(c) == i


def test_total_antisymmetric():
    for w in range(3, 9):
        comps = enumerate_weight(w)
        for c1, c2 in itertools.combinations(comps, 2):
            r = compare(c1, c2)
            assert r in (LESS, GREATER)
            assert compare(c2, c1) == -r
        for c in comps:
            assert compare(c, c) == EQUAL


def test_transitive_small():
    for w in range(3, 7):
        comps = enumerate_weight(w)
        for a, b, c in itertools.permutations(comps, 3):
            if compare(a, b) == LESS and compare(b, c) == LESS:
                assert compare(a, c) == LESS


def test_transitive_sampled():
    rng = random.Random(7)
    for w in (8, 9, 10):
        comps = enumerate_weight(w)
        for _ in range(2000):
            a, b, c = (rng.choice(comps) for _ in range(3))
            if compare(a, b) != GREATER and compare(b, c) != GREATER:
                assert compare(a, c) != GREATER
