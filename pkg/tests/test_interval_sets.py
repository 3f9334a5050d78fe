import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from karlin_rsm.interval_sets import (
    CapacityError,
    IntervalSet,
    atomize,
    complement,
    intersect,
    lebesgue,
    normalize,
    union,
)

from oracles import grid_bitmap


def test_normalize_merges_overlaps():
    assert normalize([(0.2, 0.5), (0.4, 0.7)]).intervals == ((0.2, 0.7),)


def test_normalize_drops_empty():
    assert normalize([(0.5, 0.5)]).intervals == ()
    assert normalize([(0.7, 0.2)]).intervals == ()


def test_normalize_sorts():
    assert normalize([(0.6, 0.8), (0.1, 0.2)]).intervals == ((0.1, 0.2), (0.6, 0.8))


def test_normalize_idempotent():
    a = normalize([(0.1, 0.3), (0.25, 0.6), (0.8, 0.9)])
    assert normalize(a.intervals).intervals == a.intervals


def test_normalize_rejects_nan():
    with pytest.raises(ValueError):
        normalize([(float("nan"), 0.5)])


def test_union_merges_adjacent():
    assert union(normalize([(0.0, 0.5)]), normalize([(0.5, 1.0)])).intervals == ((0.0, 1.0),)


def test_intersect():
    assert intersect(normalize([(0.0, 0.5)]), normalize([(0.25, 1.0)])).intervals == ((0.25, 0.5),)
    assert intersect(normalize([(0.0, 0.5)]), normalize([])).intervals == ()


def test_carrier_mismatch():
    a = normalize([(0.0, 0.5)])
    b = normalize([(0.0, 0.5)], carrier=(0.0, 2.0))
    with pytest.raises(ValueError):
        union(a, b)


def test_lebesgue():
    assert lebesgue(normalize([(0.2, 0.45)])) == pytest.approx(0.25)
    assert lebesgue(normalize([])) == 0.0
    assert lebesgue(normalize([(0.0, 0.1), (0.9, 1.0)])) == pytest.approx(0.2)


def test_measure_additivity():
    a = normalize([(0.1, 0.4), (0.6, 0.9)])
    b = normalize([(0.3, 0.7)])
    total = lebesgue(union(a, b)) + lebesgue(intersect(a, b))
    assert total == pytest.approx(lebesgue(a) + lebesgue(b), abs=1e-14)


def test_contains_points_half_open():
    a = normalize([(0.2, 0.4), (0.9, 1.0)])
    xs = np.array([0.0, 0.2, 0.3, 0.4, 0.9, 0.95])
    assert a.contains_points(xs).tolist() == [False, True, True, False, True, True]


def test_complement():
    a = normalize([(0.2, 0.4), (0.6, 0.7)])
    assert complement(a).intervals == ((0.0, 0.2), (0.4, 0.6), (0.7, 1.0))
    assert complement(complement(a)).intervals == a.intervals


def test_atomize_example():
    dec = atomize([normalize([(0.0, 0.6)]), normalize([(0.4, 1.0)])])
    assert [a.intervals for a in dec.atoms] == [((0.0, 0.4),), ((0.4, 0.6),), ((0.6, 1.0),)]
    assert dec.membership == ((0, 1), (1, 2))


def test_atomize_single_and_disjoint():
    one = atomize([normalize([(0.1, 0.5)])])
    assert len(one.atoms) == 1 and one.membership == ((0,),)
    two = atomize([normalize([(0.0, 0.2)]), normalize([(0.5, 0.8)])])
    assert len(two.atoms) == 2
    assert two.membership == ((0,), (1,))


def test_atomize_reunion_exact():
    fam = [
        normalize([(0.05, 0.35), (0.5, 0.8)]),
        normalize([(0.2, 0.6)]),
        normalize([(0.55, 0.95)]),
    ]
    dec = atomize(fam)
    for i, s in enumerate(fam):
        parts = [iv for j in dec.membership[i] for iv in dec.atoms[j].intervals]
        assert normalize(parts).intervals == s.intervals


def test_atomize_atom_budget_bound():
    # d single intervals produce at most 2d - 1 atoms
    rng = np.random.default_rng(5)
    for _ in range(50):
        d = int(rng.integers(1, 8))
        fam = []
        for _ in range(d):
            w = rng.uniform(0.05, 0.5)
            lo = rng.uniform(0, 1 - w)
            fam.append(normalize([(lo, lo + w)]))
        assert len(atomize(fam).atoms) <= 2 * d - 1


def test_atomize_capacity():
    fam = [normalize([(i / 50, i / 50 + 0.005)]) for i in range(21)]
    with pytest.raises(CapacityError):
        atomize(fam)


def test_json_round_trip():
    a = normalize([(0.1, 0.2), (0.5, 0.8)], carrier=(0.0, 2.0))
    assert IntervalSet.from_json(a.to_json()) == a
    with pytest.raises(ValueError):
        IntervalSet.from_json({"carrier": [0, 1]})


@st.composite
def interval_sets(draw):
    k = draw(st.integers(min_value=0, max_value=4))
    pairs = []
    for _ in range(k):
        lo = draw(st.floats(min_value=0.0, max_value=0.99))
        hi = draw(st.floats(min_value=lo, max_value=1.0))
        pairs.append((round(lo, 4), round(hi, 4)))  # align to the bitmap grid
    return normalize(pairs)


@given(interval_sets(), interval_sets())
@settings(max_examples=200)
def test_union_commutes(a, b):
    assert union(a, b) == union(b, a)


@given(interval_sets(), interval_sets(), interval_sets())
@settings(max_examples=200)
def test_union_associative(a, b, c):
    assert union(union(a, b), c) == union(a, union(b, c))


@given(interval_sets(), interval_sets())
@settings(max_examples=200)
def test_intersect_commutes(a, b):
    assert intersect(a, b) == intersect(b, a)


def test_algebra_against_bitmap_oracle():
    # randomized algebra, endpoints on the 1e-4 grid so midpoints decide exactly
    rng = np.random.default_rng(101)
    cells = 10 ** 4
    for _ in range(10 ** 4):
        raw_a = [tuple(sorted(np.round(rng.uniform(0, 1, 2), 4))) for _ in range(rng.integers(0, 4))]
        raw_b = [tuple(sorted(np.round(rng.uniform(0, 1, 2), 4))) for _ in range(rng.integers(0, 4))]
        a, b = normalize(raw_a), normalize(raw_b)
        bm_a, bm_b = grid_bitmap(a.intervals, cells), grid_bitmap(b.intervals, cells)
        assert np.array_equal(grid_bitmap(union(a, b).intervals, cells), bm_a | bm_b)
        assert np.array_equal(grid_bitmap(intersect(a, b).intervals, cells), bm_a & bm_b)
        assert abs(lebesgue(a) - bm_a.mean()) < 1e-12
