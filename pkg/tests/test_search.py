import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centered_bound import closed_forms, search
from centered_bound.errors import InvalidArity, MissingCatalog
from centered_bound.hypgeom import a_m, triangle_area
from centered_bound.oracle import exhaustive_minimize
from centered_bound.search import (
    BoundQuery,
    crawl_batch,
    crawl_plan,
    flat_bound,
    minimize,
    reduced_assignments,
    treecrawler,
)
from centered_bound.trees import automorphisms, decode, enumerate_trees

ONE_EDGE = decode((1,))
SINGLE = decode(())


def trunc3(x):
    return math.floor(x * 1000) / 1000


def test_one_edge_unit_bounds():
    assert treecrawler(ONE_EDGE, [1, 1, 1, 1]) == pytest.approx(2 * math.pi / 3, abs=1e-12)


@pytest.mark.parametrize("x", [math.sqrt(3) + 1e-9, 2.0, 3.0, 10.0])
def test_one_edge_big_entry_at_root(x):
    expected = 2 * math.asin(0.5) + 2 * math.asin(1 / math.sqrt(3))
    assert treecrawler(ONE_EDGE, [1, x, 1, 1]) == pytest.approx(expected, abs=1e-12)
    assert trunc3(expected) == 2.278


def test_one_edge_big_entry_at_leaf_vertex():
    x = 0.5
    assert treecrawler(ONE_EDGE, [1, 1, 1, x]) == pytest.approx(closed_forms.identity_low(x), abs=1e-12)
    assert treecrawler(ONE_EDGE, [x, 1, 1, 1]) == pytest.approx(closed_forms.sigma_low(x), abs=1e-12)


@pytest.mark.parametrize("s", [0.1, 1.0, 3.0])
def test_single_vertex_is_equilateral(s):
    assert treecrawler(SINGLE, [s, s, s]) == pytest.approx(triangle_area(s, s, s), abs=1e-13)


def test_single_vertex_unit_value_from_angle_defect():
    assert treecrawler(SINGLE, [1, 1, 1]) == pytest.approx(0.9733899101495492, abs=1e-12)


def test_single_vertex_caps_long_side():
    # 5 exceeds the semicyclic radius of (1, 1), so it is capped to sqrt 2
    assert treecrawler(SINGLE, [1, 1, 5]) == pytest.approx(math.pi / 3, abs=1e-12)


def test_arity_mismatch():
    with pytest.raises(InvalidArity):
        treecrawler(ONE_EDGE, [1, 1, 1])
    with pytest.raises(InvalidArity):
        BoundQuery((1.0, 1.0))


@pytest.mark.parametrize("n", range(3, 9))
def test_batch_matches_scalar(n):
    rng = np.random.default_rng(n)
    for code in enumerate_trees(n):
        tree = decode(code)
        vals = rng.uniform(0.05, 8.0, size=(40, n))
        batch = crawl_batch(crawl_plan(tree), vals)
        for row, v in zip(vals, batch):
            assert v == pytest.approx(treecrawler(tree, list(row)), abs=1e-12)


def test_flat_bound_examples():
    assert flat_bound(4, 1.0) == pytest.approx(2 * math.pi / 3, abs=1e-14)
    assert flat_bound(5, 1.0) == pytest.approx(math.pi, abs=1e-14)
    assert flat_bound(3, 2.0) == a_m(2.0)
    with pytest.raises(InvalidArity):
        flat_bound(2, 1.0)


# -- reduced assignments ----------------------------------------------------


def brute_orbit_count(tree):
    """Orbits of (slot swaps, automorphisms) on all n! assignments, by union-find."""
    n = tree.n
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    parent = list(range(len(perms)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    gens = []
    for _, g in tree.slot_groups():
        for a, b in zip(g, g[1:]):
            swap = list(range(n))
            swap[a], swap[b] = b, a
            gens.append(swap)
    hosts = tree.slot_hosts
    for phi in automorphisms(tree)[1:]:
        # send the j-th slot of v to the j-th slot of phi(v)
        first = {}
        for p, v in enumerate(hosts):
            first.setdefault(v, p)
        move = [first[phi[hosts[p]]] + (p - first[hosts[p]]) for p in range(n)]
        gens.append(move)
    for p in perms:
        for g in gens:
            image = [None] * n
            for src, dst in enumerate(g):
                image[dst] = p[src]
            a, b = find(index[p]), find(index[tuple(image)])
            if a != b:
                parent[a] = b
    return len({find(i) for i in range(len(perms))})


def test_one_edge_reps():
    reps = list(reduced_assignments(ONE_EDGE, 4))
    assert len(reps) == 6
    assert reps == sorted(reps)


def test_single_vertex_reps():
    assert list(reduced_assignments(SINGLE, 3)) == [(0, 1, 2)]


def test_path_reps():
    assert len(list(reduced_assignments(decode((1, 2)), 5))) == 30


@pytest.mark.parametrize("n", range(3, 8))
def test_rep_counts_match_brute_orbits(n):
    for code in enumerate_trees(n):
        tree = decode(code)
        assert len(list(reduced_assignments(tree))) == brute_orbit_count(tree)


@pytest.mark.parametrize("n", range(3, 8))
def test_reduced_values_cover_full_values(n):
    rng = random.Random(n)
    bounds = [rng.uniform(0.1, 5.0) for _ in range(n)]
    for code in enumerate_trees(n):
        tree = decode(code)
        full = {round(treecrawler(tree, [bounds[i] for i in p]), 10) for p in itertools.permutations(range(n))}
        red = {round(treecrawler(tree, [bounds[i] for i in p]), 10) for p in reduced_assignments(tree)}
        assert red == full


def test_rep_is_lex_least_of_its_orbit():
    tree = decode((2, 2, 5, 5, 5))
    reps = set(reduced_assignments(tree))
    # every rep sorted within slot groups
    for rep in reps:
        for _, g in tree.slot_groups():
            block = [rep[p] for p in g]
            assert block == sorted(block)


def test_rep_count_rejects_wrong_n():
    with pytest.raises(InvalidArity):
        list(reduced_assignments(ONE_EDGE, 5))


# -- minimize ---------------------------------------------------------------


def test_five_unit_bounds():
    r = minimize(BoundQuery((1.0,) * 5))
    assert trunc3(r.value) == 3.295
    assert r.tree_code == (2, 2)
    assert r.tree_index == 1


def test_nine_unit_bounds():
    r = minimize(BoundQuery((1.0,) * 9))
    assert trunc3(r.value) == 8.441


@pytest.mark.parametrize("x", [0.05, 0.3, 0.5, 0.9, 1.0])
def test_small_fourth_entry_identity_form(x):
    r = minimize(BoundQuery((1.0, 1.0, 1.0, x)))
    assert r.value == pytest.approx(closed_forms.identity_low(x), abs=1e-9)


@pytest.mark.parametrize("x", [1.8, 2.0, 2.5, 5.0])
def test_large_fourth_entry_plateau(x):
    r = minimize(BoundQuery((1.0, 1.0, 1.0, x)))
    assert r.value == pytest.approx(closed_forms.PLATEAU, abs=1e-9)
    assert trunc3(r.value) == 2.278


def test_witness_value_matches_crawler():
    rng = random.Random(11)
    for n in range(3, 8):
        bounds = tuple(rng.uniform(0.1, 4) for _ in range(n))
        r = minimize(BoundQuery(bounds))
        again = treecrawler(decode(r.tree_code), [bounds[i] for i in r.assignment])
        assert again == pytest.approx(r.value, abs=1e-12)


@pytest.mark.parametrize("n", range(3, 8))
def test_reduction_on_off_agree(n):
    rng = random.Random(100 + n)
    for _ in range(5):
        bounds = tuple(rng.uniform(0.1, 6) for _ in range(n))
        on = minimize(BoundQuery(bounds, reduce_symmetry=True))
        off = minimize(BoundQuery(bounds, reduce_symmetry=False))
        assert on.value == pytest.approx(off.value, abs=1e-12)
        assert (on.tree_code, on.assignment) == (off.tree_code, off.assignment)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_agrees_with_exhaustive(n):
    rng = random.Random(7 * n)
    for _ in range(5):
        bounds = tuple(rng.choice([0.5, 1.0, 2.0, rng.uniform(0.1, 5)]) for _ in range(n))
        r = minimize(BoundQuery(bounds))
        ref = exhaustive_minimize(bounds)
        assert r.value == pytest.approx(ref.value, abs=1e-12)
        assert (r.canonical_code, r.assignment) == (ref.canonical_code, ref.assignment)


def test_small_chunks_do_not_change_witness(monkeypatch):
    bounds = (1.0, 1.0, 2.0, 1.0, 1.0, 2.0)
    ref = minimize(BoundQuery(bounds, reduce_symmetry=False))
    monkeypatch.setattr(search, "CHUNK_ROWS", 7)
    search.assignment_matrix.cache_clear()
    r = minimize(BoundQuery(bounds, reduce_symmetry=False))
    assert (r.value, r.tree_code, r.assignment, r.evaluations) == (
        ref.value,
        ref.tree_code,
        ref.assignment,
        ref.evaluations,
    )


def test_parallel_matches_serial():
    bounds = (0.7, 1.3, 2.0, 0.4, 1.1, 3.0, 0.9)
    one = minimize(BoundQuery(bounds), jobs=1)
    two = minimize(BoundQuery(bounds), jobs=2)
    assert one == two


@pytest.mark.parametrize("n", range(3, 9))
def test_evaluation_count_full(n):
    r = minimize(BoundQuery((1.0,) * n, reduce_symmetry=False))
    assert r.evaluations == len(enumerate_trees(n)) * math.factorial(n)


def test_unit_four_counts():
    assert minimize(BoundQuery((1.0,) * 4, reduce_symmetry=False)).evaluations == 24
    assert minimize(BoundQuery((1.0,) * 4)).evaluations == 6


def test_catalog_source_order():
    codes = tuple(reversed(enumerate_trees(6)))
    r = minimize(BoundQuery((1.0,) * 6, trees=codes))
    native = minimize(BoundQuery((1.0,) * 6))
    assert r.value == pytest.approx(native.value, abs=1e-12)
    assert r.tree_code == native.tree_code
    assert codes[r.tree_index] == r.tree_code


def test_catalog_with_noncanonical_code():
    codes = ((1, 2, 3), (1, 3, 3), (2, 2, 3), (3, 3, 3))
    alt = ((1, 2, 3), (2, 3, 3), (2, 2, 3), (3, 3, 3))  # (2,3,3) ~ (1,3,3)
    bounds = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
    a = minimize(BoundQuery(bounds, trees=codes))
    b = minimize(BoundQuery(bounds, trees=alt))
    assert a.value == pytest.approx(b.value, abs=1e-12)
    assert a.canonical_code == b.canonical_code


def test_missing_catalog():
    with pytest.raises(MissingCatalog):
        minimize(BoundQuery((1.0,) * 5, trees=()))
    with pytest.raises(MissingCatalog):
        minimize(BoundQuery((1.0,) * 5, trees=((1,),)))


bound_lists = st.lists(st.floats(min_value=0.05, max_value=8.0), min_size=3, max_size=6)


@settings(max_examples=40, deadline=None)
@given(bound_lists, st.randoms(use_true_random=False))
def test_permutation_invariance(bounds, rnd):
    shuffled = list(bounds)
    rnd.shuffle(shuffled)
    a = minimize(BoundQuery(tuple(bounds))).value
    b = minimize(BoundQuery(tuple(shuffled))).value
    assert a == pytest.approx(b, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(bound_lists, st.data())
def test_monotone_in_bounds(bounds, data):
    bumps = data.draw(st.lists(st.floats(min_value=0.0, max_value=3.0), min_size=len(bounds), max_size=len(bounds)))
    bigger = [b + d for b, d in zip(bounds, bumps)]
    lo = minimize(BoundQuery(tuple(bounds))).value
    hi = minimize(BoundQuery(tuple(bigger))).value
    assert hi >= lo - 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=3, max_value=9), st.data())
def test_same_vertex_swap_invariance(n, data):
    code = data.draw(st.sampled_from(enumerate_trees(n)))
    tree = decode(code)
    vals = data.draw(st.lists(st.floats(min_value=0.05, max_value=8.0), min_size=n, max_size=n))
    ref = treecrawler(tree, vals)
    for _, g in tree.slot_groups():
        for a, b in itertools.combinations(g, 2):
            swapped = list(vals)
            swapped[a], swapped[b] = swapped[b], swapped[a]
            assert treecrawler(tree, swapped) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("n", range(5, 10))
def test_strictly_above_flat_bound(n):
    rng = random.Random(n)
    for _ in range(3):
        d = rng.uniform(0.1, 10)
        assert minimize(BoundQuery((d,) * n)).value > flat_bound(n, d)


def test_equal_to_flat_bound_at_four():
    for d in (0.1, 0.7, 1.0, 4.0):
        assert minimize(BoundQuery((d,) * 4)).value == pytest.approx(flat_bound(4, d), abs=1e-12)


def test_bound_range():
    from centered_bound.errors import DomainError

    with pytest.raises(DomainError):
        BoundQuery((1.0, 1.0, 2 * search.MAX_BOUND))
    with pytest.raises(ValueError):
        BoundQuery((1.0, 1.0, float("nan")))
    r = minimize(BoundQuery((search.MAX_BOUND,) * 5))
    assert r.value == pytest.approx(3 * math.pi, abs=1e-9)
