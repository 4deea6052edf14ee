import random

import pytest

from gazemine.layout import (
    LayoutParams,
    PatternSelection,
    assign_costs,
    assign_hues,
    build_graph,
    count_crossings,
    layout_json_bytes,
    layout_step,
    run_layout,
    swap_pass,
)
from gazemine.model import Rect, flat_tree, make_group

from helpers import crossings_oracle, random_transition_string, random_tree


def square_tree(n, size=100, gap=200):
    return flat_tree([Rect(i * gap, 0, size, size) for i in range(n)])


def inside(node) -> bool:
    r = node.home
    return r.x < node.x < r.x + r.w and r.y < node.y < r.y + r.h


# --- costs -------------------------------------------------------------------

def test_costs_flat_tree():
    tree = square_tree(6)
    costs = assign_costs(tree)
    assert costs[tree.root.id] == 6
    assert all(costs[n.id] == 1 for n in tree.leaves())


def test_costs_nested_group():
    tree = make_group(square_tree(4), [3, 4])
    costs = assign_costs(tree)
    group_id = tree.next_id() - 1
    assert costs[group_id] == 2
    assert costs[tree.root.id] == 4


def test_costs_single_leaf():
    tree = square_tree(1)
    assert assign_costs(tree)[tree.root.id] == 1


def test_costs_root_equals_leaf_count():
    rng = random.Random(61)
    for _ in range(30):
        tree = random_tree(rng, rng.randint(1, 20))
        assert assign_costs(tree)[tree.root.id] == len(tree.leaves())


# --- hues --------------------------------------------------------------------

def test_hues_four_leaves_regular_intervals():
    ca = assign_hues(square_tree(4))
    leaf_hues = sorted(ca.display[n.id] for n in square_tree(4).leaves())
    assert leaf_hues == [0.0, 100.0, 200.0, 300.0]


def test_hues_single_leaf():
    tree = square_tree(1)
    ca = assign_hues(tree)
    assert ca.display[tree.leaves()[0].id] == 0.0


def test_hues_empty_tree_rejected():
    from gazemine.model import empty_tree

    with pytest.raises(ValueError):
        assign_hues(empty_tree())


def test_group_displays_largest_leaf_hue():
    tree = flat_tree([Rect(0, 0, 10, 10), Rect(20, 0, 10, 10), Rect(40, 0, 20, 20)])
    grouped = make_group(tree, [2, 3])  # leaf 3 (C) is largest
    ca = assign_hues(grouped)
    group_id = grouped.next_id() - 1
    leaf_c = next(n for n in grouped.leaves() if n.char == "C")
    assert ca.display[group_id] == ca.display[leaf_c.id]


def test_hues_contiguous_blocks():
    rng = random.Random(67)
    for _ in range(40):
        tree = random_tree(rng, rng.randint(1, 24))
        ca = assign_hues(tree)
        full = list(ca.hues[tree.root.id])
        assert len(set(full)) == len(full)
        for node in tree.nodes():
            slice_ = list(ca.hues[node.id])
            n = len(slice_)
            found = any(full[i:i + n] == slice_ for i in range(len(full) - n + 1))
            assert found, (slice_, full)
            assert len(slice_) == ca.costs[node.id]


def test_level_switch_keeps_hue_in_subtree():
    rng = random.Random(97)
    for _ in range(20):
        tree = random_tree(rng, rng.randint(2, 12))
        ca = assign_hues(tree)
        for node in tree.nodes():
            if not node.is_leaf and node.leaves():
                descendant_hues = {ca.display[n.id] for n in node.leaves()}
                assert ca.display[node.id] in descendant_hues


# --- graph construction ------------------------------------------------------

def test_build_graph_single_pattern():
    tree = square_tree(2)
    g = build_graph([PatternSelection("AB", "AB", 4)], tree, 1)
    assert [n.role for n in g.nodes] == ["start", "end"]
    assert len(g.edges) == 1 and g.edges[0].weight == 4


def test_build_graph_repeated_aoi_distinct_nodes():
    tree = square_tree(2)
    g = build_graph([PatternSelection("ABA", "ABA", 1)], tree, 1)
    assert len(g.nodes) == 3 and len(g.edges) == 2
    assert g.nodes[0].aoi == g.nodes[2].aoi
    assert g.nodes[0].id != g.nodes[2].id


def test_build_graph_parallel_chains():
    tree = square_tree(2)
    g = build_graph([PatternSelection("p1", "AB", 1), PatternSelection("p2", "AB", 2)], tree, 1)
    assert len(g.nodes) == 4 and len(g.edges) == 2


def test_build_graph_unresolvable_char():
    tree = square_tree(2)
    with pytest.raises(ValueError):
        build_graph([PatternSelection("AZ", "AZ", 1)], tree, 1)


def test_build_graph_cross_group_flag():
    tree = make_group(square_tree(3), [1, 2])
    k = tree.depth  # show individual AOIs: A,B (in the group) and C at the root
    g = build_graph([PatternSelection("AB", "AB", 1), PatternSelection("BC", "BC", 1)], tree, k)
    ab, bc = g.edges
    assert not ab.cross_group  # same parent group
    assert bc.cross_group      # group member to root child


def test_build_graph_homes_in_largest_group_leaf():
    tree = flat_tree([Rect(0, 0, 10, 10), Rect(30, 0, 20, 20)])
    grouped = make_group(tree, [1, 2])
    g = build_graph([PatternSelection("B", "B", 1)], grouped, 1)
    assert g.nodes[0].home == Rect(30, 0, 20, 20)


# --- force steps -------------------------------------------------------------

def test_single_node_converges_to_center():
    tree = square_tree(1)
    g = build_graph([PatternSelection("A", "A", 1)], tree, 1, seed=5)
    run_layout(g, LayoutParams(iterations=400, seed=5))
    cx, cy = g.nodes[0].home.center
    assert abs(g.nodes[0].x - cx) < 0.5
    assert abs(g.nodes[0].y - cy) < 0.5


def test_two_repelling_nodes_symmetric_about_center():
    tree = square_tree(1)
    g = build_graph(
        [PatternSelection("p1", "A", 1), PatternSelection("p2", "A", 1)], tree, 1, seed=9
    )
    params = LayoutParams(iterations=3000, seed=9)
    for _ in range(params.iterations):
        layout_step(g, params)
    a, b = g.nodes
    cx, cy = a.home.center
    # numeric fixed point: equal radius, opposite directions
    assert (a.x - cx) == pytest.approx(-(b.x - cx), abs=0.2)
    assert (a.y - cy) == pytest.approx(-(b.y - cy), abs=0.2)
    assert ((a.x - cx) ** 2 + (a.y - cy) ** 2) ** 0.5 > 1.0


def test_clamp_after_large_force():
    tree = square_tree(2)
    g = build_graph([PatternSelection("AB", "AB", 1)], tree, 1)
    g.nodes[0].x = g.nodes[0].home.x + 0.2   # force a near-border position
    layout_step(g, LayoutParams(step=1e6))
    assert all(inside(n) for n in g.nodes)


def test_nodes_stay_inside_through_steps():
    rng = random.Random(101)
    for _ in range(20):
        tree = random_tree(rng, rng.randint(2, 6))
        chars = [n.char for n in tree.leaves()]
        sels = [
            PatternSelection(f"s{i}", random_transition_string(rng, "".join(chars), rng.randint(2, 5)), rng.randint(1, 5))
            for i in range(rng.randint(1, 4))
        ]
        g = build_graph(sels, tree, tree.depth, seed=rng.randint(0, 999))
        params = LayoutParams(iterations=0, seed=1)
        for _ in range(50):
            layout_step(g, params)
            assert all(inside(n) for n in g.nodes)


# --- swap pass ---------------------------------------------------------------

def make_x_crossing():
    """Two chains A->B whose segments cross; all four endpoints swappable."""
    tree = flat_tree([Rect(0, 0, 100, 100), Rect(200, 0, 100, 100)])
    g = build_graph(
        [PatternSelection("p1", "AB", 1), PatternSelection("p2", "AB", 1)], tree, 1, seed=3
    )
    # force an X: chain 1 top-left -> bottom-right, chain 2 bottom-left -> top-right
    g.nodes[0].x, g.nodes[0].y = 10, 10
    g.nodes[1].x, g.nodes[1].y = 290, 90
    g.nodes[2].x, g.nodes[2].y = 10, 90
    g.nodes[3].x, g.nodes[3].y = 290, 10
    return g


def test_swap_resolves_x_crossing():
    g = make_x_crossing()
    assert count_crossings(g) == 1
    swap_pass(g)
    assert count_crossings(g) == 0


def test_swap_no_same_aoi_pair_unchanged():
    # the two chains cross but all four endpoints live in different AOIs
    tree = flat_tree([Rect(0, 0, 100, 100), Rect(200, 0, 100, 100),
                      Rect(0, 200, 100, 100), Rect(200, 200, 100, 100)])
    g = build_graph(
        [PatternSelection("p1", "AD", 1), PatternSelection("p2", "CB", 1)],
        tree, 1, seed=3,
    )
    assert count_crossings(g) == 1
    before = [(n.x, n.y) for n in g.nodes]
    swap_pass(g)
    assert [(n.x, n.y) for n in g.nodes] == before


def test_swap_crossing_free_graph_unchanged():
    tree = square_tree(3)
    g = build_graph([PatternSelection("p", "ABC", 1)], tree, 1, seed=1)
    before = [(n.x, n.y) for n in g.nodes]
    assert count_crossings(g) == 0
    swap_pass(g)
    assert [(n.x, n.y) for n in g.nodes] == before


def test_crossing_count_matches_oracle():
    rng = random.Random(103)
    for _ in range(30):
        tree = random_tree(rng, rng.randint(2, 6))
        chars = "".join(n.char for n in tree.leaves())
        sels = [
            PatternSelection(f"s{i}", random_transition_string(rng, chars, rng.randint(2, 5)), 1)
            for i in range(rng.randint(1, 5))
        ]
        g = build_graph(sels, tree, tree.depth, seed=rng.randint(0, 999))
        for _ in range(5):
            layout_step(g, LayoutParams())
        assert count_crossings(g) == crossings_oracle(g)


def test_swap_never_increases_crossings():
    rng = random.Random(107)
    for _ in range(20):
        tree = random_tree(rng, rng.randint(2, 5))
        chars = "".join(n.char for n in tree.leaves())
        sels = [
            PatternSelection(f"s{i}", random_transition_string(rng, chars, rng.randint(2, 5)), 1)
            for i in range(rng.randint(2, 5))
        ]
        g = build_graph(sels, tree, tree.depth, seed=rng.randint(0, 999))
        for _ in range(10):
            layout_step(g, LayoutParams())
        before = count_crossings(g)
        swap_pass(g)
        assert count_crossings(g) <= before


# --- full runs ---------------------------------------------------------------

def test_run_layout_zero_iterations_still_swaps():
    g = make_x_crossing()
    run_layout(g, LayoutParams(iterations=0))
    assert count_crossings(g) == 0


def test_run_layout_deterministic():
    tree = square_tree(3)
    sels = [PatternSelection("p1", "ABC", 2), PatternSelection("p2", "CAB", 1)]
    a = run_layout(build_graph(sels, tree, 1, seed=11), LayoutParams(iterations=40, seed=11))
    b = run_layout(build_graph(sels, tree, 1, seed=11), LayoutParams(iterations=40, seed=11))
    assert layout_json_bytes(a) == layout_json_bytes(b)


def test_run_layout_different_seed_differs():
    tree = square_tree(3)
    sels = [PatternSelection("p1", "ABC", 2)]
    a = run_layout(build_graph(sels, tree, 1, seed=1), LayoutParams(iterations=40, seed=1))
    b = run_layout(build_graph(sels, tree, 1, seed=2), LayoutParams(iterations=40, seed=2))
    assert layout_json_bytes(a) != layout_json_bytes(b)
