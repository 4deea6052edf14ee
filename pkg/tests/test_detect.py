import random

import numpy as np
import pytest

from gazemine.detect import (
    BLANK_LABEL,
    CandidateRect,
    CellGrid,
    DetectionParams,
    arrange,
    detect_aois,
    fill_decision,
    fill_pass,
    fill_to_fixpoint,
    fit_rectangles,
    mosaic_and_quantize,
)
from gazemine.model import Rect, Stimulus

from helpers import blocks_image, match_rects, max_edge_error


def grid_of(rows):
    cells = np.array(rows, dtype=np.int64)
    return CellGrid(cols=cells.shape[1], rows=cells.shape[0], cells=cells)


def uniform_stimulus(color, w=64, h=64):
    return Stimulus(w, h, np.full((h, w, 3), color, dtype=np.uint8))


# --- mosaic + quantize -------------------------------------------------------

def test_uniform_image_all_blank():
    grid = mosaic_and_quantize(uniform_stimulus((255, 255, 255)), DetectionParams(z=8, g=2))
    assert (grid.cells == BLANK_LABEL).all()


def test_minority_color_becomes_item():
    px = np.full((80, 80, 3), 255, dtype=np.uint8)
    px[20:60, 20:60] = 0
    grid = mosaic_and_quantize(Stimulus(80, 80, px), DetectionParams(z=10, g=2))
    # pixel-count oracle: black covers 1600 of 6400 pixels, so white is blank
    assert (px == 0).all(axis=2).sum() < (px == 255).all(axis=2).sum()
    assert (grid.cells != BLANK_LABEL).sum() == 16
    assert (grid.cells[2:6, 2:6] != BLANK_LABEL).all()


def test_majority_rule_flips_blank():
    px = np.zeros((40, 40, 3), dtype=np.uint8)
    px[0:8, 0:8] = 255  # white is now the minority
    grid = mosaic_and_quantize(Stimulus(40, 40, px), DetectionParams(z=8, g=2))
    assert grid.cells[0, 0] != BLANK_LABEL
    assert (grid.cells == BLANK_LABEL).sum() == 24


def test_image_smaller_than_cell():
    grid = mosaic_and_quantize(uniform_stimulus((10, 10, 10), w=3, h=2), DetectionParams(z=8, g=2))
    assert (grid.rows, grid.cols) == (1, 1)


def test_quantize_deterministic():
    rng = random.Random(2)
    stim, _ = blocks_image(rng, 4, 8, width=320, height=240)
    a = mosaic_and_quantize(stim, DetectionParams(z=8, g=4))
    b = mosaic_and_quantize(stim, DetectionParams(z=8, g=4))
    assert np.array_equal(a.cells, b.cells)


# --- fill pass ---------------------------------------------------------------

def test_fill_condition_a():
    # five red neighbors including diagonals NE and SE
    g = grid_of([
        [0, 1, 1],
        [0, 0, 1],
        [0, 1, 1],
    ])
    assert fill_pass(g).cells[1, 1] == 1


def test_fill_condition_b_corner_arc():
    # exactly N, NE, E red: a contiguous corner arc
    g = grid_of([
        [0, 1, 1],
        [0, 0, 1],
        [0, 0, 0],
    ])
    assert fill_pass(g).cells[1, 1] == 1


def test_fill_scattered_neighbors_unchanged():
    g = grid_of([
        [1, 0, 1],
        [0, 0, 0],
        [1, 0, 1],
    ])
    assert fill_pass(g).cells[1, 1] == BLANK_LABEL


def test_fill_monotone_and_bounded():
    rng = random.Random(13)
    for _ in range(20):
        cells = [[rng.choice([0, 0, 1, 2]) for _ in range(8)] for _ in range(8)]
        g = grid_of(cells)
        blanks = int((g.cells == 0).sum())
        for _ in range(64):
            nxt = fill_pass(g)
            nxt_blanks = int((nxt.cells == 0).sum())
            assert nxt_blanks <= blanks
            assert ((g.cells == 0) | (nxt.cells == g.cells)).all()  # items never change
            if nxt_blanks == blanks and (nxt.cells == g.cells).all():
                break
            g, blanks = nxt, nxt_blanks
        fixed = fill_to_fixpoint(g)
        assert np.array_equal(fill_pass(fixed).cells, fixed.cells)


def _decision_oracle(neighbors):
    """Direct restatement of the two fill conditions, tried per color."""
    for c in sorted({v for v in neighbors if v != 0}):
        same = [v == c for v in neighbors]
        cond_a = sum(same) >= 5 and (same[1] + same[3] + same[5] + same[7]) >= 2
        arcs = [(0, 1, 2), (2, 3, 4), (4, 5, 6), (6, 7, 0)]
        cond_b = any(same[i] and same[j] and same[k] for i, j, k in arcs)
        if cond_a or cond_b:
            return c
    return 0


def test_fill_decision_exhaustive_window():
    # every 3x3 neighborhood over {blank, item 1, other item 2}
    for code in range(3 ** 8):
        neighbors, v = [], code
        for _ in range(8):
            neighbors.append(v % 3)
            v //= 3
        assert fill_decision(neighbors) == _decision_oracle(neighbors), neighbors


# --- rectangle fitting -------------------------------------------------------

def test_fit_solid_block_four_corners():
    g = grid_of([
        [0, 0, 0, 0, 0, 0],
        [0, 1, 1, 1, 1, 0],
        [0, 1, 1, 1, 1, 0],
        [0, 1, 1, 1, 1, 0],
        [0, 0, 0, 0, 0, 0],
    ])
    candidates = fit_rectangles(g)
    assert len(candidates) == 4
    assert all(c.rect == Rect(1, 1, 4, 3) for c in candidates)


def test_fit_single_cell():
    g = grid_of([[0, 0], [0, 1]])
    candidates = fit_rectangles(g)
    assert [c.rect for c in candidates] == [Rect(1, 1, 1, 1)]


def _corner_oracle(cells):
    """Enumerate convex corners and their max same-color runs independently."""
    rows, cols = cells.shape
    rects = set()

    def same(y, x, v):
        return 0 <= y < rows and 0 <= x < cols and cells[y, x] == v

    def run(y, x, dy, dx, v):
        n = 0
        while same(y, x, v):
            n += 1
            y, x = y + dy, x + dx
        return n

    for y in range(rows):
        for x in range(cols):
            v = cells[y, x]
            if v == 0:
                continue
            for vy, vx in ((-1, -1), (-1, 1), (1, -1), (1, 1)):
                if not same(y + vy, x, v) and not same(y, x + vx, v):
                    w = run(y, x, 0, -vx, v)
                    h = run(y, x, -vy, 0, v)
                    rx = x if vx < 0 else x - w + 1
                    ry = y if vy < 0 else y - h + 1
                    rects.add(Rect(rx, ry, w, h))
    return rects


def test_fit_l_shape_against_oracle():
    g = grid_of([
        [1, 1, 1, 0],
        [1, 0, 0, 0],
        [1, 0, 0, 0],
    ])
    candidates = {c.rect for c in fit_rectangles(g)}
    assert candidates == _corner_oracle(g.cells)
    # the two arms are both covered by some candidate
    assert Rect(0, 0, 3, 1) in candidates
    assert Rect(0, 0, 1, 3) in candidates


def test_fit_random_regions_match_oracle():
    rng = random.Random(37)
    for _ in range(40):
        cells = [[rng.choice([0, 0, 1, 2]) for _ in range(7)] for _ in range(6)]
        g = grid_of(cells)
        assert {c.rect for c in fit_rectangles(g)} == _corner_oracle(g.cells)


def test_fit_empty_grid():
    assert fit_rectangles(grid_of([[0, 0], [0, 0]])) == []


# --- arrange -----------------------------------------------------------------

def cand(x, y, w, h):
    return CandidateRect(Rect(x, y, w, h), (x, y))


def test_arrange_disjoint_unchanged():
    rects = arrange([cand(0, 0, 2, 2), cand(5, 5, 2, 2)])
    assert set(rects) == {Rect(0, 0, 2, 2), Rect(5, 5, 2, 2)}


def test_arrange_merges_overlap():
    rects = arrange([cand(0, 0, 3, 3), cand(2, 2, 3, 3)])
    assert rects == [Rect(0, 0, 5, 5)]


def test_arrange_removes_smaller_when_merge_blocked():
    # bbox of the overlapping pair would swallow the third rect, which sits
    # inside the bbox but more than one cell away from both pair members
    a = cand(1, 1, 3, 3)
    b = cand(3, 3, 4, 4)
    blocker = cand(1, 5, 1, 1)
    rects = arrange([a, b, blocker])
    assert Rect(3, 3, 4, 4) in rects       # larger pair member survives
    assert Rect(1, 1, 3, 3) not in rects   # smaller one was removed
    assert Rect(1, 5, 1, 1) in rects


def test_arrange_merge_bbox_oracle():
    rng = random.Random(53)
    for _ in range(60):
        cands = [cand(rng.randint(0, 10), rng.randint(0, 10), rng.randint(1, 4), rng.randint(1, 4))
                 for _ in range(rng.randint(2, 6))]
        out = arrange(cands)
        # fixpoint condition: no surviving pair adjoins or overlaps
        for i, a in enumerate(out):
            for b in out[i + 1:]:
                grown = Rect(a.x - 1, a.y - 1, a.w + 2, a.h + 2)
                assert not grown.overlaps(b), (a, b)


def test_arrange_scales_and_clamps():
    rects = arrange([cand(0, 0, 3, 2)], z=10, stimulus_size=(25, 25))
    assert rects == [Rect(0, 0, 25, 20)]


def test_arrange_dedupes():
    rects = arrange([cand(1, 1, 2, 2), cand(1, 1, 2, 2), cand(1, 1, 2, 2)])
    assert rects == [Rect(1, 1, 2, 2)]


# --- full pipeline -----------------------------------------------------------

def test_detect_three_blocks_within_tolerance():
    rng = random.Random(71)
    stim, truth = blocks_image(rng, 3, 8, width=640, height=480)
    tree = detect_aois(stim, DetectionParams(z=8, g=4))
    leaves = tree.leaves()
    assert len(leaves) == 3
    for t, d in match_rects([n.rect for n in leaves], truth):
        assert max_edge_error(t, d) <= 8


def test_detect_blank_image():
    tree = detect_aois(uniform_stimulus((250, 250, 250)), DetectionParams(z=8, g=4))
    assert tree.leaves() == []


def test_detect_single_block():
    px = np.full((200, 200, 3), 255, dtype=np.uint8)
    px[80:144, 64:128] = 0
    tree = detect_aois(Stimulus(200, 200, px), DetectionParams(z=8, g=2))
    assert len(tree.leaves()) == 1
    assert max_edge_error(tree.leaves()[0].rect, Rect(64, 80, 64, 64)) == 0


def test_detect_deterministic():
    rng = random.Random(77)
    stim, _ = blocks_image(rng, 4, 8, width=480, height=320)
    from gazemine.model import tree_to_json

    a = detect_aois(stim, DetectionParams(z=8, g=4))
    b = detect_aois(stim, DetectionParams(z=8, g=4))
    assert tree_to_json(a) == tree_to_json(b)


def test_detect_chars_in_reading_order():
    px = np.full((300, 300, 3), 255, dtype=np.uint8)
    px[20:80, 160:260] = 0      # top right
    px[40:90, 20:100] = 0       # top left, slightly lower
    px[200:280, 60:200] = 0     # bottom
    tree = detect_aois(Stimulus(300, 300, px), DetectionParams(z=10, g=2))
    ordered = sorted(tree.leaves(), key=lambda n: n.char)
    ys = [n.rect.y for n in ordered]
    assert ys == sorted(ys)


def test_params_validation():
    with pytest.raises(ValueError):
        DetectionParams(z=0, g=2)
    with pytest.raises(ValueError):
        DetectionParams(z=4, g=1)
