"""Automatic AOI detection from the color distribution of the stimulus.

Pipeline: shrink the image to a mosaic of z-pixel cells, reduce the cell
colors to g palette entries (median cut), call the dominant color "blank"
and the rest "item" colors, close small gaps and sharpen corners of the item
regions with a 3x3 fill pass, fit one candidate rectangle per region corner,
then merge or drop adjoining candidates until no pair touches. Surviving
rectangles become the leaves of a flat AOI tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .model import AoiTree, Rect, Stimulus, flat_tree

BLANK_LABEL = 0

# 3x3 window neighbor order used throughout: clockwise from north.
# Diagonals sit at the odd indices; arcs are (flank, corner, flank) triples.
NEIGHBOR_OFFSETS = (
    (0, -1),   # N
    (1, -1),   # NE
    (1, 0),    # E
    (1, 1),    # SE
    (0, 1),    # S
    (-1, 1),   # SW
    (-1, 0),   # W
    (-1, -1),  # NW
)
_DIAGONALS = (1, 3, 5, 7)
_CORNER_ARCS = ((0, 1, 2), (2, 3, 4), (4, 5, 6), (6, 7, 0))


@dataclass(frozen=True)
class DetectionParams:
    """z: mosaic cell size in pixels. g: palette size after color reduction."""

    z: int
    g: int

    def __post_init__(self) -> None:
        if self.z < 1:
            raise ValueError("cell size z must be >= 1")
        if self.g < 2:
            raise ValueError("color count g must be >= 2")


@dataclass(frozen=True)
class CellGrid:
    """Mosaic of the stimulus with one quantized color label per cell.

    Label 0 is blank (the most common color); labels 1.. are item colors.
    `colors` keeps the mean RGB per cell and `palette` the reduced colors
    (blank first), both only needed for debug rendering.
    """

    cols: int
    rows: int
    cells: np.ndarray
    colors: np.ndarray | None = field(default=None, compare=False, repr=False)
    palette: np.ndarray | None = field(default=None, compare=False, repr=False)


class CandidateRect(NamedTuple):
    """A temporary AOI border fitted from one region corner (cell coordinates)."""

    rect: Rect
    corner: tuple[int, int]


def _median_cut(colors: np.ndarray, g: int) -> np.ndarray:
    """Reduce colors to at most g representatives.

    Splits the box with the widest channel range at its median, preferring
    R over G over B on range ties; boxes of a single color are not split, so
    the palette can end up smaller than g on low-variety images.
    """
    boxes = [np.arange(len(colors))]
    while len(boxes) < g:
        best_box = -1
        best_range = 0.0
        best_channel = 0
        for i, idx in enumerate(boxes):
            spans = colors[idx].max(axis=0) - colors[idx].min(axis=0)
            channel = int(np.argmax(spans))  # argmax keeps the R>G>B tie order
            if spans[channel] > best_range:
                best_range = float(spans[channel])
                best_channel = channel
                best_box = i
        if best_box < 0:
            break
        idx = boxes[best_box]
        sub = colors[idx]
        order = np.lexsort((sub[:, 2], sub[:, 1], sub[:, 0], sub[:, best_channel]))
        idx = idx[order]
        mid = len(idx) // 2
        boxes[best_box:best_box + 1] = [idx[:mid], idx[mid:]]
    return np.array([colors[idx].mean(axis=0) for idx in boxes])


def mosaic_and_quantize(stimulus: Stimulus, params: DetectionParams) -> CellGrid:
    """Average the image into z-sized cells and map each to a palette label."""
    if stimulus.pixels is None:
        raise ValueError("stimulus has no pixel data")
    pixels = np.asarray(stimulus.pixels, dtype=np.float64)
    height, width = pixels.shape[:2]
    z = params.z
    cols = math.ceil(width / z)
    rows = math.ceil(height / z)

    row_starts = np.arange(0, height, z)
    col_starts = np.arange(0, width, z)
    sums = np.add.reduceat(np.add.reduceat(pixels, row_starts, axis=0), col_starts, axis=1)
    row_sizes = np.minimum(row_starts + z, height) - row_starts
    col_sizes = np.minimum(col_starts + z, width) - col_starts
    area = row_sizes[:, None] * col_sizes[None, :]
    means = sums / area[:, :, None]

    palette = _median_cut(means.reshape(-1, 3), params.g)
    dist = ((means.reshape(-1, 1, 3) - palette[None, :, :]) ** 2).sum(axis=2)
    labels = dist.argmin(axis=1)

    blank = int(np.bincount(labels, minlength=len(palette)).argmax())
    remap = np.empty(len(palette), dtype=np.int64)
    remap[blank] = BLANK_LABEL
    item = 1
    for i in range(len(palette)):
        if i != blank:
            remap[i] = item
            item += 1
    cells = remap[labels].reshape(rows, cols)
    ordered_palette = np.concatenate([palette[blank:blank + 1], np.delete(palette, blank, axis=0)])
    return CellGrid(cols=cols, rows=rows, cells=cells, colors=means, palette=ordered_palette)


def fill_decision(neighbors: list[int]) -> int:
    """Repaint color for a blank cell given its 8 neighbors, or 0 to keep blank.

    Neighbors follow NEIGHBOR_OFFSETS (clockwise from north); cells outside
    the grid are passed as 0. A color c wins if either:

      A. at least five neighbors have color c, at least two of them diagonal;
      B. some corner arc (a diagonal and its two orthogonal flanks, e.g.
         N-NE-E) has color c on all three cells.

    Candidate colors are tried in ascending label order. Unrolled: this is
    the innermost loop of the fill pass.
    """
    n0, n1, n2, n3, n4, n5, n6, n7 = neighbors
    candidates = {n0, n1, n2, n3, n4, n5, n6, n7}
    candidates.discard(BLANK_LABEL)
    for c in sorted(candidates):
        b0 = n0 == c
        b2 = n2 == c
        b4 = n4 == c
        b6 = n6 == c
        b1 = n1 == c
        b3 = n3 == c
        b5 = n5 == c
        b7 = n7 == c
        if (b0 and b1 and b2) or (b2 and b3 and b4) \
                or (b4 and b5 and b6) or (b6 and b7 and b0):
            return c
        diagonals = b1 + b3 + b5 + b7
        if diagonals >= 2 and diagonals + b0 + b2 + b4 + b6 >= 5:
            return c
    return BLANK_LABEL


def _dilate(mask: np.ndarray) -> np.ndarray:
    """8-neighborhood dilation via shifted ORs."""
    out = mask.copy()
    out[1:, :] |= mask[:-1, :]
    out[:-1, :] |= mask[1:, :]
    out[:, 1:] |= mask[:, :-1]
    out[:, :-1] |= mask[:, 1:]
    out[1:, 1:] |= mask[:-1, :-1]
    out[1:, :-1] |= mask[:-1, 1:]
    out[:-1, 1:] |= mask[1:, :-1]
    out[:-1, :-1] |= mask[1:, 1:]
    return out


def fill_pass(grid: CellGrid) -> CellGrid:
    """One raster pass of the 3x3 fill window, updating in place row-major.

    Cells repainted earlier in the pass count as item neighbors for cells
    visited later, matching a sliding window over a mutating image. Repaints
    only ever turn blank cells into item cells.

    Only cells next to an item cell at pass start, or next to a repaint made
    earlier in the pass, can fill; everything else is skipped via masks,
    which leaves the result identical to the plain full scan.
    """
    rows, cols = grid.rows, grid.cols
    active = _dilate(grid.cells != BLANK_LABEL).tolist()
    woken = [[False] * cols for _ in range(rows)]
    cells = [list(row) for row in grid.cells.tolist()]
    for y in range(rows):
        row = cells[y]
        active_row = active[y]
        woken_row = woken[y]
        up = cells[y - 1] if y > 0 else None
        down = cells[y + 1] if y + 1 < rows else None
        for x in range(cols):
            if row[x] != BLANK_LABEL or not (active_row[x] or woken_row[x]):
                continue
            left = x > 0
            right = x + 1 < cols
            neighbors = [
                up[x] if up else 0,
                up[x + 1] if up and right else 0,
                row[x + 1] if right else 0,
                down[x + 1] if down and right else 0,
                down[x] if down else 0,
                down[x - 1] if down and left else 0,
                row[x - 1] if left else 0,
                up[x - 1] if up and left else 0,
            ]
            color = fill_decision(neighbors)
            if color != BLANK_LABEL:
                row[x] = color
                for wy in range(max(y - 1, 0), min(y + 2, rows)):
                    wrow = woken[wy]
                    for wx in range(max(x - 1, 0), min(x + 2, cols)):
                        wrow[wx] = True
    return CellGrid(
        cols=grid.cols,
        rows=grid.rows,
        cells=np.array(cells, dtype=grid.cells.dtype).reshape(rows, cols),
        colors=grid.colors,
        palette=grid.palette,
    )


def fill_to_fixpoint(grid: CellGrid) -> CellGrid:
    """Iterate fill passes until no cell changes; bounded by the cell count."""
    for _ in range(grid.cols * grid.rows):
        filled = fill_pass(grid)
        if np.array_equal(filled.cells, grid.cells):
            return filled
        grid = filled
    return grid


def _run_length(cells: np.ndarray, y: int, x: int, dx: int, dy: int, color: int) -> int:
    rows, cols = cells.shape
    n = 0
    while 0 <= y < rows and 0 <= x < cols and cells[y, x] == color:
        n += 1
        x += dx
        y += dy
    return n


def fit_rectangles(grid: CellGrid) -> list[CandidateRect]:
    """Fit one temporary border rectangle per convex corner of each item region.

    A corner cell has two perpendicular orthogonal neighbors of a different
    color (grid borders count as different). From the corner, the two border
    lines run along the region's same-colored cells until the color ends; the
    rectangle is completed with two added sides, so it may only partially
    overlap a non-rectangular region.
    """
    cells = grid.cells
    rows, cols = cells.shape
    out: list[CandidateRect] = []
    for y in range(rows):
        for x in range(cols):
            color = int(cells[y, x])
            if color == BLANK_LABEL:
                continue
            up = y > 0 and cells[y - 1, x] == color
            down = y + 1 < rows and cells[y + 1, x] == color
            left = x > 0 and cells[y, x - 1] == color
            right = x + 1 < cols and cells[y, x + 1] == color
            seen: set[Rect] = set()
            # (corner orientation, horizontal direction, vertical direction)
            for exposed, dx, dy in (
                (not up and not left, 1, 1),     # NW corner: extend E and S
                (not up and not right, -1, 1),   # NE corner: extend W and S
                (not down and not left, 1, -1),  # SW corner: extend E and N
                (not down and not right, -1, -1),  # SE corner: extend W and N
            ):
                if not exposed:
                    continue
                w = _run_length(cells, y, x, dx, 0, color)
                h = _run_length(cells, y, x, 0, dy, color)
                rect = Rect(x if dx > 0 else x - w + 1, y if dy > 0 else y - h + 1, w, h)
                if rect not in seen:
                    seen.add(rect)
                    out.append(CandidateRect(rect, (x, y)))
    return out


def _adjoins_or_overlaps(a: Rect, b: Rect) -> bool:
    grown = Rect(a.x - 1, a.y - 1, a.w + 2, a.h + 2)
    return grown.overlaps(b)


def arrange(
    candidates: list[CandidateRect],
    z: int = 1,
    stimulus_size: tuple[int, int] | None = None,
) -> list[Rect]:
    """Resolve adjoining or overlapping candidates until none remain.

    Duplicates are dropped first. For each touching pair, the pair is merged
    into its bounding box only when that box would not overlap any third
    surviving rectangle; otherwise the smaller of the two is removed (area
    ties remove the later candidate). The survivors are scaled from cell to
    pixel coordinates and clamped to the stimulus.
    """
    rects: list[Rect] = []
    for cand in candidates:
        if cand.rect not in rects:
            rects.append(cand.rect)

    changed = True
    while changed:
        changed = False
        for i in range(len(rects)):
            for j in range(i + 1, len(rects)):
                if not _adjoins_or_overlaps(rects[i], rects[j]):
                    continue
                box = rects[i].union(rects[j])
                blocked = any(
                    box.overlaps(r) for k, r in enumerate(rects) if k not in (i, j)
                )
                if not blocked:
                    rects[i] = box
                    del rects[j]
                elif rects[i].area < rects[j].area:
                    del rects[i]
                else:
                    del rects[j]
                changed = True
                break
            if changed:
                break

    out = []
    for r in rects:
        x, y, w, h = r.x * z, r.y * z, r.w * z, r.h * z
        if stimulus_size is not None:
            sw, sh = stimulus_size
            x, y = max(x, 0), max(y, 0)
            w, h = min(w, sw - x), min(h, sh - y)
            if w <= 0 or h <= 0:
                continue
        out.append(Rect(x, y, w, h))
    return out


def detect_aois(stimulus: Stimulus, params: DetectionParams) -> AoiTree:
    """Run the full detection pipeline and return a flat AOI tree.

    Leaves are ordered top-to-bottom then left-to-right, and chars assigned in
    that order. An image with no item regions yields a tree with zero leaves.
    """
    grid = mosaic_and_quantize(stimulus, params)
    grid = fill_to_fixpoint(grid)
    candidates = fit_rectangles(grid)
    rects = arrange(candidates, z=params.z, stimulus_size=(stimulus.width, stimulus.height))
    rects.sort(key=lambda r: (r.y, r.x))
    return flat_tree(rects)
