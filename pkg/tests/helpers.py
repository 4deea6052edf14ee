"""Shared generators and independent oracles used across the test modules."""

from __future__ import annotations

import math
import random

import numpy as np

from gazemine.model import AoiTree, Rect, Stimulus, flat_tree, make_group

ITEM_COLORS = [(10, 10, 10), (190, 25, 25), (25, 25, 190)]
BACKGROUND = (255, 255, 255)


def random_rects(rng: random.Random, n: int, width: int = 1200, height: int = 900) -> list[Rect]:
    """n disjoint rects, one per slot of a coarse grid."""
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    slot_w, slot_h = width // cols, height // rows
    rects = []
    for i in range(n):
        c, r = i % cols, i // cols
        x0, y0 = c * slot_w, r * slot_h
        w = rng.randint(max(4, slot_w // 4), slot_w - 2)
        h = rng.randint(max(4, slot_h // 4), slot_h - 2)
        x = rng.randint(x0, x0 + slot_w - w - 1)
        y = rng.randint(y0, y0 + slot_h - h - 1)
        rects.append(Rect(x, y, w, h))
    return rects


def random_tree(rng: random.Random, n_leaves: int, max_depth: int = 5) -> AoiTree:
    """Random hierarchy: disjoint leaves plus random (possibly nested) groups."""
    tree = flat_tree(random_rects(rng, n_leaves))
    for _ in range(rng.randint(0, n_leaves)):
        kids = tree.root.children
        if len(kids) < 2:
            break
        members = rng.sample([c.id for c in kids], rng.randint(1, min(len(kids), 4)))
        candidate = make_group(tree, members)
        if candidate.depth <= max_depth:
            tree = candidate
    return tree


def blocks_image(
    rng: random.Random,
    n_blocks: int,
    z: int,
    width: int = 1280,
    height: int = 960,
) -> tuple[Stimulus, list[Rect]]:
    """Solid rectangles on a uniform background, pairwise separation > 3z.

    Blocks sit in a slot grid with at least 2z clearance to the slot border,
    so any two blocks are at least 4z apart. Returns the ground-truth rects.
    """
    cols = math.ceil(math.sqrt(n_blocks))
    rows = math.ceil(n_blocks / cols)
    slot_w, slot_h = width // cols, height // rows
    margin = 2 * z
    pixels = np.full((height, width, 3), BACKGROUND, dtype=np.uint8)
    truth = []
    for i in range(n_blocks):
        c, r = i % cols, i // cols
        x0, y0 = c * slot_w + margin, r * slot_h + margin
        max_w, max_h = slot_w - 2 * margin, slot_h - 2 * margin
        w = rng.randint(4 * z, max(4 * z, max_w))
        h = rng.randint(4 * z, max(4 * z, max_h))
        w, h = min(w, max_w), min(h, max_h)
        x = rng.randint(x0, x0 + max_w - w)
        y = rng.randint(y0, y0 + max_h - h)
        pixels[y:y + h, x:x + w] = ITEM_COLORS[i % len(ITEM_COLORS)]
        truth.append(Rect(x, y, w, h))
    return Stimulus(width, height, pixels), truth


def match_rects(detected: list[Rect], truth: list[Rect]) -> list[tuple[Rect, Rect]]:
    """Pair each truth rect with the detected rect of nearest center."""
    pairs = []
    remaining = list(detected)
    for t in truth:
        tc = t.center
        best = min(remaining, key=lambda d: (d.center[0] - tc[0]) ** 2 + (d.center[1] - tc[1]) ** 2)
        remaining.remove(best)
        pairs.append((t, best))
    return pairs


def max_edge_error(a: Rect, b: Rect) -> int:
    return max(abs(a.x - b.x), abs(a.y - b.y), abs(a.right - b.right), abs(a.bottom - b.bottom))


def segments_cross_oracle(p1, p2, p3, p4) -> bool:
    """Independent proper-intersection test via parametric line solve."""
    x1, y1 = p1
    x2, y2 = p2
    x3, y3 = p3
    x4, y4 = p4
    den = (x2 - x1) * (y4 - y3) - (y2 - y1) * (x4 - x3)
    if den == 0:
        return False
    t = ((x3 - x1) * (y4 - y3) - (y3 - y1) * (x4 - x3)) / den
    u = ((x3 - x1) * (y2 - y1) - (y3 - y1) * (x2 - x1)) / den
    eps = 1e-12
    return eps < t < 1 - eps and eps < u < 1 - eps


def crossings_oracle(graph) -> int:
    pos = [(n.x, n.y) for n in graph.nodes]
    total = 0
    for i, e1 in enumerate(graph.edges):
        for e2 in graph.edges[i + 1:]:
            if {e1.src, e1.dst} & {e2.src, e2.dst}:
                continue
            if segments_cross_oracle(pos[e1.src], pos[e1.dst], pos[e2.src], pos[e2.dst]):
                total += 1
    return total


def random_transition_string(rng: random.Random, alphabet: str, length: int) -> str:
    """Random string with no adjacent duplicate characters."""
    out = []
    for _ in range(length):
        choices = [c for c in alphabet if not out or c != out[-1]]
        out.append(rng.choice(choices))
    return "".join(out)
