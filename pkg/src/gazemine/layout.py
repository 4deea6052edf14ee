"""Hierarchy-aware AOI coloring and the constrained transition-graph layout.

Colors: every tree node gets a color cost (its descendant leaf count) and a
contiguous slice of a global hue list spread evenly over [0, 300], so AOIs in
one group stay in neighboring hues and switching the displayed level never
jumps a region to an unrelated color.

Graph: each selected pattern becomes a chain of nodes, one per visited AOI,
placed inside the rectangle of the largest AOI of the visible group. Spring,
same-rectangle repulsion, and center-attraction forces spread the nodes, a
clamp keeps them strictly inside their rectangle, and a final pass swaps
same-AOI node positions whenever that strictly reduces edge crossings.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .model import AoiNode, AoiTree, CutEntry, Rect, cut_at_level, largest_leaf


# ---------------------------------------------------------------------------
# Color cost and hue assignment
# ---------------------------------------------------------------------------

HUE_MAX = 300.0  # upper end of the usable hue range; beyond it red wraps around


def assign_costs(tree: AoiTree) -> dict[int, int]:
    """Color cost per node id: 1 per leaf, sum of children for groups."""
    costs: dict[int, int] = {}

    def walk(node: AoiNode) -> int:
        cost = 1 if node.is_leaf else sum(walk(c) for c in node.children)
        costs[node.id] = cost
        return cost

    walk(tree.root)
    return costs


@dataclass(frozen=True)
class ColorAssignment:
    """Per-node hue data: contiguous hue slice and the single display hue."""

    costs: dict[int, int]
    hues: dict[int, tuple[float, ...]]
    display: dict[int, float]


def assign_hues(tree: AoiTree) -> ColorAssignment:
    """Distribute evenly spaced hues over [0, 300] down the hierarchy.

    The root owns one hue per leaf (spacing 300/(n-1), inclusive endpoints; a
    single leaf gets hue 0). Children split their parent's slice contiguously
    in child order, each taking cost-many hues, so every leaf ends with one
    hue. A node displays the hue of its largest-area descendant leaf.
    """
    leaves = tree.leaves()
    n = len(leaves)
    if n == 0:
        raise ValueError("hue assignment needs at least one leaf")
    if n == 1:
        full = (0.0,)
    else:
        full = tuple(HUE_MAX * i / (n - 1) for i in range(n))

    costs = assign_costs(tree)
    hues: dict[int, tuple[float, ...]] = {}
    leaf_hue: dict[int, float] = {}

    def walk(node: AoiNode, slice_: tuple[float, ...]) -> None:
        hues[node.id] = slice_
        if node.is_leaf:
            leaf_hue[node.id] = slice_[0]
            return
        offset = 0
        for child in node.children:
            take = costs[child.id]
            walk(child, slice_[offset:offset + take])
            offset += take

    walk(tree.root, full)

    display: dict[int, float] = {}
    for node in tree.nodes():
        anchor = largest_leaf(node)
        if anchor is not None:
            display[node.id] = leaf_hue[anchor.id]
    return ColorAssignment(costs=costs, hues=hues, display=display)


# ---------------------------------------------------------------------------
# Transition graph construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PatternSelection:
    """One pattern chosen for display, weighted by its extraction frequency."""

    id: str
    chars: str
    weight: int = 1


@dataclass
class GraphNode:
    id: int
    aoi: int                  # id of the visible cut node the rect belongs to
    role: str                 # start | intermediate | end
    x: float
    y: float
    home: Rect


@dataclass
class GraphEdge:
    src: int
    dst: int
    weight: int
    cross_group: bool
    pattern: str
    highlighted: bool = False


@dataclass
class TransitionGraph:
    nodes: list[GraphNode]
    edges: list[GraphEdge]


def _role(index: int, length: int) -> str:
    if index == 0:
        return "start"
    if index == length - 1:
        return "end"
    return "intermediate"


def build_graph(
    selections: list[PatternSelection],
    tree: AoiTree,
    level: int,
    seed: int = 0,
) -> TransitionGraph:
    """Build one node chain per selected pattern over the level-k cut.

    Repeated visits to an AOI within one pattern produce distinct nodes, so
    back-and-forth transitions stay visible. Nodes are homed in the rect of
    the largest AOI of their visible group and start at its center plus a
    small seeded jitter (the repulsion force needs distinct positions). An
    edge is cross-group when its endpoints' cut nodes have different parents
    in the hierarchy.
    """
    cut = cut_at_level(tree, level)
    by_char: dict[str, CutEntry] = {entry.char: entry for entry in cut}
    parent_ids = {entry.node.id: _parent_id(tree, entry.node.id) for entry in cut}

    rng = random.Random(seed)
    nodes: list[GraphNode] = []
    edges: list[GraphEdge] = []
    for sel in selections:
        chain: list[int] = []
        for i, ch in enumerate(sel.chars):
            entry = by_char.get(ch)
            if entry is None:
                raise ValueError(f"pattern char {ch!r} not visible at level {level}")
            anchor = largest_leaf(entry.node)
            home = anchor.rect if anchor is not None else entry.rect
            cx, cy = home.center
            jitter = min(home.w, home.h) * 0.05
            node = GraphNode(
                id=len(nodes),
                aoi=entry.node.id,
                role=_role(i, len(sel.chars)),
                x=cx + rng.uniform(-jitter, jitter),
                y=cy + rng.uniform(-jitter, jitter),
                home=home,
            )
            nodes.append(node)
            chain.append(node.id)
        for a, b in zip(chain, chain[1:]):
            aoi_a, aoi_b = nodes[a].aoi, nodes[b].aoi
            edges.append(GraphEdge(
                src=a,
                dst=b,
                weight=sel.weight,
                cross_group=parent_ids[aoi_a] != parent_ids[aoi_b],
                pattern=sel.id,
            ))
    return TransitionGraph(nodes=nodes, edges=edges)


def _parent_id(tree: AoiTree, node_id: int) -> int:
    parent = tree.parent_of(node_id)
    return parent.id if parent is not None else -1


# ---------------------------------------------------------------------------
# Force simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LayoutParams:
    """Force constants are artifact choices; the seed fixes all randomness."""

    iterations: int = 300
    spring: float = 0.06
    repulsion: float = 1200.0
    center_pull: float = 0.5
    step: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")


def _clamp_inside(node: GraphNode) -> None:
    """Keep the position strictly inside the home rect, 1 px from the border
    (less for rects too small to afford it)."""
    r = node.home
    mx = min(1.0, r.w / 4.0)
    my = min(1.0, r.h / 4.0)
    node.x = min(max(node.x, r.x + mx), r.x + r.w - mx)
    node.y = min(max(node.y, r.y + my), r.y + r.h - my)


def layout_step(graph: TransitionGraph, params: LayoutParams) -> TransitionGraph:
    """One synchronous integration step of the three forces, then the clamp.

    Springs act along edges toward a rest length of 0.4x the smaller rect
    dimension; repulsion (inverse-square) acts only between nodes sharing a
    home rect; a linear pull draws every node to its rect center so it never
    settles against the border.
    """
    forces = [(0.0, 0.0)] * len(graph.nodes)

    def add(i: int, fx: float, fy: float) -> None:
        forces[i] = (forces[i][0] + fx, forces[i][1] + fy)

    for edge in graph.edges:
        a, b = graph.nodes[edge.src], graph.nodes[edge.dst]
        dx, dy = b.x - a.x, b.y - a.y
        d = max((dx * dx + dy * dy) ** 0.5, 1e-9)
        rest = 0.4 * min(min(a.home.w, a.home.h), min(b.home.w, b.home.h))
        f = params.spring * (d - rest)
        add(edge.src, f * dx / d, f * dy / d)
        add(edge.dst, -f * dx / d, -f * dy / d)

    by_rect: dict[Rect, list[GraphNode]] = {}
    for node in graph.nodes:
        by_rect.setdefault(node.home, []).append(node)
    for mates in by_rect.values():
        for i, a in enumerate(mates):
            for b in mates[i + 1:]:
                dx, dy = a.x - b.x, a.y - b.y
                d = max((dx * dx + dy * dy) ** 0.5, 1e-3)
                f = params.repulsion / (d * d)
                add(a.id, f * dx / d, f * dy / d)
                add(b.id, -f * dx / d, -f * dy / d)

    for node in graph.nodes:
        cx, cy = node.home.center
        add(node.id, params.center_pull * (cx - node.x), params.center_pull * (cy - node.y))

    for node in graph.nodes:
        fx, fy = forces[node.id]
        node.x += params.step * fx
        node.y += params.step * fy
        _clamp_inside(node)
    return graph


def _segments_cross(p1, p2, p3, p4) -> bool:
    """Proper interior crossing of two segments (shared endpoints excluded)."""

    def orient(a, b, c) -> float:
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0) and (d3 > 0) != (d4 > 0)
            and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0)


def count_crossings(graph: TransitionGraph) -> int:
    """Number of edge pairs whose segments properly cross."""
    pos = [(n.x, n.y) for n in graph.nodes]
    total = 0
    edges = graph.edges
    for i, e1 in enumerate(edges):
        for e2 in edges[i + 1:]:
            if {e1.src, e1.dst} & {e2.src, e2.dst}:
                continue
            if _segments_cross(pos[e1.src], pos[e1.dst], pos[e2.src], pos[e2.dst]):
                total += 1
    return total


def swap_pass(graph: TransitionGraph) -> TransitionGraph:
    """Swap same-AOI node positions while doing so strictly reduces crossings.

    For every crossing edge pair, every (node from one edge, node from the
    other) combination homed in the same AOI is tried; a position swap is
    committed only when the total crossing count drops, so the pass always
    terminates.
    """
    best = count_crossings(graph)
    improved = True
    while improved and best > 0:
        improved = False
        edges = graph.edges
        pos = [(n.x, n.y) for n in graph.nodes]
        for i, e1 in enumerate(edges):
            for e2 in edges[i + 1:]:
                if {e1.src, e1.dst} & {e2.src, e2.dst}:
                    continue
                if not _segments_cross(pos[e1.src], pos[e1.dst], pos[e2.src], pos[e2.dst]):
                    continue
                for a in (e1.src, e1.dst):
                    for b in (e2.src, e2.dst):
                        na, nb = graph.nodes[a], graph.nodes[b]
                        if na.aoi != nb.aoi or a == b:
                            continue
                        na.x, nb.x = nb.x, na.x
                        na.y, nb.y = nb.y, na.y
                        after = count_crossings(graph)
                        if after < best:
                            best = after
                            improved = True
                            break
                        na.x, nb.x = nb.x, na.x
                        na.y, nb.y = nb.y, na.y
                    if improved:
                        break
                if improved:
                    break
            if improved:
                break
    return graph


def run_layout(graph: TransitionGraph, params: LayoutParams) -> TransitionGraph:
    """Force iterations followed by the crossing-reduction swap pass."""
    for _ in range(params.iterations):
        layout_step(graph, params)
    return swap_pass(graph)


def layout_to_json(graph: TransitionGraph) -> dict:
    """Canonical JSON form; coordinates fixed to 6 decimals for stable output."""
    return {
        "nodes": [
            {
                "id": n.id,
                "aoi": n.aoi,
                "role": n.role,
                "x": round(n.x, 6),
                "y": round(n.y, 6),
            }
            for n in graph.nodes
        ],
        "edges": [
            {
                "from": e.src,
                "to": e.dst,
                "weight": e.weight,
                "crossGroup": e.cross_group,
                "pattern": e.pattern,
            }
            for e in graph.edges
        ],
    }


def layout_json_bytes(graph: TransitionGraph) -> bytes:
    return json.dumps(layout_to_json(graph), sort_keys=True).encode("utf-8")
