"""Domain model for gaze recordings and hierarchical areas of interest.

An AOI is an axis-aligned rectangle on a static stimulus; AOIs can be
nested into groups, forming a tree whose leaves are the rectangles and
whose internal nodes are groups. A cut through the tree at level k yields
the set of AOIs visible at that fineness: k equal to the tree depth shows
every individual rectangle, k = 1 the coarsest grouping.

Every node carries a single display character. Leaf characters come from a
fixed alphabet; a group's character is the character of its largest-area
descendant leaf, so coarse strings stay comparable with fine ones. One
reserved character (the blank) denotes gaze outside all AOIs.

All types are immutable values; tree edits return new trees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

# Index 0 is the reserved blank character; leaves draw from the rest in
# creation order. Digits are excluded so run-length codes stay unambiguous.
BLANK_CHAR = "."
AOI_ALPHABET = (
    BLANK_CHAR
    + "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    + "abcdefghijklmnopqrstuvwxyz"
    + "ΑΒΓΔΕΖΗΘΙΚΛΜΝΞΟΠΡΣΤΥΦΧΨΩ"
    + "αβγδεζηθικλμνξοπρστυφχψω"
)


@dataclass(frozen=True)
class GazePoint:
    """One gaze sample in stimulus pixel coordinates; t is the sample index."""

    x: float
    y: float
    t: int


@dataclass(frozen=True)
class ScanPath:
    """Ordered gaze samples of one participant over one stimulus."""

    participant: str
    points: tuple[GazePoint, ...] = ()

    def __post_init__(self) -> None:
        ts = [p.t for p in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError(f"sample indices not strictly increasing for {self.participant!r}")

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Stimulus:
    """The static image participants observed. Pixels are H x W x 3 uint8."""

    width: int
    height: int
    pixels: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("stimulus dimensions must be positive")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle; containment is half-open: [x, x+w) x [y, y+h).

    The half-open convention means adjacent rectangles never both claim a
    boundary pixel, which keeps point location total and deterministic.
    """

    x: int
    y: int
    w: int
    h: int

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def bottom(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def contains(self, px: float, py: float) -> bool:
        return self.x <= px < self.right and self.y <= py < self.bottom

    def overlaps(self, other: "Rect") -> bool:
        """True when the intersection has positive area."""
        return (
            self.x < other.right
            and other.x < self.right
            and self.y < other.bottom
            and other.y < self.bottom
        )

    def union(self, other: "Rect") -> "Rect":
        x = min(self.x, other.x)
        y = min(self.y, other.y)
        return Rect(x, y, max(self.right, other.right) - x, max(self.bottom, other.bottom) - y)

    @property
    def center(self) -> tuple[float, float]:
        return self.x + self.w / 2.0, self.y + self.h / 2.0


@dataclass(frozen=True)
class AoiNode:
    """A leaf AOI (has a rect) or a group (has children).

    Group characters are derived, not chosen: a group displays the character
    of its largest-area descendant leaf (area ties go to the lowest id).
    """

    id: int
    label: str
    char: str
    rect: Rect | None = None
    children: tuple["AoiNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.rect is not None

    def walk(self) -> Iterator["AoiNode"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def leaves(self) -> list["AoiNode"]:
        return [n for n in self.walk() if n.is_leaf]


def leaf(node_id: int, label: str, rect: Rect, char: str) -> AoiNode:
    return AoiNode(id=node_id, label=label, char=char, rect=rect)


def group(node_id: int, label: str, children: tuple[AoiNode, ...]) -> AoiNode:
    """Build a group node; its char tracks the largest descendant leaf."""
    char = _effective_char(children)
    return AoiNode(id=node_id, label=label, char=char, children=tuple(children))


def largest_leaf(node: AoiNode) -> AoiNode | None:
    leaves_ = node.leaves()
    if not leaves_:
        return None
    return max(leaves_, key=lambda n: (n.rect.area, -n.id))


def _effective_char(children: tuple[AoiNode, ...]) -> str:
    leaves_ = [n for c in children for n in c.leaves()]
    if not leaves_:
        return BLANK_CHAR
    return max(leaves_, key=lambda n: (n.rect.area, -n.id)).char


def group_char_of(node: AoiNode) -> str:
    best = largest_leaf(node)
    return best.char if best is not None else BLANK_CHAR


@dataclass(frozen=True)
class AoiTree:
    """AOI hierarchy rooted at an implicit group covering all AOIs.

    The root exists even before any user grouping so that level 1 is always
    defined. Depth is the longest root-to-leaf path in edges (0 for an empty
    tree) and is not capped.
    """

    root: AoiNode

    @property
    def depth(self) -> int:
        def deepest(node: AoiNode, d: int) -> int:
            if node.is_leaf:
                return d
            if not node.children:
                return 0
            return max(deepest(c, d + 1) for c in node.children)

        return deepest(self.root, 0)

    def leaves(self) -> list[AoiNode]:
        return self.root.leaves()

    def nodes(self) -> list[AoiNode]:
        return list(self.root.walk())

    def find(self, node_id: int) -> AoiNode | None:
        for node in self.root.walk():
            if node.id == node_id:
                return node
        return None

    def parent_of(self, node_id: int) -> AoiNode | None:
        for node in self.root.walk():
            for child in node.children:
                if child.id == node_id:
                    return node
        return None

    def next_id(self) -> int:
        return max((n.id for n in self.root.walk()), default=-1) + 1

    def next_char(self) -> str:
        used = {n.char for n in self.leaves()}
        for ch in AOI_ALPHABET[1:]:
            if ch not in used:
                return ch
        raise ValueError("AOI character alphabet exhausted")


def empty_tree() -> AoiTree:
    return AoiTree(root=AoiNode(id=0, label="root", char=BLANK_CHAR))


def flat_tree(rects: list[Rect], labels: list[str] | None = None) -> AoiTree:
    """Build a tree of leaves under the root, chars assigned in list order."""
    if len(rects) >= len(AOI_ALPHABET):
        raise ValueError("AOI character alphabet exhausted")
    children = tuple(
        leaf(i + 1, labels[i] if labels else f"A{i + 1}", r, AOI_ALPHABET[i + 1])
        for i, r in enumerate(rects)
    )
    return AoiTree(root=group(0, "root", children))


class CutEntry(NamedTuple):
    """One node visible at a hierarchy level, with its display char and the
    bounding box of its descendant leaf rects."""

    node: AoiNode
    char: str
    rect: Rect


def check_level(tree: AoiTree, k: int) -> None:
    top = max(tree.depth, 1)
    if not 1 <= k <= top:
        raise ValueError(f"level {k} out of range 1..{top}")


def locate_point(p: GazePoint, tree: AoiTree) -> str:
    """Return the char of the leaf whose rect contains p, else the blank char.

    Leaf rects are disjoint and half-open, so the result is unique and total.
    """
    for node in tree.leaves():
        if node.rect.contains(p.x, p.y):
            return node.char
    return BLANK_CHAR


def leaf_bbox(node: AoiNode) -> Rect | None:
    rects = [n.rect for n in node.leaves()]
    if not rects:
        return None
    out = rects[0]
    for r in rects[1:]:
        out = out.union(r)
    return out


def cut_at_level(tree: AoiTree, k: int) -> list[CutEntry]:
    """Nodes visible at level k: leaves at depth <= k plus groups at depth k.

    Groups at depth k stand in for their entire subtree; their display char is
    the largest descendant leaf's char and their rect the subtree bounding box.
    """
    check_level(tree, k)
    out: list[CutEntry] = []

    def walk(node: AoiNode, depth: int) -> None:
        for child in node.children:
            if child.is_leaf:
                out.append(CutEntry(child, child.char, child.rect))
            elif depth + 1 == k:
                box = leaf_bbox(child)
                if box is not None:
                    out.append(CutEntry(child, child.char, box))
            else:
                walk(child, depth + 1)

    walk(tree.root, 0)
    return out


def level_char_map(tree: AoiTree, k: int) -> dict[str, str]:
    """Map every leaf char to its effective char at level k; blank maps to blank."""
    mapping = {BLANK_CHAR: BLANK_CHAR}
    for entry in cut_at_level(tree, k):
        for node in entry.node.leaves():
            mapping[node.char] = entry.char
    return mapping


def _rebuild(node: AoiNode, edit) -> AoiNode | None:
    """Apply edit(node, rebuilt_children) bottom-up; edits returning None
    drop the node from its parent's children."""
    if node.is_leaf:
        return edit(node, ())
    children = []
    for child in node.children:
        rebuilt = _rebuild(child, edit)
        if rebuilt is not None:
            children.append(rebuilt)
    return edit(node, tuple(children))


def _refresh_groups(node: AoiNode) -> AoiNode:
    def edit(n: AoiNode, children: tuple[AoiNode, ...]) -> AoiNode:
        if n.is_leaf:
            return n
        return AoiNode(id=n.id, label=n.label, char=_effective_char(children), children=children)

    return _rebuild(node, edit)


def make_group(tree: AoiTree, member_ids: list[int], label: str | None = None) -> AoiTree:
    """Insert a new group as the parent of the selected sibling nodes.

    The group takes the list position of the first selected member; the other
    members keep their relative order inside it.
    """
    if not member_ids:
        raise ValueError("empty selection")
    members = set(member_ids)
    parents = {m: tree.parent_of(m) for m in member_ids}
    if any(p is None for p in parents.values()):
        missing = [m for m, p in parents.items() if p is None]
        raise ValueError(f"unknown or root node ids: {missing}")
    parent_ids = {p.id for p in parents.values()}
    if len(parent_ids) != 1:
        raise ValueError("selected nodes are not siblings")
    parent_id = parent_ids.pop()

    new_id = tree.next_id()
    new_label = label or f"G{new_id}"

    def edit(n: AoiNode, children: tuple[AoiNode, ...]) -> AoiNode:
        if n.is_leaf:
            return n
        if n.id == parent_id:
            selected = tuple(c for c in children if c.id in members)
            first = next(c.id for c in children if c.id in members)
            rebuilt: list[AoiNode] = []
            for c in children:
                if c.id == first:
                    rebuilt.append(group(new_id, new_label, selected))
                elif c.id not in members:
                    rebuilt.append(c)
            children = tuple(rebuilt)
        return AoiNode(id=n.id, label=n.label, char=BLANK_CHAR, children=children)

    root = _rebuild(tree.root, edit)
    return AoiTree(root=_refresh_groups(root))


def ungroup(tree: AoiTree, group_id: int) -> AoiTree:
    """Dissolve a group, splicing its children into its parent at its position."""
    target = tree.find(group_id)
    if target is None or target.is_leaf or target.id == tree.root.id:
        raise ValueError(f"node {group_id} is not an ungroupable group")

    def edit(n: AoiNode, children: tuple[AoiNode, ...]) -> AoiNode:
        if n.is_leaf:
            return n
        spliced: list[AoiNode] = []
        for c in children:
            if c.id == group_id:
                spliced.extend(c.children)
            else:
                spliced.append(c)
        return AoiNode(id=n.id, label=n.label, char=BLANK_CHAR, children=tuple(spliced))

    return AoiTree(root=_refresh_groups(_rebuild(tree.root, edit)))


def add_leaf(tree: AoiTree, rect: Rect, label: str | None = None) -> AoiTree:
    """Append a new leaf under the root with the next free char."""
    node_id = tree.next_id()
    new = leaf(node_id, label or f"A{node_id}", rect, tree.next_char())
    children = tree.root.children + (new,)
    return AoiTree(root=_refresh_groups(
        AoiNode(id=tree.root.id, label=tree.root.label, char=BLANK_CHAR, children=children)))


def remove_node(tree: AoiTree, node_id: int) -> AoiTree:
    """Remove a node (and its subtree); groups left empty are removed too."""
    if tree.find(node_id) is None or node_id == tree.root.id:
        raise ValueError(f"cannot remove node {node_id}")

    def edit(n: AoiNode, children: tuple[AoiNode, ...]) -> AoiNode | None:
        if n.id == node_id:
            return None
        if n.is_leaf:
            return n
        if not children and n.id != tree.root.id:
            return None
        return AoiNode(id=n.id, label=n.label, char=BLANK_CHAR, children=children)

    return AoiTree(root=_refresh_groups(_rebuild(tree.root, edit)))


def validate_tree(tree: AoiTree, stimulus_size: tuple[int, int] | None = None) -> list[str]:
    """Check all structural invariants and return a list of violations.

    An empty list means the tree is valid. Checked: unique ids, leaf/group
    shape, positive disjoint leaf rects (optionally inside the stimulus),
    unique non-blank leaf chars, and group chars matching the largest leaf.
    """
    violations: list[str] = []
    nodes = tree.nodes()

    seen_ids: set[int] = set()
    for n in nodes:
        if n.id in seen_ids:
            violations.append(f"duplicate-id({n.id})")
        seen_ids.add(n.id)

    for n in nodes:
        if n.is_leaf and n.children:
            violations.append(f"leaf-with-children({n.id})")
        if not n.is_leaf and not n.children and n.id != tree.root.id:
            violations.append(f"empty-group({n.id})")

    leaves_ = tree.leaves()
    for n in leaves_:
        if n.rect.w <= 0 or n.rect.h <= 0:
            violations.append(f"bad-rect({n.char})")
        if n.char == BLANK_CHAR:
            violations.append(f"blank-char-leaf({n.id})")
        if len(n.char) != 1 or n.char.isdigit():
            # digits would make the run-length rendering ambiguous
            violations.append(f"bad-char({n.id})")
        if stimulus_size is not None:
            w, h = stimulus_size
            r = n.rect
            if r.x < 0 or r.y < 0 or r.right > w or r.bottom > h:
                violations.append(f"out-of-bounds({n.char})")

    for i, a in enumerate(leaves_):
        for b in leaves_[i + 1:]:
            if a.rect.overlaps(b.rect):
                violations.append(f"overlap({a.char},{b.char})")

    chars = [n.char for n in leaves_]
    for ch in sorted(set(chars)):
        if chars.count(ch) > 1:
            violations.append(f"duplicate-char({ch})")

    for n in nodes:
        if not n.is_leaf and n.leaves():
            expected = group_char_of(n)
            if n.char != expected:
                violations.append(f"group-char({n.id}): expected {expected!r}, got {n.char!r}")

    return violations


# ---------------------------------------------------------------------------
# Canonical JSON form of the hierarchy
# ---------------------------------------------------------------------------

def node_to_json(node: AoiNode) -> dict:
    return {
        "id": node.id,
        "label": node.label,
        "char": node.char,
        "rect": [node.rect.x, node.rect.y, node.rect.w, node.rect.h] if node.rect else None,
        "children": [node_to_json(c) for c in node.children],
    }


def tree_to_json(tree: AoiTree) -> dict:
    return node_to_json(tree.root)


def node_from_json(data: dict) -> AoiNode:
    rect = Rect(*data["rect"]) if data.get("rect") else None
    return AoiNode(
        id=int(data["id"]),
        label=str(data.get("label", "")),
        char=str(data["char"]),
        rect=rect,
        children=tuple(node_from_json(c) for c in data.get("children", ())),
    )


def tree_from_json(data: dict) -> AoiTree:
    return AoiTree(root=node_from_json(data))


def load_tree(path: str) -> AoiTree:
    with open(path, "r", encoding="utf-8") as fh:
        return tree_from_json(json.load(fh))


def dump_tree(tree: AoiTree, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tree_to_json(tree), fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")
