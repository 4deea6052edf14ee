"""Conversion of scan-paths to character strings and run-length codes.

The pipeline is: locate every gaze sample in the AOI hierarchy to get one
character per sample, run-length encode the result, optionally project the
code onto a coarser hierarchy level, then strip blanks and short dwells to
obtain a transition string with exactly one character per visited AOI.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

from .model import BLANK_CHAR, AoiTree, ScanPath, level_char_map

DEFAULT_TAU = 6  # samples; about 100 ms at a 60 Hz recording rate


@dataclass(frozen=True)
class EncodedSequence:
    """One character per gaze sample: a leaf char or the blank char."""

    participant: str
    chars: str


class RleUnit(NamedTuple):
    char: str
    length: int

    def render(self) -> str:
        """A unit is the bare character when the run is 1, else char + count."""
        return self.char if self.length == 1 else f"{self.char}{self.length}"


@dataclass(frozen=True)
class RleSequence:
    """Maximal-run encoding; no two adjacent units share a character."""

    participant: str
    units: tuple[RleUnit, ...] = ()

    def render(self) -> str:
        return "".join(u.render() for u in self.units)


def encode_path(path: ScanPath, tree: AoiTree) -> EncodedSequence:
    """Convert a scan-path into a string, one located character per sample."""
    leaves = tree.leaves()
    chars = []
    for p in path.points:
        ch = BLANK_CHAR
        for node in leaves:
            if node.rect.contains(p.x, p.y):
                ch = node.char
                break
        chars.append(ch)
    return EncodedSequence(path.participant, "".join(chars))


def rle_encode(seq: EncodedSequence) -> RleSequence:
    units: list[RleUnit] = []
    for ch in seq.chars:
        if units and units[-1].char == ch:
            units[-1] = RleUnit(ch, units[-1].length + 1)
        else:
            units.append(RleUnit(ch, 1))
    return RleSequence(seq.participant, tuple(units))


def rle_expand(rle: RleSequence) -> EncodedSequence:
    """Inverse of rle_encode; rejects units with a non-positive run length."""
    for u in rle.units:
        if u.length < 1:
            raise ValueError(f"run length {u.length} for {u.char!r} must be >= 1")
    return EncodedSequence(rle.participant, "".join(u.char * u.length for u in rle.units))


_UNIT_RE = re.compile(r"(\D)(\d*)")


def parse_rle(text: str, participant: str = "") -> RleSequence:
    """Parse the rendered form back into units (characters are non-digits).

    Adjacent units with equal characters are merged so the no-adjacent-
    duplicates invariant holds even for hand-written input; rendered forms
    never contain them, so re-parsing a render is exact.
    """
    units: list[RleUnit] = []
    pos = 0
    for m in _UNIT_RE.finditer(text):
        if m.start() != pos:
            raise ValueError(f"unparseable run-length code at offset {pos}")
        length = int(m.group(2) or 1)
        if length < 1:
            raise ValueError(f"zero run length at offset {pos}")
        units.append(RleUnit(m.group(1), length))
        pos = m.end()
    if pos != len(text):
        raise ValueError(f"unparseable run-length code at offset {pos}")
    return RleSequence(participant, _merge_adjacent(units))


def _merge_adjacent(units: list[RleUnit]) -> tuple[RleUnit, ...]:
    merged: list[RleUnit] = []
    for u in units:
        if merged and merged[-1].char == u.char:
            merged[-1] = RleUnit(u.char, merged[-1].length + u.length)
        else:
            merged.append(u)
    return tuple(merged)


def project_to_level(rle: RleSequence, tree: AoiTree, k: int) -> RleSequence:
    """Replace each char by its level-k effective char and re-merge runs.

    The effective char of a group is that of its largest descendant leaf, so
    projecting at k = depth is the identity and projections compose: going to
    level k and then k' < k equals projecting straight to k'.
    """
    mapping = level_char_map(tree, k)
    units = [RleUnit(mapping.get(u.char, u.char), u.length) for u in rle.units]
    return RleSequence(rle.participant, _merge_adjacent(units))


def to_transition_string(rle: RleSequence, tau: int = DEFAULT_TAU) -> str:
    """Reduce a run-length code to one character per visited AOI.

    Blank units and units shorter than tau samples are dropped (a short run
    means the gaze only brushed the AOI), then runs made adjacent by the
    removal are merged so the result never repeats a character.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    kept = [u for u in rle.units if u.char != BLANK_CHAR and u.length >= tau]
    out: list[str] = []
    for u in kept:
        if not out or out[-1] != u.char:
            out.append(u.char)
    return "".join(out)
