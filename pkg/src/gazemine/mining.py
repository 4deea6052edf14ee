"""N-gram pattern extraction over transition strings and participant comparison.

A pattern is a length-N window of a transition string, i.e. an ordered visit
of N AOIs at the chosen hierarchy level. Tables aggregate pattern counts per
participant; comparisons classify patterns as common or unique between two
participants and score whole participants with cosine similarity over their
pattern-count vectors.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple


def extract_ngrams(s: str, n: int) -> Counter:
    """All sliding length-n windows of s; empty when s is shorter than n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Counter(s[i:i + n] for i in range(len(s) - n + 1))


@dataclass(frozen=True)
class PatternTable:
    """Per-participant counts of length-n patterns at hierarchy level `level`.

    `counts` maps pattern -> participant -> count, with zero counts omitted.
    Totals and participant support are derived. Iteration order of patterns is
    fixed by sorted(): descending total, ties broken by the pattern string.
    """

    level: int
    n: int
    participants: tuple[str, ...]
    counts: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def patterns(self) -> list[str]:
        return list(self.counts)

    def total(self, pattern: str) -> int:
        return sum(self.counts.get(pattern, {}).values())

    def support(self, pattern: str) -> int:
        return len(self.counts.get(pattern, {}))

    def count(self, pattern: str, participant: str) -> int:
        return self.counts.get(pattern, {}).get(participant, 0)

    def vector(self, participant: str) -> dict[str, int]:
        return {p: by[participant] for p, by in self.counts.items() if participant in by}

    def sorted_patterns(self, by_participant: str | None = None) -> list[str]:
        """Patterns in display order: descending count (a participant's, or the
        total), ties resolved by the pattern string for determinism."""
        if by_participant is not None:
            key = lambda p: (-self.count(p, by_participant), -self.total(p), p)
        else:
            key = lambda p: (-self.total(p), p)
        return sorted(self.counts, key=key)


def build_table(strings: Mapping[str, str], n: int, level: int) -> PatternTable:
    """Count every length-n pattern per participant; totals follow by summing."""
    participants = tuple(sorted(strings))
    counts: dict[str, dict[str, int]] = {}
    for participant in participants:
        for pattern, c in extract_ngrams(strings[participant], n).items():
            counts.setdefault(pattern, {})[participant] = c
    return PatternTable(level=level, n=n, participants=participants, counts=counts)


def filter_by_threshold(table: PatternTable, op: str, threshold: int) -> PatternTable:
    """Keep patterns whose total is strictly more (or less) than the threshold."""
    if op not in ("more", "less"):
        raise ValueError(f"op must be 'more' or 'less', got {op!r}")
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    if op == "more":
        keep = {p for p in table.counts if table.total(p) > threshold}
    else:
        keep = {p for p in table.counts if table.total(p) < threshold}
    return PatternTable(
        level=table.level,
        n=table.n,
        participants=table.participants,
        counts={p: dict(by) for p, by in table.counts.items() if p in keep},
    )


class CommonEntry(NamedTuple):
    pattern: str
    base: int       # min of the two counts; the shared gray part of the bar
    surplus: int    # absolute count difference stacked on top
    owner: str | None  # participant owning the surplus; None when counts tie


class UniqueEntry(NamedTuple):
    pattern: str
    count: int


@dataclass(frozen=True)
class DiffReport:
    """Classification of two participants' patterns into common and unique.

    The three patterns lists partition the union of both supports. Entries are
    sorted by the height of the bar they would draw (base + surplus for common,
    count for unique), descending, ties by pattern string.
    """

    pair: tuple[str, str]
    common: tuple[CommonEntry, ...]
    unique_p: tuple[UniqueEntry, ...]
    unique_q: tuple[UniqueEntry, ...]


def diff(table: PatternTable, p: str, q: str) -> DiffReport:
    if p == q:
        raise ValueError("participants to compare must differ")
    for participant in (p, q):
        if participant not in table.participants:
            raise KeyError(f"unknown participant {participant!r}")

    common: list[CommonEntry] = []
    unique_p: list[UniqueEntry] = []
    unique_q: list[UniqueEntry] = []
    for pattern in table.counts:
        cp, cq = table.count(pattern, p), table.count(pattern, q)
        if cp > 0 and cq > 0:
            owner = p if cp > cq else q if cq > cp else None
            common.append(CommonEntry(pattern, min(cp, cq), abs(cp - cq), owner))
        elif cp > 0:
            unique_p.append(UniqueEntry(pattern, cp))
        elif cq > 0:
            unique_q.append(UniqueEntry(pattern, cq))

    common.sort(key=lambda e: (-(e.base + e.surplus), e.pattern))
    unique_p.sort(key=lambda e: (-e.count, e.pattern))
    unique_q.sort(key=lambda e: (-e.count, e.pattern))
    return DiffReport((p, q), tuple(common), tuple(unique_p), tuple(unique_q))


def cosine(table: PatternTable, p: str, q: str) -> float:
    """Cosine of the two pattern-count vectors; 0.0 when either is all-zero."""
    vp, vq = table.vector(p), table.vector(q)
    norm_p = math.sqrt(sum(c * c for c in vp.values()))
    norm_q = math.sqrt(sum(c * c for c in vq.values()))
    if norm_p == 0 or norm_q == 0:
        return 0.0
    dot = sum(c * vq[pattern] for pattern, c in vp.items() if pattern in vq)
    return dot / (norm_p * norm_q)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric pairwise cosine similarities plus the extreme off-diagonal pairs."""

    participants: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]
    argmin: tuple[str, str]
    argmax: tuple[str, str]


def similarity_matrix(table: PatternTable) -> SimilarityMatrix:
    participants = table.participants
    if len(participants) < 2:
        raise ValueError("similarity matrix needs at least 2 participants")
    values = tuple(
        tuple(cosine(table, p, q) for q in participants) for p in participants
    )
    best = worst = (0, 1)
    for i in range(len(participants)):
        for j in range(i + 1, len(participants)):
            if values[i][j] > values[best[0]][best[1]]:
                best = (i, j)
            if values[i][j] < values[worst[0]][worst[1]]:
                worst = (i, j)
    return SimilarityMatrix(
        participants=participants,
        values=values,
        argmin=(participants[worst[0]], participants[worst[1]]),
        argmax=(participants[best[0]], participants[best[1]]),
    )


def patterns_through_aoi(table: PatternTable, char: str, mode: str) -> list[str]:
    """Patterns that start from, pass over, or arrive at the given AOI char.

    "Passes" is inclusive of the endpoints: a pattern starting at the AOI also
    passes it.
    """
    if mode == "starts":
        pred = lambda p: p.startswith(char)
    elif mode == "arrives":
        pred = lambda p: p.endswith(char)
    elif mode == "passes":
        pred = lambda p: char in p
    else:
        raise ValueError(f"mode must be starts, passes, or arrives, got {mode!r}")
    return [p for p in table.sorted_patterns() if pred(p)]


def table_to_json(table: PatternTable, similarity: SimilarityMatrix | None = None) -> dict:
    """Canonical JSON export of a table, optionally with the similarity matrix."""
    out: dict = {
        "level": table.level,
        "n": table.n,
        "participants": list(table.participants),
        "patterns": [
            {
                "chars": p,
                "total": table.total(p),
                "support": table.support(p),
                "perParticipant": dict(sorted(table.counts[p].items())),
            }
            for p in table.sorted_patterns()
        ],
    }
    if similarity is not None:
        out["similarity"] = [[round(v, 6) for v in row] for row in similarity.values]
        out["argmin"] = list(similarity.argmin)
        out["argmax"] = list(similarity.argmax)
    else:
        out["similarity"] = None
    return out
