"""Composite patterns, layered similarity and the pattern hierarchy index.

A composite pattern is the per-sentence matrix of label rows (one row per
layer).  Similarity between two patterns counts matched label cells against
comparable cells, summed over all layers; equal-length patterns are compared
position by position, unequal lengths through a longest-common-subsequence
match per layer.

The hierarchy indexes rules by simplified-POS key, then POS key.  Lookup
visits the exact simplified-POS root first and the remaining roots in the
order of an upper bound on their best attainable score, so it returns exactly
the ranking an exhaustive similarity scan would.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .annotate import (
    DENSE_LAYERS,
    EMPTY_LABELS,
    AnnotatedSentence,
    LabelSet,
    Layer,
)
from .errors import QuestgenError

log = logging.getLogger(__name__)

SPARSE_LAYERS = tuple(l for l in Layer if l not in DENSE_LAYERS)


@dataclass(frozen=True)
class CompositePattern:
    token_count: int
    cells: dict[Layer, tuple[LabelSet, ...]]
    surface: tuple[str, ...]


@dataclass(frozen=True)
class SimilarityBreakdown:
    per_layer: dict[Layer, tuple[int, int]]
    matched_total: int
    comparable_total: int
    score: float


def create_cp(sentence: AnnotatedSentence) -> CompositePattern:
    """Copy the sentence's label rows into an immutable pattern matrix."""
    n = len(sentence.tokens)
    cells: dict[Layer, tuple[LabelSet, ...]] = {}
    for layer in Layer:
        row = sentence.layers[layer]
        if len(row) != n:
            raise QuestgenError(
                f"{sentence.source_id}: layer {layer.value} length {len(row)} != {n}"
            )
        cells[layer] = tuple(row)
    return CompositePattern(token_count=n, cells=cells, surface=sentence.texts)


# --- cell comparison ----------------------------------------------------------

def cells_intersect(a: LabelSet, b: LabelSet, layer: Layer) -> bool:
    if not a or not b:
        return False
    if layer is Layer.LEMMA:
        return not {x.lower() for x in a}.isdisjoint(y.lower() for y in b)
    return not a.isdisjoint(b)


def lcs_length(a: Sequence, b: Sequence, eq: Callable) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b):
            curr.append(prev[j] + 1 if eq(x, y) else max(curr[j], prev[j + 1]))
        prev = curr
    return prev[-1]


def lcs_pairs(a: Sequence, b: Sequence, eq: Callable) -> list[tuple[int, int]]:
    """Index pairs of one longest common subsequence, chosen deterministically."""
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return []
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if eq(a[i], b[j]):
                table[i][j] = table[i + 1][j + 1] + 1
            else:
                table[i][j] = max(table[i + 1][j], table[i][j + 1])
    pairs = []
    i = j = 0
    while i < n and j < m:
        if eq(a[i], b[j]) and table[i][j] == table[i + 1][j + 1] + 1:
            pairs.append((i, j))
            i += 1
            j += 1
        elif table[i + 1][j] >= table[i][j + 1]:
            i += 1
        else:
            j += 1
    return pairs


def layer_match(a: CompositePattern, b: CompositePattern, layer: Layer) -> tuple[int, int]:
    """(matched, comparable) cell counts for one layer."""
    ca, cb = a.cells[layer], b.cells[layer]
    if a.token_count == b.token_count:
        comparable = sum(1 for x, y in zip(ca, cb) if x or y)
        matched = sum(1 for x, y in zip(ca, cb) if cells_intersect(x, y, layer))
        return matched, comparable
    sa = [cell for cell in ca if cell]
    sb = [cell for cell in cb if cell]
    matched = lcs_length(sa, sb, lambda x, y: cells_intersect(x, y, layer))
    return matched, max(len(sa), len(sb))


def similarity(a: CompositePattern, b: CompositePattern) -> SimilarityBreakdown:
    per_layer: dict[Layer, tuple[int, int]] = {}
    matched_total = comparable_total = 0
    for layer in Layer:
        m, c = layer_match(a, b, layer)
        per_layer[layer] = (m, c)
        matched_total += m
        comparable_total += c
    score = matched_total / comparable_total if comparable_total else 0.0
    return SimilarityBreakdown(per_layer, matched_total, comparable_total, score)


# --- pattern keys ---------------------------------------------------------------

def render_cell_key(cell: LabelSet) -> str:
    return "|".join(sorted(cell)) if cell else "_"


def layer_key(cp: CompositePattern, layer: Layer) -> str:
    """Canonical string key of one layer row (labels space-joined, multi-values sorted)."""
    return " ".join(render_cell_key(cell) for cell in cp.cells[layer])


def parse_layer_key(key: str) -> tuple[LabelSet, ...]:
    cells = []
    for chunk in key.split(" "):
        cells.append(EMPTY_LABELS if chunk == "_" else frozenset(chunk.split("|")))
    return tuple(cells)


# --- hierarchy -------------------------------------------------------------------

@dataclass
class _Root:
    key: str
    row: tuple[LabelSet, ...]
    children: dict[str, dict[int, CompositePattern]] = field(default_factory=dict)

    def entries(self):
        for leaf in self.children.values():
            yield from leaf.items()


class PatternHierarchy:
    """Two-level index: simplified-POS key -> POS key -> {rule id: sentence pattern}."""

    def __init__(self):
        self.roots: dict[str, _Root] = {}

    def __len__(self) -> int:
        return sum(len(leaf) for root in self.roots.values() for leaf in root.children.values())

    def iter_entries(self):
        for root in self.roots.values():
            for pos_key, leaf in root.children.items():
                for rule_id, cp in leaf.items():
                    yield root.key, pos_key, rule_id, cp

    def insert(self, cp: CompositePattern, rule_id: int) -> None:
        ps_key = layer_key(cp, Layer.POS_SIMPLE)
        pos_key = layer_key(cp, Layer.POS)
        root = self.roots.get(ps_key)
        if root is None:
            root = self.roots[ps_key] = _Root(ps_key, cp.cells[Layer.POS_SIMPLE])
        leaf = root.children.setdefault(pos_key, {})
        if rule_id in leaf:
            log.warning("rule %s already indexed under POS key %r; ignoring", rule_id, pos_key)
            return
        leaf[rule_id] = cp

    # Upper bound on the similarity of any pattern under `root` against `cp`.
    # Dense layers: lemma caps at min length, POS at the simplified-POS match
    # (a POS match implies a simplified-POS match), denominators at max length.
    # Sparse layers: matches cap at the query's labeled-cell count, which is
    # also the smallest possible denominator.
    def _root_bound(self, cp: CompositePattern, root: _Root) -> float:
        nq = cp.token_count
        nr = len(root.row)
        qs = cp.cells[Layer.POS_SIMPLE]
        if nq == nr:
            m_ps = sum(
                1 for x, y in zip(qs, root.row) if cells_intersect(x, y, Layer.POS_SIMPLE)
            )
        else:
            m_ps = lcs_length(
                qs, root.row, lambda x, y: cells_intersect(x, y, Layer.POS_SIMPLE)
            )
        sparse = sum(sum(1 for cell in cp.cells[layer] if cell) for layer in SPARSE_LAYERS)
        numerator = min(nq, nr) + 2 * m_ps + sparse
        denominator = 3 * max(nq, nr) + sparse
        return numerator / denominator if denominator else 0.0

    def lookup(
        self,
        cp: CompositePattern,
        min_similarity: float,
        max_results: int,
    ) -> list[tuple[int, SimilarityBreakdown]]:
        """Rules ranked by similarity to `cp`, best first.

        Stage 1 scores the exact simplified-POS root; further roots are visited
        in upper-bound order only while they could still contribute, so the
        result equals an exhaustive ranking of the whole store.
        """
        if not self.roots:
            return []
        query_key = layer_key(cp, Layer.POS_SIMPLE)
        ordered = sorted(
            self.roots.values(),
            key=lambda r: (r.key != query_key, -self._root_bound(cp, r), r.key),
        )
        results: list[tuple[float, int, SimilarityBreakdown]] = []
        for root in ordered:
            bound = self._root_bound(cp, root)
            if bound < min_similarity - 1e-9:
                break
            if len(results) >= max_results:
                results.sort(key=lambda item: (-item[0], item[1]))
                kth = results[max_results - 1][0]
                if bound < kth - 1e-9:
                    break
            for rule_id, rule_cp in root.entries():
                breakdown = similarity(cp, rule_cp)
                if breakdown.score >= min_similarity:
                    results.append((breakdown.score, rule_id, breakdown))
        results.sort(key=lambda item: (-item[0], item[1]))
        return [(rule_id, breakdown) for _, rule_id, breakdown in results[:max_results]]


def hierarchy_insert(h: PatternHierarchy, cp: CompositePattern, rule_id: int) -> PatternHierarchy:
    h.insert(cp, rule_id)
    return h


def hierarchy_lookup(
    h: PatternHierarchy,
    cp: CompositePattern,
    min_similarity: float = 0.5,
    max_results: int = 8,
) -> list[tuple[int, SimilarityBreakdown]]:
    if not 0.0 <= min_similarity <= 1.0:
        raise QuestgenError(f"min_similarity must be in [0, 1], got {min_similarity}")
    if max_results < 1:
        raise QuestgenError(f"max_results must be >= 1, got {max_results}")
    return h.lookup(cp, min_similarity, max_results)
