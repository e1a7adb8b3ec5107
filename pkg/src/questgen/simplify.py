"""Split complex sentences into simpler declaratives before pattern matching.

Two splits are applied: clauses joined by a coordinating conjunction, and
relative clauses attached to a noun phrase.  Output sentences reuse the label
rows of the original tokens (sliced, never re-tagged); the only synthesized
token is a terminal period.
"""

from __future__ import annotations

from .annotate import (
    EMPTY_LABELS,
    AnnotatedSentence,
    LabelSet,
    Layer,
    Token,
)

_NP_TAGS_PREFIX = ("NN", "JJ", "DT", "PRP$", "CD")
_PERIOD_CELL: dict[Layer, LabelSet] = {
    Layer.LEMMA: frozenset({"."}),
    Layer.POS: frozenset({"."}),
    Layer.POS_SIMPLE: frozenset({"."}),
    Layer.NER: EMPTY_LABELS,
    Layer.GKG: EMPTY_LABELS,
    Layer.VIAF: EMPTY_LABELS,
    Layer.SST: EMPTY_LABELS,
}


def _has_tag(s: AnnotatedSentence, i: int, prefixes: tuple[str, ...]) -> bool:
    return any(tag.startswith(prefixes) for tag in s.layers[Layer.POS][i])


def _is_verb(s: AnnotatedSentence, i: int) -> bool:
    return _has_tag(s, i, ("VB",))


def _slice(s: AnnotatedSentence, indices: list[int], suffix: str, add_period: bool) -> AnnotatedSentence:
    texts = [s.tokens[i].text for i in indices]
    layers: dict[Layer, list[LabelSet]] = {
        layer: [s.layers[layer][i] for i in indices] for layer in Layer
    }
    if add_period:
        texts.append(".")
        for layer in Layer:
            layers[layer].append(_PERIOD_CELL[layer])
    offsets = []
    pos = 0
    for text in texts:
        offsets.append(pos)
        pos += len(text) + 1
    tokens = tuple(Token(t, i, offsets[i]) for i, t in enumerate(texts))
    return AnnotatedSentence(
        source_id=f"{s.source_id}{suffix}",
        tokens=tokens,
        layers={layer: tuple(cells) for layer, cells in layers.items()},
    )


def _coordinate_split(s: AnnotatedSentence) -> list[AnnotatedSentence]:
    n = len(s.tokens)
    cc = [i for i in range(n) if "CC" in s.layers[Layer.POS][i]]
    if not cc:
        return []
    segments: list[list[int]] = []
    start = 0
    for i in cc + [n]:
        seg = [
            j for j in range(start, min(i, n)) if s.tokens[j].text not in {",", ".", "!", "?"}
        ]
        if seg:
            segments.append(seg)
        start = i + 1
    if len(segments) < 2 or not all(any(_is_verb(s, j) for j in seg) for seg in segments):
        return []
    return [
        _slice(s, seg, f"/clause{k}", add_period=True) for k, seg in enumerate(segments)
    ]


def _relative_clause_split(s: AnnotatedSentence) -> list[AnnotatedSentence]:
    n = len(s.tokens)
    for i in range(1, n):
        if "WH" not in s.layers[Layer.POS_SIMPLE][i]:
            continue
        comma_open = s.tokens[i - 1].text == ","
        np_end = i - 2 if comma_open else i - 1
        if np_end < 0 or not _has_tag(s, np_end, ("NN",)):
            continue
        np_start = np_end
        while np_start > 0 and _has_tag(s, np_start - 1, _NP_TAGS_PREFIX):
            np_start -= 1
        # clause body: tokens after the WH word up to the closing comma, the
        # next finite verb (the host's predicate), or the final punctuation
        first_verb = None
        end = n
        for j in range(i + 1, n):
            if s.tokens[j].text in {",", ".", "?", "!"}:
                end = j
                break
            if first_verb is None:
                if _is_verb(s, j):
                    first_verb = j
            elif any(t in {"VBZ", "VBD", "VBP", "MD"} for t in s.layers[Layer.POS][j]):
                end = j
                break
        if first_verb is None:
            continue
        clause = list(range(i + 1, end))
        if not clause:
            continue
        np = list(range(np_start, np_end + 1))
        extracted = _slice(s, np + clause, "/rel", add_period=True)
        dropped = set(range(i, end))
        if comma_open:
            dropped.add(i - 1)
        if comma_open and end < n and s.tokens[end].text == ",":
            dropped.add(end)
        host_idx = [j for j in range(n) if j not in dropped]
        host = None
        if any(_is_verb(s, j) for j in host_idx):
            add_period = not host_idx or s.tokens[host_idx[-1]].text not in {".", "?", "!"}
            host = _slice(s, host_idx, "/host", add_period=add_period)
        return [extracted] + ([host] if host is not None else [])
    return []


def simplify_sentence(s: AnnotatedSentence) -> list[AnnotatedSentence]:
    """Original sentence first, followed by any simplified splits."""
    out = [s]
    out.extend(_coordinate_split(s))
    out.extend(_relative_clause_split(s))
    return out
