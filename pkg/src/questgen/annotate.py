"""Sentence splitting, tokenization and layered token annotation.

A sentence is represented as a list of tokens plus one label row per layer
(lemma, POS, simplified POS, NER, GKG, Viaf, SST).  Cells are sets of label
strings; an empty set means "no label".  The lemma and POS rows are always
fully populated, and the simplified-POS row is derived from the POS row.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import AnnotationError, InputError
from .util import atomic_write, detokenize

log = logging.getLogger(__name__)

LabelSet = frozenset
EMPTY_LABELS: LabelSet = frozenset()


class Layer(str, Enum):
    LEMMA = "lemma"
    POS = "pos"
    POS_SIMPLE = "pos_simple"
    NER = "ner"
    GKG = "gkg"
    VIAF = "viaf"
    SST = "sst"


#: layers that carry a label on every token
DENSE_LAYERS = (Layer.LEMMA, Layer.POS, Layer.POS_SIMPLE)
#: column order of the annotation TSV (POS_SIMPLE is derived, never stored)
FILE_LAYERS = (Layer.LEMMA, Layer.POS, Layer.NER, Layer.GKG, Layer.VIAF, Layer.SST)


@dataclass(frozen=True)
class Token:
    text: str
    index: int
    char_offset: int


@dataclass(frozen=True)
class AnnotatedSentence:
    source_id: str
    tokens: tuple[Token, ...]
    layers: dict[Layer, tuple[LabelSet, ...]]

    def __post_init__(self):
        n = len(self.tokens)
        if n == 0:
            raise AnnotationError(f"{self.source_id}: sentence has no tokens")
        for layer in Layer:
            row = self.layers.get(layer)
            if row is None or len(row) != n:
                raise AnnotationError(
                    f"{self.source_id}: layer {layer.value} has "
                    f"{0 if row is None else len(row)} cells for {n} tokens"
                )
        for layer in (Layer.LEMMA, Layer.POS):
            if any(not cell for cell in self.layers[layer]):
                raise AnnotationError(f"{self.source_id}: empty {layer.value} cell")
        derived = tuple(
            frozenset(simplify_pos(tag) for tag in cell) for cell in self.layers[Layer.POS]
        )
        if self.layers[Layer.POS_SIMPLE] != derived:
            raise AnnotationError(
                f"{self.source_id}: pos_simple row is not the simplification of the pos row"
            )

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    def detokenize(self) -> str:
        return detokenize(self.texts)


# --- POS simplification -----------------------------------------------------

_POS_SIMPLE_MAP = {
    "VB": "VB", "VBD": "VB", "VBG": "VB", "VBN": "VB", "VBP": "VB", "VBZ": "VB",
    "NN": "NN", "NNS": "NN", "NNP": "NN", "NNPS": "NN",
    "JJ": "JJ", "JJR": "JJ", "JJS": "JJ",
    "RB": "RB", "RBR": "RB", "RBS": "RB",
    "PRP": "PRP", "PRP$": "PRP",
    "WDT": "WH", "WP": "WH", "WP$": "WH", "WRB": "WH",
}

_KNOWN_TAGS = set(_POS_SIMPLE_MAP) | {
    "CC", "CD", "DT", "EX", "FW", "IN", "LS", "MD", "PDT", "POS", "RP", "SYM",
    "TO", "UH", "WH", ".", ",", ":", "``", "''", "-LRB-", "-RRB-", "$", "#",
}

_warned_tags: set[str] = set()


def simplify_pos(pos_label: str) -> str:
    """Collapse a Penn-style tag into its coarse category (all verb forms -> VB etc.)."""
    mapped = _POS_SIMPLE_MAP.get(pos_label)
    if mapped is not None:
        return mapped
    if pos_label not in _KNOWN_TAGS and pos_label not in _warned_tags:
        _warned_tags.add(pos_label)
        log.warning("unknown POS tag %r kept as-is", pos_label)
    return pos_label


# --- sentence splitting and tokenization ------------------------------------

_ABBREVIATIONS = {
    "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "e.g.", "i.e.", "etc.",
    "vs.", "no.", "fig.", "jr.", "sr.",
}


def split_sentences(text: str) -> list[str]:
    """Split raw text into sentence strings.

    Boundaries are sentence-final punctuation followed by whitespace and a
    capital letter, with a small abbreviation stop-list.
    """
    if not text or not text.strip():
        return []
    sentences: list[str] = []
    start = 0
    for m in re.finditer(r"[.!?]+", text):
        end = m.end()
        if not re.match(r"\s+[\"'(]?[A-Z]", text[end:]):
            continue
        last_word = text[:end].rsplit(None, 1)[-1].lower()
        if last_word in _ABBREVIATIONS:
            continue
        chunk = text[start:end].strip()
        if chunk:
            sentences.append(chunk)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


_TRAILING_PUNCT = ".,?!;:"


def tokenize(sentence: str) -> list[Token]:
    """Whitespace tokenization with terminal punctuation and possessive 's split off."""
    if not sentence or not sentence.strip():
        raise InputError("empty sentence")
    tokens: list[Token] = []

    def push(text: str, offset: int) -> None:
        tokens.append(Token(text, len(tokens), offset))

    for m in re.finditer(r"\S+", sentence):
        chunk, start = m.group(0), m.start()
        trail: list[tuple[str, int]] = []
        end = len(chunk)
        while end > 1 and chunk[end - 1] in _TRAILING_PUNCT:
            end -= 1
            trail.append((chunk[end], start + end))
        core = chunk[:end]
        if len(core) > 2 and core.lower().endswith("'s"):
            push(core[:-2], start)
            push(core[-2:], start + len(core) - 2)
        elif core:
            push(core, start)
        for text, off in reversed(trail):
            push(text, off)
    return tokens


# --- annotation --------------------------------------------------------------

def annotate(sentence: str, providers: Sequence, source_id: str = "s0") -> AnnotatedSentence:
    """Run every provider over the tokenized sentence and assemble the layer rows.

    Lemma and POS providers are required and their failures are fatal; failures
    of semantic providers degrade to empty cells with a warning.  When NER and
    GKG disagree on a token both labels are kept in their own rows.
    """
    tokens = tuple(tokenize(sentence))
    by_layer = {p.layer: p for p in providers}
    for required in (Layer.LEMMA, Layer.POS):
        if required not in by_layer:
            raise AnnotationError(f"missing required {required.value} provider")

    layers: dict[Layer, tuple[LabelSet, ...]] = {}
    for layer in Layer:
        if layer is Layer.POS_SIMPLE:
            continue
        provider = by_layer.get(layer)
        if provider is None:
            layers[layer] = tuple(EMPTY_LABELS for _ in tokens)
            continue
        try:
            row = [frozenset(cell) for cell in provider.labels(tokens)]
        except Exception as exc:
            if layer in (Layer.LEMMA, Layer.POS):
                raise AnnotationError(f"{layer.value} provider failed: {exc}") from exc
            log.warning("%s provider failed on %r: %s", layer.value, sentence, exc)
            row = [EMPTY_LABELS for _ in tokens]
        if len(row) != len(tokens):
            raise AnnotationError(
                f"{layer.value} provider returned {len(row)} cells for {len(tokens)} tokens"
            )
        layers[layer] = tuple(row)

    layers[Layer.POS_SIMPLE] = tuple(
        frozenset(simplify_pos(tag) for tag in cell) for cell in layers[Layer.POS]
    )
    return AnnotatedSentence(source_id=source_id, tokens=tokens, layers=layers)


# --- TSV annotation files -----------------------------------------------------

_N_COLUMNS = 2 + len(FILE_LAYERS)  # INDEX TEXT LEMMA POS NER GKG VIAF SST


def _parse_cell(raw: str) -> LabelSet:
    if raw == "_":
        return EMPTY_LABELS
    return frozenset(raw.split("|"))


def _render_cell(cell: LabelSet) -> str:
    return "|".join(sorted(cell)) if cell else "_"


def load_annotations(path: str | Path) -> list[AnnotatedSentence]:
    """Read a TSV annotation file (blank-line separated blocks with `# id=` headers)."""
    path = Path(path)
    sentences: list[AnnotatedSentence] = []
    seen_ids: set[str] = set()
    block_id: str | None = None
    rows: list[tuple[str, list[LabelSet]]] = []

    def flush(lineno: int) -> None:
        nonlocal block_id, rows
        if not rows:
            block_id = None
            return
        sid = block_id if block_id is not None else f"block{len(sentences)}"
        if sid in seen_ids:
            raise InputError(f"{path}:{lineno}: duplicate source_id {sid!r}")
        seen_ids.add(sid)
        texts = [text for text, _ in rows]
        offsets = []
        pos = 0
        for text in texts:
            offsets.append(pos)
            pos += len(text) + 1
        tokens = tuple(Token(t, i, offsets[i]) for i, t in enumerate(texts))
        layers: dict[Layer, tuple[LabelSet, ...]] = {}
        for col, layer in enumerate(FILE_LAYERS):
            layers[layer] = tuple(cells[col] for _, cells in rows)
        layers[Layer.POS_SIMPLE] = tuple(
            frozenset(simplify_pos(tag) for tag in cell) for cell in layers[Layer.POS]
        )
        try:
            sentences.append(AnnotatedSentence(source_id=sid, tokens=tokens, layers=layers))
        except AnnotationError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
        block_id = None
        rows = []

    with open(path, encoding="utf-8") as fh:
        lineno = 0
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                flush(lineno)
                continue
            if line.startswith("#"):
                m = re.match(r"#\s*id=(.*)\s*$", line)
                if m:
                    block_id = m.group(1).strip()
                continue
            cols = line.split("\t")
            if len(cols) != _N_COLUMNS:
                raise InputError(
                    f"{path}:{lineno}: expected {_N_COLUMNS} columns, got {len(cols)}"
                )
            index_str, text = cols[0], cols[1]
            try:
                index = int(index_str)
            except ValueError:
                raise InputError(f"{path}:{lineno}: bad token index {index_str!r}") from None
            if index != len(rows):
                raise InputError(f"{path}:{lineno}: token index {index} out of order")
            if not text:
                raise InputError(f"{path}:{lineno}: empty token text")
            rows.append((text, [_parse_cell(c) for c in cols[2:]]))
        flush(lineno + 1)
    return sentences


def save_annotations(sentences: Iterable[AnnotatedSentence], path: str | Path) -> None:
    """Write sentences in the TSV annotation format (inverse of load_annotations)."""
    blocks = []
    for s in sentences:
        lines = [f"# id={s.source_id}"]
        for token in s.tokens:
            cells = [_render_cell(s.layers[layer][token.index]) for layer in FILE_LAYERS]
            lines.append("\t".join([str(token.index), token.text] + cells))
        blocks.append("\n".join(lines))
    atomic_write(path, "\n\n".join(blocks) + "\n")
