"""Annotation providers: small built-in lexicons plus file-backed fixtures.

The pipeline never calls external taggers or web services; instead a bundled
word lexicon handles lemma/POS and a gazetteer of known entities fills the
semantic layers.  A file-backed provider serves layers recorded in annotation
TSV files, which keeps golden tests deterministic.
"""

from __future__ import annotations

import logging
from importlib import resources
from pathlib import Path
from typing import Sequence

from .annotate import (
    EMPTY_LABELS,
    Layer,
    Token,
    load_annotations,
)
from .errors import InputError

log = logging.getLogger(__name__)

_PUNCT_TAGS = {".": ".", "?": ".", "!": ".", ",": ",", ";": ":", ":": ":", "'s": "POS"}


def _read_tsv(path) -> list[list[str]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            rows.append(line.split("\t"))
    return rows


class Lexicon:
    """Word table mapping a lowercased surface form to (lemma, POS tag)."""

    def __init__(self, entries: dict[str, tuple[str, str]]):
        self.entries = entries

    @classmethod
    def from_file(cls, path) -> "Lexicon":
        entries = {}
        for cols in _read_tsv(path):
            if len(cols) != 3:
                raise InputError(f"{path}: lexicon rows need WORD LEMMA POS, got {cols!r}")
            word, lemma, pos = cols
            entries[word.lower()] = (lemma, pos)
        return cls(entries)


class Gazetteer:
    """Phrase table carrying semantic labels (NER/GKG/VIAF/SST) for known entities."""

    LAYERS = (Layer.NER, Layer.GKG, Layer.VIAF, Layer.SST)

    def __init__(self, phrases: dict[tuple[str, ...], dict[Layer, frozenset]]):
        self.phrases = phrases
        self.max_len = max((len(k) for k in phrases), default=1)

    @classmethod
    def from_file(cls, path) -> "Gazetteer":
        phrases = {}
        for cols in _read_tsv(path):
            if len(cols) != 5:
                raise InputError(
                    f"{path}: gazetteer rows need PHRASE NER GKG VIAF SST, got {cols!r}"
                )
            key = tuple(cols[0].split(" "))
            labels = {}
            for layer, raw in zip(cls.LAYERS, cols[1:]):
                labels[layer] = EMPTY_LABELS if raw == "_" else frozenset(raw.split("|"))
            phrases[key] = labels
        return cls(phrases)

    def spans(self, texts: Sequence[str]) -> list[tuple[int, int, dict[Layer, frozenset]]]:
        """Greedy longest-match phrase spans as (start, length, labels)."""
        found = []
        i = 0
        while i < len(texts):
            for length in range(min(self.max_len, len(texts) - i), 0, -1):
                labels = self.phrases.get(tuple(texts[i : i + length]))
                if labels is not None:
                    found.append((i, length, labels))
                    i += length
                    break
            else:
                i += 1
        return found


class LemmaProvider:
    layer = Layer.LEMMA

    def __init__(self, lexicon: Lexicon):
        self.lexicon = lexicon

    def labels(self, tokens: Sequence[Token]):
        out = []
        for t in tokens:
            entry = self.lexicon.entries.get(t.text.lower())
            out.append({entry[0]} if entry else {t.text})
        return out


class PosProvider:
    layer = Layer.POS

    def __init__(self, lexicon: Lexicon, gazetteer: Gazetteer | None = None):
        self.lexicon = lexicon
        self.gazetteer = gazetteer
        self._warned: set[str] = set()

    def labels(self, tokens: Sequence[Token]):
        texts = [t.text for t in tokens]
        in_phrase = set()
        if self.gazetteer is not None:
            for start, length, _ in self.gazetteer.spans(texts):
                in_phrase.update(range(start, start + length))
        out = []
        for i, t in enumerate(tokens):
            tag = _PUNCT_TAGS.get(t.text)
            if tag is None:
                entry = self.lexicon.entries.get(t.text.lower())
                if entry is not None:
                    tag = entry[1]
                elif i in in_phrase:
                    tag = "NNP"
                elif t.text[0].isupper():
                    tag = "NNP"
                elif t.text[0].isdigit():
                    tag = "CD"
                else:
                    tag = "NN"
                    if t.text not in self._warned:
                        self._warned.add(t.text)
                        log.warning("word %r not in lexicon, tagged NN", t.text)
            out.append({tag})
        return out


class GazetteerProvider:
    def __init__(self, layer: Layer, gazetteer: Gazetteer):
        self.layer = layer
        self.gazetteer = gazetteer

    def labels(self, tokens: Sequence[Token]):
        out = [set() for _ in tokens]
        for start, length, labels in self.gazetteer.spans([t.text for t in tokens]):
            cell = labels.get(self.layer, EMPTY_LABELS)
            if not cell:
                continue
            for i in range(start, start + length):
                out[i] = set(cell)
        return out


class FileBackedProvider:
    """Serve a layer recorded in an annotation TSV, keyed by the token sequence."""

    def __init__(self, layer: Layer, rows: dict[tuple[str, ...], tuple]):
        self.layer = layer
        self.rows = rows

    @classmethod
    def for_file(cls, path, layers: Sequence[Layer] | None = None) -> list["FileBackedProvider"]:
        sentences = load_annotations(path)
        wanted = tuple(layers) if layers is not None else tuple(
            l for l in Layer if l is not Layer.POS_SIMPLE
        )
        providers = []
        for layer in wanted:
            rows = {s.texts: s.layers[layer] for s in sentences}
            providers.append(cls(layer, rows))
        return providers

    def labels(self, tokens: Sequence[Token]):
        key = tuple(t.text for t in tokens)
        row = self.rows.get(key)
        if row is None:
            raise KeyError(f"no recorded {self.layer.value} annotation for {key!r}")
        return [set(cell) for cell in row]


def data_path(name: str) -> Path:
    """Path of a bundled data file."""
    return Path(str(resources.files("questgen") / "data" / name))


def default_providers() -> list:
    """Providers backed by the bundled lexicon and gazetteer."""
    lexicon = Lexicon.from_file(data_path("lexicon.tsv"))
    gazetteer = Gazetteer.from_file(data_path("gazetteer.tsv"))
    providers = [LemmaProvider(lexicon), PosProvider(lexicon, gazetteer)]
    providers.extend(GazetteerProvider(layer, gazetteer) for layer in Gazetteer.LAYERS)
    return providers
