"""Transformation rules: extraction from sentence-question pairs and storage.

A rule pairs the sentence pattern with the question pattern and records an
edit script addressed by sentence slots: Remove drops a slot, Insert places a
literal question token, Move repositions a carried slot, ChangeForm inflects
a carried slot.  Slots not touched by any edit and outside the answer span
carry over in sentence order.  Replaying the script against the rule's own
sentence must reproduce the training question verbatim; the same script is
replayed against new sentences through a slot alignment during generation.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .annotate import (
    AnnotatedSentence,
    LabelSet,
    Layer,
    Token,
    annotate,
    simplify_pos,
)
from .errors import ExtractionError, InputError, QuestgenError
from .morph import default_morphology
from .pattern import (
    CompositePattern,
    PatternHierarchy,
    cells_intersect,
    create_cp,
    layer_key,
    lcs_pairs,
)
from .util import atomic_write

log = logging.getLogger(__name__)

STORE_VERSION = 1


@dataclass(frozen=True)
class Remove:
    src_slot: int


@dataclass(frozen=True)
class Insert:
    text: str
    dst: int


@dataclass(frozen=True)
class Move:
    src_slot: int
    dst: int


@dataclass(frozen=True)
class ChangeForm:
    src_slot: int
    form: str


EditOp = Remove | Insert | Move | ChangeForm


@dataclass(frozen=True)
class AnswerSpanSpec:
    start_slot: int
    end_slot: int
    guard: tuple[Layer, str] | None = None

    def __post_init__(self):
        if self.start_slot > self.end_slot:
            raise QuestgenError("answer span start after end")

    @property
    def slots(self) -> range:
        return range(self.start_slot, self.end_slot + 1)


@dataclass
class TransformationRule:
    id: int
    sentence_cp: CompositePattern
    question_cp: CompositePattern
    edits: tuple[EditOp, ...]
    answer: AnswerSpanSpec
    origin: str = "trained"
    application_count: int = 1
    success_sum: float = 1.0

    @property
    def success_rate(self) -> float:
        if self.application_count == 0:
            return 0.0
        return self.success_sum / self.application_count

    def signature(self) -> tuple:
        return (
            layer_key(self.sentence_cp, Layer.POS),
            layer_key(self.question_cp, Layer.POS),
            tuple(_op_record(op) for op in self.edits),
        )

    def slot_roles(self) -> tuple[list[int], list[Move], list[Insert], dict[int, str]]:
        """Partition sentence slots: (stable carried slots, move/insert ops, form map)."""
        removed = {op.src_slot for op in self.edits if isinstance(op, Remove)}
        moves = [op for op in self.edits if isinstance(op, Move)]
        inserts = [op for op in self.edits if isinstance(op, Insert)]
        forms = {op.src_slot: op.form for op in self.edits if isinstance(op, ChangeForm)}
        moved = {op.src_slot for op in moves}
        answer = set(self.answer.slots)
        stable = [
            s
            for s in range(self.sentence_cp.token_count)
            if s not in removed and s not in moved and s not in answer
        ]
        return stable, moves, inserts, forms


def question_provenance(rule: TransformationRule) -> list[tuple[str, int, str | None]]:
    """Where each question position comes from.

    Returns one entry per question position: ("insert", dst, literal_text) for
    inserted tokens, ("slot", src_slot, None) for carried sentence slots.
    Stable slots are laid out in sentence order, then moves and inserts are
    placed at their recorded positions in ascending order.
    """
    stable, moves, inserts, _ = rule.slot_roles()
    events: list[tuple[int, tuple[str, int, str | None]]] = [
        (op.dst, ("insert", op.dst, op.text)) for op in inserts
    ]
    events += [(op.dst, ("slot", op.src_slot, None)) for op in moves]
    provenance: list[tuple[str, int, str | None]] = [("slot", s, None) for s in stable]
    for dst, item in sorted(events, key=lambda e: e[0]):
        provenance.insert(min(dst, len(provenance)), item)
    return provenance


def replay_edits(
    rule: TransformationRule,
    surface_of: Callable[[int], str],
    inflect: Callable[[int, str], str] | None = None,
) -> list[str]:
    """Rebuild the question token sequence from slot surfaces.

    `surface_of(slot)` yields the carried token text for a sentence slot;
    `inflect(slot, form)` applies a ChangeForm (defaults to case handling only).
    """
    forms = {op.src_slot: op.form for op in rule.edits if isinstance(op, ChangeForm)}

    def render(slot: int) -> str:
        text = surface_of(slot)
        form = forms.get(slot)
        if form is None:
            return text
        if inflect is not None:
            return inflect(slot, form)
        if form == "lc":
            return text.lower()
        if form == "cap":
            return text[:1].upper() + text[1:]
        return text

    out = [
        text if kind == "insert" else render(ref)
        for kind, ref, text in question_provenance(rule)
    ]
    if out:
        out[0] = out[0][:1].upper() + out[0][1:]
    return out


# --- extraction -----------------------------------------------------------------

def _lemma_cells(s: AnnotatedSentence) -> tuple[LabelSet, ...]:
    return s.layers[Layer.LEMMA]


def _lemma_eq(a: LabelSet, b: LabelSet) -> bool:
    return cells_intersect(a, b, Layer.LEMMA)


def _longest_increasing(seq: Sequence[int]) -> set[int]:
    """Positions of one longest strictly increasing subsequence (deterministic)."""
    if not seq:
        return set()
    best_len = [1] * len(seq)
    prev = [-1] * len(seq)
    for i in range(len(seq)):
        for j in range(i):
            if seq[j] < seq[i] and best_len[j] + 1 > best_len[i]:
                best_len[i] = best_len[j] + 1
                prev[i] = j
    end = max(range(len(seq)), key=lambda i: (best_len[i], -i))
    keep = set()
    while end != -1:
        keep.add(end)
        end = prev[end]
    return keep


def _find_answer_span(
    sentence: AnnotatedSentence, aligned: dict[int, int], answer_text: str | None
) -> tuple[int, int] | None:
    n = len(sentence.tokens)
    if answer_text:
        wanted = [t.text for t in _tokenize_answer(answer_text)]
        texts = [t.text for t in sentence.tokens]
        for fold in (False, True):
            hay = [t.lower() for t in texts] if fold else texts
            needle = [w.lower() for w in wanted] if fold else wanted
            for i in range(n - len(needle) + 1):
                if hay[i : i + len(needle)] == needle:
                    return i, i + len(needle) - 1
        log.warning("answer text %r not found in sentence; falling back to span inference",
                    answer_text)

    unaligned = [i for i in range(n) if i not in aligned]

    def runs(indices: list[int], keep: Callable[[int], bool]) -> list[tuple[int, int]]:
        spans = []
        start = None
        prev_i = None
        for i in indices:
            if not keep(i):
                continue
            if start is not None and prev_i == i - 1:
                prev_i = i
            else:
                if start is not None:
                    spans.append((start, prev_i))
                start = prev_i = i
        if start is not None:
            spans.append((start, prev_i))
        return spans

    def semantic(i: int) -> bool:
        return bool(sentence.layers[Layer.NER][i] or sentence.layers[Layer.GKG][i])

    def nounish(i: int) -> bool:
        return any(tag.startswith("NN") for tag in sentence.layers[Layer.POS][i])

    for keep in (semantic, nounish):
        spans = runs(unaligned, keep)
        if spans:
            return max(spans, key=lambda sp: (sp[1] - sp[0], -sp[0]))
    return None


def _tokenize_answer(text: str) -> list[Token]:
    from .annotate import tokenize

    return tokenize(text)


_GUARD_PRIORITY = (Layer.NER, Layer.GKG, Layer.SST)


def _strongest_guard(sentence: AnnotatedSentence, span: tuple[int, int]) -> tuple[Layer, str] | None:
    slots = range(span[0], span[1] + 1)
    for layer in _GUARD_PRIORITY:
        cells = [sentence.layers[layer][i] for i in slots]
        if not all(cells):
            continue
        shared = frozenset.intersection(*cells)
        if shared:
            return layer, sorted(shared)[0]
        counts: dict[str, int] = {}
        for cell in cells:
            for label in cell:
                counts[label] = counts.get(label, 0) + 1
        label = min(counts, key=lambda lb: (-counts[lb], lb))
        return layer, label
    return None


def extract_rule(
    sentence: AnnotatedSentence,
    question: AnnotatedSentence,
    answer_text: str | None = None,
) -> TransformationRule:
    """Derive the edit script and answer span from one sentence-question pair."""
    q_tokens = question.tokens
    if q_tokens[-1].text != "?":
        raise ExtractionError(
            f"unalignable pair {sentence.source_id!r}: question does not end with '?'"
        )
    s_lem, q_lem = _lemma_cells(sentence), _lemma_cells(question)
    pairs = lcs_pairs(s_lem, q_lem, _lemma_eq)
    if len(pairs) < 2:
        raise ExtractionError(
            f"unalignable pair {sentence.source_id!r}: fewer than two shared lemmas"
        )
    aligned = dict(pairs)
    taken_q = set(aligned.values())
    # pair leftover same-lemma tokens that the in-order pass missed (verbs that
    # moved to the front of the question, determiners, etc.)
    for i in range(len(sentence.tokens)):
        if i in aligned:
            continue
        for j in range(len(q_tokens)):
            if j in taken_q:
                continue
            if _lemma_eq(s_lem[i], q_lem[j]):
                aligned[i] = j
                taken_q.add(j)
                break

    span = _find_answer_span(sentence, aligned, answer_text)
    if span is None:
        raise ExtractionError(f"no answer span in {sentence.source_id!r}")
    span_slots = set(range(span[0], span[1] + 1))
    for slot in span_slots & aligned.keys():
        taken_q.discard(aligned[slot])
        del aligned[slot]
    guard = _strongest_guard(sentence, span)

    removes = [
        Remove(i)
        for i in range(len(sentence.tokens))
        if i not in aligned and i not in span_slots
    ]
    changeforms: list[ChangeForm] = []
    for slot in sorted(aligned):
        j = aligned[slot]
        s_text, q_text = sentence.tokens[slot].text, q_tokens[j].text
        if s_text == q_text:
            continue
        if s_text.lower() == q_text.lower():
            if j == 0:
                continue  # initial capitalization is applied when rendering
            changeforms.append(ChangeForm(slot, "lc" if q_text == q_text.lower() else "cap"))
        else:
            changeforms.append(ChangeForm(slot, sorted(question.layers[Layer.POS][j])[0]))

    kept = sorted(aligned)
    stable_positions = _longest_increasing([aligned[s] for s in kept])
    moves = [
        Move(slot, aligned[slot])
        for pos, slot in enumerate(kept)
        if pos not in stable_positions
    ]
    moves.sort(key=lambda op: op.dst)
    inserts = [
        Insert(q_tokens[j].text, j) for j in range(len(q_tokens)) if j not in taken_q
    ]
    edits: tuple[EditOp, ...] = tuple(removes) + tuple(changeforms) + tuple(moves) + tuple(inserts)

    rule = TransformationRule(
        id=-1,
        sentence_cp=create_cp(sentence),
        question_cp=create_cp(question),
        edits=edits,
        answer=AnswerSpanSpec(span[0], span[1], guard),
    )
    morph = default_morphology()

    def inflect(slot: int, form: str) -> str:
        lemma = sorted(sentence.layers[Layer.LEMMA][slot])[0]
        return morph.change_form(sentence.tokens[slot].text, lemma, form)

    replayed = replay_edits(rule, lambda slot: sentence.tokens[slot].text, inflect)
    expected = [t.text for t in q_tokens]
    if replayed != expected:
        raise ExtractionError(
            f"replay mismatch for {sentence.source_id!r}: {replayed!r} != {expected!r}"
        )
    return rule


# --- store -----------------------------------------------------------------------

class RuleStore:
    """Unique transformation rules plus the hierarchy index over their patterns.

    Reads are lock-free; mutations (adding rules, feedback statistics) go
    through `mutate()`, a single-writer gate.
    """

    def __init__(self):
        self.rules: dict[int, TransformationRule] = {}
        self.hierarchy = PatternHierarchy()
        self.next_id = 1
        self.version = STORE_VERSION
        self.failures: list[tuple[str, str]] = []
        self._signatures: dict[tuple, int] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.rules)

    def mutate(self):
        return self._lock

    def add_rule(self, rule: TransformationRule) -> TransformationRule | None:
        """Insert a rule unless an identical one is already stored."""
        with self._lock:
            sig = rule.signature()
            if sig in self._signatures:
                return None
            rule.id = self.next_id
            self.next_id += 1
            self.rules[rule.id] = rule
            self._signatures[sig] = rule.id
            self.hierarchy.insert(rule.sentence_cp, rule.id)
            return rule

    def max_application_count(self) -> int:
        return max((r.application_count for r in self.rules.values()), default=0)


def _normalize_pair(record, index: int) -> tuple[str, str, str, str | None]:
    if isinstance(record, dict):
        pair_id = str(record.get("id", f"p{index}"))
        return pair_id, record["sentence"], record["question"], record.get("answer")
    sentence, question, *rest = record
    return f"p{index}", sentence, question, rest[0] if rest else None


def train(pairs: Iterable, providers: Sequence) -> RuleStore:
    """Extract a rule from every pair, deduplicate, collect non-fatal failures."""
    store = RuleStore()
    count = 0
    for index, record in enumerate(pairs):
        count += 1
        pair_id, sentence_text, question_text, answer_text = _normalize_pair(record, index)
        try:
            sentence = annotate(sentence_text, providers, source_id=pair_id)
            question = annotate(question_text, providers, source_id=f"{pair_id}/q")
            rule = extract_rule(sentence, question, answer_text)
        except QuestgenError as exc:
            store.failures.append((pair_id, str(exc)))
            log.warning("skipping pair %s: %s", pair_id, exc)
            continue
        store.add_rule(rule)
    if count == 0:
        raise InputError("empty training dataset")
    if not store.rules:
        raise QuestgenError("no rules could be extracted from the training dataset")
    return store


def load_pairs(path: str | Path) -> list[dict]:
    """Read a JSON-lines training file of {id, sentence, question, answer?} records."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if "sentence" not in record or "question" not in record:
                raise InputError(f"{path}:{lineno}: record needs sentence and question")
            record.setdefault("id", f"p{lineno}")
            pairs.append(record)
    return pairs


# --- serialization -----------------------------------------------------------------

def _op_record(op: EditOp) -> tuple:
    if isinstance(op, Remove):
        return ("remove", op.src_slot)
    if isinstance(op, Insert):
        return ("insert", op.text, op.dst)
    if isinstance(op, Move):
        return ("move", op.src_slot, op.dst)
    return ("change_form", op.src_slot, op.form)


def _op_to_json(op: EditOp) -> dict:
    if isinstance(op, Remove):
        return {"op": "remove", "slot": op.src_slot}
    if isinstance(op, Insert):
        return {"op": "insert", "text": op.text, "dst": op.dst}
    if isinstance(op, Move):
        return {"op": "move", "slot": op.src_slot, "dst": op.dst}
    return {"op": "change_form", "slot": op.src_slot, "form": op.form}


def _op_from_json(data: dict) -> EditOp:
    kind = data.get("op")
    if kind == "remove":
        return Remove(data["slot"])
    if kind == "insert":
        return Insert(data["text"], data["dst"])
    if kind == "move":
        return Move(data["slot"], data["dst"])
    if kind == "change_form":
        return ChangeForm(data["slot"], data["form"])
    raise InputError(f"unknown edit op {kind!r}")


def _cp_to_json(cp: CompositePattern) -> dict:
    return {
        "tokens": list(cp.surface),
        "layers": {
            layer.value: [sorted(cell) for cell in cp.cells[layer]]
            for layer in Layer
            if layer is not Layer.POS_SIMPLE
        },
    }


def _cp_from_json(data: dict) -> CompositePattern:
    texts = data["tokens"]
    cells: dict[Layer, tuple] = {}
    for layer in Layer:
        if layer is Layer.POS_SIMPLE:
            continue
        raw = data["layers"][layer.value]
        if len(raw) != len(texts):
            raise InputError("pattern layer length mismatch")
        cells[layer] = tuple(frozenset(cell) for cell in raw)
    cells[Layer.POS_SIMPLE] = tuple(
        frozenset(simplify_pos(tag) for tag in cell) for cell in cells[Layer.POS]
    )
    return CompositePattern(token_count=len(texts), cells=cells, surface=tuple(texts))


def _rule_to_json(rule: TransformationRule) -> dict:
    guard = rule.answer.guard
    return {
        "id": rule.id,
        "origin": rule.origin,
        "sentence": _cp_to_json(rule.sentence_cp),
        "question": _cp_to_json(rule.question_cp),
        "edits": [_op_to_json(op) for op in rule.edits],
        "answer": {
            "start": rule.answer.start_slot,
            "end": rule.answer.end_slot,
            "guard": None if guard is None else {"layer": guard[0].value, "label": guard[1]},
        },
        "application_count": rule.application_count,
        "success_sum": rule.success_sum,
    }


def _rule_from_json(data: dict) -> TransformationRule:
    raw_guard = data["answer"].get("guard")
    guard = None if raw_guard is None else (Layer(raw_guard["layer"]), raw_guard["label"])
    return TransformationRule(
        id=data["id"],
        sentence_cp=_cp_from_json(data["sentence"]),
        question_cp=_cp_from_json(data["question"]),
        edits=tuple(_op_from_json(op) for op in data["edits"]),
        answer=AnswerSpanSpec(data["answer"]["start"], data["answer"]["end"], guard),
        origin=data["origin"],
        application_count=data["application_count"],
        success_sum=data["success_sum"],
    )


def save_store(store: RuleStore, path: str | Path) -> None:
    doc = {
        "version": store.version,
        "next_id": store.next_id,
        "rules": [_rule_to_json(store.rules[rid]) for rid in sorted(store.rules)],
    }
    atomic_write(path, json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n")


def load_store(path: str | Path) -> RuleStore:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: corrupt store at offset {exc.pos}: {exc.msg}") from exc
    version = doc.get("version")
    if version != STORE_VERSION:
        raise InputError(f"{path}: unsupported store version {version!r} (expected {STORE_VERSION})")
    store = RuleStore()
    store.next_id = doc.get("next_id", 1)
    for raw in doc.get("rules", []):
        rule = _rule_from_json(raw)
        if rule.id in store.rules:
            raise InputError(f"{path}: duplicate rule id {rule.id}")
        store.rules[rule.id] = rule
        store._signatures[rule.signature()] = rule.id
        store.hierarchy.insert(rule.sentence_cp, rule.id)
    return store
