"""Question generation: align stored rules to new sentences and replay edits.

Alignment pairs rule slots with target tokens layer by layer, most specific
first (NER, GKG, SST, lemma, POS).  Each layer pass is an in-order LCS match
followed by a relaxed same-label sweep, so entities can pair across positions
(a person at the end of the training sentence still aligns to a person at the
front of the target).  A rule applies only when every slot it needs is aligned
and the answer guard holds; failures are skipped silently during batch
generation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .annotate import AnnotatedSentence, LabelSet, Layer, simplify_pos
from .errors import QuestgenError, RuleApplicationError
from .morph import CASE_FORMS, Morphology, default_morphology
from .pattern import (
    CompositePattern,
    SimilarityBreakdown,
    cells_intersect,
    create_cp,
    hierarchy_lookup,
    lcs_pairs,
)
from .rules import (
    RuleStore,
    TransformationRule,
    question_provenance,
    replay_edits,
)
from .simplify import simplify_sentence
from .util import detokenize

log = logging.getLogger(__name__)

#: layer priority for alignment, most specific first
ALIGN_PRIORITY = (Layer.NER, Layer.GKG, Layer.SST, Layer.LEMMA, Layer.POS)

DEFAULT_MIN_SIMILARITY = 0.5
DEFAULT_MAX_RULES = 8

# NER and GKG label different vocabularies (location vs country/city), so the
# disagreement check compares coarse categories: location~country~city~place
# agree, person vs city is a real conflict.
_SEMANTIC_CATEGORY = {
    "country": "location",
    "city": "location",
    "place": "location",
    "location": "location",
    "person": "person",
}


def _categories(cell: LabelSet) -> set[str]:
    return {_SEMANTIC_CATEGORY.get(label, label) for label in cell}


def semantic_disagreement(ner: LabelSet, gkg: LabelSet) -> bool:
    """True when both layers label the token but name incompatible categories."""
    if not ner or not gkg:
        return False
    return _categories(ner).isdisjoint(_categories(gkg))


@dataclass(frozen=True)
class Alignment:
    """Injective partial map from rule sentence slots to target token indices."""

    slot_map: dict[int, int]

    def __post_init__(self):
        values = list(self.slot_map.values())
        if len(set(values)) != len(values):
            raise QuestgenError("alignment is not injective")

    def covers(self, slots: Iterable[int]) -> bool:
        return all(s in self.slot_map for s in slots)


def align(rule_cp: CompositePattern, target_cp: CompositePattern) -> Alignment:
    """Greedy layered slot matching between a rule's sentence pattern and a target."""
    slot_map: dict[int, int] = {}
    used_targets: set[int] = set()
    for layer in ALIGN_PRIORITY:
        rule_cells = rule_cp.cells[layer]
        target_cells = target_cp.cells[layer]
        a_idx = [i for i in range(rule_cp.token_count) if i not in slot_map and rule_cells[i]]
        b_idx = [
            j for j in range(target_cp.token_count) if j not in used_targets and target_cells[j]
        ]
        if not a_idx or not b_idx:
            continue
        pairs = lcs_pairs(
            [rule_cells[i] for i in a_idx],
            [target_cells[j] for j in b_idx],
            lambda x, y: cells_intersect(x, y, layer),
        )
        for ai, bj in pairs:
            slot_map[a_idx[ai]] = b_idx[bj]
            used_targets.add(b_idx[bj])
        if layer is Layer.POS:
            continue
        # relaxed sweep: pair leftovers with intersecting labels even out of order
        for i in a_idx:
            if i in slot_map:
                continue
            for j in b_idx:
                if j in used_targets:
                    continue
                if cells_intersect(rule_cells[i], target_cells[j], layer):
                    slot_map[i] = j
                    used_targets.add(j)
                    break
    return Alignment(slot_map)


# --- rule application ---------------------------------------------------------------

@dataclass
class QuestionCandidate:
    text: str
    answer: str
    rule_id: int
    source_id: str
    match: SimilarityBreakdown
    estimated_score: float = 0.0
    sentence_text: str = ""
    question_cp: CompositePattern | None = None
    semantic_conflict: bool = False


def _first(cell: LabelSet, default: str = "") -> str:
    return sorted(cell)[0] if cell else default


def _apply_detailed(
    rule: TransformationRule,
    target: AnnotatedSentence,
    alignment: Alignment,
    morphology: Morphology | None = None,
) -> tuple[str, str, CompositePattern, bool]:
    """(question text, answer text, question pattern, answer NER/GKG conflict flag)."""
    morph = morphology or default_morphology()
    stable, moves, inserts, forms = rule.slot_roles()
    needed = set(stable) | {op.src_slot for op in moves} | set(forms)
    needed |= {op.src_slot for op in rule.edits if hasattr(op, "src_slot")}
    needed |= set(rule.answer.slots)
    for slot in needed:
        if slot not in alignment.slot_map:
            raise RuleApplicationError(f"inapplicable rule {rule.id}: slot {slot} unaligned")

    answer_targets = sorted(alignment.slot_map[s] for s in rule.answer.slots)
    if answer_targets != list(range(answer_targets[0], answer_targets[-1] + 1)):
        raise RuleApplicationError(f"inapplicable rule {rule.id}: answer span not contiguous")
    guard = rule.answer.guard
    if guard is not None:
        layer, label = guard
        for t in answer_targets:
            if label not in target.layers[layer][t]:
                raise RuleApplicationError(
                    f"guard failed for rule {rule.id}: token {target.tokens[t].text!r} "
                    f"lacks {layer.value}={label}"
                )

    def surface_of(slot: int) -> str:
        return target.tokens[alignment.slot_map[slot]].text

    def inflect(slot: int, form: str) -> str:
        t = alignment.slot_map[slot]
        lemma = _first(target.layers[Layer.LEMMA][t], target.tokens[t].text)
        return morph.change_form(target.tokens[t].text, lemma, form)

    out_texts = replay_edits(rule, surface_of, inflect)
    question_cells = _question_cells(rule, target, alignment, forms)
    if out_texts[-1] != "?":
        out_texts.append("?")
        for layer in Layer:
            question_cells[layer] = question_cells[layer] + (
                rule.question_cp.cells[layer][-1],
            )
    question_cp = CompositePattern(
        token_count=len(out_texts),
        cells=question_cells,
        surface=tuple(out_texts),
    )
    answer_text = detokenize(target.tokens[t].text for t in answer_targets)

    conflict = any(
        semantic_disagreement(target.layers[Layer.NER][t], target.layers[Layer.GKG][t])
        for t in answer_targets
    )
    return detokenize(out_texts), answer_text, question_cp, conflict


def _question_cells(
    rule: TransformationRule,
    target: AnnotatedSentence,
    alignment: Alignment,
    forms: dict[int, str],
) -> dict[Layer, tuple]:
    """Label rows for the generated question.

    Positions mirror the rule's question pattern: carried slots take the target
    token's labels (POS overridden by a ChangeForm tag), literal inserts take
    the stored question labels.
    """
    cells: dict[Layer, list] = {layer: [] for layer in Layer}
    for kind, ref, _text in question_provenance(rule):
        if kind == "insert":
            for layer in Layer:
                cells[layer].append(rule.question_cp.cells[layer][ref])
            continue
        t = alignment.slot_map[ref]
        form = forms.get(ref)
        for layer in Layer:
            if form is not None and form not in CASE_FORMS:
                if layer is Layer.POS:
                    cells[layer].append(frozenset({form}))
                    continue
                if layer is Layer.POS_SIMPLE:
                    cells[layer].append(frozenset({simplify_pos(form)}))
                    continue
            cells[layer].append(target.layers[layer][t])
    return {layer: tuple(row) for layer, row in cells.items()}


def apply_rule(
    rule: TransformationRule,
    target: AnnotatedSentence,
    alignment: Alignment,
    morphology: Morphology | None = None,
) -> tuple[str, str]:
    """Replay the rule against an aligned target; returns (question, answer)."""
    question, answer, _, _ = _apply_detailed(rule, target, alignment, morphology)
    return question, answer


def generate_questions(
    sentences: Sequence[AnnotatedSentence],
    store: RuleStore,
    min_similarity: float = DEFAULT_MIN_SIMILARITY,
    max_rules_per_sentence: int = DEFAULT_MAX_RULES,
    morphology: Morphology | None = None,
    simplify: bool = True,
) -> list[QuestionCandidate]:
    """Candidates for every sentence (and its simplifications), in retrieval order."""
    if not store.rules:
        raise QuestgenError("empty rule store")
    morph = morphology or default_morphology()
    candidates: list[QuestionCandidate] = []
    for sentence in sentences:
        variants = simplify_sentence(sentence) if simplify else [sentence]
        for variant in variants:
            cp = create_cp(variant)
            matches = hierarchy_lookup(store.hierarchy, cp, min_similarity, max_rules_per_sentence)
            for rule_id, breakdown in matches:
                rule = store.rules[rule_id]
                alignment = align(rule.sentence_cp, cp)
                try:
                    question, answer, question_cp, conflict = _apply_detailed(
                        rule, variant, alignment, morph
                    )
                except RuleApplicationError as exc:
                    log.debug("%s", exc)
                    continue
                candidates.append(
                    QuestionCandidate(
                        text=question,
                        answer=answer,
                        rule_id=rule_id,
                        source_id=sentence.source_id,
                        match=breakdown,
                        sentence_text=variant.detokenize(),
                        question_cp=question_cp,
                        semantic_conflict=conflict,
                    )
                )
    return candidates
