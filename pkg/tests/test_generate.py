import pytest

from questgen.errors import QuestgenError, RuleApplicationError
from questgen.generate import (
    Alignment,
    align,
    apply_rule,
    generate_questions,
)
from questgen.morph import change_form, default_morphology
from questgen.pattern import create_cp
from questgen.rules import extract_rule


@pytest.fixture(scope="module")
def president_rule(providers):
    from questgen.annotate import annotate

    s = annotate("The president of Slovakia is Andrej Kiska.", providers, source_id="ex1")
    q = annotate("Who is the president of Slovakia?", providers, source_id="ex1/q")
    return s, extract_rule(s, q, "Andrej Kiska")


@pytest.fixture(scope="module")
def thailand_sentence(providers):
    from questgen.annotate import annotate

    return annotate("Bhumibol Adulyadej was the king of Thailand.", providers, source_id="t1")


class TestAlign:
    def test_identity_alignment(self, president_rule):
        s, rule = president_rule
        cp = create_cp(s)
        a = align(rule.sentence_cp, cp)
        assert a.slot_map == {i: i for i in range(cp.token_count)}

    def test_cross_position_entity_alignment(self, president_rule, thailand_sentence):
        s, rule = president_rule
        target = create_cp(thailand_sentence)
        a = align(rule.sentence_cp, target)
        texts = dict(enumerate(thailand_sentence.texts))
        # person slots pair with the person tokens at the opposite end
        andrej = next(i for i, t in enumerate(s.texts) if t == "Andrej")
        assert texts[a.slot_map[andrej]] == "Bhumibol"
        assert texts[a.slot_map[andrej + 1]] == "Adulyadej"
        slovakia = next(i for i, t in enumerate(s.texts) if t == "Slovakia")
        assert texts[a.slot_map[slovakia]] == "Thailand"
        is_slot = next(i for i, t in enumerate(s.texts) if t == "is")
        assert texts[a.slot_map[is_slot]] == "was"

    def test_disjoint_alignment_empty(self, president_rule, annotate_text):
        _, rule = president_rule
        target = create_cp(annotate_text("Old and new."))
        a = align(rule.sentence_cp, target)
        # nothing shared except possibly punctuation and the determiner
        assert all(rule.sentence_cp.surface[i] in ("The", "of", ".", "is")
                   for i in a.slot_map)

    def test_injective(self, president_rule, thailand_sentence):
        _, rule = president_rule
        a = align(rule.sentence_cp, create_cp(thailand_sentence))
        values = list(a.slot_map.values())
        assert len(set(values)) == len(values)


class TestApplyRule:
    def test_worked_example(self, president_rule, thailand_sentence):
        _, rule = president_rule
        a = align(rule.sentence_cp, create_cp(thailand_sentence))
        question, answer = apply_rule(rule, thailand_sentence, a)
        assert question == "Who was the king of Thailand?"
        assert answer == "Bhumibol Adulyadej"

    def test_replay_on_training_sentence(self, president_rule):
        s, rule = president_rule
        a = align(rule.sentence_cp, create_cp(s))
        question, answer = apply_rule(rule, s, a)
        assert question == "Who is the president of Slovakia?"
        assert answer == "Andrej Kiska"

    def test_guard_failure(self, providers, annotate_text):
        from questgen.annotate import annotate

        s = annotate("The president of Slovakia is Plato.", providers, source_id="g1")
        q = annotate("Who is the president of Slovakia?", providers, source_id="g1/q")
        rule = extract_rule(s, q, "Plato")
        target = annotate_text("The main currency in Europe is the Euro.")
        a = align(rule.sentence_cp, create_cp(target))
        with pytest.raises(RuleApplicationError, match="guard failed"):
            apply_rule(rule, target, a)

    def test_person_span_unmatched_is_inapplicable(self, president_rule, annotate_text):
        _, rule = president_rule
        target = annotate_text("The main currency in Europe is the Euro.")
        a = align(rule.sentence_cp, create_cp(target))
        with pytest.raises(RuleApplicationError):
            apply_rule(rule, target, a)

    def test_uncovered_slot_is_inapplicable(self, president_rule, annotate_text):
        _, rule = president_rule
        target = annotate_text("Copper is old.")
        a = align(rule.sentence_cp, create_cp(target))
        with pytest.raises(RuleApplicationError):
            apply_rule(rule, target, a)


class TestChangeForm:
    def test_irregular_past(self):
        assert change_form("is", "be", "VBD") == "was"

    def test_verb_base_form(self):
        assert change_form("comes", "come", "VB") == "come"

    def test_non_inflecting_fallback(self):
        assert change_form("Slovakia", "Slovakia", "NN") == "Slovakia"

    def test_unknown_form_keeps_surface(self):
        assert change_form("Slovakia", "Slovakia", "UH") == "Slovakia"

    def test_case_forms(self):
        assert change_form("The", "the", "lc") == "the"
        assert change_form("who", "who", "cap") == "Who"

    def test_regular_rules(self):
        morph = default_morphology()
        assert morph.change_form("visited", "visit", "VBZ") == "visits"
        assert morph.change_form("play", "play", "VBD") == "played"
        assert morph.change_form("study", "study", "VBZ") == "studies"


class TestGenerateQuestions:
    def test_worked_example_top_candidate(self, worked_example_store, thailand_sentence):
        candidates = generate_questions(
            [thailand_sentence], worked_example_store, min_similarity=0.1
        )
        assert candidates
        assert candidates[0].text == "Who was the king of Thailand?"
        assert candidates[0].answer == "Bhumibol Adulyadej"

    def test_empty_store_errors(self, thailand_sentence):
        from questgen.rules import RuleStore

        with pytest.raises(QuestgenError):
            generate_questions([thailand_sentence], RuleStore())

    def test_unseen_shape_with_high_threshold(self, worked_example_store, annotate_text):
        s = annotate_text("Old and new castles stood here quietly together.")
        assert generate_questions([s], worked_example_store, min_similarity=0.9) == []

    def test_replay_includes_training_question(self, corpus_store, providers):
        from questgen.annotate import annotate
        from questgen.util import detokenize

        for rule in corpus_store.rules.values():
            sentence = annotate(
                detokenize(rule.sentence_cp.surface), providers, source_id=f"replay-{rule.id}"
            )
            candidates = generate_questions(
                [sentence], corpus_store, min_similarity=0.1, simplify=False
            )
            expected = detokenize(rule.question_cp.surface)
            own = [c for c in candidates if c.rule_id == rule.id]
            assert own, f"rule {rule.id} produced nothing on its own sentence"
            assert expected in {c.text for c in own}
            top = max(own, key=lambda c: c.match.score)
            assert top.match.score == 1.0

    def test_answer_is_substring_of_sentence(self, corpus_store, annotate_text):
        sentences = [
            annotate_text("Marie Curie was born in Warsaw.", source_id="g1"),
            annotate_text("The capital of Thailand is Bangkok.", source_id="g2"),
            annotate_text("Viktor Petrov plays hockey.", source_id="g3"),
        ]
        candidates = generate_questions(sentences, corpus_store, min_similarity=0.3)
        assert candidates
        for c in candidates:
            assert c.answer
            assert c.answer in c.sentence_text
            assert c.text.endswith("?")

    def test_lower_threshold_never_reduces_candidates(self, corpus_store, annotate_text):
        s = annotate_text("Marie Curie was born in Warsaw.")
        low = generate_questions([s], corpus_store, min_similarity=0.2)
        high = generate_questions([s], corpus_store, min_similarity=0.6)
        low_keys = {(c.text, c.rule_id) for c in low}
        high_keys = {(c.text, c.rule_id) for c in high}
        assert high_keys <= low_keys

    def test_deterministic(self, corpus_store, annotate_text):
        s = annotate_text("Marie Curie was born in Warsaw.")
        a = generate_questions([s], corpus_store, min_similarity=0.3)
        b = generate_questions([s], corpus_store, min_similarity=0.3)
        assert [(c.text, c.answer, c.rule_id) for c in a] == [
            (c.text, c.answer, c.rule_id) for c in b
        ]

    def test_simplified_clause_contributes(self, corpus_store, annotate_text):
        s = annotate_text("Peter Sagan comes from Slovakia and he rides for Bora.")
        candidates = generate_questions([s], corpus_store, min_similarity=0.3)
        assert any(c.text == "Where does Peter Sagan come from?" for c in candidates)


class TestAlignmentType:
    def test_rejects_non_injective(self):
        with pytest.raises(QuestgenError):
            Alignment({0: 1, 1: 1})
