import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from questgen.annotate import EMPTY_LABELS, Layer, load_annotations, simplify_pos
from questgen.errors import QuestgenError
from questgen.pattern import (
    CompositePattern,
    PatternHierarchy,
    create_cp,
    hierarchy_insert,
    hierarchy_lookup,
    layer_key,
    layer_match,
    parse_layer_key,
    similarity,
)

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def table3_cps():
    return [create_cp(s) for s in load_annotations(DATA / "table3.tsv")]


# --- random pattern generator (shared by oracle tests) --------------------------

POS_TAGS = ["DT", "NN", "NNS", "NNP", "VB", "VBZ", "VBD", "IN", "JJ", "CC", "."]
LEMMAS = ["the", "cat", "dog", "city", "run", "be", "of", "in", "big", "old", "."]
SEM = ["person", "location", "country", "city", "role", "place"]


def random_cp(rng: random.Random, min_len=3, max_len=9) -> CompositePattern:
    n = rng.randint(min_len, max_len)
    lemma, pos, ner, gkg, viaf, sst = [], [], [], [], [], []
    for _ in range(n):
        lemma.append(frozenset({rng.choice(LEMMAS)}))
        pos.append(frozenset({rng.choice(POS_TAGS)}))
        for row, p in ((ner, 0.25), (gkg, 0.25), (viaf, 0.1), (sst, 0.2)):
            if rng.random() < p:
                labels = {rng.choice(SEM)}
                if rng.random() < 0.2:
                    labels.add(rng.choice(SEM))
                row.append(frozenset(labels))
            else:
                row.append(EMPTY_LABELS)
    cells = {
        Layer.LEMMA: tuple(lemma),
        Layer.POS: tuple(pos),
        Layer.POS_SIMPLE: tuple(frozenset(simplify_pos(t) for t in cell) for cell in pos),
        Layer.NER: tuple(ner),
        Layer.GKG: tuple(gkg),
        Layer.VIAF: tuple(viaf),
        Layer.SST: tuple(sst),
    }
    surface = tuple(sorted(cell)[0] for cell in lemma)
    return CompositePattern(token_count=n, cells=cells, surface=surface)


def brute_force_lookup(store_cps, query, min_similarity, max_results):
    scored = []
    for rule_id, cp in store_cps.items():
        breakdown = similarity(query, cp)
        if breakdown.score >= min_similarity:
            scored.append((breakdown.score, rule_id))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [rule_id for _, rule_id in scored[:max_results]]


# --- tests ------------------------------------------------------------------------


class TestCreateCp:
    def test_table2_pos_row(self):
        (sagan,) = load_annotations(DATA / "table2.tsv")
        cp = create_cp(sagan)
        pos = [sorted(c)[0] for c in cp.cells[Layer.POS]]
        assert pos[:5] == ["NNP", "NNP", "VBZ", "IN", "NNP"]
        assert pos[5] == "."

    def test_minimal_sentence(self, annotate_text):
        cp = create_cp(annotate_text("Go."))
        assert cp.token_count == 2

    def test_deterministic(self, annotate_text):
        s = annotate_text("Peter Sagan comes from Slovakia.")
        assert create_cp(s) == create_cp(s)


class TestLayerMatch:
    def test_table3_rows(self, table3_cps):
        a, b = table3_cps
        assert layer_match(a, b, Layer.LEMMA) == (3, 6)
        assert layer_match(a, b, Layer.POS) == (6, 6)
        assert layer_match(a, b, Layer.POS_SIMPLE) == (6, 6)
        assert layer_match(a, b, Layer.NER) == (0, 2)
        assert layer_match(a, b, Layer.SST) == (1, 3)
        assert layer_match(a, b, Layer.GKG) == (1, 2)

    def test_reflexive_full_layer(self, table3_cps):
        a, _ = table3_cps
        n = a.token_count
        assert layer_match(a, a, Layer.LEMMA) == (n, n)
        assert layer_match(a, a, Layer.POS) == (n, n)

    def test_unequal_lengths_use_lcs(self, annotate_text):
        a = create_cp(annotate_text("Peter Sagan comes from Slovakia."))
        b = create_cp(annotate_text("Peter Sagan comes from beautiful Slovakia."))
        matched, comparable = layer_match(a, b, Layer.LEMMA)
        assert (matched, comparable) == (6, 7)

    def test_bounds_on_random_patterns(self):
        rng = random.Random(7)
        for _ in range(200):
            a, b = random_cp(rng), random_cp(rng)
            for layer in Layer:
                matched, comparable = layer_match(a, b, layer)
                assert 0 <= matched <= comparable <= max(a.token_count, b.token_count)


class TestSimilarity:
    def test_table3_totals(self, table3_cps):
        a, b = table3_cps
        breakdown = similarity(a, b)
        assert breakdown.matched_total == 17
        assert breakdown.comparable_total == 25
        assert breakdown.score == pytest.approx(0.68, abs=1e-12)

    def test_identity(self, table3_cps):
        a, _ = table3_cps
        assert similarity(a, a).score == 1.0

    def test_disjoint(self):
        def tiny(lemmas, tags):
            cells = {
                Layer.LEMMA: tuple(frozenset({w}) for w in lemmas),
                Layer.POS: tuple(frozenset({t}) for t in tags),
                Layer.POS_SIMPLE: tuple(frozenset({simplify_pos(t)}) for t in tags),
                Layer.NER: tuple(EMPTY_LABELS for _ in lemmas),
                Layer.GKG: tuple(EMPTY_LABELS for _ in lemmas),
                Layer.VIAF: tuple(EMPTY_LABELS for _ in lemmas),
                Layer.SST: tuple(EMPTY_LABELS for _ in lemmas),
            }
            return CompositePattern(len(lemmas), cells, tuple(lemmas))

        a = tiny(["cat", "run"], ["NN", "VBZ"])
        b = tiny(["of", "the"], ["IN", "DT"])
        assert similarity(a, b).score == 0.0

    def test_symmetric_on_random_patterns(self):
        rng = random.Random(11)
        for _ in range(300):
            a, b = random_cp(rng), random_cp(rng)
            assert similarity(a, b).score == pytest.approx(similarity(b, a).score, abs=1e-12)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=50, deadline=None)
    def test_score_in_unit_interval(self, seed):
        rng = random.Random(seed)
        a, b = random_cp(rng), random_cp(rng)
        breakdown = similarity(a, b)
        assert 0.0 <= breakdown.score <= 1.0
        assert breakdown.matched_total <= breakdown.comparable_total or breakdown.comparable_total == 0


class TestPatternKeys:
    def test_key_rendering(self, table3_cps):
        a, _ = table3_cps
        assert layer_key(a, Layer.POS_SIMPLE) == "DT NN IN NN VB NN"
        assert parse_layer_key(layer_key(a, Layer.NER)) == a.cells[Layer.NER]

    def test_equal_pos_keys_imply_equal_simple_keys(self):
        rng = random.Random(3)
        seen = {}
        for _ in range(300):
            cp = random_cp(rng)
            pos = layer_key(cp, Layer.POS)
            simple = layer_key(cp, Layer.POS_SIMPLE)
            if pos in seen:
                assert seen[pos] == simple
            seen[pos] = simple


class TestHierarchy:
    def test_insert_builds_root_and_child(self):
        (sagan,) = load_annotations(DATA / "table2.tsv")
        cp = create_cp(sagan)
        h = PatternHierarchy()
        hierarchy_insert(h, cp, 1)
        assert list(h.roots) == ["NN NN VB IN NN ."]
        root = h.roots["NN NN VB IN NN ."]
        assert list(root.children) == ["NNP NNP VBZ IN NNP ."]
        assert len(h) == 1

    def test_same_pos_different_ner_share_leaf(self, annotate_text):
        a = create_cp(annotate_text("The president of Slovakia is Andrej Kiska."))
        b = create_cp(annotate_text("The president of Slovakia is Marie Curie."))
        h = PatternHierarchy()
        hierarchy_insert(h, a, 1)
        hierarchy_insert(h, b, 2)
        assert len(h.roots) == 1
        (root,) = h.roots.values()
        (leaf,) = root.children.values()
        assert set(leaf) == {1, 2}

    def test_duplicate_insert_is_noop(self, table3_cps):
        a, _ = table3_cps
        h = PatternHierarchy()
        hierarchy_insert(h, a, 1)
        hierarchy_insert(h, a, 1)
        assert len(h) == 1

    def test_children_simplify_to_root(self, corpus_store):
        for root_key, pos_key, _, _ in corpus_store.hierarchy.iter_entries():
            simplified = " ".join(
                "|".join(sorted({simplify_pos(t) for t in cell})) or "_"
                for cell in parse_layer_key(pos_key)
            )
            assert simplified == root_key

    def test_exact_hit_ranked_first(self, table3_cps):
        a, b = table3_cps
        h = PatternHierarchy()
        hierarchy_insert(h, a, 1)
        hierarchy_insert(h, b, 2)
        results = hierarchy_lookup(h, a, 0.0, 5)
        assert results[0][0] == 1
        assert results[0][1].score == 1.0

    def test_empty_hierarchy(self, table3_cps):
        a, _ = table3_cps
        assert hierarchy_lookup(PatternHierarchy(), a, 0.5, 3) == []

    def test_min_similarity_one_filters_near_misses(self, annotate_text):
        a = create_cp(annotate_text("Peter Sagan comes from Slovakia."))
        b = create_cp(annotate_text("Anna Novak comes from Austria."))
        h = PatternHierarchy()
        hierarchy_insert(h, b, 1)
        assert similarity(a, b).score < 1.0
        assert hierarchy_lookup(h, a, 1.0, 3) == []

    def test_bad_arguments(self, table3_cps):
        a, _ = table3_cps
        with pytest.raises(QuestgenError):
            hierarchy_lookup(PatternHierarchy(), a, -0.1, 3)
        with pytest.raises(QuestgenError):
            hierarchy_lookup(PatternHierarchy(), a, 0.5, 0)

    def test_lookup_matches_brute_force(self):
        rng = random.Random(42)
        for trial in range(100):
            store_cps = {rid: random_cp(rng) for rid in range(1, rng.randint(2, 50) + 1)}
            h = PatternHierarchy()
            for rid, cp in store_cps.items():
                hierarchy_insert(h, cp, rid)
            query = random_cp(rng)
            min_sim = rng.choice([0.0, 0.2, 0.4, 0.6])
            max_results = rng.randint(1, 10)
            got = [rid for rid, _ in hierarchy_lookup(h, query, min_sim, max_results)]
            expected = brute_force_lookup(store_cps, query, min_sim, max_results)
            assert got == expected, f"trial {trial}"

    def test_lookup_monotone_in_min_similarity(self):
        rng = random.Random(5)
        store_cps = {rid: random_cp(rng) for rid in range(1, 30)}
        h = PatternHierarchy()
        for rid, cp in store_cps.items():
            hierarchy_insert(h, cp, rid)
        query = random_cp(rng)
        loose = {rid for rid, _ in hierarchy_lookup(h, query, 0.1, 50)}
        tight = {rid for rid, _ in hierarchy_lookup(h, query, 0.5, 50)}
        assert tight <= loose
