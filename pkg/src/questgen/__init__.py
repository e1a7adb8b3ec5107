"""Factual question generation from learned sentence-to-question transformation rules."""

from .annotate import (
    AnnotatedSentence,
    Layer,
    Token,
    annotate,
    load_annotations,
    save_annotations,
    simplify_pos,
    split_sentences,
    tokenize,
)
from .errors import (
    AnnotationError,
    ExtractionError,
    InputError,
    QuestgenError,
    RuleApplicationError,
)
from .generate import (
    Alignment,
    QuestionCandidate,
    align,
    apply_rule,
    generate_questions,
)
from .morph import Morphology, change_form, default_morphology
from .metrics import (
    MetricReport,
    bleu_average,
    bleu_n,
    corpus_report,
    irr_binary,
    irr_numeric,
    rouge_l,
)
from .pattern import (
    CompositePattern,
    PatternHierarchy,
    SimilarityBreakdown,
    create_cp,
    hierarchy_insert,
    hierarchy_lookup,
    layer_match,
    similarity,
)
from .providers import default_providers
from .rules import (
    AnswerSpanSpec,
    ChangeForm,
    Insert,
    Move,
    Remove,
    RuleStore,
    TransformationRule,
    extract_rule,
    load_store,
    save_store,
    train,
)
from .score import (
    Rating,
    ScoreBreakdown,
    apply_feedback,
    dedup,
    estimate_score,
    rank_and_filter,
    reward,
)
from .simplify import simplify_sentence

__version__ = "0.1.0"
