"""Question quality estimation, rewards, dedup, ranking and human feedback.

The estimated score is the product of four components in [0, 1]: similarity
of the input sentence to the rule's sentence, similarity of the generated
question to the rule's question, how often the rule has been applied (relative
to the busiest rule in the store) and its mean rating.  An answer token whose
NER and GKG labels disagree halves the product.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .annotate import Layer
from .errors import InputError, QuestgenError
from .generate import QuestionCandidate
from .pattern import CompositePattern, similarity
from .rules import RuleStore, TransformationRule

log = logging.getLogger(__name__)

RATING_SCALE = (0.0, 0.5, 1.0)
SEMANTIC_CONFLICT_FACTOR = 0.5
DEFAULT_DEDUP_THRESHOLD = 0.9
DEFAULT_MIN_SCORE = 0.75


@dataclass(frozen=True)
class Rating:
    question_id: str
    rater_id: str
    syntax: float | None
    semantics: float | None
    skipped: bool = False
    correction: str | None = None
    timestamp: str = ""

    def __post_init__(self):
        if self.skipped:
            if self.syntax is not None or self.semantics is not None:
                raise QuestgenError("skipped ratings carry no verdict values")
            return
        for name, value in (("syntax", self.syntax), ("semantics", self.semantics)):
            if value not in RATING_SCALE:
                raise QuestgenError(f"{name} rating must be one of {RATING_SCALE}, got {value!r}")

    @property
    def combined(self) -> float:
        """Single reward value on the acceptable/almost/unacceptable scale."""
        if self.skipped:
            raise QuestgenError("skipped rating has no combined value")
        return (self.syntax + self.semantics) / 2


@dataclass(frozen=True)
class ScoreBreakdown:
    sent_sim: float
    quest_sim: float
    application_rate: float
    success_rate: float
    product: float


def estimate_score(
    candidate: QuestionCandidate, rule: TransformationRule, store: RuleStore
) -> ScoreBreakdown:
    """Four-component product, halved on an answer-span NER/GKG disagreement."""
    if candidate.question_cp is None:
        raise QuestgenError("candidate carries no question pattern")
    sent_sim = candidate.match.score
    quest_sim = similarity(candidate.question_cp, rule.question_cp).score
    max_count = max(store.max_application_count(), 1)
    application_rate = rule.application_count / max_count
    success_rate = rule.success_rate
    product = sent_sim * quest_sim * application_rate * success_rate
    if candidate.semantic_conflict:
        product *= SEMANTIC_CONFLICT_FACTOR
    return ScoreBreakdown(sent_sim, quest_sim, application_rate, success_rate, product)


def score_candidates(candidates: Sequence[QuestionCandidate], store: RuleStore) -> None:
    """Fill estimated_score on every candidate in place."""
    for candidate in candidates:
        breakdown = estimate_score(candidate, store.rules[candidate.rule_id], store)
        candidate.estimated_score = breakdown.product


def reward(
    question_cp: CompositePattern,
    rule: TransformationRule,
    training_questions: Iterable[str] | None = None,
) -> float:
    """Reward of a question: 1 if it is a training question, else
    similarity to the rule's question times the rule's score."""
    if training_questions is not None:
        key = _lemma_signature(question_cp)
        if key in set(training_questions):
            return 1.0
    return similarity(question_cp, rule.question_cp).score * rule.success_rate


def _lemma_signature(cp: CompositePattern) -> str:
    return " ".join(
        "|".join(sorted(x.lower() for x in cell)) for cell in cp.cells[Layer.LEMMA]
    )


def lemma_signature(cp: CompositePattern) -> str:
    """Key used to recognize questions already present in the training data."""
    return _lemma_signature(cp)


def apply_feedback(
    store: RuleStore,
    rating: Rating,
    candidate: QuestionCandidate,
    log_path: str | Path | None = None,
) -> None:
    """Fold one human rating into the owning rule's statistics.

    Skipped ratings are logged (when a log is given) but change nothing.
    Rules are never removed; low ratings only shrink their success rate.
    """
    if candidate.rule_id not in store.rules:
        raise QuestgenError(f"unknown rule id {candidate.rule_id}")
    if log_path is not None:
        append_rating(log_path, rating)
    if rating.skipped:
        return
    rule = store.rules[candidate.rule_id]
    with store.mutate():
        rule.application_count += 1
        rule.success_sum += rating.combined


def dedup(
    candidates: Sequence[QuestionCandidate], threshold: float = DEFAULT_DEDUP_THRESHOLD
) -> list[QuestionCandidate]:
    """Drop near-duplicates, keeping the better-scored candidate of each group."""
    if not 0.0 < threshold <= 1.0:
        raise QuestgenError(f"dedup threshold must be in (0, 1], got {threshold}")
    ranked = sorted(
        candidates, key=lambda c: (-c.estimated_score, c.rule_id, c.source_id, c.text)
    )
    kept: list[QuestionCandidate] = []
    for candidate in ranked:
        duplicate = False
        for other in kept:
            if candidate.text == other.text:
                duplicate = True
                break
            if (
                candidate.question_cp is not None
                and other.question_cp is not None
                and similarity(candidate.question_cp, other.question_cp).score >= threshold
            ):
                duplicate = True
                break
        if not duplicate:
            kept.append(candidate)
    return kept


def rank_and_filter(
    candidates: Sequence[QuestionCandidate],
    min_score: float = DEFAULT_MIN_SCORE,
    per_sentence_cap: int | None = None,
) -> list[QuestionCandidate]:
    """Sort by estimated score, drop weak candidates, cap per source sentence."""
    ranked = sorted(candidates, key=lambda c: (-c.estimated_score, c.rule_id, c.source_id))
    out: list[QuestionCandidate] = []
    per_sentence: dict[str, int] = {}
    for candidate in ranked:
        if candidate.estimated_score < min_score:
            continue
        if per_sentence_cap is not None:
            n = per_sentence.get(candidate.source_id, 0)
            if n >= per_sentence_cap:
                continue
            per_sentence[candidate.source_id] = n + 1
        out.append(candidate)
    return out


# --- ratings log -----------------------------------------------------------------

_LOG_FIELDS = ("question_id", "rater_id", "syntax", "semantics", "skipped", "correction", "timestamp")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def append_rating(path: str | Path, rating: Rating) -> None:
    """Append one rating to the CSV log, creating the file with a header."""
    path = Path(path)
    new_file = not path.exists()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(_LOG_FIELDS)
        writer.writerow(
            [
                rating.question_id,
                rating.rater_id,
                "" if rating.syntax is None else rating.syntax,
                "" if rating.semantics is None else rating.semantics,
                "1" if rating.skipped else "0",
                rating.correction or "",
                rating.timestamp or _now(),
            ]
        )


def read_ratings(path: str | Path) -> list[Rating]:
    path = Path(path)
    if not path.exists():
        return []
    ratings = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                skipped = row["skipped"] == "1"
                ratings.append(
                    Rating(
                        question_id=row["question_id"],
                        rater_id=row["rater_id"],
                        syntax=None if skipped or row["syntax"] == "" else float(row["syntax"]),
                        semantics=None
                        if skipped or row["semantics"] == ""
                        else float(row["semantics"]),
                        skipped=skipped,
                        correction=row["correction"] or None,
                        timestamp=row["timestamp"],
                    )
                )
            except (KeyError, ValueError, QuestgenError) as exc:
                raise InputError(f"{path}:{lineno}: bad rating row ({exc})") from exc
    return ratings


def effective_ratings(ratings: Iterable[Rating]) -> dict[tuple[str, str], Rating]:
    """Last rating per (rater, question); resubmissions overwrite."""
    effective: dict[tuple[str, str], Rating] = {}
    for rating in ratings:
        effective[(rating.rater_id, rating.question_id)] = rating
    return effective


def replay_log(
    store: RuleStore,
    ratings: Iterable[Rating],
    rule_of: Mapping[str, int],
    baseline: Mapping[int, tuple[int, float]],
) -> None:
    """Recompute rule statistics from scratch: baseline plus the effective log."""
    with store.mutate():
        for rule_id, (count, total) in baseline.items():
            rule = store.rules.get(rule_id)
            if rule is not None:
                rule.application_count = count
                rule.success_sum = total
        for rating in effective_ratings(ratings).values():
            if rating.skipped:
                continue
            rule_id = rule_of.get(rating.question_id)
            rule = store.rules.get(rule_id) if rule_id is not None else None
            if rule is None:
                log.warning("rating for unknown question %r ignored", rating.question_id)
                continue
            rule.application_count += 1
            rule.success_sum += rating.combined
