"""Reference-based evaluation metrics and inter-rater reliability.

BLEU-n here is the cumulative form: brevity penalty times the geometric mean
of the clipped 1..n-gram precisions, with an additive epsilon for zero-match
precisions so short questions keep comparable nonzero scores.  ROUGE-L is the
balanced F1 of the longest common subsequence.  Both lowercase the shared
tokenizer's output and keep punctuation tokens.

IRRb is the percentage of exactly agreeing rater pairs; IRRn discounts each
pair by its squared normalized rating difference, so it always dominates IRRb.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .annotate import tokenize
from .errors import InputError
from .pattern import lcs_length

log = logging.getLogger(__name__)

BLEU_EPSILON = 0.1
BLEU_ORDERS = (1, 2, 3, 4)


@dataclass(frozen=True)
class MetricReport:
    bleu: dict[int, float]
    bleu_average: float
    rouge_l: float
    len_reference: int
    len_generated: int
    length_ratio: float
    pairs: int

    def as_dict(self) -> dict:
        return {
            "bleu": {str(n): self.bleu[n] for n in BLEU_ORDERS},
            "bleu_average": self.bleu_average,
            "rouge_l": self.rouge_l,
            "len_reference": self.len_reference,
            "len_generated": self.len_generated,
            "length_ratio": self.length_ratio,
            "pairs": self.pairs,
        }


def _metric_tokens(text: str) -> list[str]:
    return [t.text.lower() for t in tokenize(text)]


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _clipped_precision(candidate: Sequence[str], reference: Sequence[str], n: int) -> float:
    cand = _ngrams(candidate, n)
    total = sum(cand.values())
    if total == 0:
        return 0.0
    ref = _ngrams(reference, n)
    matched = sum(min(count, ref[gram]) for gram, count in cand.items())
    if matched == 0:
        return BLEU_EPSILON / total
    return matched / total


def bleu_n(candidate: str, reference: str, n: int) -> float:
    """Cumulative BLEU of order n with brevity penalty."""
    if n not in BLEU_ORDERS:
        raise InputError(f"BLEU order must be in {BLEU_ORDERS}, got {n}")
    cand = _metric_tokens(candidate)
    ref = _metric_tokens(reference)
    if len(cand) < n:
        return 0.0
    brevity = math.exp(min(0.0, 1.0 - len(ref) / len(cand)))
    log_sum = 0.0
    for k in range(1, n + 1):
        precision = _clipped_precision(cand, ref, k)
        if precision == 0.0:
            return 0.0
        log_sum += math.log(precision)
    return brevity * math.exp(log_sum / n)


def bleu_average(candidate: str, reference: str) -> float:
    return sum(bleu_n(candidate, reference, n) for n in BLEU_ORDERS) / len(BLEU_ORDERS)


def rouge_l(candidate: str, reference: str) -> float:
    """F1 of the token-level longest common subsequence."""
    cand = _metric_tokens(candidate)
    ref = _metric_tokens(reference)
    lcs = lcs_length(cand, ref, lambda x, y: x == y)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return 2 * precision * recall / (precision + recall)


def corpus_report(pairs: Iterable[tuple]) -> MetricReport:
    """Macro-averaged metrics over (generated, reference[, group]) pairs.

    Within a group only the generated question most similar to its reference
    (by average BLEU) is kept; groups with an empty reference are skipped.
    """
    groups: dict[object, list[tuple[str, str]]] = {}
    order: list[object] = []
    for index, pair in enumerate(pairs):
        generated, reference = pair[0], pair[1]
        group = pair[2] if len(pair) > 2 and pair[2] is not None else f"__pair{index}"
        if not reference or not reference.strip():
            log.warning("group %r has an empty reference; skipped", group)
            continue
        if group not in groups:
            groups[group] = []
            order.append(group)
        groups[group].append((generated, reference))

    if not order:
        raise InputError("no scorable pairs")

    selected: list[tuple[str, str]] = []
    for group in order:
        best = max(groups[group], key=lambda gr: bleu_average(gr[0], gr[1]))
        selected.append(best)

    bleu_scores = {n: 0.0 for n in BLEU_ORDERS}
    rouge_total = 0.0
    len_ref = len_gen = 0
    for generated, reference in selected:
        for n in BLEU_ORDERS:
            bleu_scores[n] += bleu_n(generated, reference, n)
        rouge_total += rouge_l(generated, reference)
        len_gen += len(generated)
        len_ref += len(reference)
    count = len(selected)
    bleu_avg = {n: total / count for n, total in bleu_scores.items()}
    return MetricReport(
        bleu=bleu_avg,
        bleu_average=sum(bleu_avg.values()) / len(BLEU_ORDERS),
        rouge_l=rouge_total / count,
        len_reference=len_ref,
        len_generated=len_gen,
        length_ratio=len_gen / len_ref if len_ref else 0.0,
        pairs=count,
    )


# --- inter-rater reliability ---------------------------------------------------

def _rating_pairs(values: Sequence[float]):
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            yield values[i], values[j]


def _eligible(ratings_by_question: Mapping[str, Sequence[float]]) -> list[Sequence[float]]:
    eligible = []
    for question_id, values in ratings_by_question.items():
        if len(values) < 2:
            log.warning("question %r has fewer than two ratings; excluded from IRR", question_id)
            continue
        eligible.append(values)
    if not eligible:
        raise InputError("no questions with at least two ratings")
    return eligible


def irr_binary(ratings_by_question: Mapping[str, Sequence[float]]) -> float:
    """Percentage of rater pairs giving exactly the same rating, averaged per question."""
    totals = []
    for values in _eligible(ratings_by_question):
        pairs = list(_rating_pairs(values))
        agreeing = sum(1 for a, b in pairs if a == b)
        totals.append(agreeing / len(pairs))
    return 100.0 * sum(totals) / len(totals)


def irr_numeric(ratings_by_question: Mapping[str, Sequence[float]], scale_range: float = 1.0) -> float:
    """Agreement discounted by the squared normalized difference of each rater pair.

    Equal pairs count fully, maximally distant pairs count zero, so this is
    never below the all-or-nothing irr_binary on the same ratings.
    """
    totals = []
    for values in _eligible(ratings_by_question):
        pairs = list(_rating_pairs(values))
        distance = sum(((a - b) / scale_range) ** 2 for a, b in pairs) / len(pairs)
        totals.append(1.0 - distance)
    return 100.0 * sum(totals) / len(totals)
