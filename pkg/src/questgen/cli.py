"""Command line entry points: annotate, train, generate, eval, serve.

Exit codes: 0 success, 1 internal error, 2 malformed input.  Defaults can be
put in a key=value config file and overridden per flag.  All file outputs are
written atomically.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import metrics as metrics_mod
from .annotate import annotate, load_annotations, save_annotations, split_sentences
from .errors import InputError, QuestgenError
from .generate import Morphology, default_morphology, generate_questions
from .providers import default_providers
from .rules import load_pairs, load_store, save_store, train
from .score import dedup, rank_and_filter, read_ratings, score_candidates
from .service import EvaluationService, load_questions, make_server
from .util import atomic_write

log = logging.getLogger(__name__)

CONFIG_KEYS = {
    "min_similarity": float,
    "min_score": float,
    "max_per_sentence": int,
    "dedup_threshold": float,
    "morphology_path": str,
    "port": int,
}

DEFAULTS = {
    "min_similarity": 0.5,
    "min_score": 0.75,
    "max_per_sentence": 8,
    "dedup_threshold": 0.9,
    "morphology_path": None,
    "port": 8010,
}


def read_config(path: str | Path) -> dict:
    """Flat key=value config file; # starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected key = value")
            key, _, raw = line.partition("=")
            key, raw = key.strip(), raw.strip().strip("\"'")
            if key not in CONFIG_KEYS:
                raise InputError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                values[key] = CONFIG_KEYS[key](raw)
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def _settings(args) -> dict:
    values = dict(DEFAULTS)
    if getattr(args, "config", None):
        values.update(read_config(args.config))
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return values


def _morphology(settings) -> Morphology:
    path = settings.get("morphology_path")
    return Morphology.from_file(path) if path else default_morphology()


# --- commands ------------------------------------------------------------------


def cmd_annotate(args) -> int:
    path = Path(args.input)
    if path.suffix == ".tsv":
        sentences = load_annotations(path)  # validate + normalize a TSV
    else:
        text = path.read_text(encoding="utf-8")
        providers = default_providers()
        sentences = [
            annotate(raw, providers, source_id=f"{path.stem}:{i}")
            for i, raw in enumerate(split_sentences(text))
        ]
    if sentences:
        save_annotations(sentences, args.output)
    else:
        atomic_write(args.output, "")
    print(f"annotated {len(sentences)} sentences -> {args.output}")
    return 0


def cmd_train(args) -> int:
    pairs = load_pairs(args.pairs)
    providers = default_providers()
    if args.annotations:
        from .providers import FileBackedProvider

        providers = FileBackedProvider.for_file(args.annotations) + providers
        providers = _dedupe_providers(providers)
    store = train(pairs, providers)
    save_store(store, args.output)
    print(
        f"trained {len(store)} rules from {len(pairs)} pairs "
        f"({len(store.failures)} failures) -> {args.output}"
    )
    for pair_id, reason in store.failures:
        print(f"  warning: pair {pair_id}: {reason}", file=sys.stderr)
    return 0


def _dedupe_providers(providers):
    # file-backed providers answer only for recorded sentences; wrap them with
    # the lexicon fallback per layer
    class _Fallback:
        def __init__(self, layer, primary, secondary):
            self.layer = layer
            self.primary = primary
            self.secondary = secondary

        def labels(self, tokens):
            try:
                return self.primary.labels(tokens)
            except KeyError:
                if self.secondary is None:
                    raise
                return self.secondary.labels(tokens)

    by_layer: dict = {}
    for provider in providers:
        if provider.layer in by_layer:
            by_layer[provider.layer] = _Fallback(
                provider.layer, by_layer[provider.layer], provider
            )
        else:
            by_layer[provider.layer] = provider
    return list(by_layer.values())


def cmd_generate(args) -> int:
    settings = _settings(args)
    store = load_store(args.store)
    if not store.rules:
        raise InputError(f"{args.store}: store holds no rules")
    input_path = Path(args.input)
    if input_path.suffix == ".tsv":
        sentences = load_annotations(input_path)
    else:
        providers = default_providers()
        text = input_path.read_text(encoding="utf-8")
        sentences = [
            annotate(raw, providers, source_id=f"{input_path.stem}:{i}")
            for i, raw in enumerate(split_sentences(text))
        ]
    candidates = generate_questions(
        sentences,
        store,
        min_similarity=settings["min_similarity"],
        max_rules_per_sentence=settings["max_per_sentence"],
        morphology=_morphology(settings),
    )
    score_candidates(candidates, store)
    candidates = dedup(candidates, settings["dedup_threshold"])
    candidates = rank_and_filter(candidates, settings["min_score"])
    lines = []
    for i, c in enumerate(candidates):
        lines.append(
            json.dumps(
                {
                    "id": f"q{i + 1:04d}",
                    "source_id": c.source_id,
                    "sentence": c.sentence_text,
                    "question": c.text,
                    "answer": c.answer,
                    "rule_id": c.rule_id,
                    "match_score": c.match.score,
                    "estimated_score": c.estimated_score,
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    atomic_write(args.output, "\n".join(lines) + ("\n" if lines else ""))
    print(f"generated {len(candidates)} questions -> {args.output}")
    return 0


def cmd_eval(args) -> int:
    if args.mode == "corpus":
        pairs = []
        with open(args.input, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise InputError(f"{args.input}:{lineno}: invalid JSON ({exc.msg})") from exc
                pairs.append(
                    (record["generated"], record["reference"], record.get("group"))
                )
        report = metrics_mod.corpus_report(pairs)
        lines = [
            f"pairs            {report.pairs}",
            *(f"BLEU - {n}gram     {report.bleu[n]:.2f}" for n in metrics_mod.BLEU_ORDERS),
            f"BLEU - average   {report.bleu_average:.2f}",
            f"ROUGE-L          {report.rouge_l:.2f}",
            f"length reference {report.len_reference}",
            f"length generated {report.len_generated}",
            f"length ratio     {report.length_ratio:.2f}",
        ]
        print("\n".join(lines))
        if args.output:
            atomic_write(args.output, json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n")
        return 0

    ratings = read_ratings(args.input)
    if not ratings:
        raise InputError(f"{args.input}: no ratings")
    by_question: dict[str, list[float]] = {}
    syn: dict[str, list[float]] = {}
    sem: dict[str, list[float]] = {}
    for rating in ratings:
        if rating.skipped:
            continue
        by_question.setdefault(rating.question_id, []).append(rating.combined)
        syn.setdefault(rating.question_id, []).append(rating.syntax)
        sem.setdefault(rating.question_id, []).append(rating.semantics)
    result = {
        "irr_binary": {
            "syntax": metrics_mod.irr_binary(syn),
            "semantics": metrics_mod.irr_binary(sem),
            "average": metrics_mod.irr_binary(by_question),
        },
        "irr_numeric": {
            "syntax": metrics_mod.irr_numeric(syn),
            "semantics": metrics_mod.irr_numeric(sem),
            "average": metrics_mod.irr_numeric(by_question),
        },
    }
    for name, row in result.items():
        print(f"{name}: syn {row['syntax']:.2f}  sem {row['semantics']:.2f}  avg {row['average']:.2f}")
    if args.output:
        atomic_write(args.output, json.dumps(result, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_serve(args) -> int:
    settings = _settings(args)
    store = load_store(args.store)
    questions = load_questions(args.questions)
    service = EvaluationService(
        store,
        questions,
        log_path=args.ratings_log,
        seed=args.seed,
    )
    server = make_server(service, port=settings["port"])
    host, port = server.server_address
    print(f"serving evaluation API on http://{host}:{port} (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="questgen",
        description="Learn sentence-to-question transformation rules and generate factual questions.",
    )
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", help="annotate raw text (or validate a TSV) into annotation TSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("train", help="learn transformation rules from sentence-question pairs")
    p.add_argument("--pairs", required=True, help="JSONL of {id, sentence, question, answer?}")
    p.add_argument("--annotations", help="optional TSV with pre-annotated sentences")
    p.add_argument("--out", dest="output", required=True, help="rule store JSON path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="generate ranked questions for new sentences")
    p.add_argument("--store", required=True)
    p.add_argument("--in", dest="input", required=True, help="annotation TSV or raw text file")
    p.add_argument("--out", dest="output", required=True, help="questions JSONL path")
    p.add_argument("--min-similarity", dest="min_similarity", type=float)
    p.add_argument("--min-score", dest="min_score", type=float)
    p.add_argument("--max-per-sentence", dest="max_per_sentence", type=int)
    p.add_argument("--dedup-threshold", dest="dedup_threshold", type=float)
    p.add_argument("--morphology", dest="morphology_path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("eval", help="score generated questions against references, or compute IRR")
    p.add_argument("--mode", choices=("corpus", "irr"), required=True)
    p.add_argument("--in", dest="input", required=True,
                   help="corpus mode: JSONL of {group, generated, reference}; irr mode: ratings CSV")
    p.add_argument("--out", dest="output", help="optional JSON report path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="serve the rating API for the evaluation UI")
    p.add_argument("--store", required=True)
    p.add_argument("--questions", required=True, help="questions JSONL from `generate`")
    p.add_argument("--ratings-log", dest="ratings_log", required=True, help="ratings CSV path")
    p.add_argument("--port", type=int)
    p.add_argument("--seed", type=int, help="serving-order RNG seed")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuestgenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
