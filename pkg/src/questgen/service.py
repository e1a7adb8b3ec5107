"""HTTP facade for the human evaluation loop.

Raters fetch question batches, submit syntax/semantics verdicts (or skip),
and read the aggregate report.  The ratings CSV is the source of truth: rule
statistics are always baseline-plus-log, ratings are idempotent per
(rater, question), and restarting the service replays the log.

Endpoints (JSON over HTTP):
    GET  /api/questions?rater=<id>&n=<k>
    POST /api/ratings   {question_id, rater_id, syntax, semantics, skipped, correction}
    GET  /api/report
    GET  /api/health
"""

from __future__ import annotations

import json
import logging
import random
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Mapping
from urllib.parse import parse_qs, urlparse

from .errors import InputError, QuestgenError
from .rules import RuleStore
from .score import (
    Rating,
    append_rating,
    effective_ratings,
    read_ratings,
    replay_log,
)

log = logging.getLogger(__name__)

DEFAULT_VOTE_CAP = 5
DEFAULT_CORRECT_THRESHOLD = 0.75
RATING_VALUES = (0.0, 0.5, 1.0)


def load_questions(path: str | Path) -> list[dict]:
    """Question pool from a generated questions JSONL file."""
    questions = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            for key in ("id", "question", "sentence"):
                if key not in record:
                    raise InputError(f"{path}:{lineno}: question record needs {key!r}")
            record.setdefault("system", "default")
            questions.append(record)
    return questions


class EvaluationService:
    """In-memory evaluation state shared by the HTTP handler."""

    def __init__(
        self,
        store: RuleStore,
        questions: list[dict],
        log_path: str | Path,
        seed: int | None = None,
        vote_cap: int = DEFAULT_VOTE_CAP,
        correct_threshold: float = DEFAULT_CORRECT_THRESHOLD,
    ):
        self.store = store
        self.questions: dict[str, dict] = {}
        for record in questions:
            qid = str(record["id"])
            if qid in self.questions:
                raise InputError(f"duplicate question id {qid!r}")
            self.questions[qid] = record
        self.log_path = Path(log_path)
        self.vote_cap = vote_cap
        self.correct_threshold = correct_threshold
        self.rng = random.Random(seed)
        self.lock = threading.Lock()
        # the stats shipped with the store are the baseline the log adds onto
        self.baseline = {
            rule_id: (rule.application_count, rule.success_sum)
            for rule_id, rule in store.rules.items()
        }
        self.ratings = read_ratings(self.log_path)
        self._replay()

    def _rule_of(self) -> Mapping[str, int]:
        return {
            qid: record["rule_id"]
            for qid, record in self.questions.items()
            if record.get("rule_id") is not None
        }

    def _replay(self) -> None:
        replay_log(self.store, self.ratings, self._rule_of(), self.baseline)

    # --- question serving -------------------------------------------------

    def _rating_counts(self) -> dict[str, int]:
        counts = {qid: 0 for qid in self.questions}
        for rating in effective_ratings(self.ratings).values():
            if not rating.skipped and rating.question_id in counts:
                counts[rating.question_id] += 1
        return counts

    def next_questions(self, rater_id: str, batch_size: int) -> list[dict]:
        """Unrated questions for this rater: fewest ratings first, random within ties."""
        if batch_size < 1:
            raise InputError("batch size must be >= 1")
        with self.lock:
            rated: set[str] = set()
            skip_counts: dict[str, int] = {}
            for rating in self.ratings:
                if rating.rater_id != rater_id:
                    continue
                if rating.skipped:
                    skip_counts[rating.question_id] = skip_counts.get(rating.question_id, 0) + 1
                else:
                    rated.add(rating.question_id)
            counts = self._rating_counts()
            eligible = [
                qid
                for qid in self.questions
                if qid not in rated
                and skip_counts.get(qid, 0) < 2
                and counts[qid] < self.vote_cap
            ]
            ordered = sorted(eligible, key=lambda qid: (counts[qid], self.rng.random()))
            batch = ordered[:batch_size]
            return [
                {
                    "question_id": qid,
                    "sentence": self.questions[qid]["sentence"],
                    "question": self.questions[qid]["question"],
                }
                for qid in batch
            ]

    # --- rating intake -------------------------------------------------------

    def submit_rating(self, payload: dict) -> dict:
        qid = payload.get("question_id")
        if not isinstance(qid, str) or qid not in self.questions:
            raise KeyError(f"unknown question_id {qid!r}")
        rater = payload.get("rater_id")
        if not isinstance(rater, str) or not rater:
            raise ValueError("rater_id is required")
        skipped = bool(payload.get("skipped", False))
        syntax = payload.get("syntax")
        semantics = payload.get("semantics")
        if skipped:
            if syntax is not None or semantics is not None:
                raise ValueError("skipped ratings must not carry verdicts")
        else:
            if syntax not in RATING_VALUES or semantics not in RATING_VALUES:
                raise ValueError(f"verdicts must be one of {RATING_VALUES}")
        correction = payload.get("correction")
        if correction is not None and not isinstance(correction, str):
            raise ValueError("correction must be a string")
        rating = Rating(
            question_id=qid,
            rater_id=rater,
            syntax=None if skipped else float(syntax),
            semantics=None if skipped else float(semantics),
            skipped=skipped,
            correction=correction,
        )
        with self.lock:
            append_rating(self.log_path, rating)
            self.ratings.append(rating)
            self._replay()
            effective = len(effective_ratings(self.ratings))
        return {"status": "ok", "effective_ratings": effective}

    # --- reporting ---------------------------------------------------------------

    def report(self) -> dict:
        with self.lock:
            effective = [
                r
                for r in effective_ratings(self.ratings).values()
                if not r.skipped and r.question_id in self.questions
            ]
            systems: dict[str, dict] = {}
            for qid, record in self.questions.items():
                row = systems.setdefault(
                    record["system"],
                    {"system": record["system"], "questions": 0, "ratings": 0,
                     "_scores": [], "_syntax": [], "_semantics": []},
                )
                row["questions"] += 1
            for rating in effective:
                row = systems[self.questions[rating.question_id]["system"]]
                row["ratings"] += 1
                row["_scores"].append(rating.combined)
                row["_syntax"].append(rating.syntax)
                row["_semantics"].append(rating.semantics)

            def finish(row: dict) -> dict:
                scores, syn, sem = row.pop("_scores"), row.pop("_syntax"), row.pop("_semantics")
                n = len(scores)
                correct = sum(1 for s in scores if s >= self.correct_threshold)
                row["avg_score"] = sum(scores) / n if n else 0.0
                row["avg_syntax"] = sum(syn) / n if n else 0.0
                row["avg_semantics"] = sum(sem) / n if n else 0.0
                row["correct_ratings"] = correct
                row["correctness_pct"] = 100.0 * correct / n if n else 0.0
                return row

            rows = [finish(row) for _, row in sorted(systems.items())]
            total = {
                "system": "total",
                "questions": sum(r["questions"] for r in rows),
                "ratings": sum(r["ratings"] for r in rows),
                "correct_ratings": sum(r["correct_ratings"] for r in rows),
            }
            total["correctness_pct"] = (
                100.0 * total["correct_ratings"] / total["ratings"] if total["ratings"] else 0.0
            )
            rules = [
                {
                    "rule_id": rule_id,
                    "application_count": rule.application_count,
                    "success_sum": rule.success_sum,
                    "success_rate": rule.success_rate,
                }
                for rule_id, rule in sorted(self.store.rules.items())
            ]
            return {"systems": rows, "total": total, "rules": rules}

    def health(self) -> dict:
        with self.lock:
            return {
                "status": "ok",
                "questions": len(self.questions),
                "ratings": len(self.ratings),
            }


class _Handler(BaseHTTPRequestHandler):
    service: EvaluationService  # set by make_server

    def log_message(self, fmt, *args):  # quiet the default stderr chatter
        log.debug("http: " + fmt, *args)

    def _send(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self):
        self._send(200, {})

    def do_GET(self):
        url = urlparse(self.path)
        try:
            if url.path == "/api/health":
                self._send(200, self.service.health())
            elif url.path == "/api/report":
                self._send(200, self.service.report())
            elif url.path == "/api/questions":
                params = parse_qs(url.query)
                rater = params.get("rater", [""])[0]
                if not rater:
                    self._send(400, {"error": "rater parameter is required"})
                    return
                n = int(params.get("n", ["5"])[0])
                self._send(200, {"questions": self.service.next_questions(rater, n)})
            else:
                self._send(404, {"error": f"unknown path {url.path}"})
        except (InputError, ValueError) as exc:
            self._send(400, {"error": str(exc)})
        except Exception as exc:  # do not kill the server thread
            log.exception("request failed")
            self._send(500, {"error": str(exc)})

    def do_POST(self):
        url = urlparse(self.path)
        if url.path != "/api/ratings":
            self._send(404, {"error": f"unknown path {url.path}"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length).decode("utf-8") or "{}")
            if not isinstance(payload, dict):
                raise ValueError("rating payload must be an object")
            self._send(200, self.service.submit_rating(payload))
        except KeyError as exc:
            self._send(404, {"error": str(exc)})
        except (ValueError, QuestgenError, json.JSONDecodeError) as exc:
            self._send(400, {"error": str(exc)})
        except Exception as exc:
            log.exception("rating failed")
            self._send(500, {"error": str(exc)})


def make_server(service: EvaluationService, port: int = 0) -> ThreadingHTTPServer:
    """HTTP server bound to localhost; port 0 picks a free port."""
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer(("127.0.0.1", port), handler)
