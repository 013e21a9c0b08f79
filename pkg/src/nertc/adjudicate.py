"""Annotation-review service: task queue, append-only judgment log, HTTP API.

State is the replay of the judgment log over the immutable task list, so a
killed process restarted on the same files reconstructs exactly the state it
had: submissions are appended (flush+fsync) before they become visible, and a
torn trailing line left by a crash is ignored on replay.

HTTP surface::

    GET  /api/tasks/next?annotator=ID   next unjudged task or {"task": null}
    POST /api/judgments                 {"annotator", "task_id", "verdicts": [...]}
    GET  /api/progress                  counts per annotator
    GET  /api/export?quorum=3           merged ground truth + agreement counts

Anything outside /api/ is served from the optional static directory so the
review frontend can be hosted by the same process.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .coarse import CHOICES
from .corpus import (
    OUT,
    AnnotatedCorpus,
    AnnotatedSentence,
    read_corpus,
    split_ranked,
    tokens_from_texts,
    write_corpus,
)
from .metrics import Judgment, merge_judgments, merge_rankings

MAX_FINE_CANDIDATES = 5


@dataclass(slots=True)
class TaskSpan:
    span_index: int
    start: int
    end: int
    surface: list[str]
    current: str
    candidates: list[str] = field(default_factory=list)


@dataclass(slots=True)
class Task:
    task_id: int
    kind: str  # "coarse" | "fine"
    domain: str
    tokens: list[str]
    tags: list[str]
    spans: list[TaskSpan]

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "kind": self.kind,
            "domain": self.domain,
            "tokens": self.tokens,
            "tags": self.tags,
            "spans": [
                {
                    "span_index": s.span_index,
                    "start": s.start,
                    "end": s.end,
                    "surface": s.surface,
                    "current": s.current,
                    "candidates": s.candidates,
                    **({"choices": list(CHOICES)} if self.kind == "coarse" else {}),
                }
                for s in self.spans
            ],
        }


def tasks_from_corpus(corpus: AnnotatedCorpus, kind: str) -> list[Task]:
    """One task per sentence; spans come from the sentence's IOB decode."""
    if kind not in ("coarse", "fine"):
        raise ValueError(f"unknown task kind {kind!r}")
    tasks = []
    for offset, sent in enumerate(corpus.sentences):
        spans = []
        for span_index, (start, end, type_str) in enumerate(sent.spans()):
            candidates = split_ranked(type_str)
            if kind == "fine":
                if not candidates or len(candidates) > MAX_FINE_CANDIDATES:
                    raise ValueError(
                        f"fine task {offset + 1}: need 1..{MAX_FINE_CANDIDATES} candidates per span"
                    )
                current = candidates[0]
            else:
                current = type_str
                if current not in CHOICES:
                    raise ValueError(f"coarse task {offset + 1}: tag {current!r} is not coarse")
                candidates = []
            spans.append(TaskSpan(span_index, start, end, list(sent.surface(start, end)), current, candidates))
        tasks.append(Task(offset + 1, kind, sent.domain, sent.texts(), list(sent.tags), spans))
    return tasks


class JudgmentLog:
    """Append-only JSONL log; replay tolerates a torn final line."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()

    def replay(self) -> list[dict]:
        if not os.path.exists(self.path):
            return []
        records = []
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError:
                    break  # torn tail from a crash mid-append
        return records

    def append(self, record: dict) -> None:
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())


class AdjudicationService:
    """Task assignment, judgment validation and ground-truth export."""

    def __init__(
        self,
        tasks: list[Task],
        log: JudgmentLog,
        annotators: set[str] | None = None,
    ):
        self.tasks = {task.task_id: task for task in tasks}
        self.log = log
        self.annotators = annotators
        self._lock = threading.Lock()
        # effective verdicts: (annotator, task_id) -> verdict list; latest wins
        self._effective: dict[tuple[str, int], list[dict]] = {}
        self._entries = 0
        for record in log.replay():
            self._effective[(record["annotator"], record["task_id"])] = record["verdicts"]
            self._entries += 1

    @classmethod
    def from_files(
        cls,
        tasks_path: str,
        log_path: str,
        kind: str = "coarse",
        annotators: set[str] | None = None,
    ) -> "AdjudicationService":
        corpus = read_corpus(tasks_path)
        return cls(tasks_from_corpus(corpus, kind), JudgmentLog(log_path), annotators)

    def _check_annotator(self, annotator: str) -> None:
        if not annotator:
            raise ValueError("annotator id required")
        if self.annotators is not None and annotator not in self.annotators:
            raise ValueError(f"unknown annotator {annotator!r}")

    def next_task(self, annotator: str) -> Task | None:
        self._check_annotator(annotator)
        with self._lock:
            for task_id in sorted(self.tasks):
                if (annotator, task_id) not in self._effective:
                    return self.tasks[task_id]
        return None

    def _validate_verdicts(self, task: Task, verdicts: list[dict]) -> None:
        by_span = {}
        for verdict in verdicts:
            if "span" not in verdict:
                raise ValueError("verdict missing span index")
            by_span[verdict["span"]] = verdict
        expected = {span.span_index for span in task.spans}
        if set(by_span) != expected:
            raise ValueError("every span needs exactly one verdict")
        for span in task.spans:
            verdict = by_span[span.span_index]
            if task.kind == "coarse":
                label = verdict.get("label")
                if label not in CHOICES:
                    raise ValueError(f"invalid label {label!r}; choose one of {', '.join(CHOICES)}")
            else:
                ranking = verdict.get("ranking")
                if not isinstance(ranking, list) or not ranking:
                    raise ValueError("fine verdict needs a non-empty ranking")
                if len(set(ranking)) != len(ranking):
                    raise ValueError("ranking must not repeat types")
                foreign = [t for t in ranking if t not in span.candidates]
                if len(foreign) > 1:
                    raise ValueError("at most one free-form suggestion per span")

    def submit(self, annotator: str, task_id: int, verdicts: list[dict]) -> dict:
        self._check_annotator(annotator)
        task = self.tasks.get(task_id)
        if task is None:
            raise KeyError(f"unknown task {task_id}")
        self._validate_verdicts(task, verdicts)
        with self._lock:
            record = {
                "seq": self._entries + 1,
                "ts": round(time.time(), 3),
                "annotator": annotator,
                "task_id": task_id,
                "verdicts": verdicts,
            }
            self.log.append(record)
            self._effective[(annotator, task_id)] = verdicts
            self._entries += 1
            return {"seq": record["seq"], "annotator": annotator, "task_id": task_id}

    def progress(self) -> dict:
        with self._lock:
            per_annotator: dict[str, int] = {}
            for annotator, _task_id in self._effective:
                per_annotator[annotator] = per_annotator.get(annotator, 0) + 1
            return {
                "tasks": len(self.tasks),
                "log_entries": self._entries,
                "judged": dict(sorted(per_annotator.items())),
            }

    def _coarse_ground_truth(self, quorum: int) -> tuple[AnnotatedCorpus, list[dict]]:
        auto_labels = {}
        for task in self.tasks.values():
            for span in task.spans:
                auto_labels[(task.task_id, span.span_index)] = span.current
        judgments = []
        for (annotator, task_id), verdicts in sorted(self._effective.items()):
            if task_id not in self.tasks:
                continue  # stale log entry from an older task file
            for verdict in verdicts:
                judgments.append(
                    Judgment(annotator, task_id, verdict["span"], label=verdict["label"])
                )
        merged = merge_judgments(judgments, auto_labels, quorum)

        sentences = []
        agreements = []
        for task_id in sorted(self.tasks):
            task = self.tasks[task_id]
            tags = [OUT] * len(task.tokens)
            span_info = []
            for span in task.spans:
                label, agreement = merged[(task_id, span.span_index)]
                if label != OUT:
                    tags[span.start] = f"B-{label}"
                    for pos in range(span.start + 1, span.end):
                        tags[pos] = f"I-{label}"
                span_info.append({"span": span.span_index, "label": label, "agreement": agreement})
            sentences.append(
                AnnotatedSentence(
                    doc_key="",
                    index=task_id - 1,
                    tokens=tokens_from_texts(task.tokens),
                    tags=tags,
                    domain=task.domain,
                )
            )
            agreements.append({"task_id": task_id, "spans": span_info})
        corpus = AnnotatedCorpus(sentences, {"quorum": quorum, "source": "merged"})
        return corpus, agreements

    def _fine_ground_truth(self, quorum: int) -> tuple[AnnotatedCorpus, list[dict]]:
        sentences = []
        agreements = []
        for task_id in sorted(self.tasks):
            task = self.tasks[task_id]
            tags = list(task.tags)
            span_info = []
            for span in task.spans:
                rankings = {
                    annotator: [v["ranking"] for v in verdicts if v["span"] == span.span_index][0]
                    for (annotator, tid), verdicts in self._effective.items()
                    if tid == task_id
                }
                merged = merge_rankings(rankings, span.candidates)[:MAX_FINE_CANDIDATES]
                type_str = "|".join(merged)
                tags[span.start] = f"B-{type_str}"
                for pos in range(span.start + 1, span.end):
                    tags[pos] = f"I-{type_str}"
                span_info.append({"span": span.span_index, "ranking": merged, "raters": len(rankings)})
            sentences.append(
                AnnotatedSentence(
                    doc_key="",
                    index=task_id - 1,
                    tokens=tokens_from_texts(task.tokens),
                    tags=tags,
                    domain=task.domain,
                )
            )
            agreements.append({"task_id": task_id, "spans": span_info})
        corpus = AnnotatedCorpus(sentences, {"quorum": quorum, "source": "merged"})
        return corpus, agreements

    def export_ground_truth(
        self, quorum: int = 3, out_path: str | None = None
    ) -> tuple[AnnotatedCorpus, list[dict]]:
        """Merge effective verdicts into a ground-truth corpus (+ agreement counts)."""
        kind = next(iter(self.tasks.values())).kind if self.tasks else "coarse"
        if kind == "coarse":
            corpus, agreements = self._coarse_ground_truth(quorum)
        else:
            corpus, agreements = self._fine_ground_truth(quorum)
        if out_path is not None:
            write_corpus(corpus, out_path)
            with open(out_path + ".agreements.json", "w", encoding="utf-8") as fh:
                json.dump(agreements, fh, ensure_ascii=False, indent=2, sort_keys=True)
                fh.write("\n")
        return corpus, agreements


_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
}


def make_handler(service: AdjudicationService, static_dir: str | None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send_json(self, payload, status: int = 200) -> None:
            body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_static(self, url_path: str) -> None:
            if static_dir is None:
                self._send_json({"error": "no static assets configured"}, 404)
                return
            rel = url_path.lstrip("/") or "index.html"
            full = os.path.realpath(os.path.join(static_dir, rel))
            root = os.path.realpath(static_dir)
            if not full.startswith(root + os.sep) and full != root:
                self._send_json({"error": "forbidden"}, 403)
                return
            if not os.path.isfile(full):
                self._send_json({"error": "not found"}, 404)
                return
            ext = os.path.splitext(full)[1]
            with open(full, "rb") as fh:
                body = fh.read()
            self.send_response(200)
            self.send_header("Content-Type", _CONTENT_TYPES.get(ext, "application/octet-stream"))
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            url = urlparse(self.path)
            query = parse_qs(url.query)
            if url.path == "/api/tasks/next":
                annotator = query.get("annotator", [""])[0]
                try:
                    task = service.next_task(annotator)
                except ValueError as exc:
                    self._send_json({"error": str(exc)}, 400)
                    return
                progress = service.progress()
                self._send_json({"task": task.to_dict() if task else None, "progress": progress})
            elif url.path == "/api/progress":
                self._send_json(service.progress())
            elif url.path == "/api/export":
                try:
                    quorum = int(query.get("quorum", ["3"])[0])
                except ValueError:
                    self._send_json({"error": "quorum must be an integer"}, 400)
                    return
                corpus, agreements = service.export_ground_truth(quorum)
                sentences = [
                    {"domain": s.domain, "tokens": s.texts(), "tags": s.tags}
                    for s in corpus.sentences
                ]
                self._send_json({"quorum": quorum, "sentences": sentences, "agreements": agreements})
            elif url.path.startswith("/api/"):
                self._send_json({"error": "not found"}, 404)
            else:
                self._send_static(url.path)

        def do_POST(self):
            url = urlparse(self.path)
            if url.path != "/api/judgments":
                self._send_json({"error": "not found"}, 404)
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                payload = json.loads(self.rfile.read(length).decode("utf-8"))
                annotator = payload["annotator"]
                task_id = payload["task_id"]
                verdicts = payload["verdicts"]
            except (ValueError, KeyError, TypeError) as exc:
                self._send_json({"error": f"bad request body: {exc}"}, 400)
                return
            try:
                receipt = service.submit(annotator, task_id, verdicts)
            except KeyError as exc:
                self._send_json({"error": str(exc.args[0] if exc.args else exc)}, 404)
                return
            except ValueError as exc:
                self._send_json({"error": str(exc)}, 400)
                return
            self._send_json({"receipt": receipt})

    return Handler


def serve(service: AdjudicationService, port: int, static_dir: str | None = None) -> ThreadingHTTPServer:
    """Create the HTTP server (caller runs serve_forever, possibly in a thread)."""
    return ThreadingHTTPServer(("127.0.0.1", port), make_handler(service, static_dir))
