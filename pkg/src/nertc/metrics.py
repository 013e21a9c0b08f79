"""Evaluation suite: judgment merging, diff accounting, P/R/F1, top-k agreement.

All coarse scoring is token-level with IOB prefixes stripped, O excluded from
numerators and per-label denominators.  Fine-grained scores follow the strict
and loose macro/micro set-overlap definitions used for fine-typing systems.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

from .coarse import COARSE_LABELS
from .corpus import OUT, AnnotatedCorpus, split_ranked

SpanKey = tuple  # (sentence key, span index)


@dataclass(frozen=True, slots=True)
class Judgment:
    """One annotator's verdict for one span: a coarse label or a fine ranking."""

    annotator: str
    sentence_key: object
    span_index: int
    label: str | None = None
    ranking: tuple[str, ...] | None = None
    suggestion: str | None = None

    def __post_init__(self):
        if (self.label is None) == (self.ranking is None):
            raise ValueError("judgment carries exactly one of label or ranking")

    @property
    def span_key(self) -> SpanKey:
        return (self.sentence_key, self.span_index)


@dataclass(frozen=True, slots=True)
class DiffAccounting:
    added: int
    removed: int
    changed: int
    same: int

    @property
    def auto_total(self) -> int:
        return self.removed + self.changed + self.same

    @property
    def gt_total(self) -> int:
        return self.added + self.changed + self.same

    def to_dict(self) -> dict:
        return {
            "added": self.added,
            "removed": self.removed,
            "changed": self.changed,
            "same": self.same,
            "auto_total": self.auto_total,
            "gt_total": self.gt_total,
        }


@dataclass(slots=True)
class LabelScore:
    precision: float
    recall: float
    f1: float
    predicted: int = 0
    gold: int = 0
    correct: int = 0


@dataclass(slots=True)
class EvalReport:
    diff: DiffAccounting | None = None
    per_label: dict[str, LabelScore] = field(default_factory=dict)
    average: LabelScore | None = None
    strict_f1: float | None = None
    loose_macro_f1: float | None = None
    loose_micro_f1: float | None = None
    topk: dict[int, float] | None = None

    def to_dict(self) -> dict:
        out: dict = {}
        if self.diff is not None:
            out["diff"] = self.diff.to_dict()
        if self.per_label:
            out["per_label"] = {
                label: asdict(score) for label, score in sorted(self.per_label.items())
            }
        if self.average is not None:
            out["average"] = asdict(self.average)
        if self.strict_f1 is not None:
            out["fine"] = {
                "strict": self.strict_f1,
                "loose_macro": self.loose_macro_f1,
                "loose_micro": self.loose_micro_f1,
            }
        if self.topk is not None:
            out["topk"] = {str(k): v for k, v in sorted(self.topk.items())}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    def format_table(self) -> str:
        lines: list[str] = []
        if self.diff is not None:
            d = self.diff
            lines.append(
                f"diff: added={d.added} removed={d.removed} changed={d.changed} "
                f"same={d.same} auto_total={d.auto_total} gt_total={d.gt_total}"
            )
        if self.per_label:
            lines.append(f"{'label':<14} {'precision':>9} {'recall':>9} {'f1':>9}")
            for label, s in sorted(self.per_label.items()):
                lines.append(f"{label:<14} {s.precision:>9.3f} {s.recall:>9.3f} {s.f1:>9.3f}")
            if self.average is not None:
                a = self.average
                lines.append(f"{'average':<14} {a.precision:>9.3f} {a.recall:>9.3f} {a.f1:>9.3f}")
        if self.strict_f1 is not None:
            lines.append(
                f"strict={self.strict_f1:.3f} loose_macro={self.loose_macro_f1:.3f} "
                f"loose_micro={self.loose_micro_f1:.3f}"
            )
        if self.topk is not None:
            lines.append(" ".join(f"top-{k}={v:.3f}" for k, v in sorted(self.topk.items())))
        return "\n".join(lines) + "\n"


def _f1(precision: float, recall: float) -> float:
    return 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)


def strip_iob(tag: str) -> str:
    """Drop a B-/I- prefix; bare labels and O pass through unchanged."""
    if tag.startswith("B-") or tag.startswith("I-"):
        return tag[2:]
    return tag


def diff_annotations(auto: Sequence[str], gt: Sequence[str]) -> DiffAccounting:
    """Token-level change accounting between an automated and a reference tagging.

    O -> X counts as an addition, X -> O as a removal, X -> Y as a change and
    X -> X as a match; IOB prefixes are stripped first.
    """
    if len(auto) != len(gt):
        raise ValueError(f"length mismatch: {len(auto)} auto vs {len(gt)} reference tags")
    added = removed = changed = same = 0
    for a_tag, g_tag in zip(auto, gt):
        a, g = strip_iob(a_tag), strip_iob(g_tag)
        if a == OUT and g == OUT:
            continue
        if a == OUT:
            added += 1
        elif g == OUT:
            removed += 1
        elif a == g:
            same += 1
        else:
            changed += 1
    return DiffAccounting(added, removed, changed, same)


def coarse_prf(
    auto: Sequence[str],
    gt: Sequence[str],
    labels: Sequence[str] = COARSE_LABELS,
    average: str = "macro",
) -> tuple[dict[str, LabelScore], LabelScore]:
    """Token-level per-label precision/recall/F1 plus the averaged row.

    Labels absent from both sequences are omitted from the average; undefined
    precision or recall (zero denominator) scores 0.  ``average`` picks the
    unweighted macro mean (default) or micro pooling.
    """
    if len(auto) != len(gt):
        raise ValueError(f"length mismatch: {len(auto)} auto vs {len(gt)} reference tags")
    if average not in ("macro", "micro"):
        raise ValueError(f"unknown average {average!r}")
    stripped = [(strip_iob(a), strip_iob(g)) for a, g in zip(auto, gt)]
    per_label: dict[str, LabelScore] = {}
    for label in labels:
        predicted = sum(1 for a, _ in stripped if a == label)
        gold = sum(1 for _, g in stripped if g == label)
        if predicted == 0 and gold == 0:
            continue
        correct = sum(1 for a, g in stripped if a == g == label)
        precision = correct / predicted if predicted else 0.0
        recall = correct / gold if gold else 0.0
        per_label[label] = LabelScore(precision, recall, _f1(precision, recall), predicted, gold, correct)

    if not per_label:
        return per_label, LabelScore(0.0, 0.0, 0.0)
    if average == "macro":
        precision = sum(s.precision for s in per_label.values()) / len(per_label)
        recall = sum(s.recall for s in per_label.values()) / len(per_label)
        avg = LabelScore(precision, recall, _f1(precision, recall))
    else:
        predicted = sum(s.predicted for s in per_label.values())
        gold = sum(s.gold for s in per_label.values())
        correct = sum(s.correct for s in per_label.values())
        precision = correct / predicted if predicted else 0.0
        recall = correct / gold if gold else 0.0
        avg = LabelScore(precision, recall, _f1(precision, recall), predicted, gold, correct)
    return per_label, avg


def fine_grained_f1(
    pred_type_sets: Sequence[Iterable[str]],
    gold_type_sets: Sequence[Iterable[str]],
) -> tuple[float, float, float]:
    """Strict, loose macro and loose micro F1 over per-entity type sets."""
    if len(pred_type_sets) != len(gold_type_sets):
        raise ValueError("one predicted and one gold set per entity required")
    if not pred_type_sets:
        raise ValueError("no entities to score")
    pairs = []
    for i, (pred, gold) in enumerate(zip(pred_type_sets, gold_type_sets)):
        pred, gold = set(pred), set(gold)
        if not gold:
            raise ValueError(f"entity {i}: empty gold type set")
        pairs.append((pred, gold))

    n = len(pairs)
    exact = sum(1 for pred, gold in pairs if pred == gold)
    strict = _f1(exact / n, exact / n)

    macro_p = sum((len(p & g) / len(p)) if p else 0.0 for p, g in pairs) / n
    macro_r = sum(len(p & g) / len(g) for p, g in pairs) / n
    loose_macro = _f1(macro_p, macro_r)

    inter = sum(len(p & g) for p, g in pairs)
    pred_total = sum(len(p) for p, _ in pairs)
    gold_total = sum(len(g) for _, g in pairs)
    micro_p = inter / pred_total if pred_total else 0.0
    micro_r = inter / gold_total
    loose_micro = _f1(micro_p, micro_r)
    return strict, loose_macro, loose_micro


def topk_agreement(
    ranked_predictions: Sequence[Sequence[str]],
    references: Sequence[str],
    ks: Iterable[int] = (1, 3, 5),
) -> dict[int, float]:
    """Fraction of items whose reference appears among the first k predictions."""
    if len(ranked_predictions) != len(references):
        raise ValueError("one ranked list per reference required")
    ks = sorted(set(ks))
    for k in ks:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
    for ranks in ranked_predictions:
        if not ranks:
            raise ValueError("ranked prediction lists must be non-empty")
    if not references:
        return {k: 0.0 for k in ks}
    rates = {}
    for k in ks:
        hits = sum(1 for ranks, ref in zip(ranked_predictions, references) if ref in ranks[:k])
        rates[k] = hits / len(references)
    return rates


def merge_judgments(
    judgments: Iterable[Judgment],
    auto_labels: Mapping[SpanKey, str],
    quorum: int = 3,
) -> dict[SpanKey, tuple[str, int]]:
    """Quorum-merge coarse judgments: (label, agreement count) per span.

    A span takes the label at least ``quorum`` annotators agree on; with no
    such agreement the automated label stands.  Every judgment must reference
    a span present in ``auto_labels``.
    """
    votes: dict[SpanKey, Counter] = defaultdict(Counter)
    for judgment in judgments:
        if judgment.label is None:
            raise ValueError("coarse merge needs label judgments")
        if judgment.span_key not in auto_labels:
            raise ValueError(f"judgment references unknown span {judgment.span_key}")
        votes[judgment.span_key][judgment.label] += 1

    merged: dict[SpanKey, tuple[str, int]] = {}
    for span_key, auto_label in auto_labels.items():
        counter = votes.get(span_key)
        if not counter:
            merged[span_key] = (auto_label, 0)
            continue
        top = max(counter.values())
        winner = min(label for label, count in counter.items() if count == top)
        merged[span_key] = (winner, top) if top >= quorum else (auto_label, top)
    return merged


def merge_rankings(
    rankings: Mapping[str, Sequence[str]],
    candidates: Sequence[str],
) -> list[str]:
    """Merge per-annotator rankings by mean rank.

    A type an annotator did not rank contributes rank ``len(candidates) + 1``.
    Mean-rank ties follow the order used by the first annotator (smallest id),
    with unranked candidates falling back to served order.
    """
    universe: list[str] = list(candidates)
    for ranking in rankings.values():
        for item in ranking:
            if item not in universe:
                universe.append(item)  # free-form suggestions join the pool
    if not rankings:
        return universe

    penalty = len(candidates) + 1
    first_annotator = min(rankings)
    first_ranking = list(rankings[first_annotator])

    def mean_rank(item: str) -> float:
        total = 0
        for ranking in rankings.values():
            total += ranking.index(item) + 1 if item in ranking else penalty
        return total / len(rankings)

    def tie_key(item: str) -> tuple:
        in_first = item in first_ranking
        position = first_ranking.index(item) if in_first else len(first_ranking)
        served = universe.index(item)
        return (not in_first, position, served)

    return sorted(universe, key=lambda item: (mean_rank(item), tie_key(item)))


def corpus_token_labels(corpus: AnnotatedCorpus) -> list[str]:
    """Flatten a corpus into stripped token labels for diffing and scoring."""
    labels: list[str] = []
    for sent in corpus.sentences:
        labels.extend(strip_iob(tag) for tag in sent.tags)
    return labels


def corpus_span_types(corpus: AnnotatedCorpus) -> list[list[str]]:
    """Per-span ranked type lists, in sentence order."""
    out: list[list[str]] = []
    for sent in corpus.sentences:
        for _start, _end, type_str in sent.spans():
            out.append(split_ranked(type_str))
    return out


def evaluate_coarse(auto: AnnotatedCorpus, gold: AnnotatedCorpus, average: str = "macro") -> EvalReport:
    auto_labels = corpus_token_labels(auto)
    gold_labels = corpus_token_labels(gold)
    diff = diff_annotations(auto_labels, gold_labels)
    per_label, avg = coarse_prf(auto_labels, gold_labels, average=average)
    return EvalReport(diff=diff, per_label=per_label, average=avg)


def evaluate_fine(auto: AnnotatedCorpus, gold: AnnotatedCorpus) -> EvalReport:
    pred_sets = [set(types) for types in corpus_span_types(auto)]
    gold_sets = [set(types) for types in corpus_span_types(gold)]
    strict, loose_macro, loose_micro = fine_grained_f1(pred_sets, gold_sets)
    return EvalReport(strict_f1=strict, loose_macro_f1=loose_macro, loose_micro_f1=loose_micro)


def evaluate_topk(auto: AnnotatedCorpus, gold: AnnotatedCorpus, ks: Iterable[int] = (1, 3, 5)) -> EvalReport:
    """Reference = the gold span's top type; predictions = the auto span's ranked list."""
    predictions = corpus_span_types(auto)
    references = [types[0] for types in corpus_span_types(gold)]
    return EvalReport(topk=topk_agreement(predictions, references, ks))
