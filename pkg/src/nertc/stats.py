"""Descriptive corpus statistics: sentence/token/type counts per domain."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .coarse import COARSE_LABELS
from .corpus import OUT, AnnotatedCorpus, tag_parts


@dataclass(slots=True)
class StatsReport:
    sentences: int = 0
    domain_sentences: dict[str, int] = field(default_factory=dict)
    tokens_with_punct: int = 0
    tokens_without_punct: int = 0
    tagged_tokens: int = 0
    unique_types: int = 0
    domain_unique_types: dict[str, int] = field(default_factory=dict)
    coarse_label_tokens: dict[str, int] | None = None

    @staticmethod
    def _arg(counts: dict[str, int], pick_max: bool) -> list | None:
        if not counts:
            return None
        best = (max if pick_max else min)(counts.values())
        name = min(d for d, c in counts.items() if c == best)
        return [name, best]

    def to_dict(self) -> dict:
        return {
            "sentences": self.sentences,
            "domain_sentences": dict(sorted(self.domain_sentences.items())),
            "domain_most_sentences": self._arg(self.domain_sentences, True),
            "domain_fewest_sentences": self._arg(self.domain_sentences, False),
            "tokens_with_punct": self.tokens_with_punct,
            "tokens_without_punct": self.tokens_without_punct,
            "tagged_tokens": self.tagged_tokens,
            "unique_types": self.unique_types,
            "domain_unique_types": dict(sorted(self.domain_unique_types.items())),
            "domain_most_types": self._arg(self.domain_unique_types, True),
            "domain_fewest_types": self._arg(self.domain_unique_types, False),
            "coarse_label_tokens": self.coarse_label_tokens,
        }


def compute_stats(corpus: AnnotatedCorpus) -> StatsReport:
    """Single-pass fold over the corpus; type uniqueness ignores IOB prefixes."""
    report = StatsReport()
    all_types: set[str] = set()
    per_domain_types: dict[str, set[str]] = {}
    coarse_tokens = {label: 0 for label in COARSE_LABELS}
    only_coarse = True

    for sent in corpus.sentences:
        report.sentences += 1
        report.domain_sentences[sent.domain] = report.domain_sentences.get(sent.domain, 0) + 1
        domain_types = per_domain_types.setdefault(sent.domain, set())
        for token, tag in zip(sent.tokens, sent.tags):
            report.tokens_with_punct += 1
            if not token.is_punct:
                report.tokens_without_punct += 1
            if tag == OUT:
                continue
            report.tagged_tokens += 1
            _, type_str = tag_parts(tag)
            all_types.add(type_str)
            domain_types.add(type_str)
            if type_str in coarse_tokens:
                coarse_tokens[type_str] += 1
            else:
                only_coarse = False

    report.unique_types = len(all_types)
    report.domain_unique_types = {d: len(types) for d, types in per_domain_types.items()}
    if only_coarse and report.tagged_tokens:
        report.coarse_label_tokens = coarse_tokens
    return report


def to_json(report: StatsReport) -> str:
    return json.dumps(report.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def format_table(report: StatsReport) -> str:
    data = report.to_dict()

    def arg(key: str) -> str:
        value = data[key]
        return "-" if value is None else f"{value[0]} ({value[1]})"

    rows = [
        ("# of Sentences", str(data["sentences"])),
        ("Largest Domain (# sentences)", arg("domain_most_sentences")),
        ("Smallest Domain (# sentences)", arg("domain_fewest_sentences")),
        ("# of Tokens (with punctuation)", str(data["tokens_with_punct"])),
        ("# of Tokens (without punctuation)", str(data["tokens_without_punct"])),
        ("# of Tagged Tokens", str(data["tagged_tokens"])),
        ("# of Unique Entity Types", str(data["unique_types"])),
        ("Largest Domain (# unique types)", arg("domain_most_types")),
        ("Smallest Domain (# unique types)", arg("domain_fewest_types")),
    ]
    if data["coarse_label_tokens"] is not None:
        for label in COARSE_LABELS:
            rows.append((f"# of {label} tokens", str(data["coarse_label_tokens"][label])))
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows) + "\n"
