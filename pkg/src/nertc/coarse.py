"""Fine-to-coarse annotation mapping with domain elimination.

The mapping file has one whitespace-separated ``/type/path LABEL`` pair per
line, ``!drop DOMAIN`` lines naming eliminated domains, and ``#`` comments.
Sentences whose sentence domain is eliminated are removed; a span whose fine
type has no label but belongs to an eliminated domain degrades to O tags; an
unmapped fine type in a kept domain is an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import OUT, AnnotatedCorpus, AnnotatedSentence
from .errors import FormatError
from .kb import TypePath

COARSE_LABELS = ("PERSON", "ORGANIZATION", "LOCATION", "MISC")
CHOICES = (*COARSE_LABELS, OUT)


@dataclass(slots=True)
class TypeMappingTable:
    mapping: dict[str, str] = field(default_factory=dict)
    dropped_domains: set[str] = field(default_factory=set)

    def label_for(self, type_str: str) -> str | None:
        return self.mapping.get(type_str)


def load_mapping(path: str) -> TypeMappingTable:
    table = TypeMappingTable()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("!drop"):
                parts = line.split()
                if len(parts) != 2:
                    raise FormatError("expected '!drop DOMAIN'", path=path, line=lineno)
                table.dropped_domains.add(parts[1])
                continue
            parts = line.split()
            if len(parts) != 2:
                raise FormatError("expected 'TYPE_PATH LABEL'", path=path, line=lineno)
            type_str, label = parts
            try:
                TypePath.parse(type_str)
            except ValueError as exc:
                raise FormatError(str(exc), path=path, line=lineno) from exc
            if label not in COARSE_LABELS:
                raise FormatError(f"unknown coarse label {label!r}", path=path, line=lineno)
            if type_str in table.mapping:
                raise FormatError(f"duplicate type path {type_str}", path=path, line=lineno)
            table.mapping[type_str] = label
    return table


def _coarse_tags(sent: AnnotatedSentence, table: TypeMappingTable) -> list[str]:
    tags = [OUT] * len(sent.tags)
    for start, end, type_str in sent.spans():
        label = table.label_for(type_str)
        if label is None:
            domain = type_str.split("/")[1] if type_str.startswith("/") else type_str
            if domain in table.dropped_domains:
                continue  # whole span degrades to O, never a dangling I-
            raise ValueError(f"no coarse mapping for type {type_str}")
        tags[start] = f"B-{label}"
        for pos in range(start + 1, end):
            tags[pos] = f"I-{label}"
    return tags


def to_coarse(corpus: AnnotatedCorpus, table: TypeMappingTable) -> AnnotatedCorpus:
    """Convert fine tags to the four coarse labels, dropping eliminated domains."""
    sentences = []
    for sent in corpus.sentences:
        if sent.domain in table.dropped_domains:
            continue
        sentences.append(
            AnnotatedSentence(
                sent.doc_key, sent.index, sent.tokens, _coarse_tags(sent, table), sent.domain
            )
        )
    provenance = dict(corpus.provenance, coarse=True)
    return AnnotatedCorpus(sentences, provenance)
