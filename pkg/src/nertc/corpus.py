"""IOB-annotated corpus model, the corpus file format, and test-set sampling.

Corpus files are UTF-8 with LF line endings.  The first line is the header
``#twnertc v1``; an optional ``#provenance {json}`` line carries pipeline
metadata; every following line is one sentence::

    domain<TAB>space-joined tokens<TAB>space-joined tags

Tags are ``O`` or ``B-``/``I-`` plus a serialized type path.  The ranked
extension packs an ordered candidate list into one tag by joining paths with
``|`` (used for fine-grained ground truth and prediction files).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import FormatError
from .textproc import Token, _is_punct_char

CORPUS_HEADER = "#twnertc v1"
OUT = "O"


def tag_parts(tag: str) -> tuple[str, str | None]:
    """Split a tag into (prefix, type string); type is None for ``O``."""
    if tag == OUT:
        return OUT, None
    if tag.startswith("B-") or tag.startswith("I-"):
        return tag[0], tag[2:]
    raise ValueError(f"bad tag {tag!r}")


def split_ranked(type_str: str) -> list[str]:
    return type_str.split("|")


def validate_iob(tags: list[str]) -> None:
    previous: str | None = None
    for tag in tags:
        prefix, type_str = tag_parts(tag)
        if prefix == "I" and type_str != previous:
            raise ValueError(f"orphan or type-switching I- tag: {tag!r}")
        previous = type_str if prefix in ("B", "I") else None


@dataclass(slots=True)
class AnnotatedSentence:
    doc_key: str
    index: int
    tokens: list[Token]
    tags: list[str]
    domain: str = ""

    def __post_init__(self):
        if len(self.tokens) != len(self.tags):
            raise ValueError("one tag per token required")
        validate_iob(self.tags)

    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]

    def spans(self) -> list[tuple[int, int, str]]:
        """Decode IOB tags into (start, end, type string) triples."""
        out: list[tuple[int, int, str]] = []
        start = None
        current: str | None = None
        for i, tag in enumerate(self.tags):
            prefix, type_str = tag_parts(tag)
            if prefix == "B":
                if current is not None:
                    out.append((start, i, current))
                start, current = i, type_str
            elif prefix == OUT and current is not None:
                out.append((start, i, current))
                start, current = None, None
        if current is not None:
            out.append((start, len(self.tags), current))
        return out

    def surface(self, start: int, end: int) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens[start:end])

    def tagged_count(self) -> int:
        return sum(1 for tag in self.tags if tag != OUT)


@dataclass(slots=True)
class AnnotatedCorpus:
    sentences: list[AnnotatedSentence] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.sentences)


def tokens_from_texts(texts: list[str]) -> list[Token]:
    """Rebuild tokens from bare texts; offsets assume single-space joining."""
    tokens = []
    pos = 0
    for text in texts:
        tokens.append(
            Token(text, pos, pos + len(text), is_punct=all(_is_punct_char(c) for c in text))
        )
        pos += len(text) + 1
    return tokens


def _provenance_line(provenance: dict) -> str:
    return "#provenance " + json.dumps(
        provenance, ensure_ascii=False, sort_keys=True, separators=(",", ":")
    )


def write_corpus(corpus: AnnotatedCorpus, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CORPUS_HEADER + "\n")
        if corpus.provenance:
            fh.write(_provenance_line(corpus.provenance) + "\n")
        for sent in corpus.sentences:
            fh.write(f"{sent.domain}\t{' '.join(sent.texts())}\t{' '.join(sent.tags)}\n")


def write_corpus_conll(corpus: AnnotatedCorpus, path: str) -> None:
    """Alternative writer: one token+tag per line, blank line between sentences."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, sent in enumerate(corpus.sentences):
            if i:
                fh.write("\n")
            fh.write(f"# domain: {sent.domain}\n")
            for token, tag in zip(sent.tokens, sent.tags):
                fh.write(f"{token.text}\t{tag}\n")


def read_corpus(path: str) -> AnnotatedCorpus:
    corpus = AnnotatedCorpus()
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != CORPUS_HEADER:
            raise FormatError(f"missing {CORPUS_HEADER!r} header", path=path, line=1)
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#provenance "):
                try:
                    corpus.provenance = json.loads(line[len("#provenance ") :])
                except json.JSONDecodeError as exc:
                    raise FormatError(f"bad provenance: {exc}", path=path, line=lineno) from exc
                continue
            if line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError("expected 3 tab-separated columns", path=path, line=lineno)
            domain, token_col, tag_col = parts
            texts = token_col.split(" ")
            tags = tag_col.split(" ")
            try:
                sent = AnnotatedSentence(
                    doc_key="",
                    index=lineno - 2,
                    tokens=tokens_from_texts(texts),
                    tags=tags,
                    domain=domain,
                )
            except ValueError as exc:
                raise FormatError(str(exc), path=path, line=lineno) from exc
            corpus.sentences.append(sent)
    return corpus


def non_punct_token_count(sent: AnnotatedSentence) -> int:
    return sum(1 for t in sent.tokens if not t.is_punct)


def sample_by_words(corpus: AnnotatedCorpus, words: int, seed: int) -> AnnotatedCorpus:
    """Draw sentences at random until at least ``words`` non-punctuation tokens."""
    order = list(range(len(corpus.sentences)))
    random.Random(seed).shuffle(order)
    picked: list[int] = []
    total = 0
    for idx in order:
        if total >= words:
            break
        picked.append(idx)
        total += non_punct_token_count(corpus.sentences[idx])
    picked.sort()
    provenance = dict(corpus.provenance, sample={"words": words, "seed": seed})
    return AnnotatedCorpus([corpus.sentences[i] for i in picked], provenance)


def sample_by_sentences(corpus: AnnotatedCorpus, count: int, seed: int) -> AnnotatedCorpus:
    order = list(range(len(corpus.sentences)))
    random.Random(seed).shuffle(order)
    picked = sorted(order[:count])
    provenance = dict(corpus.provenance, sample={"sentences": count, "seed": seed})
    return AnnotatedCorpus([corpus.sentences[i] for i in picked], provenance)
