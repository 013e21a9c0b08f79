"""Article-dump ingestion, language scoring, sentence splitting, tokenization.

The tokenizer carries the one Turkish-specific rule the whole pipeline relies
on: case suffixes attached to proper nouns with an apostrophe are split off
("Ankara'da" -> "Ankara", "'da") so a dictionary surface like "Ankara" can
match the inflected token.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass

from .errors import FormatError

DUMP_HEADER = "#wikidump v1"

APOSTROPHES = ("'", "’")

# Frequent Turkish function words; enough signal to separate Turkish from
# English article text, not meant as a linguistically complete list.
TURKISH_STOPWORDS = frozenset(
    """
    acaba ama ancak arada aslında ayrıca bana bazı belki ben beni bir biri
    birkaç birçok biz bize bu buna bunda bunu burada böyle böylece da daha
    de defa değil diye diğer dolayı en fakat gibi göre hem hep hepsi her
    herhangi hiç hiçbir ile ilgili için ise işte kadar karşın kendi kez ki
    kim mı mi mu mü nasıl ne neden nerde nerede nereye niye niçin o olan
    olarak oldu olduğu olduğunu olsa on ona ondan onlar onların onu onun
    rağmen sadece sanki siz sonra tarafından tüm var ve veya ya yani yine
    çok çünkü önce üzere şey şu şöyle
    """.split()
)

ENGLISH_STOPWORDS = frozenset(
    """
    a about above after again all also an and any are as at be because been
    before being below between both but by could did do does doing down
    during each few for from further had has have having he her here hers
    him his how i if in into is it its just me more most my no nor not of
    off on once only or other our out over own same she should so some such
    than that the their them then there these they this those through to
    too under until up very was we were what when where which while who
    whom why will with you your
    """.split()
)

TURKISH_CHARS = frozenset("çğıöşüÇĞİÖŞÜ")

# Word-final abbreviations that must not end a sentence at their dot.
TURKISH_ABBREVIATIONS = frozenset(
    """
    Alb. Av. Bkz. Bşk. Cad. Doç. Dr. Gen. Mah. Mh. No. Nu. Org. Prof. Sok.
    Sk. Yrd. age. bkz. cm. kg. km. mm. vb. vd. vs. yy. örn.
    """.split()
)

_TR_LOWER = {"İ": "i", "I": "ı"}


def fold_case(text: str) -> str:
    """Turkish-aware lowercasing: İ->i and I->ı, never I->i."""
    return "".join(_TR_LOWER.get(ch, ch.lower()) for ch in text)


def _is_punct_char(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


@dataclass(slots=True)
class Token:
    text: str
    char_start: int
    char_end: int
    is_punct: bool

    def __post_init__(self):
        if self.char_start >= self.char_end:
            raise ValueError("token offsets must satisfy start < end")


@dataclass(slots=True)
class Sentence:
    doc_key: str
    index: int
    tokens: list[Token]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("sentence needs at least one token")

    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]


@dataclass(slots=True)
class Document:
    article_key: str
    title: str
    mid: str | None
    raw_text: str


def tokenize(sentence: str) -> list[Token]:
    """Whitespace/punctuation tokenization with apostrophe-suffix splitting.

    Punctuation and symbol characters become single-character tokens, except
    an apostrophe directly followed by a letter or digit, which opens a
    suffix token ("'da").  Offsets index into ``sentence``.
    """
    tokens: list[Token] = []
    i = 0
    n = len(sentence)
    while i < n:
        ch = sentence[i]
        if ch.isspace():
            i += 1
            continue
        if ch in APOSTROPHES and i + 1 < n and sentence[i + 1].isalnum():
            start = i
            i += 1
            while i < n and sentence[i].isalnum():
                i += 1
            tokens.append(Token(sentence[start:i], start, i, is_punct=False))
            continue
        if _is_punct_char(ch):
            tokens.append(Token(ch, i, i + 1, is_punct=True))
            i += 1
            continue
        start = i
        while i < n and not sentence[i].isspace() and not _is_punct_char(sentence[i]):
            i += 1
        tokens.append(Token(sentence[start:i], start, i, is_punct=False))
    return tokens


def _trailing_word(text: str) -> str:
    match = re.search(r"(\S+)\Z", text)
    word = match.group(1) if match else ""
    return word.lstrip("(\"'«„‘“")


_SENTENCE_ENDERS = ".!?…"


def _split_block(block: str) -> list[str]:
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(block)
    while i < n:
        ch = block[i]
        if ch in _SENTENCE_ENDERS:
            j = i + 1
            while j < n and block[j].isspace():
                j += 1
            boundary = j > i + 1 and j < n and (block[j].isupper() or block[j].isdigit())
            if boundary and ch == "." and _trailing_word(block[: i + 1]) in TURKISH_ABBREVIATIONS:
                boundary = False
            if boundary:
                sentences.append(block[start : i + 1])
                start = j
                i = j
                continue
        i += 1
    sentences.append(block[start:])
    return sentences


def split_sentences(text: str) -> list[str]:
    """Rule-based sentence splitting.

    Splits after '.', '!', '?', '…' followed by whitespace and an uppercase
    letter or digit; dots ending a known abbreviation never split; two or
    more consecutive newlines always split.
    """
    out: list[str] = []
    for block in re.split(r"\n{2,}", text):
        for sent in _split_block(block):
            sent = sent.strip()
            if sent:
                out.append(sent)
    return out


def detect_language(text: str) -> float:
    """Score how Turkish a text reads, in [0, 1].

    Combines the Turkish-vs-English stopword hit ratio (weight 0.9) with the
    fraction of word tokens carrying a Turkish-specific character (weight
    0.1).  Texts without any stopword hit score a neutral 0.5 on the first
    component.  The pipeline drops documents scoring below its threshold
    (default 0.5).
    """
    if not text.strip():
        raise ValueError("cannot score empty text")
    words = [t.text for t in tokenize(text) if not t.is_punct]
    tr_hits = sum(1 for w in words if fold_case(w) in TURKISH_STOPWORDS)
    en_hits = sum(1 for w in words if w.lower() in ENGLISH_STOPWORDS)
    stopword_ratio = tr_hits / (tr_hits + en_hits) if tr_hits + en_hits else 0.5
    char_rate = (
        sum(1 for w in words if any(ch in TURKISH_CHARS for ch in w)) / len(words)
        if words
        else 0.0
    )
    return 0.9 * stopword_ratio + 0.1 * char_rate


def sentences_for_document(doc_key: str, text: str) -> list[Sentence]:
    return [
        Sentence(doc_key, idx, tokenize(raw))
        for idx, raw in enumerate(split_sentences(text))
    ]


def read_dump(path: str) -> list[Document]:
    """Read an article dump: header line then one JSON record per line."""
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != DUMP_HEADER:
            raise FormatError(f"missing {DUMP_HEADER!r} header", path=path, line=1)
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                obj = json.loads(line)
                doc = Document(
                    article_key=obj["article_key"],
                    title=obj["title"],
                    mid=obj.get("mid"),
                    raw_text=obj["text"],
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FormatError(f"malformed record: {exc}", path=path, line=lineno) from exc
            if doc.article_key in seen:
                raise FormatError(f"duplicate article_key {doc.article_key}", path=path, line=lineno)
            seen.add(doc.article_key)
            docs.append(doc)
    return docs


def write_dump(docs: list[Document], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(DUMP_HEADER + "\n")
        for doc in docs:
            obj: dict = {"article_key": doc.article_key, "title": doc.title}
            if doc.mid is not None:
                obj["mid"] = doc.mid
            obj["text"] = doc.raw_text
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
