"""Modal-type re-annotation: squash per-surface type noise, globally or per domain.

Both reductions keep every token, tag boundary, and O position exactly as
they are; only the type carried by a span may change.  Ties on the vote count
fall to the larger total span length, then to the lexicographically smallest
serialized type, so both passes are deterministic and idempotent.
"""

from __future__ import annotations

from collections import defaultdict

from .corpus import AnnotatedCorpus, AnnotatedSentence

VoteKey = tuple


def _modal_type(votes: dict[str, list[int]]) -> str:
    def rank(item):
        type_str, lengths = item
        return (-len(lengths), -sum(lengths), type_str)

    return min(votes.items(), key=rank)[0]


def _collect_votes(corpus: AnnotatedCorpus, with_domain: bool) -> dict[VoteKey, dict[str, list[int]]]:
    votes: dict[VoteKey, dict[str, list[int]]] = defaultdict(lambda: defaultdict(list))
    for sent in corpus.sentences:
        for start, end, type_str in sent.spans():
            key: VoteKey = (sent.surface(start, end),)
            if with_domain:
                key = (sent.surface(start, end), sent.domain)
            votes[key][type_str].append(end - start)
    return votes


def _retag(sent: AnnotatedSentence, modal: dict[VoteKey, str], with_domain: bool) -> AnnotatedSentence:
    tags = list(sent.tags)
    for start, end, _type_str in sent.spans():
        key: VoteKey = (sent.surface(start, end),)
        if with_domain:
            key = (sent.surface(start, end), sent.domain)
        winner = modal[key]
        tags[start] = f"B-{winner}"
        for pos in range(start + 1, end):
            tags[pos] = f"I-{winner}"
    return AnnotatedSentence(sent.doc_key, sent.index, sent.tokens, tags, sent.domain)


def _reduce(corpus: AnnotatedCorpus, with_domain: bool, mode: str) -> AnnotatedCorpus:
    votes = _collect_votes(corpus, with_domain)
    modal = {key: _modal_type(per_type) for key, per_type in votes.items()}
    sentences = [_retag(sent, modal, with_domain) for sent in corpus.sentences]
    return AnnotatedCorpus(sentences, dict(corpus.provenance, mode=mode))


def reduce_domain_independent(corpus: AnnotatedCorpus) -> AnnotatedCorpus:
    """Re-tag every span of a surface with that surface's corpus-wide modal type."""
    return _reduce(corpus, with_domain=False, mode="di")


def reduce_domain_dependent(corpus: AnnotatedCorpus) -> AnnotatedCorpus:
    """Like the domain-independent pass, but votes are partitioned by sentence domain."""
    for sent in corpus.sentences:
        if not sent.domain:
            raise ValueError(f"sentence {sent.index} has no domain; run annotation first")
    return _reduce(corpus, with_domain=True, mode="dd")
