"""Graph-crawl annotation: match entity surfaces per central entity, emit IOB tags.

For each central entity (CPN) with a usable text:

1. take the entity itself as the pivot;
2. fetch its dump article, falling back to its KB description, and drop the
   text when the language score is below threshold;
3. match the pivot's surfaces plus the surfaces of its first-order relation
   targets, leftmost-longest, into B-/I- tags;
4. extend the pattern set with second-order entities and re-match, touching
   only tokens still tagged O;
5. label the sentence with the domain matched most often, ties favoring the
   pivot's own domain, then the lexicographically smallest domain.

Sentences reached through several pivots (shared articles) are deduplicated,
keeping the pivot that matched the most tokens.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor

from . import textproc
from .automaton import MatchAutomaton, build_automaton
from .corpus import OUT, AnnotatedCorpus, AnnotatedSentence
from .gazetteer import Gazetteer
from .kb import (
    KnowledgeSnapshot,
    TypePath,
    first_order_entity_targets,
    second_order_entities,
)
from .textproc import Document, Sentence

PatternPairs = list[tuple[tuple[str, ...], str, TypePath]]


def config_digest(threshold: float, fold_case: bool) -> str:
    blob = json.dumps(
        {"fold_case": fold_case, "threshold": threshold}, sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def _entry_pairs(gaz: Gazetteer, mid: str):
    entry = gaz.entries.get(mid)
    if entry is None:
        return []
    return [(surface, mid, entry.resolved_type) for surface in entry.surfaces]


def _match_tokens(sent: Sentence, fold_case: bool) -> list[str]:
    texts = sent.texts()
    if fold_case:
        texts = [textproc.fold_case(t) for t in texts]
    return texts


def _apply_matches(
    automaton: MatchAutomaton,
    sent: Sentence,
    tags: list[str],
    fold_case: bool,
) -> None:
    """Match within eligible runs and write B-/I- tags in place.

    Eligible tokens are non-punctuation tokens still tagged O; matches never
    cross a punctuation token or an already-tagged one.
    """
    texts = _match_tokens(sent, fold_case)
    n = len(texts)
    i = 0
    while i < n:
        if sent.tokens[i].is_punct or tags[i] != OUT:
            i += 1
            continue
        run_start = i
        while i < n and not sent.tokens[i].is_punct and tags[i] == OUT:
            i += 1
        for match in automaton.scan(texts, run_start, i):
            type_str = str(match.type_path)
            tags[match.start] = f"B-{type_str}"
            for pos in range(match.start + 1, match.end):
                tags[pos] = f"I-{type_str}"


def annotate_sentence(
    automaton: MatchAutomaton, sent: Sentence, fold_case: bool = False
) -> AnnotatedSentence:
    """Single-pass leftmost-longest annotation; punctuation always stays O."""
    tags = [OUT] * len(sent.tokens)
    _apply_matches(automaton, sent, tags, fold_case)
    return AnnotatedSentence(sent.doc_key, sent.index, sent.tokens, tags)


def _assign_domain(annotated: AnnotatedSentence, cpn_domain: str) -> str:
    counts = Counter()
    for _, _, type_str in annotated.spans():
        counts[type_str.split("/")[1]] += 1
    if not counts:
        return cpn_domain
    top = max(counts.values())
    leaders = sorted(d for d, c in counts.items() if c == top)
    return cpn_domain if cpn_domain in leaders else leaders[0]


def _text_for(entity, docs_by_key: dict[str, Document]) -> tuple[str, str] | None:
    if entity.article_key is not None and entity.article_key in docs_by_key:
        return entity.article_key, docs_by_key[entity.article_key].raw_text
    if entity.description:
        return f"desc:{entity.mid}", entity.description
    return None


def annotate_cpn(
    snapshot: KnowledgeSnapshot,
    gaz: Gazetteer,
    docs: list[Document] | dict[str, Document],
    cpn_mid: str,
    threshold: float = 0.5,
    fold_case: bool = False,
    skip_stats: dict | None = None,
) -> list[AnnotatedSentence]:
    """Run the five annotation steps for one central entity.

    Returns an empty list when the entity has no usable text or the text
    fails the language check; ``skip_stats`` (when given) counts the reason
    under ``skipped_no_text`` / ``skipped_language``.
    """
    docs_by_key = docs if isinstance(docs, dict) else {d.article_key: d for d in docs}
    entity = snapshot.entity(cpn_mid)

    source = _text_for(entity, docs_by_key)
    if source is None:
        if skip_stats is not None:
            skip_stats["skipped_no_text"] = skip_stats.get("skipped_no_text", 0) + 1
        return []
    doc_key, text = source
    if not text.strip() or textproc.detect_language(text) < threshold:
        if skip_stats is not None:
            skip_stats["skipped_language"] = skip_stats.get("skipped_language", 0) + 1
        return []

    first_pairs: PatternPairs = list(_entry_pairs(gaz, cpn_mid))
    for mid in first_order_entity_targets(snapshot, cpn_mid):
        first_pairs.extend(_entry_pairs(gaz, mid))
    first_automaton = build_automaton(first_pairs)

    extended_pairs = list(first_pairs)
    for mid, _resolved in second_order_entities(snapshot, cpn_mid):
        extended_pairs.extend(_entry_pairs(gaz, mid))
    extended_automaton = build_automaton(extended_pairs)

    cpn_entry = gaz.entries.get(cpn_mid)
    cpn_domain = cpn_entry.domain if cpn_entry is not None else ""

    out: list[AnnotatedSentence] = []
    for sent in textproc.sentences_for_document(doc_key, text):
        annotated = annotate_sentence(first_automaton, sent, fold_case)
        _apply_matches(extended_automaton, sent, annotated.tags, fold_case)
        annotated.domain = _assign_domain(annotated, cpn_domain)
        out.append(annotated)
    return out


def annotate_corpus(
    snapshot: KnowledgeSnapshot,
    gaz: Gazetteer,
    docs: list[Document],
    threshold: float = 0.5,
    fold_case: bool = False,
    jobs: int = 1,
) -> AnnotatedCorpus:
    """Annotate with every gazetteer entry as CPN; deduplicate shared sentences.

    Output ordering is deterministic: sentences sorted by (doc key, index),
    pivots visited in mid order, and a shared sentence kept from the pivot
    that matched the most tokens (first mid wins ties).
    """
    docs_by_key = {d.article_key: d for d in docs}
    mids = sorted(gaz.entries)

    def run(mid: str) -> tuple[list[AnnotatedSentence], dict]:
        # Per-call skip counter keeps the parallel path race-free.
        local: dict = {}
        return annotate_cpn(snapshot, gaz, docs_by_key, mid, threshold, fold_case, local), local

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_cpn = list(pool.map(run, mids))
    else:
        per_cpn = [run(mid) for mid in mids]

    skip_stats: dict = {}
    for _, local in per_cpn:
        for key, value in local.items():
            skip_stats[key] = skip_stats.get(key, 0) + value

    best: dict[tuple[str, int], AnnotatedSentence] = {}
    for sentences, _ in per_cpn:
        for sent in sentences:
            key = (sent.doc_key, sent.index)
            kept = best.get(key)
            if kept is None or sent.tagged_count() > kept.tagged_count():
                best[key] = sent

    ordered = [best[key] for key in sorted(best)]
    provenance = {
        "config": config_digest(threshold, fold_case),
        "skipped_language": skip_stats.get("skipped_language", 0),
        "skipped_no_text": skip_stats.get("skipped_no_text", 0),
        "snapshot": snapshot.digest or "unknown",
    }
    return AnnotatedCorpus(ordered, provenance)
