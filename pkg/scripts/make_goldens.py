#!/usr/bin/env python3
"""Regenerate the frozen golden files for the fixture pipeline, brute force.

Standalone on purpose: this script imports nothing from the package and
recomputes every pipeline stage in the most naive way available (full scans
instead of the trie, direct Counter votes, recounted statistics), so the
goldens it writes are an independent second route through the same file
formats.  Run it only to (re)freeze goldens after a deliberate fixture or
format change:

    python3 scripts/make_goldens.py --data tests/data --out tests/data/golden
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import unicodedata
from collections import Counter, defaultdict

APOSTROPHES = ("'", "’")
TR_STOP = set("ve bir bu da de ne için çok ile gibi daha sonra tarafından olarak sayıda".split())
EN_STOP = set("the a an is are was were of in on for and or to it this most one".split())
TR_CHARS = set("çğıöşüÇĞİÖŞÜ")
ABBREV = {"Dr.", "Prof.", "vb.", "vs.", "yy.", "örn.", "bkz.", "No."}
COARSE = ("PERSON", "ORGANIZATION", "LOCATION", "MISC")


def punct_char(ch):
    return unicodedata.category(ch)[0] in ("P", "S")


def tokenize(text):
    """(text, is_punct) pairs; apostrophe directly before alnum opens a suffix token."""
    out = []
    buf = ""
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            if buf:
                out.append((buf, False))
                buf = ""
            i += 1
        elif ch in APOSTROPHES and i + 1 < n and text[i + 1].isalnum():
            if buf:
                out.append((buf, False))
            buf = ch
            i += 1
            while i < n and text[i].isalnum():
                buf += text[i]
                i += 1
            out.append((buf, False))
            buf = ""
        elif punct_char(ch):
            if buf:
                out.append((buf, False))
                buf = ""
            out.append((ch, True))
            i += 1
        else:
            buf += ch
            i += 1
    if buf:
        out.append((buf, False))
    return out


def split_sentences(text):
    sentences = []
    for block in text.split("\n\n"):
        current = ""
        i, n = 0, len(block)
        while i < n:
            current += block[i]
            if block[i] in ".!?…":
                j = i + 1
                while j < n and block[j].isspace():
                    j += 1
                if j > i + 1 and j < n and (block[j].isupper() or block[j].isdigit()):
                    last_word = current.split()[-1] if current.split() else ""
                    if not (block[i] == "." and last_word.lstrip("(\"'«„") in ABBREV):
                        sentences.append(current.strip())
                        current = ""
                        i = j
                        continue
            i += 1
        if current.strip():
            sentences.append(current.strip())
    return [s for s in sentences if s]


def turkish_score(text):
    words = [t for t, p in tokenize(text) if not p]
    lowered = [w.replace("İ", "i").replace("I", "ı").lower() for w in words]
    tr = sum(1 for w in lowered if w in TR_STOP)
    en = sum(1 for w in words if w.lower() in EN_STOP)
    ratio = tr / (tr + en) if tr + en else 0.5
    rate = sum(1 for w in words if TR_CHARS & set(w)) / len(words) if words else 0.0
    return 0.9 * ratio + 0.1 * rate


def load_kb(path):
    merges = {}
    entities = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    assert lines[0] == "#kbsnap v1"
    records = []
    for line in lines[1:]:
        line = line.strip()
        if line.startswith("#merge "):
            _, src, dst = line.split()
            merges[src] = dst
        elif line and not line.startswith("#"):
            records.append(json.loads(line))

    def remap(path_str):
        parts = path_str.split("/")
        parts[1] = merges.get(parts[1], parts[1])
        return "/".join(parts)

    for obj in records:
        obj["types"] = [remap(t) for t in obj["types"]]
        for rel in obj.get("relations", []):
            rel["predicate"] = remap(rel["predicate"])
        entities[obj["mid"]] = obj
    return entities


def resolve_type(entities, mid):
    ent = entities[mid]
    hops = []
    for rel in ent.get("relations", []):
        tm = rel.get("target_mid")
        if tm in entities and tm not in hops:
            hops.append(tm)
    second_preds = [r["predicate"] for h in hops for r in entities[h].get("relations", [])]

    def score(t):
        first = sum(
            1 for r in ent.get("relations", []) if r["predicate"].rsplit("/", 1)[0] == t
        )
        domain = t.split("/")[1]
        second = sum(1 for p in second_preds if p.split("/")[1] == domain)
        return (-first, -(first + second), t)

    return sorted(ent["types"], key=score)[0]


def surfaces_of(entities, mid):
    ent = entities[mid]
    out = []
    for name in [ent["name"], *ent.get("aliases", [])]:
        toks = tuple(t for t, _ in tokenize(name))
        if toks and toks not in out:
            out.append(toks)
    return out


def second_order(entities, mid):
    first = []
    for rel in entities[mid].get("relations", []):
        tm = rel.get("target_mid")
        if tm in entities and tm not in first:
            first.append(tm)
    found = set()
    for hop in first:
        for rel in entities[hop].get("relations", []):
            tm = rel.get("target_mid")
            if tm in entities and tm != mid and tm not in first:
                found.add(tm)
    return sorted(found)


def brute_match(patterns, texts, eligible, tags):
    """Greedy leftmost-longest over eligible positions; writes tags in place.

    patterns: {surface tuple: (mid, type)}.  A match may not include any
    ineligible position.
    """
    n = len(texts)
    i = 0
    while i < n:
        if not eligible(i):
            i += 1
            continue
        best = None
        for surface, (mid, type_str) in patterns.items():
            length = len(surface)
            if i + length > n or tuple(texts[i : i + length]) != surface:
                continue
            if any(not eligible(p) for p in range(i, i + length)):
                continue
            key = (-length, mid, type_str)
            if best is None or key < best[0]:
                best = (key, length, type_str)
        if best is None:
            i += 1
            continue
        _, length, type_str = best
        tags[i] = "B-" + type_str
        for p in range(i + 1, i + length):
            tags[p] = "I-" + type_str
        i += length


def annotate_all(entities, docs, threshold=0.5):
    resolved = {mid: resolve_type(entities, mid) for mid in entities}
    skipped_no_text = skipped_language = 0
    per_key = {}

    for mid in sorted(entities):
        ent = entities[mid]
        key = ent.get("article_key") if ent.get("article_key") in docs else None
        if key is not None:
            doc_key, text = key, docs[key]
        elif ent.get("description"):
            doc_key, text = "desc:" + mid, ent["description"]
        else:
            skipped_no_text += 1
            continue
        if not text.strip() or turkish_score(text) < threshold:
            skipped_language += 1
            continue

        def pattern_set(mids):
            patterns = {}
            for m in mids:
                for surface in surfaces_of(entities, m):
                    cand = (m, resolved[m])
                    if surface not in patterns or (cand[0], cand[1]) < patterns[surface]:
                        patterns[surface] = cand
            return patterns

        first_mids = [mid] + [
            rel["target_mid"]
            for rel in ent.get("relations", [])
            if rel.get("target_mid") in entities
        ]
        first_patterns = pattern_set(dict.fromkeys(first_mids))
        all_patterns = pattern_set(dict.fromkeys(first_mids + second_order(entities, mid)))

        for index, sentence in enumerate(split_sentences(text)):
            toks = tokenize(sentence)
            texts = [t for t, _ in toks]
            punct = [p for _, p in toks]
            tags = ["O"] * len(texts)
            brute_match(first_patterns, texts, lambda i: not punct[i], tags)
            brute_match(
                all_patterns, texts, lambda i: not punct[i] and tags[i] == "O", tags
            )

            domains = Counter()
            for tag in tags:
                if tag.startswith("B-"):
                    domains[tag[2:].split("/")[1]] += 1
            cpn_domain = resolved[mid].split("/")[1]
            if not domains:
                domain = cpn_domain
            else:
                top = max(domains.values())
                leaders = sorted(d for d, c in domains.items() if c == top)
                domain = cpn_domain if cpn_domain in leaders else leaders[0]

            tagged = sum(1 for t in tags if t != "O")
            slot = per_key.get((doc_key, index))
            if slot is None or tagged > slot[0]:
                per_key[(doc_key, index)] = (tagged, domain, texts, tags, punct)

    rows = [per_key[k] for k in sorted(per_key)]
    meta = {"skipped_language": skipped_language, "skipped_no_text": skipped_no_text}
    return rows, meta


def write_corpus(path, rows, provenance):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("#twnertc v1\n")
        fh.write(
            "#provenance "
            + json.dumps(provenance, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
            + "\n"
        )
        for _tagged, domain, texts, tags, _punct in rows:
            fh.write(f"{domain}\t{' '.join(texts)}\t{' '.join(tags)}\n")


def spans_of(tags):
    spans = []
    start = current = None
    for i, tag in enumerate(tags):
        if tag.startswith("B-"):
            if current is not None:
                spans.append((start, i, current))
            start, current = i, tag[2:]
        elif tag == "O" and current is not None:
            spans.append((start, i, current))
            start = current = None
    if current is not None:
        spans.append((start, len(tags), current))
    return spans


def reduce_noise(rows, by_domain):
    votes = defaultdict(lambda: defaultdict(list))
    for _tagged, domain, texts, tags, _punct in rows:
        for s, e, t in spans_of(tags):
            key = (tuple(texts[s:e]), domain) if by_domain else (tuple(texts[s:e]),)
            votes[key][t].append(e - s)
    modal = {}
    for key, per_type in votes.items():
        modal[key] = sorted(
            per_type.items(), key=lambda kv: (-len(kv[1]), -sum(kv[1]), kv[0])
        )[0][0]
    out = []
    for tagged, domain, texts, tags, punct in rows:
        tags = list(tags)
        for s, e, _t in spans_of(tags):
            key = (tuple(texts[s:e]), domain) if by_domain else (tuple(texts[s:e]),)
            winner = modal[key]
            tags[s] = "B-" + winner
            for p in range(s + 1, e):
                tags[p] = "I-" + winner
        out.append((tagged, domain, texts, tags, punct))
    return out


def load_mapping(path):
    mapping, dropped = {}, set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("!drop"):
                dropped.add(line.split()[1])
            else:
                type_str, label = line.split()
                assert label in COARSE, label
                assert type_str not in mapping, type_str
                mapping[type_str] = label
    return mapping, dropped


def to_coarse(rows, mapping, dropped):
    out = []
    for tagged, domain, texts, tags, punct in rows:
        if domain in dropped:
            continue
        new_tags = ["O"] * len(tags)
        for s, e, t in spans_of(tags):
            label = mapping.get(t)
            if label is None:
                assert t.split("/")[1] in dropped, f"unmapped type {t}"
                continue
            new_tags[s] = "B-" + label
            for p in range(s + 1, e):
                new_tags[p] = "I-" + label
        out.append((sum(1 for t in new_tags if t != "O"), domain, texts, new_tags, punct))
    return out


def compute_stats(rows):
    domain_sentences = Counter()
    tokens_with = tokens_without = tagged = 0
    all_types = set()
    domain_types = defaultdict(set)
    coarse_tokens = {label: 0 for label in COARSE}
    only_coarse = True
    for _tagged, domain, texts, tags, punct in rows:
        domain_sentences[domain] += 1
        for i, tag in enumerate(tags):
            tokens_with += 1
            if not punct[i]:
                tokens_without += 1
            if tag == "O":
                continue
            tagged += 1
            t = tag[2:]
            all_types.add(t)
            domain_types[domain].add(t)
            if t in coarse_tokens:
                coarse_tokens[t] += 1
            else:
                only_coarse = False

    def arg(counts, pick_max):
        if not counts:
            return None
        best = (max if pick_max else min)(counts.values())
        return [min(k for k, v in counts.items() if v == best), best]

    type_counts = {d: len(s) for d, s in domain_types.items()}
    return {
        "sentences": len(rows),
        "domain_sentences": dict(sorted(domain_sentences.items())),
        "domain_most_sentences": arg(domain_sentences, True),
        "domain_fewest_sentences": arg(domain_sentences, False),
        "tokens_with_punct": tokens_with,
        "tokens_without_punct": tokens_without,
        "tagged_tokens": tagged,
        "unique_types": len(all_types),
        "domain_unique_types": dict(sorted(type_counts.items())),
        "domain_most_types": arg(type_counts, True),
        "domain_fewest_types": arg(type_counts, False),
        "coarse_label_tokens": coarse_tokens if only_coarse and tagged else None,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", default="tests/data")
    ap.add_argument("--out", default="tests/data/golden")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    kb_path = os.path.join(args.data, "minikb.kbsnap")
    entities = load_kb(kb_path)
    with open(os.path.join(args.data, "articles.dump"), encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    assert lines[0] == "#wikidump v1"
    docs = {}
    for line in lines[1:]:
        if line.strip():
            obj = json.loads(line)
            docs[obj["article_key"]] = obj["text"]

    with open(kb_path, "rb") as fh:
        snapshot_digest = hashlib.sha256(fh.read()).hexdigest()[:12]
    config = json.dumps({"fold_case": False, "threshold": 0.5}, sort_keys=True, separators=(",", ":"))
    config_digest = hashlib.sha256(config.encode()).hexdigest()[:12]

    rows, meta = annotate_all(entities, docs)
    provenance = {"config": config_digest, "snapshot": snapshot_digest, **meta}
    write_corpus(os.path.join(args.out, "fga.tsv"), rows, provenance)

    mapping, dropped = load_mapping(os.path.join(args.data, "type_mapping.txt"))
    variants = {
        "fga_di": (reduce_noise(rows, False), dict(provenance, mode="di")),
        "fga_dd": (reduce_noise(rows, True), dict(provenance, mode="dd")),
    }
    variants["cga"] = (to_coarse(rows, mapping, dropped), dict(provenance, coarse=True))
    variants["cga_di"] = (
        to_coarse(variants["fga_di"][0], mapping, dropped),
        dict(provenance, mode="di", coarse=True),
    )
    variants["cga_dd"] = (
        to_coarse(variants["fga_dd"][0], mapping, dropped),
        dict(provenance, mode="dd", coarse=True),
    )
    for name, (variant_rows, prov) in variants.items():
        write_corpus(os.path.join(args.out, f"{name}.tsv"), variant_rows, prov)

    for name, stat_rows in [
        ("stats_fga", rows),
        ("stats_cga_di", variants["cga_di"][0]),
        ("stats_cga_dd", variants["cga_dd"][0]),
    ]:
        with open(os.path.join(args.out, f"{name}.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(compute_stats(stat_rows), ensure_ascii=False, indent=2, sort_keys=True) + "\n")

    # Derived values worth freezing in unit tests, printed for inspection.
    print("resolved types:")
    for mid in sorted(entities):
        print(f"  {mid} -> {resolve_type(entities, mid)}")
    print("second order of m.001:", second_order(entities, mid="m.001"))
    print("language scores:")
    for key in sorted(docs):
        print(f"  {key}: {turkish_score(docs[key]):.4f}")
    print("fga rows:")
    for _tagged, domain, texts, tags, _p in rows:
        print(f"  [{domain}] {' '.join(texts)}")
        print(f"      {' '.join(tags)}")
    print("stats:", json.dumps(compute_stats(rows)))


if __name__ == "__main__":
    main()
