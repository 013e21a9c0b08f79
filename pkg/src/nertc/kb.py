"""Knowledge-base snapshot: typed entity records and the line-oriented snapshot file.

A snapshot file is UTF-8, LF-terminated, and starts with the header line
``#kbsnap v1``.  ``#merge SRC DST`` directive lines declare domain merges;
every other non-blank line is one JSON object describing an entity::

    {"mid": "m.001", "lang": "tr", "name": "Titanic", "aliases": [],
     "types": ["/film/film"],
     "relations": [{"predicate": "/film/film/directed_by", "target_mid": "m.010"},
                   {"predicate": "/film/film/release_year", "literal": "1997"}],
     "description": "...", "article_key": "a_titanic"}

Domain merges are applied eagerly at parse time: every type path (declared
types and relation predicates) has its domain segment rewritten through the
merge map, so downstream consumers never see a merged-away domain.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from typing import Callable

from .errors import FormatError, UnknownMidError

HEADER = "#kbsnap v1"

_SEGMENT_RE = re.compile(r"[a-z_]+\Z")


@dataclass(frozen=True, slots=True)
class TypePath:
    """A ``/domain/type`` or ``/domain/type/property`` path.

    Segments are non-empty, lowercase ASCII letters plus underscore.
    """

    domain: str
    type_name: str
    property: str | None = None

    def __post_init__(self):
        segments = [self.domain, self.type_name]
        if self.property is not None:
            segments.append(self.property)
        for seg in segments:
            if not _SEGMENT_RE.match(seg):
                raise ValueError(f"bad type path segment {seg!r}")

    def __str__(self) -> str:
        path = f"/{self.domain}/{self.type_name}"
        if self.property is not None:
            path += f"/{self.property}"
        return path

    @classmethod
    def parse(cls, text: str) -> "TypePath":
        if not text.startswith("/"):
            raise ValueError(f"type path must start with '/': {text!r}")
        parts = text[1:].split("/")
        if len(parts) == 2:
            return cls(parts[0], parts[1])
        if len(parts) == 3:
            return cls(parts[0], parts[1], parts[2])
        raise ValueError(f"type path needs 2 or 3 segments: {text!r}")

    def without_property(self) -> "TypePath":
        return TypePath(self.domain, self.type_name)

    def with_domain(self, domain: str) -> "TypePath":
        return TypePath(domain, self.type_name, self.property)

    def matches_type(self, declared: "TypePath") -> bool:
        """True when this predicate's /domain/type prefix equals ``declared``."""
        return self.domain == declared.domain and self.type_name == declared.type_name


@dataclass(frozen=True, slots=True)
class RelationEdge:
    """A first-order relation: predicate plus either a mid target or a literal."""

    predicate: TypePath
    target_mid: str | None = None
    literal: str | None = None

    def __post_init__(self):
        if self.predicate.property is None:
            raise ValueError(f"relation predicate needs a property segment: {self.predicate}")
        if (self.target_mid is None) == (self.literal is None):
            raise ValueError("relation target must be exactly one of target_mid or literal")


@dataclass(slots=True)
class EntityRecord:
    mid: str
    language: str
    canonical_name: str
    aliases: list[str]
    types: list[TypePath]
    relations: list[RelationEdge]
    description: str | None = None
    article_key: str | None = None

    def __post_init__(self):
        if not self.mid:
            raise ValueError("mid must be non-empty")
        if len(self.language) != 2:
            raise ValueError(f"language must be a 2-letter code: {self.language!r}")
        if not self.canonical_name:
            raise ValueError(f"{self.mid}: canonical name must be non-empty")
        if len(set(self.aliases)) != len(self.aliases):
            raise ValueError(f"{self.mid}: duplicate aliases")
        if self.canonical_name in self.aliases:
            raise ValueError(f"{self.mid}: aliases must not repeat the canonical name")
        if not self.types:
            raise ValueError(f"{self.mid}: at least one declared type required")
        for tp in self.types:
            if tp.property is not None:
                raise ValueError(f"{self.mid}: declared type must not carry a property: {tp}")

    def surfaces(self) -> list[str]:
        return [self.canonical_name, *self.aliases]


@dataclass(slots=True)
class KnowledgeSnapshot:
    entities: dict[str, EntityRecord] = field(default_factory=dict)
    domain_merge_map: dict[str, str] = field(default_factory=dict)
    dangling: list[tuple[str, str]] = field(default_factory=list)
    digest: str = field(default="", compare=False)

    @property
    def dangling_count(self) -> int:
        return len(self.dangling)

    def entity(self, mid: str) -> EntityRecord:
        try:
            return self.entities[mid]
        except KeyError:
            raise UnknownMidError(mid) from None


def _validate_merge_map(merge_map: dict[str, str]) -> None:
    # Flat one-step merges only: a destination that is itself merged away
    # would make repeated application change results.
    for src, dst in merge_map.items():
        if dst in merge_map:
            raise ValueError(f"cyclic domain merge: {src} -> {dst} -> {merge_map[dst]}")


def apply_domain_merges(path: TypePath, merge_map: dict[str, str]) -> TypePath:
    dst = merge_map.get(path.domain)
    return path if dst is None else path.with_domain(dst)


def _record_from_json(obj: dict, merge_map: dict[str, str]) -> EntityRecord:
    types = [apply_domain_merges(TypePath.parse(t), merge_map) for t in obj["types"]]
    relations = []
    for rel in obj.get("relations", []):
        predicate = apply_domain_merges(TypePath.parse(rel["predicate"]), merge_map)
        relations.append(
            RelationEdge(predicate, target_mid=rel.get("target_mid"), literal=rel.get("literal"))
        )
    return EntityRecord(
        mid=obj["mid"],
        language=obj["lang"],
        canonical_name=obj["name"],
        aliases=list(obj.get("aliases", [])),
        types=types,
        relations=relations,
        description=obj.get("description"),
        article_key=obj.get("article_key"),
    )


def parse_snapshot(path: str) -> KnowledgeSnapshot:
    """Parse a snapshot file, applying domain merges and counting dangling targets."""
    with open(path, "rb") as fh:
        data = fh.read()
    digest = hashlib.sha256(data).hexdigest()[:12]
    lines = data.decode("utf-8").split("\n")
    if not lines or lines[0].strip() != HEADER:
        raise FormatError(f"missing {HEADER!r} header", path=path, line=1)

    merge_map: dict[str, str] = {}
    records: list[tuple[int, dict]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#merge "):
            parts = line.split()
            if len(parts) != 3:
                raise FormatError("expected '#merge SRC DST'", path=path, line=lineno)
            merge_map[parts[1]] = parts[2]
            continue
        if line.startswith("#"):
            continue
        try:
            records.append((lineno, json.loads(line)))
        except json.JSONDecodeError as exc:
            raise FormatError(f"malformed record: {exc}", path=path, line=lineno) from exc

    try:
        _validate_merge_map(merge_map)
    except ValueError as exc:
        raise FormatError(str(exc), path=path) from exc

    snapshot = KnowledgeSnapshot(domain_merge_map=merge_map, digest=digest)
    for lineno, obj in records:
        try:
            record = _record_from_json(obj, merge_map)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed record: {exc}", path=path, line=lineno) from exc
        if record.mid in snapshot.entities:
            raise FormatError(f"duplicate mid {record.mid}", path=path, line=lineno)
        snapshot.entities[record.mid] = record

    for entity in snapshot.entities.values():
        for rel in entity.relations:
            if rel.target_mid is not None and rel.target_mid not in snapshot.entities:
                snapshot.dangling.append((entity.mid, rel.target_mid))
    return snapshot


def _record_to_json(entity: EntityRecord) -> dict:
    obj: dict = {
        "mid": entity.mid,
        "lang": entity.language,
        "name": entity.canonical_name,
        "aliases": entity.aliases,
        "types": [str(t) for t in entity.types],
        "relations": [],
    }
    for rel in entity.relations:
        edge: dict = {"predicate": str(rel.predicate)}
        if rel.target_mid is not None:
            edge["target_mid"] = rel.target_mid
        else:
            edge["literal"] = rel.literal
        obj["relations"].append(edge)
    if entity.description is not None:
        obj["description"] = entity.description
    if entity.article_key is not None:
        obj["article_key"] = entity.article_key
    return obj


def write_snapshot(snapshot: KnowledgeSnapshot, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(HEADER + "\n")
        for src, dst in snapshot.domain_merge_map.items():
            fh.write(f"#merge {src} {dst}\n")
        for entity in snapshot.entities.values():
            fh.write(json.dumps(_record_to_json(entity), ensure_ascii=False) + "\n")


def first_order_relations(snapshot: KnowledgeSnapshot, mid: str) -> list[RelationEdge]:
    """All relation edges of ``mid`` in input order."""
    return list(snapshot.entity(mid).relations)


def first_order_entity_targets(snapshot: KnowledgeSnapshot, mid: str) -> list[str]:
    """Mids directly reachable from ``mid``, input order, duplicates removed."""
    seen: dict[str, None] = {}
    for rel in snapshot.entity(mid).relations:
        if rel.target_mid is not None and rel.target_mid in snapshot.entities:
            seen.setdefault(rel.target_mid, None)
    return list(seen)


def second_order_entities(
    snapshot: KnowledgeSnapshot,
    mid: str,
    resolve: Callable[[str], TypePath] | None = None,
) -> list[tuple[str, TypePath]]:
    """Entities exactly two mid-valued hops away, paired with their resolved type.

    The start entity and all first-order targets are excluded; the result is
    deduplicated and sorted by mid.  ``resolve`` defaults to the relation-count
    resolution rule used when building gazetteers.
    """
    if resolve is None:
        from .gazetteer import resolve_entity_type

        resolve = lambda m: resolve_entity_type(snapshot, m)  # noqa: E731

    first = set(first_order_entity_targets(snapshot, mid))
    excluded = first | {mid}
    second: set[str] = set()
    for hop in first:
        for rel in snapshot.entities[hop].relations:
            if rel.target_mid is not None and rel.target_mid in snapshot.entities:
                if rel.target_mid not in excluded:
                    second.add(rel.target_mid)
    return [(m, resolve(m)) for m in sorted(second)]
