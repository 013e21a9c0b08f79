"""Entity-type resolution by relation counting, and the surface-form index.

Every entity declares one or more candidate types; the resolved type is the
candidate backed by the most first-order relation predicates.  Ties fall to
the larger first-plus-second-order relation count inside the candidate's
domain, then to the lexicographically smallest serialized path, so the result
is independent of declaration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import textproc
from .errors import UnresolvableTypeError
from .kb import KnowledgeSnapshot, TypePath, first_order_entity_targets

Tokenizer = Callable[[str], list[textproc.Token]]


@dataclass(slots=True)
class GazetteerEntry:
    mid: str
    resolved_type: TypePath
    surfaces: list[tuple[str, ...]]
    domain: str


@dataclass(slots=True)
class Gazetteer:
    entries: dict[str, GazetteerEntry] = field(default_factory=dict)
    surface_index: dict[tuple[str, ...], list[str]] = field(default_factory=dict)
    skipped: int = 0


def relation_support(snapshot: KnowledgeSnapshot, mid: str) -> dict[TypePath, tuple[int, int]]:
    """Per declared type: (first-order predicate matches, second-order edges in domain)."""
    entity = snapshot.entity(mid)
    support: dict[TypePath, tuple[int, int]] = {}
    second_order_edges: list[TypePath] = []
    for hop in first_order_entity_targets(snapshot, mid):
        second_order_edges.extend(rel.predicate for rel in snapshot.entities[hop].relations)
    for declared in entity.types:
        first = sum(1 for rel in entity.relations if rel.predicate.matches_type(declared))
        second = sum(1 for pred in second_order_edges if pred.domain == declared.domain)
        support[declared] = (first, second)
    return support


def resolve_entity_type(snapshot: KnowledgeSnapshot, mid: str) -> TypePath:
    """Pick the declared type with the most first-order relation support."""
    entity = snapshot.entity(mid)
    if not entity.types:
        raise UnresolvableTypeError(f"{mid}: no declared types")
    support = relation_support(snapshot, mid)

    def rank(tp: TypePath):
        first, second = support[tp]
        return (-first, -(first + second), str(tp))

    return min(entity.types, key=rank)


def build_gazetteer(
    snapshot: KnowledgeSnapshot,
    tokenizer: Tokenizer = textproc.tokenize,
    fold_case: bool = False,
) -> Gazetteer:
    """Index every typable entity's surfaces under its resolved type.

    Surfaces are stored tokenized so build-time and annotation-time matching
    share one definition of a token.  Ambiguous surfaces keep every mid in
    the index; resolution is per-entity, never per-surface.
    """
    gaz = Gazetteer()
    for mid in sorted(snapshot.entities):
        entity = snapshot.entities[mid]
        try:
            resolved = resolve_entity_type(snapshot, mid)
        except UnresolvableTypeError:
            gaz.skipped += 1
            continue
        surfaces: list[tuple[str, ...]] = []
        for raw in entity.surfaces():
            texts = tuple(tok.text for tok in tokenizer(raw))
            if fold_case:
                texts = tuple(textproc.fold_case(t) for t in texts)
            if texts and texts not in surfaces:
                surfaces.append(texts)
        if not surfaces:
            gaz.skipped += 1
            continue
        gaz.entries[mid] = GazetteerEntry(mid, resolved, surfaces, resolved.domain)
        for surface in surfaces:
            gaz.surface_index.setdefault(surface, []).append(mid)
    for mids in gaz.surface_index.values():
        mids.sort()
    return gaz


def write_gazetteer(gaz: Gazetteer, path: str) -> None:
    """Inspection export: one line per entry, tab-joined fields."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for mid in sorted(gaz.entries):
            entry = gaz.entries[mid]
            surfaces = "\t".join(" ".join(s) for s in entry.surfaces)
            fh.write(f"{mid}\t{entry.resolved_type}\t{surfaces}\n")
