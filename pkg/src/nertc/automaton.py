"""Token-sequence pattern matching: trie-backed leftmost-longest search.

Patterns are token tuples.  A query walks the trie from each candidate start
position and keeps the deepest accepting node, which is exactly the longest
pattern starting there; the greedy scan then restarts after each match, giving
non-overlapping leftmost-longest semantics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .kb import TypePath


@dataclass(frozen=True, slots=True)
class Match:
    start: int
    length: int
    mid: str
    type_path: TypePath

    @property
    def end(self) -> int:
        return self.start + self.length


class _Node:
    __slots__ = ("children", "payload")

    def __init__(self):
        self.children: dict[str, _Node] = {}
        self.payload: tuple[str, TypePath] | None = None


class MatchAutomaton:
    """Immutable multi-pattern matcher over token sequences.

    When two patterns share a surface, the entry with the smallest
    ``(mid, type path)`` wins, so the result never depends on insertion order.
    """

    def __init__(self, pairs: Iterable[tuple[Sequence[str], str, TypePath]]):
        self._root = _Node()
        self._size = 0
        for surface, mid, type_path in pairs:
            self._insert(tuple(surface), mid, type_path)

    def _insert(self, surface: tuple[str, ...], mid: str, type_path: TypePath) -> None:
        if not surface:
            raise ValueError("empty surface pattern")
        node = self._root
        for token in surface:
            node = node.children.setdefault(token, _Node())
        candidate = (mid, type_path)
        if node.payload is None:
            node.payload = candidate
            self._size += 1
        elif (candidate[0], str(candidate[1])) < (node.payload[0], str(node.payload[1])):
            node.payload = candidate

    def __len__(self) -> int:
        return self._size

    def longest_match_at(self, tokens: Sequence[str], start: int) -> Match | None:
        node = self._root
        best: Match | None = None
        i = start
        n = len(tokens)
        while i < n:
            node = node.children.get(tokens[i])
            if node is None:
                break
            i += 1
            if node.payload is not None:
                mid, type_path = node.payload
                best = Match(start, i - start, mid, type_path)
        return best

    def scan(self, tokens: Sequence[str], start: int = 0, end: int | None = None) -> list[Match]:
        """Greedy non-overlapping leftmost-longest matches within [start, end)."""
        if end is None:
            end = len(tokens)
        window = tokens[:end]
        matches: list[Match] = []
        i = start
        while i < end:
            match = self.longest_match_at(window, i)
            if match is None:
                i += 1
            else:
                matches.append(match)
                i = match.end
        return matches


def build_automaton(pairs: Iterable[tuple[Sequence[str], str, TypePath]]) -> MatchAutomaton:
    return MatchAutomaton(pairs)
