"""Morpheme storage: one character trie per lexical tape."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .featstruct import FeatureCategory, Value, Variable
from .rulebase import BOUNDARY, Item

Env = Mapping[str, str]


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class Entry:
    """A morpheme stored on one tape, with its category."""

    form: tuple[str, ...]
    category: FeatureCategory
    tape: int
    binds: tuple[tuple[str, Value], ...] = ()

    @property
    def text(self) -> str:
        return "".join(self.form)


class TrieNode:
    __slots__ = ("edges", "accepts")

    def __init__(self) -> None:
        self.edges: dict[str, TrieNode] = {}
        self.accepts: tuple[Entry, ...] = ()

    def __repr__(self) -> str:
        return f"TrieNode(edges={sorted(self.edges)}, accepts={len(self.accepts)})"


LexPointers = tuple[TrieNode, ...]
# per tape, the entries whose boundary was crossed (usually zero or one)
LexCats = tuple[tuple[Entry, ...], ...]


class Lexicon:
    def __init__(self, ntapes: int, alphabets: Mapping[int, Sequence[str]] | None = None):
        self.ntapes = ntapes
        self.alphabets = {k: set(v) for k, v in (alphabets or {}).items()}
        self.roots: tuple[TrieNode, ...] = tuple(TrieNode() for _ in range(ntapes))
        self.size = 0

    # -- building ---------------------------------------------------------------

    def insert(
        self,
        tape: int,
        form: Sequence[str],
        category: FeatureCategory,
        binds: Mapping[str, Value] | None = None,
    ) -> Entry:
        if not 1 <= tape <= self.ntapes:
            raise LexiconError(f"tape {tape} out of range 1..{self.ntapes}")
        if not form:
            raise LexiconError("empty morpheme")
        alpha = self.alphabets.get(tape)
        for sym in form:
            if sym == BOUNDARY:
                raise LexiconError(f"boundary symbol inside morpheme {''.join(form)}")
            if alpha is not None and sym not in alpha:
                raise LexiconError(f"symbol {sym!r} of {''.join(form)} not in alphabet of tape {tape}")
        node = self.roots[tape - 1]
        for sym in form:
            node = node.edges.setdefault(sym, TrieNode())
        entry = Entry(tuple(form), category, tape, tuple((binds or {}).items()))
        node.accepts = node.accepts + (entry,)
        self.size += 1
        return entry

    # -- queries -----------------------------------------------------------------

    def initial_pointers(self) -> LexPointers:
        return self.roots

    def at_all_roots(self, ptrs: Sequence[TrieNode | None]) -> bool:
        return all(p is r for p, r in zip(ptrs, self.roots))

    def is_root(self, tape: int, node: TrieNode | None) -> bool:
        return node is self.roots[tape - 1]

    def lookup(self, tape: int, form: Sequence[str]) -> tuple[Entry, ...]:
        node = self.roots[tape - 1]
        for sym in form:
            node = node.edges.get(sym)
            if node is None:
                return ()
        return node.accepts

    def entries(self, tape: int) -> Iterator[Entry]:
        stack = [self.roots[tape - 1]]
        while stack:
            node = stack.pop()
            yield from node.accepts
            stack.extend(node.edges.values())

    def walk(
        self,
        tape: int,
        node: TrieNode,
        items: Sequence[Item],
        env: Env,
        domains: Mapping[str, Sequence[str]],
    ) -> Iterator[tuple[TrieNode, tuple[Entry, ...], Env]]:
        """Walk *items* from *node*; unbound variables take trie edges.

        Yields ``(end node, entries crossed at boundaries, env)`` for every
        way through.  A boundary needs an accepting node and returns the
        walk to the tape's root.
        """
        root = self.roots[tape - 1]

        def step(i: int, node: TrieNode, crossed: tuple[Entry, ...], env: Env):
            if i == len(items):
                yield node, crossed, env
                return
            item = items[i]
            if isinstance(item, Variable):
                bound = env.get(item.name)
                if bound is None:
                    allowed = domains.get(item.name)
                    for sym, child in node.edges.items():
                        if allowed is None or sym in allowed:
                            yield from step(i + 1, child, crossed, {**env, item.name: sym})
                    if node.accepts and (allowed is None or BOUNDARY in allowed):
                        for entry in node.accepts:
                            yield from step(i + 1, root, crossed + (entry,), {**env, item.name: BOUNDARY})
                    return
                item = bound
            if item == BOUNDARY:
                for entry in node.accepts:
                    yield from step(i + 1, root, crossed + (entry,), env)
                return
            child = node.edges.get(item)
            if child is not None:
                yield from step(i + 1, child, crossed, env)

        yield from step(0, node, (), env)

    def lexical_transitions(
        self, lex: Sequence[Sequence[str]], ptrs: Sequence[TrieNode]
    ) -> list[tuple[LexPointers, LexCats | None]]:
        """Advance every tape's pointer over its part of *lex*.

        Returns one ``(new pointers, cats)`` pair per way through (several
        only when homographs share an accepting node); an empty list means
        there is no transition.  ``cats`` is ``None`` when no tape crossed a
        boundary.
        """
        results: list[tuple[list[TrieNode], list[tuple[Entry, ...]]]] = [([], [])]
        for t in range(self.ntapes):
            nxt = []
            for new_ptrs, cats in results:
                for node, crossed, _ in self.walk(t + 1, ptrs[t], lex[t], {}, {}):
                    nxt.append((new_ptrs + [node], cats + [crossed]))
            results = nxt
            if not results:
                return []
        out = []
        for new_ptrs, cats in results:
            out.append((tuple(new_ptrs), tuple(cats) if any(cats) else None))
        return out


class FreeLexicon(Lexicon):
    """Stand-in for grammars without morphemes: any string is accepted."""

    def __init__(self, ntapes: int, alphabets: Mapping[int, Sequence[str]] | None = None):
        super().__init__(ntapes, alphabets)

    def initial_pointers(self) -> LexPointers:
        return self.roots

    def walk(self, tape, node, items, env, domains):
        def step(i: int, env: Env):
            if i == len(items):
                yield node, (), env
                return
            item = items[i]
            if isinstance(item, Variable) and item.name not in env:
                allowed = domains.get(item.name) or sorted(self.alphabets.get(tape, ()))
                for sym in allowed:
                    yield from step(i + 1, {**env, item.name: sym})
                return
            yield from step(i + 1, env)

        yield from step(0, env)
