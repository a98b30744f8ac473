"""Unification word grammar: follow sets over category symbols and a
nondeterministic shift-reduce parser over morpheme categories."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .featstruct import (
    Bindings,
    FeatureCategory,
    Value,
    Variable,
    format_category,
    format_value,
    rename,
    resolve,
    resolve_category,
    unify,
    unify_value,
)

BOS = "bos"
EOS = "eos"

BAR = "bar"


class WordGrammarError(ValueError):
    pass


@dataclass(frozen=True)
class SynRule:
    id: str
    mother: FeatureCategory
    daughters: tuple[FeatureCategory, ...]
    # constraints from repeated attributes, e.g. measure=M, measure=a|b
    binds: tuple[tuple[str, Value], ...] = ()

    def __post_init__(self) -> None:
        if not self.daughters:
            raise WordGrammarError(f"synrule {self.id} has no daughters")


@dataclass(frozen=True)
class FollowTable:
    table: Mapping[str, frozenset[str]]
    unconstrained: bool = False

    def follow(self, symbol: str) -> frozenset[str]:
        return self.table.get(symbol, frozenset())

    def allows(self, symbol: str, nxt: str) -> bool:
        return self.unconstrained or nxt in self.follow(symbol)

    def __getitem__(self, symbol: str) -> frozenset[str]:
        return self.follow(symbol)


def start_symbols(rules: Sequence[SynRule], starts: Sequence[FeatureCategory] = ()) -> set[str]:
    """Declared starts, mothers never used as a daughter, and bar-0 mothers."""
    used = {d.symbol for r in rules for d in r.daughters}
    found = {c.symbol for c in starts}
    for r in rules:
        if r.mother.symbol not in used or r.mother.get(BAR) == "0":
            found.add(r.mother.symbol)
    return found


def _fixpoint(update) -> None:
    changed = True
    while changed:
        changed = update()


def build_follow(
    rules: Sequence[SynRule],
    lexical_symbols: Iterable[str],
    starts: Sequence[FeatureCategory] = (),
) -> FollowTable:
    lexical = set(lexical_symbols)
    if not rules and not starts:
        return FollowTable({}, unconstrained=True)
    roots = start_symbols(rules, starts)
    if not roots:
        raise WordGrammarError("word grammar has no start category")

    productive = set(lexical)

    def grow_productive() -> bool:
        before = len(productive)
        for r in rules:
            if all(d.symbol in productive for d in r.daughters):
                productive.add(r.mother.symbol)
        return len(productive) != before

    _fixpoint(grow_productive)
    prods = [
        (r.mother.symbol, [d.symbol for d in r.daughters])
        for r in rules
        if all(d.symbol in productive for d in r.daughters)
    ]
    reachable = {s for s in roots if s in productive}
    stack = list(reachable)
    while stack:
        sym = stack.pop()
        for mother, ds in prods:
            if mother == sym:
                for d in ds:
                    if d not in reachable:
                        reachable.add(d)
                        stack.append(d)
    prods = [(m, ds) for m, ds in prods if m in reachable]

    first = {s: ({s} if s in lexical else set()) for s in reachable}
    last = {s: ({s} if s in lexical else set()) for s in reachable}

    def grow_edges() -> bool:
        changed = False
        for mother, ds in prods:
            for target, src in ((first, ds[0]), (last, ds[-1])):
                new = target[src] - target[mother]
                if new:
                    target[mother] |= new
                    changed = True
        return changed

    _fixpoint(grow_edges)

    after: dict[str, set[str]] = {s: set() for s in reachable}
    for s in roots & reachable:
        after[s].add(EOS)

    def grow_after() -> bool:
        changed = False
        for mother, ds in prods:
            for left, right in zip(ds, ds[1:]):
                new = first[right] - after[left]
                if new:
                    after[left] |= new
                    changed = True
            new = after[mother] - after[ds[-1]]
            if new:
                after[ds[-1]] |= new
                changed = True
        return changed

    _fixpoint(grow_after)

    table: dict[str, set[str]] = {BOS: set()}
    for s in roots & reachable:
        table[BOS] |= first[s]
    for sym in reachable:
        for leaf in last[sym]:
            table.setdefault(leaf, set()).update(after[sym])
    return FollowTable({k: frozenset(v) for k, v in table.items()})


# -- parse trees ---------------------------------------------------------------


@dataclass(frozen=True)
class ParseTree:
    category: FeatureCategory
    children: tuple[ParseTree, ...] = ()
    leaf: str | None = None
    rule: str | None = None

    @property
    def is_leaf(self) -> bool:
        return self.leaf is not None

    def leaves(self) -> list[str]:
        if self.is_leaf:
            return [self.leaf]  # type: ignore[list-item]
        return [x for c in self.children for x in c.leaves()]

    def rule_sequence(self) -> tuple[str, ...]:
        if self.is_leaf:
            return ()
        return (self.rule or "",) + tuple(r for c in self.children for r in c.rule_sequence())

    def resolved(self, binds: Bindings) -> ParseTree:
        return ParseTree(
            resolve_category(self.category, binds),
            tuple(c.resolved(binds) for c in self.children),
            self.leaf,
            self.rule,
        )

    def render(self, indent: int = 0) -> str:
        pad = "  " * indent
        label = format_category(self.category)
        if self.is_leaf:
            return f"{pad}({label} {self.leaf})"
        inner = "\n".join(c.render(indent + 1) for c in self.children)
        return f"{pad}({label}\n{inner})"

    def to_json(self) -> dict:
        out: dict = {
            "category": self.category.symbol,
            "features": {a: _json_value(v) for a, v in self.category.features},
        }
        if self.is_leaf:
            out["morpheme"] = self.leaf
        else:
            out["rule"] = self.rule
            out["children"] = [c.to_json() for c in self.children]
        return out


def _json_value(value: Value) -> str:
    return format_value(value)


# -- grammar and parser -------------------------------------------------------


@dataclass
class WordGrammar:
    rules: tuple[SynRule, ...] = ()
    starts: tuple[FeatureCategory, ...] = ()
    lexical_symbols: frozenset[str] = frozenset()
    follow_table: FollowTable = field(init=False)
    max_unary: int = 0

    def __post_init__(self) -> None:
        self.follow_table = build_follow(self.rules, self.lexical_symbols, self.starts)
        if not self.max_unary:
            self.max_unary = len(self.rules) + 1

    @property
    def unconstrained(self) -> bool:
        return not self.rules and not self.starts

    def follow(self, symbol: str) -> frozenset[str]:
        return self.follow_table.follow(symbol)

    def is_complete(self, cat: FeatureCategory, binds: Bindings) -> bool:
        if self.starts:
            return any(unify(cat, s, binds) is not None for s in self.starts)
        used = {d.symbol for r in self.rules for d in r.daughters}
        mothers = {r.mother.symbol for r in self.rules}
        if cat.symbol in mothers and cat.symbol not in used:
            return True
        return resolve(cat.get(BAR, ""), binds) == "0"

    def shift_reduce(
        self,
        stack: Sequence[tuple[FeatureCategory, str]],
        binds: Bindings | None = None,
    ) -> list[tuple[ParseTree, dict[str, Value]]]:
        """Every complete parse of the morpheme sequence *stack*.

        Each element is a leaf category with its morpheme text.  Returns
        ``(tree, bindings)`` pairs with trees resolved under their bindings,
        deduplicated and ordered by their pre-order rule sequence.
        """
        binds = dict(binds or {})
        seen: dict[tuple, tuple[ParseTree, dict[str, Value]]] = {}
        counter = itertools.count()
        leaves = [ParseTree(cat, leaf=text) for cat, text in stack]

        def search(nodes: tuple[ParseTree, ...], pos: int, binds: dict[str, Value], unary: int):
            if pos == len(leaves) and len(nodes) == 1 and self.is_complete(nodes[0].category, binds):
                tree = nodes[0].resolved(binds)
                key = (tree.rule_sequence(), repr(tree))
                seen.setdefault(key, (tree, binds))
            for rule in self.rules:
                n = len(rule.daughters)
                if n > len(nodes) or (n == 1 and unary >= self.max_unary):
                    continue
                suffix = f"_{next(counter)}"
                new = binds
                for var, value in rule.binds:
                    new = unify_value(Variable(var + suffix), _rename_value(value, suffix), new)
                    if new is None:
                        break
                if new is None:
                    continue
                top = nodes[len(nodes) - n :]
                for daughter, node in zip(rule.daughters, top):
                    res = unify(rename(daughter, suffix), node.category, new)
                    if res is None:
                        new = None
                        break
                    new = res[1]
                if new is None:
                    continue
                mother = ParseTree(rename(rule.mother, suffix), top, rule=rule.id)
                search(nodes[: len(nodes) - n] + (mother,), pos, new, unary + 1 if n == 1 else 0)
            if pos < len(leaves):
                search(nodes + (leaves[pos],), pos + 1, binds, 0)

        search((), 0, binds, 0)
        return [seen[k] for k in sorted(seen)]

    def parse(self, stack: Sequence[tuple[FeatureCategory, str]], binds: Bindings | None = None) -> list[ParseTree]:
        return [tree for tree, _ in self.shift_reduce(stack, binds)]


def _rename_value(value: Value, suffix: str) -> Value:
    return Variable(value.name + suffix) if isinstance(value, Variable) else value
