"""The two-level interpreter.

:func:`partition` searches depth-first for sequences of rule-licensed
lexical/surface pairs; :func:`coerce` discards partitions that violate an
obligatory rule; :func:`two_level_analysis` ties both to the word grammar
and runs in either direction.  :func:`cascade` composes two grammars.

Histories are kept in reading order.  Pending material (the ``todo`` of
each side) may hold placeholders: a ``frozenset`` of admissible symbols
committed by a right context over a side whose content is not yet known.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence, Union

from .featstruct import (
    FeatureCategory,
    Value,
    Variable,
    rename,
    rename_bindings,
    resolve_category,
    unify,
    unify_value,
)
from .grammario import CascadeGrammar, GrammarSnapshot
from .lexicon import Entry, TrieNode
from .rulebase import BOUNDARY, CompiledRule, Direction, Item
from .wordgrammar import BOS, EOS, ParseTree

Pending = Union[str, frozenset]
Tracer = Callable[[str, str], None]
Cats = tuple[Union[FeatureCategory, None], ...]


class UsageError(ValueError):
    pass


class CascadeOverflow(RuntimeError):
    pass


@dataclass(frozen=True)
class PartitionStep:
    rule_id: str
    lsc: tuple[str, ...]
    surf: tuple[str, ...]
    rsc: tuple[str, ...]
    llc: tuple[tuple[str, ...], ...]
    lex: tuple[tuple[str, ...], ...]
    rlc: tuple[tuple[str, ...], ...]
    # per-tape category (renamed apart) if this step crossed a boundary
    lex_cats: Cats | None = None
    surf_pos: int = 0
    lex_pos: tuple[int, ...] = ()

    def triple(self) -> tuple[str, str, tuple[str, ...]]:
        return self.rule_id, "".join(self.surf), tuple("".join(t) for t in self.lex)


@dataclass(frozen=True)
class AnalysisResult:
    surface: str
    lexical: tuple[str, ...]
    partition: tuple[PartitionStep, ...]
    parse: ParseTree | None
    bindings: Mapping[str, Value] = field(compare=False, repr=False)
    morphemes: tuple[tuple[FeatureCategory, str], ...] = ()

    def triples(self) -> list[tuple[str, str, tuple[str, ...]]]:
        return [s.triple() for s in self.partition]

    def categories(self) -> list[FeatureCategory]:
        return [resolve_category(c, self.bindings) for c, _ in self.morphemes]

    def feature(self, symbol: str, attr: str) -> Value | None:
        for cat in self.categories():
            if cat.symbol == symbol:
                return cat.get(attr)
        return None


@dataclass(frozen=True)
class _Todo:
    items: tuple[Pending, ...]
    open: bool


@dataclass(frozen=True)
class SearchState:
    surf_done: tuple[str, ...]
    surf_todo: _Todo
    lex_done: tuple[tuple[str, ...], ...]
    lex_todo: tuple[_Todo, ...]
    ptrs: tuple[TrieNode, ...]
    next_cats: frozenset[str] | None
    feature_stack: tuple[tuple[int, FeatureCategory], ...]
    parse_stack: tuple[tuple[FeatureCategory, str], ...]
    binds: Mapping[str, Value]
    empty_run: int = 0
    steps: tuple[PartitionStep, ...] = ()


@dataclass
class Partition:
    steps: tuple[PartitionStep, ...]
    surface: tuple[str, ...]
    lexical: tuple[tuple[str, ...], ...]
    binds: Mapping[str, Value]
    parse_stack: tuple[tuple[FeatureCategory, str], ...]


# -- symbol strings --------------------------------------------------------------


def split_symbols(text: str | Sequence[str], alphabet) -> tuple[str, ...] | None:
    """Greedy longest-match split over *alphabet*; ``#`` reads as the boundary."""
    if not isinstance(text, str):
        return tuple(BOUNDARY if s == "#" else s for s in text)
    text = text.replace("#", BOUNDARY)
    symbols = sorted(set(alphabet) | {BOUNDARY}, key=len, reverse=True)
    out, i = [], 0
    while i < len(text):
        for sym in symbols:
            if text.startswith(sym, i):
                out.append(sym)
                i += len(sym)
                break
        else:
            return None
    return tuple(out)


# -- matching helpers ----------------------------------------------------------------


def _match_left(rev: Sequence[Item], history: Sequence[str], env: dict, domains) -> dict | None:
    if len(rev) > len(history):
        return None
    for j, item in enumerate(rev):
        sym = history[-1 - j]
        if isinstance(item, Variable):
            bound = env.get(item.name)
            if bound is None:
                dom = domains.get(item.name)
                if dom is not None and sym not in dom:
                    return None
                env = {**env, item.name: sym}
            elif bound != sym:
                return None
        elif item != sym:
            return None
    return env


def _match_right(items: Sequence[Item], todo: _Todo, start: int, env: Mapping, domains) -> _Todo | None:
    """Check a right context against pending material without consuming it.

    Returns the pending material with the context committed into it.
    Bindings made here stay local to the check.
    """
    rest = list(todo.items[start:])
    local = dict(env)
    for j, item in enumerate(items):
        if isinstance(item, Variable):
            bound = local.get(item.name)
            dom = domains.get(item.name)
            if bound is None:
                if j < len(rest):
                    have = rest[j]
                    if isinstance(have, str):
                        if dom is not None and have not in dom:
                            return None
                        local[item.name] = have
                    else:
                        narrowed = have & frozenset(dom) if dom is not None else have
                        if not narrowed:
                            return None
                        rest[j] = next(iter(narrowed)) if len(narrowed) == 1 else narrowed
                elif todo.open:
                    if dom is None:
                        return None
                    rest.append(dom[0] if len(dom) == 1 else frozenset(dom))
                else:
                    return None
                continue
            item = bound
        if j < len(rest):
            have = rest[j]
            if isinstance(have, str):
                if have != item:
                    return None
            elif item in have:
                rest[j] = item
            else:
                return None
        elif todo.open:
            rest.append(item)
        else:
            return None
    return _Todo(tuple(rest), todo.open)


def _prebind(items: Sequence[Item], todo: _Todo, env: dict, domains) -> tuple[dict, list[tuple[int, frozenset]]] | None:
    """Bind centre variables against concrete pending symbols."""
    if not todo.open and len(items) > len(todo.items):
        return None
    checks = []
    for j, item in enumerate(items):
        if j >= len(todo.items):
            break
        have = todo.items[j]
        if isinstance(have, frozenset):
            if isinstance(item, str) and item not in have:
                return None
            checks.append((j, have))
            continue
        if isinstance(item, Variable):
            bound = env.get(item.name)
            if bound is None:
                dom = domains.get(item.name)
                if dom is not None and have not in dom:
                    return None
                env = {**env, item.name: have}
            elif bound != have:
                return None
        elif item != have:
            return None
    return env, checks


def _instantiate(items: Sequence[Item], env: Mapping) -> tuple[str, ...] | None:
    out = []
    for item in items:
        if isinstance(item, Variable):
            if item.name not in env:
                return None
            out.append(env[item.name])
        else:
            out.append(item)
    return tuple(out)


def _surface_values(
    items: Sequence[Item], todo: _Todo, env: dict, domains, alphabet: frozenset[str]
) -> Iterator[tuple[tuple[str, ...], dict]]:
    """Enumerate surface centres: unbound variables range over their set."""

    def step(j: int, env: dict, acc: tuple[str, ...]):
        if j == len(items):
            yield acc, env
            return
        item = items[j]
        have = todo.items[j] if j < len(todo.items) else None
        if isinstance(item, Variable) and item.name not in env:
            for sym in domains.get(item.name, ()):
                if have is not None and (sym != have if isinstance(have, str) else sym not in have):
                    continue
                if sym in alphabet:
                    yield from step(j + 1, {**env, item.name: sym}, acc + (sym,))
            return
        sym = env[item.name] if isinstance(item, Variable) else item
        if have is not None and (sym != have if isinstance(have, str) else sym not in have):
            return
        if sym not in alphabet:
            return
        yield from step(j + 1, env, acc + (sym,))

    yield from step(0, env, ())


def _check_sets(env: Mapping[str, str], domains) -> bool:
    return all(env[v] in dom for v, dom in domains.items() if v in env)


# -- the search ----------------------------------------------------------------------


class Engine:
    """Runs partition searches over one grammar snapshot."""

    def __init__(self, grammar: GrammarSnapshot, direction: Direction, tracer: Tracer | None = None):
        self.g = grammar
        self.direction = direction
        self.rules = grammar.rulebase.ordered(direction)
        self.tracer = tracer
        self.surface_alphabet = grammar.surface_alphabet()
        self.lexicon = grammar.lexicon
        self.word = grammar.word

    def trace(self, tag: str, msg: str) -> None:
        if self.tracer is not None:
            self.tracer(tag, msg)

    def initial_state(self, surface: Sequence[str] | None, lexical: Sequence[Sequence[str]] | None) -> SearchState:
        n = self.g.ntapes
        if self.direction is Direction.ANALYSIS:
            surf_todo = _Todo(tuple(surface or ()), False)
            lex_todo = tuple(_Todo((), True) for _ in range(n))
        else:
            surf_todo = _Todo((), True)
            lex_todo = tuple(_Todo(tuple(t), False) for t in lexical or ())
        return SearchState(
            surf_done=(),
            surf_todo=surf_todo,
            lex_done=tuple(() for _ in range(n)),
            lex_todo=lex_todo,
            ptrs=self.lexicon.initial_pointers(),
            next_cats=None if self.word.unconstrained else self.word.follow(BOS),
            feature_stack=(),
            parse_stack=(),
            binds={},
        )

    def is_final(self, st: SearchState) -> bool:
        return (
            not st.surf_todo.items
            and all(not t.items for t in st.lex_todo)
            and self.lexicon.at_all_roots(st.ptrs)
            and (st.next_cats is None or EOS in st.next_cats)
        )

    def partition(self, st: SearchState) -> Iterator[Partition]:
        if self.is_final(st):
            self.trace("EMIT", f"partition {' '.join(s.rule_id for s in st.steps)}")
            yield Partition(
                st.steps,
                st.surf_done,
                st.lex_done,
                st.binds,
                st.parse_stack,
            )
        for rule in self.rules:
            for nxt in self.apply(rule, st):
                yield from self.partition(nxt)

    # one rule application, possibly several ways
    def apply(self, rule: CompiledRule, st: SearchState) -> Iterator[SearchState]:
        r = rule.rule
        domains = rule.domains
        analysis = self.direction is Direction.ANALYSIS
        consumes_known = bool(r.surf) if analysis else any(r.lex)
        if not consumes_known and st.empty_run >= self.g.max_empty_run:
            return
        env: dict | None = {}
        for t in range(self.g.ntapes):
            env = _match_left(rule.llc_rev[t], st.lex_done[t], env, domains)
            if env is None:
                self.trace("CTX", f"{r.id}: left lexical context on tape {t + 1}")
                return
        env = _match_left(rule.lsc_rev, st.surf_done, env, domains)
        if env is None:
            self.trace("CTX", f"{r.id}: left surface context")
            return
        pre = _prebind(r.surf, st.surf_todo, env, domains)
        if pre is None:
            self.trace("CTX", f"{r.id}: surface centre")
            return
        env, _ = pre
        lex_checks = []
        for t in range(self.g.ntapes):
            pre = _prebind(r.lex[t], st.lex_todo[t], env, domains)
            if pre is None:
                self.trace("CTX", f"{r.id}: lexical centre on tape {t + 1}")
                return
            env, checks = pre
            lex_checks.append(checks)
        self.trace("RULE", f"{r.id}: centre matches at surface {len(st.surf_done)}")

        for ptrs, crossed, env2 in self._walk(0, rule, st, env, (), ()):
            lex_vals = []
            for t in range(self.g.ntapes):
                vals = _instantiate(r.lex[t], env2)
                if vals is None or any(vals[j] not in d for j, d in lex_checks[t]):
                    vals = None
                    break
                lex_vals.append(vals)
            if vals is None:
                self.trace("SET", f"{r.id}: lexical symbol outside committed context")
                continue
            for surf_vals, env3 in _surface_values(r.surf, st.surf_todo, env2, domains, self.surface_alphabet):
                if not _check_sets(env3, domains):
                    self.trace("SET", f"{r.id}: variable outside its set")
                    continue
                nxt = self._advance(rule, st, env3, tuple(lex_vals), surf_vals, ptrs, crossed, consumes_known)
                if nxt is not None:
                    yield nxt

    def _walk(self, t: int, rule: CompiledRule, st: SearchState, env: dict, ptrs: tuple, crossed: tuple):
        if t == self.g.ntapes:
            yield ptrs, crossed, env
            return
        found = False
        for node, entries, env2 in self.lexicon.walk(t + 1, st.ptrs[t], rule.rule.lex[t], env, rule.domains):
            found = True
            yield from self._walk(t + 1, rule, st, env2, ptrs + (node,), crossed + (entries,))
        if not found:
            self.trace("TRIE", f"{rule.id}: no transition on tape {t + 1}")

    def _advance(
        self,
        rule: CompiledRule,
        st: SearchState,
        env: dict,
        lex_vals: tuple[tuple[str, ...], ...],
        surf_vals: tuple[str, ...],
        ptrs: tuple[TrieNode, ...],
        crossed: tuple[tuple[Entry, ...], ...],
        consumes_known: bool,
    ) -> SearchState | None:
        r = rule.rule
        domains = rule.domains
        surf_todo = _match_right(r.rsc, _Todo(surf_vals + st.surf_todo.items[len(surf_vals) :], st.surf_todo.open), len(surf_vals), env, domains)
        if surf_todo is None:
            self.trace("CTX", f"{r.id}: right surface context")
            return None
        lex_todo = []
        for t in range(self.g.ntapes):
            cur = st.lex_todo[t]
            merged = _Todo(lex_vals[t] + cur.items[len(lex_vals[t]) :], cur.open)
            todo = _match_right(r.rlc[t], merged, len(lex_vals[t]), env, domains)
            if todo is None:
                self.trace("CTX", f"{r.id}: right lexical context on tape {t + 1}")
                return None
            lex_todo.append(todo)

        depth = len(st.steps)
        binds = dict(st.binds)
        suffix = f"_r{depth}"
        for var, value in r.feature_binds:
            res = unify_value(Variable(var + suffix), _rename_value(value, suffix), binds)
            if res is None:
                return None
            binds = res
        stack = st.feature_stack + tuple(
            (t, rename(cat, suffix)) for t, cats in enumerate(r.features) for cat in cats
        )
        next_cats = st.next_cats
        parse_stack = st.parse_stack
        cats: Cats | None = None
        if any(crossed):
            cats_l: list[FeatureCategory | None] = []
            for t in range(self.g.ntapes):
                entries = crossed[t]
                at_root = self.lexicon.is_root(t + 1, ptrs[t])
                if len(entries) > 1 or not at_root or (not entries and lex_vals[t]):
                    self.trace("TRIE", f"{r.id}: boundary not synchronised on tape {t + 1}")
                    return None
                if entries:
                    lsuffix = f"_l{depth}"
                    cats_l.append(rename(entries[0].category, lsuffix))
                    for var, value in rename_bindings(dict(entries[0].binds), lsuffix).items():
                        res = unify_value(Variable(var), value, binds)
                        if res is None:
                            return None
                        binds = res
                else:
                    cats_l.append(None)
            cats = tuple(cats_l)
            kept = []
            for t, cat in stack:
                if cats[t] is None:
                    kept.append((t, cat))
                    continue
                res = unify(cat, cats[t], binds)
                if res is None:
                    self.trace("FEAT", f"{r.id}: {cat} does not unify with {cats[t]}")
                    return None
                binds = res[1]
            stack = tuple(kept)
            for t, cat in enumerate(cats):
                if cat is None:
                    continue
                if next_cats is not None:
                    if cat.symbol not in next_cats:
                        self.trace("FOLLOW", f"{r.id}: {cat.symbol} cannot follow here")
                        return None
                    next_cats = self.word.follow(cat.symbol)
                parse_stack = parse_stack + ((cat, "".join(crossed[t][0].form)),)

        lex_pos = tuple(len(d) for d in st.lex_done)
        step = PartitionStep(
            rule_id=r.id,
            lsc=(),
            surf=surf_vals,
            rsc=(),
            llc=(),
            lex=lex_vals,
            rlc=(),
            lex_cats=cats,
            surf_pos=len(st.surf_done),
            lex_pos=lex_pos,
        )
        return SearchState(
            surf_done=st.surf_done + surf_vals,
            surf_todo=surf_todo,
            lex_done=tuple(d + v for d, v in zip(st.lex_done, lex_vals)),
            lex_todo=tuple(lex_todo),
            ptrs=ptrs,
            next_cats=next_cats,
            feature_stack=stack,
            parse_stack=parse_stack,
            binds=binds,
            empty_run=0 if consumes_known else st.empty_run + 1,
            steps=st.steps + (step,),
        )


def _rename_value(value: Value, suffix: str) -> Value:
    return Variable(value.name + suffix) if isinstance(value, Variable) else value


# -- coercion --------------------------------------------------------------------------


def _with_contexts(p: Partition, rules: Mapping[str, CompiledRule]) -> tuple[PartitionStep, ...]:
    """Fill each step's context pieces from the finished strings."""
    out = []
    for s in p.steps:
        r = rules[s.rule_id].rule
        end = s.surf_pos + len(s.surf)
        llc = tuple(
            p.lexical[t][max(0, s.lex_pos[t] - len(r.llc[t])) : s.lex_pos[t]] for t in range(len(s.lex))
        )
        rlc = tuple(
            p.lexical[t][s.lex_pos[t] + len(s.lex[t]) : s.lex_pos[t] + len(s.lex[t]) + len(r.rlc[t])]
            for t in range(len(s.lex))
        )
        out.append(
            PartitionStep(
                s.rule_id,
                p.surface[max(0, s.surf_pos - len(r.lsc)) : s.surf_pos],
                s.surf,
                p.surface[end : end + len(r.rsc)],
                llc,
                s.lex,
                rlc,
                s.lex_cats,
                s.surf_pos,
                s.lex_pos,
            )
        )
    return tuple(out)


def _match_at(items: Sequence[Item], string: Sequence[str], start: int, env: dict, domains) -> dict | None:
    if start < 0 or start + len(items) > len(string):
        return None
    for j, item in enumerate(items):
        sym = string[start + j]
        if isinstance(item, Variable):
            bound = env.get(item.name)
            if bound is None:
                dom = domains.get(item.name)
                if dom is not None and sym not in dom:
                    return None
                env = {**env, item.name: sym}
            elif bound != sym:
                return None
        elif item != sym:
            return None
    return env


def invalid_partition(
    step: PartitionStep,
    surface: Sequence[str],
    lexical: Sequence[Sequence[str]],
    cats: Cats | None,
    obligatory: Sequence[CompiledRule],
    binds: Mapping[str, Value],
) -> str | None:
    """Id of an enabled obligatory rule that forbids *step*, or ``None``.

    A rule forbids the step when its lexical centre and all four contexts
    match the step in the finished strings, its features unify with the
    governing categories, and its surface centre cannot unify with the
    step's surface centre.
    """
    for rule in obligatory:
        r = rule.rule
        domains = rule.domains
        env: dict | None = {}
        for t in range(len(lexical)):
            if len(r.lex[t]) != len(step.lex[t]):
                env = None
                break
            pos = step.lex_pos[t]
            env = _match_at(r.lex[t], lexical[t], pos, env, domains)
            if env is None:
                break
            env = _match_at(r.llc[t], lexical[t], pos - len(r.llc[t]), env, domains)
            if env is None:
                break
            env = _match_at(r.rlc[t], lexical[t], pos + len(r.lex[t]), env, domains)
            if env is None:
                break
        if env is None:
            continue
        end = step.surf_pos + len(step.surf)
        env = _match_at(r.lsc, surface, step.surf_pos - len(r.lsc), env, domains)
        if env is None:
            continue
        env = _match_at(r.rsc, surface, end, env, domains)
        if env is None:
            continue
        if _match_at(r.surf, step.surf, 0, env, domains) is not None and len(r.surf) == len(step.surf):
            continue  # NotSurf unifies with Surf
        if not _features_unify(r, cats, binds):
            continue
        return r.id
    return None


_fresh = itertools.count()


def _features_unify(r, cats: Cats | None, binds: Mapping[str, Value]) -> bool:
    suffix = f"_c{next(_fresh)}"
    new: dict | None = dict(binds)
    for var, value in r.feature_binds:
        new = unify_value(Variable(var + suffix), _rename_value(value, suffix), new)
        if new is None:
            return False
    for t, tape_cats in enumerate(r.features):
        gov = cats[t] if cats is not None and t < len(cats) else None
        if gov is None:
            continue
        for cat in tape_cats:
            res = unify(rename(cat, suffix), gov, new)
            if res is None:
                return False
            new = res[1]
    return True


def coerce(
    steps: Sequence[PartitionStep],
    surface: Sequence[str],
    lexical: Sequence[Sequence[str]],
    obligatory: Sequence[CompiledRule],
    binds: Mapping[str, Value],
    tracer: Tracer | None = None,
) -> list[tuple[str, str, tuple[str, ...]]] | None:
    """Check every step, last first; ``None`` if one is forbidden."""
    current: Cats | None = None
    out = []
    for step in reversed(steps):
        if step.lex_cats is not None:
            current = step.lex_cats
        bad = invalid_partition(step, surface, lexical, current, obligatory, binds)
        if bad is not None:
            if tracer is not None:
                tracer("RULE", f"{step.rule_id} at surface {step.surf_pos} is coerced away by {bad}")
            return None
        out.append(step.triple())
    out.reverse()
    return out


# -- drivers ------------------------------------------------------------------------------


def _obligatory(grammar: GrammarSnapshot, direction: Direction) -> tuple[CompiledRule, ...]:
    return tuple(r for r in grammar.rulebase.ordered(direction) if r.obligatory)


def _results(engine: Engine, state: SearchState) -> Iterator[AnalysisResult]:
    g = engine.g
    obligatory = _obligatory(g, engine.direction)
    by_id = {r.id: r for r in g.rulebase.ordered(engine.direction, enabled_only=False)}
    for p in engine.partition(state):
        if coerce(p.steps, p.surface, p.lexical, obligatory, p.binds, engine.tracer) is None:
            continue
        steps = _with_contexts(p, by_id)
        surface = "".join(p.surface)
        lexical = tuple("".join(t) for t in p.lexical)
        if g.word.unconstrained:
            yield AnalysisResult(surface, lexical, steps, None, p.binds, p.parse_stack)
            continue
        parses = g.word.shift_reduce(p.parse_stack, p.binds)
        if not parses:
            engine.trace("FOLLOW", f"no parse for {' '.join(c.symbol for c, _ in p.parse_stack)}")
        for tree, binds in parses:
            yield AnalysisResult(surface, lexical, steps, tree, binds, p.parse_stack)


def analyze(
    grammar: GrammarSnapshot, surface: str | Sequence[str], tracer: Tracer | None = None
) -> Iterator[AnalysisResult]:
    symbols = split_symbols(surface, grammar.surface_alphabet())
    if symbols is None or BOUNDARY in symbols:
        if tracer is not None:
            tracer("SET", f"input {surface!r} is not spelled over the surface alphabet")
        return iter(())
    engine = Engine(grammar, Direction.ANALYSIS, tracer)
    return _results(engine, engine.initial_state(symbols, None))


def generate(
    grammar: GrammarSnapshot, lexical: Sequence[str | Sequence[str]], tracer: Tracer | None = None
) -> Iterator[AnalysisResult]:
    if len(lexical) != grammar.ntapes:
        raise UsageError(f"expected {grammar.ntapes} lexical strings, got {len(lexical)}")
    tapes = []
    for t, text in enumerate(lexical, start=1):
        symbols = split_symbols(text, grammar.lexical_alphabet(t))
        if symbols is None:
            if tracer is not None:
                tracer("SET", f"tape {t} input {text!r} is not spelled over its alphabet")
            return iter(())
        tapes.append(symbols)
    engine = Engine(grammar, Direction.GENERATION, tracer)
    return _results(engine, engine.initial_state(None, tapes))


def two_level_analysis(
    grammar: GrammarSnapshot,
    surf: str | Sequence[str] | None = None,
    lex: Sequence[str] | None = None,
    tracer: Tracer | None = None,
) -> Iterator[AnalysisResult]:
    """Analyse *surf* or generate from *lex*; exactly one must be given."""
    if (surf is None) == (lex is None):
        raise UsageError("give exactly one of a surface string or lexical strings")
    if surf is not None:
        return analyze(grammar, surf, tracer)
    return generate(grammar, lex, tracer)  # type: ignore[arg-type]


# -- cascades ------------------------------------------------------------------------------


@dataclass(frozen=True)
class CascadeResult:
    surface: str
    lexical: tuple[str, ...]
    intermediate: str
    front: AnalysisResult
    back: AnalysisResult


def _unique(results: Iterator[AnalysisResult], key, cap: int) -> list[AnalysisResult]:
    seen: dict = {}
    for r in results:
        k = key(r)
        if k not in seen:
            if len(seen) >= cap:
                raise CascadeOverflow(f"more than {cap} intermediate forms")
            seen[k] = r
    return list(seen.values())


def cascade(
    grammar: CascadeGrammar,
    surf: str | None = None,
    lex: Sequence[str] | None = None,
    tracer: Tracer | None = None,
) -> Iterator[CascadeResult]:
    """Run *surf* back-to-front or *lex* front-to-back through two grammars."""
    if (surf is None) == (lex is None):
        raise UsageError("give exactly one of a surface string or lexical strings")
    cap = grammar.fanout_cap
    if lex is not None:
        for mid in _unique(generate(grammar.front, lex, tracer), lambda r: r.surface, cap):
            for out in generate(grammar.back, [mid.surface], tracer):
                yield CascadeResult(out.surface, mid.lexical, mid.surface, mid, out)
        return
    for mid in _unique(analyze(grammar.back, surf, tracer), lambda r: r.lexical, cap):
        text = mid.lexical[0].replace(BOUNDARY, "")
        for out in analyze(grammar.front, text, tracer):
            yield CascadeResult(mid.surface, out.lexical, text, out, mid)


__all__ = [
    "AnalysisResult",
    "CascadeOverflow",
    "CascadeResult",
    "Engine",
    "PartitionStep",
    "SearchState",
    "UsageError",
    "analyze",
    "cascade",
    "coerce",
    "generate",
    "invalid_partition",
    "split_symbols",
    "two_level_analysis",
]
