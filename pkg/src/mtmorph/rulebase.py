"""Two-level rules: model, validation, precedence, ordering and expansion."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence, Union

from .featstruct import FeatureCategory, Value, Variable

BOUNDARY = "♭"

Item = Union[str, Variable]
SurfaceExpr = tuple[Item, ...]
LexicalExpr = tuple[tuple[Item, ...], ...]
FeatureSpec = tuple[tuple[FeatureCategory, ...], ...]


class RuleError(ValueError):
    pass


class Op(enum.Enum):
    OPTIONAL = "=>"
    OBLIGATORY = "<=>"


class Direction(enum.Enum):
    ANALYSIS = "analysis"
    GENERATION = "generation"


@dataclass(frozen=True)
class VariableSet:
    id: str
    members: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise RuleError(f"variable set {self.id} is empty")

    def __contains__(self, symbol: object) -> bool:
        return symbol in self.members


@dataclass(frozen=True)
class Alphabet:
    tape: int
    symbols: tuple[str, ...]


@dataclass(frozen=True)
class TwoLevelRule:
    id: str
    llc: LexicalExpr
    lex: LexicalExpr
    rlc: LexicalExpr
    op: Op
    lsc: SurfaceExpr
    surf: SurfaceExpr
    rsc: SurfaceExpr
    variables: tuple[tuple[str, str], ...] = ()
    features: FeatureSpec = ()
    # extra constraints from repeated attributes inside ``features``
    feature_binds: tuple[tuple[str, Value], ...] = ()
    enabled: bool = True
    origin: str | None = None

    @property
    def obligatory(self) -> bool:
        return self.op is Op.OBLIGATORY

    @property
    def ntapes(self) -> int:
        return len(self.lex)

    def var_sets(self) -> dict[str, str]:
        return {var: set_id for set_id, var in self.variables}

    def expression_variables(self) -> set[str]:
        names = set()
        for expr in (self.llc, self.lex, self.rlc):
            for tape in expr:
                names.update(i.name for i in tape if isinstance(i, Variable))
        for expr in (self.lsc, self.surf, self.rsc):
            names.update(i.name for i in expr if isinstance(i, Variable))
        return names


def lexical_empty(expr: LexicalExpr) -> bool:
    return all(len(tape) == 0 for tape in expr)


def precedence(rule: TwoLevelRule, direction: Direction) -> int:
    """Six bits, one per expression, set when the expression is non-empty.

    Within each trio the order is left context, centre, right context from
    the most significant bit down; the surface trio is the high half in
    analysis and the lexical trio in generation.
    """
    surf_bits = [bool(rule.lsc), bool(rule.surf), bool(rule.rsc)]
    lex_bits = [not lexical_empty(e) for e in (rule.llc, rule.lex, rule.rlc)]
    bits = surf_bits + lex_bits if direction is Direction.ANALYSIS else lex_bits + surf_bits
    value = 0
    for bit in bits:
        value = (value << 1) | int(bit)
    return value


@dataclass(frozen=True)
class CompiledRule:
    """A rule prepared for one search direction.

    Left contexts are stored reversed so they can be matched as prefixes of
    the reversed consumed history.
    """

    rule: TwoLevelRule
    direction: Direction
    precedence: int
    llc_rev: LexicalExpr
    lsc_rev: SurfaceExpr
    domains: Mapping[str, tuple[str, ...]] = field(default_factory=dict, compare=False)

    @property
    def id(self) -> str:
        return self.rule.id

    @property
    def lex(self) -> LexicalExpr:
        return self.rule.lex

    @property
    def rlc(self) -> LexicalExpr:
        return self.rule.rlc

    @property
    def surf(self) -> SurfaceExpr:
        return self.rule.surf

    @property
    def rsc(self) -> SurfaceExpr:
        return self.rule.rsc

    @property
    def features(self) -> FeatureSpec:
        return self.rule.features

    @property
    def obligatory(self) -> bool:
        return self.rule.obligatory


def compile_rule(
    src: TwoLevelRule | CompiledRule,
    direction: Direction,
    sets: Mapping[str, VariableSet] | None = None,
) -> CompiledRule:
    if isinstance(src, CompiledRule):
        if src.direction is direction:
            return src
        return replace(src, direction=direction, precedence=precedence(src.rule, direction))
    if lexical_empty(src.lex) and not src.surf:
        raise RuleError(f"rule {src.id}: centre is empty on every tape")
    domains: dict[str, tuple[str, ...]] = {}
    if sets is not None:
        for set_id, var in src.variables:
            if set_id in sets:
                domains[var] = sets[set_id].members
    return CompiledRule(
        rule=src,
        direction=direction,
        precedence=precedence(src, direction),
        llc_rev=tuple(tuple(reversed(t)) for t in src.llc),
        lsc_rev=tuple(reversed(src.lsc)),
        domains=domains,
    )


def order_rules(rules: Iterable[CompiledRule]) -> list[CompiledRule]:
    # sorted() is stable: equal precedence keeps source order
    return sorted(rules, key=lambda r: -r.precedence)


def validate_rule(
    rule: TwoLevelRule,
    ntapes: int,
    alphabets: Mapping[int, Alphabet],
    sets: Mapping[str, VariableSet],
) -> list[str]:
    """Return diagnostics for *rule*; an empty list means it is well formed."""
    problems: list[str] = []
    where = f"rule {rule.id}"
    for name in ("llc", "lex", "rlc"):
        expr = getattr(rule, name)
        if len(expr) != ntapes:
            problems.append(f"{where}: {name} has {len(expr)} tapes, expected {ntapes}")
    if len(rule.features) != ntapes:
        problems.append(f"{where}: features has {len(rule.features)} entries, expected {ntapes}")
    if problems:
        return problems
    if lexical_empty(rule.lex) and not rule.surf:
        problems.append(f"{where}: lex and surf are both empty")
    declared: dict[str, str] = {}
    for set_id, var in rule.variables:
        if var in declared:
            problems.append(f"{where}: variable {var} declared twice")
        declared[var] = set_id
        if set_id not in sets:
            problems.append(f"{where}: unknown variable set {set_id}")
    for var in sorted(rule.expression_variables()):
        if var not in declared:
            problems.append(f"{where}: variable {var} has no set constraint")
    for name in ("llc", "lex", "rlc"):
        for tape_no, tape in enumerate(getattr(rule, name), start=1):
            alpha = alphabets.get(tape_no)
            for item in tape:
                if isinstance(item, Variable) or item == BOUNDARY:
                    continue
                if alpha is not None and item not in alpha.symbols:
                    problems.append(f"{where}: {name} symbol {item!r} not in alphabet of tape {tape_no}")
        for tape in getattr(rule, name) if name == "lex" else ():
            if sum(1 for i in tape if i == BOUNDARY) > 1:
                problems.append(f"{where}: more than one boundary on one tape of lex")
    surface_alpha = alphabets.get(0)
    for name in ("lsc", "surf", "rsc"):
        for item in getattr(rule, name):
            if isinstance(item, Variable):
                continue
            if item == BOUNDARY:
                problems.append(f"{where}: boundary symbol on the surface ({name})")
            elif surface_alpha is not None and item not in surface_alpha.symbols:
                problems.append(f"{where}: {name} symbol {item!r} not in surface alphabet")
    return problems


@dataclass(frozen=True)
class RuleBase:
    """Rules in source order plus their per-direction compiled orderings."""

    rules: tuple[TwoLevelRule, ...]
    sets: Mapping[str, VariableSet]
    analysis: tuple[CompiledRule, ...] = ()
    generation: tuple[CompiledRule, ...] = ()

    @classmethod
    def build(cls, rules: Sequence[TwoLevelRule], sets: Mapping[str, VariableSet]) -> RuleBase:
        ana = order_rules(compile_rule(r, Direction.ANALYSIS, sets) for r in rules)
        gen = order_rules(compile_rule(r, Direction.GENERATION, sets) for r in rules)
        return cls(tuple(rules), dict(sets), tuple(ana), tuple(gen))

    def ordered(self, direction: Direction, enabled_only: bool = True) -> tuple[CompiledRule, ...]:
        rules = self.analysis if direction is Direction.ANALYSIS else self.generation
        if enabled_only:
            return tuple(r for r in rules if r.rule.enabled)
        return rules

    def get(self, rule_id: str) -> TwoLevelRule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    def toggle(self, rule_id: str, enabled: bool) -> RuleBase:
        self.get(rule_id)  # raises KeyError for unknown ids
        rules = [replace(r, enabled=enabled) if r.id == rule_id else r for r in self.rules]
        return RuleBase.build(rules, self.sets)

    @property
    def disabled(self) -> list[str]:
        return [r.id for r in self.rules if not r.enabled]


# -- expansion ---------------------------------------------------------------


@dataclass(frozen=True)
class ExpansionRule:
    symbol: Item
    expansion: LexicalExpr
    variables: tuple[tuple[str, str], ...] = ()

    def head_set(self) -> str | None:
        if isinstance(self.symbol, Variable):
            for set_id, var in self.variables:
                if var == self.symbol.name:
                    return set_id
        return None

    @property
    def linear(self) -> bool:
        """True when all material sits on one tape (affix-style)."""
        return sum(1 for tape in self.expansion if tape) <= 1


def _substitute(expr: LexicalExpr, mapping: Mapping[str, Item]) -> LexicalExpr:
    return tuple(
        tuple(mapping.get(i.name, i) if isinstance(i, Variable) else i for i in tape) for tape in expr
    )


def _concat(parts: Sequence[LexicalExpr], ntapes: int) -> LexicalExpr:
    tapes: list[list[Item]] = [[] for _ in range(ntapes)]
    for part in parts:
        for i, tape in enumerate(part):
            tapes[i].extend(tape)
    return tuple(tuple(t) for t in tapes)


def _literal(item: Item, ntapes: int) -> LexicalExpr:
    return tuple((item,) if i == 0 else () for i in range(ntapes))


def expand_rule(
    schema: TwoLevelRule,
    expansions: Sequence[ExpansionRule],
    ntapes: int,
) -> list[TwoLevelRule]:
    """Expand a schema written with single-tape lexical expressions.

    Each lexical expression of *schema* must hold exactly one tape.  An item
    is schematic when it equals an expansion head, or when it is a variable
    constrained by the same set as a variable expansion head.  Within one
    expression every schematic item is expanded with the same kind of
    expansion (all single-tape or all multi-tape): mixing them would need a
    boundary between the pieces and expansion never inserts one.  Expressions
    vary independently, giving the cartesian product of their alternatives.
    """
    var_sets = schema.var_sets()

    def options(item: Item) -> list[tuple[ExpansionRule, LexicalExpr, list[tuple[str, str]]]]:
        found = []
        for exp in expansions:
            if exp.symbol == item:
                match = True
            elif isinstance(item, Variable) and exp.head_set() is not None:
                match = var_sets.get(item.name) == exp.head_set()
            else:
                match = False
            if not match:
                continue
            mapping: dict[str, Item] = {}
            if isinstance(exp.symbol, Variable) and isinstance(item, Variable):
                mapping[exp.symbol.name] = item
            extra = [
                (s, mapping[v].name if v in mapping and isinstance(mapping[v], Variable) else v)
                for s, v in exp.variables
            ]
            found.append((exp, _substitute(exp.expansion, mapping), extra))
        return found

    def alternatives(expr: LexicalExpr) -> list[tuple[LexicalExpr, list[tuple[str, str]]]]:
        if len(expr) == ntapes and ntapes != 1:
            return [(expr, [])]
        if len(expr) == 0:
            return [(tuple(() for _ in range(ntapes)), [])]
        if len(expr) != 1:
            raise RuleError(f"schema {schema.id}: lexical expressions must be single-tape")
        items = expr[0]
        per_item = [options(i) for i in items]
        if not any(per_item):
            return [(_concat([_literal(i, ntapes) for i in items], ntapes), [])]
        results = []
        for linear in (True, False):
            choices = []
            for item, opts in zip(items, per_item):
                if opts:
                    kept = [o for o in opts if o[0].linear == linear]
                    if not kept:
                        break
                    choices.append(kept)
                else:
                    choices.append([(None, _literal(item, ntapes), [])])
            else:
                for combo in itertools.product(*choices):
                    expr_out = _concat([c[1] for c in combo], ntapes)
                    extra = [v for c in combo for v in c[2]]
                    results.append((expr_out, extra))
        return results

    schematic = [
        any(options(i) for i in (expr[0] if len(expr) == 1 else ()))
        for expr in (schema.llc, schema.lex, schema.rlc)
    ]
    if not any(schematic):
        if all(len(e) == ntapes for e in (schema.llc, schema.lex, schema.rlc)):
            return [schema]
    llc_alts = alternatives(schema.llc)
    lex_alts = alternatives(schema.lex)
    rlc_alts = alternatives(schema.rlc)
    out = []
    for n, (llc, lex, rlc) in enumerate(itertools.product(llc_alts, lex_alts, rlc_alts), start=1):
        variables = list(schema.variables)
        seen = {v for _, v in variables}
        for set_id, var in llc[1] + lex[1] + rlc[1]:
            if var not in seen:
                variables.append((set_id, var))
                seen.add(var)
        out.append(
            replace(
                schema,
                id=f"{schema.id}_{n}",
                llc=llc[0],
                lex=lex[0],
                rlc=rlc[0],
                variables=tuple(variables),
                origin=schema.id,
            )
        )
    return out


def schematic_items(schema: TwoLevelRule, expansions: Sequence[ExpansionRule]) -> list[Item]:
    """Items of *schema*'s lexical expressions that some expansion covers."""
    var_sets = schema.var_sets()
    found = []
    for expr in (schema.llc, schema.lex, schema.rlc):
        for tape in expr:
            for item in tape:
                for exp in expansions:
                    if exp.symbol == item or (
                        isinstance(item, Variable)
                        and exp.head_set() is not None
                        and var_sets.get(item.name) == exp.head_set()
                    ):
                        found.append(item)
                        break
    return found
