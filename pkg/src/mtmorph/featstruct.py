"""Flat feature categories and their unification.

A category is a symbol plus a flat map of attributes to values.  A value is
an atom (a plain ``str``), a :class:`Variable`, a :class:`Disjunction` of
atoms or an opaque :class:`Conjunction` of atoms.  Variables are resolved
through a bindings dictionary that maps variable names to values; every
operation that could extend the bindings returns a fresh dictionary (or
``None`` on failure) and never mutates its argument, so a search branch can
hold on to its own bindings safely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "Variable",
    "Disjunction",
    "Conjunction",
    "Value",
    "Bindings",
    "FeatureCategory",
    "deref",
    "resolve",
    "unify_value",
    "unify_category",
    "unify",
    "category_from_pairs",
    "rename",
    "category_variables",
    "format_value",
    "format_category",
    "is_variable_name",
]


def is_variable_name(name: str) -> bool:
    return bool(name) and name[0].isupper()


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self) -> None:
        if not is_variable_name(self.name):
            raise ValueError(f"variable name must start with an uppercase letter: {self.name!r}")

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, eq=False)
class Disjunction:
    """A set of alternative atoms, kept in source order for printing."""

    options: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.options)) < 2 or len(set(self.options)) != len(self.options):
            raise ValueError(f"disjunction needs at least two distinct atoms: {self.options!r}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Disjunction):
            return NotImplemented
        return frozenset(self.options) == frozenset(other.options)

    def __hash__(self) -> int:
        return hash(frozenset(self.options))

    def __contains__(self, atom: object) -> bool:
        return atom in self.options

    def __repr__(self) -> str:
        return "|".join(self.options)


@dataclass(frozen=True)
class Conjunction:
    parts: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.parts) < 2:
            raise ValueError(f"conjunction needs at least two atoms: {self.parts!r}")

    def __repr__(self) -> str:
        return "&".join(self.parts)


Value = Union[str, Variable, Disjunction, Conjunction]
Bindings = Mapping[str, Value]


@dataclass(frozen=True)
class FeatureCategory:
    symbol: str
    features: tuple[tuple[str, Value], ...] = ()

    def __post_init__(self) -> None:
        names = [a for a, _ in self.features]
        if len(names) != len(set(names)):
            raise ValueError(f"repeated attribute in {self.symbol}: {names}")

    @classmethod
    def of(cls, symbol: str, **features: Value) -> FeatureCategory:
        return cls(symbol, tuple(features.items()))

    def get(self, attr: str, default: Value | None = None) -> Value | None:
        for a, v in self.features:
            if a == attr:
                return v
        return default

    def attrs(self) -> dict[str, Value]:
        return dict(self.features)

    def __str__(self) -> str:
        return format_category(self)


def deref(value: Value, binds: Bindings) -> tuple[Value, Variable | None]:
    """Follow variable links; return the final value and the last variable
    whose binding holds it (``None`` if *value* was not a bound variable)."""
    last = None
    seen = 0
    while isinstance(value, Variable) and value.name in binds:
        last = value
        value = binds[value.name]
        seen += 1
        if seen > len(binds):
            raise ValueError(f"cyclic bindings through {last.name}")
    return value, last


def resolve(value: Value, binds: Bindings) -> Value:
    return deref(value, binds)[0]


def _meet(a: Value, b: Value) -> Value | None:
    if isinstance(a, str) and isinstance(b, str):
        return a if a == b else None
    if isinstance(a, str) and isinstance(b, Disjunction):
        return a if a in b else None
    if isinstance(a, Disjunction) and isinstance(b, str):
        return b if b in a else None
    if isinstance(a, Disjunction) and isinstance(b, Disjunction):
        common = tuple(x for x in a.options if x in b)
        if not common:
            return None
        return common[0] if len(common) == 1 else Disjunction(common)
    if isinstance(a, Conjunction) and isinstance(b, Conjunction):
        return a if a == b else None
    return None


def unify_value(a: Value, b: Value, binds: Bindings) -> dict[str, Value] | None:
    """Unify two values; return extended bindings or ``None``.

    Disjunctions narrow by intersection.  When a disjunction was reached
    through a variable, the variable is rebound to the narrowed value so that
    later unifications see the tighter constraint.
    """
    a_val, a_var = deref(a, binds)
    b_val, b_var = deref(b, binds)
    if isinstance(a_val, Variable) or isinstance(b_val, Variable):
        if a_val == b_val:
            return dict(binds)
        # link to the other side's variable rather than copy its value, so a
        # later narrowing of that variable is seen through this one too;
        # no cycle is possible once both sides are dereferenced
        if isinstance(a_val, Variable):
            return {**binds, a_val.name: b_var if b_var is not None and not isinstance(b_val, Variable) else b_val}
        return {**binds, b_val.name: a_var if a_var is not None else a_val}
    met = _meet(a_val, b_val)
    if met is None:
        return None
    new = dict(binds)
    if a_var is not None and a_val != met:
        new[a_var.name] = met
    if b_var is not None:
        if a_var is not None:
            if a_var != b_var:
                new[a_var.name] = met
                new[b_var.name] = a_var
        elif b_val != met:
            new[b_var.name] = met
    return new


def unify(
    a: FeatureCategory, b: FeatureCategory, binds: Bindings
) -> tuple[FeatureCategory, dict[str, Value]] | None:
    """Unify two categories and return the merged category with bindings.

    Attributes present on one side only are carried into the result.
    """
    if a.symbol != b.symbol:
        return None
    new: dict[str, Value] = dict(binds)
    other = b.attrs()
    merged: list[tuple[str, Value]] = []
    for attr, value in a.features:
        if attr in other:
            res = unify_value(value, other.pop(attr), new)
            if res is None:
                return None
            new = res
        merged.append((attr, value))
    merged.extend((attr, value) for attr, value in b.features if attr in other)
    return FeatureCategory(a.symbol, tuple(merged)), new


def unify_category(
    a: FeatureCategory, b: FeatureCategory, binds: Bindings
) -> dict[str, Value] | None:
    res = unify(a, b, binds)
    return None if res is None else res[1]


def category_from_pairs(
    symbol: str, pairs: Iterable[tuple[str, Value]]
) -> tuple[FeatureCategory, dict[str, Value]]:
    """Build a category from possibly repeated attribute pairs.

    ``measure=M, measure=a|b`` keeps ``measure=M`` and records the extra
    constraint as a binding of ``M``.  Raises ``ValueError`` if the repeated
    values cannot be unified.
    """
    feats: dict[str, Value] = {}
    binds: dict[str, Value] = {}
    for attr, value in pairs:
        if attr not in feats:
            feats[attr] = value
            continue
        current = feats[attr]
        res = unify_value(current, value, binds)
        if res is None:
            raise ValueError(f"{symbol}: conflicting values for {attr}: {current!r} / {value!r}")
        binds = res
        if not isinstance(current, Variable):
            # keep a variable in the slot when there is one to carry the link
            if isinstance(value, Variable):
                feats[attr] = value
            else:
                feats[attr] = resolve(_meet(current, value), binds)  # type: ignore[arg-type]
    return FeatureCategory(symbol, tuple(feats.items())), binds


def _rename_value(value: Value, suffix: str) -> Value:
    if isinstance(value, Variable):
        return Variable(value.name + suffix)
    return value


def rename(cat: FeatureCategory, suffix: str) -> FeatureCategory:
    if not any(isinstance(v, Variable) for _, v in cat.features):
        return cat
    return FeatureCategory(cat.symbol, tuple((a, _rename_value(v, suffix)) for a, v in cat.features))


def rename_bindings(binds: Bindings, suffix: str) -> dict[str, Value]:
    return {k + suffix: _rename_value(v, suffix) for k, v in binds.items()}


def category_variables(cat: FeatureCategory) -> Iterator[Variable]:
    for _, v in cat.features:
        if isinstance(v, Variable):
            yield v


def resolve_category(cat: FeatureCategory, binds: Bindings) -> FeatureCategory:
    return FeatureCategory(cat.symbol, tuple((a, resolve(v, binds)) for a, v in cat.features))


_PLAIN_ATOM_CHARS = set("_`-")


def _format_atom(atom: str) -> str:
    plain = (
        atom
        and not is_variable_name(atom)
        and all(ch.isalnum() or ch in _PLAIN_ATOM_CHARS or "̀" <= ch <= "ͯ" for ch in atom)
        and not (atom[0] == "-" and not atom[1:].isdigit())
    )
    if plain:
        return atom
    return "'" + atom.replace("\\", "\\\\").replace("'", "\\'") + "'"


def format_value(value: Value) -> str:
    if isinstance(value, Variable):
        return value.name
    if isinstance(value, Disjunction):
        return "|".join(_format_atom(a) for a in value.options)
    if isinstance(value, Conjunction):
        return "&".join(_format_atom(a) for a in value.parts)
    return _format_atom(value)


def format_category(cat: FeatureCategory) -> str:
    inner = ",".join(f"{a}={format_value(v)}" for a, v in cat.features)
    return f"{_format_atom(cat.symbol)}:[{inner}]"
