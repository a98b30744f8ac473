"""Reading, validating and printing ``.mtg`` grammar files.

A grammar file is a sequence of Prolog-style clauses terminated by ``.``::

    tl_alphabet(0, [k,t,b,a,e]).            % surface alphabet
    tl_set(radical, [k,t,b]).
    tl_rule(R2, [[],[],[]], [[P],[C],[]], [[],[],[]], =>,
            [], [C], [], [c1c3(P), radical(C)], [[],[],[]]).
    synword(ktb, root:[measure=M]).
    tape_of(root, 2).

Parsing produces a :class:`GrammarSource` of generic terms; :func:`load`
interprets it into an immutable :class:`GrammarSnapshot`.
"""

from __future__ import annotations

import os
import unicodedata
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Mapping, Sequence, Union

from .featstruct import (
    Conjunction,
    Disjunction,
    FeatureCategory,
    Value,
    Variable,
    category_from_pairs,
    format_category,
    format_value,
    unify_value,
)
from .lexicon import FreeLexicon, Lexicon, LexiconError
from .rulebase import (
    BOUNDARY,
    Alphabet,
    ExpansionRule,
    Item,
    Op,
    RuleBase,
    RuleError,
    TwoLevelRule,
    VariableSet,
    expand_rule,
    validate_rule,
)
from .wordgrammar import SynRule, WordGrammar, WordGrammarError

ASCII_BOUNDARY = "#"
ATTRIBUTE_ALIASES = {"X̄": "bar", "xbar": "bar"}
DEFAULT_MAX_EMPTY_RUN = 8


class GrammarError(Exception):
    """Raised when a grammar cannot be parsed or loaded."""

    def __init__(self, diagnostics: Sequence[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(self.diagnostics))


# -- terms ---------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Infix:
    """``a:b``, ``a=b``, ``a|b|c`` or ``a&b&c``."""

    op: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class PList:
    items: tuple[Term, ...]


Term = Union[Atom, Var, Compound, Infix, PList]


@dataclass(frozen=True)
class Clause:
    term: Term
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)
    file: str = field(default="<string>", compare=False)

    @property
    def where(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class GrammarSource:
    clauses: tuple[Clause, ...]
    path: str | None = None


# -- tokenizer -------------------------------------------------------------------

_PUNCT = ("<=>", "=>", "(", ")", "[", "]", ",", ".", "=", "|", "&", ":")


def _name_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_`" or unicodedata.category(ch).startswith("M")


@dataclass(frozen=True)
class Token:
    kind: str  # name, var, quoted, punct, end
    text: str
    line: int
    column: int


def tokenize(text: str, file: str = "<string>") -> Iterator[Token]:
    i, line, col = 0, 1, 1
    n = len(text)

    def error(msg: str) -> GrammarError:
        return GrammarError([f"{file}:{line}:{col}: {msg}"])

    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch in (ASCII_BOUNDARY, BOUNDARY):
            yield Token("name", BOUNDARY, line, start_col)
            i, col = i + 1, col + 1
            continue
        if ch == "'":
            j = i + 1
            buf = []
            while True:
                if j >= n or text[j] == "\n":
                    raise error("unterminated quoted atom")
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                    continue
                if text[j] == "'":
                    break
                buf.append(text[j])
                j += 1
            yield Token("quoted", "".join(buf), line, start_col)
            col += j + 1 - i
            i = j + 1
            continue
        if ch == "-" and i + 1 < n and text[i + 1].isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            yield Token("name", text[i:j], line, start_col)
            col += j - i
            i = j
            continue
        if _name_char(ch):
            j = i
            while j < n and _name_char(text[j]):
                j += 1
            word = text[i:j]
            kind = "var" if word[0].isupper() else "name"
            yield Token(kind, word, line, start_col)
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                yield Token("punct", p, line, start_col)
                i += len(p)
                col += len(p)
                break
        else:
            raise error(f"unexpected character {ch!r}")
    yield Token("end", "", line, col)


# -- parser ----------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, file: str):
        self.tokens = list(tokenize(text, file))
        self.pos = 0
        self.file = file

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, msg: str, tok: Token | None = None) -> GrammarError:
        tok = tok or self.tok
        return GrammarError([f"{self.file}:{tok.line}:{tok.column}: {msg}"])

    def next(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def expect(self, text: str) -> None:
        if self.tok.kind != "punct" or self.tok.text != text:
            shown = self.tok.text or "end of file"
            raise self.error(f"expected {text!r}, found {shown!r}")
        self.pos += 1

    def at(self, text: str) -> bool:
        return self.tok.kind == "punct" and self.tok.text == text

    def clauses(self) -> list[Clause]:
        out = []
        while self.tok.kind != "end":
            tok = self.tok
            term = self.term()
            self.expect(".")
            out.append(Clause(term, tok.line, tok.column, self.file))
        return out

    # precedence, loosest first: "=", then "|" / "&", then ":"
    def term(self) -> Term:
        left = self.alternation()
        if self.at("="):
            self.next()
            return Infix("=", (left, self.alternation()))
        return left

    def alternation(self) -> Term:
        first = self.typed()
        for op in ("|", "&"):
            if self.at(op):
                parts = [first]
                while self.at(op):
                    self.next()
                    parts.append(self.typed())
                return Infix(op, tuple(parts))
        return first

    def typed(self) -> Term:
        left = self.primary()
        if self.at(":"):
            self.next()
            return Infix(":", (left, self.primary()))
        return left

    def primary(self) -> Term:
        tok = self.tok
        if tok.kind == "punct" and tok.text in ("=>", "<=>"):
            self.next()
            return Atom(tok.text)
        if self.at("["):
            self.next()
            items = []
            if not self.at("]"):
                items.append(self.term())
                while self.at(","):
                    self.next()
                    items.append(self.term())
            self.expect("]")
            return PList(tuple(items))
        if tok.kind == "var":
            self.next()
            return Var(tok.text)
        if tok.kind in ("name", "quoted"):
            self.next()
            if tok.kind == "name" and self.at("("):
                self.next()
                args = [self.term()]
                while self.at(","):
                    self.next()
                    args.append(self.term())
                self.expect(")")
                return Compound(tok.text, tuple(args))
            return Atom(tok.text)
        shown = tok.text or "end of file"
        raise self.error(f"unexpected {shown!r}")


def parse_grammar(text: str, path: str | None = None) -> GrammarSource:
    """Parse grammar text into clauses; raises :class:`GrammarError`."""
    return GrammarSource(tuple(_Parser(text, path or "<string>").clauses()), path)


# -- printing terms ----------------------------------------------------------------


def _format_name(name: str) -> str:
    if name == BOUNDARY:
        return ASCII_BOUNDARY
    if name in ("=>", "<=>"):
        return name
    plain = name and not name[0].isupper() and all(_name_char(c) for c in name)
    numeric = name.startswith("-") and name[1:].isdigit()
    if plain or numeric:
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def format_term(term: Term) -> str:
    if isinstance(term, Atom):
        return _format_name(term.name)
    if isinstance(term, Var):
        return term.name
    if isinstance(term, PList):
        return "[" + ",".join(format_term(t) for t in term.items) + "]"
    if isinstance(term, Compound):
        return f"{_format_name(term.functor)}(" + ", ".join(format_term(a) for a in term.args) + ")"
    if isinstance(term, Infix):
        return term.op.join(format_term(a) for a in term.args)
    raise TypeError(term)


def format_source(source: GrammarSource) -> str:
    return "".join(format_term(c.term) + ".\n" for c in source.clauses)


# -- interpretation helpers -----------------------------------------------------------


class _Diagnostics:
    def __init__(self) -> None:
        self.items: list[str] = []

    def add(self, where: str, msg: str) -> None:
        self.items.append(f"{where}: {msg}")


class _Bad(Exception):
    pass


def _name_of(term: Term) -> str:
    if isinstance(term, (Atom, Var)):
        return term.name
    raise _Bad(f"expected a name, found {format_term(term)}")


def _int_of(term: Term) -> int:
    try:
        return int(_name_of(term))
    except ValueError:
        raise _Bad(f"expected an integer, found {format_term(term)}") from None


def _list_of(term: Term) -> tuple[Term, ...]:
    if not isinstance(term, PList):
        raise _Bad(f"expected a list, found {format_term(term)}")
    return term.items


def _item(term: Term) -> Item:
    if isinstance(term, Var):
        return Variable(term.name)
    if isinstance(term, Atom):
        return term.name
    raise _Bad(f"expected a symbol or variable, found {format_term(term)}")


def _surface(term: Term) -> tuple[Item, ...]:
    return tuple(_item(t) for t in _list_of(term))


def _lexical(term: Term) -> tuple[tuple[Item, ...], ...]:
    """Nested ``[[..],[..]]`` per tape; a flat list is a one-tape expression
    (used by expansion schemas); ``[]`` is left empty and normalised later."""
    items = _list_of(term)
    if items and all(isinstance(t, PList) for t in items):
        return tuple(tuple(_item(i) for i in t.items) for t in items)
    return (tuple(_item(t) for t in items),) if items else ()


def _value(term: Term) -> Value:
    if isinstance(term, Var):
        return Variable(term.name)
    if isinstance(term, Atom):
        return term.name
    if isinstance(term, Infix) and term.op == "|":
        return Disjunction(tuple(_name_of(a) for a in term.args))
    if isinstance(term, Infix) and term.op == "&":
        return Conjunction(tuple(_name_of(a) for a in term.args))
    raise _Bad(f"bad feature value {format_term(term)}")


def _attr(name: str) -> str:
    return ATTRIBUTE_ALIASES.get(unicodedata.normalize("NFC", name), name)


def _category(term: Term) -> tuple[FeatureCategory, dict[str, Value]]:
    if isinstance(term, Atom):
        return FeatureCategory(term.name), {}
    if not (isinstance(term, Infix) and term.op == ":"):
        raise _Bad(f"expected a category sym:[...], found {format_term(term)}")
    symbol = _name_of(term.args[0])
    pairs = []
    for feat in _list_of(term.args[1]):
        if not (isinstance(feat, Infix) and feat.op == "="):
            raise _Bad(f"expected attr=value, found {format_term(feat)}")
        pairs.append((_attr(_name_of(feat.args[0])), _value(feat.args[1])))
    try:
        return category_from_pairs(symbol, pairs)
    except ValueError as exc:
        raise _Bad(str(exc)) from None


def _merge_binds(into: dict[str, Value], extra: Mapping[str, Value]) -> dict[str, Value]:
    for var, value in extra.items():
        res = unify_value(Variable(var), value, into)
        if res is None:
            raise _Bad(f"conflicting constraints on {var}")
        into = res
    return into


def _variables(term: Term) -> tuple[tuple[str, str], ...]:
    out = []
    for t in _list_of(term):
        if not (isinstance(t, Compound) and len(t.args) == 1):
            raise _Bad(f"expected set(Var), found {format_term(t)}")
        out.append((t.functor, _name_of(t.args[0])))
    return tuple(out)


def _features(term: Term) -> tuple[tuple[tuple[FeatureCategory, ...], ...], dict[str, Value]]:
    tapes = []
    binds: dict[str, Value] = {}
    for t in _list_of(term):
        cats = []
        for c in _list_of(t) if isinstance(t, PList) else (t,):
            cat, extra = _category(c)
            binds = _merge_binds(binds, extra)
            cats.append(cat)
        tapes.append(tuple(cats))
    return tuple(tapes), binds


def _tokenize_morpheme(text: str, alphabet: Sequence[str]) -> list[str] | None:
    """Greedy longest-match split of *text* over *alphabet*."""
    symbols = sorted(set(alphabet), key=len, reverse=True)
    out, i = [], 0
    while i < len(text):
        for sym in symbols:
            if sym and text.startswith(sym, i):
                out.append(sym)
                i += len(sym)
                break
        else:
            return None
    return out


# -- snapshot -----------------------------------------------------------------------


@dataclass(frozen=True)
class LexEntrySource:
    form: tuple[str, ...]
    category: FeatureCategory
    binds: tuple[tuple[str, Value], ...]
    tape: int


@dataclass(frozen=True)
class GrammarSnapshot:
    path: str | None
    ntapes: int
    alphabets: Mapping[int, Alphabet]
    sets: Mapping[str, VariableSet]
    rulebase: RuleBase
    expansions: tuple[ExpansionRule, ...]
    lexicon: Lexicon
    entries: tuple[LexEntrySource, ...]
    word: WordGrammar
    tape_of: Mapping[str, int]
    max_empty_run: int = DEFAULT_MAX_EMPTY_RUN
    source: GrammarSource | None = None

    @property
    def rules(self) -> tuple[TwoLevelRule, ...]:
        return self.rulebase.rules

    @property
    def has_lexicon(self) -> bool:
        return not isinstance(self.lexicon, FreeLexicon)

    def surface_alphabet(self) -> frozenset[str]:
        return frozenset(self.alphabets[0].symbols) if 0 in self.alphabets else frozenset()

    def lexical_alphabet(self, tape: int) -> frozenset[str]:
        alpha = self.alphabets.get(tape)
        return frozenset(s for s in alpha.symbols if s != BOUNDARY) if alpha else frozenset()

    def toggle(self, rule_id: str, enabled: bool) -> GrammarSnapshot:
        return replace(self, rulebase=self.rulebase.toggle(rule_id, enabled))

    def with_disabled(self, rule_ids: Sequence[str]) -> GrammarSnapshot:
        snap = self
        for rid in rule_ids:
            snap = snap.toggle(rid, False)
        return snap


@dataclass(frozen=True)
class CascadeGrammar:
    front: GrammarSnapshot
    back: GrammarSnapshot
    path: str | None = None
    fanout_cap: int = 10_000


def _read_clauses(path: Path, diags: _Diagnostics, seen: set[Path]) -> list[Clause]:
    path = path.resolve()
    if path in seen:
        diags.add(str(path), "include cycle")
        return []
    seen = seen | {path}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        diags.add(str(path), f"cannot read: {exc.strerror}")
        return []
    try:
        source = parse_grammar(text, str(path))
    except GrammarError as exc:
        diags.items.extend(exc.diagnostics)
        return []
    return _inline_includes(source.clauses, path.parent, diags, seen)


def _inline_includes(
    clauses: Sequence[Clause], base: Path | None, diags: _Diagnostics, seen: set[Path]
) -> list[Clause]:
    out = []
    for clause in clauses:
        t = clause.term
        if isinstance(t, Compound) and t.functor == "include" and len(t.args) == 1:
            if base is None:
                diags.add(clause.where, "include needs a file-based grammar")
                continue
            out.extend(_read_clauses(base / _name_of(t.args[0]), diags, seen))
        else:
            out.append(clause)
    return out


def load_file(path: str | os.PathLike) -> GrammarSnapshot | CascadeGrammar:
    p = Path(path)
    diags = _Diagnostics()
    clauses = _read_clauses(p, diags, set())
    if diags.items:
        raise GrammarError(diags.items)
    return load(GrammarSource(tuple(clauses), str(p)), base=p.parent)


def load(source: GrammarSource, base: str | os.PathLike | None = None) -> GrammarSnapshot | CascadeGrammar:
    """Interpret *source*; all problems are reported together."""
    diags = _Diagnostics()
    base_dir = Path(base) if base is not None else (Path(source.path).parent if source.path else None)
    clauses = _inline_includes(source.clauses, base_dir, diags, set())

    alphabets: dict[int, Alphabet] = {}
    sets: dict[str, VariableSet] = {}
    raw_rules: list[tuple[Clause, TwoLevelRule]] = []
    expansions: list[ExpansionRule] = []
    expand_cmds: list[tuple[Clause, str]] = []
    synwords: list[tuple[Clause, Term, FeatureCategory, dict[str, Value]]] = []
    synrules: list[SynRule] = []
    starts: list[FeatureCategory] = []
    tape_of: dict[str, int] = {}
    max_empty_run = DEFAULT_MAX_EMPTY_RUN
    cascade: tuple[Clause, str, str] | None = None

    for clause in clauses:
        t = clause.term
        try:
            if not isinstance(t, Compound):
                raise _Bad(f"unexpected clause {format_term(t)}")
            f, args = t.functor, t.args
            sig = (f, len(args))
            if sig == ("tl_alphabet", 2):
                tape = _int_of(args[0])
                if tape in alphabets:
                    raise _Bad(f"alphabet for tape {tape} declared twice")
                alphabets[tape] = Alphabet(tape, tuple(_name_of(s) for s in _list_of(args[1])))
            elif sig == ("tl_set", 2):
                sid = _name_of(args[0])
                if sid in sets:
                    raise _Bad(f"set {sid} declared twice")
                try:
                    sets[sid] = VariableSet(sid, tuple(_name_of(s) for s in _list_of(args[1])))
                except RuleError as exc:
                    raise _Bad(str(exc)) from None
            elif sig == ("tl_rule", 10):
                op_name = _name_of(args[4])
                if op_name not in ("=>", "<=>"):
                    raise _Bad(f"unknown operator {op_name}")
                feats, fbinds = _features(args[9])
                raw_rules.append(
                    (
                        clause,
                        TwoLevelRule(
                            id=_name_of(args[0]),
                            llc=_lexical(args[1]),
                            lex=_lexical(args[2]),
                            rlc=_lexical(args[3]),
                            op=Op(op_name),
                            lsc=_surface(args[5]),
                            surf=_surface(args[6]),
                            rsc=_surface(args[7]),
                            variables=_variables(args[8]),
                            features=feats,
                            feature_binds=tuple(fbinds.items()),
                        ),
                    )
                )
            elif sig == ("expand", 3):
                expansions.append(ExpansionRule(_item(args[0]), _lexical(args[1]), _variables(args[2])))
            elif sig == ("expand", 1):
                expand_cmds.append((clause, _name_of(args[0])))
            elif sig == ("synword", 2):
                cat, binds = _category(args[1])
                synwords.append((clause, args[0], cat, binds))
            elif sig == ("synrule", 3):
                mother, binds = _category(args[1])
                daughters = []
                for d in _list_of(args[2]):
                    cat, extra = _category(d)
                    binds = _merge_binds(binds, extra)
                    daughters.append(cat)
                try:
                    synrules.append(SynRule(_name_of(args[0]), mother, tuple(daughters), tuple(binds.items())))
                except WordGrammarError as exc:
                    raise _Bad(str(exc)) from None
            elif sig == ("start", 1):
                cat, _ = _category(args[0])
                starts.append(cat)
            elif sig == ("tape_of", 2):
                tape_of[_name_of(args[0])] = _int_of(args[1])
            elif sig == ("max_empty_run", 1):
                max_empty_run = _int_of(args[0])
                if max_empty_run < 0:
                    raise _Bad("max_empty_run must be non-negative")
            elif sig == ("cascade", 2):
                cascade = (clause, _name_of(args[0]), _name_of(args[1]))
            else:
                raise _Bad(f"unknown term {f}/{len(args)}")
        except _Bad as exc:
            diags.add(clause.where, str(exc))

    if cascade is not None:
        if diags.items:
            raise GrammarError(diags.items)
        return _load_cascade(cascade, base_dir, source.path)

    if not alphabets:
        diags.add(source.path or "<string>", "no alphabets declared")
        raise GrammarError(diags.items)
    ntapes = max(alphabets)
    missing = [t for t in range(ntapes + 1) if t not in alphabets]
    if missing:
        diags.add(source.path or "<string>", f"alphabets missing for tapes {missing}")
    if 0 in alphabets and BOUNDARY in alphabets[0].symbols:
        diags.add(source.path or "<string>", "the boundary symbol cannot be in the surface alphabet")

    # expansion replaces each schema by its expanded rules, in place
    by_id: dict[str, int] = {}
    for i, (clause, rule) in enumerate(raw_rules):
        if rule.id in by_id:
            diags.add(clause.where, f"rule {rule.id} declared twice")
        by_id.setdefault(rule.id, i)
    expanded: dict[int, list[TwoLevelRule]] = {}
    for clause, rid in expand_cmds:
        if rid not in by_id:
            diags.add(clause.where, f"expand: unknown rule {rid}")
            continue
        try:
            expanded[by_id[rid]] = expand_rule(raw_rules[by_id[rid]][1], expansions, ntapes)
        except RuleError as exc:
            diags.add(clause.where, str(exc))

    rules: list[TwoLevelRule] = []
    for i, (clause, rule) in enumerate(raw_rules):
        for r in expanded.get(i, [rule]):
            r = _normalise(r, ntapes)
            for problem in validate_rule(r, ntapes, alphabets, sets):
                diags.add(clause.where, problem)
            rules.append(r)

    # lexicon
    lex_alpha = {t: [s for s in a.symbols if s != BOUNDARY] for t, a in alphabets.items() if t > 0}
    entries: list[LexEntrySource] = []
    lexicon: Lexicon = Lexicon(ntapes, lex_alpha) if synwords else FreeLexicon(ntapes, lex_alpha)
    for clause, form_term, cat, binds in synwords:
        tape = tape_of.get(cat.symbol, 1 if ntapes == 1 else None)
        if tape is None:
            diags.add(clause.where, f"no tape_of declaration for category {cat.symbol}")
            continue
        if isinstance(form_term, PList):
            form = [_name_of(s) for s in form_term.items]
        else:
            form = _tokenize_morpheme(_name_of(form_term), lex_alpha.get(tape, ()))
            if form is None:
                diags.add(clause.where, f"morpheme {_name_of(form_term)} is not spelled over the alphabet of tape {tape}")
                continue
        try:
            lexicon.insert(tape, form, cat, binds)
        except LexiconError as exc:
            diags.add(clause.where, str(exc))
            continue
        entries.append(LexEntrySource(tuple(form), cat, tuple(binds.items()), tape))

    try:
        word = WordGrammar(tuple(synrules), tuple(starts), frozenset(e.category.symbol for e in entries))
    except WordGrammarError as exc:
        diags.add(source.path or "<string>", str(exc))

    if diags.items:
        raise GrammarError(diags.items)
    try:
        rulebase = RuleBase.build(rules, sets)
    except RuleError as exc:
        raise GrammarError([str(exc)]) from None
    return GrammarSnapshot(
        path=source.path,
        ntapes=ntapes,
        alphabets=alphabets,
        sets=sets,
        rulebase=rulebase,
        expansions=tuple(expansions),
        lexicon=lexicon,
        entries=tuple(entries),
        word=word,
        tape_of=tape_of,
        max_empty_run=max_empty_run,
        source=source,
    )


def _normalise(rule: TwoLevelRule, ntapes: int) -> TwoLevelRule:
    def fix(expr):
        return tuple(() for _ in range(ntapes)) if len(expr) == 0 else expr

    feats = rule.features if rule.features else tuple(() for _ in range(ntapes))
    return replace(rule, llc=fix(rule.llc), lex=fix(rule.lex), rlc=fix(rule.rlc), features=feats)


def _load_cascade(decl: tuple[Clause, str, str], base: Path | None, path: str | None) -> CascadeGrammar:
    clause, front_name, back_name = decl
    if base is None:
        raise GrammarError([f"{clause.where}: cascade needs a file-based grammar"])
    front = load_file(base / front_name)
    back = load_file(base / back_name)
    if isinstance(front, CascadeGrammar) or isinstance(back, CascadeGrammar):
        raise GrammarError([f"{clause.where}: nested cascades are not supported"])
    if front.surface_alphabet() != back.lexical_alphabet(1) or back.ntapes != 1:
        raise GrammarError(
            [f"{clause.where}: surface alphabet of {front_name} does not match lexical tape 1 of {back_name}"]
        )
    return CascadeGrammar(front, back, path)


# -- printing snapshots -----------------------------------------------------------------


def _fmt_item(item: Item) -> str:
    return item.name if isinstance(item, Variable) else _format_name(item)


def _fmt_surface(expr: Sequence[Item]) -> str:
    return "[" + ",".join(_fmt_item(i) for i in expr) + "]"


def _fmt_lexical(expr: Sequence[Sequence[Item]]) -> str:
    return "[" + ",".join(_fmt_surface(t) for t in expr) + "]"


def _fmt_category(cat: FeatureCategory, binds: Mapping[str, Value], done: set[str]) -> str:
    parts = []
    for attr, value in cat.features:
        parts.append(f"{_format_name(attr)}={format_value(value)}")
        if isinstance(value, Variable) and value.name in binds and value.name not in done:
            done.add(value.name)
            parts.append(f"{_format_name(attr)}={format_value(binds[value.name])}")
    return f"{_format_name(cat.symbol)}:[{','.join(parts)}]"


def _fmt_vars(variables: Sequence[tuple[str, str]]) -> str:
    return "[" + ",".join(f"{_format_name(s)}({v})" for s, v in variables) + "]"


def format_rule(rule: TwoLevelRule) -> str:
    binds = dict(rule.feature_binds)
    done: set[str] = set()
    feats = "[" + ",".join(
        "[" + ",".join(_fmt_category(c, binds, done) for c in tape) + "]" for tape in rule.features
    ) + "]"
    return (
        f"tl_rule({rule.id}, {_fmt_lexical(rule.llc)}, {_fmt_lexical(rule.lex)}, {_fmt_lexical(rule.rlc)}, "
        f"{rule.op.value}, {_fmt_surface(rule.lsc)}, {_fmt_surface(rule.surf)}, {_fmt_surface(rule.rsc)}, "
        f"{_fmt_vars(rule.variables)}, {feats})."
    )


def print_grammar(snapshot: GrammarSnapshot) -> str:
    """Canonical source text for *snapshot*; expanded rules note their schema."""
    out = []
    for tape in sorted(snapshot.alphabets):
        syms = ",".join(_format_name(s) for s in snapshot.alphabets[tape].symbols)
        out.append(f"tl_alphabet({tape}, [{syms}]).")
    for s in snapshot.sets.values():
        out.append(f"tl_set({_format_name(s.id)}, [{','.join(_format_name(m) for m in s.members)}]).")
    if snapshot.max_empty_run != DEFAULT_MAX_EMPTY_RUN:
        out.append(f"max_empty_run({snapshot.max_empty_run}).")
    for exp in snapshot.expansions:
        out.append(f"expand({_fmt_item(exp.symbol)}, {_fmt_lexical(exp.expansion)}, {_fmt_vars(exp.variables)}).")
    for rule in snapshot.rules:
        if rule.origin:
            out.append(f"% expanded from {rule.origin}")
        out.append(format_rule(rule))
    for sym, tape in snapshot.tape_of.items():
        out.append(f"tape_of({_format_name(sym)}, {tape}).")
    for e in snapshot.entries:
        text = "".join(e.form)
        alpha = snapshot.lexical_alphabet(e.tape)
        if _tokenize_morpheme(text, sorted(alpha)) == list(e.form):
            form = _format_name(text)
        else:
            form = "[" + ",".join(_format_name(s) for s in e.form) + "]"
        out.append(f"synword({form}, {_fmt_category(e.category, dict(e.binds), set())}).")
    for r in snapshot.word.rules:
        binds = dict(r.binds)
        done: set[str] = set()
        mother = _fmt_category(r.mother, binds, done)
        daughters = ",".join(_fmt_category(d, binds, done) for d in r.daughters)
        out.append(f"synrule({_format_name(r.id)}, {mother}, [{daughters}]).")
    for s in snapshot.word.starts:
        out.append(f"start({_fmt_category(s, {}, set())}).")
    return "\n".join(out) + "\n"


__all__ = [
    "Atom",
    "CascadeGrammar",
    "Clause",
    "Compound",
    "GrammarError",
    "GrammarSnapshot",
    "GrammarSource",
    "Infix",
    "PList",
    "Var",
    "format_category",
    "format_rule",
    "format_source",
    "format_term",
    "load",
    "load_file",
    "parse_grammar",
    "print_grammar",
    "tokenize",
]
