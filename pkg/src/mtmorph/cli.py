"""Command-line front end.

Exit codes: 0 success, 1 no analysis, 2 grammar load failure, 3 usage error.
Rule toggles persist in ``<grammar>.session.json`` next to the grammar file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import engine
from .batch import estimate, run_batch
from .featstruct import format_category
from .grammario import CascadeGrammar, GrammarError, GrammarSnapshot, load_file, print_grammar
from .rulebase import BOUNDARY, Direction

EXIT_OK, EXIT_NO_ANALYSIS, EXIT_LOAD, EXIT_USAGE = 0, 1, 2, 3
GRAMMAR_DIR_ENV = "MTMORPH_GRAMMAR_DIR"
BUNDLED = Path(__file__).with_name("grammars")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def resolve_grammar(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    for base in (os.environ.get(GRAMMAR_DIR_ENV), BUNDLED):
        if base and (Path(base) / name).exists():
            return Path(base) / name
    return path


def session_path(grammar: Path) -> Path:
    return grammar.with_name(grammar.name + ".session.json")


def read_session(grammar: Path) -> list[str]:
    path = session_path(grammar)
    if not path.exists():
        return []
    try:
        return list(json.loads(path.read_text(encoding="utf-8")).get("disabled", []))
    except (OSError, ValueError, AttributeError):
        print(f"warning: ignoring unreadable session file {path}", file=sys.stderr)
        return []


def write_session(grammar: Path, disabled: Sequence[str]) -> None:
    session_path(grammar).write_text(json.dumps({"disabled": sorted(disabled)}, indent=2) + "\n", encoding="utf-8")


def _apply_session(snap: GrammarSnapshot, disabled: Sequence[str]) -> GrammarSnapshot:
    known = {r.id for r in snap.rules}
    for rid in disabled:
        if rid in known:
            snap = snap.toggle(rid, False)
        else:
            print(f"warning: session disables unknown rule {rid}", file=sys.stderr)
    return snap


def open_grammar(name: str) -> tuple[Path, GrammarSnapshot | CascadeGrammar]:
    path = resolve_grammar(name)
    grammar = load_file(path)
    if isinstance(grammar, GrammarSnapshot):
        grammar = _apply_session(grammar, read_session(path))
    return path, grammar


def _tracer(enabled: bool):
    if not enabled:
        return None
    return lambda tag, msg: print(f"{tag} {msg}", file=sys.stderr)


# -- rendering --------------------------------------------------------------------


def _result_json(r: engine.AnalysisResult) -> dict:
    return {
        "surface": r.surface,
        "lexical": list(r.lexical),
        "partition": [{"rule": rid, "surf": s, "lex": list(lex)} for rid, s, lex in r.triples()],
        "morphemes": [format_category(c) for c in r.categories()],
        "parse": r.parse.to_json() if r.parse is not None else None,
    }


def _render(r: engine.AnalysisResult, n: int, tree_format: str) -> str:
    lines = [f"analysis {n}: {' / '.join(r.lexical)}"]
    for rid, s, lex in r.triples():
        lines.append(f"  {rid:<6} {s or '-':<4} {' '.join(t or '-' for t in lex)}")
    if r.categories():
        lines.append("  morphemes: " + " ".join(format_category(c) for c in r.categories()))
    if r.parse is not None and tree_format == "text":
        lines.append(r.parse.render(1))
    elif r.parse is not None and tree_format == "json":
        lines.append(json.dumps(r.parse.to_json(), ensure_ascii=False))
    return "\n".join(lines)


# -- commands -------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    _, grammar = open_grammar(args.grammar)
    tracer = _tracer(args.trace)
    if isinstance(grammar, CascadeGrammar):
        results = [c.front for c in engine.cascade(grammar, surf=args.word, tracer=tracer)]
    else:
        results = engine.analyze(grammar, args.word, tracer)
    shown = []
    for r in results:
        shown.append(r)
        if not args.all:
            break
    if args.json:
        print(json.dumps([_result_json(r) for r in shown], ensure_ascii=False, indent=2))
    else:
        for n, r in enumerate(shown, start=1):
            print(_render(r, n, args.tree_format))
    if not shown:
        if not args.json:
            print(f"no analysis for {args.word!r}")
        return EXIT_NO_ANALYSIS
    return EXIT_OK


def _complete_tapes(grammar: GrammarSnapshot, tapes: Sequence[str]) -> list[str]:
    if not grammar.has_lexicon:
        return list(tapes)
    return [t if not t or t.endswith(("#", BOUNDARY)) else t + BOUNDARY for t in tapes]


def cmd_generate(args) -> int:
    _, grammar = open_grammar(args.grammar)
    tracer = _tracer(args.trace)
    front = grammar.front if isinstance(grammar, CascadeGrammar) else grammar
    if len(args.tapes) != front.ntapes:
        raise UsageError(f"grammar has {front.ntapes} lexical tapes, got {len(args.tapes)} strings")
    tapes = _complete_tapes(front, args.tapes)
    if isinstance(grammar, CascadeGrammar):
        surfaces = [c.surface for c in engine.cascade(grammar, lex=tapes, tracer=tracer)]
    else:
        surfaces = [r.surface for r in engine.generate(grammar, tapes, tracer)]
    unique = list(dict.fromkeys(surfaces))
    if args.json:
        print(json.dumps(unique, ensure_ascii=False))
    else:
        for s in unique:
            print(s)
    if not unique:
        print("no surface form", file=sys.stderr)
        return EXIT_NO_ANALYSIS
    return EXIT_OK


def cmd_rules(args) -> int:
    path, grammar = open_grammar(args.grammar)
    if isinstance(grammar, CascadeGrammar):
        raise UsageError("a cascade has no rules of its own; toggle rules in its component grammars")
    disabled = set(read_session(path))
    for rid, enable in ((args.off, False), (args.on, True)):
        if rid is None:
            continue
        try:
            grammar.rulebase.get(rid)
        except KeyError:
            raise UsageError(f"unknown rule {rid}") from None
        if enable:
            disabled.discard(rid)
        else:
            disabled.add(rid)
        write_session(path, sorted(disabled))
        print(f"{rid} {'on' if enable else 'off'}")
    if args.off is None and args.on is None or args.list:
        prec = {
            d: {r.id: r.precedence for r in grammar.rulebase.ordered(d, enabled_only=False)}
            for d in Direction
        }
        print(f"{'id':<8} {'op':<4} {'ana':>4} {'gen':>4}  state  origin")
        for r in grammar.rules:
            state = "off" if r.id in disabled else "on"
            print(
                f"{r.id:<8} {r.op.value:<4} {prec[Direction.ANALYSIS][r.id]:>4} "
                f"{prec[Direction.GENERATION][r.id]:>4}  {state:<5}  {r.origin or ''}"
            )
    return EXIT_OK


def cmd_batch(args) -> int:
    _, grammar = open_grammar(args.grammar)
    words = [w.strip() for w in Path(args.wordlist).read_text(encoding="utf-8").splitlines()]
    words = [w for w in words if w]
    if isinstance(grammar, CascadeGrammar):
        report = run_batch(words, lambda w: engine.cascade(grammar, surf=w))
    else:
        report = run_batch(words, lambda w: engine.analyze(grammar, w))
    print(report.to_csv() if args.csv else report.to_text(), end="\n" if not args.csv else "")
    return EXIT_OK


def cmd_estimate(args) -> int:
    try:
        p = estimate(args.freqs, args.t_first, args.t_sub, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"{p:.6f} sec/word")
    print(f"{1 / p:.6f} words/sec")
    return EXIT_OK


def cmd_print(args) -> int:
    _, grammar = open_grammar(args.grammar)
    if isinstance(grammar, CascadeGrammar):
        print("% front\n" + print_grammar(grammar.front) + "% back\n" + print_grammar(grammar.back), end="")
    else:
        print(print_grammar(grammar), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtmorph", description="Multi-tape two-level morphology.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="analyse a surface word")
    p.add_argument("grammar")
    p.add_argument("word")
    p.add_argument("--trace", action="store_true", help="trace rule applications on stderr")
    p.add_argument("--all", action="store_true", help="print every analysis, not just the first")
    p.add_argument("--tree-format", choices=("text", "json", "none"), default="text")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", help="generate surface forms from lexical tapes")
    p.add_argument("grammar")
    p.add_argument("tapes", nargs="+", help="one string per lexical tape; # is the boundary")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("rules", help="list rules or toggle them for this grammar's session")
    p.add_argument("grammar")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--list", action="store_true")
    g.add_argument("--off", metavar="ID")
    g.add_argument("--on", metavar="ID")
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("batch", help="analyse a word list and report timings")
    p.add_argument("grammar")
    p.add_argument("wordlist")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("estimate", help="mean seconds per word for a frequency list")
    p.add_argument("--freqs", type=int, nargs="+", required=True)
    p.add_argument("--n", type=int, default=None, help="number of distinct words (default: len(freqs))")
    p.add_argument("--t-first", type=float, default=5.324)
    p.add_argument("--t-sub", type=float, default=0.054)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("print", help="print the loaded grammar in canonical form")
    p.add_argument("grammar")
    p.set_defaults(func=cmd_print)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GrammarError as exc:
        print(f"grammar error:\n{exc}", file=sys.stderr)
        return EXIT_LOAD
    except (UsageError, engine.UsageError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
