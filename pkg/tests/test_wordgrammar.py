import itertools

import pytest

from conftest import grammar
from oracles import chart_parses, derivations, follow_pairs, label, tree_key
from mtmorph.featstruct import Conjunction, FeatureCategory, Variable, rename, rename_bindings
from mtmorph.wordgrammar import BOS, EOS, SynRule, WordGrammar, build_follow, start_symbols


def cat(symbol, **f):
    return FeatureCategory.of(symbol, **f)


TOY = [SynRule("rule1", cat("stem"), (cat("pattern"), cat("root"), cat("vocalism")))]


def test_toy_follow():
    table = build_follow(TOY, {"pattern", "root", "vocalism"})
    assert table[BOS] == {"pattern"}
    assert table["pattern"] == {"root"}
    assert table["root"] == {"vocalism"}
    assert EOS in table["vocalism"]


def _table_pairs(table):
    return {(a, b) for a, nxt in table.table.items() for b in nxt}


@pytest.mark.parametrize("name", ["syriac.mtg", "ktb.mtg", "syriac_stem.mtg"])
def test_follow_matches_bounded_derivations(name):
    g = grammar(name)
    word = g.word
    lexical = set(word.lexical_symbols)
    starts = start_symbols(word.rules, word.starts)
    derived = derivations(word.rules, starts, lexical, depth=6)
    oracle = follow_pairs(derived, BOS, EOS)
    table = _table_pairs(word.follow_table)
    # sound: every adjacency seen in a derivation is allowed
    assert oracle <= table
    # and on these grammars nothing more is allowed
    assert table == oracle


def test_listing_eight_vim_edges(syriac):
    f = syriac.word.follow_table
    assert "vim" in f[BOS]
    assert EOS in f["vim"]
    assert "conj" in f[BOS]


def test_unconstrained_without_rules():
    wg = WordGrammar()
    assert wg.unconstrained
    assert wg.follow_table.allows("anything", "else")


def leaf_stacks(snap, texts):
    """Every leaf sequence for *texts*, one per choice among homographs."""
    per = [[e for e in snap.entries if "".join(e.form) == t] for t in texts]
    for pick in itertools.product(*per):
        stack, binds = [], {}
        for i, e in enumerate(pick):
            stack.append((rename(e.category, f"_l{i}"), "".join(e.form)))
            binds.update(rename_bindings(dict(e.binds), f"_l{i}"))
        yield stack, binds


FIXTURE_WORDS = [
    ("ktb.mtg", ["c1vc2vc3", "ktb", "aa"]),
    ("ktb.mtg", ["c1vc2vc3", "ktb", "ae"]),
    ("syriac.mtg", ["cvcvc", "ktb", "aa"]),
    ("syriac.mtg", ["cvcvc", "ktb", "aa", "eh"]),
    ("syriac.mtg", ["wa", "cvcvc", "ktb", "aa", "eh"]),
    ("syriac.mtg", ["ʼet", "cvcvc", "ktb", "ae"]),
    ("syriac.mtg", ["ne", "ʼet", "cvcvc", "ktb", "aa", "un"]),
    ("syriac.mtg", ["ne", "ʼet", "cvcvc", "ktb", "aa", "in"]),
    ("syriac.mtg", ["wa", "ne", "ʼet", "cvcvc", "ktb", "aa", "un", "eh"]),
    ("syriac.mtg", ["ktb", "cvcvc", "aa"]),
    ("syriac_stem.mtg", ["ʼet", "cvcvc", "ktb", "ae"]),
]


@pytest.mark.parametrize("name,texts", FIXTURE_WORDS)
def test_shift_reduce_matches_chart_oracle(name, texts):
    snap = grammar(name)
    for stack, binds in leaf_stacks(snap, texts):
        got = {tree_key(t) for t, _ in snap.word.shift_reduce(stack, binds)}
        assert got == chart_parses(snap.word, stack, binds)


def test_shift_reduce_output_is_sorted_and_unique(syriac):
    stack, binds = next(leaf_stacks(syriac, ["ne", "ʼet", "cvcvc", "ktb", "aa", "un"]))
    parses = syriac.word.shift_reduce(stack, binds)
    keys = [tree_key(t) for t, _ in parses]
    assert len(keys) == len(set(keys))
    seqs = [t.rule_sequence() for t, _ in parses]
    assert seqs == sorted(seqs)


def _shape(tree):
    if tree.is_leaf:
        return (tree.category.symbol, tree.leaf)
    return (tree.category.symbol, tree.category.get("bar"), tuple(_shape(c) for c in tree.children))


def test_reflexive_tree():
    snap = grammar("syriac_stem.mtg")
    stack, binds = next(leaf_stacks(snap, ["ʼet", "cvcvc", "ktb", "ae"]))
    trees = snap.word.parse(stack, binds)
    assert trees
    assert {_shape(t) for t in trees} == {
        ("stem", "-1", (
            ("reflexive", "ʼet"),
            ("stem", "-2", (("pattern", "cvcvc"), ("root", "ktb"), ("vocalism", "ae"))),
        ))
    }


def test_circumfix_tree_shares_npg(syriac):
    stack, binds = next(leaf_stacks(syriac, ["ne", "ʼet", "cvcvc", "ktb", "aa", "un"]))
    parses = syriac.word.shift_reduce(stack, binds)
    assert len(parses) == 1
    tree, _ = parses[0]
    assert _shape(tree) == (
        "stem", "0", (
            ("vim", "ne"),
            ("stem", "-1", (
                ("reflexive", "ʼet"),
                ("stem", "-2", (("pattern", "cvcvc"), ("root", "ktb"), ("vocalism", "aa"))),
            )),
            ("vim", "un"),
        ),
    )
    npgs = {c.category.get("npg") for c in tree.children if c.category.symbol == "vim"} | {tree.category.get("npg")}
    assert npgs == {Conjunction(("p", "3", "m"))}


def test_circumfix_mismatch_has_no_parse(syriac):
    stack, binds = next(leaf_stacks(syriac, ["ne", "ʼet", "cvcvc", "ktb", "aa", "in"]))
    assert syriac.word.shift_reduce(stack, binds) == []


def test_completeness():
    rules = [SynRule("r", cat("stem", bar="-1"), (cat("a"),)), SynRule("s", cat("stem", bar="0"), (cat("stem", bar="-1"),))]
    wg = WordGrammar(tuple(rules), lexical_symbols=frozenset({"a"}))
    assert wg.is_complete(cat("stem", bar="0"), {})
    assert not wg.is_complete(cat("stem", bar="-1"), {})
    declared = WordGrammar(tuple(rules), (cat("stem", bar="-1"),), frozenset({"a"}))
    assert declared.is_complete(cat("stem", bar="-1"), {})
    assert not declared.is_complete(cat("stem", bar="0"), {})
    assert declared.is_complete(cat("stem", bar=Variable("X")), {})


def test_label_blanks_variables():
    assert label(cat("root", measure=Variable("M"))) == "root:[measure=_]"
