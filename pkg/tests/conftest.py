from __future__ import annotations

import functools
import sys
import time
from pathlib import Path

import pytest

from mtmorph import load_file

GRAMMARS = Path(__file__).resolve().parents[1] / "src" / "mtmorph" / "grammars"
DATA = Path(__file__).resolve().parent / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"

FIXTURES = sorted(p.name for p in GRAMMARS.glob("*.mtg"))


@functools.lru_cache(maxsize=None)
def grammar(name: str):
    return load_file(GRAMMARS / name)


def unsubscript(tape: str) -> str:
    """c1vc2vc3 -> cvcvc: the slot indices of the pattern consonants dropped."""
    return "".join(ch for ch in tape if not ch.isdigit())


@pytest.fixture
def ktb():
    return grammar("ktb.mtg")


@pytest.fixture
def syriac():
    return grammar("syriac.mtg")


_SESSION_START = []


def pytest_sessionstart(session):
    _SESSION_START.append(time.perf_counter())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    elapsed = time.perf_counter() - _SESSION_START[0]
    tr = terminalreporter
    tr.section("acceptance")
    for n in sorted(mod.RESULTS):
        title, ok, note = mod.RESULTS[n]
        tr.write_line(f"criterion {n} {title}: {'PASS' if ok else 'FAIL'}" + (f" ({note})" if note else ""))
    verdict = "PASS" if elapsed < mod.SUITE_LIMIT_S else "FAIL"
    tr.write_line(f"suite runtime {elapsed:.1f} s, limit {mod.SUITE_LIMIT_S:.0f} s: {verdict}")
