import json
import shutil
import subprocess
import sys

import pytest

from conftest import DATA, GRAMMARS
from mtmorph.batch import BatchReport
from mtmorph.cli import main


@pytest.fixture
def workdir(tmp_path):
    for name in ("ktb.mtg", "vocalisation.mtg", "ktb_cascade.mtg"):
        shutil.copy(GRAMMARS / name, tmp_path / name)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_text(capsys):
    code, out, _ = run(capsys, "analyze", "ktb.mtg", "ktab")
    assert code == 0
    assert out.startswith("analysis 1: c1vc2vc3♭ / ktb♭ / aa♭")
    assert "(stem:[bar=-2,measure=p`al]" in out


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", "ktb.mtg", "katteb", "--json", "--all")
    assert code == 0
    (r,) = json.loads(out)
    assert r["lexical"] == ["c1vc2vc3♭", "ktb♭", "ae♭"]
    assert {"rule": "R6", "surf": "tt", "lex": ["c2", "t", ""]} in r["partition"]
    assert r["parse"]["features"]["measure"] == "pa``el"


def test_no_analysis_exit_code(capsys):
    code, out, _ = run(capsys, "analyze", "ktb.mtg", "katab")
    assert code == 1
    assert "no analysis" in out


def test_trace_goes_to_stderr(capsys):
    code, out, err = run(capsys, "analyze", "ktb.mtg", "katab", "--trace")
    assert code == 1
    assert any(line.startswith("RULE ") for line in err.splitlines())


def test_tree_formats(capsys):
    _, none, _ = run(capsys, "analyze", "syriac.mtg", "netkatbun", "--tree-format", "none")
    assert "(stem" not in none
    _, js, _ = run(capsys, "analyze", "syriac.mtg", "netkatbun", "--tree-format", "json")
    tree = json.loads(js.splitlines()[-1])
    assert [c["category"] for c in tree["children"]] == ["vim", "stem", "vim"]


def test_generate_appends_boundaries(capsys):
    code, out, _ = run(capsys, "generate", "ktb.mtg", "c1vc2vc3", "ktb", "ae")
    assert (code, out) == (0, "katteb\n")
    code, out, _ = run(capsys, "generate", "ktb_cascade.mtg", "c1vc2vc3", "ktb", "aa", "--json")
    assert code == 0 and set(json.loads(out)) == {"ktab", "ktb"}


def test_generate_usage_errors(capsys):
    code, _, err = run(capsys, "generate", "ktb.mtg", "c1vc2vc3", "ktb")
    assert code == 3 and "3 lexical tapes" in err


def test_rules_toggle_persists(capsys, workdir):
    g = str(workdir / "ktb.mtg")
    assert run(capsys, "rules", g, "--off", "R4")[0] == 0
    assert json.loads((workdir / "ktb.mtg.session.json").read_text()) == {"disabled": ["R4"]}
    code, out, _ = run(capsys, "analyze", g, "katab")
    assert code == 0 and "c1vc2vc3♭ / ktb♭ / aa♭" in out
    _, listing, _ = run(capsys, "rules", g, "--list")
    assert any(line.split()[:5] == ["R4", "<=>", "3", "24", "off"] for line in listing.splitlines())
    assert run(capsys, "rules", g, "--on", "R4")[0] == 0
    assert run(capsys, "analyze", g, "katab")[0] == 1
    assert run(capsys, "rules", g, "--off", "R42")[0] == 3


def test_batch(capsys, workdir):
    wordlist = workdir / "words.txt"
    wordlist.write_text("ktab\nkatab\n\nkatteb\n", encoding="utf-8")
    code, out, _ = run(capsys, "batch", "ktb.mtg", str(wordlist), "--csv")
    assert code == 0
    report = BatchReport.from_csv(out)
    assert [(r.word, r.analyses) for r in report.rows] == [("ktab", 1), ("katab", 0), ("katteb", 1)]
    code, out, _ = run(capsys, "batch", "ktb.mtg", str(wordlist))
    assert out.splitlines()[-1].startswith("mean")


def test_estimate(capsys):
    code, out, _ = run(capsys, "estimate", "--freqs", "2", "--n", "1")
    assert code == 0
    sec = float(out.split()[0])
    assert sec == pytest.approx(2.689, rel=1e-9)
    assert run(capsys, "estimate", "--freqs", "2", "3", "--n", "1")[0] == 3


def test_print(capsys):
    code, out, _ = run(capsys, "print", "expand_r8.mtg")
    assert code == 0 and out.count("% expanded from R8") == 4
    code, out, _ = run(capsys, "print", "ktb_cascade.mtg")
    assert code == 0 and "% back" in out


def test_load_errors_exit_2(capsys):
    code, _, err = run(capsys, "print", str(DATA / "bad_unknown_set.mtg"))
    assert code == 2 and "c9" in err
    assert run(capsys, "analyze", "missing.mtg", "x")[0] == 2


def test_bad_flags_exit_3(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "ktb.mtg"])
    assert exc.value.code == 3
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "ktb.mtg", "ktab", "--tree-format", "xml"])
    assert exc.value.code == 3


def test_grammar_dir_override(capsys, monkeypatch, workdir):
    (workdir / "only_here.mtg").write_text((GRAMMARS / "ktb.mtg").read_text(encoding="utf-8"), encoding="utf-8")
    monkeypatch.setenv("MTMORPH_GRAMMAR_DIR", str(workdir))
    assert run(capsys, "analyze", "only_here.mtg", "ktab")[0] == 0


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mtmorph.cli", "generate", "ktb.mtg", "c1vc2vc3", "ktb", "aa"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "ktab\n"
