from decimal import Decimal, getcontext

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mtmorph import analyze
from mtmorph.batch import BatchReport, BatchRow, estimate, run_batch


def decimal_estimate(freqs, t_first, t_sub):
    """Independent evaluation in 50-digit decimal arithmetic."""
    getcontext().prec = 50
    tf, ts = Decimal(repr(t_first)), Decimal(repr(t_sub))
    total = tf * len(freqs) + sum(ts * (f - 1) for f in freqs)
    return total / sum(freqs)


def test_table_one_overall_mean():
    assert estimate([2], 5.324, 0.054, n=1) == pytest.approx(2.689, rel=1e-9)


def test_two_words():
    assert estimate([3, 1], 5.324, 0.054, n=2) == pytest.approx((10.648 + 0.108) / 4, rel=1e-9)


@given(
    st.lists(st.integers(1, 10_000), min_size=1, max_size=50),
    st.floats(0.001, 100, allow_nan=False),
    st.floats(0.0, 10, allow_nan=False),
)
def test_estimate_matches_decimal_oracle(freqs, t_first, t_sub):
    got = Decimal(repr(estimate(freqs, t_first, t_sub)))
    want = decimal_estimate(freqs, t_first, t_sub)
    assert abs(got - want) <= abs(want) * Decimal("1e-9")


@pytest.mark.parametrize("freqs,n", [([], None), ([0], None), ([2, 3], 1)])
def test_estimate_rejects_bad_input(freqs, n):
    with pytest.raises(ValueError):
        estimate(freqs, 1.0, 0.1, n)


def test_batch_rows_follow_the_word_list(ktb):
    words = ["ktab", "katab", "katteb", "ktab"]
    report = run_batch(words, lambda w: analyze(ktb, w))
    assert [r.word for r in report.rows] == words
    assert [r.analyses for r in report.rows] == [1, 0, 1, 1]
    assert all(r.all_sec >= r.first_sec >= 0 for r in report.rows)


rows = st.lists(
    st.builds(
        BatchRow,
        st.text(st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=8),
        st.integers(0, 100),
        st.floats(0, 10, allow_nan=False),
        st.floats(0, 10, allow_nan=False),
    ),
    max_size=20,
)


@given(rows)
def test_csv_round_trip_keeps_aggregates(rs):
    report = BatchReport(tuple(rs))
    text = report.to_csv()
    again = BatchReport.from_csv(text)
    assert len(text.splitlines()) >= len(rs) + 1
    assert len(again.rows) == len(rs)
    assert again.mean_first == report.mean_first
    assert again.mean_all == report.mean_all
    assert again.mean_analyses == report.mean_analyses
