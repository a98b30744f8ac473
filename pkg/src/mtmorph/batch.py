"""Corpus timing reports and the throughput estimate."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from statistics import fmean
from typing import Callable, Iterable, Iterator, Sequence

FIELDS = ("word", "analyses", "first_sec", "all_sec")


@dataclass(frozen=True)
class BatchRow:
    word: str
    analyses: int
    first_sec: float
    all_sec: float


@dataclass(frozen=True)
class BatchReport:
    rows: tuple[BatchRow, ...]

    @property
    def mean_first(self) -> float:
        return fmean(r.first_sec for r in self.rows) if self.rows else 0.0

    @property
    def mean_all(self) -> float:
        return fmean(r.all_sec for r in self.rows) if self.rows else 0.0

    @property
    def mean_analyses(self) -> float:
        return fmean(r.analyses for r in self.rows) if self.rows else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(FIELDS)
        for r in self.rows:
            # repr keeps every digit, so re-reading gives identical aggregates
            writer.writerow((r.word, r.analyses, repr(r.first_sec), repr(r.all_sec)))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> BatchReport:
        reader = csv.DictReader(io.StringIO(text))
        return cls(
            tuple(
                BatchRow(row["word"], int(row["analyses"]), float(row["first_sec"]), float(row["all_sec"]))
                for row in reader
            )
        )

    def to_text(self) -> str:
        width = max((len(r.word) for r in self.rows), default=4)
        lines = [f"{'word':<{width}}  analyses  first_sec    all_sec"]
        for r in self.rows:
            lines.append(f"{r.word:<{width}}  {r.analyses:>8}  {r.first_sec:>9.4f}  {r.all_sec:>9.4f}")
        lines.append(
            f"{'mean':<{width}}  {self.mean_analyses:>8.2f}  {self.mean_first:>9.4f}  {self.mean_all:>9.4f}"
        )
        return "\n".join(lines)


def time_word(word: str, run: Callable[[str], Iterator]) -> BatchRow:
    start = time.perf_counter()
    results = run(word)
    first = None
    count = 0
    for _ in results:
        count += 1
        if first is None:
            first = time.perf_counter() - start
    total = time.perf_counter() - start
    return BatchRow(word, count, total if first is None else first, total)


def run_batch(words: Iterable[str], run: Callable[[str], Iterator]) -> BatchReport:
    return BatchReport(tuple(time_word(w, run) for w in words))


def estimate(freqs: Sequence[int], t_first: float, t_sub: float, n: int | None = None) -> float:
    """Mean seconds per word when each distinct word costs ``t_first`` once
    and ``t_sub`` for each repeat: (t_first*n + sum(t_sub*(f-1))) / sum(f)."""
    if not freqs:
        raise ValueError("frequency list is empty")
    if any(f < 1 for f in freqs):
        raise ValueError("frequencies must be at least 1")
    if n is None:
        n = len(freqs)
    if n != len(freqs):
        raise ValueError(f"n={n} does not match {len(freqs)} frequencies")
    return (t_first * n + sum(t_sub * (f - 1) for f in freqs)) / sum(freqs)
