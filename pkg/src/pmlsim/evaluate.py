"""Pairwise evaluation harness: probability matrix, classification, timing.

Every unordered document pair is scored, wall time is taken over the
whole sweep with a monotonic clock, and the score distribution is
summarized as a fixed-width histogram plus moment statistics. Pair
evaluations are independent, so the sweep can fan out over processes.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .document import PmlTree, parse_pml_file
from .generator import LabeledCorpus
from .inference import SimConfig, pair_probability
from .reduce import reduce_pml

Pair = tuple[str, str]


@dataclass
class EvalReport:
    pair_probs: list[tuple[str, str, float]] = field(default_factory=list)
    mean_prob: float = 0.0
    histogram: list[tuple[float, int]] = field(default_factory=list)
    timings: list[tuple[int, float]] = field(default_factory=list)
    wall_seconds: float = 0.0
    per_pair_micros: float = 0.0
    skewness: float = 0.0
    kurtosis: float = 0.0
    predicted: set[Pair] = field(default_factory=set)
    precision: float | None = None
    recall: float | None = None
    threshold: float | None = None
    truth_count: int = 0

    @property
    def predicted_count(self) -> int:
        return len(self.predicted)


def histogram_counts(probs, bins: int = 20) -> list[tuple[float, int]]:
    """Counts over equal-width bins of [0, 1]; 1.0 lands in the last bin."""
    counts = [0] * bins
    for p in probs:
        idx = min(int(p * bins), bins - 1)
        counts[idx] += 1
    return [(i / bins, counts[i]) for i in range(bins)]


_worker_reduced = None
_worker_cfg = None


def _init_worker(reduced, cfg) -> None:
    global _worker_reduced, _worker_cfg
    _worker_reduced = reduced
    _worker_cfg = cfg


def _eval_chunk(chunk):
    return [
        pair_probability(_worker_reduced[i], _worker_reduced[j], _worker_cfg)
        for i, j in chunk
    ]


def _all_pairs(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def pairwise_matrix(
    corpus: LabeledCorpus,
    cfg: SimConfig,
    bins: int = 20,
    jobs: int = 1,
) -> EvalReport:
    """Score every unordered pair; fills the distribution and timing fields."""
    docs = corpus.documents
    ids = [d.source_id for d in docs]
    reduced = [reduce_pml(d) for d in docs]
    index_pairs = _all_pairs(len(docs))

    start = time.perf_counter()
    if jobs <= 1 or len(index_pairs) < 2 * jobs:
        probs = [pair_probability(reduced[i], reduced[j], cfg) for i, j in index_pairs]
    else:
        chunk_size = max(1, len(index_pairs) // (jobs * 8))
        chunks = [
            index_pairs[k : k + chunk_size]
            for k in range(0, len(index_pairs), chunk_size)
        ]
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_worker, initargs=(reduced, cfg)
        ) as pool:
            probs = [p for part in pool.map(_eval_chunk, chunks) for p in part]
    wall = time.perf_counter() - start

    report = EvalReport()
    report.pair_probs = [
        (ids[i], ids[j], p) for (i, j), p in zip(index_pairs, probs)
    ]
    report.wall_seconds = wall
    report.timings = [(len(docs), wall)]
    if probs:
        arr = np.asarray(probs)
        report.mean_prob = float(arr.mean())
        report.per_pair_micros = wall / len(probs) * 1e6
        sd = float(arr.std())
        if sd > 0:
            centered = arr - arr.mean()
            report.skewness = float((centered**3).mean() / sd**3)
            report.kurtosis = float((centered**4).mean() / sd**4)
    report.histogram = histogram_counts(probs, bins=bins)
    return report


def classify(report: EvalReport, truth, threshold: float) -> EvalReport:
    """Fill the prediction fields; empty predictions count as precision 1."""
    truth_pairs = {tuple(sorted(p)) for p in truth}
    predicted = {
        tuple(sorted((a, b)))
        for a, b, p in report.pair_probs
        if p >= threshold
    }
    hits = predicted & truth_pairs
    report.predicted = predicted
    report.threshold = threshold
    report.truth_count = len(truth_pairs)
    report.precision = len(hits) / len(predicted) if predicted else 1.0
    report.recall = len(hits) / len(truth_pairs) if truth_pairs else 1.0
    return report


def linear_r2(xs, ys) -> float:
    """Coefficient of determination of the least-squares line through (xs, ys)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return 1.0
    return 1.0 - float((residuals**2).sum()) / ss_tot


def load_corpus_dir(path, truth=frozenset()) -> LabeledCorpus:
    """Read every *.xml file (sorted by name) as one corpus."""
    files = sorted(Path(path).glob("*.xml"))
    docs: list[PmlTree] = [parse_pml_file(f) for f in files]
    return LabeledCorpus(tuple(docs), frozenset(truth))


def load_truth(csv_path) -> frozenset[Pair]:
    """Read a two-column id CSV (header a,b) into unordered truth pairs."""
    pairs = set()
    with open(csv_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            pairs.add(tuple(sorted((row["a"], row["b"]))))
    return frozenset(pairs)


def report_json(report: EvalReport, cfg: SimConfig, jobs: int = 1, bins: int = 20) -> dict:
    """The machine-readable summary written by the evaluate command."""
    return {
        "config": {
            "sim": cfg.similarity,
            "threshold": report.threshold if report.threshold is not None else cfg.threshold,
            "symmetrize": cfg.symmetrize,
            "jobs": jobs,
            "bins": bins,
        },
        "mean_prob": report.mean_prob,
        "precision": report.precision,
        "recall": report.recall,
        "predicted_count": report.predicted_count,
        "truth_count": report.truth_count,
        "wall_seconds": report.wall_seconds,
        "per_pair_micros": report.per_pair_micros,
    }


def write_hist_csv(report: EvalReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_lo", "count"])
        for lo, count in report.histogram:
            writer.writerow([f"{lo:.2f}", count])
