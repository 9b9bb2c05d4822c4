"""Benchmark harness: replay one stream through WFCM and WFCM-AC at several chunk sizes.

Outputs written to the run directory:

``reports.csv``
    one row per (chunk size, algorithm, chunk); deterministic given the
    input, configuration and seed, so wall-clock timings are kept out of it.
``timings.csv``
    clustering wall time per chunk, keyed like ``reports.csv``.
``summary.csv``
    per (chunk size, algorithm) aggregates.
``valid_clusters.dat``, ``mae.dat``, ``time.dat`` and matching ``.svg``
    one row per chunk size, one column per algorithm.
``chunk_checksums.csv``
    SHA-256 of every chunk as seen by each algorithm.
``config.json``
    the validated run configuration.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from ._parallel import max_threads
from .adaptive import WFCMAC
from .exceptions import ConfigError, StreamFuzzError
from .fcm import DEFAULT_EPSILON, DEFAULT_M, DEFAULT_MAX_ITER
from .ingest import (
    IngestStats,
    SyntheticSpec,
    Vocabulary,
    chunk_stream,
    iter_kdd,
    iter_records,
    load_label_map,
    open_text,
    synthetic_stream,
)
from .metrics import ChunkReport
from .stream import DEFAULT_DECAY, WFCM
from .svg import line_chart

logger = logging.getLogger(__name__)

ALGORITHMS = ("wfcm", "wfcm-ac")
REPORT_FIELDS = ("chunk_index", "algo", "chunk_size", "k", "valid_clusters", "mae", "error_rate",
                 "iterations", "objective")
TIMING_FIELDS = ("chunk_index", "algo", "chunk_size", "elapsed_seconds")
SUMMARY_FIELDS = ("chunk_size", "algo", "chunks", "failed_chunks", "total_valid_clusters",
                  "mean_valid_clusters", "mean_mae", "mean_error_rate", "total_iterations",
                  "total_elapsed_seconds", "final_k")
PLOTS = {
    "valid_clusters": ("mean_valid_clusters", "Valid clusters per chunk", "valid clusters"),
    "mae": ("mean_mae", "Mean absolute error", "MAE"),
    "time": ("total_elapsed_seconds", "Iteration time", "seconds"),
}

EXIT_OK, EXIT_CONFIG, EXIT_INPUT, EXIT_FAILED = 0, 2, 3, 4


class InputError(StreamFuzzError):
    pass


@dataclass
class RunConfig:
    input: str | None = None
    synthetic: str | None = None
    chunk_sizes: tuple[int, ...] = (1000, 2000, 3000, 4000)
    algo: str = "both"
    k: int = 5
    m: float = DEFAULT_M
    epsilon: float = DEFAULT_EPSILON
    max_iter: int = DEFAULT_MAX_ITER
    decay: float = DEFAULT_DECAY
    k_min: int = 2
    k_max: int | None = None
    seed: int = 0
    out: str = "results"
    norm: str = "cumulative"
    label_map: str | None = None
    valid_by: str = "support"
    min_support: int | None = None
    max_records: int | None = None

    @property
    def algorithms(self) -> tuple[str, ...]:
        return ALGORITHMS if self.algo == "both" else (self.algo,)

    def validate(self) -> "RunConfig":
        if (self.input is None) == (self.synthetic is None):
            raise ConfigError("exactly one of input or synthetic must be given")
        if self.synthetic is not None:
            SyntheticSpec.parse(self.synthetic)
        self.chunk_sizes = tuple(int(s) for s in self.chunk_sizes)
        if not self.chunk_sizes or min(self.chunk_sizes) < 1:
            raise ConfigError("chunk sizes must be positive")
        if self.algo not in ALGORITHMS + ("both",):
            raise ConfigError(f"unknown algorithm {self.algo!r}")
        if self.k < 1 or self.max_iter < 1 or not self.m > 1 or not self.epsilon > 0 or not self.decay >= 0:
            raise ConfigError("need k >= 1, max_iter >= 1, m > 1, epsilon > 0, lambda >= 0")
        if "wfcm-ac" in self.algorithms:
            k_max = 2 * self.k if self.k_max is None else self.k_max
            if not 2 <= self.k_min <= self.k <= k_max:
                raise ConfigError(f"need 2 <= k_min <= k <= k_max, got {self.k_min}, {self.k}, {k_max}")
        if self.norm not in ("cumulative", "per-chunk"):
            raise ConfigError(f"unknown normalization {self.norm!r}")
        if self.valid_by not in ("support", "validity"):
            raise ConfigError(f"unknown valid-cluster rule {self.valid_by!r}")
        if self.min_support is not None and self.min_support < 1:
            raise ConfigError("min_support must be >= 1")
        if self.max_records is not None and self.max_records < 1:
            raise ConfigError("max_records must be >= 1")
        return self

    def to_json(self) -> str:
        data = dataclasses.asdict(self)
        data["chunk_sizes"] = list(self.chunk_sizes)
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


def make_estimator(algo: str, config: RunConfig):
    common = dict(n_clusters=config.k, m=config.m, epsilon=config.epsilon, max_iter=config.max_iter,
                  decay=config.decay, min_support=config.min_support, valid_by=config.valid_by,
                  random_state=config.seed)
    if algo == "wfcm":
        return WFCM(**common)
    return WFCMAC(**common, k_min=config.k_min, k_max=config.k_max, norm=config.norm)


def chunk_checksum(chunk) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(chunk.points, dtype="<f8").tobytes())
    if chunk.labels is not None:
        h.update(np.ascontiguousarray(chunk.labels, dtype="<i8").tobytes())
    return h.hexdigest()


class _Source:
    """Re-playable record stream: every call to :meth:`records` restarts from the top."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.stats: list[IngestStats] = []
        if config.synthetic is not None:
            self.spec = SyntheticSpec.parse(config.synthetic)
            return
        self.spec = None
        path = Path(config.input)
        try:
            with open_text(path) as fh:
                fh.read(1)
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
        try:
            self.label_map = load_label_map(config.label_map)
        except (OSError, KeyError) as exc:
            raise ConfigError(f"cannot load label map {config.label_map}: {exc}") from exc
        self.vocab = Vocabulary.from_records(self._limit(iter_records(path)))
        logger.info("vocabulary: %s (dimension %d)",
                    {k: len(v) for k, v in self.vocab.to_dict().items()}, self.vocab.dimension)

    def _limit(self, it):
        limit = self.config.max_records
        for i, item in enumerate(it):
            if limit is not None and i >= limit:
                return
            yield item

    def records(self):
        if self.spec is not None:
            return self._limit(synthetic_stream(self.spec))
        stats = IngestStats()
        self.stats.append(stats)
        return self._limit(iter_kdd(self.config.input, self.vocab, self.label_map, stats))


def _failed_row(index: int, algo: str, size: int) -> dict:
    row = {f: None for f in REPORT_FIELDS}
    row.update(chunk_index=index, algo=algo, chunk_size=size)
    return row


def run_stream(source: _Source, algo: str, size: int, config: RunConfig):
    """Run one algorithm over the stream at one chunk size.

    Returns ``(rows, timings, checksums)``. A chunk that raises is logged,
    skipped (state unchanged) and reported with missing values.
    """
    est = make_estimator(algo, config)
    rows, timings, sums = [], [], []
    for chunk in chunk_stream(source.records(), size):
        digest = chunk_checksum(chunk)
        sums.append((size, algo, chunk.index, digest))
        logger.debug("%s size=%d chunk=%d sha256=%s", algo, size, chunk.index, digest)
        try:
            est.partial_fit(chunk.points, chunk.labels)
        except (StreamFuzzError, FloatingPointError, np.linalg.LinAlgError) as exc:
            logger.warning("%s size=%d chunk %d failed: %s", algo, size, chunk.index, exc)
            rows.append(_failed_row(chunk.index, algo, size))
            continue
        report: ChunkReport = est.reports_[-1]
        row = {f: getattr(report, f) for f in REPORT_FIELDS}
        row.update(chunk_index=chunk.index, algo=algo, chunk_size=size)
        rows.append(row)
        timings.append({"chunk_index": chunk.index, "algo": algo, "chunk_size": size,
                        "elapsed_seconds": report.elapsed_seconds})
    return rows, timings, sums


def _cell(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, (float, np.floating)):
        return "NA" if math.isnan(v) else f"{float(v):.10g}"
    return str(v)


def _write_csv(path: Path, fields, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_cell(row[f]) for f in fields])


def _mean(values):
    values = [v for v in values if v is not None and not math.isnan(v)]
    return sum(values) / len(values) if values else None


def summarize(rows, timings) -> list[dict]:
    keys = list(dict.fromkeys((r["chunk_size"], r["algo"]) for r in rows))
    out = []
    for size, algo in keys:
        mine = [r for r in rows if (r["chunk_size"], r["algo"]) == (size, algo)]
        ok = [r for r in mine if r["k"] is not None]
        elapsed = [t["elapsed_seconds"] for t in timings if (t["chunk_size"], t["algo"]) == (size, algo)]
        out.append({
            "chunk_size": size,
            "algo": algo,
            "chunks": len(mine),
            "failed_chunks": len(mine) - len(ok),
            "total_valid_clusters": sum(r["valid_clusters"] for r in ok) if ok else None,
            "mean_valid_clusters": _mean([r["valid_clusters"] for r in ok]),
            "mean_mae": _mean([r["mae"] for r in ok]),
            "mean_error_rate": _mean([r["error_rate"] for r in ok]),
            "total_iterations": sum(r["iterations"] for r in ok) if ok else None,
            "total_elapsed_seconds": math.fsum(elapsed) if ok else None,
            "final_k": ok[-1]["k"] if ok else None,
        })
    return out


def emit_plots(summary: list[dict], out_dir) -> list[Path]:
    """Write the three ``.dat`` series and their SVG charts from summary rows.

    Rows are chunk sizes in first-seen order, columns the algorithms present;
    missing values become ``NA`` and a gap in the chart.
    """
    if not summary:
        raise StreamFuzzError("no reports to plot")
    out_dir = Path(out_dir)
    sizes = list(dict.fromkeys(s["chunk_size"] for s in summary))
    algos = [a for a in ALGORITHMS if any(s["algo"] == a for s in summary)]
    lookup = {(s["chunk_size"], s["algo"]): s for s in summary}
    written = []
    for name, (column, title, ylabel) in PLOTS.items():
        series = {}
        for a in algos:
            values = []
            for size in sizes:
                v = lookup.get((size, a), {}).get(column)
                values.append(None if v is None or (isinstance(v, float) and math.isnan(v)) else float(v))
            series[a] = values
        lines = ["# chunk_size " + " ".join(algos)]
        for i, size in enumerate(sizes):
            lines.append(" ".join([str(size)] + [_cell(series[a][i]) for a in algos]))
        dat = out_dir / f"{name}.dat"
        dat.write_text("\n".join(lines) + "\n")
        svg = out_dir / f"{name}.svg"
        svg.write_text(line_chart(title, [float(s) for s in sizes], series, "chunk size", ylabel))
        written += [dat, svg]
    return written


def run_benchmark(config: RunConfig) -> int:
    """Run the whole sweep and write every artifact; returns the process exit code."""
    start = time.perf_counter()
    try:
        config.validate()
        source = _Source(config)
    except InputError as exc:
        logger.error("%s", exc)
        return EXIT_INPUT
    except StreamFuzzError as exc:
        logger.error("configuration error: %s", exc)
        return EXIT_CONFIG
    out = Path(config.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        logger.error("cannot create output directory %s: %s", out, exc)
        return EXIT_CONFIG
    (out / "config.json").write_text(config.to_json())

    rows, timings, sums = [], [], []
    total_failure = False
    with threadpool_limits(limits=max_threads()):
        for size in config.chunk_sizes:
            digests = {}
            for algo in config.algorithms:
                r, t, s = run_stream(source, algo, size, config)
                rows += r
                timings += t
                sums += s
                digests[algo] = [d for *_, d in s]
                if not r or all(row["k"] is None for row in r):
                    logger.error("%s at chunk size %d produced no successful chunk", algo, size)
                    total_failure = True
            if len({tuple(v) for v in digests.values()}) > 1:
                logger.error("chunk contents differ between algorithms at chunk size %d", size)
    for stats in source.stats:
        if stats.malformed or stats.unknown_labels:
            logger.info("ingest: %d lines, %d malformed, %d unknown labels",
                        stats.lines, stats.malformed, stats.unknown_labels)
    if getattr(source, "vocab", None) is not None and source.vocab.unseen:
        logger.warning("%d unseen categorical values", source.vocab.unseen)

    _write_csv(out / "reports.csv", REPORT_FIELDS, rows)
    _write_csv(out / "timings.csv", TIMING_FIELDS, timings)
    _write_csv(out / "chunk_checksums.csv", ("chunk_size", "algo", "chunk_index", "sha256"),
               [dict(zip(("chunk_size", "algo", "chunk_index", "sha256"), s)) for s in sums])
    summary = summarize(rows, timings)
    _write_csv(out / "summary.csv", SUMMARY_FIELDS, summary)
    if not summary:
        logger.error("input produced no chunks")
        return EXIT_FAILED
    emit_plots(summary, out)
    logger.info("wall time %.3f s", time.perf_counter() - start)
    return EXIT_FAILED if total_failure else EXIT_OK
