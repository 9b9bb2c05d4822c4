"""KDD-CUP'99 style CSV ingestion, chunking, and a synthetic blob stream.

Records are 41 features followed by a label; fields 1-3 (protocol_type,
service, flag) are categorical and one-hot encoded in place, the other 38
pass through unchanged. Class codes are fixed per run::

    normal=0, DoS=1, Probe=2, R2L=3, U2R=4, unknown=-1

Unknown labels are kept in the stream (they still get clustered) but carry
code -1, which the metrics exclude from MAE.
"""

from __future__ import annotations

import csv
import gzip
import io
import logging
import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .exceptions import ConfigError, MalformedRecordError
from .stream import Chunk

logger = logging.getLogger(__name__)

N_FIELDS = 42
CATEGORICAL = (1, 2, 3)
CATEGORICAL_NAMES = ("protocol_type", "service", "flag")
N_NUMERIC = 38

CLASSES = ("normal", "DoS", "Probe", "R2L", "U2R")
CLASS_CODES = {name: code for code, name in enumerate(CLASSES)}
UNKNOWN = -1


@dataclass(frozen=True)
class RawRecord:
    numeric: tuple[float, ...]
    categorical: tuple[str, str, str]
    label: str


def parse_record(line: str) -> RawRecord:
    line = line.strip()
    if not line:
        raise MalformedRecordError("malformed record: empty line")
    fields = [f.strip() for f in line.split(",")]
    if len(fields) != N_FIELDS:
        raise MalformedRecordError(f"malformed record: {len(fields)} fields, expected {N_FIELDS}")
    numeric = []
    for i, value in enumerate(fields[:-1]):
        if i in CATEGORICAL:
            continue
        try:
            x = float(value)
        except ValueError:
            raise MalformedRecordError(f"malformed record: field {i} = {value!r} is not numeric") from None
        if not math.isfinite(x):
            raise MalformedRecordError(f"malformed record: field {i} is not finite")
        numeric.append(x)
    label = fields[-1]
    if label.endswith("."):
        label = label[:-1]
    return RawRecord(tuple(numeric), tuple(fields[i] for i in CATEGORICAL), label)


@dataclass
class Vocabulary:
    """Per-feature categorical vocabularies; value order is the one-hot column order."""

    values: list[list[str]] = field(default_factory=lambda: [[] for _ in CATEGORICAL])
    frozen: bool = False
    unseen: int = 0

    @classmethod
    def from_records(cls, records: Iterable[RawRecord], freeze: bool = True) -> "Vocabulary":
        seen = [set() for _ in CATEGORICAL]
        for rec in records:
            for s, v in zip(seen, rec.categorical):
                s.add(v)
        return cls([sorted(s) for s in seen], frozen=freeze)

    @property
    def dimension(self) -> int:
        return N_NUMERIC + sum(len(v) for v in self.values)

    def to_dict(self) -> dict:
        return dict(zip(CATEGORICAL_NAMES, self.values))


def encode(record: RawRecord, vocab: Vocabulary) -> np.ndarray:
    """Feature vector with one-hot blocks in the positions of the categorical fields.

    Under a frozen vocabulary an unseen value leaves its block at zero and
    bumps ``vocab.unseen``; otherwise the value is appended to the vocabulary.
    """
    blocks = []
    for values, value in zip(vocab.values, record.categorical):
        if value not in values:
            if vocab.frozen:
                vocab.unseen += 1
                logger.warning("unseen categorical value %r", value)
            else:
                values.append(value)
        block = np.zeros(len(values))
        if value in values:
            block[values.index(value)] = 1.0
        blocks.append(block)
    num = np.asarray(record.numeric)
    return np.concatenate([num[:1], *blocks, num[1:]])


def load_label_map(path=None) -> dict[str, int]:
    """Attack name to class code, from a two-column ``attack_name,class_name`` CSV."""
    if path is None:
        text = resources.files("streamfuzz").joinpath("data/kdd_label_map.csv").read_text()
    else:
        text = Path(path).read_text()
    mapping = {}
    for row in csv.DictReader(io.StringIO(text)):
        cls = row["class_name"].strip()
        if cls not in CLASS_CODES:
            raise ConfigError(f"label map: unknown class {cls!r}")
        mapping[row["attack_name"].strip()] = CLASS_CODES[cls]
    return mapping


@dataclass
class IngestStats:
    lines: int = 0
    malformed: int = 0
    unknown_labels: int = 0

    @property
    def records(self) -> int:
        return self.lines - self.malformed


def map_label(name: str, label_map: dict[str, int], stats: IngestStats | None = None) -> int:
    code = label_map.get(name)
    if code is None:
        if stats is not None:
            stats.unknown_labels += 1
        return UNKNOWN
    return code


def open_text(path) -> io.TextIOBase:
    """Open plain or gzip-compressed text, detected by magic bytes."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rt", encoding="utf-8", errors="replace")
    return open(path, encoding="utf-8", errors="replace")


def iter_records(path, stats: IngestStats | None = None) -> Iterator[RawRecord]:
    """Parsed records in file order; malformed lines are skipped and counted."""
    stats = IngestStats() if stats is None else stats
    with open_text(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            stats.lines += 1
            try:
                yield parse_record(line)
            except MalformedRecordError as exc:
                stats.malformed += 1
                logger.debug("line %d: %s", stats.lines, exc)


def iter_kdd(path, vocab: Vocabulary, label_map: dict[str, int],
             stats: IngestStats | None = None) -> Iterator[tuple[np.ndarray, int]]:
    stats = IngestStats() if stats is None else stats
    for rec in iter_records(path, stats):
        yield encode(rec, vocab), map_label(rec.label, label_map, stats)


def chunk_stream(source: Iterable[tuple[np.ndarray, int]], size: int) -> Iterator[Chunk]:
    """Consecutive ``size``-row chunks of ``(vector, label)`` items, indexed from 1.

    The final chunk may be shorter.
    """
    if size < 1:
        raise ConfigError("chunk size must be >= 1")
    index = 1
    rows, labels = [], []
    for x, y in source:
        rows.append(x)
        labels.append(y)
        if len(rows) == size:
            yield Chunk(index, np.vstack(rows), np.asarray(labels, dtype=int))
            index += 1
            rows, labels = [], []
    if rows:
        yield Chunk(index, np.vstack(rows), np.asarray(labels, dtype=int))


@dataclass(frozen=True)
class SyntheticSpec:
    """Gaussian blob stream.

    ``blobs`` clusters at well-separated random centers, isotropic noise
    ``std``; every center moves by ``drift`` (in random fixed directions)
    per ``n`` points of stream; when ``birth`` > 0 one extra blob starts
    emitting from point ``birth`` on. Points are drawn uniformly over the
    active blobs; labels are blob indices.
    """

    n: int = 20000
    blobs: int = 5
    d: int = 2
    std: float = 0.5
    spacing: float = 10.0
    drift: float = 0.0
    birth: int = 0
    seed: int = 0

    @classmethod
    def parse(cls, text: str) -> "SyntheticSpec":
        """Parse ``key=value`` pairs separated by commas, e.g. ``n=8000,blobs=5,birth=4000``."""
        kwargs = {}
        types = {f: t for f, t in cls.__annotations__.items()}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, sep, value = part.partition("=")
            key = key.strip()
            if not sep or key not in types:
                raise ConfigError(f"bad synthetic spec item {part!r}")
            try:
                kwargs[key] = int(value) if types[key] == "int" else float(value)
            except ValueError:
                raise ConfigError(f"bad synthetic spec value {part!r}") from None
        spec = cls(**kwargs)
        if spec.n < 1 or spec.blobs < 1 or spec.d < 1 or spec.std < 0:
            raise ConfigError(f"invalid synthetic spec {text!r}")
        return spec

    def centers(self) -> np.ndarray:
        """Blob centers on a jittered grid so that every pair is at least ``spacing`` apart."""
        rng = np.random.default_rng(self.seed)
        total = self.blobs + (1 if self.birth > 0 else 0)
        side = math.ceil(total ** (1.0 / self.d))
        grid = np.array(np.meshgrid(*[np.arange(side)] * self.d, indexing="ij")).reshape(self.d, -1).T
        cells = grid[rng.permutation(grid.shape[0])[:total]]
        return (cells * 2.0 + rng.uniform(-0.25, 0.25, size=cells.shape)) * self.spacing


def synthetic_stream(spec: SyntheticSpec) -> Iterator[tuple[np.ndarray, int]]:
    rng = np.random.default_rng(spec.seed + 1)
    centers = spec.centers()
    directions = rng.normal(size=centers.shape)
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    for t in range(spec.n):
        active = centers.shape[0] if spec.birth > 0 and t >= spec.birth else spec.blobs
        b = int(rng.integers(active))
        loc = centers[b] + directions[b] * spec.drift * (t / spec.n)
        yield loc + rng.normal(scale=spec.std, size=spec.d), b
