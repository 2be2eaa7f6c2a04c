"""SemEval-style tab-separated datasets and prediction files.

Three schemas are understood::

    A    id <TAB> label <TAB> text                 label in {positive, negative, neutral}
    BD   id <TAB> topic <TAB> label <TAB> text     label in {positive, negative}
    CE   id <TAB> topic <TAB> label <TAB> text     label an integer in [-2, 2]

A text field of exactly ``Not Available`` marks a tweet that could not be
downloaded; such lines are skipped and counted.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "Label3",
    "Label2",
    "LABEL5",
    "Schema",
    "Record",
    "Dataset",
    "DataError",
    "load_dataset",
    "parse_label",
    "format_label",
    "write_predictions",
    "read_predictions",
]

NOT_AVAILABLE = "Not Available"


class DataError(ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


class Label3(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"

    def __str__(self):
        return self.value


class Label2(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"

    def __str__(self):
        return self.value


# five-point labels are plain ints; ordering and |a - b| are meaningful
LABEL5 = (-2, -1, 0, 1, 2)


class Schema(str, enum.Enum):
    A = "A"
    BD = "BD"
    CE = "CE"

    @property
    def has_topic(self):
        return self is not Schema.A

    @property
    def labels(self):
        return {Schema.A: tuple(Label3), Schema.BD: tuple(Label2), Schema.CE: LABEL5}[self]

    @property
    def n_columns(self):
        return 3 if self is Schema.A else 4


def parse_label(s, schema):
    """Parse a label string for ``schema`` (case-insensitive)."""
    schema = Schema(schema)
    token = s.strip().lower()
    if schema is Schema.CE:
        try:
            value = int(token)
        except ValueError:
            raise ValueError(f"unknown label {s!r} for schema CE") from None
        if value not in LABEL5:
            raise ValueError(f"label {value} outside [-2, 2]")
        return value
    enum_type = Label3 if schema is Schema.A else Label2
    try:
        return enum_type(token)
    except ValueError:
        raise ValueError(f"unknown label {s!r} for schema {schema.value}") from None


def format_label(label):
    if isinstance(label, enum.Enum):
        return label.value
    return str(int(label))


@dataclass(frozen=True)
class Record:
    id: str
    text: str
    label: object = None
    topic: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("record id must be non-empty")
        if not self.text.strip():
            raise ValueError(f"record {self.id!r} has empty text")


@dataclass(frozen=True)
class Dataset:
    schema: Schema
    records: tuple
    skipped: int = 0
    path: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "schema", Schema(self.schema))
        object.__setattr__(self, "records", tuple(self.records))
        seen = set()
        for r in self.records:
            if r.id in seen:
                raise ValueError(f"duplicate id {r.id!r}")
            seen.add(r.id)
            if (r.topic is not None) != self.schema.has_topic:
                raise ValueError(f"record {r.id!r}: topic presence does not match schema {self.schema.value}")

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def ids(self):
        return [r.id for r in self.records]

    @property
    def texts(self):
        return [r.text for r in self.records]

    @property
    def labels(self):
        return [r.label for r in self.records]

    @property
    def topics(self):
        return [r.topic for r in self.records]

    def subset(self, indices):
        return Dataset(self.schema, [self.records[i] for i in indices], 0, self.path)

    def concat(self, other):
        if other.schema is not self.schema:
            raise ValueError("cannot concatenate datasets of different schemas")
        return Dataset(self.schema, self.records + other.records, self.skipped + other.skipped)


def load_dataset(path, schema) -> Dataset:
    """Read a tab-separated dataset file.

    Raises
    ------
    DataError
        On a wrong column count, an unknown label or a duplicate id; the
        message carries the 1-based line number.
    """
    schema = Schema(schema)
    records, seen, skipped = [], set(), 0
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != schema.n_columns:
                raise DataError(f"expected {schema.n_columns} columns, found {len(cols)}",
                                path, lineno)
            if schema is Schema.A:
                rid, lab, text = cols
                topic = None
            else:
                rid, topic, lab, text = cols
            if text.strip() == NOT_AVAILABLE:
                skipped += 1
                continue
            try:
                label = parse_label(lab, schema)
                rec = Record(rid, text, label, topic)
            except ValueError as exc:
                raise DataError(str(exc), path, lineno) from None
            if rid in seen:
                raise DataError(f"duplicate id {rid!r}", path, lineno)
            seen.add(rid)
            records.append(rec)
    return Dataset(schema, records, skipped, str(path))


def write_predictions(dataset, labels, path):
    """Write one prediction per record, in dataset order.

    Schema A lines are ``id<TAB>label``; topic schemas add the topic,
    ``id<TAB>topic<TAB>label``, so that files can be matched back by id.
    """
    labels = list(labels)
    if len(labels) != len(dataset.records):
        raise ValueError(f"{len(labels)} labels for {len(dataset.records)} records")
    lines = []
    for rec, lab in zip(dataset.records, labels):
        cols = [rec.id] + ([rec.topic] if dataset.schema.has_topic else []) + [format_label(lab)]
        lines.append("\t".join(cols) + "\n")
    Path(path).write_text("".join(lines), encoding="utf-8", newline="")


def read_predictions(path, schema):
    """Inverse of :func:`write_predictions`; returns a list of (id, topic, label)."""
    schema = Schema(schema)
    width = 3 if schema.has_topic else 2
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != width:
                raise DataError(f"expected {width} columns, found {len(cols)}", path, lineno)
            try:
                label = parse_label(cols[-1], schema)
            except ValueError as exc:
                raise DataError(str(exc), path, lineno) from None
            out.append((cols[0], cols[1] if schema.has_topic else None, label))
    return out
