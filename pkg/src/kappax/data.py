"""Multi-label rating data: ingestion, the classification tensor and tallies.

Ratings arrive as long-format *selection events*: one ``subject,rater,category``
row per box a rater ticked.  A row that is absent means "not selected".  Who
rated which subject at all is a separate question, answered by an optional
roster of ``subject,rater`` pairs; without one every observed rater is taken
to have rated every observed subject.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateCategory,
    DuplicatePair,
    DuplicateRecord,
    EmptyFile,
    InvalidTensor,
    MalformedRow,
    RecordOutsideRoster,
    UnknownCategory,
)

RATINGS_HEADER = ("subject", "rater", "category")
ROSTER_HEADER = ("subject", "rater")


@dataclass(frozen=True)
class RatingRecord:
    subject: str
    rater: str
    category: str


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _read_rows(text: str, header: tuple[str, ...]):
    """Yield ``(line_number, fields)`` for each data row after checking the header."""
    if not text.strip():
        raise EmptyFile("file is empty")
    reader = csv.reader(io.StringIO(text))
    first = True
    for row in reader:
        line = reader.line_num
        if not row or all(not f.strip() for f in row):
            continue
        fields = tuple(f.strip() for f in row)
        if first:
            first = False
            if fields != header:
                raise MalformedRow(
                    f"expected header {','.join(header)!r}, got {','.join(row)!r}", line
                )
            continue
        if len(fields) != len(header):
            raise MalformedRow(
                f"expected {len(header)} columns, got {len(fields)}", line
            )
        if not all(fields):
            raise MalformedRow("empty identifier", line)
        yield line, fields


def parse_ratings(text: str) -> list[RatingRecord]:
    """Parse ``ratings.csv`` content into records, preserving file order."""
    records = []
    seen = set()
    for line, fields in _read_rows(text, RATINGS_HEADER):
        if fields in seen:
            raise DuplicateRecord(f"duplicate record {','.join(fields)}", line)
        seen.add(fields)
        records.append(RatingRecord(*fields))
    return records


def parse_roster(text: str) -> list[tuple[str, str]]:
    """Parse ``roster.csv`` content into unique ``(subject, rater)`` pairs."""
    pairs = []
    seen = set()
    for line, fields in _read_rows(text, ROSTER_HEADER):
        if fields in seen:
            raise DuplicatePair(f"duplicate roster pair {','.join(fields)}", line)
        seen.add(fields)
        pairs.append(fields)
    if not pairs:
        raise EmptyFile("roster lists no subject,rater pairs")
    return pairs


def parse_categories(text: str) -> list[str]:
    """One category id per line; blank lines and ``#`` comments are ignored."""
    out = [ln.strip() for ln in text.splitlines()]
    out = [c for c in out if c and not c.startswith("#")]
    if not out:
        raise EmptyFile("category list is empty")
    return out


@dataclass(frozen=True, eq=False)
class ClassificationTensor:
    """Binary selections ``x[i, j, c]`` plus the ``(subject, rater)`` participation mask."""

    subjects: tuple[str, ...]
    raters: tuple[str, ...]
    categories: tuple[str, ...]
    selections: np.ndarray = field(repr=False)
    participation: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("subjects", "raters", "categories"):
            ids = tuple(getattr(self, name))
            if len(set(ids)) != len(ids):
                raise InvalidTensor(f"duplicate {name[:-1]} ids")
            object.__setattr__(self, name, ids)
        sel = _frozen(self.selections, bool)
        part = _frozen(self.participation, bool)
        shape = (len(self.subjects), len(self.raters), len(self.categories))
        if sel.shape != shape:
            raise InvalidTensor(f"selections shape {sel.shape} != {shape}")
        if part.shape != shape[:2]:
            raise InvalidTensor(f"participation shape {part.shape} != {shape[:2]}")
        if shape[0] < 1 or shape[2] < 1 or shape[1] < 2:
            raise InvalidTensor("need at least 1 subject, 2 raters and 1 category")
        if np.any(sel & ~part[:, :, None]):
            raise InvalidTensor("selection recorded for a non-participating rater")
        object.__setattr__(self, "selections", sel)
        object.__setattr__(self, "participation", part)

    @classmethod
    def from_arrays(cls, selections, participation=None, subjects=None, raters=None,
                    categories=None) -> "ClassificationTensor":
        sel = np.asarray(selections, dtype=bool)
        I, J, C = sel.shape
        if participation is None:
            participation = np.ones((I, J), dtype=bool)
        return cls(
            subjects=tuple(subjects) if subjects is not None else tuple(f"s{i + 1}" for i in range(I)),
            raters=tuple(raters) if raters is not None else tuple(f"r{j + 1}" for j in range(J)),
            categories=tuple(categories) if categories is not None else tuple(f"c{c + 1}" for c in range(C)),
            selections=sel,
            participation=participation,
        )

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.selections.shape

    def take_subjects(self, index: Sequence[int]) -> "ClassificationTensor":
        """Tensor over the given subject rows; repeated rows get suffixed ids."""
        index = np.asarray(index, dtype=int)
        counts: dict[int, int] = {}
        ids = []
        for i in index:
            k = counts.get(int(i), 0)
            counts[int(i)] = k + 1
            ids.append(self.subjects[i] if k == 0 else f"{self.subjects[i]}#{k}")
        return ClassificationTensor(
            subjects=tuple(ids),
            raters=self.raters,
            categories=self.categories,
            selections=self.selections[index],
            participation=self.participation[index],
        )

    def selection_sets(self) -> list[list[frozenset | None]]:
        """``A[i][j]``: categories rater j selected for subject i; ``None`` if j did not rate i."""
        out = []
        for i in range(len(self.subjects)):
            row = []
            for j in range(len(self.raters)):
                if not self.participation[i, j]:
                    row.append(None)
                else:
                    row.append(frozenset(self.categories[c] for c in np.flatnonzero(self.selections[i, j])))
            out.append(row)
        return out


def _ordered(declared: Iterable[str] | None, observed: Iterable[str]) -> list[str]:
    if declared is not None:
        return list(dict.fromkeys(declared))
    return sorted(set(observed))


def build_tensor(records: Sequence[RatingRecord], roster: Sequence[tuple[str, str]] | None = None,
                 categories: Sequence[str] | None = None) -> ClassificationTensor:
    """Assemble records into a tensor.

    Subjects and raters follow first appearance in the roster when one is
    given, categories follow the declared list; anything undeclared is sorted
    lexicographically.  Declared categories nobody selected keep a zero column.
    """
    if categories is not None:
        categories = list(categories)
        if len(set(categories)) != len(categories):
            dup = next(c for c in categories if categories.count(c) > 1)
            raise DuplicateCategory(f"category {dup!r} declared twice")
        known = set(categories)
        for r in records:
            if r.category not in known:
                raise UnknownCategory(f"record uses undeclared category {r.category!r}")
    cats = _ordered(categories, (r.category for r in records))
    if roster is not None:
        subjects = _ordered([s for s, _ in roster], ())
        raters = _ordered([r for _, r in roster], ())
        allowed = set(map(tuple, roster))
        for r in records:
            if (r.subject, r.rater) not in allowed:
                raise RecordOutsideRoster(
                    f"record ({r.subject}, {r.rater}, {r.category}) has no roster entry"
                )
    else:
        subjects = _ordered(None, (r.subject for r in records))
        raters = _ordered(None, (r.rater for r in records))
    si = {s: k for k, s in enumerate(subjects)}
    ri = {r: k for k, r in enumerate(raters)}
    ci = {c: k for k, c in enumerate(cats)}
    sel = np.zeros((len(subjects), len(raters), len(cats)), dtype=bool)
    if roster is not None:
        part = np.zeros((len(subjects), len(raters)), dtype=bool)
        for s, r in roster:
            part[si[s], ri[r]] = True
    else:
        part = np.ones((len(subjects), len(raters)), dtype=bool)
    for r in records:
        sel[si[r.subject], ri[r.rater], ci[r.category]] = True
    return ClassificationTensor(tuple(subjects), tuple(raters), tuple(cats), sel, part)


@dataclass(frozen=True, eq=False)
class AgreementTable:
    """Counts ``x[i, c]`` and the number of raters that had the chance to select each cell.

    ``kind`` says how the opportunity counts are stored: ``"fixed"`` (a scalar
    J), ``"per_subject"`` (vector of length I) or ``"per_cell"`` (I x C).
    """

    counts: np.ndarray
    kind: str
    rater_counts: int | np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "counts", _frozen(self.counts, np.int64))
        if self.kind not in ("fixed", "per_subject", "per_cell"):
            raise ValueError(f"unknown rater-count kind {self.kind!r}")
        if self.kind != "fixed":
            object.__setattr__(self, "rater_counts", _frozen(self.rater_counts, np.int64))
        if np.any(self.counts < 0) or np.any(self.counts > self.opportunities):
            raise InvalidTensor("counts outside [0, rater count]")

    @property
    def opportunities(self) -> np.ndarray:
        """Rater count for every ``(i, c)`` cell, broadcast to I x C."""
        shape = self.counts.shape
        if self.kind == "fixed":
            return np.full(shape, self.rater_counts, dtype=np.int64)
        if self.kind == "per_subject":
            return np.repeat(self.rater_counts[:, None], shape[1], axis=1)
        return self.rater_counts


def tally(tensor: ClassificationTensor) -> AgreementTable:
    counts = tensor.selections.sum(axis=1, dtype=np.int64)
    if tensor.participation.all():
        return AgreementTable(counts, "fixed", len(tensor.raters))
    return AgreementTable(counts, "per_subject", tensor.participation.sum(axis=1, dtype=np.int64))


@dataclass(frozen=True)
class Diagnostic:
    code: str  # never-selected | no-rater-pairs | inactive-rater
    ident: str
    message: str


def validate(tensor: ClassificationTensor, table: AgreementTable | None = None) -> list[Diagnostic]:
    """Non-fatal findings worth reporting next to a result."""
    if table is None:
        table = tally(tensor)
    out = []
    for c in np.flatnonzero(table.counts.sum(axis=0) == 0):
        cid = tensor.categories[c]
        out.append(Diagnostic("never-selected", cid, f"category {cid} was never selected"))
    per_subject = tensor.participation.sum(axis=1)
    for i in np.flatnonzero(per_subject < 2):
        sid = tensor.subjects[i]
        out.append(Diagnostic("no-rater-pairs", sid,
                              f"subject {sid} has {per_subject[i]} rater(s): no rater pairs"))
    for j in np.flatnonzero(~tensor.participation.any(axis=0)):
        rid = tensor.raters[j]
        out.append(Diagnostic("inactive-rater", rid, f"rater {rid} rated no subject"))
    return out


def _write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def render_ratings(tensor: ClassificationTensor) -> str:
    """Inverse of :func:`parse_ratings` for the selections of ``tensor``."""
    rows = [
        (tensor.subjects[i], tensor.raters[j], tensor.categories[c])
        for i, j, c in zip(*np.nonzero(tensor.selections))
    ]
    return _write_csv(RATINGS_HEADER, rows)


def render_roster(tensor: ClassificationTensor) -> str:
    rows = [(tensor.subjects[i], tensor.raters[j]) for i, j in zip(*np.nonzero(tensor.participation))]
    return _write_csv(ROSTER_HEADER, rows)
