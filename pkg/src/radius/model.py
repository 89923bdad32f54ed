"""Survey data model, ingestion and the proportion/rank primitives."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import IO, Any, Sequence

import numpy as np


class RadiusError(Exception):
    """Base class for errors raised by this package."""


class ParseError(RadiusError):
    """Input could not be read in the declared format."""

    def __init__(self, message: str, locus: str | None = None):
        self.locus = locus
        super().__init__(f"{locus}: {message}" if locus else message)


class ValidationError(RadiusError):
    """Input was readable but violates the survey data model."""

    def __init__(self, message: str, question_id: str | None = None, field: str | None = None):
        self.question_id = question_id
        self.field = field
        prefix = []
        if question_id is not None:
            prefix.append(f"question {question_id!r}")
        if field is not None:
            prefix.append(f"field {field!r}")
        super().__init__(f"{', '.join(prefix)}: {message}" if prefix else message)


def _as_counts(values: Sequence[Any], *, question_id: str | None = None, field: str | None = None) -> tuple[int, ...]:
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            if isinstance(v, float) and v.is_integer():
                v = int(v)
            else:
                raise ValidationError(f"count {v!r} is not an integer", question_id, field)
        if v < 0:
            raise ValidationError(f"count {v} is negative", question_id, field)
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class ResponseDistribution:
    counts: tuple[int, ...]
    total: int
    proportions: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.counts)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.int64)

    def p(self) -> np.ndarray:
        return np.asarray(self.proportions, dtype=float)


def to_distribution(counts: Sequence[int]) -> ResponseDistribution:
    """Wrap a count vector, deriving its proportions.

    >>> to_distribution([1, 3]).proportions
    (0.25, 0.75)
    """
    c = _as_counts(counts)
    total = sum(c)
    if total < 1:
        raise ValidationError("empty distribution")
    return ResponseDistribution(counts=c, total=total, proportions=tuple(x / total for x in c))


@dataclass(frozen=True)
class RankVector:
    ranks: tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.ranks, dtype=float)


def rank_counts(counts: Sequence[int]) -> RankVector:
    """Rank options by descending count; ties share the mean of the ranks they span."""
    c = np.asarray(counts, dtype=float)
    k = c.size
    # stable sort keeps tie blocks contiguous
    order = np.argsort(-c, kind="stable")
    ranks = np.empty(k, dtype=float)
    i = 0
    while i < k:
        j = i
        while j + 1 < k and c[order[j + 1]] == c[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return RankVector(tuple(float(r) for r in ranks))


@dataclass(frozen=True)
class QuestionRecord:
    question_id: str
    options: tuple[str, ...]
    human_counts: tuple[int, ...]
    agent_counts: tuple[int, ...]
    text: str | None = None

    def __post_init__(self):
        qid = self.question_id
        k = len(self.options)
        if k < 2:
            raise ValidationError(f"need at least 2 options, got {k}", qid, "options")
        for name in ("human_counts", "agent_counts"):
            vals = getattr(self, name)
            if len(vals) != k:
                raise ValidationError(f"length {len(vals)} does not match {k} options", qid, name)
            object.__setattr__(self, name, _as_counts(vals, question_id=qid, field=name))
            if sum(getattr(self, name)) < 1:
                raise ValidationError("all counts are zero", qid, name)
        object.__setattr__(self, "options", tuple(str(o) for o in self.options))

    @property
    def k(self) -> int:
        return len(self.options)

    @property
    def human(self) -> ResponseDistribution:
        return to_distribution(self.human_counts)

    @property
    def agent(self) -> ResponseDistribution:
        return to_distribution(self.agent_counts)

    def with_agent_counts(self, counts: Sequence[int]) -> QuestionRecord:
        return QuestionRecord(self.question_id, self.options, self.human_counts, tuple(counts), self.text)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"id": self.question_id}
        if self.text is not None:
            d["text"] = self.text
        d["options"] = list(self.options)
        d["human_counts"] = list(self.human_counts)
        d["agent_counts"] = list(self.agent_counts)
        return d


@dataclass
class Survey:
    survey_id: str
    questions: list[QuestionRecord]
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"survey_id": self.survey_id, "questions": [q.to_dict() for q in self.questions]}
        if self.meta:
            d["meta"] = self.meta
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


CSV_COLUMNS = ("question_id", "option_index", "option_label", "human_count", "agent_count")


def _check_unique(questions: list[QuestionRecord]) -> None:
    seen = set()
    for q in questions:
        if q.question_id in seen:
            raise ValidationError("duplicate question id", q.question_id, "id")
        seen.add(q.question_id)


def _survey_from_json(text: str) -> Survey:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, f"line {e.lineno} column {e.colno}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "document")
    raw = doc.get("questions")
    if not isinstance(raw, list):
        raise ParseError("'questions' must be a list", "document")
    questions = []
    for n, item in enumerate(raw):
        locus = f"questions[{n}]"
        if not isinstance(item, dict):
            raise ParseError("question must be an object", locus)
        missing = [key for key in ("id", "options", "human_counts", "agent_counts") if key not in item]
        if missing:
            raise ParseError(f"missing keys {missing}", locus)
        qid = str(item["id"])
        for key in ("options", "human_counts", "agent_counts"):
            if not isinstance(item[key], list):
                raise ValidationError("must be a list", qid, key)
        questions.append(
            QuestionRecord(
                question_id=qid,
                options=tuple(item["options"]),
                human_counts=tuple(item["human_counts"]),
                agent_counts=tuple(item["agent_counts"]),
                text=item.get("text"),
            )
        )
    _check_unique(questions)
    meta = doc.get("meta") or {}
    return Survey(str(doc.get("survey_id", "")), questions, dict(meta))


def _parse_int(value: str, locus: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParseError(f"expected integer, got {value!r}", locus) from None


def _survey_from_csv(text: str) -> Survey:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return Survey("", [])
    missing = [c for c in CSV_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise ParseError(f"missing columns {missing}", "line 1")
    groups: list[tuple[str, list[tuple[int, str, int, int]]]] = []
    finished = set()
    for row in reader:
        locus = f"line {reader.line_num}"
        qid = row["question_id"]
        if qid is None or qid == "":
            raise ParseError("empty question_id", locus)
        if not groups or groups[-1][0] != qid:
            if qid in finished:
                raise ParseError(f"rows for question {qid!r} are not contiguous", locus)
            if groups:
                finished.add(groups[-1][0])
            groups.append((qid, []))
        idx = _parse_int(row["option_index"], locus)
        expected = len(groups[-1][1])
        if idx != expected:
            raise ParseError(f"option_index {idx} out of order, expected {expected}", locus)
        groups[-1][1].append(
            (idx, row["option_label"] or "", _parse_int(row["human_count"], locus), _parse_int(row["agent_count"], locus))
        )
    questions = [
        QuestionRecord(
            question_id=qid,
            options=tuple(r[1] for r in rows),
            human_counts=tuple(r[2] for r in rows),
            agent_counts=tuple(r[3] for r in rows),
        )
        for qid, rows in groups
    ]
    return Survey("", questions)


def read_survey(stream: IO[bytes] | IO[str] | bytes | str, format: str = "json") -> Survey:
    """Read a survey document (JSON or long-format CSV)."""
    if hasattr(stream, "read"):
        data = stream.read()
    else:
        data = stream
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"not valid UTF-8 ({e.reason})", f"byte {e.start}") from None
    if format == "json":
        survey = _survey_from_json(data)
    elif format == "csv":
        survey = _survey_from_csv(data)
    else:
        raise ValueError(f"unknown input format {format!r}")
    return survey


def parse_survey(stream, format: str = "json") -> list[QuestionRecord]:
    return read_survey(stream, format).questions


def survey_to_csv(survey: Survey) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for q in survey.questions:
        for i, label in enumerate(q.options):
            w.writerow([q.question_id, i, label, q.human_counts[i], q.agent_counts[i]])
    return buf.getvalue()
