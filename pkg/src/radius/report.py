"""Survey-level aggregation, paired comparison of runs, and report serialization."""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .distribution import DistributionScores, distribution_scores
from .kernel import ALGORITHM_ID, ConfidenceInterval, RngStream, student_t_sf2
from .model import QuestionRecord, RadiusError, ValidationError
from .ranking import RankingScores, TopGroup, ranking_scores

METRICS = ("TRM", "RC_norm", "TVD", "DH", "CV", "JSD", "WD")
HIGHER_IS_BETTER = {"TRM": True, "RC_norm": True, "TVD": False, "DH": True, "CV": False, "JSD": False, "WD": False}
_ALIASES = {m.lower(): m for m in METRICS} | {"rc": "RC_norm"}

ORDINAL_NOTE = "WD treats options as ordinal positions 0..k-1 with unit spacing"
DEGENERATE_RC = "rank correlation undefined (an option ranking has no variance); RC set to 0, RC_norm 0.5"


class ReportError(RadiusError):
    pass


def parse_metrics(spec: str | Iterable[str] | None) -> tuple[str, ...]:
    """Normalise a metric selector ("all", "trm,tvd", or a list of names)."""
    if spec is None:
        return METRICS
    names = spec.split(",") if isinstance(spec, str) else list(spec)
    names = [n.strip() for n in names if n.strip()]
    if not names or [n.lower() for n in names] == ["all"]:
        return METRICS
    chosen = set()
    for n in names:
        if n.lower() not in _ALIASES:
            raise ValidationError(f"unknown metric {n!r}; choose from {', '.join(METRICS)}", field="metrics")
        chosen.add(_ALIASES[n.lower()])
    return tuple(m for m in METRICS if m in chosen)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    n_boot: int = 1000
    ci_level: float = 0.95
    alpha: float = 0.05
    metrics: tuple[str, ...] = METRICS
    rc_degenerate: str = "fallback"

    def __post_init__(self):
        if self.n_boot < 2:
            raise ValidationError(f"n_boot must be at least 2, got {self.n_boot}", field="n_boot")
        if not 0 < self.ci_level < 1:
            raise ValidationError(f"ci_level must be in (0, 1), got {self.ci_level}", field="ci_level")
        if not 0 < self.alpha < 1:
            raise ValidationError(f"alpha must be in (0, 1), got {self.alpha}", field="alpha")
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}", field="seed")
        if self.rc_degenerate not in ("fallback", "exclude"):
            raise ValidationError(f"rc_degenerate must be 'fallback' or 'exclude', got {self.rc_degenerate!r}")
        object.__setattr__(self, "metrics", parse_metrics(self.metrics))


@dataclass(frozen=True)
class QuestionAlignment:
    question_id: str
    ranking: RankingScores
    distribution: DistributionScores
    warnings: tuple[str, ...] = ()

    def score(self, metric: str) -> float:
        r, d = self.ranking, self.distribution
        return {
            "TRM": float(r.trm),
            "RC_norm": r.rc_norm,
            "TVD": d.tvd,
            "DH": float(d.dh),
            "CV": d.cv,
            "JSD": d.jsd,
            "WD": d.wd,
        }[metric]

    def to_dict(self) -> dict:
        r, d, g = self.ranking, self.distribution, self.ranking.top_group
        return {
            "question_id": self.question_id,
            "ranking": {
                "trm": r.trm,
                "rc_raw": r.rc_raw,
                "rc_norm": r.rc_norm,
                "rc_degenerate": r.rc_degenerate,
                "top_group": {
                    "anchor_index": g.anchor_index,
                    "member_indices": sorted(g.member_indices),
                    "intervals": [[ci.lower, ci.upper] for ci in g.intervals],
                },
            },
            "distribution": {
                "tvd": d.tvd,
                "dh": d.dh,
                "dh_p_value": d.dh_p_value,
                "dh_statistic": d.dh_statistic,
                "dh_df": d.dh_df,
                "dh_degenerate": d.dh_degenerate,
                "cv": d.cv,
                "jsd": d.jsd,
                "wd": d.wd,
            },
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, doc: dict, level: float) -> QuestionAlignment:
        r, d = doc["ranking"], doc["distribution"]
        g = r["top_group"]
        group = TopGroup(
            frozenset(int(i) for i in g["member_indices"]),
            int(g["anchor_index"]),
            tuple(ConfidenceInterval(float(lo), float(hi), level) for lo, hi in g["intervals"]),
        )
        warnings = tuple(doc.get("warnings", ()))
        ranking = RankingScores(int(r["trm"]), float(r["rc_raw"]), float(r["rc_norm"]), group, bool(r["rc_degenerate"]))
        dist_warnings = tuple(w for w in warnings if w != DEGENERATE_RC)
        distribution = DistributionScores(
            tvd=float(d["tvd"]),
            dh=int(d["dh"]),
            dh_p_value=float(d["dh_p_value"]),
            dh_statistic=float(d["dh_statistic"]),
            dh_df=int(d["dh_df"]),
            cv=float(d["cv"]),
            jsd=float(d["jsd"]),
            wd=float(d["wd"]),
            dh_degenerate=bool(d["dh_degenerate"]),
            warnings=dist_warnings,
        )
        return cls(str(doc["question_id"]), ranking, distribution, warnings)


@dataclass(frozen=True)
class SurveyReport:
    survey_id: str
    n_questions: int
    means: dict[str, float | None]
    per_question: tuple[QuestionAlignment, ...]
    run_meta: dict[str, Any] = field(default_factory=dict)

    @property
    def question_ids(self) -> list[str]:
        return [q.question_id for q in self.per_question]

    def scores(self, metric: str) -> np.ndarray:
        return np.array([q.score(metric) for q in self.per_question], dtype=float)

    def to_dict(self) -> dict:
        return {
            "survey_id": self.survey_id,
            "n_questions": self.n_questions,
            "means": dict(self.means),
            "per_question": [q.to_dict() for q in self.per_question],
            "run_meta": self.run_meta,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> SurveyReport:
        try:
            meta = doc["run_meta"]
            level = float(meta["ci_level"])
            return cls(
                survey_id=str(doc["survey_id"]),
                n_questions=int(doc["n_questions"]),
                means={k: (None if v is None else float(v)) for k, v in doc["means"].items()},
                per_question=tuple(QuestionAlignment.from_dict(q, level) for q in doc["per_question"]),
                run_meta=meta,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ReportError(f"not a valid report document: {e!r}") from None


def evaluate_question(question: QuestionRecord, config: RunConfig, rng: RngStream) -> QuestionAlignment:
    human, agent = question.human, question.agent
    ranking = ranking_scores(human, agent, rng, config.n_boot, config.ci_level)
    dist = distribution_scores(human, agent, config.alpha)
    warnings = list(dist.warnings)
    if ranking.rc_degenerate:
        warnings.append(DEGENERATE_RC)
    return QuestionAlignment(question.question_id, ranking, dist, tuple(warnings))


def survey_means(per_question: Sequence[QuestionAlignment], metrics: Sequence[str] = METRICS, rc_degenerate: str = "fallback"):
    means: dict[str, float | None] = {}
    for m in metrics:
        rows = per_question
        if m == "RC_norm" and rc_degenerate == "exclude":
            rows = [q for q in per_question if not q.ranking.rc_degenerate]
        means[m] = math.fsum(q.score(m) for q in rows) / len(rows) if rows else None
    return means


def evaluate_survey(
    questions: Sequence[QuestionRecord],
    config: RunConfig | None = None,
    rng: RngStream | None = None,
    *,
    survey_id: str = "",
    jobs: int = 1,
    extra_meta: dict | None = None,
) -> SurveyReport:
    """Score every question and average each metric over the survey.

    Each question draws from its own substream keyed by question id, so the
    result does not depend on ``jobs`` or on question order.
    """
    config = config or RunConfig()
    if rng is None:
        rng = RngStream(config.seed)
    if not questions:
        raise ValidationError("survey has no questions")

    def one(q: QuestionRecord) -> QuestionAlignment:
        try:
            return evaluate_question(q, config, rng.substream(q.question_id))
        except ValidationError:
            raise
        except (ValueError, ArithmeticError) as e:
            raise ValidationError(str(e), q.question_id) from e

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_question = tuple(pool.map(one, questions))
    else:
        per_question = tuple(one(q) for q in questions)

    meta: dict[str, Any] = {
        "seed": rng.seed,
        "rng": rng.algorithm_id,
        "n_boot": config.n_boot,
        "ci_level": config.ci_level,
        "ci_method": "percentile",
        "alpha": config.alpha,
        "metrics": list(config.metrics),
        "rc_degenerate": config.rc_degenerate,
        "jsd_log_base": "natural",
        "chi_square": "no continuity correction; all-zero columns dropped",
        "wd_assumption": ORDINAL_NOTE,
        "cv_direction": "lower is better",
        "tool_version": __version__,
    }
    if extra_meta:
        meta.update(extra_meta)
    return SurveyReport(
        survey_id=survey_id,
        n_questions=len(per_question),
        means=survey_means(per_question, config.metrics, config.rc_degenerate),
        per_question=per_question,
        run_meta=meta,
    )


@dataclass(frozen=True)
class PairedComparison:
    metric_name: str
    mean_diff: float
    t_statistic: float
    df: int
    p_value: float
    significant: bool
    zero_variance: bool = False

    def to_dict(self) -> dict:
        return {
            "metric_name": self.metric_name,
            "mean_diff": self.mean_diff,
            "t_statistic": self.t_statistic,
            "df": self.df,
            "p_value": self.p_value,
            "significant": self.significant,
            "zero_variance": self.zero_variance,
        }


def paired_t_test(a: Sequence[float], b: Sequence[float], alpha: float = 0.05, metric_name: str = "") -> PairedComparison:
    """Paired t-test of ``a - b`` against zero mean (sample sd, n - 1 degrees of freedom)."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    n = d.size
    if n < 2:
        raise ValidationError(f"paired t-test needs at least 2 pairs, got {n}")
    mean = math.fsum(d) / n
    sd = math.sqrt(math.fsum((d - mean) ** 2) / (n - 1))
    # spread below rounding noise of the mean counts as no spread
    if sd <= 1e-12 * max(1.0, abs(mean)):
        if abs(mean) <= 1e-12:
            return PairedComparison(metric_name, 0.0, 0.0, n - 1, 1.0, False, True)
        return PairedComparison(metric_name, mean, 0.0, n - 1, 0.0, True, True)
    t = mean / (sd / math.sqrt(n))
    p = student_t_sf2(t, n - 1)
    return PairedComparison(metric_name, mean, t, n - 1, p, p < alpha)


def paired_compare(report_a: SurveyReport, report_b: SurveyReport, alpha: float = 0.05) -> list[PairedComparison]:
    ids_a, ids_b = report_a.question_ids, report_b.question_ids
    if ids_a != ids_b:
        only = sorted(set(ids_a) ^ set(ids_b))
        if only:
            raise ReportError(f"question sets differ; symmetric difference: {', '.join(only)}")
        raise ReportError("question sets match but are in a different order")
    metrics = [m for m in METRICS if m in report_a.means and m in report_b.means]
    return [paired_t_test(report_a.scores(m), report_b.scores(m), alpha, m) for m in metrics]


# -- rendering --------------------------------------------------------------

_ARROW = {True: "↑", False: "↓"}


def _fmt(x: float | None, digits: int = 3) -> str:
    return "n/a" if x is None else f"{x:.{digits}f}"


def render_report(report: SurveyReport, format: str = "json") -> bytes:
    if format == "json":
        return (json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    if format != "markdown":
        raise ValueError(f"unknown report format {format!r}")
    metrics = [m for m in METRICS if m in report.means]
    meta = report.run_meta
    lines = [
        f"# Alignment report: {report.survey_id or '(unnamed survey)'}",
        "",
        f"{report.n_questions} question(s); seed {meta.get('seed')}, bootstrap n={meta.get('n_boot')}, "
        f"CI level {meta.get('ci_level')}, alpha {meta.get('alpha')}.",
        "",
        "## Survey-level alignment",
        "",
        "| Metric | Mean |",
        "|---|---|",
    ]
    lines += [f"| {m} ({_ARROW[HIGHER_IS_BETTER[m]]}) | {_fmt(report.means[m])} |" for m in metrics]
    lines += [
        "",
        "## Per-question scores",
        "",
        "| Question | " + " | ".join(f"{m} {_ARROW[HIGHER_IS_BETTER[m]]}" for m in metrics) + " |",
        "|---|" + "---|" * len(metrics),
    ]
    for q in report.per_question:
        lines.append(f"| {q.question_id} | " + " | ".join(_fmt(q.score(m)) for m in metrics) + " |")
    lines += ["", "## Warnings", ""]
    warned = [(q.question_id, w) for q in report.per_question for w in q.warnings]
    lines += [f"- {qid}: {w}" for qid, w in warned] if warned else ["None."]
    lines += ["", "## Notes", "", f"- {ORDINAL_NOTE}.", "- JSD uses the natural logarithm.", "- CV: lower is better."]
    return ("\n".join(lines) + "\n").encode("utf-8")


def render_comparison(results: Sequence[PairedComparison], format: str = "json", alpha: float = 0.05) -> bytes:
    if format == "json":
        doc = {"alpha": alpha, "comparisons": [r.to_dict() for r in results]}
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    if format != "markdown":
        raise ValueError(f"unknown report format {format!r}")
    lines = [
        f"| Metric | Mean diff (A-B) | t | df | p | sig. (alpha={alpha}) |",
        "|---|---|---|---|---|---|",
    ]
    for r in results:
        star = "*" if r.significant else ""
        t = f"{r.t_statistic:.3f}" + (" (zero variance)" if r.zero_variance else "")
        lines.append(f"| {r.metric_name} | {r.mean_diff:.4f} | {t} | {r.df} | {r.p_value:.4g} | {star} |")
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_report(data: bytes | str) -> SurveyReport:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ReportError(f"report is not valid JSON (line {e.lineno}): {e.msg}") from None
    if not isinstance(doc, dict):
        raise ReportError("report must be a JSON object")
    return SurveyReport.from_dict(doc)


def with_meta(report: SurveyReport, **meta) -> SurveyReport:
    return replace(report, run_meta={**report.run_meta, **meta})
