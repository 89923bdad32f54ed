"""Non-parametric baseline simulators: uniform, Dirichlet-Multinomial, discretized normal."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .kernel import RngStream, multinomial_sample
from .model import QuestionRecord, Survey, ValidationError

KINDS = ("uniform", "dirichlet", "normal")
MEAN_MODES = ("midpoint", "human_mean")


@dataclass(frozen=True)
class BaselineSpec:
    kind: str
    n_agents: int | None = None  # None: match each question's human total
    dirichlet_alpha: float = 1.0
    normal_mean_mode: str = "midpoint"
    normal_std_factor: float = 0.25

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown baseline kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.n_agents is not None and self.n_agents < 1:
            raise ValidationError(f"n_agents must be >= 1, got {self.n_agents}")
        if not self.dirichlet_alpha > 0:
            raise ValidationError(f"dirichlet_alpha must be > 0, got {self.dirichlet_alpha}")
        if self.normal_mean_mode not in MEAN_MODES:
            raise ValidationError(f"unknown normal mean mode {self.normal_mean_mode!r}")
        if not self.normal_std_factor > 0:
            raise ValidationError(f"normal_std_factor must be > 0, got {self.normal_std_factor}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_agents"] = "match-human" if self.n_agents is None else self.n_agents
        return d


def generate_baseline(spec: BaselineSpec, question: QuestionRecord, rng: RngStream) -> np.ndarray:
    k = question.k
    n = spec.n_agents if spec.n_agents is not None else sum(question.human_counts)
    if spec.kind == "uniform":
        return multinomial_sample(rng, n, np.full(k, 1.0 / k))
    if spec.kind == "dirichlet":
        p = rng.generator.dirichlet(np.full(k, spec.dirichlet_alpha))
        # Dirichlet draws can underflow to exact zeros at tiny alpha; renormalise
        return multinomial_sample(rng, n, p / p.sum())
    if spec.normal_mean_mode == "midpoint":
        mu = (k - 1) / 2.0
    else:
        h = np.asarray(question.human_counts, dtype=float)
        mu = float(np.dot(np.arange(k), h) / h.sum())
    sigma = spec.normal_std_factor * k
    x = rng.generator.normal(mu, sigma, size=n)
    choice = np.clip(np.rint(x), 0, k - 1).astype(np.int64)
    return np.bincount(choice, minlength=k).astype(np.int64)


def baseline_survey(survey: Survey, spec: BaselineSpec, rng: RngStream) -> Survey:
    """Copy of ``survey`` with agent counts replaced by baseline draws, one substream per question."""
    questions = [
        q.with_agent_counts(tuple(int(v) for v in generate_baseline(spec, q, rng.substream(q.question_id))))
        for q in survey.questions
    ]
    meta = dict(survey.meta)
    meta["baseline"] = {**spec.to_dict(), "seed": rng.seed, "rng": rng.algorithm_id}
    return Survey(survey.survey_id, questions, meta)
