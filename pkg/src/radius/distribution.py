"""Distribution alignment (TVD, chi-square homogeneity) and comparison metrics (CV, JSD, WD)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernel import chi_square_sf
from .model import ResponseDistribution

LOW_EXPECTED_COUNT = 5.0


@dataclass(frozen=True)
class HomogeneityResult:
    dh: int
    p_value: float
    statistic: float
    df: int
    degenerate: bool = False
    min_expected: float = math.inf

    def __iter__(self):
        return iter((self.dh, self.p_value, self.statistic, self.df))


@dataclass(frozen=True)
class DistributionScores:
    tvd: float
    dh: int
    dh_p_value: float
    dh_statistic: float
    dh_df: int
    cv: float
    jsd: float
    wd: float
    dh_degenerate: bool = False
    warnings: tuple[str, ...] = field(default=())


def _check(human: ResponseDistribution, agent: ResponseDistribution) -> None:
    if human.k != agent.k:
        raise ValueError(f"option count mismatch: {human.k} vs {agent.k}")


def tvd(human: ResponseDistribution, agent: ResponseDistribution) -> float:
    _check(human, agent)
    return float(0.5 * np.abs(human.p() - agent.p()).sum())


def _chi_square(human: ResponseDistribution, agent: ResponseDistribution):
    table = np.array([human.counts, agent.counts], dtype=float)
    table = table[:, table.sum(axis=0) > 0]
    n = table.sum()
    if table.shape[1] < 2:
        return 0.0, 0, n, math.inf
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / n
    stat = float(((table - expected) ** 2 / expected).sum())
    return stat, table.shape[1] - 1, n, float(expected.min())


def homogeneity_test(human: ResponseDistribution, agent: ResponseDistribution, alpha: float = 0.05) -> HomogeneityResult:
    """Chi-square test of homogeneity on the 2 x k table of raw counts.

    No continuity correction. Columns empty in both rows are dropped; with
    fewer than two columns left the test is degenerate and reports dh=1, p=1,
    df=0.
    """
    _check(human, agent)
    stat, df, _, min_expected = _chi_square(human, agent)
    if df == 0:
        return HomogeneityResult(1, 1.0, 0.0, 0, degenerate=True)
    p = chi_square_sf(stat, df)
    return HomogeneityResult(int(p >= alpha), p, stat, df, min_expected=min_expected)


def cramers_v(human: ResponseDistribution, agent: ResponseDistribution) -> float:
    """Cramer's V of the human/agent x option table; lower means more similar."""
    _check(human, agent)
    stat, df, n, _ = _chi_square(human, agent)
    if df == 0:
        return 0.0
    return float(min(1.0, math.sqrt(stat / n)))


def _kl(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def jsd(human: ResponseDistribution, agent: ResponseDistribution) -> float:
    """Jensen-Shannon divergence in nats, bounded by ln 2."""
    _check(human, agent)
    p, q = human.p(), agent.p()
    m = 0.5 * (p + q)
    value = 0.5 * _kl(p, m) + 0.5 * _kl(q, m)
    return float(min(max(value, 0.0), math.log(2)))


def wasserstein_1d(human: ResponseDistribution, agent: ResponseDistribution) -> float:
    """Earth mover's distance with options at unit-spaced positions 0..k-1."""
    _check(human, agent)
    diff = np.cumsum(human.p())[:-1] - np.cumsum(agent.p())[:-1]
    return float(np.abs(diff).sum())


def distribution_scores(human: ResponseDistribution, agent: ResponseDistribution, alpha: float = 0.05) -> DistributionScores:
    h = homogeneity_test(human, agent, alpha)
    warnings = []
    if h.degenerate:
        warnings.append("homogeneity test degenerate: fewer than 2 non-empty options")
    elif h.min_expected < LOW_EXPECTED_COUNT:
        warnings.append(f"low expected count in chi-square table (min {h.min_expected:.3g} < {LOW_EXPECTED_COUNT:g})")
    return DistributionScores(
        tvd=tvd(human, agent),
        dh=h.dh,
        dh_p_value=h.p_value,
        dh_statistic=h.statistic,
        dh_df=h.df,
        cv=cramers_v(human, agent),
        jsd=jsd(human, agent),
        wd=wasserstein_1d(human, agent),
        dh_degenerate=h.degenerate,
        warnings=tuple(warnings),
    )
