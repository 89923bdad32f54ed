"""Ranking alignment: Top Rank Match with bootstrap tie groups, and Spearman RC."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import ConfidenceInterval, RngStream, bootstrap_proportions, percentile_intervals
from .model import ResponseDistribution, rank_counts


@dataclass(frozen=True)
class TopGroup:
    member_indices: frozenset[int]
    anchor_index: int
    intervals: tuple[ConfidenceInterval, ...]

    def __contains__(self, index: int) -> bool:
        return index in self.member_indices


@dataclass(frozen=True)
class RankingScores:
    trm: int
    rc_raw: float
    rc_norm: float
    top_group: TopGroup
    rc_degenerate: bool = False


def group_from_intervals(counts, intervals: list[ConfidenceInterval]) -> TopGroup:
    c = np.asarray(counts)
    anchor = int(np.argmax(c))
    anchor_ci = intervals[anchor]
    members = {i for i, ci in enumerate(intervals) if ci.overlaps(anchor_ci)}
    # exact co-maxima are always tied with the anchor
    members.update(int(i) for i in np.flatnonzero(c == c[anchor]))
    return TopGroup(frozenset(members), anchor, tuple(intervals))


def top_group(human: ResponseDistribution, rng: RngStream, n_boot: int = 1000, level: float = 0.95) -> TopGroup:
    """Options whose bootstrap CI overlaps the CI of the most-voted human option.

    Membership is direct overlap with the anchor only; overlaps are not chained.
    """
    samples = bootstrap_proportions(rng, human.counts, n_boot)
    return group_from_intervals(human.counts, percentile_intervals(samples, level))


def trm(human: ResponseDistribution, agent: ResponseDistribution, group: TopGroup) -> int:
    if human.k != agent.k:
        raise ValueError(f"option count mismatch: {human.k} vs {agent.k}")
    a = np.asarray(agent.counts)
    tied_top = np.flatnonzero(a == a.max())
    return int(any(int(i) in group.member_indices for i in tied_top))


def rank_correlation(human: ResponseDistribution, agent: ResponseDistribution) -> tuple[float, float, bool]:
    """Spearman correlation on midranks, returned as ``(rc_raw, rc_norm, degenerate)``.

    Pearson correlation of the two midrank vectors, which reduces to
    ``1 - 6 sum(d^2) / (n (n^2 - 1))`` when neither side has ties. If either
    side has no rank variance the coefficient is undefined; we return 0 and
    flag it.
    """
    if human.k != agent.k:
        raise ValueError(f"option count mismatch: {human.k} vs {agent.k}")
    rh = rank_counts(human.counts).as_array()
    ra = rank_counts(agent.counts).as_array()
    dh = rh - rh.mean()
    da = ra - ra.mean()
    sh = float(np.dot(dh, dh))
    sa = float(np.dot(da, da))
    if sh == 0.0 or sa == 0.0:
        return 0.0, 0.5, True
    rc = float(np.dot(dh, da) / np.sqrt(sh * sa))
    rc = min(1.0, max(-1.0, rc))
    return rc, (rc + 1.0) / 2.0, False


def ranking_scores(
    human: ResponseDistribution,
    agent: ResponseDistribution,
    rng: RngStream,
    n_boot: int = 1000,
    level: float = 0.95,
) -> RankingScores:
    group = top_group(human, rng, n_boot, level)
    rc_raw, rc_norm, degenerate = rank_correlation(human, agent)
    return RankingScores(trm(human, agent, group), rc_raw, rc_norm, group, degenerate)
