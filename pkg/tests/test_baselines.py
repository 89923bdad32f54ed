import numpy as np
import pytest

from radius.baselines import BaselineSpec, baseline_survey, generate_baseline
from radius.distribution import homogeneity_test
from radius.kernel import RngStream
from radius.model import QuestionRecord, ValidationError, to_distribution


def _q(human, qid="q"):
    k = len(human)
    return QuestionRecord(qid, tuple(f"o{i}" for i in range(k)), tuple(human), tuple([1] * k))


def test_uniform_concentration():
    q = _q([1, 1, 1, 1])
    for s in range(20):
        x = generate_baseline(BaselineSpec("uniform", n_agents=4000), q, RngStream(s))
        assert x.sum() == 4000
        assert np.all(np.abs(x - 1000) <= 200)


def test_normal_collapses_to_midpoint():
    x = generate_baseline(BaselineSpec("normal", n_agents=500, normal_std_factor=1e-9), _q([1] * 5), RngStream(3))
    assert list(x) == [0, 0, 500, 0, 0]


def test_normal_human_mean_mode():
    # human mean at index 3 exactly
    x = generate_baseline(
        BaselineSpec("normal", n_agents=100, normal_mean_mode="human_mean", normal_std_factor=1e-9),
        _q([0, 0, 0, 7, 0]),
        RngStream(3),
    )
    assert list(x) == [0, 0, 0, 100, 0]


def test_dirichlet_large_alpha_near_uniform():
    for s in range(10):
        x = generate_baseline(BaselineSpec("dirichlet", n_agents=30000, dirichlet_alpha=1e6), _q([1, 1, 1]), RngStream(s))
        assert np.all(np.abs(x - 10000) <= 400)


@pytest.mark.parametrize("kind", ["uniform", "dirichlet", "normal"])
def test_sums_and_determinism(kind):
    q = _q([30, 236, 373, 17])
    spec = BaselineSpec(kind)
    a = generate_baseline(spec, q, RngStream(11))
    b = generate_baseline(spec, q, RngStream(11))
    assert a.sum() == sum(q.human_counts)
    assert np.array_equal(a, b)
    c = generate_baseline(BaselineSpec(kind, n_agents=17), q, RngStream(11))
    assert c.sum() == 17 and c.min() >= 0


@pytest.mark.parametrize(
    "kw",
    [
        {"kind": "gaussian"},
        {"kind": "uniform", "n_agents": 0},
        {"kind": "dirichlet", "dirichlet_alpha": 0},
        {"kind": "normal", "normal_std_factor": -1},
        {"kind": "normal", "normal_mean_mode": "median"},
    ],
)
def test_spec_validation(kw):
    with pytest.raises(ValidationError):
        BaselineSpec(**kw)


@pytest.mark.parametrize("kind", ["uniform", "normal"])
def test_mirror_symmetry(kind):
    # The law of these samplers is invariant under reversing the options, so
    # mirrored draws pooled over seeds should be indistinguishable.
    human = [5, 40, 20, 9, 2]
    spec = BaselineSpec(kind, n_agents=200)
    forward = np.zeros(5, dtype=np.int64)
    mirrored = np.zeros(5, dtype=np.int64)
    for s in range(100):
        forward += generate_baseline(spec, _q(human), RngStream(s))
        mirrored += generate_baseline(spec, _q(human[::-1]), RngStream(10_000 + s))[::-1]
    res = homogeneity_test(to_distribution(forward), to_distribution(mirrored))
    assert res.p_value >= 0.001


def test_baseline_survey_keeps_humans(golden):
    out = baseline_survey(golden, BaselineSpec("uniform"), RngStream(5))
    for before, after in zip(golden.questions, out.questions):
        assert after.human_counts == before.human_counts
        assert sum(after.agent_counts) == sum(before.human_counts)
    assert out.meta["baseline"]["seed"] == 5
    assert out.meta["baseline"]["kind"] == "uniform"
    assert out.meta["baseline"]["n_agents"] == "match-human"


def test_baseline_per_question_streams_are_order_free(golden):
    from radius.model import Survey

    spec = BaselineSpec("dirichlet")
    a = baseline_survey(golden, spec, RngStream(9))
    rev = baseline_survey(Survey(golden.survey_id, golden.questions[::-1]), spec, RngStream(9))
    assert [q.agent_counts for q in a.questions] == [q.agent_counts for q in rev.questions[::-1]]
