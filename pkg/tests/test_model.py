import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from radius.model import (
    ParseError,
    QuestionRecord,
    ValidationError,
    parse_survey,
    rank_counts,
    read_survey,
    survey_to_csv,
    to_distribution,
)

counts_st = st.lists(st.integers(0, 500), min_size=2, max_size=10)


def _doc(**q):
    base = {"id": "q", "options": ["Yes", "No"], "human_counts": [766, 1457], "agent_counts": [301, 634]}
    base.update(q)
    return json.dumps({"survey_id": "s", "questions": [base]}).encode()


def test_parse_json_q4():
    (q,) = parse_survey(_doc(id="Q4"))
    assert q.question_id == "Q4"
    assert q.k == 2
    assert q.human_counts == (766, 1457)
    assert q.agent_counts == (301, 634)


def test_parse_length_mismatch_names_question():
    with pytest.raises(ValidationError, match="'Q9'") as exc:
        parse_survey(_doc(id="Q9", human_counts=[1, 2, 3]))
    assert exc.value.field == "human_counts"


def test_parse_empty_question_list():
    assert parse_survey(b'{"survey_id": "x", "questions": []}') == []


@pytest.mark.parametrize(
    "kw",
    [
        {"options": ["only"], "human_counts": [3], "agent_counts": [3]},
        {"human_counts": [0, 0]},
        {"agent_counts": [0, 0]},
        {"human_counts": [1, -1]},
        {"human_counts": [1.5, 2]},
    ],
)
def test_parse_invalid_records(kw):
    with pytest.raises(ValidationError):
        parse_survey(_doc(**kw))


def test_parse_malformed_json_has_locus():
    with pytest.raises(ParseError, match="line 2"):
        parse_survey(b'{"questions": [\n  {,}]}')


def test_duplicate_ids_rejected():
    doc = {"questions": [
        {"id": "a", "options": ["x", "y"], "human_counts": [1, 1], "agent_counts": [1, 1]},
        {"id": "a", "options": ["x", "y"], "human_counts": [1, 1], "agent_counts": [1, 1]},
    ]}
    with pytest.raises(ValidationError, match="duplicate"):
        parse_survey(json.dumps(doc))


def test_csv_roundtrip(golden):
    text = survey_to_csv(golden)
    again = read_survey(text, "csv")
    assert [q.question_id for q in again.questions] == [q.question_id for q in golden.questions]
    # csv carries no question text
    for a, b in zip(again.questions, golden.questions):
        assert (a.human_counts, a.agent_counts, a.options) == (b.human_counts, b.agent_counts, b.options)


def test_csv_non_contiguous_rows():
    text = (
        "question_id,option_index,option_label,human_count,agent_count\n"
        "a,0,x,1,1\nb,0,x,1,1\nb,1,y,1,1\na,1,y,1,1\n"
    )
    with pytest.raises(ParseError, match="line 5"):
        read_survey(text, "csv")


def test_csv_index_gap():
    text = "question_id,option_index,option_label,human_count,agent_count\na,0,x,1,1\na,2,y,1,1\n"
    with pytest.raises(ParseError, match="line 3"):
        read_survey(text, "csv")


def test_csv_bad_integer():
    text = "question_id,option_index,option_label,human_count,agent_count\na,0,x,one,1\n"
    with pytest.raises(ParseError, match="line 2"):
        read_survey(text, "csv")


def test_to_distribution():
    d = to_distribution([766, 1457])
    assert d.proportions == pytest.approx([0.34458, 0.65542], abs=1e-4)
    assert to_distribution([1, 1, 1, 1]).proportions == (0.25, 0.25, 0.25, 0.25)
    with pytest.raises(ValidationError, match="empty distribution"):
        to_distribution([0, 0])


@pytest.mark.parametrize(
    "counts, ranks",
    [
        ([2335, 2159, 273, 113, 27], [1, 2, 3, 4, 5]),
        ([405, 517, 13, 0, 0], [2, 1, 3, 4.5, 4.5]),
        ([7, 7, 7], [2, 2, 2]),
    ],
)
def test_rank_counts_examples(counts, ranks):
    assert list(rank_counts(counts).ranks) == ranks


@given(counts_st)
def test_rank_conservation(c):
    k = len(c)
    assert abs(sum(rank_counts(c).ranks) - k * (k + 1) / 2) < 1e-9


@given(counts_st)
def test_ranks_respect_order(c):
    r = rank_counts(c).ranks
    for i in range(len(c)):
        for j in range(len(c)):
            if c[i] > c[j]:
                assert r[i] < r[j]
            if c[i] == c[j]:
                assert r[i] == r[j]


@given(counts_st, st.randoms(use_true_random=False))
def test_rank_permutation_equivariance(c, rnd):
    perm = list(range(len(c)))
    rnd.shuffle(perm)
    permuted = [c[i] for i in perm]
    r = rank_counts(c).ranks
    assert list(rank_counts(permuted).ranks) == [r[i] for i in perm]


@given(counts_st.filter(lambda c: sum(c) > 0), st.integers(1, 50))
def test_proportions_scale_invariant(c, m):
    a = to_distribution(c).proportions
    b = to_distribution([m * x for x in c]).proportions
    assert a == pytest.approx(b, abs=1e-15)
    assert abs(sum(a) - 1) <= 1e-12


def test_question_record_is_immutable():
    q = QuestionRecord("a", ("x", "y"), (1, 2), (3, 4))
    with pytest.raises(AttributeError):
        q.question_id = "b"
