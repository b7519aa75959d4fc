"""Recency weighting, the two metric bundles, and top-k selection."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from helpers import make_corpus
from oignon.corpus import Work, build_index
from oignon.ranking import (
    BranchMetrics,
    RecencyParams,
    RootMetrics,
    rank_branch_candidate,
    rank_root_candidate,
    recency_weight,
    select_top_k,
)

PARAMS = RecencyParams(half_life=4.0, reference_year=2026)


# ---------------------------------------------------------------------------
# Recency curve
# ---------------------------------------------------------------------------


def test_weight_at_half_life_is_one_plus_ln_two():
    assert recency_weight(4.0, PARAMS) == pytest.approx(1.0 + math.log(2.0), abs=1e-12)


def test_weight_clamps_below_one_year():
    expected = 1.0 + math.log(5.0)  # h=4 at the clamp: 1 + ln(1 + 4/1)
    for t in (0.0, 0.25, 0.5, 1.0):
        assert recency_weight(t, PARAMS) == pytest.approx(expected, abs=1e-12)


def test_weight_other_half_life():
    params = RecencyParams(half_life=2.0, reference_year=2026)
    assert recency_weight(2.0, params) == pytest.approx(1.0 + math.log(2.0), abs=1e-12)
    assert recency_weight(8.0, params) == pytest.approx(1.0 + math.log(1.25), abs=1e-12)


@given(st.floats(min_value=0.0, max_value=200.0), st.floats(min_value=0.0, max_value=200.0))
def test_weight_monotone_non_increasing(a, b):
    lo, hi = min(a, b), max(a, b)
    assert recency_weight(lo, PARAMS) >= recency_weight(hi, PARAMS)


@given(st.floats(min_value=0.0, max_value=1e6))
def test_weight_stays_above_floor(t):
    assert recency_weight(t, PARAMS) > 1.0


def test_half_life_must_be_positive():
    with pytest.raises(ValueError):
        RecencyParams(half_life=0.0)
    with pytest.raises(ValueError):
        RecencyParams(half_life=-1.0)


# ---------------------------------------------------------------------------
# Root metrics
# ---------------------------------------------------------------------------


def _root_fixture():
    # Seeds S1, S2; candidate C.  Derived by hand:
    #   cited: C is referenced by S1 only -> 1
    #   cocited: citers(C)={S1,T1,T2}; with S1 {T1,T2}=2, with S2 {T2}=1 -> 3
    #   cociting: refs(C)={X}; with S1 {C,X} shares X -> 1, with S2 {Y} -> 0
    return [
        Work(id="C", referenced_works=frozenset({"X"})),
        Work(id="S1", referenced_works=frozenset({"C", "X"})),
        Work(id="S2", referenced_works=frozenset({"Y"})),
        Work(id="T1", referenced_works=frozenset({"C", "S1"})),
        Work(id="T2", referenced_works=frozenset({"C", "S1", "S2"})),
    ]


def test_root_metrics_hand_worked_example():
    index = build_index(_root_fixture())
    metrics = rank_root_candidate("C", ["S1", "S2"], index)
    assert metrics == RootMetrics(
        candidate="C", cocited_count=3, cociting_count=1, cited_count=1, total_rank=5
    )
    assert isinstance(metrics.total_rank, int)


def test_root_metrics_empty_seed_list():
    index = build_index(_root_fixture())
    metrics = rank_root_candidate("C", [], index)
    assert metrics.total_rank == 0
    assert (metrics.cited_count, metrics.cocited_count, metrics.cociting_count) == (0, 0, 0)


def test_root_metrics_match_oracle_on_random_corpora():
    for seed in range(8):
        works = make_corpus(random.Random(seed).randint(5, 35), seed=seed + 100)
        index = build_index(works)
        citers = oracles.citers_map(works)
        source = max(works, key=lambda w: len(w.referenced_works)).id
        seeds = sorted(index.references_of(source))
        for work in works:
            got = rank_root_candidate(work.id, seeds, index)
            cited, cocited, cociting, total = oracles.root_metrics(works, work.id, seeds)
            assert (got.cited_count, got.cocited_count, got.cociting_count) == (
                cited,
                cocited,
                cociting,
            ), f"corpus seed {seed}, candidate {work.id}"
            assert got.total_rank == total
        assert citers  # corpus generator always links something


# ---------------------------------------------------------------------------
# Branch metrics
# ---------------------------------------------------------------------------


def _branch_fixture():
    # Source S with citers B1, B2 as seeds; candidate C.
    #   citing: C references B1 only -> 1
    #   cociting: refs(C) & refs(S) = {R} -> 1
    #   weighted: T1 (2024, t=2) cites both -> 1+ln3; T2 (no year) -> 1.0
    return [
        Work(id="S", referenced_works=frozenset({"R", "Q"})),
        Work(id="B1", publication_year=2020, referenced_works=frozenset({"S"})),
        Work(id="B2", publication_year=2021, referenced_works=frozenset({"S"})),
        Work(id="C", publication_year=2022, referenced_works=frozenset({"B1", "R"})),
        Work(id="T1", publication_year=2024, referenced_works=frozenset({"C", "S"})),
        Work(id="T2", publication_year=None, referenced_works=frozenset({"C", "S"})),
    ]


def test_branch_metrics_hand_worked_example():
    index = build_index(_branch_fixture())
    metrics = rank_branch_candidate("C", ["B1", "B2"], "S", index, PARAMS)
    assert metrics.citing_count == 1
    assert metrics.cociting_count == 1
    expected_weighted = (1.0 + math.log(3.0)) + 1.0
    assert metrics.weighted_cocited == pytest.approx(expected_weighted, abs=1e-12)
    assert metrics.total_rank == pytest.approx(2.0 + expected_weighted, abs=1e-12)


def test_unknown_year_cociter_contributes_exactly_one():
    works = [
        Work(id="S"),
        Work(id="C"),
        Work(id="T", publication_year=None, referenced_works=frozenset({"C", "S"})),
    ]
    metrics = rank_branch_candidate("C", [], "S", build_index(works), PARAMS)
    assert metrics.weighted_cocited == 1.0
    assert metrics.total_rank == 1.0


def test_branch_metrics_match_oracle_on_random_corpora():
    for seed in range(8):
        works = make_corpus(random.Random(seed).randint(5, 35), seed=seed + 200)
        index = build_index(works)
        citers = oracles.citers_map(works)
        source = max(
            works, key=lambda w: (len(citers.get(w.id, set())), w.id)
        ).id
        seeds = sorted(citers.get(source, set()))[:10]
        for work in works:
            if work.id == source:
                continue
            got = rank_branch_candidate(work.id, seeds, source, index, PARAMS)
            citing, cociting, weighted, total = oracles.branch_metrics(
                works, work.id, seeds, source, PARAMS.half_life, PARAMS.reference_year
            )
            assert (got.citing_count, got.cociting_count) == (citing, cociting)
            assert got.weighted_cocited == pytest.approx(weighted, abs=1e-9)
            assert got.total_rank == pytest.approx(total, abs=1e-9)


# ---------------------------------------------------------------------------
# Top-k selection
# ---------------------------------------------------------------------------


def _index_with_counts(counts: dict[str, int]):
    return build_index(
        [Work(id=wid, global_citation_count=c) for wid, c in counts.items()]
    )


def test_select_top_k_orders_by_rank_then_citations_then_id():
    index = _index_with_counts({"A": 5, "B": 9, "C": 9, "D": 1})
    metrics = [
        RootMetrics("A", 0, 0, 3, 3),
        RootMetrics("B", 0, 0, 2, 2),
        RootMetrics("C", 0, 0, 2, 2),
        RootMetrics("D", 0, 0, 2, 2),
    ]
    picked = [m.candidate for m in select_top_k(metrics, 4, index)]
    # A wins on rank; B and C tie on both rank and citations, so id decides;
    # D has the same rank but fewer citations.
    assert picked == ["A", "B", "C", "D"]


def test_select_top_k_drops_zero_ranks_even_below_k():
    index = _index_with_counts({"A": 1, "B": 2})
    metrics = [RootMetrics("A", 0, 0, 0, 0), RootMetrics("B", 0, 0, 1, 1)]
    assert [m.candidate for m in select_top_k(metrics, 5, index)] == ["B"]


def test_select_top_k_zero_k():
    index = _index_with_counts({"A": 1})
    assert select_top_k([RootMetrics("A", 1, 0, 0, 1)], 0, index) == []


def test_select_top_k_rejects_negative_k():
    with pytest.raises(ValueError):
        select_top_k([], -1, _index_with_counts({"A": 1}))


def test_select_top_k_input_order_irrelevant():
    works = make_corpus(30, seed=7)
    index = build_index(works)
    source = max(works, key=lambda w: len(w.referenced_works)).id
    seeds = sorted(index.references_of(source))
    metrics = [rank_root_candidate(w.id, seeds, index) for w in works if w.id != source]
    baseline = select_top_k(metrics, 10, index)
    for shuffle_seed in range(5):
        shuffled = list(metrics)
        random.Random(shuffle_seed).shuffle(shuffled)
        assert select_top_k(shuffled, 10, index) == baseline


def test_select_top_k_matches_oracle():
    works = make_corpus(30, seed=9)
    index = build_index(works)
    counts = {w.id: w.global_citation_count for w in works}
    source = max(works, key=lambda w: len(w.referenced_works)).id
    seeds = sorted(index.references_of(source))
    metrics = [rank_root_candidate(w.id, seeds, index) for w in works if w.id != source]
    scored = [(m.candidate, float(m.total_rank)) for m in metrics]
    for k in (0, 1, 3, 10, 100):
        got = [m.candidate for m in select_top_k(metrics, k, index)]
        assert got == oracles.top_k(scored, k, counts)


def test_branch_metrics_accepted_too():
    index = _index_with_counts({"A": 1})
    picked = select_top_k([BranchMetrics("A", 1, 0, 0.5, 1.5)], 1, index)
    assert picked[0].total_rank == 1.5
