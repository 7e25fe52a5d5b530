import io
import itertools
import math
from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from passvalue.similarity import player_vectors, similar_players, similarity, write_similar
from passvalue.valuation import PlayerRating


def rating(pid, c, p, a, minutes=1000.0):
    return PlayerRating(pid, c, c * minutes / 90, minutes, p, a, int(p * minutes / 90))


def test_identical_player_scores_one():
    pool = [rating(1, 0.1, 50, 0.8), rating(2, 0.1, 50, 0.8), rating(3, 0.0, 20, 0.6)]
    assert similar_players(1, pool)[0] == (2, 1.0)


def test_opposite_corners_score_zero():
    pool = [rating(1, 0.0, 10, 0.5), rating(2, 0.2, 80, 0.9)]
    assert similar_players(1, pool) == [(2, 0.0)]


def test_three_player_bruteforce_ranking():
    pool = [rating(1, 0.05, 40, 0.70), rating(2, 0.10, 60, 0.85), rating(3, 0.02, 45, 0.72),
            rating(4, 0.08, 30, 0.90)]
    raw = np.array([[r.contribution_p90, r.passes_p90, r.pass_accuracy] for r in pool])
    norm = (raw - raw.min(0)) / (raw.max(0) - raw.min(0))
    expected = sorted(((j + 1, 1 - math.dist(norm[0], norm[j]) / math.sqrt(3)) for j in range(1, 4)),
                      key=lambda s: (-s[1], s[0]))
    got = similar_players(1, pool, top_n=10)
    assert [p for p, _ in got] == [p for p, _ in expected]
    assert [s for _, s in got] == pytest.approx([s for _, s in expected], abs=1e-12)


def test_ties_break_by_id_and_top_n():
    pool = [rating(5, 0.1, 50, 0.8), rating(9, 0.2, 60, 0.9), rating(7, 0.2, 60, 0.9), rating(3, 0.0, 40, 0.7)]
    got = similar_players(5, pool, top_n=2)
    assert [p for p, _ in got] == [7, 9]


def test_missing_target_and_empty_filter():
    pool = [rating(1, 0.1, 50, 0.8), rating(2, 0.0, 20, 0.6)]
    with pytest.raises(KeyError):
        similar_players(99, pool)
    assert similar_players(1, pool, min_minutes=5000) == []
    with pytest.raises(ValueError):
        similar_players(1, pool, born_after=date(1990, 1, 1))


def test_filters_and_normalisation_pool():
    pool = [rating(1, 0.1, 50, 0.8), rating(2, 0.1, 50, 0.8, minutes=500), rating(3, 0.0, 20, 0.6),
            rating(4, 0.3, 90, 0.95)]
    born = {1: date(1992, 1, 1), 2: date(1999, 1, 1), 3: date(1996, 5, 1), 4: date(1988, 1, 1)}
    got = similar_players(1, pool, born_after=date(1993, 1, 1), birth_dates=born)
    assert [p for p, _ in got] == [2, 3]
    assert similar_players(1, pool, min_minutes=900, born_after=date(1993, 1, 1), birth_dates=born) == [
        (3, 0.0)]


def test_constant_metric_scales_to_zero():
    v = player_vectors([rating(1, 0.1, 50, 0.8), rating(2, 0.3, 50, 0.8)])
    assert v.tolist() == [[0, 0, 0], [1, 0, 0]]
    assert player_vectors([]).shape == (0, 3)


pools = st.lists(st.tuples(st.floats(-0.2, 0.4), st.floats(5, 100), st.floats(0.3, 1)), min_size=2, max_size=15)


@settings(max_examples=100)
@given(pools, st.floats(0.1, 10), st.floats(-5, 5), st.integers(0, 2))
def test_ranking_invariant_under_affine_metric_rescale(rows, scale, shift, col):
    pool = [rating(i + 1, *r) for i, r in enumerate(rows)]
    base = similar_players(1, pool, top_n=100)

    def tweak(r):
        vals = [r.contribution_p90, r.passes_p90, r.pass_accuracy]
        vals[col] = scale * vals[col] + shift
        return rating(r.player_id, *vals)

    again = similar_players(1, [tweak(r) for r in pool], top_n=100)
    assert [s for _, s in again] == pytest.approx([s for _, s in base], abs=1e-9)
    for _, s in base:
        assert -1e-12 <= s <= 1 + 1e-12


@settings(max_examples=100)
@given(pools)
def test_similarity_symmetric_in_fixed_pool(rows):
    vecs = player_vectors([rating(i + 1, *r) for i, r in enumerate(rows)])
    for a, b in itertools.combinations(range(len(rows)), 2):
        assert similarity(vecs[a], vecs[b]) == similarity(vecs[b], vecs[a])
        assert 0 <= similarity(vecs[a], vecs[b]) <= 1


def test_write_similar_layout():
    buf = io.StringIO()
    write_similar([(4, 0.99551), (2, 0.5)], buf, names={4: "Ann"}, teams={4: 12})
    assert buf.getvalue().splitlines() == ["rank,player_id,player,team,similarity", "1,4,Ann,12,0.9955",
                                           "2,2,2,,0.5000"]
