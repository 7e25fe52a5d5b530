import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import ev, passes
from passvalue.knn_index import build_index, expected_reward
from passvalue.possession import Subsequence, enumerate_subsequences, pass_success, segment_possessions
from passvalue.synth import SynthConfig, generate
from passvalue.events import parse_events
from worked_example import two_pass_setup
from passvalue.valuation import (
    PassValue, rate_players, read_pass_values, read_ratings, value_game, value_game_multi, value_pass,
    write_pass_values, write_ratings,
)


def test_two_pass_worked_example():
    idx, before, after = two_pass_setup()
    assert expected_reward(idx, before, 2) == pytest.approx(0.3, abs=1e-15)
    assert expected_reward(idx, after, 2) == pytest.approx(0.45, abs=1e-15)
    pv = value_pass(idx, before, after, True, k=2)
    assert pv.value == pytest.approx(0.15, abs=1e-15)
    assert pv.value == pv.after - pv.before


def test_first_and_unsuccessful_passes():
    idx, before, after = two_pass_setup()
    first = value_pass(idx, None, before, True, k=2)
    assert first.before == 0 and first.value == first.after == pytest.approx(0.3)
    failed = value_pass(idx, before, after, False, k=2)
    assert failed.after == 0 and failed.value == pytest.approx(-0.3)


def test_pass_free_game_and_attribution():
    idx, _, _ = two_pass_setup()
    assert value_game(idx, [ev(0, 1, "Dribble"), ev(1, 2, "Dribble")]) == []
    evs = passes(3, player=7) + [ev(7, 2, "Pass", (50, 34), (60, 34), player=8), ev(9, 1, "Dribble")]
    vals = value_game(idx, evs, k=2)
    assert [v.player_id for v in vals] == [7, 7, 7, 8]
    assert [v.pass_index for v in vals] == [0, 1, 2, 0]
    assert [v.successful for v in vals] == [True, True, False, False]


@pytest.fixture(scope="module")
def synth_world():
    data = generate(SynthConfig(seed=5, n_games=12, n_teams=4))
    buf = io.StringIO()
    buf.write("game_id,half,time,team,player,type,subtype,start_x,end_x,start_y,end_y\n")
    from passvalue.synth import _event_line
    for row in data.events:
        buf.write(_event_line(row))
    buf.seek(0)
    games = parse_events(buf, strict=True)
    rng = np.random.default_rng(0)
    subs = []
    for g in list(games)[:8]:
        for seq in segment_possessions(games[g]):
            subs.extend(Subsequence(s.parent, s.pass_index, s.events, float(rng.uniform()))
                        for s in enumerate_subsequences(seq))
    return games, build_index(subs)


def test_telescoping_on_synthetic_games(synth_world):
    games, idx = synth_world
    for g in list(games)[8:]:
        vals = value_game(idx, games[g], k=5)
        by_seq = {}
        for v in vals:
            by_seq.setdefault(v.sequence_id, []).append(v)
        seqs = {s.sequence_id: s for s in segment_possessions(games[g])}
        assert len(vals) == sum(len(s.pass_indices) for s in seqs.values())
        for sid, vs in by_seq.items():
            seq = seqs[sid]
            subs = enumerate_subsequences(seq)
            total = sum(v.value for v in vs)
            if pass_success(seq, seq.pass_indices[-1]):
                assert total == pytest.approx(expected_reward(idx, subs[-1], 5), abs=1e-12)
            else:
                assert total == pytest.approx(0.0, abs=1e-12)
            for a, b in zip(vs, vs[1:]):
                assert b.before == a.after
            assert all(-1 <= v.value <= 1 for v in vs)


def test_multi_k_matches_single_k(synth_world):
    games, idx = synth_world
    g = list(games)[9]
    multi = value_game_multi(idx, games[g], [1, 3, 10])
    for k in (1, 3, 10):
        assert multi[k] == value_game(idx, games[g], k=k)


def test_leave_one_out_changes_only_self_matches(synth_world):
    games, idx = synth_world
    g = list(games)[0]  # a training game
    plain = value_game(idx, games[g], k=1)
    loo = value_game(idx, games[g], k=1, leave_one_out=True)
    assert len(plain) == len(loo)
    assert any(a.after != b.after for a, b in zip(plain, loo))


def pv(player, value, ok=True):
    return PassValue(1, 1, 0, player, 0.0, value, value, ok)


def test_rate_players_examples():
    r = rate_players([pv(1, 0.6), pv(1, 0.6)], {1: 1080}, 900)[0]
    assert r.contribution_p90 == pytest.approx(0.1)
    assert rate_players([pv(2, 1.0)], {2: 899}, 900) == []
    assert len(rate_players([pv(2, 1.0)], {2: 900}, 900)) == 1
    with pytest.raises(ValueError):
        rate_players([pv(3, 0.1)], {3: 0}, 0)
    with pytest.raises(ValueError):
        rate_players([pv(3, 0.1)], {}, 0)


def test_rating_fields_and_order():
    vals = [pv(1, 0.2), pv(1, -0.1, ok=False), pv(2, 0.3), pv(3, 0.3)]
    rs = rate_players(vals, {1: 90, 2: 180, 3: 180}, 0, positions={1: "MF"}, teams={1: 4}, names={1: "A"})
    # 0.15 p90 for players 2 and 3 (tie broken by id), 0.10 for player 1
    assert [r.player_id for r in rs] == [2, 3, 1]
    r = rs[2]
    assert (r.position, r.team_id, r.name, r.n_passes) == ("MF", 4, "A", 2)
    assert r.pass_accuracy == 0.5 and r.passes_p90 == 2.0
    assert r.contribution_p90 == pytest.approx(r.total_value * 90 / r.minutes)


@settings(max_examples=100)
@given(st.lists(st.tuples(st.integers(1, 6), st.floats(-1, 1), st.booleans()), min_size=1, max_size=40),
       st.floats(0.1, 10))
def test_rating_linearity(rows, factor):
    vals = [pv(p, v, ok) for p, v, ok in rows]
    minutes = {p: 100.0 + 10 * p for p in range(1, 7)}
    base = {r.player_id: r for r in rate_players(vals, minutes, 0)}
    scaled = {r.player_id: r for r in rate_players(
        [PassValue(v.game_id, v.sequence_id, v.pass_index, v.player_id, v.before * factor,
                   v.after * factor, v.value * factor, v.successful) for v in vals], minutes, 0)}
    for p, r in base.items():
        assert scaled[p].contribution_p90 == pytest.approx(factor * r.contribution_p90, rel=1e-9, abs=1e-12)
        assert 0 <= r.pass_accuracy <= 1


def test_pass_values_and_ratings_round_trip():
    vals = [PassValue(3, 300001, 2, 17, 0.1, 0.25, 0.15, True), PassValue(3, 300001, 3, 18, 0.25, 0.0, -0.25, False)]
    buf = io.StringIO()
    write_pass_values(vals, buf)
    assert buf.getvalue().splitlines()[0].startswith("game_id,sequence_id,pass_index,player_id,before,after,value")
    buf.seek(0)
    assert read_pass_values(buf) == vals
    rs = rate_players(vals, {17: 950, 18: 1000}, 900, positions={17: "DF", 18: "FW"}, teams={17: 1, 18: 2},
                      names={17: "A", 18: "B"})
    buf = io.StringIO()
    write_ratings(rs, buf)
    assert buf.getvalue().splitlines()[0].startswith(
        "player_id,player_name,team,position,minutes,contribution_p90,passes_p90,pass_accuracy")
    buf.seek(0)
    assert read_ratings(buf) == rs
