"""
Valuing the passes of one possession
====================================

Generate a few synthetic games, fit the shot model, build the
origin-destination index from most of them and value every pass of one
possession in a held-out game.
"""

import tempfile

from passvalue.events import EventKind, read_events
from passvalue.knn_index import build_index, expected_reward
from passvalue.possession import enumerate_subsequences, label_sequences, pass_success, segment_possessions
from passvalue.synth import SynthConfig, generate
from passvalue.xg import extract_shots, fit_shot_model
from passvalue.valuation import value_game

paths = generate(SynthConfig(seed=1, n_games=40, n_teams=4)).write(tempfile.mkdtemp())
games = read_events(paths["events"])
train, held_out = [g for g in games if g <= 36], [g for g in games if g > 36]

# %%
# Shot model: every shot in the training games, labelled by whether a goal followed.
shots = [s for g in train for s in extract_shots(games[g])]
model = fit_shot_model(shots)
print(f"{len(shots)} shots, {sum(goal for _, goal in shots)} goals")

# %%
# Every pass-ending prefix of every training possession becomes a stored
# trajectory labelled with the xG its possession ended with.
stored = []
for g in train:
    for seq in label_sequences(segment_possessions(games[g]), model):
        stored.extend(enumerate_subsequences(seq))
index = build_index(stored)
print(f"{len(index)} stored subsequences in {len(index.clusters)} non-empty clusters")

# %%
# Pick the longest possession in the held-out games that ends with a shot.
game_id, seq = max(((g, s) for g in held_out for s in segment_possessions(games[g])
                    if s.events[s.final_action_index].kind is EventKind.SHOT),
                   key=lambda gs: len(gs[1].pass_indices))
game = games[game_id]
for sub, i in zip(enumerate_subsequences(seq), seq.pass_indices):
    e = seq.events[i]
    print(f"t={e.timestamp:7.1f}s  ({e.start.x:5.1f},{e.start.y:4.1f}) -> ({e.end.x:5.1f},{e.end.y:4.1f})  "
          f"reward after {expected_reward(index, sub):.4f}  success={pass_success(seq, i)}")

# %%
# value_game does the same for every possession; each pass is credited with
# the change in expected reward it caused.
values = [v for v in value_game(index, game) if v.sequence_id == seq.sequence_id]
for v in values:
    print(f"player {v.player_id:4d}  before {v.before:.4f}  after {v.after:.4f}  value {v.value:+.4f}")
print("sum of values:", sum(v.value for v in values))
