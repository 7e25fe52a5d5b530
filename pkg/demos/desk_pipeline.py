"""
The desk-scale pipeline
=======================

Runs every stage on a small synthetic league, then compares the resulting
player ratings with the pass skill the generator planted.  The same stages
are available from the shell as ``passvalue <command>``.
"""

import csv
import os
import tempfile

from scipy.stats import spearmanr

from passvalue.pipeline import cmd_synth, make_config, run_all

root = tempfile.mkdtemp()
cmd_synth(make_config(out_dir=os.path.join(root, "data"), seed=3, synth_games=80, synth_teams=4,
                      synth_seasons=4))

# %%
# Four seasons: the first two train the shot model and the index, the third
# calibrates goal statistics and ratings, the fourth is forecast.
cfg = make_config(data_dir=os.path.join(root, "data"), out_dir=os.path.join(root, "out"),
                  min_minutes=450, sweep_ks="1,5,10,20")
manifests = run_all(cfg)
for name, m in manifests.items():
    print(f"{name:12s} {sum(m['timings'].values()):6.1f} s")


def rows(name, directory=cfg.out_dir):
    with open(os.path.join(directory, name), newline="") as fh:
        return list(csv.DictReader(fh))


# %%
# Top of the ratings table.
ratings = rows("ratings.csv")
for r in ratings[:5]:
    print(r["player_name"], r["position"], r["contribution_p90"], r["pass_accuracy"])

# %%
# How well does contribution per 90 minutes recover the planted skill?
skill = {r["player_id"]: float(r["skill"]) for r in rows("skills.csv", cfg.data_dir)}
rho = spearmanr([skill[r["player_id"]] for r in ratings], [float(r["contribution_p90"]) for r in ratings])
print(f"Spearman correlation with planted skill: {rho.statistic:.3f}")

# %%
# Held-out log loss for each k and for the two baselines, best first.
for r in rows("sweep_k.csv"):
    print(f"{r['setting']:20s} {r['log_loss']}")

# %%
# Players whose passing profile is closest to the top-rated player.
for r in rows("similar.csv"):
    print(r["rank"], r["player"], r["similarity"])
