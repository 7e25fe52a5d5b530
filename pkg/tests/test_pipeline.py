import csv
import json
import os
import shutil

import pytest

from passvalue.cli import build_parser, main
from passvalue.pipeline import (
    COMMANDS, ConfigError, RunConfig, UsageError, make_config, parse_config_text, resolve_split, splits,
)
from passvalue.events import Fixture

SMALL = ["--games", "30", "--teams", "4", "--seasons", "3"]


def run(*argv):
    return main([str(a) for a in argv])


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    assert run("synth", "--out", d, "--seed", 2, *SMALL) == 0
    return d


def pipeline(data, out, *extra):
    common = ["--data", data, "--out", out, "--min-minutes", "200", *extra]
    for cmd in ("ingest", "train-xg", "build-index", "value", "rate", "predict"):
        assert run(cmd, *common) == 0, cmd
    assert run("sweep-k", *common, "--ks", "1,3,10") == 0
    assert run("similar", *common) == 0


@pytest.fixture(scope="module")
def full_run(data_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("out")
    pipeline(data_dir, out)
    return out


def test_all_subcommands_and_flags_exist():
    parser = build_parser()
    assert set(COMMANDS) == {"ingest", "train-xg", "build-index", "value", "rate", "predict", "similar",
                             "synth", "sweep-k"}
    args = parser.parse_args(["value", "--config", "c.cfg", "--threads", "3", "--no-cluster", "--k", "5",
                              "--cell", "10x17", "--min-minutes", "450", "--seed", "9", "--out", "o"])
    assert (args.threads, args.clustered, args.k, args.cell, args.min_minutes, args.seed, args.out_dir) == (
        3, False, 5, (10.0, 17.0), 450.0, 9, "o")


def test_config_file_and_overrides(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# desk run\nk = 20\ncell_length = 10   # metres\nclustered = false\n"
                        "data_dir = somewhere\n")
    cfg = make_config(str(cfg_file), k=5)
    assert (cfg.k, cfg.cell_length, cfg.clustered) == (5, 10.0, False)
    assert cfg.events == os.path.join("somewhere", "events.csv")
    assert cfg.grid.n_cols == 11
    assert parse_config_text("seed=3\n\n") == {"seed": 3}
    assert make_config(None).digest() == RunConfig().digest()
    assert make_config(None, k=3).digest() != RunConfig().digest()


@pytest.mark.parametrize("text", ["k = 0", "cell_length = 0", "colour = red", "k = ten", "k 3",
                                  "clustered = maybe", "threads = 0", "sweep_ks = 1,0"])
def test_config_errors(tmp_path, text):
    f = tmp_path / "bad.cfg"
    f.write_text(text + "\n")
    with pytest.raises(ConfigError):
        make_config(str(f))
    assert run("ingest", "--config", f, "--out", tmp_path) == 3


def test_usage_errors(tmp_path, capsys):
    assert run("ingest", "--data", tmp_path / "nowhere", "--out", tmp_path / "o") == 2
    assert "usage error" in capsys.readouterr().err
    assert run("ingest", "--config", tmp_path / "missing.cfg") == 2
    assert run("value", "--data", tmp_path, "--out", tmp_path) == 2
    with pytest.raises(SystemExit) as exc:
        main(["ingest", "--cell", "wide"])
    assert exc.value.code == 2


def test_malformed_events_in_strict_mode(tmp_path, data_dir):
    bad = tmp_path / "events.csv"
    lines = read(data_dir / "events.csv").decode().splitlines()
    bad.write_text("\n".join(lines[:50] + ["1,1,notatime,1,1,8,85,1,2,3,4"] + lines[50:]) + "\n")
    assert run("ingest", "--data", data_dir, "--events", bad, "--out", tmp_path / "o", "--strict") == 1
    assert run("ingest", "--data", data_dir, "--events", bad, "--out", tmp_path / "p") == 0
    summary = json.loads(read(tmp_path / "p" / "ingest_summary.json"))
    assert summary["skipped_records"] == 1


def test_split_resolution():
    from datetime import date
    fx = [Fixture(i, 1, 2, 0, 0, date(2014 + (i - 1) // 4, 9, 1)) for i in range(1, 13)]
    assert resolve_split("1-3,7", fx) == {1, 2, 3, 7}
    assert resolve_split("2015/2016", fx) == {5, 6, 7, 8}
    assert resolve_split("2016-01-01..2016-12-31", fx) == {9, 10, 11, 12}
    assert resolve_split("all", fx) == set(range(1, 13))
    auto = splits(RunConfig(), fx)
    assert (auto["train"], auto["validation"], auto["test"]) == ({1, 2, 3, 4}, {5, 6, 7, 8}, {9, 10, 11, 12})
    with pytest.raises(ConfigError):
        splits(RunConfig(train="1-5", validation="5-8", test="9-12"), fx)
    with pytest.raises(UsageError):
        splits(RunConfig(), fx[:8])


def test_outputs_and_manifests(full_run):
    for name in ("sequences.csv", "ingest_summary.json", "xg_model.json", "index_summary.json",
                 "pass_values.csv", "ratings.csv", "forecasts.csv", "sweep_k.csv", "similar.csv"):
        assert (full_run / name).stat().st_size > 0, name
    for cmd in ("ingest", "train-xg", "build-index", "value", "rate", "predict", "sweep-k", "similar"):
        m = json.loads(read(full_run / f"manifest-{cmd}.json"))
        assert m["command"] == cmd and len(m["config_hash"]) == 64
        assert m["inputs"] and m["outputs"] and m["timings"]
        assert all(len(h) == 64 for h in m["inputs"].values())
    index = json.loads(read(full_run / "index_summary.json"))
    assert index["clusters"] == 784 and index["stored"] > 0


def test_sweep_table_sorted_with_baselines(full_run):
    with open(full_run / "sweep_k.csv") as fh:
        rows = list(csv.DictReader(fh))
    losses = [float(r["log_loss"]) for r in rows]
    assert losses == sorted(losses)
    assert {r["setting"] for r in rows} == {"k=1", "k=3", "k=10", "Pass accuracy", "Prior distribution"}


def test_ratings_and_similar_consistent(full_run):
    with open(full_run / "ratings.csv") as fh:
        ratings = list(csv.DictReader(fh))
    assert ratings and all(float(r["minutes"]) >= 200 for r in ratings)
    contrib = [float(r["contribution_p90"]) for r in ratings]
    assert contrib == sorted(contrib, reverse=True)
    with open(full_run / "similar.csv") as fh:
        similar = list(csv.DictReader(fh))
    assert len(similar) == 5 and ratings[0]["player_id"] not in {r["player_id"] for r in similar}


def test_build_index_reuses_cache(full_run, data_dir):
    before = read(full_run / "index_summary.json")
    assert run("build-index", "--data", data_dir, "--out", full_run, "--min-minutes", "200") == 0
    assert json.loads(read(full_run / "manifest-build-index.json"))["cache_hit"] is True
    assert read(full_run / "index_summary.json") == before


def test_rerun_is_byte_identical(full_run, data_dir, tmp_path):
    pipeline(data_dir, tmp_path)
    for name in sorted(os.listdir(full_run)):
        if name.startswith("manifest-"):
            a, b = json.loads(read(full_run / name)), json.loads(read(tmp_path / name))
            for m in (a, b):
                m.pop("timings")
                m.pop("config")
                m.pop("config_hash")
                m.pop("cache_hit", None)
            assert a["outputs"].keys() and (sorted(map(os.path.basename, a["outputs"])) ==
                                            sorted(map(os.path.basename, b["outputs"])))
            assert list(a["outputs"].values()) == list(b["outputs"].values()), name
        elif (full_run / name).is_file():
            assert read(full_run / name) == read(tmp_path / name), name


def test_empty_value_set_writes_header_only(full_run, data_dir, tmp_path):
    out = tmp_path / "o"
    shutil.copytree(full_run, out)
    assert run("value", "--data", data_dir, "--out", out, "--cache", full_run / "cache") == 0
    cfg_file = tmp_path / "none.cfg"
    cfg_file.write_text("value_games = 9999\n")
    assert run("value", "--config", cfg_file, "--data", data_dir, "--out", out,
               "--cache", full_run / "cache") == 0
    assert read(out / "pass_values.csv").decode().count("\n") == 1


def test_single_cell_grid_clustered_equals_exhaustive(data_dir, tmp_path):
    common = ["--data", data_dir, "--cell", "105x68", "--k", "3", "--min-minutes", "200"]
    cfg_file = tmp_path / "few.cfg"
    cfg_file.write_text("value_games = 21-22\n")
    outs = []
    for tag, flags in (("on", []), ("off", ["--no-cluster"])):
        out = tmp_path / tag
        for cmd in ("train-xg", "build-index", "value"):
            assert run(cmd, *common, *flags, "--out", out, "--config", cfg_file) == 0
        outs.append(read(out / "pass_values.csv"))
    assert outs[0] == outs[1] and outs[0].count(b"\n") > 10
