"""Stage orchestration: synth, ingest, train-xg, build-index, value, rate,
predict, similar and sweep-k.

Every stage reads its inputs from paths in a :class:`RunConfig`, writes its
outputs into ``out_dir`` and records a ``manifest-<stage>.json`` holding the
config hash, input/output hashes and per-step timings.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from datetime import date
from typing import Iterable

from . import __version__
from .events import (
    Fixture, default_taxonomy, load_taxonomy, minutes_played, parse_fixtures, parse_lineups,
    parse_players, read_events,
)
from .knn_index import GridSpec, build_index, load_index, save_index
from .outcome import (
    RatedPlayer, baseline_prior, forecast_games, goal_stats, log_loss, write_forecast_report,
)
from .possession import enumerate_subsequences, label_sequences, segment_possessions, write_sequences
from .similarity import similar_players, write_similar
from .synth import SynthConfig, generate
from .valuation import (
    PassValue, rate_players, read_pass_values, read_ratings, value_game_multi, write_pass_values,
    write_ratings,
)
from .xg import GbtModel, extract_shots, fit_shot_model

logger = logging.getLogger(__name__)

SWEEP_KS = (1, 2, 5, 10, 20, 50, 100)


class UsageError(Exception):
    """A required input is missing (exit status 2)."""


class ConfigError(Exception):
    """A configuration value violates its invariant (exit status 3)."""


@dataclass
class RunConfig:
    """Run configuration. Every field is a key of the config file.

    Path fields default to ``<data_dir>/<name>.csv``. Split fields take a
    comma-separated list of season labels (``2016/2017``), date ranges
    (``2016-08-01..2016-12-31``), game-id ranges (``1-120``) or single ids;
    empty splits are derived from fixture seasons (last season = test, the
    one before = validation, the rest = train).

    ``attack_normalized = false`` mirrors raw coordinates so every team
    attacks toward x = 105, assuming the home team attacks that way in the
    first half and the teams switch ends at half time.
    """

    data_dir: str = "data"
    events: str = ""
    lineups: str = ""
    fixtures: str = ""
    players: str = ""
    taxonomy: str = ""
    out_dir: str = "out"
    cache_dir: str = ""
    cell_length: float = 15.0
    cell_width: float = 17.0
    k: int = 10
    sweep_ks: str = "1,2,5,10,20,50,100"
    min_minutes: float = 900.0
    train: str = ""
    validation: str = ""
    test: str = ""
    value_games: str = "all"
    rate_games: str = "all"
    clustered: bool = True
    strict: bool = False
    attack_normalized: bool = True
    threads: int = 1
    seed: int = 0
    target: int = 0
    born_after: str = ""
    top_n: int = 5
    synth_games: int = 200
    synth_teams: int = 6
    synth_seasons: int = 4

    def __post_init__(self):
        for name in ("events", "lineups", "fixtures", "players", "taxonomy"):
            if not getattr(self, name):
                setattr(self, name, os.path.join(self.data_dir, f"{name}.csv"))
        if not self.cache_dir:
            self.cache_dir = os.path.join(self.out_dir, "cache")

    def validate(self) -> None:
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        try:
            self.grid
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if any(k < 1 for k in self.ks):
            raise ConfigError("sweep_ks must all be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.min_minutes < 0:
            raise ConfigError("min_minutes must be >= 0")

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.cell_length, self.cell_width)

    @property
    def ks(self) -> tuple[int, ...]:
        return tuple(int(k) for k in self.sweep_ks.split(",") if k.strip())

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self, keys: Iterable[str] | None = None) -> str:
        d = self.as_dict()
        if keys is not None:
            d = {k: d[k] for k in keys}
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


def _coerce(name: str, raw: str, typ):
    raw = raw.strip()
    try:
        if typ in (bool, "bool"):
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if typ in (int, "int"):
            return int(raw)
        if typ in (float, "float"):
            return float(raw)
        return raw.strip('"')
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Values are typed
    by the matching :class:`RunConfig` field."""
    types = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value, types[key])
    return out


def make_config(config_file: str | None = None, **overrides) -> RunConfig:
    values = {}
    if config_file:
        if not os.path.exists(config_file):
            raise UsageError(f"config file {config_file} not found")
        with open(config_file, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# --- helpers --------------------------------------------------------------

def file_hash(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _require(*paths: str) -> None:
    for p in paths:
        if not os.path.exists(p):
            raise UsageError(f"missing input {p}")


class Stage:
    """Timing and manifest bookkeeping for one command."""

    def __init__(self, name: str, cfg: RunConfig):
        self.name, self.cfg = name, cfg
        self.inputs: dict[str, str] = {}
        self.outputs: list[str] = []
        self.timings: dict[str, float] = {}
        self.notes: dict = {}
        os.makedirs(cfg.out_dir, exist_ok=True)

    @contextmanager
    def timed(self, step: str):
        t0 = time.perf_counter()
        yield
        self.timings[step] = round(time.perf_counter() - t0, 6)

    def use(self, *paths: str) -> None:
        _require(*paths)
        for p in paths:
            self.inputs[p] = file_hash(p)

    def out(self, filename: str) -> str:
        path = os.path.join(self.cfg.out_dir, filename)
        self.outputs.append(path)
        return path

    def finish(self) -> dict:
        manifest = {
            "command": self.name,
            "version": __version__,
            "config_hash": self.cfg.digest(),
            "config": self.cfg.as_dict(),
            "inputs": self.inputs,
            "outputs": {p: file_hash(p) for p in self.outputs if os.path.exists(p)},
            "timings": self.timings,
            **self.notes,
        }
        with open(os.path.join(self.cfg.out_dir, f"manifest-{self.name}.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
        return manifest


def _taxonomy(cfg: RunConfig):
    return load_taxonomy(cfg.taxonomy) if os.path.exists(cfg.taxonomy) else default_taxonomy()


def home_away_orientation(fixtures: Iterable[Fixture]):
    """Mirror predicate for raw data where teams switch ends at half time."""
    home = {f.game_id: f.home_team for f in fixtures}

    def mirror(game_id: int, half: int, team_id: int) -> bool:
        if game_id not in home:
            raise UsageError(f"game {game_id} has no fixture; cannot orient its coordinates")
        return (team_id == home[game_id]) == (half == 2)

    return mirror


def _events(cfg: RunConfig, stage: Stage, errors: list | None = None):
    stage.use(cfg.events)
    if os.path.exists(cfg.taxonomy):
        stage.use(cfg.taxonomy)
    mirror = None
    if not cfg.attack_normalized:
        mirror = home_away_orientation(_fixtures(cfg, stage))
    return read_events(cfg.events, _taxonomy(cfg), strict=cfg.strict, errors=errors, mirror=mirror)


def _fixtures(cfg: RunConfig, stage: Stage) -> list[Fixture]:
    stage.use(cfg.fixtures)
    with open(cfg.fixtures, newline="", encoding="utf-8") as fh:
        return parse_fixtures(fh)


def _lineups(cfg: RunConfig, stage: Stage):
    stage.use(cfg.lineups)
    with open(cfg.lineups, newline="", encoding="utf-8") as fh:
        return parse_lineups(fh)


def resolve_split(spec: str, fixtures: list[Fixture] | None, all_games: Iterable[int] = ()) -> set[int]:
    """Game ids selected by a split spec (see :class:`RunConfig`)."""
    spec = spec.strip()
    if spec == "all":
        ids = set(all_games)
        if fixtures:
            ids |= {f.game_id for f in fixtures}
        return ids
    out: set[int] = set()
    for item in (s.strip() for s in spec.split(",")):
        if not item:
            continue
        if ".." in item:
            if not fixtures:
                raise UsageError(f"date split {item!r} needs a fixtures file")
            lo, hi = (date.fromisoformat(d.strip()) for d in item.split("..", 1))
            out |= {f.game_id for f in fixtures if lo <= f.date <= hi}
        elif "/" in item:
            if not fixtures:
                raise UsageError(f"season split {item!r} needs a fixtures file")
            out |= {f.game_id for f in fixtures if f.season == item}
        elif "-" in item:
            lo, hi = item.split("-", 1)
            out |= set(range(int(lo), int(hi) + 1))
        else:
            out.add(int(item))
    return out


def splits(cfg: RunConfig, fixtures: list[Fixture] | None) -> dict[str, set[int]]:
    """Train/validation/test game ids; unset splits come from fixture seasons."""
    names = ("train", "validation", "test")
    specs = {n: getattr(cfg, n) for n in names}
    out = {n: resolve_split(s, fixtures) for n, s in specs.items() if s}
    missing = [n for n in names if n not in out]
    if missing:
        seasons = sorted({f.season for f in fixtures or []})
        if len(seasons) < 3:
            raise UsageError("splits not configured and fewer than three seasons in fixtures")
        auto = {"train": set(seasons[:-2]), "validation": {seasons[-2]}, "test": {seasons[-1]}}
        for n in missing:
            out[n] = {f.game_id for f in fixtures if f.season in auto[n]}
    if out["train"] & out["validation"] or out["train"] & out["test"] or out["validation"] & out["test"]:
        raise ConfigError("train/validation/test splits overlap")
    return out


def _maybe_fixtures(cfg, stage):
    return _fixtures(cfg, stage) if os.path.exists(cfg.fixtures) else None


# --- stages ---------------------------------------------------------------

def cmd_synth(cfg: RunConfig) -> dict:
    stage = Stage("synth", cfg)
    with stage.timed("generate"):
        data = generate(SynthConfig(seed=cfg.seed, n_games=cfg.synth_games, n_teams=cfg.synth_teams,
                                    n_seasons=cfg.synth_seasons))
    with stage.timed("write"):
        paths = data.write(cfg.out_dir)
    stage.outputs.extend(paths.values())
    stage.notes["games"] = cfg.synth_games
    return stage.finish()


def cmd_ingest(cfg: RunConfig) -> dict:
    stage = Stage("ingest", cfg)
    with stage.timed("parse"):
        errors: list = []
        games = _events(cfg, stage, errors)
        lineups = _lineups(cfg, stage) if os.path.exists(cfg.lineups) else []
    with stage.timed("segment"):
        seqs = [s for g in games for s in segment_possessions(games[g])]
    with open(stage.out("sequences.csv"), "w", newline="", encoding="utf-8") as fh:
        write_sequences(seqs, fh)
    kinds: dict[str, int] = {}
    for evs in games.values():
        for e in evs:
            kinds[e.kind.value] = kinds.get(e.kind.value, 0) + 1
    summary = {"games": len(games), "events": sum(len(v) for v in games.values()),
               "sequences": len(seqs), "skipped_records": len(errors), "kinds": kinds,
               "lineup_rows": len(lineups)}
    with open(stage.out("ingest_summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    stage.notes["summary"] = summary
    return stage.finish()


def cmd_train_xg(cfg: RunConfig) -> dict:
    stage = Stage("train-xg", cfg)
    games = _events(cfg, stage)
    split = splits(cfg, _maybe_fixtures(cfg, stage))
    with stage.timed("train"):
        shots = [s for g in sorted(split["train"]) if g in games for s in extract_shots(games[g])]
        if not shots:
            raise UsageError("no shots in the train split")
        model = fit_shot_model(shots)
    model.save(stage.out("xg_model.json"))
    stage.notes["shots"] = len(shots)
    return stage.finish()


def index_cache_path(cfg: RunConfig, events_hash: str, model_hash: str, train: set[int]) -> str:
    key = hashlib.sha256(json.dumps({
        "events": events_hash, "model": model_hash, "train": sorted(train),
        "grid": [cfg.cell_length, cfg.cell_width], "clustered": cfg.clustered,
        "taxonomy": file_hash(cfg.taxonomy) if os.path.exists(cfg.taxonomy) else "default",
    }, sort_keys=True).encode()).hexdigest()[:20]
    return os.path.join(cfg.cache_dir, f"index-{key}.bin")


def _index_path(cfg: RunConfig, stage: Stage, split) -> str:
    model_path = os.path.join(cfg.out_dir, "xg_model.json")
    _require(model_path)
    stage.use(model_path)
    return index_cache_path(cfg, file_hash(cfg.events), file_hash(model_path), split["train"])


def cmd_build_index(cfg: RunConfig) -> dict:
    stage = Stage("build-index", cfg)
    games = _events(cfg, stage)
    split = splits(cfg, _maybe_fixtures(cfg, stage))
    path = _index_path(cfg, stage, split)
    if os.path.exists(path):
        with stage.timed("load"):
            index = load_index(path)
        stage.notes["cache_hit"] = True
    else:
        model = GbtModel.load(os.path.join(cfg.out_dir, "xg_model.json"))
        with stage.timed("label"):
            subs = []
            for g in sorted(split["train"]):
                if g in games:
                    for seq in label_sequences(segment_possessions(games[g]), model):
                        subs.extend(enumerate_subsequences(seq))
        with stage.timed("build"):
            index = build_index(subs, cfg.grid, clustered=cfg.clustered)
        os.makedirs(cfg.cache_dir, exist_ok=True)
        save_index(index, path)
        stage.notes["cache_hit"] = False
    n_clusters = cfg.grid.n_clusters if cfg.clustered else 1
    summary = {"stored": len(index), "clusters": n_clusters, "non_empty_clusters": len(index.clusters),
               "average_cluster_size": len(index) / n_clusters, "global_mean_label": index.global_mean_label,
               "cache_file": os.path.basename(path)}
    with open(stage.out("index_summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    stage.notes["summary"] = summary
    return stage.finish()


def _load_built_index(cfg, stage, split):
    path = _index_path(cfg, stage, split)
    if not os.path.exists(path):
        raise UsageError(f"index cache {path} not found; run build-index first")
    stage.inputs[path] = file_hash(path)
    return load_index(path)


def value_games(index, games: dict, game_ids: Iterable[int], ks, *, train: set[int] = frozenset(),
                threads: int = 1, stats: dict | None = None) -> dict[int, list[PassValue]]:
    """Value the given games for every k; train games use the leave-one-out guard."""
    ids = [g for g in sorted(game_ids) if g in games]

    def one(g):
        local: dict = {}
        res = value_game_multi(index, games[g], ks, leave_one_out=g in train, stats=local)
        return res, local

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(one, ids))
    out: dict[int, list[PassValue]] = {k: [] for k in ks}
    for res, local in results:
        for k in ks:
            out[k].extend(res[k])
        if stats is not None:
            for key, v in local.items():
                stats[key] = stats.get(key, 0) + v
    return out


def cmd_value(cfg: RunConfig) -> dict:
    stage = Stage("value", cfg)
    games = _events(cfg, stage)
    fixtures = _maybe_fixtures(cfg, stage)
    split = splits(cfg, fixtures)
    index = _load_built_index(cfg, stage, split)
    wanted = resolve_split(cfg.value_games, fixtures, games)
    stats: dict = {}
    with stage.timed("value"):
        values = value_games(index, games, wanted, [cfg.k], train=split["train"],
                             threads=cfg.threads, stats=stats)[cfg.k]
    with open(stage.out("pass_values.csv"), "w", newline="", encoding="utf-8") as fh:
        write_pass_values(values, fh)
    stage.notes["passes"] = len(values)
    stage.notes["distance_computations"] = stats.get("distance_computations", 0)
    return stage.finish()


def _player_meta(cfg, stage, lineups, games: set[int]):
    """Position, team and name per player (team/position from most minutes)."""
    mins: dict[tuple[int, int, str], float] = {}
    for lu in lineups:
        if lu.game_id in games:
            key = (lu.player_id, lu.team_id, lu.position)
            mins[key] = mins.get(key, 0.0) + lu.minute_off - lu.minute_on
    best: dict[int, tuple[float, int, str]] = {}
    for (pid, team, pos), m in sorted(mins.items()):
        if pid not in best or m > best[pid][0]:
            best[pid] = (m, team, pos)
    names = {}
    if os.path.exists(cfg.players):
        stage.use(cfg.players)
        with open(cfg.players, newline="", encoding="utf-8") as fh:
            names = {pid: p.name for pid, p in parse_players(fh).items()}
    return ({p: b[2] for p, b in best.items()}, {p: b[1] for p, b in best.items()}, names)


def ratings_for(cfg, stage, values: list[PassValue], lineups, games: set[int]):
    values = [v for v in values if v.game_id in games]
    minutes = minutes_played(lineups, games)
    positions, teams, names = _player_meta(cfg, stage, lineups, games)
    return rate_players(values, minutes, cfg.min_minutes, positions=positions, teams=teams, names=names)


def _read_values(cfg, stage) -> list[PassValue]:
    path = os.path.join(cfg.out_dir, "pass_values.csv")
    stage.use(path)
    with open(path, newline="", encoding="utf-8") as fh:
        return read_pass_values(fh)


def cmd_rate(cfg: RunConfig) -> dict:
    stage = Stage("rate", cfg)
    values = _read_values(cfg, stage)
    lineups = _lineups(cfg, stage)
    fixtures = _maybe_fixtures(cfg, stage)
    games = resolve_split(cfg.rate_games, fixtures, {v.game_id for v in values})
    with stage.timed("rate"):
        ratings = ratings_for(cfg, stage, values, lineups, games)
    with open(stage.out("ratings.csv"), "w", newline="", encoding="utf-8") as fh:
        write_ratings(ratings, fh)
    stage.notes["rated_players"] = len(ratings)
    return stage.finish()


def _forecast_with(ratings, metric, fixtures, lineups, test_ids, goal_mean, goal_std):
    rated = [RatedPlayer(r.player_id, r.team_id, r.position, getattr(r, metric))
             for r in ratings if r.team_id is not None]
    test = [f for f in fixtures if f.game_id in test_ids]
    return forecast_games(test, [lu for lu in lineups if lu.game_id in test_ids], rated, goal_mean, goal_std)


def evaluate(cfg, stage, values_by_k: dict[int, list[PassValue]], fixtures, lineups, split):
    """Log loss on the test split for each k plus the two baselines."""
    val_ids, test_ids = split["validation"], split["test"]
    goal_mean, goal_std = goal_stats([f for f in fixtures if f.game_id in val_ids])
    summary: dict[str, float] = {}
    rows_by_k = {}
    excluded: set[int] = set()
    for k, values in values_by_k.items():
        ratings = ratings_for(cfg, stage, values, lineups, val_ids)
        rows, exc = _forecast_with(ratings, "contribution_p90", fixtures, lineups, test_ids, goal_mean, goal_std)
        if not rows:
            raise UsageError("no test game has rated players in every line")
        rows_by_k[k] = rows
        excluded |= set(exc)
        summary[f"k={k}"] = log_loss([f for _, f in rows], [fx.outcome for fx, _ in rows])
    first = next(iter(values_by_k.values()))
    ratings = ratings_for(cfg, stage, first, lineups, val_ids)
    acc_rows, _ = _forecast_with(ratings, "pass_accuracy", fixtures, lineups, test_ids, goal_mean, goal_std)
    # baselines are scored on the same games as the rating forecasts
    scored = {fx.game_id for fx, _ in next(iter(rows_by_k.values()))}
    acc_rows = [r for r in acc_rows if r[0].game_id in scored]
    summary["Pass accuracy"] = log_loss([f for _, f in acc_rows], [fx.outcome for fx, _ in acc_rows])
    prior = baseline_prior()
    games = [fx for fx, _ in next(iter(rows_by_k.values()))]
    summary["Prior distribution"] = log_loss([prior] * len(games), [fx.outcome for fx in games])
    return summary, rows_by_k, sorted(excluded)


def cmd_predict(cfg: RunConfig) -> dict:
    stage = Stage("predict", cfg)
    values = _read_values(cfg, stage)
    lineups = _lineups(cfg, stage)
    fixtures = _fixtures(cfg, stage)
    split = splits(cfg, fixtures)
    with stage.timed("forecast"):
        summary, rows_by_k, excluded = evaluate(cfg, stage, {cfg.k: values}, fixtures, lineups, split)
    with open(stage.out("forecasts.csv"), "w", newline="", encoding="utf-8") as fh:
        write_forecast_report(rows_by_k[cfg.k], summary, fh)
    stage.notes.update(log_loss=summary, excluded_games=excluded)
    return stage.finish()


def cmd_sweep_k(cfg: RunConfig) -> dict:
    stage = Stage("sweep-k", cfg)
    games = _events(cfg, stage)
    lineups = _lineups(cfg, stage)
    fixtures = _fixtures(cfg, stage)
    split = splits(cfg, fixtures)
    index = _load_built_index(cfg, stage, split)
    with stage.timed("value"):
        values = value_games(index, games, split["validation"], cfg.ks, train=split["train"],
                             threads=cfg.threads)
    with stage.timed("forecast"):
        summary, _, excluded = evaluate(cfg, stage, values, fixtures, lineups, split)
    with open(stage.out("sweep_k.csv"), "w", newline="", encoding="utf-8") as fh:
        fh.write("setting,log_loss\n")
        for name, v in sorted(summary.items(), key=lambda kv: (kv[1], kv[0])):
            fh.write(f"{name},{v:.6f}\n")
    stage.notes.update(log_loss=summary, excluded_games=excluded)
    return stage.finish()


def cmd_similar(cfg: RunConfig) -> dict:
    stage = Stage("similar", cfg)
    path = os.path.join(cfg.out_dir, "ratings.csv")
    stage.use(path)
    with open(path, newline="", encoding="utf-8") as fh:
        ratings = read_ratings(fh)
    if not ratings:
        raise UsageError("ratings.csv holds no players")
    target = cfg.target or ratings[0].player_id
    births = None
    born_after = date.fromisoformat(cfg.born_after) if cfg.born_after else None
    if born_after is not None:
        _require(cfg.players)
        stage.use(cfg.players)
        with open(cfg.players, newline="", encoding="utf-8") as fh:
            births = {pid: p.birth_date for pid, p in parse_players(fh).items()}
    try:
        with stage.timed("rank"):
            rows = similar_players(target, ratings, born_after=born_after, birth_dates=births,
                                   min_minutes=cfg.min_minutes, top_n=cfg.top_n)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    with open(stage.out("similar.csv"), "w", newline="", encoding="utf-8") as fh:
        write_similar(rows, fh, {r.player_id: r.name for r in ratings},
                      {r.player_id: r.team_id for r in ratings})
    stage.notes["target"] = target
    return stage.finish()


COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "train-xg": cmd_train_xg,
    "build-index": cmd_build_index,
    "value": cmd_value,
    "rate": cmd_rate,
    "predict": cmd_predict,
    "similar": cmd_similar,
    "sweep-k": cmd_sweep_k,
}

PIPELINE = ("ingest", "train-xg", "build-index", "value", "rate", "predict", "sweep-k", "similar")


def run_all(cfg: RunConfig) -> dict[str, dict]:
    return {name: COMMANDS[name](cfg) for name in PIPELINE}
