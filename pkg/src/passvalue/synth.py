"""Synthetic games with planted player skill, for desk-scale experiments.

The ball performs a random walk biased toward the attacked goal. Each
player carries a planted pass skill: skilled passers play the ball further
forward and lose it less often. Shots are taken with probability rising with
the true (planted) scoring chance at the ball's location, so a shot model
fitted on the output can recover it.

Coordinates are written in the acting team's frame (attacking toward
x = 105), which is what the event parser assumes by default.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

from .events import (
    PITCH_LENGTH as L, PITCH_WIDTH as W, Fixture, Lineup, PlayerInfo,
    EVENT_COLUMNS, default_taxonomy, write_fixtures, write_lineups, write_players,
)
from .xg import GOAL_HALF_WIDTH, shot_angle

HALF_SECONDS = 45 * 60.0

# provider codes used by the generator (see the packaged taxonomy)
KICKOFF = (8, 85)
SIMPLE_PASS = (8, 85)
CROSS = (8, 80)
HIGH_PASS = (8, 83)
CORNER = (3, 30)
FREE_KICK = (3, 31)
FREE_KICK_SHOT = (3, 33)
GOAL_KICK = (3, 34)
PENALTY = (3, 35)
THROW_IN = (3, 36)
DRIBBLE = (7, 70)
CLEARANCE = (7, 71)
DUEL = (1, 10)
FOUL = (2, 20)
OFFSIDE = (6, 60)
BALL_OUT = (5, 50)
SAVE = (9, 90)
SHOT = (10, 100)
GOAL = (11, 110)

LINE_CENTRE = {"GK": 3.0, "DF": 28.0, "MF": 55.0, "FW": 82.0}
LINE_SPREAD = {"GK": 6.0, "DF": 18.0, "MF": 20.0, "FW": 16.0}


@dataclass(frozen=True)
class SynthConfig:
    """Generator parameters. All probabilities must lie in [0, 1]."""

    seed: int = 0
    n_games: int = 200
    n_teams: int = 10
    n_seasons: int = 1
    first_season: int = 2014
    # (line, starters, substitutes)
    squad: tuple = (("GK", 1, 0), ("DF", 4, 1), ("MF", 4, 1), ("FW", 2, 1))
    team_quality_sd: float = 0.3
    skill_sd: float = 0.8
    # per-action chance the carrier is tackled; makes possession length roughly geometric
    possession_p: float = 0.04
    pass_success_base: float = 0.95
    pass_success_slope: float = 0.006
    skill_success: float = 0.05
    pass_forward: float = 3.0
    skill_progress: float = 5.0
    dribble_prob: float = 0.13
    dribble_success: float = 0.85
    shot_scale: float = 6.0
    shot_cap: float = 0.45
    xg_intercept: float = -2.0
    xg_dist: float = -0.16
    xg_angle: float = 1.0
    penalty_xg: float = 0.76
    foul_prob: float = 0.02
    ball_out_share: float = 0.35
    gap: tuple = (1.0, 5.0)
    restart_delay: tuple = (5.0, 25.0)
    n_subs: int = 3

    def validate(self) -> None:
        probs = ("possession_p", "pass_success_base", "dribble_prob", "dribble_success",
                 "shot_cap", "penalty_xg", "foul_prob", "ball_out_share")
        for name in probs:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} is not a probability")
        if self.n_games < 0 or self.n_teams < 2 or self.n_seasons < 1:
            raise ValueError("need n_games >= 0, n_teams >= 2, n_seasons >= 1")
        lo, hi = self.gap
        if not 0 < lo <= hi:
            raise ValueError("gap must be a positive (low, high) range")
        starters = sum(s for _, s, _ in self.squad)
        if starters != 11:
            raise ValueError(f"squad must field 11 starters, got {starters}")

    def true_xg(self, x: float, y: float) -> float:
        d = math.hypot(L - x, W / 2 - y)
        z = self.xg_intercept + self.xg_dist * d + self.xg_angle * shot_angle(x, y)
        return 1.0 / (1.0 + math.exp(-z))


@dataclass
class SynthData:
    events: list[tuple]
    lineups: list[Lineup]
    fixtures: list[Fixture]
    players: list[PlayerInfo]
    skills: dict[int, float]
    team_quality: dict[int, float] = field(default_factory=dict)

    def write(self, directory) -> dict[str, str]:
        """Write events, lineups, fixtures, players, skills and taxonomy CSVs."""
        os.makedirs(directory, exist_ok=True)
        paths = {name: os.path.join(directory, f"{name}.csv")
                 for name in ("events", "lineups", "fixtures", "players", "skills", "taxonomy")}
        with open(paths["events"], "w", newline="", encoding="utf-8") as fh:
            fh.write(",".join(EVENT_COLUMNS) + "\n")
            for row in self.events:
                fh.write(_event_line(row))
        with open(paths["lineups"], "w", newline="", encoding="utf-8") as fh:
            write_lineups(self.lineups, fh)
        with open(paths["fixtures"], "w", newline="", encoding="utf-8") as fh:
            write_fixtures(self.fixtures, fh)
        with open(paths["players"], "w", newline="", encoding="utf-8") as fh:
            write_players(self.players, fh)
        with open(paths["skills"], "w", newline="", encoding="utf-8") as fh:
            fh.write("player_id,team_id,skill\n")
            for p in self.players:
                fh.write(f"{p.player_id},{p.team_id},{self.skills[p.player_id]!r}\n")
        with open(paths["taxonomy"], "w", newline="", encoding="utf-8") as fh:
            default_taxonomy().to_csv(fh)
        return paths


def _event_line(row: tuple) -> str:
    g, half, t, team, player, ty, st, sx, ex, sy, ey = row
    return f"{g},{half},{t:.3f},{team},{player},{ty},{st},{sx:.1f},{ex:.1f},{sy:.1f},{ey:.1f}\n"


def _clip(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def _mirror(x: float, y: float) -> tuple[float, float]:
    return L - x, W - y


class _Game:
    def __init__(self, cfg: SynthConfig, rng: random.Random, game_id: int, home: int, away: int,
                 squads: dict[int, list[tuple[int, str]]], skills: dict[int, float]):
        self.cfg, self.rng, self.game_id = cfg, rng, game_id
        self.teams = (home, away)
        self.skills = skills
        self.rows: list[tuple] = []
        self.goals = {home: 0, away: 0}
        self.lineups: list[Lineup] = []
        self.on_pitch: dict[int, list[tuple[int, str, float, float]]] = {}
        for team in self.teams:
            self.on_pitch[team] = self._lineup(team, squads[team])
        self.t = 0.0
        self.half = 1

    def _lineup(self, team, squad):
        rng, cfg = self.rng, self.cfg
        starters, bench = [], []
        for line, n_start, n_sub in cfg.squad:
            members = [p for p in squad if p[1] == line]
            starters += members[:n_start]
            bench += members[n_start:n_start + n_sub]
        spells = {pid: [pos, 0.0, 90.0] for pid, pos in starters}
        for pid, pos in rng.sample(bench, min(cfg.n_subs, len(bench))):
            out = [p for p, q in starters if q == pos and spells[p][2] == 90.0]
            if not out:
                continue
            minute = float(rng.randint(55, 85))
            spells[rng.choice(out)][2] = minute
            spells[pid] = [pos, minute, 90.0]
        for pid, (pos, on, off) in spells.items():
            self.lineups.append(Lineup(self.game_id, pid, team, pos, on, off))
        return [(pid, pos, on, off) for pid, (pos, on, off) in spells.items()]

    # --- emission -------------------------------------------------------
    def emit(self, team, player, codes, start, end=None):
        end = end or start
        sx, sy = start
        ex, ey = end
        self.rows.append((self.game_id, self.half, self.t, team, player, codes[0], codes[1],
                          round(_clip(sx, 0, L) / L * 100, 1), round(_clip(ex, 0, L) / L * 100, 1),
                          round(_clip(sy, 0, W) / W * 100, 1), round(_clip(ey, 0, W) / W * 100, 1)))
        self.t += self.rng.uniform(*self.cfg.gap)

    def pause(self):
        self.t += self.rng.uniform(*self.cfg.restart_delay)

    def opponent(self, team):
        return self.teams[1] if team == self.teams[0] else self.teams[0]

    def pick(self, team, x, exclude=None, line=None):
        minute = min((self.half - 1) * 45 + self.t / 60.0, 89.99)
        cands = [(pid, pos) for pid, pos, on, off in self.on_pitch[team]
                 if on <= minute < off and pid != exclude and (line is None or pos == line)]
        if not cands:
            cands = [(pid, pos) for pid, pos, on, off in self.on_pitch[team] if on <= minute < off]
        weights = []
        for _, pos in cands:
            z = (x - LINE_CENTRE[pos]) / LINE_SPREAD[pos]
            base = 0.002 if pos == "GK" else 0.05
            weights.append(math.exp(-0.5 * z * z) + base)
        return self.rng.choices(cands, weights)[0][0]

    # --- play -----------------------------------------------------------
    def play(self):
        for half, kickoff in ((1, self.teams[0]), (2, self.teams[1])):
            self.half, self.t = half, 0.0
            state = ("kickoff", kickoff, L / 2, W / 2, None)
            while self.t < HALF_SECONDS:
                state = self.step(*state)

    def step(self, kind, team, x, y, carrier):
        cfg, rng = self.cfg, self.rng
        if kind == "kickoff":
            p = self.pick(team, 60.0, line="FW")
            return self.pass_(team, p, (x, y), (x - abs(rng.gauss(8, 4)), y + rng.gauss(0, 8)), KICKOFF)
        if kind == "goal_kick":
            p = self.pick(team, 0.0, line="GK")
            start = (5.5, W / 2 + rng.choice((-9.0, 9.0)))
            return self.pass_(team, p, start, (rng.uniform(25, 60), rng.uniform(5, W - 5)), GOAL_KICK)
        if kind == "corner":
            p = self.pick(team, 70.0)
            start = (L, 0.0 if y < W / 2 else W)
            return self.pass_(team, p, start, (rng.uniform(94, 102), rng.uniform(24, 44)), CORNER)
        if kind == "throw_in":
            p = self.pick(team, x)
            side = 0.0 if y < W / 2 else W
            inward = 1.0 if side == 0.0 else -1.0
            end = (x + rng.gauss(3, 6), side + inward * rng.uniform(4, 15))
            return self.pass_(team, p, (x, side), end, THROW_IN)
        if kind == "free_kick":
            p = self.pick(team, x)
            if self._in_box(x, y):
                return self.shoot(team, p, x, y, PENALTY, (L - 11.0, W / 2))
            if x > 75 and abs(y - W / 2) < 20 and rng.random() < 0.3:
                return self.shoot(team, p, x, y, FREE_KICK_SHOT)
            end = (x + rng.gauss(10, 12), y + rng.gauss(0, 12))
            return self.pass_(team, p, (x, y), end, FREE_KICK)

        # open play
        p = carrier if carrier is not None else self.pick(team, x)
        s = self.skills[p]
        if rng.random() < cfg.foul_prob and (not self._in_box(x, y) or rng.random() < 0.1):
            opp = self.opponent(team)
            ox, oy = _mirror(x, y)
            self.emit(opp, self.pick(opp, ox), FOUL, (ox, oy))
            self.pause()
            return ("free_kick", team, x, y, None)
        if rng.random() < cfg.possession_p:
            return self.lose(team, x, y)
        if x > 60 and rng.random() < min(cfg.shot_cap, cfg.shot_scale * cfg.true_xg(x, y)):
            return self.shoot(team, p, x, y, SHOT)
        if rng.random() < cfg.dribble_prob:
            end = (_clip(x + rng.gauss(4 + s, 3), 0.5, L - 0.5), _clip(y + rng.gauss(0, 3), 0.5, W - 0.5))
            self.emit(team, p, DRIBBLE, (x, y), end)
            if rng.random() < cfg.dribble_success + 0.03 * s:
                return ("open", team, end[0], end[1], p)
            return self.lose(team, *end)
        dx = rng.gauss(cfg.pass_forward + cfg.skill_progress * s, 12)
        dy = rng.gauss(-0.25 * (y - W / 2), 12)
        codes = SIMPLE_PASS
        if x > 75 and abs(y - W / 2) > 18:
            codes = CROSS
            dx, dy = rng.uniform(90, 102) - x, rng.uniform(24, 44) - y
        elif math.hypot(dx, dy) > 30:
            codes = HIGH_PASS
        return self.pass_(team, p, (x, y), (x + dx, y + dy), codes)

    @staticmethod
    def _in_box(x, y):
        return x > L - 16.5 and abs(y - W / 2) < 20.16

    def pass_(self, team, player, start, end, codes):
        cfg, rng = self.cfg, self.rng
        ex, ey = _clip(end[0], 0.5, L - 0.5), _clip(end[1], 0.5, W - 0.5)
        length = math.hypot(ex - start[0], ey - start[1])
        s = self.skills[player]
        p_ok = cfg.pass_success_base - cfg.pass_success_slope * length \
            - 0.004 * max(0.0, ex - 60) + cfg.skill_success * s
        if codes == CORNER:
            p_ok -= 0.35
        ok = rng.random() < _clip(p_ok, 0.05, 0.99)
        self.emit(team, player, codes, start, (ex, ey))
        if ok:
            return ("open", team, ex, ey, self.pick(team, ex, exclude=player))
        r = rng.random()
        if ex > 80 and r < 0.08:
            self.emit(team, player, OFFSIDE, (ex, ey))
            self.pause()
            opp = self.opponent(team)
            return ("free_kick", opp, *_mirror(ex, ey), None)
        if r < cfg.ball_out_share:
            return self.ball_out(team, player, ex, ey)
        return self.lose(team, ex, ey)

    def lose(self, team, x, y):
        """The opponent wins the ball at (x, y) in ``team``'s frame."""
        opp = self.opponent(team)
        ox, oy = _mirror(x, y)
        q = self.pick(opp, ox)
        if ox < 16 and self.rng.random() < 0.25:
            # clearance behind the own goal line concedes a corner
            self.emit(opp, q, CLEARANCE, (ox, oy), (0.0, oy))
            self.emit(opp, q, BALL_OUT, (0.0, oy))
            self.pause()
            return ("corner", team, L, y, None)
        self.emit(opp, q, DUEL, (ox, oy))
        return ("open", opp, ox, oy, q)

    def ball_out(self, team, player, x, y):
        self.emit(team, player, BALL_OUT, (x, y))
        self.pause()
        opp = self.opponent(team)
        ox, oy = _mirror(x, y)
        if x > L - 8:
            return ("goal_kick", opp, 5.5, W / 2, None)
        return ("throw_in", opp, ox, oy, None)

    def shoot(self, team, player, x, y, codes, spot=None):
        cfg, rng = self.cfg, self.rng
        if spot is not None:
            x, y = spot
        xg = cfg.penalty_xg if codes == PENALTY else cfg.true_xg(x, y)
        target = (L, W / 2 + rng.uniform(-GOAL_HALF_WIDTH, GOAL_HALF_WIDTH))
        self.emit(team, player, codes, (x, y), target)
        opp = self.opponent(team)
        if rng.random() < xg:
            self.emit(team, player, GOAL, target)
            self.goals[team] += 1
            self.pause()
            return ("kickoff", opp, L / 2, W / 2, None)
        if rng.random() < 0.45:
            self.emit(team, player, BALL_OUT, target)
            self.pause()
            return ("goal_kick", opp, 5.5, W / 2, None)
        gk = self.pick(opp, 0.0, line="GK")
        gx, gy = rng.uniform(1, 5), W / 2 + rng.gauss(0, 2)
        self.emit(opp, gk, SAVE, (gx, gy))
        return ("open", opp, gx, gy, gk)


def _squads(cfg: SynthConfig, rng: random.Random):
    squads, skills, quality, players = {}, {}, {}, []
    pid = 1000
    for team in range(1, cfg.n_teams + 1):
        quality[team] = rng.gauss(0, cfg.team_quality_sd)
        squads[team] = []
        for line, n_start, n_sub in cfg.squad:
            for _ in range(n_start + n_sub):
                pid += 1
                skills[pid] = quality[team] + rng.gauss(0, cfg.skill_sd)
                born = date(1988, 1, 1) + timedelta(days=rng.randint(0, 12 * 365))
                squads[team].append((pid, line))
                players.append(PlayerInfo(pid, f"Player {pid}", team, line, born))
    return squads, skills, quality, players


def _schedule(cfg: SynthConfig):
    """Round-robin pairings, spread evenly over the seasons, weekly dates."""
    teams = list(range(1, cfg.n_teams + 1))
    if len(teams) % 2:
        teams.append(0)  # bye
    rounds = []
    n = len(teams)
    for leg in range(2):
        rot = teams[:]
        for _ in range(n - 1):
            pairs = [(rot[i], rot[n - 1 - i]) for i in range(n // 2)]
            rounds.append([(b, a) if leg else (a, b) for a, b in pairs if a and b])
            rot = [rot[0]] + [rot[-1]] + rot[1:-1]
    games = []
    r = 0
    while len(games) < cfg.n_games:
        for home, away in rounds[r % len(rounds)]:
            if len(games) < cfg.n_games:
                games.append((home, away))
        r += 1
    out = []
    per_season = max(1, math.ceil(cfg.n_games / cfg.n_seasons))
    per_week = max(1, cfg.n_teams // 2)
    for i, (home, away) in enumerate(games):
        season, j = divmod(i, per_season)
        day = date(cfg.first_season + season, 8, 1) + timedelta(days=7 * (j // per_week))
        out.append((i + 1, home, away, day))
    return out


def generate(config: SynthConfig) -> SynthData:
    """Generate a full dataset; the seed fully determines the output."""
    config.validate()
    rng = random.Random(config.seed)
    squads, skills, quality, players = _squads(config, rng)
    events, lineups, fixtures = [], [], []
    for game_id, home, away, day in _schedule(config):
        game = _Game(config, random.Random(f"{config.seed}:{game_id}"), game_id, home, away, squads, skills)
        game.play()
        events.extend(game.rows)
        lineups.extend(game.lineups)
        fixtures.append(Fixture(game_id, home, away, game.goals[home], game.goals[away], day))
    return SynthData(events, lineups, fixtures, players, skills, quality)


def synthetic_shots(n: int, config: SynthConfig = SynthConfig(), seed: int = 0):
    """Shot locations in the attacking half with goals drawn from the true model.

    Returns ``(X, y)`` where ``X`` rows are shot features.
    """
    from .xg import ShotFeatures

    rng = np.random.default_rng(seed)
    xs = rng.uniform(70.0, L, n)
    ys = rng.uniform(10.0, W - 10.0, n)
    feats = []
    goals = np.empty(n)
    u = rng.random(n)
    for i, (x, y) in enumerate(zip(xs, ys)):
        d = math.hypot(L - x, W / 2 - y)
        feats.append(ShotFeatures(x, y, d, shot_angle(x, y)))
        goals[i] = float(u[i] < config.true_xg(x, y))
    return np.asarray(feats, dtype=float), goals
