"""Competition series runner: schedules matches, tallies results, ranks bots."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .builtin_ai import PERSONALITY_NAMES, make_personality
from .gateway import (
    DEFAULT_FAILURE_THRESHOLD,
    DEFAULT_MAX_TICKS,
    MODE_FAST,
    MODES,
    BotEndpoint,
    DriverConfig,
    MatchDriver,
    ScheduledChat,
)
from .gamedata import load_balance
from .protocol import EndpointConfig


class SeriesAborted(Exception):
    """Raised when the series cannot start (bot precheck failed)."""


@dataclass(frozen=True, slots=True)
class Opponent:
    hero: str
    personality: str


@dataclass
class SeriesConfig:
    bots: list[tuple[str, EndpointConfig]]
    opponents: list[Opponent]
    matches_per_opponent: int = 1
    seed_base: int = 0
    mode: str = MODE_FAST
    max_ticks: int = DEFAULT_MAX_TICKS
    failure_threshold: int = DEFAULT_FAILURE_THRESHOLD
    log_dir: str | None = None
    chat_script: tuple[ScheduledChat, ...] = ()

    def validate(self) -> None:
        if not self.bots:
            raise ValueError("series needs at least one bot")
        names = [name for name, _ in self.bots]
        if len(set(names)) != len(names):
            raise ValueError("bot names must be unique")
        if not self.opponents:
            raise ValueError("series needs at least one opponent")
        if self.matches_per_opponent < 1:
            raise ValueError("matches_per_opponent must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        roster = load_balance().roster
        for opponent in self.opponents:
            if opponent.hero not in roster:
                raise ValueError(f"unknown opponent hero {opponent.hero!r}")
            if opponent.personality not in PERSONALITY_NAMES:
                raise ValueError(
                    f"unknown personality {opponent.personality!r}")


def default_opponents() -> list[Opponent]:
    """Every roster hero under each fighting personality."""
    roster = load_balance().roster
    return [Opponent(hero, personality)
            for personality in ("laner", "aggressive") for hero in roster]


@dataclass(frozen=True, slots=True)
class MatchRecord:
    bot: str
    opponent: Opponent
    seed: int
    winner_team: int | None
    reason: str
    ticks: int
    protocol_errors: int
    warnings: int
    transport_failures: int
    bot_won: bool

    def as_dict(self) -> dict:
        return {
            "bot": self.bot,
            "opponentHero": self.opponent.hero,
            "opponentPersonality": self.opponent.personality,
            "seed": self.seed,
            "winnerTeam": self.winner_team,
            "reason": self.reason,
            "ticks": self.ticks,
            "protocolErrors": self.protocol_errors,
            "warnings": self.warnings,
            "transportFailures": self.transport_failures,
            "botWon": self.bot_won,
        }


@dataclass
class BotRecord:
    name: str
    wins: int = 0
    losses: int = 0
    draws: int = 0
    forfeits: int = 0
    protocol_errors: int = 0

    @property
    def matches(self) -> int:
        return self.wins + self.losses + self.draws + self.forfeits

    def as_dict(self) -> dict:
        return {"name": self.name, "wins": self.wins, "losses": self.losses,
                "draws": self.draws, "forfeits": self.forfeits,
                "protocolErrors": self.protocol_errors}


@dataclass
class SeriesRanking:
    records: list[BotRecord] = field(default_factory=list)
    matches: list[MatchRecord] = field(default_factory=list)
    seed_base: int = 0
    mode: str = MODE_FAST

    def sort(self) -> None:
        # most wins first; fewer protocol errors breaks ties, then name
        self.records.sort(key=lambda r: (-r.wins, r.protocol_errors, r.name))


def _tally(record: BotRecord, match: MatchRecord) -> None:
    if match.bot_won:
        record.wins += 1
    elif match.reason == "forfeit":
        record.forfeits += 1  # a loss for ranking purposes, reported apart
    elif match.winner_team is None:
        record.draws += 1
    else:
        record.losses += 1
    record.protocol_errors += match.protocol_errors


def run_series(config: SeriesConfig) -> SeriesRanking:
    config.validate()

    endpoints = {name: BotEndpoint(endpoint_config)
                 for name, endpoint_config in config.bots}
    for name, endpoint in endpoints.items():
        if not endpoint.call_test():
            raise SeriesAborted(f"bot {name!r} is unreachable"
                                " (the /test probe failed)")

    log_dir = Path(config.log_dir) if config.log_dir else None
    if log_dir:
        log_dir.mkdir(parents=True, exist_ok=True)

    ranking = SeriesRanking(seed_base=config.seed_base, mode=config.mode)
    for name, _ in config.bots:
        record = BotRecord(name=name)
        for match_index, opponent, seed in _schedule(config):
            stem = (f"{name}-m{match_index:03d}"
                    f"-{opponent.personality}-{opponent.hero}")
            driver_config = DriverConfig(
                opponent_hero=opponent.hero,
                personality=make_personality(opponent.personality,
                                             opponent.hero),
                seed=seed,
                mode=config.mode,
                max_ticks=config.max_ticks,
                failure_threshold=config.failure_threshold,
                log_path=str(log_dir / f"{stem}.log.jsonl") if log_dir else None,
                replay_path=(str(log_dir / f"{stem}.replay.jsonl")
                             if log_dir else None),
                chat_script=config.chat_script,
            )
            result = MatchDriver(endpoints[name], driver_config).run()
            match = MatchRecord(
                bot=name, opponent=opponent, seed=seed,
                winner_team=result.winner_team, reason=result.reason,
                ticks=result.ticks, protocol_errors=result.protocol_errors,
                warnings=result.warnings,
                transport_failures=result.transport_failures,
                bot_won=result.winner_team == result.bot_team)
            ranking.matches.append(match)
            _tally(record, match)
        ranking.records.append(record)
    ranking.sort()
    return ranking


def _schedule(config: SeriesConfig):
    match_index = 0
    for opponent in config.opponents:
        for _ in range(config.matches_per_opponent):
            yield match_index, opponent, config.seed_base + match_index
            match_index += 1


def inject_chat(match: MatchDriver, text: str, from_team: int,
                team_only: bool = True, player: int = 5) -> None:
    """Deliver a chat line to a running match before its next update."""
    match.inject_chat(text, from_team=from_team, team_only=team_only,
                      player=player)


def render_report(ranking: SeriesRanking) -> tuple[str, str]:
    """Render a ranking as (text table, JSON document) with matching numbers."""
    headers = ("rank", "bot", "wins", "losses", "draws", "forfeits",
               "protocolErrors")
    rows = [(str(i + 1), r.name, str(r.wins), str(r.losses), str(r.draws),
             str(r.forfeits), str(r.protocol_errors))
            for i, r in enumerate(ranking.records)]
    widths = [max(len(h), *(len(row[col]) for row in rows)) if rows else len(h)
              for col, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip(),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
              for row in rows]
    total = len(ranking.matches)
    lines.append(f"{total} match{'es' if total != 1 else ''} played"
                 f" (mode={ranking.mode}, seedBase={ranking.seed_base})")
    text = "\n".join(lines) + "\n"

    doc = {
        "mode": ranking.mode,
        "seedBase": ranking.seed_base,
        "totalMatches": total,
        "ranking": [{"rank": i + 1, **r.as_dict()}
                    for i, r in enumerate(ranking.records)],
        "matches": [m.as_dict() for m in ranking.matches],
    }
    return text, json.dumps(doc, indent=2, sort_keys=True) + "\n"
