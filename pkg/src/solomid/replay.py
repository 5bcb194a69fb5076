"""Replay files: one JSON line per tick (orders + state digest); verifiable."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .protocol import BotCommand, decode_bot_command, encode_bot_command
from .world import TEAMS, MatchConfig, World


@dataclass
class ReplayWriter:
    path: str
    config: MatchConfig
    seed: int
    bot_team: int | None = None

    def __post_init__(self):
        self._fh = open(self.path, "w", encoding="utf-8")
        header = {
            "type": "header",
            "version": 1,
            "radiant_hero": self.config.radiant_hero,
            "dire_hero": self.config.dire_hero,
            "seed": self.seed,
            "bot_team": self.bot_team,
        }
        self._write(header)

    def _write(self, obj: dict) -> None:
        self._fh.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")

    def record(self, tick: int, orders: dict[int, BotCommand | None],
               digest: str) -> None:
        self._write({
            "type": "tick",
            "tick": tick,
            "orders": {str(t): None if orders.get(t) is None
                       else encode_bot_command(orders[t]) for t in TEAMS},
            "digest": digest,
        })

    def close(self) -> None:
        self._fh.close()


def verify_replay(path: str | Path) -> tuple[bool, str]:
    """Re-simulate a replay and compare per-tick digests.

    Returns (ok, detail); detail names the first mismatching tick on failure.
    """
    with open(path, encoding="utf-8") as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    if not lines or lines[0].get("type") != "header":
        return False, "missing header line"
    header = lines[0]
    world = World(MatchConfig(radiant_hero=header["radiant_hero"],
                              dire_hero=header["dire_hero"]), header["seed"])
    for entry in lines[1:]:
        if entry.get("type") != "tick":
            return False, f"unexpected line type {entry.get('type')!r}"
        if entry["tick"] != world.tick:
            return False, f"tick gap: file {entry['tick']}, world {world.tick}"
        for team in TEAMS:
            wire = entry["orders"].get(str(team))
            if wire is not None:
                world.submit_order(team, decode_bot_command(wire))
        world.step()
        if world.digest() != entry["digest"]:
            return False, f"digest mismatch at tick {entry['tick']}"
    return True, f"{len(lines) - 1} ticks verified"
