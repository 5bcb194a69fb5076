"""Built-in scripted opponents the harness fields against external bots."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .gamedata import Balance, MapData, load_balance, load_map
from .protocol import Attack, BotCommand, EntityRecord, EntitySnapshot, Move, Noop, Vec3

PERSONALITY_NAMES = ("passive", "laner", "aggressive")


@dataclass(frozen=True, slots=True)
class BuiltinPersonality:
    name: str
    hero: str
    aggression_range: float
    retreat_threshold: float


@dataclass(slots=True)
class BuiltinState:
    team: int
    rng: random.Random
    balance: Balance = field(default_factory=load_balance)
    mapdata: MapData = field(default_factory=load_map)


def make_personality(name: str, hero: str) -> BuiltinPersonality:
    if name == "passive":
        return BuiltinPersonality(name, hero, aggression_range=0.0,
                                  retreat_threshold=0.05)
    if name == "laner":
        return BuiltinPersonality(name, hero, aggression_range=600.0,
                                  retreat_threshold=0.35)
    if name == "aggressive":
        return BuiltinPersonality(name, hero, aggression_range=900.0,
                                  retreat_threshold=0.2)
    raise ValueError(f"unknown personality {name!r}; expected one of {PERSONALITY_NAMES}")


def make_state(team: int, seed: int) -> BuiltinState:
    return BuiltinState(team=team, rng=random.Random(seed))


def _own_hero(snapshot: EntitySnapshot, team: int) -> EntityRecord | None:
    for rec in snapshot.entities.values():
        if rec.type == "Hero" and rec.team == team:
            return rec
    return None


def _max_health(rec: EntityRecord, balance: Balance) -> int:
    base = balance.heroes[rec.name].max_health
    return base + balance.health_per_level * (rec.level - 1)


def _nearest(records, x: float, y: float):
    best, best_key = None, None
    for rec in records:
        d = math.hypot(rec.origin.x - x, rec.origin.y - y)
        key = (d, rec.id)
        if best_key is None or key < best_key:
            best, best_key = rec, key
    return best, (best_key[0] if best_key else None)


def _forward_point(state: BuiltinState, x: float, y: float) -> tuple[float, float]:
    sign = 1.0 if state.team == 2 else -1.0
    progress = sign * (x + y) / 2.0
    for wx, wy in state.mapdata.waypoints_for(state.team):
        if sign * (wx + wy) / 2.0 > progress + 100.0:
            return wx, wy
    return state.mapdata.teams[5 - state.team].base


def builtin_decide(snapshot: EntitySnapshot, personality: BuiltinPersonality,
                   state: BuiltinState) -> BotCommand:
    """One deterministic decision from the team's visible snapshot."""
    if personality.name == "passive":
        return Noop()
    hero = _own_hero(snapshot, state.team)
    if hero is None:
        return Noop()

    if hero.health / _max_health(hero, state.balance) < personality.retreat_threshold:
        base = state.mapdata.teams[state.team].base
        return Move(Vec3(base[0], base[1], 0.0))

    hx, hy = hero.origin.x, hero.origin.y
    foes = [rec for rec in snapshot.entities.values()
            if rec.team != state.team and rec.type in ("Hero", "Creep")]
    target, dist = _nearest(foes, hx, hy)
    if target is not None and dist <= personality.aggression_range:
        return Attack(target=target.id)

    if personality.name == "aggressive":
        towers = [rec for rec in snapshot.entities.values()
                  if rec.team != state.team and rec.type == "Tower"]
        tower, tdist = _nearest(towers, hx, hy)
        if tower is not None and tdist <= personality.aggression_range:
            return Attack(target=tower.id)
        fx, fy = _forward_point(state, hx, hy)
        return Move(Vec3(fx, fy, 0.0))

    # laner: hold the lane near the own tower
    hold = state.mapdata.teams[state.team].tier1_tower
    if math.hypot(hold[0] - hx, hold[1] - hy) > 300.0:
        return Move(Vec3(hold[0], hold[1], 0.0))
    return Noop()
