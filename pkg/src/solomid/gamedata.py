"""Loaders for the shipped balance table and lane map geometry."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

DATA_DIR = Path(__file__).parent / "data"


class GameDataError(Exception):
    """Raised when a data file is missing fields or fails validation."""


@dataclass(frozen=True, slots=True)
class AbilityDef:
    slot: int
    name: str
    kind: str  # "nuke" | "aoe_root"
    mana_cost: int
    cooldown_seconds: float
    cast_range: float
    damage: int
    damage_per_level: int
    radius: float
    root_seconds: float

    def damage_at(self, level: int) -> int:
        return self.damage + self.damage_per_level * (level - 1)


@dataclass(frozen=True, slots=True)
class HeroDef:
    name: str
    archetype: str
    max_health: int
    max_mana: int
    move_speed: float
    attack_damage: int
    attack_interval_seconds: float
    attack_range: float
    projectile_speed: float
    abilities: tuple[AbilityDef, ...]


@dataclass(frozen=True, slots=True)
class CreepDef:
    kind: str
    max_health: int
    attack_damage: int
    attack_interval_seconds: float
    attack_range: float
    move_speed: float
    projectile_speed: float
    gold_bounty: int
    xp_bounty: int


@dataclass(frozen=True, slots=True)
class TowerDef:
    max_health: int
    attack_damage: int
    attack_interval_seconds: float
    attack_range: float
    projectile_speed: float


@dataclass(frozen=True, slots=True)
class ItemDef:
    name: str
    price: int
    charges: int
    heal_total: int
    heal_duration_seconds: float


@dataclass(frozen=True, slots=True)
class Balance:
    version: int
    starting_gold: int
    passive_gold_per_second: int
    sell_refund_ratio: float
    max_level: int
    xp_threshold_factor: int
    xp_radius: float
    health_per_level: int
    mana_per_level: int
    damage_per_level: int
    respawn_base_seconds: float
    respawn_per_level_seconds: float
    hero_bounty_gold: int
    hero_bounty_xp_per_level: int
    vision: dict[str, float]
    mana_regen_per_second: float
    fountain_health_per_second: int
    fountain_mana_per_second: float
    fountain_radius: float
    tower: TowerDef
    creeps: dict[str, CreepDef]
    wave_first_spawn_seconds: float
    wave_interval_seconds: float
    wave_melee_count: int
    wave_ranged_count: int
    wave_ranged_setback: float
    courier_move_speed: float
    courier_transfer_radius: float
    items: dict[str, ItemDef]
    heroes: dict[str, HeroDef]

    @property
    def roster(self) -> tuple[str, ...]:
        return tuple(self.heroes)


@dataclass(frozen=True, slots=True)
class TeamGeometry:
    base: tuple[float, float]
    tier1_tower: tuple[float, float]
    creep_spawn: tuple[float, float]
    tower_name: str


@dataclass(frozen=True, slots=True)
class MapData:
    version: int
    bounds_min: float
    bounds_max: float
    teams: dict[int, TeamGeometry]
    lane_waypoints: tuple[tuple[float, float], ...]
    lane_corridor: tuple[tuple[float, float], ...]

    def waypoints_for(self, team: int) -> tuple[tuple[float, float], ...]:
        """Lane waypoints ordered in team's push direction."""
        if team == 2:
            return self.lane_waypoints
        return tuple(reversed(self.lane_waypoints))

    def in_bounds(self, x: float, y: float) -> bool:
        return (self.bounds_min <= x <= self.bounds_max
                and self.bounds_min <= y <= self.bounds_max)


def level_for_xp(xp: int, factor: int = 100, max_level: int = 25) -> int:
    """Level reached at a cumulative xp total: reaching level L+1 costs factor*L^2."""
    if xp < 0:
        raise ValueError(f"negative xp: {xp}")
    return min(max_level, math.isqrt(xp // factor) + 1)


def xp_to_reach(level: int, factor: int = 100) -> int:
    """Cumulative xp needed to reach a level (level 1 is free)."""
    return factor * (level - 1) ** 2


def point_in_convex_polygon(x: float, y: float,
                            polygon: tuple[tuple[float, float], ...]) -> bool:
    """True if (x, y) lies inside or on a convex CCW polygon."""
    n = len(polygon)
    for i in range(n):
        ax, ay = polygon[i]
        bx, by = polygon[(i + 1) % n]
        if (bx - ax) * (y - ay) - (by - ay) * (x - ax) < 0:
            return False
    return True


def _load_json(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise GameDataError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise GameDataError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise GameDataError(f"{path}: top level must be an object")
    return data


def _get(obj: dict, key: str, where: str):
    try:
        return obj[key]
    except KeyError:
        raise GameDataError(f"{where}: missing {key!r}") from None


def load_balance(path: str | Path | None = None) -> Balance:
    path = Path(path) if path else DATA_DIR / "balance.json"
    data = _load_json(path)
    where = str(path)
    try:
        gain = _get(data, "level_gain", where)
        respawn = _get(data, "respawn", where)
        bounty = _get(data, "hero_bounty", where)
        regen = _get(data, "regen", where)
        tower = _get(data, "tower", where)
        wave = _get(data, "wave", where)
        courier = _get(data, "courier", where)

        creeps = {}
        for kind, c in _get(data, "creeps", where).items():
            creeps[kind] = CreepDef(
                kind=kind,
                max_health=int(c["max_health"]),
                attack_damage=int(c["attack_damage"]),
                attack_interval_seconds=float(c["attack_interval_seconds"]),
                attack_range=float(c["attack_range"]),
                move_speed=float(c["move_speed"]),
                projectile_speed=float(c["projectile_speed"]),
                gold_bounty=int(c["gold_bounty"]),
                xp_bounty=int(c["xp_bounty"]),
            )

        items = {}
        for name, it in _get(data, "items", where).items():
            items[name] = ItemDef(
                name=name,
                price=int(it["price"]),
                charges=int(it["charges"]),
                heal_total=int(it["heal_total"]),
                heal_duration_seconds=float(it["heal_duration_seconds"]),
            )

        heroes = {}
        for name, h in _get(data, "heroes", where).items():
            abilities = tuple(
                AbilityDef(
                    slot=int(a["slot"]),
                    name=str(a["name"]),
                    kind=str(a["kind"]),
                    mana_cost=int(a["mana_cost"]),
                    cooldown_seconds=float(a["cooldown_seconds"]),
                    cast_range=float(a["cast_range"]),
                    damage=int(a["damage"]),
                    damage_per_level=int(a["damage_per_level"]),
                    radius=float(a["radius"]),
                    root_seconds=float(a["root_seconds"]),
                )
                for a in h["abilities"]
            )
            if tuple(a.slot for a in abilities) != tuple(range(len(abilities))):
                raise GameDataError(f"{where}: hero {name!r} ability slots must be 0..n-1")
            heroes[name] = HeroDef(
                name=name,
                archetype=str(h["archetype"]),
                max_health=int(h["max_health"]),
                max_mana=int(h["max_mana"]),
                move_speed=float(h["move_speed"]),
                attack_damage=int(h["attack_damage"]),
                attack_interval_seconds=float(h["attack_interval_seconds"]),
                attack_range=float(h["attack_range"]),
                projectile_speed=float(h["projectile_speed"]),
                abilities=abilities,
            )

        balance = Balance(
            version=int(_get(data, "version", where)),
            starting_gold=int(_get(data, "starting_gold", where)),
            passive_gold_per_second=int(_get(data, "passive_gold_per_second", where)),
            sell_refund_ratio=float(_get(data, "sell_refund_ratio", where)),
            max_level=int(_get(data, "max_level", where)),
            xp_threshold_factor=int(_get(data, "xp_threshold_factor", where)),
            xp_radius=float(_get(data, "xp_radius", where)),
            health_per_level=int(gain["health"]),
            mana_per_level=int(gain["mana"]),
            damage_per_level=int(gain["damage"]),
            respawn_base_seconds=float(respawn["base_seconds"]),
            respawn_per_level_seconds=float(respawn["per_level_seconds"]),
            hero_bounty_gold=int(bounty["gold"]),
            hero_bounty_xp_per_level=int(bounty["xp_per_level"]),
            vision={k: float(v) for k, v in _get(data, "vision", where).items()},
            mana_regen_per_second=float(regen["mana_per_second"]),
            fountain_health_per_second=int(regen["fountain_health_per_second"]),
            fountain_mana_per_second=float(regen["fountain_mana_per_second"]),
            fountain_radius=float(regen["fountain_radius"]),
            tower=TowerDef(
                max_health=int(tower["max_health"]),
                attack_damage=int(tower["attack_damage"]),
                attack_interval_seconds=float(tower["attack_interval_seconds"]),
                attack_range=float(tower["attack_range"]),
                projectile_speed=float(tower["projectile_speed"]),
            ),
            creeps=creeps,
            wave_first_spawn_seconds=float(wave["first_spawn_seconds"]),
            wave_interval_seconds=float(wave["interval_seconds"]),
            wave_melee_count=int(wave["melee_count"]),
            wave_ranged_count=int(wave["ranged_count"]),
            wave_ranged_setback=float(wave["ranged_spawn_setback"]),
            courier_move_speed=float(courier["move_speed"]),
            courier_transfer_radius=float(courier["transfer_radius"]),
            items=items,
            heroes=heroes,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GameDataError(f"{where}: bad balance data: {exc}") from exc

    if not balance.heroes:
        raise GameDataError(f"{where}: hero roster is empty")
    for key in ("hero", "creep", "tower", "courier"):
        if key not in balance.vision:
            raise GameDataError(f"{where}: vision missing {key!r}")
    if balance.wave_interval_seconds <= 0:
        raise GameDataError(f"{where}: wave interval must be positive")
    return balance


def load_map(path: str | Path | None = None) -> MapData:
    path = Path(path) if path else DATA_DIR / "map.json"
    data = _load_json(path)
    where = str(path)
    try:
        bounds = _get(data, "bounds", where)
        teams = {}
        for team_key, t in _get(data, "teams", where).items():
            teams[int(team_key)] = TeamGeometry(
                base=(float(t["base"][0]), float(t["base"][1])),
                tier1_tower=(float(t["tier1_tower"][0]), float(t["tier1_tower"][1])),
                creep_spawn=(float(t["creep_spawn"][0]), float(t["creep_spawn"][1])),
                tower_name=str(t["tower_name"]),
            )
        waypoints = tuple((float(p[0]), float(p[1]))
                          for p in _get(data, "lane_waypoints", where))
        corridor = tuple((float(p[0]), float(p[1]))
                         for p in _get(data, "lane_corridor", where))
        mapdata = MapData(
            version=int(_get(data, "version", where)),
            bounds_min=float(bounds["min"]),
            bounds_max=float(bounds["max"]),
            teams=teams,
            lane_waypoints=waypoints,
            lane_corridor=corridor,
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise GameDataError(f"{where}: bad map data: {exc}") from exc

    if set(mapdata.teams) != {2, 3}:
        raise GameDataError(f"{where}: teams must be exactly 2 and 3")
    if len(mapdata.lane_waypoints) < 2:
        raise GameDataError(f"{where}: need at least two lane waypoints")
    if len(mapdata.lane_corridor) < 3:
        raise GameDataError(f"{where}: corridor polygon needs >= 3 vertices")
    if mapdata.bounds_min >= mapdata.bounds_max:
        raise GameDataError(f"{where}: bounds inverted")
    for team, geo in mapdata.teams.items():
        for px, py in (geo.base, geo.tier1_tower, geo.creep_spawn):
            if not mapdata.in_bounds(px, py):
                raise GameDataError(f"{where}: team {team} point ({px}, {py}) out of bounds")
    return mapdata
