"""Deterministic fixed-timestep match simulator for the 1v1 mid-lane game."""
from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field

from .gamedata import (
    AbilityDef,
    Balance,
    CreepDef,
    HeroDef,
    MapData,
    level_for_xp,
    load_balance,
    load_map,
    xp_to_reach,
)
from .protocol import (
    AbilityInfo,
    Attack,
    BotCommand,
    Buy,
    Cast,
    EntityRecord,
    EntitySnapshot,
    ItemInfo,
    Move,
    Noop,
    Sell,
    UseItem,
    Vec3,
    encode_bot_command,
)

DT = 1.0 / 30.0
TICKS_PER_SECOND = 30

TEAM_RADIANT = 2
TEAM_DIRE = 3
TEAMS = (TEAM_RADIANT, TEAM_DIRE)

HERO_IDS = {TEAM_RADIANT: 101, TEAM_DIRE: 102}
TOWER_IDS = {TEAM_RADIANT: 750, TEAM_DIRE: 760}
COURIER_IDS = {TEAM_RADIANT: 301, TEAM_DIRE: 302}
FIRST_CREEP_ID = 1000

ITEM_SLOTS = 6
WAYPOINT_ARRIVAL = 50.0

CREEP_NAMES = {"melee": "npc_dota_creep_lane_melee", "ranged": "npc_dota_creep_lane_ranged"}
COURIER_NAME = "npc_dota_courier"

REASON_TOWER = "tower-destroyed"
REASON_FORFEIT = "forfeit"
REASON_DRAW = "draw"


def other_team(team: int) -> int:
    return TEAM_DIRE if team == TEAM_RADIANT else TEAM_RADIANT


def respawn_time(level: int) -> float:
    """Respawn delay in seconds; grows strictly with level."""
    return 4.0 + 2.0 * level


def seconds_to_ticks(seconds: float) -> int:
    return max(1, round(seconds * TICKS_PER_SECOND))


class IllegalStateError(Exception):
    """Raised when stepping a world whose match already ended."""


@dataclass(frozen=True, slots=True)
class MatchConfig:
    radiant_hero: str
    dire_hero: str
    balance_path: str | None = None
    map_path: str | None = None


@dataclass(frozen=True, slots=True)
class MatchOutcome:
    winner_team: int | None
    reason: str  # "tower-destroyed" | "forfeit" | "draw"
    end_tick: int


@dataclass(slots=True)
class HealEffect:
    total: int
    duration_ticks: int
    elapsed: int = 0

    def next_amount(self) -> int:
        # integer drip: cumulative floor keeps the sum exact
        done = self.total * self.elapsed // self.duration_ticks
        now = self.total * (self.elapsed + 1) // self.duration_ticks
        return now - done


@dataclass(slots=True)
class AbilityState:
    definition: AbilityDef
    level: int = 0
    cooldown_ticks: int = 0


@dataclass(slots=True)
class ItemState:
    slot: int
    name: str
    charges: int


@dataclass(slots=True)
class HeroUnit:
    id: int
    team: int
    definition: HeroDef
    x: float
    y: float
    health: int
    max_health: int
    mana: float
    max_mana: int
    level: int = 1
    xp: int = 0
    gold: int = 0
    attack_damage: int = 0
    attack_cooldown: int = 0
    alive: bool = True
    respawn_at_tick: int | None = None
    root_ticks: int = 0
    ability_cursor: int = 0
    abilities: list[AbilityState] = field(default_factory=list)
    items: dict[int, ItemState] = field(default_factory=dict)
    heal_effects: list[HealEffect] = field(default_factory=list)

    def free_slot(self) -> int | None:
        for slot in range(ITEM_SLOTS):
            if slot not in self.items:
                return slot
        return None


@dataclass(slots=True)
class TowerUnit:
    id: int
    team: int
    name: str
    x: float
    y: float
    health: int
    max_health: int
    attack_cooldown: int = 0
    alive: bool = True


@dataclass(slots=True)
class CreepUnit:
    id: int
    team: int
    definition: CreepDef
    x: float
    y: float
    health: int
    max_health: int
    waypoint_idx: int = 0
    attack_cooldown: int = 0
    root_ticks: int = 0
    alive: bool = True


@dataclass(slots=True)
class CourierUnit:
    id: int
    team: int
    x: float
    y: float
    phase: str = "idle"  # "idle" | "to_hero" | "to_base"
    cargo: list[ItemState] = field(default_factory=list)


@dataclass(slots=True)
class Projectile:
    id: int
    team: int
    source_id: int
    source_is_hero: bool
    target_id: int
    x: float
    y: float
    speed: float
    damage: int


class World:
    """Authoritative match state; step() advances exactly one tick."""

    def __init__(self, config: MatchConfig, seed: int,
                 balance: Balance | None = None, mapdata: MapData | None = None):
        self.config = config
        self.seed = seed
        self.balance = balance or load_balance(config.balance_path)
        self.map = mapdata or load_map(config.map_path)
        roster = self.balance.roster
        for hero_name in (config.radiant_hero, config.dire_hero):
            if hero_name not in roster:
                raise ValueError(f"hero {hero_name!r} not on roster {roster}")

        self.tick = 0
        self.rng = random.Random(seed)
        self.outcome: MatchOutcome | None = None
        self.orders: dict[int, BotCommand | None] = {t: None for t in TEAMS}
        self.pending_items: dict[int, list[str]] = {t: [] for t in TEAMS}
        self.rejections: list[tuple[int, int, str]] = []
        self.kills: list[dict] = []
        self._next_creep_id = FIRST_CREEP_ID
        self._next_projectile_id = 1
        self.projectiles: list[Projectile] = []
        self.creeps: list[CreepUnit] = []

        self.heroes: dict[int, HeroUnit] = {}
        self.towers: dict[int, TowerUnit] = {}
        self.couriers: dict[int, CourierUnit] = {}
        picks = {TEAM_RADIANT: config.radiant_hero, TEAM_DIRE: config.dire_hero}
        for team in TEAMS:
            geo = self.map.teams[team]
            definition = self.balance.heroes[picks[team]]
            self.heroes[team] = HeroUnit(
                id=HERO_IDS[team],
                team=team,
                definition=definition,
                x=geo.base[0],
                y=geo.base[1],
                health=definition.max_health,
                max_health=definition.max_health,
                mana=float(definition.max_mana),
                max_mana=definition.max_mana,
                gold=self.balance.starting_gold,
                attack_damage=definition.attack_damage,
                abilities=[AbilityState(definition=a) for a in definition.abilities],
            )
            # level 1 grants the first ability point
            self._grant_ability_point(self.heroes[team])
            self.towers[team] = TowerUnit(
                id=TOWER_IDS[team],
                team=team,
                name=geo.tower_name,
                x=geo.tier1_tower[0],
                y=geo.tier1_tower[1],
                health=self.balance.tower.max_health,
                max_health=self.balance.tower.max_health,
            )
            self.couriers[team] = CourierUnit(
                id=COURIER_IDS[team], team=team, x=geo.base[0], y=geo.base[1])

    # --- time -------------------------------------------------------------

    @property
    def clock(self) -> float:
        return self.tick * DT

    # --- lookup -----------------------------------------------------------

    def entity_by_id(self, eid: int):
        """(kind, unit) for a living entity id, else (None, None)."""
        for hero in self.heroes.values():
            if hero.id == eid and hero.alive:
                return "hero", hero
        for tower in self.towers.values():
            if tower.id == eid and tower.alive:
                return "tower", tower
        for creep in self.creeps:
            if creep.id == eid and creep.alive:
                return "creep", creep
        for courier in self.couriers.values():
            if courier.id == eid:
                return "courier", courier
        return None, None

    def _living_units(self, team: int, with_courier: bool = True):
        hero = self.heroes[team]
        if hero.alive:
            yield "hero", hero
        tower = self.towers[team]
        if tower.alive:
            yield "tower", tower
        for creep in self.creeps:
            if creep.team == team and creep.alive:
                yield "creep", creep
        if with_courier:
            yield "courier", self.couriers[team]

    def _vision_of(self, kind: str) -> float:
        return self.balance.vision[kind]

    def visible_enemy_ids(self, team: int) -> set[int]:
        """Enemy entity ids within some living ally's vision radius."""
        allies = list(self._living_units(team))
        out: set[int] = set()
        for _, enemy in self._living_units(other_team(team)):
            ex, ey = enemy.x, enemy.y
            for akind, ally in allies:
                if _dist(ally.x, ally.y, ex, ey) <= self._vision_of(akind):
                    out.add(enemy.id)
                    break
        return out

    # --- order submission -------------------------------------------------

    def submit_order(self, team: int, command: BotCommand) -> bool:
        """Validate and store a command as the team's sticky order.

        Returns False (and logs) on rejection; Noop never changes the order.
        """
        if team not in TEAMS:
            return self._reject(team, "unknown team")
        if isinstance(command, Noop):
            return True
        hero = self.heroes[team]
        if not hero.alive:
            return self._reject(team, "hero is dead")

        if isinstance(command, Move):
            t = command.target
            if not t.is_finite():
                return self._reject(team, "move target not finite")
            if not self.map.in_bounds(t.x, t.y):
                return self._reject(team, "move target out of bounds")
        elif isinstance(command, Attack):
            err = self._check_enemy_target(team, command.target)
            if err:
                return self._reject(team, f"attack: {err}")
        elif isinstance(command, Cast):
            err = self._check_cast(hero, team, command)
            if err:
                return self._reject(team, f"cast: {err}")
        elif isinstance(command, Buy):
            item = self.balance.items.get(command.item)
            if item is None:
                return self._reject(team, f"buy: unknown item {command.item!r}")
            if hero.gold < item.price:
                return self._reject(team, "buy: not enough gold")
            in_flight = len(self.pending_items[team]) + len(self.couriers[team].cargo)
            if len(hero.items) + in_flight >= ITEM_SLOTS:
                return self._reject(team, "buy: inventory full")
        elif isinstance(command, Sell):
            if command.slot not in hero.items:
                return self._reject(team, f"sell: empty slot {command.slot}")
        elif isinstance(command, UseItem):
            state = hero.items.get(command.slot)
            if state is None:
                return self._reject(team, f"use: empty slot {command.slot}")
            if state.charges <= 0:
                return self._reject(team, "use: no charges")
        else:
            return self._reject(team, f"unsupported command {command!r}")

        self.orders[team] = command
        return True

    def _reject(self, team: int, reason: str) -> bool:
        self.rejections.append((self.tick, team, reason))
        return False

    def _check_enemy_target(self, team: int, target_id: int) -> str | None:
        kind, unit = self.entity_by_id(target_id)
        if unit is None:
            return f"no living entity {target_id}"
        if kind == "courier":
            return "couriers cannot be targeted"
        if unit.team == team:
            return "cannot target an ally"
        if target_id not in self.visible_enemy_ids(team):
            return f"entity {target_id} not visible"
        return None

    def _check_cast(self, hero: HeroUnit, team: int, command: Cast) -> str | None:
        if not 0 <= command.ability < len(hero.abilities):
            return f"no ability slot {command.ability}"
        ability = hero.abilities[command.ability]
        if ability.level < 1:
            return "ability not leveled"
        if ability.cooldown_ticks > 0:
            return "ability on cooldown"
        if hero.mana < ability.definition.mana_cost:
            return "not enough mana"
        err = self._check_enemy_target(team, command.target)
        if err:
            return err
        _, target = self.entity_by_id(command.target)
        if _dist(hero.x, hero.y, target.x, target.y) > ability.definition.cast_range:
            return "target out of cast range"
        return None

    # --- stepping ---------------------------------------------------------

    def step(self) -> None:
        if self.outcome is not None:
            raise IllegalStateError(f"match already ended at tick {self.outcome.end_tick}")
        tick = self.tick

        self._process_respawns(tick)
        first = seconds_to_ticks(self.balance.wave_first_spawn_seconds)
        interval = seconds_to_ticks(self.balance.wave_interval_seconds)
        if tick >= first and (tick - first) % interval == 0:
            self.spawn_creep_wave()

        self._tick_timers()
        self._apply_regen()

        for team in TEAMS:
            self._execute_order(team)
        for creep in sorted((c for c in self.creeps if c.alive), key=lambda c: c.id):
            self._creep_act(creep)
        for team in TEAMS:
            tower = self.towers[team]
            if tower.alive:
                self._tower_act(tower)
        for team in TEAMS:
            self._courier_act(self.couriers[team])
        self._advance_projectiles()

        self.creeps = [c for c in self.creeps if c.alive]
        if tick % TICKS_PER_SECOND == TICKS_PER_SECOND - 1:
            for hero in self.heroes.values():
                hero.gold += self.balance.passive_gold_per_second

        result = self.check_terminal()
        if result is not None:
            self.outcome = result
        self.tick = tick + 1

    def check_terminal(self) -> MatchOutcome | None:
        dead = [team for team in TEAMS if not self.towers[team].alive]
        if not dead:
            return None
        if len(dead) == 2:
            return MatchOutcome(winner_team=None, reason=REASON_DRAW, end_tick=self.tick)
        return MatchOutcome(winner_team=other_team(dead[0]), reason=REASON_TOWER,
                            end_tick=self.tick)

    # --- per-phase helpers ------------------------------------------------

    def _process_respawns(self, tick: int) -> None:
        for hero in self.heroes.values():
            if not hero.alive and hero.respawn_at_tick is not None \
                    and tick >= hero.respawn_at_tick:
                geo = self.map.teams[hero.team]
                hero.alive = True
                hero.respawn_at_tick = None
                hero.x, hero.y = geo.base
                hero.health = hero.max_health
                hero.mana = float(hero.max_mana)
                hero.root_ticks = 0
                hero.attack_cooldown = 0

    def _tick_timers(self) -> None:
        for hero in self.heroes.values():
            hero.attack_cooldown = max(0, hero.attack_cooldown - 1)
            hero.root_ticks = max(0, hero.root_ticks - 1)
            for ability in hero.abilities:
                ability.cooldown_ticks = max(0, ability.cooldown_ticks - 1)
        for tower in self.towers.values():
            tower.attack_cooldown = max(0, tower.attack_cooldown - 1)
        for creep in self.creeps:
            creep.attack_cooldown = max(0, creep.attack_cooldown - 1)
            creep.root_ticks = max(0, creep.root_ticks - 1)

    def _apply_regen(self) -> None:
        bal = self.balance
        phase = self.tick % TICKS_PER_SECOND
        for hero in self.heroes.values():
            if not hero.alive:
                continue
            hero.mana = min(float(hero.max_mana),
                            hero.mana + bal.mana_regen_per_second * DT)
            base = self.map.teams[hero.team].base
            if _dist(hero.x, hero.y, base[0], base[1]) <= bal.fountain_radius:
                rate = bal.fountain_health_per_second
                drip = (rate * (phase + 1) // TICKS_PER_SECOND
                        - rate * phase // TICKS_PER_SECOND)
                hero.health = min(hero.max_health, hero.health + drip)
                hero.mana = min(float(hero.max_mana),
                                hero.mana + bal.fountain_mana_per_second * DT)
            kept = []
            for effect in hero.heal_effects:
                hero.health = min(hero.max_health, hero.health + effect.next_amount())
                effect.elapsed += 1
                if effect.elapsed < effect.duration_ticks:
                    kept.append(effect)
            hero.heal_effects = kept

    def _execute_order(self, team: int) -> None:
        command = self.orders[team]
        if command is None:
            return
        hero = self.heroes[team]
        if not hero.alive:
            self.orders[team] = None
            return

        if isinstance(command, Move):
            arrived = self._move_towards(hero, command.target.x, command.target.y,
                                         hero.definition.move_speed, hero.root_ticks > 0)
            if arrived:
                self.orders[team] = None
        elif isinstance(command, Attack):
            kind, target = self.entity_by_id(command.target)
            if target is None or kind == "courier" or target.team == team \
                    or command.target not in self.visible_enemy_ids(team):
                self.orders[team] = None
                return
            dist = _dist(hero.x, hero.y, target.x, target.y)
            if dist > hero.definition.attack_range:
                self._move_towards(hero, target.x, target.y,
                                   hero.definition.move_speed, hero.root_ticks > 0)
            elif hero.attack_cooldown == 0:
                self._fire(hero.id, True, hero.team, target.id, hero.x, hero.y,
                           hero.definition.projectile_speed, hero.attack_damage)
                hero.attack_cooldown = seconds_to_ticks(
                    hero.definition.attack_interval_seconds)
        elif isinstance(command, Cast):
            self._execute_cast(hero, team, command)
            self.orders[team] = None
        elif isinstance(command, Buy):
            item = self.balance.items.get(command.item)
            in_flight = len(self.pending_items[team]) + len(self.couriers[team].cargo)
            if item is not None and hero.gold >= item.price \
                    and len(hero.items) + in_flight < ITEM_SLOTS:
                hero.gold -= item.price
                self.pending_items[team].append(command.item)
            self.orders[team] = None
        elif isinstance(command, Sell):
            state = hero.items.pop(command.slot, None)
            if state is not None:
                item = self.balance.items[state.name]
                hero.gold += int(item.price * self.balance.sell_refund_ratio)
            self.orders[team] = None
        elif isinstance(command, UseItem):
            self._execute_use_item(hero, command)
            self.orders[team] = None

    def _execute_cast(self, hero: HeroUnit, team: int, command: Cast) -> None:
        if not 0 <= command.ability < len(hero.abilities):
            return
        ability = hero.abilities[command.ability]
        spec = ability.definition
        if ability.level < 1 or ability.cooldown_ticks > 0 or hero.mana < spec.mana_cost:
            return
        kind, target = self.entity_by_id(command.target)
        if target is None or kind == "courier" or target.team == team:
            return
        if _dist(hero.x, hero.y, target.x, target.y) > spec.cast_range:
            return
        hero.mana -= spec.mana_cost
        ability.cooldown_ticks = seconds_to_ticks(spec.cooldown_seconds)
        damage = spec.damage_at(ability.level)
        if spec.kind == "aoe_root":
            root = seconds_to_ticks(spec.root_seconds)
            cx, cy = target.x, target.y
            enemy = other_team(team)
            victims = []
            ehero = self.heroes[enemy]
            if ehero.alive and _dist(cx, cy, ehero.x, ehero.y) <= spec.radius:
                victims.append(("hero", ehero))
            for creep in self.creeps:
                if creep.team == enemy and creep.alive \
                        and _dist(cx, cy, creep.x, creep.y) <= spec.radius:
                    victims.append(("creep", creep))
            for vkind, victim in victims:
                victim.root_ticks = max(victim.root_ticks, root)
                self._deal_damage(vkind, victim, damage, team, True, hero.id)
        else:
            self._deal_damage(kind, target, damage, team, True, hero.id)

    def _execute_use_item(self, hero: HeroUnit, command: UseItem) -> None:
        state = hero.items.get(command.slot)
        if state is None or state.charges <= 0:
            return
        item = self.balance.items[state.name]
        hero.heal_effects.append(HealEffect(
            total=item.heal_total,
            duration_ticks=seconds_to_ticks(item.heal_duration_seconds)))
        state.charges -= 1
        if state.charges == 0:
            del hero.items[command.slot]

    def _creep_act(self, creep: CreepUnit) -> None:
        if not creep.alive:
            return  # killed earlier this tick
        spec = creep.definition
        target = self._nearest_enemy_in_range(creep.team, creep.x, creep.y,
                                              spec.attack_range, include_towers=True)
        if target is not None:
            if creep.attack_cooldown == 0:
                self._fire(creep.id, False, creep.team, target.id, creep.x, creep.y,
                           spec.projectile_speed, spec.attack_damage)
                creep.attack_cooldown = seconds_to_ticks(spec.attack_interval_seconds)
            return
        if creep.root_ticks > 0:
            return
        waypoints = self.map.waypoints_for(creep.team)
        while creep.waypoint_idx < len(waypoints) and _dist(
                creep.x, creep.y, *waypoints[creep.waypoint_idx]) <= WAYPOINT_ARRIVAL:
            creep.waypoint_idx += 1
        if creep.waypoint_idx < len(waypoints):
            goal = waypoints[creep.waypoint_idx]
        else:
            goal = self.map.teams[other_team(creep.team)].base
        self._move_towards(creep, goal[0], goal[1], spec.move_speed, False)

    def _tower_act(self, tower: TowerUnit) -> None:
        spec = self.balance.tower
        target = self._nearest_enemy_in_range(tower.team, tower.x, tower.y,
                                              spec.attack_range, include_towers=False)
        if target is not None and tower.attack_cooldown == 0:
            self._fire(tower.id, False, tower.team, target.id, tower.x, tower.y,
                       spec.projectile_speed, spec.attack_damage)
            tower.attack_cooldown = seconds_to_ticks(spec.attack_interval_seconds)

    def _nearest_enemy_in_range(self, team: int, x: float, y: float, radius: float,
                                include_towers: bool):
        best = None
        best_key = None
        enemy = other_team(team)
        candidates = []
        hero = self.heroes[enemy]
        if hero.alive:
            candidates.append(hero)
        for creep in self.creeps:
            if creep.team == enemy and creep.alive:
                candidates.append(creep)
        if include_towers and self.towers[enemy].alive:
            candidates.append(self.towers[enemy])
        for unit in candidates:
            dist = _dist(x, y, unit.x, unit.y)
            if dist > radius:
                continue
            key = (dist, unit.id)
            if best_key is None or key < best_key:
                best, best_key = unit, key
        return best

    def _courier_act(self, courier: CourierUnit) -> None:
        bal = self.balance
        base = self.map.teams[courier.team].base
        hero = self.heroes[courier.team]
        if courier.phase == "idle":
            pending = self.pending_items[courier.team]
            if pending:
                courier.cargo = [ItemState(slot=-1, name=name,
                                           charges=bal.items[name].charges)
                                 for name in pending]
                pending.clear()
                courier.phase = "to_hero"
            return
        if courier.phase == "to_hero":
            if not courier.cargo:
                courier.phase = "to_base"
                return
            if not hero.alive:
                return  # wait where it stands until the hero is back
            if _dist(courier.x, courier.y, hero.x, hero.y) <= bal.courier_transfer_radius:
                undelivered = []
                for item in courier.cargo:
                    slot = hero.free_slot()
                    if slot is None:
                        undelivered.append(item)
                        continue
                    item.slot = slot
                    hero.items[slot] = item
                courier.cargo = undelivered
                if not courier.cargo:
                    courier.phase = "to_base"
                return
            self._move_towards(courier, hero.x, hero.y, bal.courier_move_speed, False)
            return
        # to_base
        if _dist(courier.x, courier.y, base[0], base[1]) <= 1.0:
            courier.phase = "idle"
            return
        self._move_towards(courier, base[0], base[1], bal.courier_move_speed, False)

    def _advance_projectiles(self) -> None:
        kept = []
        for proj in self.projectiles:
            kind, target = self.entity_by_id(proj.target_id)
            if target is None or kind == "courier":
                continue  # fizzles
            dist = _dist(proj.x, proj.y, target.x, target.y)
            step = proj.speed * DT
            if dist <= step:
                self._deal_damage(kind, target, proj.damage, proj.team,
                                  proj.source_is_hero, proj.source_id)
                continue
            proj.x += (target.x - proj.x) / dist * step
            proj.y += (target.y - proj.y) / dist * step
            kept.append(proj)
        self.projectiles = kept

    # --- combat -----------------------------------------------------------

    def _fire(self, source_id: int, source_is_hero: bool, team: int, target_id: int,
              x: float, y: float, speed: float, damage: int) -> None:
        if speed <= 0:
            kind, target = self.entity_by_id(target_id)
            if target is not None and kind != "courier":
                self._deal_damage(kind, target, damage, team, source_is_hero, source_id)
            return
        self.projectiles.append(Projectile(
            id=self._next_projectile_id, team=team, source_id=source_id,
            source_is_hero=source_is_hero, target_id=target_id,
            x=x, y=y, speed=speed, damage=damage))
        self._next_projectile_id += 1

    def _deal_damage(self, kind: str, unit, amount: int, source_team: int,
                     source_is_hero: bool, source_id: int) -> None:
        if not unit.alive:
            return
        unit.health = max(0, unit.health - amount)
        if unit.health > 0:
            return
        unit.alive = False
        if kind == "hero":
            self._on_hero_death(unit)
        elif kind == "creep":
            self._on_creep_death(unit, source_team, source_is_hero)
        self.kills.append({"tick": self.tick, "victim": unit.id,
                           "by": source_id, "team": source_team})

    def _on_hero_death(self, hero: HeroUnit) -> None:
        hero.respawn_at_tick = self.tick + seconds_to_ticks(respawn_time(hero.level))
        hero.root_ticks = 0
        hero.heal_effects.clear()
        self.orders[hero.team] = None
        killer = self.heroes[other_team(hero.team)]
        killer.gold += self.balance.hero_bounty_gold
        self._grant_xp(killer, self.balance.hero_bounty_xp_per_level * hero.level)

    def _on_creep_death(self, creep: CreepUnit, source_team: int,
                        source_is_hero: bool) -> None:
        enemy_hero = self.heroes[other_team(creep.team)]
        if source_is_hero and source_team != creep.team:
            enemy_hero.gold += creep.definition.gold_bounty
        if enemy_hero.alive and _dist(enemy_hero.x, enemy_hero.y, creep.x, creep.y) \
                <= self.balance.xp_radius:
            self._grant_xp(enemy_hero, creep.definition.xp_bounty)

    def _grant_xp(self, hero: HeroUnit, amount: int) -> None:
        bal = self.balance
        hero.xp += amount
        target_level = level_for_xp(hero.xp, bal.xp_threshold_factor, bal.max_level)
        while hero.level < target_level:
            hero.level += 1
            hero.max_health += bal.health_per_level
            hero.health = min(hero.max_health, hero.health + bal.health_per_level)
            hero.max_mana += bal.mana_per_level
            hero.mana = min(float(hero.max_mana), hero.mana + bal.mana_per_level)
            hero.attack_damage += bal.damage_per_level
            self._grant_ability_point(hero)

    def _grant_ability_point(self, hero: HeroUnit) -> None:
        if not hero.abilities:
            return
        slot = hero.ability_cursor % len(hero.abilities)
        hero.abilities[slot].level += 1
        hero.ability_cursor += 1

    def _move_towards(self, unit, tx: float, ty: float, speed: float,
                      rooted: bool) -> bool:
        """One tick of motion; returns True when the target point is reached."""
        if rooted:
            return False
        dist = _dist(unit.x, unit.y, tx, ty)
        step = speed * DT
        if dist <= step:
            unit.x, unit.y = tx, ty
            return True
        unit.x += (tx - unit.x) / dist * step
        unit.y += (ty - unit.y) / dist * step
        lo, hi = self.map.bounds_min, self.map.bounds_max
        unit.x = min(hi, max(lo, unit.x))
        unit.y = min(hi, max(lo, unit.y))
        return False

    # --- spawning ---------------------------------------------------------

    def spawn_creep_wave(self) -> None:
        """One wave for both teams at their lane spawn points."""
        bal = self.balance
        for team in TEAMS:
            geo = self.map.teams[team]
            sx, sy = geo.creep_spawn
            bx, by = geo.base
            back = _dist(sx, sy, bx, by)
            ux, uy = (bx - sx) / back, (by - sy) / back
            for _ in range(bal.wave_melee_count):
                self._spawn_creep(team, "melee", sx, sy)
            rx = sx + ux * bal.wave_ranged_setback
            ry = sy + uy * bal.wave_ranged_setback
            for _ in range(bal.wave_ranged_count):
                self._spawn_creep(team, "ranged", rx, ry)

    def _spawn_creep(self, team: int, kind: str, x: float, y: float) -> None:
        spec = self.balance.creeps[kind]
        self.creeps.append(CreepUnit(
            id=self._next_creep_id, team=team, definition=spec, x=x, y=y,
            health=spec.max_health, max_health=spec.max_health))
        self._next_creep_id += 1

    # --- snapshots --------------------------------------------------------

    def visible_snapshot(self, team: int) -> EntitySnapshot:
        """Everything the team may see this tick: all own units, fogged enemies."""
        entities: dict[int, EntityRecord] = {}
        for kind, unit in self._living_units(team):
            entities[unit.id] = self._record_for(kind, unit)
        visible = self.visible_enemy_ids(team)
        for kind, unit in self._living_units(other_team(team)):
            if unit.id in visible:
                entities[unit.id] = self._record_for(kind, unit)
        return EntitySnapshot(entities=entities, tick=self.tick, clock=self.clock)

    def _record_for(self, kind: str, unit) -> EntityRecord:
        if kind == "hero":
            return EntityRecord(
                id=unit.id, type="Hero", name=unit.definition.name, team=unit.team,
                level=unit.level, health=unit.health, mana=unit.mana, alive=unit.alive,
                attack_range=unit.definition.attack_range,
                origin=Vec3(unit.x, unit.y, 0.0),
                rooted=unit.root_ticks > 0,
                gold=unit.gold,
                abilities=tuple(
                    AbilityInfo(slot=a.definition.slot, name=a.definition.name,
                                level=a.level,
                                cooldown_remaining=a.cooldown_ticks * DT)
                    for a in unit.abilities),
                items=tuple(
                    ItemInfo(slot=slot, name=state.name, charges=state.charges)
                    for slot, state in sorted(unit.items.items())),
            )
        if kind == "tower":
            return EntityRecord(
                id=unit.id, type="Tower", name=unit.name, team=unit.team, level=1,
                health=unit.health, mana=0.0, alive=unit.alive,
                attack_range=self.balance.tower.attack_range,
                origin=Vec3(unit.x, unit.y, 0.0))

        if kind == "creep":
            return EntityRecord(
                id=unit.id, type="Creep", name=CREEP_NAMES[unit.definition.kind],
                team=unit.team, level=0, health=unit.health, mana=0.0, alive=unit.alive,
                attack_range=unit.definition.attack_range,
                origin=Vec3(unit.x, unit.y, 0.0),
                rooted=unit.root_ticks > 0)
        return EntityRecord(
            id=unit.id, type="Courier", name=COURIER_NAME, team=unit.team, level=0,
            health=1, mana=0.0, alive=True, attack_range=0.0,
            origin=Vec3(unit.x, unit.y, 0.0))

    # --- digests ----------------------------------------------------------

    def state_dict(self) -> dict:
        """Full authoritative state as plain JSON-able data (digest input)."""
        return {
            "tick": self.tick,
            "seed": self.seed,
            "rng": hashlib.sha256(repr(self.rng.getstate()).encode()).hexdigest(),
            "orders": {str(t): None if self.orders[t] is None
                       else encode_bot_command(self.orders[t]) for t in TEAMS},
            "pending": {str(t): list(self.pending_items[t]) for t in TEAMS},
            "outcome": None if self.outcome is None else [
                self.outcome.winner_team, self.outcome.reason, self.outcome.end_tick],
            "heroes": [
                {
                    "id": h.id, "team": h.team, "name": h.definition.name,
                    "x": h.x, "y": h.y, "health": h.health, "max_health": h.max_health,
                    "mana": h.mana, "max_mana": h.max_mana, "level": h.level,
                    "xp": h.xp, "gold": h.gold, "damage": h.attack_damage,
                    "cd": h.attack_cooldown, "alive": h.alive,
                    "respawn": h.respawn_at_tick, "root": h.root_ticks,
                    "cursor": h.ability_cursor,
                    "abilities": [[a.level, a.cooldown_ticks] for a in h.abilities],
                    "items": [[s, it.name, it.charges]
                              for s, it in sorted(h.items.items())],
                    "heals": [[e.total, e.duration_ticks, e.elapsed]
                              for e in h.heal_effects],
                }
                for _, h in sorted(self.heroes.items())
            ],
            "towers": [
                {"id": t.id, "team": t.team, "health": t.health, "cd": t.attack_cooldown,
                 "alive": t.alive}
                for _, t in sorted(self.towers.items())
            ],
            "creeps": [
                {"id": c.id, "team": c.team, "kind": c.definition.kind,
                 "x": c.x, "y": c.y, "health": c.health, "wp": c.waypoint_idx,
                 "cd": c.attack_cooldown, "root": c.root_ticks}
                for c in self.creeps
            ],
            "couriers": [
                {"id": c.id, "team": c.team, "x": c.x, "y": c.y, "phase": c.phase,
                 "cargo": [[i.slot, i.name, i.charges] for i in c.cargo]}
                for _, c in sorted(self.couriers.items())
            ],
            "projectiles": [
                {"id": p.id, "team": p.team, "src": p.source_id, "dst": p.target_id,
                 "x": p.x, "y": p.y, "speed": p.speed, "damage": p.damage,
                 "hero": p.source_is_hero}
                for p in self.projectiles
            ],
        }

    def digest(self) -> str:
        payload = json.dumps(self.state_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


def init_world(config: MatchConfig, seed: int) -> World:
    return World(config, seed)


def _dist(ax: float, ay: float, bx: float, by: float) -> float:
    return math.hypot(bx - ax, by - ay)
