"""Bot-side SDK: a small HTTP service wrapper and the reference FSM bot."""
from __future__ import annotations

import json
import math
import random
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Protocol

from .gamedata import Balance, MapData, load_balance, load_map
from .protocol import (
    Attack,
    BotCommand,
    Buy,
    Cast,
    ChatEvent,
    EntityRecord,
    EntitySnapshot,
    HeroSelection,
    Move,
    Noop,
    ProtocolError,
    Vec3,
    decode_chat_event,
    decode_entity_snapshot,
    encode_bot_command,
    encode_hero_selection,
)

PHASE_SELECTING = "SELECTING"
PHASE_WALK_MID = "WALK_MID"
PHASE_FIGHT = "FIGHT"
PHASE_RETREAT = "RETREAT"
PHASE_SHOPPING = "SHOPPING"
PHASE_DEAD = "DEAD"

CHAT_GO = "lina go"
CHAT_BUY_TANGO = "lina buy tango"

DEFAULT_HERO = "npc_dota_hero_lina"
TANGO = "item_tango"


class BotHandler(Protocol):
    """What a bot must implement to be served over HTTP."""

    def on_select(self) -> HeroSelection: ...
    def on_update(self, snapshot: EntitySnapshot) -> BotCommand: ...
    def on_chat(self, event: ChatEvent) -> None: ...
    def on_test(self) -> None: ...


# --- HTTP service ---------------------------------------------------------

class BotService:
    """Running HTTP wrapper around a BotHandler; stop() shuts it down."""

    def __init__(self, server: ThreadingHTTPServer, thread: threading.Thread):
        self._server = server
        self._thread = thread

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def base_url(self) -> str:
        host = self._server.server_address[0]
        return f"http://{host}:{self.port}"

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5.0)


def serve(handler: BotHandler, host: str = "127.0.0.1", port: int = 8080,
          prefix: str = "") -> BotService:
    """Serve a bot over HTTP; port 0 picks a free port.  Calls are serialized."""
    lock = threading.Lock()
    prefix = prefix.rstrip("/")
    routes = {f"{prefix}/{name}": name for name in ("select", "update", "chat", "test")}

    class _RequestHandler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"
        # loopback latency: without TCP_NODELAY the header/body writes can
        # stall ~40 ms behind delayed ACKs, far above one 33 ms tick
        disable_nagle_algorithm = True

        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        def _reply(self, status: int, body: str) -> None:
            payload = body.encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def do_GET(self):
            self._reply(405, '{"error":"POST only"}')

        def do_POST(self):
            name = routes.get(self.path.split("?", 1)[0])
            if name is None:
                self._reply(404, '{"error":"no such endpoint"}')
                return
            length = int(self.headers.get("Content-Length") or 0)
            body = self.rfile.read(length) if length else b""
            try:
                with lock:
                    if name == "select":
                        reply = encode_hero_selection(handler.on_select())
                    elif name == "update":
                        snapshot = decode_entity_snapshot(body)
                        reply = encode_bot_command(handler.on_update(snapshot))
                    elif name == "chat":
                        handler.on_chat(decode_chat_event(body))
                        reply = "{}"
                    else:
                        handler.on_test()
                        reply = "{}"
            except ProtocolError as exc:
                self._reply(400, json.dumps({"error": str(exc)}))
                return
            except Exception as exc:  # bot bug: surface as a server error
                self._reply(500, json.dumps({"error": f"{type(exc).__name__}: {exc}"}))
                return
            self._reply(200, reply)

    server = ThreadingHTTPServer((host, port), _RequestHandler)
    server.daemon_threads = True
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return BotService(server, thread)


# --- reference bot --------------------------------------------------------

@dataclass(slots=True)
class LinaState:
    phase: str = PHASE_SELECTING
    team: int | None = None
    pending_order: str | None = None
    retreat_threshold: float = 0.35
    cast_probability: float = 0.2
    last_tick: int = 0
    rng: random.Random = field(default_factory=lambda: random.Random(0))


def _own_team(snapshot: EntitySnapshot) -> int | None:
    counts: dict[int, int] = {}
    for rec in snapshot.entities.values():
        counts[rec.team] = counts.get(rec.team, 0) + 1
    if not counts:
        return None
    # the own side is always fully visible, so it has the larger contingent
    return max(sorted(counts), key=lambda team: counts[team])


def _hero_max_health(rec: EntityRecord, balance: Balance) -> int:
    base = balance.heroes[rec.name].max_health
    return base + balance.health_per_level * (rec.level - 1)


def _nearest(records, x: float, y: float):
    best, best_d = None, None
    for rec in records:
        d = math.hypot(rec.origin.x - x, rec.origin.y - y)
        if best_d is None or (d, rec.id) < (best_d, best.id):
            best, best_d = rec, d
    return best, best_d


def _pick_cast(hero: EntityRecord, foes, balance: Balance) -> Cast | None:
    """First ready, affordable, leveled ability with a target in cast range."""
    defs = {a.name: a for a in balance.heroes[hero.name].abilities}
    hx, hy = hero.origin.x, hero.origin.y
    hero_foes = [f for f in foes if f.type == "Hero"]
    creep_foes = [f for f in foes if f.type == "Creep"]
    for ability in hero.abilities or ():
        if ability.level < 1 or ability.cooldown_remaining > 1e-9:
            continue
        spec = defs.get(ability.name)
        if spec is None or hero.mana < spec.mana_cost:
            continue
        for pool in (hero_foes, creep_foes):
            target, dist = _nearest(pool, hx, hy)
            if target is not None and dist <= spec.cast_range:
                return Cast(ability=ability.slot, target=target.id)
    return None


def lina_update(snapshot: EntitySnapshot, state: LinaState, balance: Balance,
                mapdata: MapData) -> tuple[BotCommand, LinaState]:
    """One FSM decision; mutates and returns state (phase may change)."""
    state.last_tick = snapshot.tick
    if state.team is None:
        state.team = _own_team(snapshot)
    team = state.team
    hero = None
    for rec in snapshot.entities.values():
        if rec.type == "Hero" and rec.team == team:
            hero = rec
            break
    if hero is None:
        state.phase = PHASE_DEAD
        return Noop(), state

    if hero.health / _hero_max_health(hero, balance) < state.retreat_threshold:
        state.phase = PHASE_RETREAT
        base = mapdata.teams[team].base
        return Move(Vec3(base[0], base[1], 0.0)), state

    hx, hy = hero.origin.x, hero.origin.y
    foes = [rec for rec in snapshot.entities.values()
            if rec.team != team and rec.type in ("Hero", "Creep")]
    in_range = [f for f in foes
                if math.hypot(f.origin.x - hx, f.origin.y - hy) <= hero.attack_range]
    if in_range:
        state.phase = PHASE_FIGHT
        if state.rng.random() < state.cast_probability:
            cast = _pick_cast(hero, in_range, balance)
            if cast is not None:
                return cast, state
        target, _ = _nearest(in_range, hx, hy)
        return Attack(target=target.id), state

    if state.pending_order == TANGO:
        state.pending_order = None
        state.phase = PHASE_SHOPPING
        return Buy(item=TANGO), state

    state.phase = PHASE_WALK_MID
    sign = 1.0 if team == 2 else -1.0
    progress = sign * (hx + hy) / 2.0
    for wx, wy in mapdata.waypoints_for(team):
        if sign * (wx + wy) / 2.0 > progress + 100.0:
            return Move(Vec3(wx, wy, 0.0)), state
    enemy_base = mapdata.teams[5 - team].base
    return Move(Vec3(enemy_base[0], enemy_base[1], 0.0)), state


def lina_chat(event: ChatEvent, state: LinaState) -> tuple[LinaState, str | None]:
    """Chat orders; returns (state, forced-phase or None)."""
    text = event.text.strip().lower()
    if text == CHAT_GO:
        state.phase = PHASE_WALK_MID
        return state, PHASE_WALK_MID
    if text == CHAT_BUY_TANGO:
        state.pending_order = TANGO
        return state, None
    return state, None


class LinaBot:
    """Reference FSM bot; serves the four endpoints and logs phase transitions."""

    def __init__(self, seed: int = 0, hero: str = DEFAULT_HERO,
                 retreat_threshold: float = 0.35, cast_probability: float = 0.2,
                 transition_log_path: str | None = None,
                 balance: Balance | None = None, mapdata: MapData | None = None):
        self.seed = seed
        self.hero = hero
        self.retreat_threshold = retreat_threshold
        self.cast_probability = cast_probability
        self.balance = balance or load_balance()
        self.mapdata = mapdata or load_map()
        self.transition_log_path = transition_log_path
        self.transitions: list[dict] = []
        self.state = self._fresh_state()

    def _fresh_state(self) -> LinaState:
        return LinaState(retreat_threshold=self.retreat_threshold,
                         cast_probability=self.cast_probability,
                         rng=random.Random(self.seed))

    def _log_transition(self, tick: int, old: str, new: str, via: str) -> None:
        entry = {"tick": tick, "from": old, "to": new, "via": via}
        self.transitions.append(entry)
        if self.transition_log_path:
            with open(self.transition_log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, separators=(",", ":")) + "\n")

    # BotHandler interface

    def on_select(self) -> HeroSelection:
        # a select starts a fresh match: reset the FSM and reseed
        self.state = self._fresh_state()
        self._log_transition(0, PHASE_SELECTING, PHASE_SELECTING, "select")
        return HeroSelection(hero=self.hero)

    def on_update(self, snapshot: EntitySnapshot) -> BotCommand:
        old = self.state.phase
        command, self.state = lina_update(snapshot, self.state, self.balance,
                                          self.mapdata)
        if self.state.phase != old:
            self._log_transition(snapshot.tick, old, self.state.phase, "update")
        return command

    def on_chat(self, event: ChatEvent) -> None:
        old = self.state.phase
        self.state, forced = lina_chat(event, self.state)
        if forced is not None:
            self._log_transition(self.state.last_tick, old, forced, "chat")

    def on_test(self) -> None:
        pass
