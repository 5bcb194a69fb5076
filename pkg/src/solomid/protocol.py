"""Wire types and JSON codecs for the game <-> bot HTTP protocol."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from urllib.parse import urlparse, urljoin

TEAM_RADIANT = 2
TEAM_DIRE = 3

UPDATE_COMMANDS = ("NOOP", "MOVE", "ATTACK", "CAST", "BUY", "SELL", "USE_ITEM")
SELECT_COMMAND = "SELECT"

# Endpoint function names; each resolves to a URL in EndpointConfig.
FUNCTION_NAMES = ("select", "update", "chat", "test")

# Reserved top-level keys in an update body that are not entity ids.
SNAPSHOT_META_KEYS = ("tick", "clock")


class ProtocolError(Exception):
    """Raised when an incoming command payload cannot be decoded.

    kind is "unknown-command" or "malformed".
    """

    def __init__(self, kind: str, detail: str):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail


class EncodeError(Exception):
    """Raised when outgoing data cannot be represented on the wire."""


class SelectError(Exception):
    """Raised when a hero-selection reply is malformed or names an unknown hero."""


class ConfigError(Exception):
    """Raised for invalid endpoint configuration text."""


@dataclass(frozen=True, slots=True)
class Vec3:
    x: float
    y: float
    z: float = 0.0

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)


@dataclass(frozen=True, slots=True)
class AbilityInfo:
    slot: int
    name: str
    level: int
    cooldown_remaining: float


@dataclass(frozen=True, slots=True)
class ItemInfo:
    slot: int
    name: str
    charges: int


@dataclass(frozen=True, slots=True)
class EntityRecord:
    """One visible unit or building as it appears in an update snapshot."""

    id: int
    type: str  # "Hero" | "Tower" | "Creep" | "Courier"
    name: str
    team: int
    level: int
    health: int
    mana: float
    alive: bool
    attack_range: float
    origin: Vec3
    blind: bool = False
    disarmed: bool = False
    dominated: bool = False
    rooted: bool = False
    deniable: bool = False
    # Hero-only extras; None for every other entity type.
    gold: int | None = None
    abilities: tuple[AbilityInfo, ...] | None = None
    items: tuple[ItemInfo, ...] | None = None


@dataclass(frozen=True, slots=True)
class EntitySnapshot:
    entities: dict[int, EntityRecord]
    tick: int
    clock: float


# --- bot command variants -------------------------------------------------

@dataclass(frozen=True, slots=True)
class Noop:
    pass


@dataclass(frozen=True, slots=True)
class Move:
    target: Vec3


@dataclass(frozen=True, slots=True)
class Attack:
    target: int


@dataclass(frozen=True, slots=True)
class Cast:
    ability: int
    target: int


@dataclass(frozen=True, slots=True)
class Buy:
    item: str


@dataclass(frozen=True, slots=True)
class Sell:
    slot: int


@dataclass(frozen=True, slots=True)
class UseItem:
    slot: int
    target: int | None = None


BotCommand = Noop | Move | Attack | Cast | Buy | Sell | UseItem


@dataclass(frozen=True, slots=True)
class HeroSelection:
    hero: str


@dataclass(frozen=True, slots=True)
class ChatEvent:
    team_only: bool
    text: str
    player: int


@dataclass(frozen=True, slots=True)
class EndpointConfig:
    base_url: str
    endpoints: dict[str, str] = field(default_factory=dict)

    def url_for(self, name: str) -> str:
        if name not in FUNCTION_NAMES:
            raise ConfigError(f"unknown endpoint function {name!r}")
        return self.endpoints[name]


# --- encoding -------------------------------------------------------------

def _require_finite(value: float, what: str) -> float:
    out = float(value)
    if not math.isfinite(out):
        raise EncodeError(f"non-finite {what}: {value!r}")
    return out


def entity_to_wire(rec: EntityRecord) -> dict:
    """Entity record as a plain dict with the wire field names."""
    origin = rec.origin
    obj = {
        "level": int(rec.level),
        "mana": _require_finite(rec.mana, "mana"),
        "disarmed": bool(rec.disarmed),
        "health": int(rec.health),
        "alive": bool(rec.alive),
        "attackRange": _require_finite(rec.attack_range, "attackRange"),
        "team": int(rec.team),
        "blind": bool(rec.blind),
        "dominated": bool(rec.dominated),
        "origin": [
            _require_finite(origin.x, "origin.x"),
            _require_finite(origin.y, "origin.y"),
            _require_finite(origin.z, "origin.z"),
        ],
        "type": rec.type,
        "rooted": bool(rec.rooted),
        "name": rec.name,
        "deniable": bool(rec.deniable),
    }
    if rec.type == "Hero":
        obj["gold"] = int(rec.gold or 0)
        obj["abilities"] = [
            {
                "slot": ab.slot,
                "name": ab.name,
                "level": ab.level,
                "cooldownRemaining": _require_finite(ab.cooldown_remaining, "cooldownRemaining"),
            }
            for ab in (rec.abilities or ())
        ]
        obj["items"] = [
            {"slot": it.slot, "name": it.name, "charges": it.charges}
            for it in (rec.items or ())
        ]
    return obj


def encode_entity_snapshot(snapshot: EntitySnapshot) -> str:
    """Snapshot as the update POST body: id-keyed entity objects plus tick/clock."""
    body: dict[str, object] = {}
    for eid in sorted(snapshot.entities):
        body[str(eid)] = entity_to_wire(snapshot.entities[eid])
    body["tick"] = int(snapshot.tick)
    body["clock"] = _require_finite(snapshot.clock, "clock")
    return json.dumps(body, separators=(",", ":"))


def _wire_to_entity(eid: int, obj: dict) -> EntityRecord:
    origin = obj["origin"]
    abilities = None
    items = None
    if obj.get("abilities") is not None:
        abilities = tuple(
            AbilityInfo(int(a["slot"]), str(a["name"]), int(a["level"]),
                        float(a["cooldownRemaining"]))
            for a in obj["abilities"]
        )
    if obj.get("items") is not None:
        items = tuple(
            ItemInfo(int(i["slot"]), str(i["name"]), int(i["charges"]))
            for i in obj["items"]
        )
    gold = obj.get("gold")
    return EntityRecord(
        id=eid,
        type=str(obj["type"]),
        name=str(obj["name"]),
        team=int(obj["team"]),
        level=int(obj["level"]),
        health=int(obj["health"]),
        mana=float(obj["mana"]),
        alive=bool(obj["alive"]),
        attack_range=float(obj["attackRange"]),
        origin=Vec3(float(origin[0]), float(origin[1]), float(origin[2])),
        blind=bool(obj["blind"]),
        disarmed=bool(obj["disarmed"]),
        dominated=bool(obj["dominated"]),
        rooted=bool(obj["rooted"]),
        deniable=bool(obj["deniable"]),
        gold=None if gold is None else int(gold),
        abilities=abilities,
        items=items,
    )


def decode_entity_snapshot(text: str | bytes) -> EntitySnapshot:
    """Parse an update POST body back into an EntitySnapshot."""
    try:
        data = json.loads(text)
    except (ValueError, UnicodeDecodeError) as exc:
        raise ProtocolError("malformed", f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ProtocolError("malformed", "update body must be a JSON object")
    try:
        tick = int(data["tick"])
        clock = float(data["clock"])
        entities = {}
        for key, obj in data.items():
            if key in SNAPSHOT_META_KEYS:
                continue
            entities[int(key)] = _wire_to_entity(int(key), obj)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ProtocolError("malformed", f"bad update body: {exc}") from exc
    return EntitySnapshot(entities=entities, tick=tick, clock=clock)


def encode_bot_command(cmd: BotCommand) -> str:
    """Command as the update reply body (bot side).  Move emits numbers."""
    if isinstance(cmd, Noop):
        obj: dict[str, object] = {"command": "NOOP"}
    elif isinstance(cmd, Move):
        if not cmd.target.is_finite():
            raise EncodeError(f"non-finite move target: {cmd.target!r}")
        obj = {"x": cmd.target.x, "y": cmd.target.y, "z": cmd.target.z, "command": "MOVE"}
    elif isinstance(cmd, Attack):
        obj = {"target": int(cmd.target), "command": "ATTACK"}
    elif isinstance(cmd, Cast):
        obj = {"ability": int(cmd.ability), "target": int(cmd.target), "command": "CAST"}
    elif isinstance(cmd, Buy):
        obj = {"item": cmd.item, "command": "BUY"}
    elif isinstance(cmd, Sell):
        obj = {"slot": int(cmd.slot), "command": "SELL"}
    elif isinstance(cmd, UseItem):
        obj = {"slot": int(cmd.slot), "command": "USE_ITEM"}
        if cmd.target is not None:
            obj["target"] = int(cmd.target)
    else:
        raise EncodeError(f"not a bot command: {cmd!r}")
    return json.dumps(obj, separators=(",", ":"))


def _coord(obj: dict, key: str) -> float:
    # Coordinates may arrive as JSON numbers or as numeric strings.
    try:
        raw = obj[key]
    except KeyError:
        raise ProtocolError("malformed", f"MOVE missing {key!r}") from None
    if isinstance(raw, bool) or raw is None or isinstance(raw, (dict, list)):
        raise ProtocolError("malformed", f"MOVE {key} not numeric: {raw!r}")
    try:
        val = float(raw)
    except ValueError:
        raise ProtocolError("malformed", f"MOVE {key} not numeric: {raw!r}") from None
    if not math.isfinite(val):
        raise ProtocolError("malformed", f"MOVE {key} not finite: {raw!r}")
    return val


def _int_field(obj: dict, key: str, cmd: str, required: bool = True) -> int | None:
    if key not in obj or obj[key] is None:
        if required:
            raise ProtocolError("malformed", f"{cmd} missing {key!r}")
        return None
    raw = obj[key]
    if isinstance(raw, bool) or isinstance(raw, (dict, list)):
        raise ProtocolError("malformed", f"{cmd} {key} not an integer: {raw!r}")
    try:
        val = float(raw)
    except ValueError:
        raise ProtocolError("malformed", f"{cmd} {key} not an integer: {raw!r}") from None
    if not math.isfinite(val) or val != int(val):
        raise ProtocolError("malformed", f"{cmd} {key} not an integer: {raw!r}")
    return int(val)


def decode_bot_command(text: str | bytes) -> BotCommand:
    """Total decoder for update replies: returns a command or raises ProtocolError."""
    try:
        data = json.loads(text)
    except (ValueError, UnicodeDecodeError) as exc:
        raise ProtocolError("malformed", f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ProtocolError("malformed", "command body must be a JSON object")
    command = data.get("command")
    if not isinstance(command, str):
        raise ProtocolError("malformed", "missing command discriminator")
    if command not in UPDATE_COMMANDS:
        raise ProtocolError("unknown-command", f"unknown command {command!r}")
    if command == "NOOP":
        return Noop()
    if command == "MOVE":
        return Move(Vec3(_coord(data, "x"), _coord(data, "y"), _coord(data, "z")))
    if command == "ATTACK":
        return Attack(target=_int_field(data, "target", "ATTACK"))
    if command == "CAST":
        return Cast(ability=_int_field(data, "ability", "CAST"),
                    target=_int_field(data, "target", "CAST"))
    if command == "BUY":
        item = data.get("item")
        if not isinstance(item, str) or not item:
            raise ProtocolError("malformed", f"BUY item not a name: {item!r}")
        return Buy(item=item)
    if command == "SELL":
        return Sell(slot=_int_field(data, "slot", "SELL"))
    # USE_ITEM
    return UseItem(slot=_int_field(data, "slot", "USE_ITEM"),
                   target=_int_field(data, "target", "USE_ITEM", required=False))


def encode_hero_selection(sel: HeroSelection) -> str:
    return json.dumps({"hero": sel.hero, "command": SELECT_COMMAND}, separators=(",", ":"))


def decode_select_response(text: str | bytes, roster: tuple[str, ...] | list[str]) -> HeroSelection:
    """Parse a select reply; hero must be on the roster."""
    try:
        data = json.loads(text)
    except (ValueError, UnicodeDecodeError) as exc:
        raise SelectError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SelectError("select reply must be a JSON object")
    if data.get("command") != SELECT_COMMAND:
        raise SelectError(f"select reply command must be {SELECT_COMMAND!r}")
    hero = data.get("hero")
    if not isinstance(hero, str) or not hero:
        raise SelectError("select reply missing hero")
    if hero not in roster:
        raise SelectError(f"unknown hero {hero!r}")
    return HeroSelection(hero=hero)


def encode_chat_event(event: ChatEvent) -> str:
    return json.dumps(
        {"teamOnly": bool(event.team_only), "text": event.text, "player": int(event.player)},
        separators=(",", ":"),
    )


def decode_chat_event(text: str | bytes) -> ChatEvent:
    try:
        data = json.loads(text)
    except (ValueError, UnicodeDecodeError) as exc:
        raise ProtocolError("malformed", f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ProtocolError("malformed", "chat body must be a JSON object")
    try:
        return ChatEvent(team_only=bool(data["teamOnly"]), text=str(data["text"]),
                         player=int(data["player"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError("malformed", f"bad chat body: {exc}") from exc


def load_endpoint_config(text: str) -> EndpointConfig:
    """Parse key=value endpoint config text into resolved per-function URLs.

    Recognised keys: base_url plus the four function names.  Lines starting
    with # and blank lines are ignored.  Missing functions default to
    base_url + "/" + name; overrides may be absolute or relative to base_url.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key != "base_url" and key not in FUNCTION_NAMES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        values[key] = value

    if "base_url" not in values:
        raise ConfigError("missing base_url")
    base = values["base_url"].rstrip("/")
    _check_url(base, "base_url")

    endpoints = {}
    for name in FUNCTION_NAMES:
        if name in values:
            override = values[name]
            if urlparse(override).scheme:
                url = override
            else:
                url = urljoin(base + "/", override.lstrip("/"))
        else:
            url = base + "/" + name
        _check_url(url, name)
        endpoints[name] = url
    return EndpointConfig(base_url=base, endpoints=endpoints)


def _check_url(url: str, what: str) -> None:
    parsed = urlparse(url)
    if parsed.scheme not in ("http", "https") or not parsed.netloc:
        raise ConfigError(f"{what} is not an http(s) URL: {url!r}")
