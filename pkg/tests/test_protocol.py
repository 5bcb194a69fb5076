"""Wire codec tests pinned against frozen protocol examples."""
from __future__ import annotations

import json
import math
import random

import pytest

from solomid.protocol import (
    AbilityInfo,
    Attack,
    Buy,
    Cast,
    ChatEvent,
    ConfigError,
    EncodeError,
    EntityRecord,
    EntitySnapshot,
    HeroSelection,
    ItemInfo,
    Move,
    Noop,
    ProtocolError,
    Sell,
    UseItem,
    Vec3,
    decode_bot_command,
    decode_chat_event,
    decode_entity_snapshot,
    decode_select_response,
    encode_bot_command,
    encode_chat_event,
    encode_entity_snapshot,
    encode_hero_selection,
    entity_to_wire,
    load_endpoint_config,
)

# Frozen wire examples.  These are the canonical payload shapes the stack must
# speak; the tower object is the reference serialization of a dire tier-1 tower.
TOWER_WIRE_EXAMPLE = {
    "level": 1,
    "mana": 0,
    "disarmed": False,
    "health": 1300,
    "alive": True,
    "attackRange": 700,
    "team": 3,
    "blind": False,
    "dominated": False,
    "origin": [-4736, 6016, 383.99987792969],
    "type": "Tower",
    "rooted": False,
    "name": "dota_badguys_tower1_top",
    "deniable": False,
}
MOVE_WIRE_EXAMPLE = '{"x":"4000","y":"4000","z":"380","command":"MOVE"}'
ATTACK_WIRE_EXAMPLE = '{"target":370,"command":"ATTACK"}'
CAST_WIRE_EXAMPLE = '{"ability":3,"target":370,"command":"CAST"}'
SELECT_WIRE_EXAMPLE = '{"hero":"npc_dota_hero_lina","command":"SELECT"}'
CHAT_WIRE_EXAMPLE = '{"teamOnly":false,"text":"Humans are n00bs!","player":5}'

ROSTER = (
    "npc_dota_hero_lina",
    "npc_dota_hero_axe",
    "npc_dota_hero_drow_ranger",
    "npc_dota_hero_omniknight",
)

DOUBLE_FIELDS = {"mana", "attackRange", "clock", "cooldownRemaining"}


def assert_wire_equal(got, want, path=""):
    """Structural equality: ints/strings/bools exact, doubles to 1e-9 relative."""
    field = path.rsplit(".", 1)[-1].split("[")[0]
    if isinstance(want, dict):
        assert isinstance(got, dict), f"{path}: expected object, got {got!r}"
        assert set(got) == set(want), f"{path}: key mismatch {set(got) ^ set(want)}"
        for key in want:
            assert_wire_equal(got[key], want[key], f"{path}.{key}" if path else key)
    elif isinstance(want, list):
        assert isinstance(got, list) and len(got) == len(want), f"{path}: list mismatch"
        for i, (g, w) in enumerate(zip(got, want)):
            assert_wire_equal(g, w, f"{path}[{i}]")
    elif isinstance(want, bool):
        assert got is want, f"{path}: {got!r} != {want!r}"
    elif isinstance(want, str):
        assert got == want, f"{path}: {got!r} != {want!r}"
    elif isinstance(want, (int, float)):
        if field in DOUBLE_FIELDS or "origin" in path or isinstance(want, float):
            assert math.isclose(float(got), float(want), rel_tol=1e-9, abs_tol=1e-9), \
                f"{path}: {got!r} !~ {want!r}"
        else:
            assert isinstance(got, int) and got == want, f"{path}: {got!r} != {want!r}"
    else:
        assert got == want, f"{path}: {got!r} != {want!r}"


def sample_tower_record() -> EntityRecord:
    return EntityRecord(
        id=760,
        type="Tower",
        name="dota_badguys_tower1_top",
        team=3,
        level=1,
        health=1300,
        mana=0.0,
        alive=True,
        attack_range=700.0,
        origin=Vec3(-4736.0, 6016.0, 383.99987792969),
    )


def test_tower_entity_matches_frozen_example():
    assert_wire_equal(entity_to_wire(sample_tower_record()), TOWER_WIRE_EXAMPLE)


def test_snapshot_is_id_keyed_with_tick_and_clock():
    snap = EntitySnapshot(entities={760: sample_tower_record()}, tick=42, clock=1.4)
    body = json.loads(encode_entity_snapshot(snap))
    assert set(body) == {"760", "tick", "clock"}
    assert body["tick"] == 42
    assert math.isclose(body["clock"], 1.4, rel_tol=1e-9)
    assert_wire_equal(body["760"], TOWER_WIRE_EXAMPLE)


def test_move_decodes_numeric_strings():
    cmd = decode_bot_command(MOVE_WIRE_EXAMPLE)
    assert cmd == Move(Vec3(4000.0, 4000.0, 380.0))


def test_move_decodes_plain_numbers():
    cmd = decode_bot_command('{"command":"MOVE","x":4000,"y":-2.5,"z":380}')
    assert cmd == Move(Vec3(4000.0, -2.5, 380.0))


def test_move_reencodes_as_numbers():
    out = json.loads(encode_bot_command(Move(Vec3(4000.0, 4000.0, 380.0))))
    assert out == {"x": 4000.0, "y": 4000.0, "z": 380.0, "command": "MOVE"}
    for axis in ("x", "y", "z"):
        assert not isinstance(out[axis], str)


def test_attack_decode():
    assert decode_bot_command(ATTACK_WIRE_EXAMPLE) == Attack(target=370)


def test_cast_decode():
    assert decode_bot_command(CAST_WIRE_EXAMPLE) == Cast(ability=3, target=370)


def test_noop_decode():
    assert decode_bot_command('{"command":"NOOP"}') == Noop()


def test_buy_sell_use_item_decode():
    assert decode_bot_command('{"command":"BUY","item":"item_tango"}') == Buy("item_tango")
    assert decode_bot_command('{"command":"SELL","slot":2}') == Sell(2)
    assert decode_bot_command('{"command":"USE_ITEM","slot":0}') == UseItem(0, None)
    assert decode_bot_command('{"command":"USE_ITEM","slot":0,"target":102}') == UseItem(0, 102)


def test_unknown_command_kind():
    with pytest.raises(ProtocolError) as err:
        decode_bot_command('{"command":"DANCE"}')
    assert err.value.kind == "unknown-command"


@pytest.mark.parametrize("payload", [
    "",
    "{",
    "[1,2]",
    '"MOVE"',
    "null",
    '{"command":"MOVE","x":"a","y":0,"z":0}',
    '{"command":"MOVE","x":1,"y":2}',
    '{"command":"MOVE","x":"NaN","y":0,"z":0}',
    '{"command":"ATTACK"}',
    '{"command":"ATTACK","target":"axe"}',
    '{"command":"ATTACK","target":1.5}',
    '{"command":"CAST","ability":0}',
    '{"command":"BUY"}',
    '{"command":"BUY","item":7}',
    '{"command":"SELL","slot":null}',
    '{"command":"USE_ITEM"}',
    '{"command":7}',
    "{}",
    b"\xff\xfe not json",
])
def test_malformed_payloads(payload):
    with pytest.raises(ProtocolError) as err:
        decode_bot_command(payload)
    assert err.value.kind == "malformed"


def _random_json_value(rng: random.Random, depth=0):
    kinds = ["int", "float", "str", "bool", "null"]
    if depth < 2:
        kinds += ["list", "dict"]
    kind = rng.choice(kinds)
    if kind == "int":
        return rng.randint(-10**6, 10**6)
    if kind == "float":
        return rng.uniform(-1e6, 1e6)
    if kind == "str":
        return "".join(rng.choice("abcXYZ019 _:{}[]\"'\\é") for _ in range(rng.randint(0, 8)))
    if kind == "bool":
        return rng.random() < 0.5
    if kind == "null":
        return None
    if kind == "list":
        return [_random_json_value(rng, depth + 1) for _ in range(rng.randint(0, 3))]
    return {
        "".join(rng.choice("commandtargexyzslot") for _ in range(rng.randint(1, 7))):
            _random_json_value(rng, depth + 1)
        for _ in range(rng.randint(0, 4))
    }


def random_command_payload(rng: random.Random) -> str | bytes:
    """Adversarial decoder input: garbage bytes, junk JSON, or near-miss commands."""
    roll = rng.random()
    if roll < 0.2:
        return bytes(rng.randrange(256) for _ in range(rng.randint(0, 40)))
    if roll < 0.4:
        return "".join(rng.choice('{}[]",:xyz0123command') for _ in range(rng.randint(0, 60)))
    obj = _random_json_value(rng, 0)
    if isinstance(obj, dict) and rng.random() < 0.7:
        obj["command"] = rng.choice(
            ["MOVE", "ATTACK", "CAST", "NOOP", "BUY", "SELL", "USE_ITEM",
             "move", "STOP", "", 7, None, ["MOVE"]])
    return json.dumps(obj)


def test_decoder_is_total_on_arbitrary_input():
    rng = random.Random(0xC0FFEE)
    decoded = 0
    for _ in range(2000):
        payload = random_command_payload(rng)
        try:
            cmd = decode_bot_command(payload)
        except ProtocolError:
            continue
        assert isinstance(cmd, (Noop, Move, Attack, Cast, Buy, Sell, UseItem))
        decoded += 1
    # sanity: the generator should hit at least a few valid decodes
    assert decoded > 0


def random_command(rng: random.Random):
    kind = rng.randrange(7)
    if kind == 0:
        return Noop()
    if kind == 1:
        return Move(Vec3(rng.uniform(-8000, 8000), rng.uniform(-8000, 8000),
                         rng.uniform(0, 512)))
    if kind == 2:
        return Attack(target=rng.randint(0, 5000))
    if kind == 3:
        return Cast(ability=rng.randint(0, 3), target=rng.randint(0, 5000))
    if kind == 4:
        return Buy(item=rng.choice(["item_tango", "item_branch"]))
    if kind == 5:
        return Sell(slot=rng.randint(0, 5))
    return UseItem(slot=rng.randint(0, 5),
                   target=rng.choice([None, rng.randint(0, 5000)]))


def test_command_round_trip():
    rng = random.Random(7)
    for _ in range(500):
        cmd = random_command(rng)
        assert decode_bot_command(encode_bot_command(cmd)) == cmd


def random_entity(rng: random.Random, eid: int) -> EntityRecord:
    etype = rng.choice(["Hero", "Tower", "Creep", "Courier"])
    hero = etype == "Hero"
    return EntityRecord(
        id=eid,
        type=etype,
        name=rng.choice(["npc_dota_hero_lina", "dota_goodguys_tower1_mid",
                         "npc_dota_creep_lane_melee", "npc_dota_courier"]),
        team=rng.choice([2, 3]),
        level=rng.randint(0, 25),
        health=rng.randint(0, 2000),
        mana=rng.uniform(0, 600),
        alive=rng.random() < 0.9,
        attack_range=rng.choice([100.0, 500.0, 600.0, 700.0]),
        origin=Vec3(rng.uniform(-8000, 8000), rng.uniform(-8000, 8000), 0.0),
        rooted=rng.random() < 0.1,
        gold=rng.randint(0, 5000) if hero else None,
        abilities=None if not hero else tuple(
            AbilityInfo(slot=i, name=f"ability_{i}", level=rng.randint(0, 4),
                        cooldown_remaining=rng.uniform(0, 60))
            for i in range(3)),
        items=None if not hero else tuple(
            ItemInfo(slot=i, name="item_tango", charges=rng.randint(1, 3))
            for i in range(rng.randint(0, 2))),
    )


def test_snapshot_round_trip():
    rng = random.Random(99)
    for _ in range(50):
        entities = {}
        for _ in range(rng.randint(0, 12)):
            eid = rng.randint(1, 9999)
            entities[eid] = random_entity(rng, eid)
        snap = EntitySnapshot(entities=entities, tick=rng.randint(0, 40000),
                              clock=rng.uniform(0, 1200))
        back = decode_entity_snapshot(encode_entity_snapshot(snap))
        assert back.tick == snap.tick
        assert math.isclose(back.clock, snap.clock, rel_tol=1e-12)
        assert set(back.entities) == set(snap.entities)
        for eid, rec in snap.entities.items():
            got = back.entities[eid]
            if rec.type == "Hero":
                assert got == rec
            else:
                # hero-only fields are not carried for other types
                assert (got.id, got.type, got.name, got.team, got.level, got.health,
                        got.alive) == (rec.id, rec.type, rec.name, rec.team, rec.level,
                                       rec.health, rec.alive)
                assert got.gold is None and got.abilities is None and got.items is None


def test_hero_only_fields_only_on_heroes():
    rng = random.Random(3)
    for _ in range(30):
        eid = rng.randint(1, 999)
        rec = random_entity(rng, eid)
        wire = entity_to_wire(rec)
        if rec.type == "Hero":
            assert {"gold", "abilities", "items"} <= set(wire)
        else:
            assert not ({"gold", "abilities", "items"} & set(wire))


def test_encode_rejects_non_finite():
    bad = EntityRecord(id=1, type="Creep", name="c", team=2, level=0, health=10,
                       mana=0.0, alive=True, attack_range=100.0,
                       origin=Vec3(float("nan"), 0.0, 0.0))
    with pytest.raises(EncodeError):
        entity_to_wire(bad)
    with pytest.raises(EncodeError):
        encode_bot_command(Move(Vec3(float("inf"), 0.0, 0.0)))


def test_select_reply_frozen_shape():
    assert json.loads(encode_hero_selection(HeroSelection("npc_dota_hero_lina"))) == \
        json.loads(SELECT_WIRE_EXAMPLE)
    sel = decode_select_response(SELECT_WIRE_EXAMPLE, ROSTER)
    assert sel == HeroSelection("npc_dota_hero_lina")


@pytest.mark.parametrize("payload", [
    "",
    "[]",
    '{"hero":"npc_dota_hero_lina"}',
    '{"hero":"npc_dota_hero_lina","command":"MOVE"}',
    '{"command":"SELECT"}',
    '{"hero":"npc_dota_hero_invoker","command":"SELECT"}',
    '{"hero":7,"command":"SELECT"}',
])
def test_select_errors(payload):
    from solomid.protocol import SelectError
    with pytest.raises(SelectError):
        decode_select_response(payload, ROSTER)


def test_chat_event_frozen_shape():
    event = ChatEvent(team_only=False, text="Humans are n00bs!", player=5)
    assert json.loads(encode_chat_event(event)) == json.loads(CHAT_WIRE_EXAMPLE)
    assert decode_chat_event(CHAT_WIRE_EXAMPLE) == event


def test_endpoint_config_defaults():
    cfg = load_endpoint_config("base_url = http://localhost:8080/Dota2AIService\n")
    assert cfg.url_for("select") == "http://localhost:8080/Dota2AIService/select"
    assert cfg.url_for("update") == "http://localhost:8080/Dota2AIService/update"
    assert cfg.url_for("chat") == "http://localhost:8080/Dota2AIService/chat"
    assert cfg.url_for("test") == "http://localhost:8080/Dota2AIService/test"


def test_endpoint_config_overrides_and_comments():
    text = """
# bot endpoints
base_url = http://127.0.0.1:9000/api/
update = tick
test = http://othergame.example:1234/ping
"""
    cfg = load_endpoint_config(text)
    assert cfg.url_for("update") == "http://127.0.0.1:9000/api/tick"
    assert cfg.url_for("test") == "http://othergame.example:1234/ping"
    assert cfg.url_for("select") == "http://127.0.0.1:9000/api/select"


@pytest.mark.parametrize("text", [
    "",
    "update = /u\n",                      # no base_url
    "base_url = ftp://x/y\n",
    "base_url = not a url\n",
    "base_url = http://h/x\nwobble = 3\n",
    "base_url = http://h/x\nupdate =\n",
    "base_url http://h/x\n",
])
def test_endpoint_config_errors(text):
    with pytest.raises(ConfigError):
        load_endpoint_config(text)
