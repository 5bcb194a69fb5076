"""Match driver tests: loopback matches, failure handling, replay, pacing."""
from __future__ import annotations

import json
import socket
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from solomid.botkit import LinaBot, serve
from solomid.builtin_ai import make_personality
from solomid.gateway import (
    MODE_FAST,
    MODE_REALTIME,
    BotEndpoint,
    DriverConfig,
    MatchDriver,
    MatchFinished,
)
from solomid.protocol import load_endpoint_config
from solomid.replay import verify_replay

COMMAND_NAMES = {"NOOP", "MOVE", "ATTACK", "CAST", "BUY", "SELL", "USE_ITEM"}


def endpoint_for(base_url: str, **kw) -> BotEndpoint:
    return BotEndpoint(load_endpoint_config(f"base_url={base_url}"), **kw)


def driver_for(base_url: str, *, personality="passive", seed=5, **kw) -> MatchDriver:
    cfg = DriverConfig(opponent_hero="npc_dota_hero_axe",
                       personality=make_personality(personality, "npc_dota_hero_axe"),
                       seed=seed, mode=MODE_FAST, **kw)
    return MatchDriver(endpoint_for(base_url), cfg)


@pytest.fixture()
def lina_service():
    svc = serve(LinaBot(seed=7), port=0)
    yield svc
    svc.stop()


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class _StubHandler(BaseHTTPRequestHandler):
    """Speaks the select handshake, then misbehaves on update as configured."""

    protocol_version = "HTTP/1.1"
    disable_nagle_algorithm = True
    update_behavior = "garbage"  # or "http-500"

    def do_POST(self):
        self.rfile.read(int(self.headers.get("Content-Length", 0)))
        if self.path == "/select":
            body = b'{"hero": "npc_dota_hero_lina", "command": "SELECT"}'
            self.send_response(200)
        elif self.path == "/update" and self.update_behavior == "http-500":
            body = b"boom"
            self.send_response(500)
        elif self.path == "/update":
            body = b"this is not a bot command"
            self.send_response(200)
        else:
            body = b"{}"
            self.send_response(200)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture()
def stub_server():
    def start(update_behavior: str):
        handler = type("Handler", (_StubHandler,),
                       {"update_behavior": update_behavior})
        server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        threading.Thread(target=server.serve_forever, daemon=True).start()
        servers.append(server)
        return f"http://127.0.0.1:{server.server_address[1]}"

    servers: list[ThreadingHTTPServer] = []
    yield start
    for server in servers:
        server.shutdown()
        server.server_close()


def test_short_fast_match_runs_clean(lina_service):
    driver = driver_for(lina_service.base_url, max_ticks=900)
    result = driver.run()
    assert result.reason == "draw"  # tower can't fall in 30 seconds
    assert result.winner_team is None
    assert result.ticks == 900
    assert result.protocol_errors == 0
    assert result.transport_failures == 0
    assert result.bot_team == 2
    assert result.bot_hero == "npc_dota_hero_lina"


def test_match_log_records_every_tick(lina_service, tmp_path):
    log_path = tmp_path / "match.jsonl"
    driver = driver_for(lina_service.base_url, max_ticks=120,
                        log_path=str(log_path))
    driver.run()
    entries = [json.loads(line) for line in log_path.read_text().splitlines()]
    assert len(entries) == 120
    assert [e["tick"] for e in entries] == list(range(120))
    for entry in entries:
        assert entry["sentBytes"] > 0
        assert entry["replyLatencyMs"] >= 0.0
        assert entry["command"] in COMMAND_NAMES
        assert entry["errors"] == []


def test_replay_written_and_verifies(lina_service, tmp_path):
    replay_path = tmp_path / "match.replay.jsonl"
    driver = driver_for(lina_service.base_url, max_ticks=300,
                        replay_path=str(replay_path))
    driver.run()
    lines = replay_path.read_text().splitlines()
    header = json.loads(lines[0])
    assert header["type"] == "header"
    assert header["radiant_hero"] == "npc_dota_hero_lina"
    assert len(lines) == 1 + 300
    ok, detail = verify_replay(replay_path)
    assert ok, detail


def test_select_failure_forfeits_immediately():
    port = free_port()  # nothing listening there
    driver = driver_for(f"http://127.0.0.1:{port}")
    result = driver.run()
    assert result.reason == "forfeit"
    assert result.winner_team == 3
    assert result.ticks == 0
    assert result.bot_hero is None


def test_update_transport_failures_forfeit_at_threshold(stub_server):
    base = stub_server("http-500")
    driver = driver_for(base, failure_threshold=5)
    result = driver.run()
    assert result.reason == "forfeit"
    assert result.winner_team == 3
    assert result.transport_failures == 5
    assert result.ticks == 5  # the world still stepped while the bot was mute


def test_malformed_replies_count_and_noop(stub_server):
    base = stub_server("garbage")
    driver = driver_for(base, max_ticks=40)
    result = driver.run()
    assert result.reason == "draw"
    assert result.protocol_errors == 40
    assert result.transport_failures == 0


def test_chat_routing_respects_team_visibility(lina_service, tmp_path):
    def buy_seen(from_team: int, team_only: bool) -> bool:
        log_path = tmp_path / f"chat-{from_team}-{team_only}.jsonl"
        driver = driver_for(lina_service.base_url, max_ticks=90,
                            log_path=str(log_path))
        driver.inject_chat("lina buy tango", from_team=from_team,
                           team_only=team_only)
        driver.run()
        entries = [json.loads(line) for line in log_path.read_text().splitlines()]
        return any(e["command"] == "BUY" for e in entries)

    assert buy_seen(from_team=2, team_only=True)  # own team chat delivered
    assert not buy_seen(from_team=3, team_only=True)  # enemy team chat hidden
    assert buy_seen(from_team=3, team_only=False)  # all-chat always delivered


def test_inject_chat_after_match_raises(lina_service):
    driver = driver_for(lina_service.base_url, max_ticks=30)
    driver.run()
    with pytest.raises(MatchFinished):
        driver.inject_chat("lina go", from_team=2)


def test_soft_timeout_counts_warnings(lina_service):
    endpoint = endpoint_for(lina_service.base_url, soft_timeout_ms=0.0)
    cfg = DriverConfig(opponent_hero="npc_dota_hero_axe",
                       personality=make_personality("passive", "npc_dota_hero_axe"),
                       seed=1, mode=MODE_FAST, max_ticks=25)
    result = MatchDriver(endpoint, cfg).run()
    assert result.warnings == 25  # every reply takes more than zero ms


def test_realtime_mode_paces_at_thirty_hz(lina_service):
    cfg = DriverConfig(opponent_hero="npc_dota_hero_axe",
                       personality=make_personality("passive", "npc_dota_hero_axe"),
                       seed=1, mode=MODE_REALTIME, max_ticks=90)
    driver = MatchDriver(endpoint_for(lina_service.base_url), cfg)
    start = time.monotonic()
    driver.run()
    elapsed = time.monotonic() - start
    assert elapsed >= 89 / 30  # can't finish faster than the tick clock
    times = driver.update_call_times
    gaps = [b - a for a, b in zip(times, times[1:])]
    mean_ms = sum(gaps) / len(gaps) * 1000.0
    assert 30.0 <= mean_ms <= 37.0


def test_unknown_mode_rejected(lina_service):
    cfg = DriverConfig(opponent_hero="npc_dota_hero_axe",
                       personality=make_personality("passive", "npc_dota_hero_axe"),
                       seed=1, mode="turbo")
    with pytest.raises(ValueError):
        MatchDriver(endpoint_for(lina_service.base_url), cfg)


def test_driver_runs_only_once(lina_service):
    driver = driver_for(lina_service.base_url, max_ticks=10)
    driver.run()
    with pytest.raises(MatchFinished):
        driver.run()


def test_endpoint_test_probe(lina_service):
    assert endpoint_for(lina_service.base_url).call_test() is True


def test_fast_and_realtime_matches_agree(lina_service, tmp_path):
    digests = []
    for mode in (MODE_FAST, MODE_REALTIME):
        replay_path = tmp_path / f"{mode}.jsonl"
        svc = serve(LinaBot(seed=11), port=0)
        try:
            cfg = DriverConfig(opponent_hero="npc_dota_hero_axe",
                               personality=make_personality("passive", "npc_dota_hero_axe"),
                               seed=3, mode=mode, max_ticks=60,
                               replay_path=str(replay_path))
            MatchDriver(endpoint_for(svc.base_url), cfg).run()
        finally:
            svc.stop()
        digests.append([json.loads(line)["digest"]
                        for line in replay_path.read_text().splitlines()[1:]])
    assert digests[0] == digests[1]
