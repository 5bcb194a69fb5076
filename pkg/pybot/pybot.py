#!/usr/bin/env python3
"""Example external bot: walks mid, attacks what it can reach, retreats hurt.

Standard library only.  Speaks the JSON-over-HTTP bot protocol:
POST /select, /update, /chat, /test.  Run: python3 pybot.py --port 8080
"""
from __future__ import annotations

import argparse
import json
import math
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

HERO = "npc_dota_hero_lina"
SELECT_REPLY = '{"hero":"npc_dota_hero_lina","command":"SELECT"}'

# lane geometry and hero stats, mirrored from the match server's data
WAYPOINTS = [(-5600.0, -5600.0), (-2800.0, -2800.0), (0.0, 0.0),
             (2800.0, 2800.0), (5600.0, 5600.0)]
BASES = {2: (-6700.0, -6700.0), 3: (6700.0, 6700.0)}
BASE_HEALTH = 600
HEALTH_PER_LEVEL = 40
RETREAT_BELOW = 0.35

WALK, FIGHT, RETREAT = "WALK", "FIGHT", "RETREAT"


def noop() -> str:
    return '{"command":"NOOP"}'


def move(x: float, y: float) -> str:
    return json.dumps({"x": x, "y": y, "z": 0.0, "command": "MOVE"})


def attack(target: int) -> str:
    return json.dumps({"target": target, "command": "ATTACK"})


class MiniBot:
    """Three-phase controller: WALK the lane, FIGHT in range, RETREAT hurt."""

    def __init__(self):
        self.phase = WALK
        self.team = None

    def handle_request(self, path: str, body: str) -> tuple[int, str]:
        if path == "/select":
            return 200, SELECT_REPLY
        if path in ("/chat", "/test"):
            return 200, "{}"
        if path == "/update":
            try:
                return 200, self._decide(json.loads(body))
            except (ValueError, KeyError, TypeError, AttributeError) as exc:
                return 400, json.dumps({"error": f"bad update body: {exc}"})
        return 404, json.dumps({"error": f"no such endpoint {path!r}"})

    def _decide(self, snapshot: dict) -> str:
        # entity ids are the JSON keys; "tick"/"clock" are metadata
        entities = [(int(key), value) for key, value in snapshot.items()
                    if key not in ("tick", "clock")]
        if self.team is None:
            self.team = self._own_team(entities)
        hero = next((e for _, e in entities
                     if e["type"] == "Hero" and e["team"] == self.team), None)
        if hero is None:
            return noop()  # dead; wait for respawn wherever we are

        max_health = BASE_HEALTH + HEALTH_PER_LEVEL * (hero["level"] - 1)
        if hero["health"] / max_health < RETREAT_BELOW:
            self.phase = RETREAT
            return move(*BASES[self.team])

        hx, hy = hero["origin"][0], hero["origin"][1]
        in_range = [(eid, e) for eid, e in entities
                    if e["team"] != self.team and e["type"] in ("Hero", "Creep")
                    and math.hypot(e["origin"][0] - hx, e["origin"][1] - hy)
                    <= hero["attackRange"]]
        if in_range:
            self.phase = FIGHT
            target, _ = min(in_range, key=lambda pair: (
                math.hypot(pair[1]["origin"][0] - hx,
                           pair[1]["origin"][1] - hy), pair[0]))
            return attack(target)

        self.phase = WALK
        sign = 1.0 if self.team == 2 else -1.0
        progress = sign * (hx + hy) / 2.0
        waypoints = WAYPOINTS if self.team == 2 else WAYPOINTS[::-1]
        for wx, wy in waypoints:
            if sign * (wx + wy) / 2.0 > progress + 100.0:
                return move(wx, wy)
        return move(*BASES[5 - self.team])

    @staticmethod
    def _own_team(entities) -> int | None:
        counts: dict[int, int] = {}
        for _, entity in entities:
            counts[entity["team"]] = counts.get(entity["team"], 0) + 1
        if not counts:
            return None
        # our own side is always fully visible, so it is the bigger group
        return max(sorted(counts), key=lambda team: counts[team])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    args = parser.parse_args(argv)

    bot = MiniBot()

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"
        disable_nagle_algorithm = True

        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            body = self.rfile.read(length).decode("utf-8", "replace")
            status, reply = bot.handle_request(self.path, body)
            payload = reply.encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def do_GET(self):
            self.send_response(405)
            self.send_header("Content-Length", "0")
            self.end_headers()

        def log_message(self, *args):
            pass

    server = ThreadingHTTPServer((args.host, args.port), Handler)
    host, port = server.server_address[:2]
    print(f"pybot listening on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
