"""Game-side gateway: HTTP calls to a bot endpoint and the per-match driver."""
from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass

import requests

from .builtin_ai import BuiltinPersonality, builtin_decide, make_state
from .gamedata import load_balance
from .protocol import (
    BotCommand,
    ChatEvent,
    EndpointConfig,
    HeroSelection,
    Noop,
    ProtocolError,
    SelectError,
    decode_bot_command,
    decode_select_response,
    encode_chat_event,
    encode_entity_snapshot,
)
from .replay import ReplayWriter
from .world import DT, MatchConfig, World, other_team

MODE_REALTIME = "realtime"
MODE_FAST = "fast"
MODES = (MODE_REALTIME, MODE_FAST)

DEFAULT_MAX_TICKS = 36000  # 20 minutes of play
DEFAULT_SOFT_TIMEOUT_MS = 500.0
DEFAULT_FAILURE_THRESHOLD = 150  # ~5 s of consecutive dead air forfeits
DEFAULT_TRANSPORT_TIMEOUT_S = 10.0  # a silently dropped socket must not hang us


class TransportFailure(Exception):
    """A bot endpoint refused the connection or failed mid-request."""


class MatchFinished(Exception):
    """Raised when interacting with a driver whose match already ended."""


class BotEndpoint:
    """HTTP client for one bot; keep-alive, one outstanding request at a time."""

    def __init__(self, config: EndpointConfig,
                 soft_timeout_ms: float = DEFAULT_SOFT_TIMEOUT_MS,
                 transport_timeout_s: float | None = DEFAULT_TRANSPORT_TIMEOUT_S,
                 session: requests.Session | None = None):
        self.config = config
        self.soft_timeout_ms = soft_timeout_ms
        self.transport_timeout_s = transport_timeout_s
        self.session = session or requests.Session()
        self._lock = threading.Lock()

    def _post(self, name: str, body: str) -> tuple[int, str, float]:
        """(status, text, latency_ms); raises TransportFailure."""
        url = self.config.url_for(name)
        start = time.perf_counter()
        try:
            with self._lock:
                response = self.session.post(
                    url, data=body.encode("utf-8"),
                    headers={"Content-Type": "application/json"},
                    timeout=self.transport_timeout_s)
        except requests.RequestException as exc:
            raise TransportFailure(f"{name}: {exc}") from exc
        latency_ms = (time.perf_counter() - start) * 1000.0
        return response.status_code, response.text, latency_ms

    def call_select(self, roster) -> HeroSelection:
        """POST /select; raises TransportFailure or SelectError."""
        status, text, _ = self._post("select", "{}")
        if status != 200:
            raise SelectError(f"select returned HTTP {status}")
        return decode_select_response(text, roster)

    def call_update(self, body: str) -> tuple[str, float]:
        """POST /update; returns (reply text, latency ms) or TransportFailure."""
        status, text, latency_ms = self._post("update", body)
        if status != 200:
            raise TransportFailure(f"update returned HTTP {status}")
        return text, latency_ms

    def call_chat(self, event: ChatEvent) -> None:
        """POST /chat; reply content is ignored, transport errors are not fatal."""
        try:
            self._post("chat", encode_chat_event(event))
        except TransportFailure:
            pass

    def call_test(self) -> bool:
        try:
            status, _, _ = self._post("test", "{}")
        except TransportFailure:
            return False
        return status == 200


@dataclass(frozen=True, slots=True)
class MatchResult:
    winner_team: int | None
    reason: str  # "tower-destroyed" | "forfeit" | "draw"
    ticks: int
    protocol_errors: int
    warnings: int
    transport_failures: int
    bot_team: int
    bot_hero: str | None


@dataclass(slots=True)
class _ChatInjection:
    event: ChatEvent
    from_team: int


@dataclass(frozen=True, slots=True)
class ScheduledChat:
    """A chat line injected when the match reaches a given tick."""
    tick: int
    text: str
    from_team: int | None = None  # None: the bot's own team
    team_only: bool = True
    player: int = 5


@dataclass
class DriverConfig:
    opponent_hero: str
    personality: BuiltinPersonality
    seed: int
    mode: str = MODE_FAST
    bot_team: int = 2
    max_ticks: int = DEFAULT_MAX_TICKS
    failure_threshold: int = DEFAULT_FAILURE_THRESHOLD
    log_path: str | None = None
    replay_path: str | None = None
    chat_script: tuple[ScheduledChat, ...] = ()


class MatchDriver:
    """Runs one match against an external bot endpoint."""

    def __init__(self, endpoint: BotEndpoint, config: DriverConfig):
        if config.mode not in MODES:
            raise ValueError(f"unknown mode {config.mode!r}")
        self.endpoint = endpoint
        self.config = config
        self.balance = load_balance()
        self.finished = False
        self.update_call_times: list[float] = []
        self._chat_lock = threading.Lock()
        self._chat_queue: list[_ChatInjection] = []
        self._log_entries: list[dict] = []

    def inject_chat(self, text: str, from_team: int, team_only: bool = True,
                    player: int = 5) -> None:
        """Queue a chat event for delivery before the next update."""
        if self.finished:
            raise MatchFinished("cannot inject chat after the match ended")
        event = ChatEvent(team_only=team_only, text=text, player=player)
        with self._chat_lock:
            self._chat_queue.append(_ChatInjection(event=event, from_team=from_team))

    def _drain_chat(self) -> None:
        with self._chat_lock:
            pending, self._chat_queue = self._chat_queue, []
        for injection in pending:
            # team chat never crosses to the opposing side's endpoint
            if injection.event.team_only \
                    and injection.from_team != self.config.bot_team:
                continue
            self.endpoint.call_chat(injection.event)

    def run(self) -> MatchResult:
        if self.finished:
            raise MatchFinished("driver already ran")
        cfg = self.config
        bot_team = cfg.bot_team
        builtin_team = other_team(bot_team)

        try:
            selection = self.endpoint.call_select(self.balance.roster)
        except (TransportFailure, SelectError):
            self.finished = True
            return MatchResult(winner_team=builtin_team, reason="forfeit", ticks=0,
                               protocol_errors=0, warnings=0, transport_failures=0,
                               bot_team=bot_team, bot_hero=None)

        heroes = {bot_team: selection.hero, builtin_team: cfg.opponent_hero}
        match_config = MatchConfig(radiant_hero=heroes[2], dire_hero=heroes[3])
        world = World(match_config, cfg.seed)
        builtin_state = make_state(builtin_team, cfg.seed)

        replay = None
        if cfg.replay_path:
            replay = ReplayWriter(cfg.replay_path, match_config, cfg.seed,
                                  bot_team=bot_team)
        log_fh = open(cfg.log_path, "w", encoding="utf-8") if cfg.log_path else None

        protocol_errors = 0
        warnings = 0
        transport_failures = 0
        failure_streak = 0
        forfeited = False
        start = time.monotonic()

        try:
            while world.outcome is None and world.tick < cfg.max_ticks:
                for entry in cfg.chat_script:
                    if entry.tick == world.tick:
                        sender = bot_team if entry.from_team is None \
                            else entry.from_team
                        self.inject_chat(entry.text, from_team=sender,
                                         team_only=entry.team_only,
                                         player=entry.player)
                self._drain_chat()
                snapshot = world.visible_snapshot(bot_team)
                body = encode_entity_snapshot(snapshot)
                errors: list[str] = []
                command: BotCommand = Noop()
                command_name = "NOOP"
                latency_ms = 0.0
                self.update_call_times.append(time.monotonic())
                try:
                    reply, latency_ms = self.endpoint.call_update(body)
                except TransportFailure as exc:
                    transport_failures += 1
                    failure_streak += 1
                    errors.append(f"transport: {exc}")
                    if failure_streak >= cfg.failure_threshold:
                        forfeited = True
                else:
                    failure_streak = 0
                    try:
                        command = decode_bot_command(reply)
                        command_name = type(command).__name__.upper()
                        if command_name == "USEITEM":
                            command_name = "USE_ITEM"
                    except ProtocolError as exc:
                        protocol_errors += 1
                        errors.append(f"protocol ({exc.kind}): {exc.detail}")
                        command = Noop()
                if latency_ms > self.endpoint.soft_timeout_ms:
                    warnings += 1
                    errors.append(f"soft-timeout: {latency_ms:.1f} ms")

                world.submit_order(bot_team, command)
                builtin_snapshot = world.visible_snapshot(builtin_team)
                builtin_command = builtin_decide(builtin_snapshot, cfg.personality,
                                                 builtin_state)
                world.submit_order(builtin_team, builtin_command)

                if log_fh:
                    log_fh.write(json.dumps({
                        "tick": world.tick,
                        "sentBytes": len(body),
                        "replyLatencyMs": round(latency_ms, 3),
                        "command": command_name,
                        "errors": errors,
                    }, separators=(",", ":")) + "\n")

                tick = world.tick
                world.step()
                if replay:
                    replay.record(tick, {bot_team: command,
                                         builtin_team: builtin_command},
                                  world.digest())
                if forfeited:
                    break
                if cfg.mode == MODE_REALTIME:
                    deadline = start + (tick + 1) * DT
                    delay = deadline - time.monotonic()
                    if delay > 0:
                        time.sleep(delay)
        finally:
            if replay:
                replay.close()
            if log_fh:
                log_fh.close()
            self.finished = True

        if forfeited:
            return MatchResult(winner_team=builtin_team, reason="forfeit",
                               ticks=world.tick, protocol_errors=protocol_errors,
                               warnings=warnings, transport_failures=transport_failures,
                               bot_team=bot_team, bot_hero=selection.hero)
        if world.outcome is None:
            return MatchResult(winner_team=None, reason="draw", ticks=world.tick,
                               protocol_errors=protocol_errors, warnings=warnings,
                               transport_failures=transport_failures,
                               bot_team=bot_team, bot_hero=selection.hero)
        return MatchResult(winner_team=world.outcome.winner_team,
                           reason=world.outcome.reason, ticks=world.tick,
                           protocol_errors=protocol_errors, warnings=warnings,
                           transport_failures=transport_failures,
                           bot_team=bot_team, bot_hero=selection.hero)
