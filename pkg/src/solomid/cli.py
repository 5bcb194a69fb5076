"""Command line front end: ranked series runner, bot server, replay checker."""
from __future__ import annotations

import argparse
import sys
import threading
from pathlib import Path

from .botkit import LinaBot, serve
from .gamedata import load_balance
from .gateway import MODE_FAST, MODE_REALTIME, ScheduledChat
from .harness import (
    Opponent,
    SeriesAborted,
    SeriesConfig,
    default_opponents,
    render_report,
    run_series,
)
from .protocol import ConfigError, load_endpoint_config
from .replay import verify_replay


def parse_chat_spec(spec: str) -> ScheduledChat:
    """Parse an injection flag of the form "<text>"@<tick>."""
    text, sep, tick_str = spec.rpartition("@")
    if not sep or not text:
        raise argparse.ArgumentTypeError(
            f'expected "<text>"@<tick>, got {spec!r}')
    try:
        tick = int(tick_str)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"tick must be an integer in {spec!r}") from exc
    if tick < 0:
        raise argparse.ArgumentTypeError(f"tick must be >= 0 in {spec!r}")
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        text = text[1:-1]  # tolerate literal quoting from the shell
    return ScheduledChat(tick=tick, text=text)


def parse_opponents(spec: str) -> list[Opponent]:
    """Parse "personality:hero,..." — a bare personality covers every hero."""
    roster = load_balance().roster
    opponents: list[Opponent] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        personality, sep, hero = part.partition(":")
        if sep:
            opponents.append(Opponent(hero=hero.strip(),
                                      personality=personality.strip()))
        else:
            opponents.extend(Opponent(hero=h, personality=part)
                             for h in roster)
    if not opponents:
        raise argparse.ArgumentTypeError(f"no opponents in {spec!r}")
    return opponents


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solomid",
        description="1v1 mid-lane bot matches over a JSON/HTTP protocol")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a ranked series against one bot")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", metavar="PATH",
                        help="endpoint config file (key=value lines)")
    source.add_argument("--bot-url", metavar="URL",
                        help="bot base URL, e.g. http://127.0.0.1:8080")
    run.add_argument("--mode", choices=(MODE_REALTIME, MODE_FAST),
                     default=MODE_FAST)
    run.add_argument("--seed", type=int, default=0,
                     help="seed base; match i uses seed base+i")
    run.add_argument("--matches", type=int, default=3, metavar="N",
                     help="matches per opponent (default 3)")
    run.add_argument("--opponents", type=parse_opponents, metavar="LIST",
                     help='e.g. "laner:npc_dota_hero_axe,aggressive"'
                          " (default: laner+aggressive over the whole roster)")
    run.add_argument("--max-ticks", type=int, default=None, metavar="N",
                     help="tick cap per match before calling a draw")
    run.add_argument("--log-dir", metavar="PATH",
                     help="write per-match logs and replays here")
    run.add_argument("--report", metavar="PATH",
                     help="write the JSON report here")
    run.add_argument("--inject-chat", type=parse_chat_spec, action="append",
                     default=[], metavar='"<text>"@<tick>',
                     help="inject a chat line at a tick (repeatable)")
    run.set_defaults(func=_cmd_run)

    bot = sub.add_parser("serve-bot", help="serve the reference bot over HTTP")
    bot.add_argument("--host", default="127.0.0.1")
    bot.add_argument("--port", type=int, default=8080)
    bot.add_argument("--seed", type=int, default=0)
    bot.add_argument("--transition-log", metavar="PATH",
                     help="append phase transitions as JSONL")
    bot.set_defaults(func=_cmd_serve_bot)

    replay = sub.add_parser("verify-replay",
                            help="re-simulate a replay and check its digests")
    replay.add_argument("path")
    replay.set_defaults(func=_cmd_verify_replay)
    return parser


def _cmd_run(args) -> int:
    try:
        if args.config:
            endpoint_config = load_endpoint_config(
                Path(args.config).read_text(encoding="utf-8"))
        else:
            endpoint_config = load_endpoint_config(f"base_url={args.bot_url}")
    except (OSError, ConfigError) as exc:
        print(f"bad endpoint config: {exc}", file=sys.stderr)
        return 2

    config = SeriesConfig(
        bots=[("bot", endpoint_config)],
        opponents=args.opponents or default_opponents(),
        matches_per_opponent=args.matches,
        seed_base=args.seed,
        mode=args.mode,
        log_dir=args.log_dir,
        chat_script=tuple(args.inject_chat),
    )
    if args.max_ticks is not None:
        config.max_ticks = args.max_ticks
    try:
        ranking = run_series(config)
    except (SeriesAborted, ValueError) as exc:
        print(f"series aborted: {exc}", file=sys.stderr)
        return 2

    text, json_text = render_report(ranking)
    sys.stdout.write(text)
    if args.report:
        Path(args.report).write_text(json_text, encoding="utf-8")
    return 0


def _cmd_serve_bot(args) -> int:
    bot = LinaBot(seed=args.seed, transition_log_path=args.transition_log)
    service = serve(bot, host=args.host, port=args.port)
    print(f"reference bot listening on {service.base_url}", flush=True)
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        service.stop()
    return 0


def _cmd_verify_replay(args) -> int:
    ok, detail = verify_replay(args.path)
    print(detail)
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
