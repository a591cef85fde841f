"""Command line entry point: run scenarios, replay logs, convert maps."""

from __future__ import annotations

import argparse
import sys
import threading
import time
from pathlib import Path

from ..config import load_config
from ..worldsim import OccupancyGrid, ScenarioParseError, WorldParseError, load_scenario

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _console_dir() -> Path | None:
    root = Path(__file__).resolve().parents[3]
    for candidate in (root / "frontend" / "dist", root / "frontend" / "public"):
        if (candidate / "index.html").exists():
            return candidate
    return None


def _serve(bus, clock, port: int) -> None:
    import uvicorn

    from .server import create_app
    app = create_app(bus, clock=clock, static_dir=_console_dir())
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    try:
        scenario = load_scenario(args.scenario)
    except (ScenarioParseError, WorldParseError, FileNotFoundError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.headless or args.port is None:
        from .runner import run_stack
        from ..runtime import Stack
        stack = Stack(scenario, cfg, seed=args.seed)
        result = run_stack(stack, scenario, record=args.record, seed=args.seed)
        for check in result.checks:
            status = "PASS" if check.passed else "FAIL"
            print(f"[{status}] {check.description} ({check.detail})")
        print(f"scenario {result.scenario}: "
              f"{'PASS' if result.passed else 'FAIL'} "
              f"({result.sim_time:.1f} s sim in {result.wall_time:.1f} s wall)")
        return EXIT_PASS if result.passed else EXIT_FAIL

    # live mode: pace the simulation in a thread and serve the gateway
    from ..runtime import Stack
    from .recorder import Recorder
    stack = Stack(scenario, cfg, seed=args.seed)
    recorder = None
    if args.record:
        recorder = Recorder(args.record, scenario=scenario.name, seed=args.seed)
        stack.bus.add_tap(recorder)

    stop = threading.Event()

    def sim_loop() -> None:
        tick = stack.cfg.sim.tick
        next_wall = time.perf_counter()
        while not stop.is_set():
            stack.step()
            next_wall += tick / max(args.rate, 1e-3)
            delay = next_wall - time.perf_counter()
            if delay > 0:
                time.sleep(delay)

    thread = threading.Thread(target=sim_loop, daemon=True)
    thread.start()
    try:
        _serve(stack.bus, lambda: stack.time, args.port)
    finally:
        stop.set()
        thread.join(timeout=2.0)
        if recorder is not None:
            recorder.close()
    return EXIT_PASS


def cmd_replay(args: argparse.Namespace) -> int:
    from ..bus import Bus
    from .recorder import LogVersionError, read_log, replay_into_bus

    try:
        header, _ = read_log(args.log)
    except (LogVersionError, FileNotFoundError) as exc:
        print(f"replay refused: {exc}", file=sys.stderr)
        return EXIT_USAGE

    bus = Bus()
    if args.port is None:
        count = replay_into_bus(args.log, bus, rate=0.0)
        print(f"replayed {count} messages from scenario "
              f"{header.get('scenario', '?')!r}")
        return EXIT_PASS

    last_stamp = [0.0]

    def tap(env) -> None:
        last_stamp[0] = env.stamp

    bus.add_tap(tap)

    def replay_loop() -> None:
        time.sleep(0.5)  # give clients a moment to connect
        replay_into_bus(args.log, bus, rate=args.rate)

    thread = threading.Thread(target=replay_loop, daemon=True)
    thread.start()
    _serve(bus, lambda: last_stamp[0], args.port)
    return EXIT_PASS


def cmd_map_convert(args: argparse.Namespace) -> int:
    from ..nav.mapio import MAP_MAGIC, MapFormatError, load_grid, save_grid

    src = Path(args.input)
    try:
        blob = src.read_bytes()
    except FileNotFoundError as exc:
        print(f"map-convert: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if blob.startswith(MAP_MAGIC):
            grid = load_grid(src)
            Path(args.output).write_text(grid.to_ascii())
        else:
            grid = OccupancyGrid.from_ascii(blob.decode("utf-8", "replace"))
            save_grid(grid, args.output)
    except (MapFormatError, WorldParseError, UnicodeDecodeError) as exc:
        print(f"map-convert: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"wrote {args.output} ({grid.width}x{grid.height} cells)")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="marvin",
        description="assistive robot stack on the deterministic 2D simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario")
    run.add_argument("--scenario", required=True)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--headless", action="store_true",
                     help="run to the horizon and evaluate assertions")
    run.add_argument("--port", type=int, default=None,
                     help="serve the gateway/console on this port")
    run.add_argument("--rate", type=float, default=1.0,
                     help="real-time rate multiplier in live mode")
    run.add_argument("--record", default=None, help="record the bus to a log")
    run.add_argument("--config", default=None,
                     help="config YAML (default: MARVIN_CONFIG)")
    run.set_defaults(func=cmd_run)

    replay = sub.add_parser("replay", help="replay a recorded log")
    replay.add_argument("log")
    replay.add_argument("--port", type=int, default=None)
    replay.add_argument("--rate", type=float, default=1.0)
    replay.set_defaults(func=cmd_replay)

    convert = sub.add_parser("map-convert",
                             help="convert between ASCII worlds and binary maps")
    convert.add_argument("input")
    convert.add_argument("output")
    convert.set_defaults(func=cmd_map_convert)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
