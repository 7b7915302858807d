"""Command line entry points: the session service and the mock robot."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .gateway import GatewayConfig
from .robot import load_fault_script, mock_robot_serve
from .service import ServiceConfig, serve


def _gateway_config(value: str) -> GatewayConfig:
    if value == "remote":
        return GatewayConfig(provider="remote_http")
    if value == "mock":
        return GatewayConfig(provider="scripted_mock")
    if value.startswith("mock:"):
        return GatewayConfig(provider="scripted_mock", mock_script=value[len("mock:"):])
    raise argparse.ArgumentTypeError("gateway must be 'remote', 'mock', or 'mock:<script.json>'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="storybot")
    commands = parser.add_subparsers(dest="command", required=True)

    serve_cmd = commands.add_parser("serve", help="run the session service")
    serve_cmd.add_argument("--port", type=int, default=8000)
    serve_cmd.add_argument("--host", default="127.0.0.1")
    serve_cmd.add_argument("--storage", required=True, help="session storage directory")
    serve_cmd.add_argument("--gateway", type=_gateway_config, default="mock",
                           help="remote | mock | mock:<script.json>")
    serve_cmd.add_argument("--cors", action="append", default=None,
                           help="allowed UI origin (repeatable; default *)")
    serve_cmd.add_argument("--pacing", choices=("real", "virtual"), default="real",
                           help="virtual collapses deployment sleeps (for tests)")

    robot_cmd = commands.add_parser("mock-robot", help="run the recording mock robot")
    robot_cmd.add_argument("--port", type=int, default=8800)
    robot_cmd.add_argument("--faults", default=None,
                           help="JSON file mapping command index to HTTP status")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        gateway = args.gateway if isinstance(args.gateway, GatewayConfig) else _gateway_config(args.gateway)
        config = ServiceConfig(
            storage_dir=Path(args.storage),
            gateway=gateway,
            cors_origins=tuple(args.cors) if args.cors else ("*",),
            pacing=args.pacing,
        )
        serve(config, host=args.host, port=args.port)
        return 0
    if args.command == "mock-robot":
        faults = load_fault_script(args.faults) if args.faults else None
        robot = mock_robot_serve(args.port, faults)
        print(f"mock robot listening on {robot.ip}:{robot.port}", flush=True)
        try:
            robot._thread.join()
        except KeyboardInterrupt:
            robot.close()
        return 0
    return 1


if __name__ == "__main__":
    sys.exit(main())
