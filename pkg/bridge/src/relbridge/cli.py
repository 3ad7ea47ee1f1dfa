"""Command line entry point."""
from __future__ import annotations

import argparse
import sys

from .config import FLAGS, BridgeConfig
from .server import serve_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relbridge",
        description="Serve a small code model over the line-delimited "
                    "adapter protocol.")
    sub = parser.add_subparsers(dest="command", required=True)
    srv = sub.add_parser("serve", help="answer protocol requests on stdio")
    srv.add_argument("--model", default="tiny-code-v0",
                     help="bundled model name or path to a checkpoint file")
    srv.add_argument("--device", default="cpu")
    srv.add_argument("--max-tokens", type=int, default=160,
                     help="default generation length cap")
    srv.add_argument("--temperature", type=float, default=1.0,
                     help="default sampling temperature")
    srv.add_argument("--disable", action="append", default=[],
                     choices=FLAGS, metavar="FLAG",
                     help="withhold a capability (repeatable)")
    srv.add_argument("--expose-step", action="store_true",
                     help="advertise per-piece distributions; off by "
                          "default because the subword vocabulary is not "
                          "aligned with any host token alphabet")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = BridgeConfig(model=args.model, device=args.device,
                           max_tokens=args.max_tokens,
                           temperature=args.temperature,
                           disable=tuple(args.disable),
                           expose_step=args.expose_step)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    serve_config(cfg)
    return 0


if __name__ == "__main__":
    sys.exit(main())
