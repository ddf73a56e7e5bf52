"""Command-line front end.

``causalab analyze`` runs the whole pipeline headlessly and writes
graph.json, profile.json, report.md and a checkpoint to the output
directory; ``serve`` starts the HTTP gateway; ``mcp`` speaks JSON-RPC
on stdio. Exit codes: 0 success, 1 engine error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .discovery import DiscoveryParams
from .errors import CausalabError
from .gateway import load_config
from .graph import to_json
from .orchestrator import (
    Engine,
    IntentKind,
    parse_intent,
    profile_to_dict,
    report_markdown,
    save_checkpoint,
)
from .tabular import load_csv


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalab",
        description="Conversational causal analysis workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full pipeline on a CSV")
    analyze.add_argument("csv_path", help="path to the input CSV file")
    analyze.add_argument("--alpha", type=float, default=0.05,
                         help="CI-test significance level (default 0.05)")
    analyze.add_argument("--max-cond", type=int, default=3,
                         help="max conditioning set size (default 3)")
    analyze.add_argument("--question", default=None,
                         help="optional what-if question answered after analysis")
    analyze.add_argument("--out", default="causalab-out",
                         help="output directory (default causalab-out)")
    analyze.add_argument("--seed", type=int, default=None,
                         help="seed for the session id (for reproducible runs)")

    serve = sub.add_parser("serve", help="start the HTTP gateway")
    serve.add_argument("--config", default=None, help="key=value config file")
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--host", default=None)
    serve.add_argument("--data-dir", default=None)

    mcp = sub.add_parser("mcp", help="serve tools over JSON-RPC on stdio")
    mcp.add_argument("--sandbox", default=".",
                     help="directory CSV paths are resolved against")
    return parser


def run_analyze(args) -> int:
    if not 0 < args.alpha < 1:
        print("error: --alpha must be in (0, 1)", file=sys.stderr)
        return 2
    if args.max_cond < 0:
        print("error: --max-cond must be >= 0", file=sys.stderr)
        return 2
    csv_path = Path(args.csv_path)
    try:
        blob = csv_path.read_bytes()
    except OSError as e:
        print(f"error: cannot read {csv_path}: {e}", file=sys.stderr)
        return 1

    engine = Engine(
        default_params=DiscoveryParams(
            alpha=args.alpha, max_cond_size=args.max_cond
        ),
        test_mode=True,  # deterministic artifacts: zeroed timestamps
    )
    rng = random.Random(args.seed)
    session_id = f"cli-{rng.getrandbits(128):032x}"
    try:
        ds = load_csv(blob, csv_path.name)
        state = engine.new_session(session_id)
        engine.attach_dataset(state, ds)
        result = engine.run_turn(
            state, f"Please conduct a causal analysis on the file "
                   f"'{csv_path.name}'."
        )
        if state.graph is None or state.report is None:
            print(f"error: {result.text}", file=sys.stderr)
            return 1

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "graph.json").write_text(to_json(state.graph, indent=2) + "\n",
                                        "utf-8")
        (out / "profile.json").write_text(
            json.dumps(profile_to_dict(state.profile), indent=2) + "\n", "utf-8"
        )
        (out / "report.md").write_text(report_markdown(state), "utf-8")

        if args.question:
            intent = parse_intent(args.question, state.known_nodes())
            answer_result = engine.run_turn(state, args.question)
            if intent.kind is IntentKind.WHAT_IF and answer_result.answer:
                payload = answer_result.answer.to_dict()
            else:
                payload = {"text": answer_result.text}
            (out / "answer.json").write_text(
                json.dumps(payload, indent=2) + "\n", "utf-8"
            )

        (out / "checkpoint.ckpt.json").write_bytes(save_checkpoint(state))
        print(f"wrote {out}/graph.json, profile.json, report.md, "
              f"checkpoint.ckpt.json")
        return 0
    except CausalabError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


def run_serve(args) -> int:  # pragma: no cover - spawns a server
    config = load_config(args.config) if args.config else load_config()
    if args.port is not None:
        config.port = args.port
    if args.host is not None:
        config.host = args.host
    if args.data_dir is not None:
        config.data_dir = args.data_dir
    from .gateway import serve

    serve(config)
    return 0


def run_mcp(args) -> int:  # pragma: no cover - blocks on stdio
    from .mcp_server import main as mcp_main

    mcp_main(args.sandbox)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    if args.command == "analyze":
        return run_analyze(args)
    if args.command == "serve":
        return run_serve(args)
    if args.command == "mcp":
        return run_mcp(args)
    parser.print_usage(sys.stderr)
    return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
