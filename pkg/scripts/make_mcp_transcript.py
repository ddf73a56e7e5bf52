#!/usr/bin/env python3
"""Regenerate the frozen JSON-RPC conformance transcript.

Runs the 12 scripted exchanges against a fresh tool server rooted at
tests/fixtures and freezes the exact response lines. Review the diff
before committing a regenerated transcript: the conformance test treats
the frozen bytes as the contract.
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from causalab.mcp_server import McpServer  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"

REQUESTS = [
    '{"jsonrpc": "2.0", "id": 1, "method": "initialize", "params": {}}',
    '{"jsonrpc": "2.0", "id": 2, "method": "tools/list"}',
    "this is not json",
    '{"jsonrpc": "2.0", "id": 3, "method": "resources/list"}',
    '{"jsonrpc": "2.0", "id": 4, "method": "tools/call", "params": '
    '{"name": "profile_dataset", "arguments": {"path": "mcp_fixture.csv"}}}',
    '{"jsonrpc": "2.0", "id": 5, "method": "tools/call", "params": '
    '{"name": "profile_dataset", "arguments": {"bins": 4}}}',
    '{"jsonrpc": "2.0", "id": 6, "method": "tools/call", "params": '
    '{"name": "no_such_tool", "arguments": {}}}',
    '{"jsonrpc": "2.0", "id": 7, "method": "tools/call", "params": '
    '{"name": "discover_structure", "arguments": '
    '{"dataset_id": "ds-0001", "alpha": 0.05}}}',
    '{"jsonrpc": "2.0", "id": 8, "method": "tools/call", "params": '
    '{"name": "discover_structure", "arguments": {"dataset_id": "ds-9999"}}}',
    '{"jsonrpc": "2.0", "id": 9, "method": "tools/call", "params": '
    '{"name": "validate_dag", "arguments": {"dataset_id": "ds-0001"}}}',
    '{"jsonrpc": "2.0", "id": 10, "method": "tools/call", "params": '
    '{"name": "validate_dag", "arguments": {"graph": {"nodes": ["A", "B"], '
    '"edges": [{"from": "A", "to": "B", "kind": "directed"}, '
    '{"from": "B", "to": "A", "kind": "directed"}]}}}}',
    '{"jsonrpc": "2.0", "id": 11, "method": "tools/call", "params": '
    '{"name": "intervention_query", "arguments": '
    '{"dataset_id": "ds-0001", "target": "x", "outcome": "z"}}}',
]


def main() -> None:
    server = McpServer(sandbox_root=FIXTURES)
    pairs = []
    for request in REQUESTS:
        response = server.handle_line(request)
        pairs.append({"request": request, "response": response})
    out = FIXTURES / "mcp_transcript.json"
    out.write_text(json.dumps(pairs, indent=2) + "\n", "utf-8")
    print(f"wrote {out} with {len(pairs)} exchanges")


if __name__ == "__main__":
    main()
