"""JSON-RPC 2.0 stdio tool server (Model Context Protocol shape).

One JSON message per line on stdin, one response per line on stdout, in
request order. The server exposes four tools: profile_dataset (loads a
CSV from the sandbox directory), discover_structure, validate_dag, and
intervention_query. Tool calls are atomic: a failing call leaves the
dataset registry exactly as it was.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, TextIO

import jsonschema

from .discovery import Algorithm, CiTestKind, DiscoveryParams, matrix_for_test, run_pc
from .errors import CausalabError, DuplicateTool, PathOutsideSandbox
from .graph import from_json, graph_to_dict
from .intervention import InterventionQuery, answer_query
from .orchestrator import profile_to_dict
from .repair import detect_violations, plan_to_dict, propose_repairs
from .tabular import ColumnKind, MissingPolicy, load_csv, prepare_for_discovery, profile

PROTOCOL_VERSION = "2024-11-05"
SERVER_NAME = "causalab"
SERVER_VERSION = "0.1.0"

PARSE_ERROR = -32700
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
ENGINE_ERROR = -32000


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    description: str
    input_schema: dict


@dataclass
class _DatasetEntry:
    dataset: object
    prepared: object
    profile: object
    graph: object = None


class ToolHost:
    """Engine facade behind the tool server: a path-scoped dataset registry."""

    def __init__(self, sandbox_root: str | Path = "."):
        self.sandbox_root = Path(sandbox_root).resolve()
        self.datasets: dict[str, _DatasetEntry] = {}
        self._counter = 0

    def _resolve(self, path: str) -> Path:
        p = (self.sandbox_root / path).resolve()
        if not p.is_relative_to(self.sandbox_root):
            raise PathOutsideSandbox(
                f"path {path!r} escapes the sandbox root"
            )
        return p

    def profile_dataset(self, args: dict) -> dict:
        path = self._resolve(args["path"])
        ds = load_csv(path.read_bytes(), path.name)
        prof = profile(ds, args.get("bins", 20))
        prepared = (
            ds if not ds.has_missing()
            else prepare_for_discovery(ds, MissingPolicy.DROP_ROWS)
        )
        self._counter += 1
        dataset_id = f"ds-{self._counter:04d}"
        self.datasets[dataset_id] = _DatasetEntry(
            dataset=ds, prepared=prepared, profile=prof
        )
        return {"dataset_id": dataset_id, "profile": profile_to_dict(prof)}

    def _entry(self, dataset_id: str) -> _DatasetEntry:
        entry = self.datasets.get(dataset_id)
        if entry is None:
            raise CausalabError(f"unknown dataset_id {dataset_id!r}")
        return entry

    def discover_structure(self, args: dict) -> dict:
        entry = self._entry(args["dataset_id"])
        kinds = entry.dataset.kinds()
        test = (
            CiTestKind.G_SQUARE if kinds == {ColumnKind.CATEGORICAL}
            else CiTestKind.FISHER_Z
        )
        params = DiscoveryParams(
            alpha=args.get("alpha", 0.05),
            max_cond_size=args.get("max_cond_size", 3),
            algorithm=Algorithm.PC,
            test=test,
        )
        data = matrix_for_test(entry.prepared, test)
        graph, diagnostics = run_pc(
            data, entry.prepared.column_names(), params
        )
        entry.graph = graph
        return {
            "algorithm": params.algorithm.value,
            "test": params.test.value,
            "alpha": params.alpha,
            "graph": graph_to_dict(graph),
            "diagnostics": diagnostics.to_dict(),
        }

    def validate_dag(self, args: dict) -> dict:
        if "graph" in args:
            graph = from_json(args["graph"])
        else:
            entry = self._entry(args["dataset_id"])
            if entry.graph is None:
                raise CausalabError(
                    "no graph discovered yet for this dataset_id"
                )
            graph = entry.graph
        cycles = detect_violations(graph)
        if not cycles:
            return {"compliant": True, "cycles": [], "repair_plan": None}
        plan = propose_repairs(graph)
        return {
            "compliant": False,
            "cycles": [list(c.nodes) for c in cycles],
            "repair_plan": plan_to_dict(plan),
        }

    def intervention_query(self, args: dict) -> dict:
        entry = self._entry(args["dataset_id"])
        if entry.graph is None:
            raise CausalabError("run discover_structure before querying")
        query = InterventionQuery(
            target=args["target"], outcome=args.get("outcome")
        )
        ds = None
        if (
            entry.graph.is_fully_directed()
            and entry.prepared.kinds() == {ColumnKind.CONTINUOUS}
        ):
            ds = entry.prepared
        answer = answer_query(entry.graph, query, ds)
        return answer.to_dict()


def default_tools(host: ToolHost) -> list[tuple[ToolDescriptor, Callable]]:
    return [
        (
            ToolDescriptor(
                name="profile_dataset",
                description=(
                    "Load a CSV file from the sandbox directory and return "
                    "a dataset_id plus column statistics, correlations and "
                    "the friendliness score."
                ),
                input_schema={
                    "type": "object",
                    "properties": {
                        "path": {"type": "string"},
                        "bins": {"type": "integer", "minimum": 1},
                    },
                    "required": ["path"],
                    "additionalProperties": False,
                },
            ),
            host.profile_dataset,
        ),
        (
            ToolDescriptor(
                name="discover_structure",
                description=(
                    "Run PC-stable structure learning on a loaded dataset "
                    "and return the learned graph with diagnostics."
                ),
                input_schema={
                    "type": "object",
                    "properties": {
                        "dataset_id": {"type": "string"},
                        "alpha": {
                            "type": "number",
                            "exclusiveMinimum": 0,
                            "exclusiveMaximum": 1,
                        },
                        "max_cond_size": {"type": "integer", "minimum": 0},
                    },
                    "required": ["dataset_id"],
                    "additionalProperties": False,
                },
            ),
            host.discover_structure,
        ),
        (
            ToolDescriptor(
                name="validate_dag",
                description=(
                    "Check a graph (given inline or previously discovered "
                    "for a dataset_id) for directed cycles and propose a "
                    "confidence-weighted repair plan."
                ),
                input_schema={
                    "type": "object",
                    "properties": {
                        "dataset_id": {"type": "string"},
                        "graph": {"type": "object"},
                    },
                    "additionalProperties": False,
                },
            ),
            host.validate_dag,
        ),
        (
            ToolDescriptor(
                name="intervention_query",
                description=(
                    "Answer a what-if intervention question on the "
                    "discovered graph; includes a back-door effect estimate "
                    "when identifiable."
                ),
                input_schema={
                    "type": "object",
                    "properties": {
                        "dataset_id": {"type": "string"},
                        "target": {"type": "string"},
                        "outcome": {"type": "string"},
                    },
                    "required": ["dataset_id", "target"],
                    "additionalProperties": False,
                },
            ),
            host.intervention_query,
        ),
    ]


class McpServer:
    """Newline-delimited JSON-RPC 2.0 dispatcher over a tool registry."""

    def __init__(self, host: ToolHost | None = None,
                 sandbox_root: str | Path = "."):
        self.host = host or ToolHost(sandbox_root)
        self.tools: dict[str, tuple[ToolDescriptor, Callable]] = {}
        for descriptor, handler in default_tools(self.host):
            self.register_tool(descriptor, handler)

    def register_tool(self, descriptor: ToolDescriptor,
                      handler: Callable[[dict], dict]) -> None:
        if descriptor.name in self.tools:
            raise DuplicateTool(f"tool {descriptor.name!r} already registered")
        self.tools[descriptor.name] = (descriptor, handler)

    # -- protocol --

    def _response(self, req_id, result=None, error=None) -> str:
        msg: dict = {"jsonrpc": "2.0", "id": req_id}
        if error is not None:
            msg["error"] = error
        else:
            msg["result"] = result
        return json.dumps(msg, separators=(",", ":"))

    def handle_line(self, line: str) -> str | None:
        line = line.strip()
        if not line:
            return None
        try:
            req = json.loads(line)
        except json.JSONDecodeError:
            return self._response(
                None, error={"code": PARSE_ERROR, "message": "Parse error"}
            )
        req_id = req.get("id")
        method = req.get("method")
        if method == "initialize":
            return self._response(req_id, result={
                "protocolVersion": PROTOCOL_VERSION,
                "serverInfo": {"name": SERVER_NAME, "version": SERVER_VERSION},
                "capabilities": {"tools": {}},
            })
        if method == "tools/list":
            return self._response(req_id, result={
                "tools": [
                    {
                        "name": d.name,
                        "description": d.description,
                        "inputSchema": d.input_schema,
                    }
                    for d, _ in self.tools.values()
                ]
            })
        if method == "tools/call":
            params = req.get("params") or {}
            name = params.get("name")
            if name not in self.tools:
                return self._response(req_id, error={
                    "code": INVALID_PARAMS,
                    "message": f"Unknown tool: {name}",
                })
            descriptor, handler = self.tools[name]
            arguments = params.get("arguments") or {}
            try:
                jsonschema.validate(arguments, descriptor.input_schema)
            except jsonschema.ValidationError as e:
                return self._response(req_id, error={
                    "code": INVALID_PARAMS,
                    "message": f"Invalid params: {e.message}",
                })
            try:
                payload = handler(arguments)
            except Exception as e:
                return self._response(req_id, error={
                    "code": ENGINE_ERROR,
                    "message": f"{type(e).__name__}: {e}",
                })
            return self._response(req_id, result={
                "content": [{
                    "type": "text",
                    "text": json.dumps(payload, separators=(",", ":")),
                }],
                "isError": False,
            })
        return self._response(req_id, error={
            "code": METHOD_NOT_FOUND,
            "message": f"Method not found: {method}",
        })

    def serve(self, infile: TextIO, outfile: TextIO) -> None:
        """Process messages until EOF."""
        for line in infile:
            response = self.handle_line(line)
            if response is not None:
                outfile.write(response + "\n")
                outfile.flush()


def main(sandbox_root: str | None = None) -> None:  # pragma: no cover
    import sys

    root = sandbox_root or os.environ.get("CAUSALAB_SANDBOX", ".")
    McpServer(sandbox_root=root).serve(sys.stdin, sys.stdout)
