import copy
import io
import json
from pathlib import Path

import pytest

from causalab.errors import DuplicateTool
from causalab.mcp_server import McpServer, ToolDescriptor

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture()
def server():
    return McpServer(sandbox_root=FIXTURES)


def call(server, payload: dict) -> dict:
    return json.loads(server.handle_line(json.dumps(payload)))


def tool_call(server, req_id, name, arguments):
    return call(server, {
        "jsonrpc": "2.0", "id": req_id, "method": "tools/call",
        "params": {"name": name, "arguments": arguments},
    })


class TestProtocol:
    def test_initialize(self, server):
        res = call(server, {"jsonrpc": "2.0", "id": 1, "method": "initialize"})
        assert res["id"] == 1
        assert res["result"]["protocolVersion"]
        assert res["result"]["serverInfo"]["name"] == "causalab"

    def test_tools_list_has_exactly_four(self, server):
        res = call(server, {"jsonrpc": "2.0", "id": 2, "method": "tools/list"})
        names = [t["name"] for t in res["result"]["tools"]]
        assert names == [
            "profile_dataset", "discover_structure", "validate_dag",
            "intervention_query",
        ]
        for t in res["result"]["tools"]:
            assert t["description"] and t["inputSchema"]["type"] == "object"

    def test_parse_error_has_null_id(self, server):
        res = json.loads(server.handle_line("not json"))
        assert res["error"]["code"] == -32700
        assert res["id"] is None

    def test_unknown_method(self, server):
        res = call(server, {"jsonrpc": "2.0", "id": 9, "method": "prompts/list"})
        assert res["error"]["code"] == -32601

    def test_invalid_params(self, server):
        res = tool_call(server, 3, "profile_dataset", {"bins": 3})
        assert res["error"]["code"] == -32602
        res2 = tool_call(server, 4, "profile_dataset",
                         {"path": "mcp_fixture.csv", "bogus": 1})
        assert res2["error"]["code"] == -32602

    def test_unknown_tool_is_invalid_params(self, server):
        res = tool_call(server, 5, "astrology", {})
        assert res["error"]["code"] == -32602

    def test_engine_error_with_error_name(self, server):
        res = tool_call(server, 6, "discover_structure",
                        {"dataset_id": "ds-0404"})
        assert res["error"]["code"] == -32000
        assert "CausalabError" in res["error"]["message"]

    def test_sandbox_escape_blocked(self, server):
        res = tool_call(server, 7, "profile_dataset",
                        {"path": "../../etc/passwd"})
        assert res["error"]["code"] == -32000
        assert "PathOutsideSandbox" in res["error"]["message"]

    def test_every_request_gets_matching_id(self, server):
        for req_id in (1, "abc", 0):
            res = call(server, {"jsonrpc": "2.0", "id": req_id,
                                "method": "tools/list"})
            assert res["id"] == req_id


class TestRegisterTool:
    def test_fifth_tool_appears(self, server):
        server.register_tool(
            ToolDescriptor("echo", "echoes", {"type": "object"}),
            lambda args: {"echo": args},
        )
        res = call(server, {"jsonrpc": "2.0", "id": 1, "method": "tools/list"})
        assert len(res["result"]["tools"]) == 5

    def test_duplicate_rejected(self, server):
        with pytest.raises(DuplicateTool):
            server.register_tool(
                ToolDescriptor("profile_dataset", "again", {"type": "object"}),
                lambda args: {},
            )

    def test_handler_exception_isolated(self, server):
        def broken(args):
            raise RuntimeError("boom")

        server.register_tool(
            ToolDescriptor("broken", "always fails", {"type": "object"}),
            broken,
        )
        res = tool_call(server, 1, "broken", {})
        assert res["error"]["code"] == -32000
        assert "RuntimeError" in res["error"]["message"]
        # the server keeps serving after an engine error
        res2 = call(server, {"jsonrpc": "2.0", "id": 2, "method": "tools/list"})
        assert "result" in res2


class TestEngineFlow:
    def test_full_flow(self, server):
        prof = tool_call(server, 1, "profile_dataset",
                         {"path": "mcp_fixture.csv"})
        payload = json.loads(prof["result"]["content"][0]["text"])
        dataset_id = payload["dataset_id"]
        assert payload["profile"]["friendliness"] >= 50

        disc = tool_call(server, 2, "discover_structure",
                         {"dataset_id": dataset_id, "alpha": 0.05})
        graph = json.loads(disc["result"]["content"][0]["text"])["graph"]
        assert set(graph) == {"nodes", "edges"}
        assert graph["nodes"] == ["x", "y", "z"]

        val = tool_call(server, 3, "validate_dag", {"dataset_id": dataset_id})
        assert json.loads(val["result"]["content"][0]["text"])["compliant"]

        iv = tool_call(server, 4, "intervention_query",
                       {"dataset_id": dataset_id, "target": "x"})
        verdicts = json.loads(iv["result"]["content"][0]["text"])["verdicts"]
        assert set(verdicts) == {"y", "z"}

    def test_failed_call_leaves_state_unchanged(self, server):
        tool_call(server, 1, "profile_dataset", {"path": "mcp_fixture.csv"})
        before = copy.copy(server.host.datasets)
        res = tool_call(server, 2, "profile_dataset", {"path": "missing.csv"})
        assert res["error"]["code"] == -32000
        assert server.host.datasets == before

    def test_validate_inline_cyclic_graph(self, server):
        doc = {
            "nodes": ["A", "B"],
            "edges": [
                {"from": "A", "to": "B", "kind": "directed"},
                {"from": "B", "to": "A", "kind": "directed"},
            ],
        }
        res = tool_call(server, 1, "validate_dag", {"graph": doc})
        payload = json.loads(res["result"]["content"][0]["text"])
        assert not payload["compliant"]
        assert payload["repair_plan"]["edits"]


class TestServeLoop:
    def test_serve_until_eof(self, server):
        lines = [
            '{"jsonrpc": "2.0", "id": 1, "method": "tools/list"}',
            "garbage",
            '{"jsonrpc": "2.0", "id": 2, "method": "initialize"}',
        ]
        out = io.StringIO()
        server.serve(io.StringIO("\n".join(lines) + "\n"), out)
        responses = [json.loads(l) for l in out.getvalue().splitlines()]
        assert len(responses) == 3
        assert responses[0]["id"] == 1
        assert responses[1]["error"]["code"] == -32700
        assert responses[2]["id"] == 2


def test_transcript_replays_byte_identically():
    pairs = json.loads((FIXTURES / "mcp_transcript.json").read_text("utf-8"))
    assert len(pairs) == 12
    server = McpServer(sandbox_root=FIXTURES)
    for pair in pairs:
        assert server.handle_line(pair["request"]) == pair["response"]
