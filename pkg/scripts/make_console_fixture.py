#!/usr/bin/env python3
"""Capture a real gateway session for the console contract tests.

Runs the HTTP gateway in-process, drives a full analysis plus a what-if
turn, and freezes every payload the browser console consumes (SSE events,
graph JSON, profile JSON, chat responses) into
frontend/tests/fixtures/gateway_session.json.
"""

import json
import random
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

import os

os.environ["CAUSALAB_TEST_MODE"] = "1"

from fastapi.testclient import TestClient  # noqa: E402

from causalab.gateway import GatewayConfig, create_app  # noqa: E402


def toy_csv() -> bytes:
    rng = random.Random(17)
    rows = ["PKA,Raf,Mek,Erk"]
    for _ in range(400):
        pka = rng.gauss(0, 1)
        raf = 1.0 * pka + rng.gauss(0, 1)
        mek = 0.9 * raf + rng.gauss(0, 1)
        erk = 0.8 * mek + 0.9 * pka + rng.gauss(0, 1)
        rows.append(f"{pka:.4f},{raf:.4f},{mek:.4f},{erk:.4f}")
    return "\n".join(rows).encode()


def read_events(client, session_id):
    events = []
    with client.stream("GET", f"/sessions/{session_id}/events") as res:
        for line in res.iter_lines():
            if line.startswith("data: "):
                events.append(json.loads(line[len("data: "):]))
    return events


def main() -> None:
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        config = GatewayConfig(data_dir=tmp, test_mode=True)
        with TestClient(create_app(config)) as client:
            res = client.post(
                "/datasets",
                files={"file": ("signal.csv", toy_csv(), "text/csv")},
            )
            dataset_id = res.json()["dataset_id"]
            session_id = client.post(
                "/sessions", json={"dataset_id": dataset_id}
            ).json()["session_id"]

            analyze = client.post(
                f"/sessions/{session_id}/messages",
                json={"utterance": "Please conduct a causal analysis."},
            )
            assert analyze.status_code == 202, analyze.text
            deadline = time.time() + 60
            while time.time() < deadline:
                events = read_events(client, session_id)
                if any(
                    e["stage"] == "Generate report" and e["status"] != "started"
                    for e in events
                ):
                    break
                time.sleep(0.05)

            graph = client.get(f"/sessions/{session_id}/graph").json()
            profile = client.get(f"/sessions/{session_id}/profile").json()
            whatif = client.post(
                f"/sessions/{session_id}/messages",
                json={"utterance": "What if we intervene on PKA? How would Erk change?"},
            )
            assert whatif.status_code == 200, whatif.text

            fixture = {
                "analyze_response": analyze.json(),
                "events": events,
                "graph": graph,
                "profile": profile,
                "whatif_request": {
                    "utterance": "What if we intervene on PKA? How would Erk change?"
                },
                "whatif_response": whatif.json(),
            }
    out = ROOT / "frontend" / "tests" / "fixtures" / "gateway_session.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(fixture, indent=2) + "\n", "utf-8")
    print(f"wrote {out}")
    print("events:", len(fixture["events"]), "graph edges:",
          len(graph["edges"]), "verdict:",
          fixture["whatif_response"].get("intervention", {}).get("verdicts"))


if __name__ == "__main__":
    main()
