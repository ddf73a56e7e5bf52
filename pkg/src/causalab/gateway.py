"""HTTP service fronting the orchestrator.

Endpoints: dataset upload, session creation, chat turns, an SSE stream
of progress events (full replay then live tail), and graph / report /
profile retrieval. One turn runs per session at a time; a second
concurrent message gets 409. All error bodies are {"error", "detail"}.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse

from .errors import CausalabError
from .graph import graph_to_dict
from .orchestrator import (
    AnalysisState,
    Engine,
    IntentKind,
    TEST_MODE_ENV,
    parse_intent,
    profile_to_dict,
    report_markdown,
    save_checkpoint,
)
from .reporting import RemoteTextGenClient
from .retrieval import build_index, default_index, load_corpus
from .tabular import Dataset, load_csv

ENV_PREFIX = "CAUSALAB_"
DEFAULT_UPLOAD_LIMIT = 50 * 1024 * 1024


@dataclass
class GatewayConfig:
    host: str = "127.0.0.1"
    port: int = 8787
    data_dir: str = "causalab-data"
    corpus_dir: str | None = None
    upload_limit: int = DEFAULT_UPLOAD_LIMIT
    textgen_endpoint: str | None = None
    textgen_api_key: str | None = None
    cors_origin: str | None = None
    test_mode: bool = False


_CONFIG_KEYS = {
    "host": str,
    "port": int,
    "data_dir": str,
    "corpus_dir": str,
    "upload_limit": int,
    "textgen_endpoint": str,
    "textgen_api_key": str,
    "cors_origin": str,
    "test_mode": lambda v: v not in ("", "0", "false", "no"),
}


def load_config(path: str | Path | None = None,
                env: dict | None = None) -> GatewayConfig:
    """key=value file settings, overridden by CAUSALAB_* env variables."""
    values: dict = {}
    if path is not None:
        for raw in Path(path).read_text("utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, _, value = line.partition("=")
            values[key.strip().lower()] = value.strip()
    env = os.environ if env is None else env
    for key in _CONFIG_KEYS:
        env_key = ENV_PREFIX + key.upper()
        if env_key in env:
            values[key] = env[env_key]
    config = GatewayConfig()
    for key, caster in _CONFIG_KEYS.items():
        if key in values:
            setattr(config, key, caster(values[key]))
    return config


@dataclass
class SessionRuntime:
    state: AnalysisState
    lock: threading.Lock = field(default_factory=threading.Lock)
    cond: threading.Condition = field(default_factory=threading.Condition)
    turn_in_flight: bool = False
    turn_counter: int = 0


def _error(status: int, error: str, detail: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": error, "detail": detail}
    )


def create_app(config: GatewayConfig | None = None,
               engine: Engine | None = None) -> FastAPI:
    config = config or GatewayConfig()
    data_dir = Path(config.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)

    if engine is None:
        index = (
            build_index(load_corpus(config.corpus_dir))
            if config.corpus_dir else default_index()
        )
        client = (
            RemoteTextGenClient(config.textgen_endpoint, config.textgen_api_key)
            if config.textgen_endpoint else None
        )
        test_mode = config.test_mode or (
            os.environ.get(TEST_MODE_ENV, "") not in ("", "0")
        )
        engine = Engine(index=index, client=client, test_mode=test_mode)

    app = FastAPI(title="causalab gateway")
    app.state.engine = engine
    app.state.config = config
    app.state.datasets: dict[str, Dataset] = {}
    app.state.sessions: dict[str, SessionRuntime] = {}

    if config.cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[config.cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc):
        return _error(400, "schema_violation", str(exc.errors()[:3]))

    @app.exception_handler(CausalabError)
    async def _engine_handler(request: Request, exc):
        return _error(400, type(exc).__name__, str(exc))

    from starlette.exceptions import HTTPException as StarletteHTTPException

    @app.exception_handler(StarletteHTTPException)
    async def _http_handler(request: Request, exc):
        return _error(exc.status_code, "http_error", str(exc.detail))

    def _session(session_id: str) -> SessionRuntime | None:
        return app.state.sessions.get(session_id)

    def _checkpoint(runtime: SessionRuntime) -> None:
        path = data_dir / f"{runtime.state.session_id}.ckpt.json"
        path.write_bytes(save_checkpoint(runtime.state))

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.post("/datasets")
    async def upload_dataset(file: UploadFile):
        blob = await file.read()
        if len(blob) > config.upload_limit:
            return _error(
                413, "too_large",
                f"upload exceeds the {config.upload_limit} byte limit",
            )
        try:
            ds = load_csv(blob, file.filename or "upload.csv")
        except CausalabError as e:
            return _error(400, type(e).__name__, str(e))
        if ds.row_count == 0:
            return _error(400, "schema_violation", "dataset has no data rows")
        dataset_id = secrets.token_hex(16)
        app.state.datasets[dataset_id] = ds
        return {"dataset_id": dataset_id, "name": ds.name,
                "rows": ds.row_count, "columns": len(ds.columns)}

    @app.post("/sessions")
    async def create_session(body: dict):
        dataset_id = body.get("dataset_id")
        if not isinstance(dataset_id, str):
            return _error(400, "schema_violation", "dataset_id is required")
        ds = app.state.datasets.get(dataset_id)
        if ds is None:
            return _error(404, "not_found", f"unknown dataset {dataset_id!r}")
        session_id = secrets.token_hex(16)
        state = engine.new_session(session_id)
        runtime = SessionRuntime(state=state)
        app.state.sessions[session_id] = runtime
        with runtime.cond:
            engine.attach_dataset(state, ds,
                                  on_event=lambda ev: None)
            runtime.cond.notify_all()
        _checkpoint(runtime)
        created_at = 0.0 if engine.test_mode else time.time()
        return {"session_id": session_id, "created_at": created_at,
                "dataset": ds.name, "stage": state.stage.label}

    @app.post("/sessions/{session_id}/messages")
    async def post_message(session_id: str, body: dict):
        runtime = _session(session_id)
        if runtime is None:
            return _error(404, "not_found", f"unknown session {session_id!r}")
        utterance = body.get("utterance")
        if not isinstance(utterance, str) or not utterance.strip():
            return _error(400, "schema_violation",
                          "body must contain a non-empty 'utterance'")
        with runtime.lock:
            if runtime.turn_in_flight:
                return _error(409, "turn_in_progress",
                              "another turn is already running")
            runtime.turn_in_flight = True
            runtime.turn_counter += 1
            turn_id = runtime.turn_counter

        def on_event(ev):
            with runtime.cond:
                runtime.cond.notify_all()

        intent = parse_intent(utterance, runtime.state.known_nodes())
        if intent.kind is IntentKind.ANALYZE_FULL:
            def run():
                try:
                    engine.run_turn(runtime.state, utterance, on_event=on_event)
                    _checkpoint(runtime)
                finally:
                    with runtime.cond:
                        runtime.turn_in_flight = False
                        runtime.cond.notify_all()

            threading.Thread(target=run, daemon=True).start()
            return JSONResponse(status_code=202, content={
                "turn_id": turn_id,
                "status": "accepted",
                "text": "Analysis started; follow progress on the event stream.",
            })

        try:
            result = engine.run_turn(runtime.state, utterance,
                                     on_event=on_event)
            _checkpoint(runtime)
        finally:
            with runtime.cond:
                runtime.turn_in_flight = False
                runtime.cond.notify_all()
        payload: dict = {"text": result.text}
        if result.answer is not None:
            payload["intervention"] = result.answer.to_dict()
        if result.graph_updated:
            payload["graph_ref"] = f"/sessions/{session_id}/graph"
        if result.report_updated:
            payload["report_ref"] = f"/sessions/{session_id}/report"
        return payload

    @app.get("/sessions/{session_id}/events")
    async def stream_events(session_id: str):
        runtime = _session(session_id)
        if runtime is None:
            return _error(404, "not_found", f"unknown session {session_id!r}")

        def generate():
            cursor = 0
            while True:
                with runtime.cond:
                    log = runtime.state.progress_log
                    chunk = log[cursor:]
                    cursor = len(log)
                    in_flight = runtime.turn_in_flight
                    if not chunk and in_flight:
                        runtime.cond.wait(timeout=0.5)
                        continue
                for ev in chunk:
                    yield f"data: {json.dumps(ev.to_dict())}\n\n"
                if not in_flight and cursor == len(runtime.state.progress_log):
                    return

        return StreamingResponse(generate(), media_type="text/event-stream",
                                 headers={"Cache-Control": "no-cache"})

    @app.get("/sessions/{session_id}/graph")
    async def get_graph(session_id: str):
        runtime = _session(session_id)
        if runtime is None:
            return _error(404, "not_found", f"unknown session {session_id!r}")
        if runtime.state.graph is None:
            return _error(404, "not_found", "no graph learned yet")
        return graph_to_dict(runtime.state.graph)

    @app.get("/sessions/{session_id}/report")
    async def get_report(session_id: str):
        runtime = _session(session_id)
        if runtime is None:
            return _error(404, "not_found", f"unknown session {session_id!r}")
        if runtime.state.report is None:
            return _error(404, "not_found", "no report generated yet")
        return {"markdown": report_markdown(runtime.state)}

    @app.get("/sessions/{session_id}/profile")
    async def get_profile(session_id: str):
        runtime = _session(session_id)
        if runtime is None:
            return _error(404, "not_found", f"unknown session {session_id!r}")
        if runtime.state.profile is None:
            return _error(404, "not_found", "no profile computed yet")
        return profile_to_dict(runtime.state.profile)

    return app


def serve(config: GatewayConfig) -> None:  # pragma: no cover
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)
