"""The HTTP session service the studio UI talks to.

Binds all four phases into durable sessions: chat and milestones, goal
generation with capability validation, program upload and validation,
simulation, and robot deployment. Every state-mutating endpoint emits
exactly one activity event; the event log replays to the same session
state the live handlers produce.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

import jsonschema
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import goals as goals_mod
from . import narrative as narrative_mod
from .catalog import builtin_catalog, catalog_to_json, render_manifest_text
from .errors import (
    EmptyNarrative,
    GatewayError,
    MalformedProgram,
    NotConnected,
    SchemaError,
)
from .gateway import GatewayConfig, load_schema, make_gateway
from .program import decode, lower, program_to_jsonable, validate
from .robot import RobotConnection, VirtualClock, connect, deploy, report_to_jsonable
from .simulator import run as run_simulation
from .simulator import trace_to_jsonable
from .store import SessionStore, apply_event, empty_session, make_event, new_session_id
from .goals import goalset_from_jsonable, goalset_to_jsonable, hint_to_jsonable


@dataclass(frozen=True)
class ServiceConfig:
    storage_dir: Path
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    cors_origins: tuple[str, ...] = ("*",)
    pacing: str = "real"  # real | virtual (virtual collapses deploy sleeps)
    speech_rate_wps: float = 2.5
    robot_connect_timeout: float = 3.0


class UnknownSession(Exception):
    pass


class ApiError(Exception):
    def __init__(self, status_code: int, body: dict[str, Any]) -> None:
        super().__init__(body.get("error", "error"))
        self.status_code = status_code
        self.body = body


_API_DEFS = load_schema("api_requests")["$defs"]


async def _json_body(request: Request, schema_name: str) -> dict[str, Any]:
    try:
        body = await request.json()
    except json.JSONDecodeError as exc:
        raise ApiError(400, {"error": "bad_request", "detail": "body must be JSON"}) from exc
    try:
        jsonschema.validate(body, _API_DEFS[schema_name])
    except jsonschema.ValidationError as exc:
        raise ApiError(400, {"error": "bad_request", "detail": exc.message}) from exc
    return body


def create_app(config: ServiceConfig) -> FastAPI:
    store = SessionStore(config.storage_dir)
    gateway = make_gateway(config.gateway)
    catalog, manifest = builtin_catalog()
    retry_budget = config.gateway.retry_budget

    app = FastAPI(title="storybot session service")
    app.state.store = store
    app.state.gateway = gateway
    app.state.config = config
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def _api_error(_: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(exc.body, status_code=exc.status_code)

    @app.exception_handler(UnknownSession)
    async def _unknown_session(_: Request, exc: UnknownSession) -> JSONResponse:
        return JSONResponse({"error": "unknown_session"}, status_code=404)

    @app.exception_handler(ValueError)
    async def _precondition(_: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse({"error": "precondition", "detail": str(exc)}, status_code=400)

    @app.exception_handler(EmptyNarrative)
    async def _empty_narrative(_: Request, exc: EmptyNarrative) -> JSONResponse:
        return JSONResponse({"error": "empty_narrative", "detail": str(exc)}, status_code=409)

    @app.exception_handler(NotConnected)
    async def _not_connected(_: Request, exc: NotConnected) -> JSONResponse:
        return JSONResponse({"error": "not_connected", "detail": str(exc)}, status_code=409)

    @app.exception_handler(MalformedProgram)
    async def _malformed(_: Request, exc: MalformedProgram) -> JSONResponse:
        return JSONResponse({"error": "malformed_program", "detail": exc.reason}, status_code=400)

    @app.exception_handler(GatewayError)
    async def _gateway_error(_: Request, exc: GatewayError) -> JSONResponse:
        return JSONResponse({"error": "gateway", "kind": exc.kind, "detail": str(exc)}, status_code=502)

    @app.exception_handler(SchemaError)
    async def _schema_error(_: Request, exc: SchemaError) -> JSONResponse:
        return JSONResponse(
            {"error": "schema", "attempts": exc.attempts, "detail": exc.last_failure}, status_code=502
        )

    @contextmanager
    def session_op(session_id: str) -> Iterator[dict[str, Any]]:
        """Serialize one operation per session; yields the loaded document."""
        with store.lock_for(session_id):
            doc = store.load(session_id)
            if doc is None:
                raise UnknownSession(session_id)
            yield doc

    def record(doc: dict[str, Any], kind: str, payload: dict[str, Any]) -> dict[str, Any]:
        """Apply-and-persist one activity event; the single write path."""
        event = make_event(doc["id"], kind, payload, store.next_timestamp(doc["id"]))
        apply_event(doc, event)
        store.save(doc)
        store.append_event(event)
        return event

    def narrative_of(doc: dict[str, Any]) -> narrative_mod.Narrative:
        return narrative_mod.narrative_from_jsonable(doc["narrative"])

    def stored_program(doc: dict[str, Any]):
        if doc["program"] is None:
            raise ApiError(409, {"error": "no_program"})
        return decode(json.dumps(doc["program"]))

    # -- session lifecycle ---------------------------------------------------

    @app.post("/sessions")
    async def create_session() -> dict[str, Any]:
        session_id = new_session_id()
        with store.lock_for(session_id):
            created = store.next_timestamp(session_id)
            doc = empty_session(session_id, created)
            event = make_event(session_id, "session_created", {"id": session_id, "created_at": created}, created)
            apply_event(doc, event)
            store.save(doc)
            store.append_event(event)
        return doc

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str) -> dict[str, Any]:
        doc = store.load(session_id)
        if doc is None:
            raise UnknownSession(session_id)
        return doc

    # -- narrative phase -----------------------------------------------------

    @app.post("/sessions/{session_id}/chat")
    async def chat(session_id: str, request: Request) -> dict[str, Any]:
        body = await _json_body(request, "chat_request")
        with session_op(session_id) as doc:
            timestamp = store.next_timestamp(session_id)
            reply, _ = narrative_mod.chat(narrative_of(doc), body["message"], gateway, now=timestamp)
            turns = [
                {"author": "user", "text": body["message"], "timestamp": timestamp},
                {"author": "agent", "text": reply, "timestamp": timestamp},
            ]
            record(doc, "chat", {"turns": turns})
            return {"reply": reply, "narrative": doc["narrative"]}

    @app.post("/sessions/{session_id}/help/{milestone}")
    async def request_help(session_id: str, milestone: str) -> dict[str, Any]:
        with session_op(session_id) as doc:
            suggestions = narrative_mod.request_help(
                narrative_of(doc), milestone, gateway, retry_budget=retry_budget
            )
            record(doc, "help_request", {"milestone": milestone, "suggestions": list(suggestions.suggestions)})
            return {"milestone_kind": milestone, "suggestions": list(suggestions.suggestions)}

    @app.post("/sessions/{session_id}/milestones/{kind}")
    async def set_milestone(session_id: str, kind: str, request: Request) -> dict[str, Any]:
        body = await _json_body(request, "milestone_request")
        if kind not in narrative_mod.MILESTONE_KINDS:
            raise ValueError(f"unknown milestone kind {kind!r}")
        with session_op(session_id) as doc:
            record(doc, "milestone_set", {"kind": kind, "complete": body["complete"]})
            return {"milestones": doc["narrative"]["milestones"]}

    @app.post("/sessions/{session_id}/summarize")
    async def summarize(session_id: str) -> dict[str, Any]:
        with session_op(session_id) as doc:
            story = narrative_mod.summarize(narrative_of(doc), gateway)
            record(doc, "summarized", {"story_text": story})
            return {"story_text": story, "revisions": doc["narrative"]["revisions"]}

    # -- goal phase ------------------------------------------------------------

    @app.post("/sessions/{session_id}/goals")
    async def generate_goals(session_id: str) -> dict[str, Any]:
        with session_op(session_id) as doc:
            goalset = goals_mod.generate_goals(
                narrative_of(doc), gateway, catalog,
                retry_budget=retry_budget, generation=len(doc["goalsets"]) + 1,
            )
            payload = goalset_to_jsonable(goalset)
            record(doc, "goals_generated", {"goalset": payload})
            return payload

    @app.post("/sessions/{session_id}/goals/retry")
    async def retry_goals(session_id: str) -> dict[str, Any]:
        with session_op(session_id) as doc:
            if not doc["goalsets"]:
                raise ApiError(409, {"error": "no_goals"})
            prior = goalset_from_jsonable(doc["goalsets"][-1])
            goalset = goals_mod.retry_goals(
                prior, narrative_of(doc), gateway, catalog, retry_budget=retry_budget
            )
            payload = goalset_to_jsonable(goalset)
            record(doc, "goals_retried", {"goalset": payload})
            return payload

    @app.get("/sessions/{session_id}/goals")
    async def get_goals(session_id: str) -> dict[str, Any]:
        doc = store.load(session_id)
        if doc is None:
            raise UnknownSession(session_id)
        return {"goalsets": doc["goalsets"], "current": doc["goalsets"][-1] if doc["goalsets"] else None}

    @app.post("/sessions/{session_id}/goals/{goal_index}/hints/{hint_index}/open")
    async def open_hint(session_id: str, goal_index: int, hint_index: int) -> dict[str, Any]:
        with session_op(session_id) as doc:
            if not doc["goalsets"]:
                raise ApiError(404, {"error": "index_out_of_range"})
            goalset = goalset_from_jsonable(doc["goalsets"][-1])
            if not (0 <= goal_index < len(goalset.goals)):
                raise ApiError(404, {"error": "index_out_of_range"})
            goal = goalset.goals[goal_index]
            if not (0 <= hint_index < len(goal.hints)):
                raise ApiError(404, {"error": "index_out_of_range"})
            record(doc, "hint_opened", {"goal_index": goal_index, "hint_index": hint_index})
            return hint_to_jsonable(goal.hints[hint_index])

    # -- programming and deployment phase --------------------------------------

    @app.put("/sessions/{session_id}/program")
    async def put_program(session_id: str, request: Request) -> dict[str, Any]:
        raw = await request.body()
        with session_op(session_id) as doc:
            program = decode(raw)  # MalformedProgram -> 400
            report = validate(program, catalog)
            record(doc, "program_edited", {"program": program_to_jsonable(program)})
            return {"ok": report.ok, "report": report.to_jsonable()}

    @app.post("/sessions/{session_id}/validate")
    async def validate_program(session_id: str) -> dict[str, Any]:
        with session_op(session_id) as doc:
            report = validate(stored_program(doc), catalog)
            return {"ok": report.ok, "report": report.to_jsonable()}

    @app.post("/sessions/{session_id}/run")
    async def run_program(session_id: str, request: Request) -> dict[str, Any]:
        body = await _json_body(request, "run_request")
        mode = body["mode"]
        with session_op(session_id) as doc:
            program = stored_program(doc)
            report = validate(program, catalog)
            if not report.ok:
                raise ApiError(422, {"error": "validation_failed", "report": report.to_jsonable()})
            timeline = lower(program, catalog, config.speech_rate_wps)
            trace = run_simulation(timeline)
            if mode == "sim":
                record(doc, "simulated", {
                    "mode": mode, "final_clock": trace.final.clock, "frames": len(trace.frames),
                })
                return {"mode": mode, "trace": trace_to_jsonable(trace), "report": None}

            connection_doc = doc["connection"]
            if not connection_doc or connection_doc["state"] != "connected":
                raise NotConnected("connect to the robot before running on it")
            connection = RobotConnection(
                ip=connection_doc["ip"], port=connection_doc["port"], state="connected",
                robot_name=connection_doc.get("robot_name"),
            )
            clock = VirtualClock() if config.pacing == "virtual" else None
            deployment = deploy(connection, timeline, clock=clock)
            record(doc, "deployed", {
                "mode": mode,
                "final_clock": trace.final.clock,
                "commands": len(deployment.commands_sent),
                "outcome": report_to_jsonable(deployment)["outcome"],
            })
            return {"mode": mode, "trace": trace_to_jsonable(trace), "report": report_to_jsonable(deployment)}

    @app.post("/sessions/{session_id}/connect")
    async def connect_robot(session_id: str, request: Request) -> dict[str, Any]:
        body = await _json_body(request, "connect_request")
        with session_op(session_id) as doc:
            connection = connect(
                body["ip"], body.get("port", 80), timeout=config.robot_connect_timeout
            )
            connection_doc = {
                "ip": connection.ip, "port": connection.port, "state": connection.state,
                "robot_name": connection.robot_name, "last_error": connection.last_error,
            }
            record(doc, "connected", {"connection": connection_doc})
            return connection_doc

    # -- shared resources --------------------------------------------------------

    @app.get("/sessions/{session_id}/activity")
    async def activity(session_id: str) -> dict[str, Any]:
        if store.load(session_id) is None:
            raise UnknownSession(session_id)
        return {"events": store.events(session_id)}

    @app.get("/catalog")
    async def get_catalog() -> dict[str, Any]:
        return {"kinds": json.loads(catalog_to_json(catalog)), "capability_text": render_manifest_text(manifest)}

    return app


def serve(config: ServiceConfig, host: str = "127.0.0.1", port: int = 8000) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port, log_level="info")
