"""Robot deployment over a REST dialect, plus a recording mock robot.

Every non-wait action maps 1:1 to exactly one REST command (the table in
``command_for``); waits pace the stream but send nothing. The mock robot
records each call so tests can check that what the robot receives is
exactly the image of the timeline the simulator played.
"""

from __future__ import annotations

import ipaddress
import json
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any

import httpx

from .errors import BindError, NotConnected
from .program import Action, ActionTimeline, MoveArm, MoveHead, PlayAudio, SetFace, SetLed, Speak, Wait

HEALTH_ENDPOINT = "/api/device"
DEFAULT_ROBOT_PORT = 80
MOCK_ROBOT_NAME = "mock-misty"
MOCK_API_VERSION = "1.0"


def command_for(action: Action) -> tuple[str, dict[str, Any]] | None:
    """The REST command an action maps to; None for waits (pacing only)."""
    if isinstance(action, Speak):
        return "/api/tts/speak", {"text": action.text}
    if isinstance(action, SetFace):
        return "/api/images/display", {"fileName": f"{action.expression}.png"}
    if isinstance(action, MoveHead):
        return "/api/head", {"pitch": action.pitch, "roll": action.roll,
                             "yaw": action.yaw, "duration": action.duration}
    if isinstance(action, MoveArm):
        return "/api/arms", {"arm": action.side, "position": action.position,
                             "duration": action.duration}
    if isinstance(action, SetLed):
        return "/api/led", {"red": action.r, "green": action.g, "blue": action.b}
    if isinstance(action, PlayAudio):
        return "/api/audio/play", {"fileName": f"{action.clip}.wav"}
    assert isinstance(action, Wait)
    return None


@dataclass(frozen=True)
class RobotConnection:
    ip: str
    port: int
    state: str  # connected | disconnected
    robot_name: str | None = None
    last_error: str | None = None

    @property
    def is_connected(self) -> bool:
        return self.state == "connected"

    @property
    def base_url(self) -> str:
        return f"http://{self.ip}:{self.port}"


def connect(ip: str, port: int = DEFAULT_ROBOT_PORT, timeout: float = 3.0) -> RobotConnection:
    """Health-check the robot at the given address.

    Failure is a state (the red icon), not an exception; only a
    syntactically bad address raises before any I/O happens.
    """
    try:
        ipaddress.IPv4Address(ip)
    except ipaddress.AddressValueError as exc:
        raise ValueError(f"not a valid IPv4 address: {ip!r}") from exc
    try:
        response = httpx.get(f"http://{ip}:{port}{HEALTH_ENDPOINT}", timeout=timeout)
    except httpx.HTTPError as exc:
        return RobotConnection(ip, port, "disconnected", last_error=str(exc))
    if response.status_code != 200:
        return RobotConnection(ip, port, "disconnected",
                               last_error=f"health check returned {response.status_code}")
    try:
        name = response.json().get("name")
    except json.JSONDecodeError:
        name = None
    return RobotConnection(ip, port, "connected", robot_name=name)


class RealClock:
    """Wall-clock pacing for a live robot."""

    def sleep(self, seconds: float) -> None:
        time.sleep(seconds)


class VirtualClock:
    """Accumulates sleeps instead of taking them; test runs finish in ms."""

    def __init__(self) -> None:
        self.now = 0.0

    def sleep(self, seconds: float) -> None:
        self.now += seconds


@dataclass(frozen=True)
class CommandRecord:
    endpoint: str
    payload: dict[str, Any]
    http_status: int


@dataclass(frozen=True)
class Outcome:
    status: str  # completed | aborted
    at_index: int | None = None
    reason: str | None = None


@dataclass(frozen=True)
class DeploymentReport:
    commands_sent: tuple[CommandRecord, ...]
    started: float
    finished: float
    outcome: Outcome

    @property
    def completed(self) -> bool:
        return self.outcome.status == "completed"


def deploy(connection: RobotConnection, timeline: ActionTimeline,
           *, clock: RealClock | VirtualClock | None = None,
           request_timeout: float = 5.0) -> DeploymentReport:
    """Stream the timeline to the robot, paced by action durations.

    Commands go out strictly in timeline order so the robot stays in
    lockstep with a simulator playing the same timeline. The first non-2xx
    response or transport failure aborts the rest.
    """
    if not connection.is_connected:
        raise NotConnected(f"robot at {connection.ip} is not connected")
    pacing = clock or RealClock()
    sent: list[CommandRecord] = []
    started = time.time()
    outcome = Outcome("completed")
    with httpx.Client(base_url=connection.base_url, timeout=request_timeout) as client:
        for _, action in timeline.actions:
            command = command_for(action)
            if command is not None:
                endpoint, payload = command
                try:
                    status = client.post(endpoint, json=payload).status_code
                except httpx.HTTPError as exc:
                    sent.append(CommandRecord(endpoint, payload, 0))
                    outcome = Outcome("aborted", at_index=len(sent) - 1, reason=str(exc))
                    break
                sent.append(CommandRecord(endpoint, payload, status))
                if not 200 <= status < 300:
                    outcome = Outcome("aborted", at_index=len(sent) - 1, reason=f"HTTP {status}")
                    break
            pacing.sleep(action.duration)
    return DeploymentReport(tuple(sent), started, time.time(), outcome)


def report_to_jsonable(report: DeploymentReport) -> dict[str, Any]:
    return {
        "commands_sent": [
            {"endpoint": c.endpoint, "payload": c.payload, "http_status": c.http_status}
            for c in report.commands_sent
        ],
        "started": report.started,
        "finished": report.finished,
        "outcome": {
            "status": report.outcome.status,
            "at_index": report.outcome.at_index,
            "reason": report.outcome.reason,
        },
    }


# ---------------------------------------------------------------------------
# Mock robot
# ---------------------------------------------------------------------------

_COMMAND_ENDPOINTS = {
    "/api/tts/speak", "/api/images/display", "/api/head", "/api/arms",
    "/api/led", "/api/audio/play",
}


class MockRobot:
    """In-process robot double: serves the REST dialect and records calls.

    The optional fault script overrides the HTTP status of command calls by
    arrival index (health checks are never faulted).
    """

    def __init__(self, port: int = 0, fault_script: dict[int, int] | None = None) -> None:
        self._lock = threading.Lock()
        self._calls: list[dict[str, Any]] = []
        self._faults = dict(fault_script or {})
        self._command_count = 0
        mock = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args: Any) -> None:
                pass

            def _reply(self, status: int, doc: dict[str, Any]) -> None:
                body = json.dumps(doc).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self) -> None:
                if self.path == HEALTH_ENDPOINT:
                    mock._record("GET", self.path, None)
                    self._reply(200, {"name": MOCK_ROBOT_NAME, "apiVersion": MOCK_API_VERSION})
                else:
                    self._reply(404, {"status": "NotFound"})

            def do_POST(self) -> None:
                length = int(self.headers.get("Content-Length", 0))
                raw = self.rfile.read(length) if length else b"{}"
                try:
                    payload = json.loads(raw.decode("utf-8"))
                except (json.JSONDecodeError, UnicodeDecodeError):
                    payload = None
                if self.path not in _COMMAND_ENDPOINTS:
                    self._reply(404, {"status": "NotFound"})
                    return
                status = mock._record("POST", self.path, payload)
                if status == 200:
                    self._reply(200, {"status": "Success"})
                else:
                    self._reply(status, {"status": "Error"})

        try:
            self._server = ThreadingHTTPServer(("127.0.0.1", port), Handler)
        except OSError as exc:
            raise BindError(f"cannot bind port {port}: {exc}") from exc
        self.port = self._server.server_address[1]
        self.ip = "127.0.0.1"
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def _record(self, method: str, path: str, payload: Any) -> int:
        with self._lock:
            status = 200
            if method == "POST":
                status = self._faults.get(self._command_count, 200)
                self._command_count += 1
            self._calls.append({"method": method, "path": path, "payload": payload})
            return status

    @property
    def calls(self) -> list[dict[str, Any]]:
        with self._lock:
            return [dict(c) for c in self._calls]

    @property
    def command_calls(self) -> list[dict[str, Any]]:
        return [c for c in self.calls if c["method"] == "POST"]

    def reset(self) -> None:
        with self._lock:
            self._calls.clear()
            self._command_count = 0

    def set_faults(self, fault_script: dict[int, int]) -> None:
        with self._lock:
            self._faults = dict(fault_script)

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self) -> "MockRobot":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()


def mock_robot_serve(port: int = 0, fault_script: dict[int, int] | None = None) -> MockRobot:
    """Start the mock robot; returns a handle exposing the call log."""
    return MockRobot(port, fault_script)


def load_fault_script(path: str | Path) -> dict[int, int]:
    """Fault scripts are JSON objects mapping command index to HTTP status."""
    doc = json.loads(Path(path).read_text("utf-8"))
    return {int(index): int(status) for index, status in doc.items()}
