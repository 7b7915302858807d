import json
import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
import pytest

from storybot.cli import build_parser

FIXTURES = Path(__file__).parent / "fixtures"


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def wait_for(url: str, timeout: float = 15.0) -> None:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        try:
            httpx.get(url, timeout=1.0)
            return
        except httpx.HTTPError:
            time.sleep(0.1)
    raise TimeoutError(f"{url} never came up")


def test_parser_accepts_documented_flags(tmp_path):
    args = build_parser().parse_args([
        "serve", "--port", "9000", "--storage", str(tmp_path),
        "--gateway", "mock:script.json", "--pacing", "virtual",
    ])
    assert args.port == 9000
    assert args.gateway.provider == "scripted_mock"
    assert args.gateway.mock_script == "script.json"

    robot_args = build_parser().parse_args(["mock-robot", "--port", "9001", "--faults", "f.json"])
    assert robot_args.port == 9001


def test_parser_rejects_unknown_gateway(tmp_path):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["serve", "--storage", str(tmp_path), "--gateway", "gpt"])


@pytest.mark.slow
def test_serve_and_mock_robot_processes(tmp_path):
    service_port, robot_port = free_port(), free_port()
    serve_cmd = [
        sys.executable, "-m", "storybot.cli", "serve",
        "--port", str(service_port), "--storage", str(tmp_path / "store"),
        "--gateway", f"mock:{FIXTURES / 'study_buddy_session.json'}",
        "--pacing", "virtual",
    ]
    robot_cmd = [sys.executable, "-m", "storybot.cli", "mock-robot", "--port", str(robot_port)]
    service = subprocess.Popen(serve_cmd, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    robot = subprocess.Popen(robot_cmd, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    try:
        wait_for(f"http://127.0.0.1:{service_port}/catalog")
        wait_for(f"http://127.0.0.1:{robot_port}/api/device")
        base = f"http://127.0.0.1:{service_port}"

        sid = httpx.post(f"{base}/sessions").json()["id"]
        chat = httpx.post(f"{base}/sessions/{sid}/chat", json={"message": "study buddy"})
        assert chat.status_code == 200
        httpx.post(f"{base}/sessions/{sid}/summarize")
        goals = httpx.post(f"{base}/sessions/{sid}/goals", timeout=10.0)
        assert goals.status_code == 200

        program = {"version": 1, "seed": 0, "root": {"kind": "start", "args": {}, "children": {
            "body": [{"kind": "speak", "args": {"text": "hello"}, "children": {}}]}}}
        httpx.put(f"{base}/sessions/{sid}/program", content=json.dumps(program))
        connected = httpx.post(f"{base}/sessions/{sid}/connect",
                               json={"ip": "127.0.0.1", "port": robot_port})
        assert connected.json()["state"] == "connected"
        result = httpx.post(f"{base}/sessions/{sid}/run", json={"mode": "sim_and_robot"}, timeout=10.0)
        assert result.json()["report"]["outcome"]["status"] == "completed"
    finally:
        service.terminate()
        robot.terminate()
        service.wait(timeout=10)
        robot.wait(timeout=10)
