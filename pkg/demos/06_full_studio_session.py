"""A whole studio session against the real HTTP service.

Starts the session service (scripted gateway, virtual pacing) and the mock
robot in-process, then walks one session through every phase: chat,
milestones, summary, goals, program upload, simulation, connect, deploy,
and finally replays the activity log to verify it reconstructs the session.

Run:  python demos/06_full_studio_session.py
"""

import json
import socket
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from storybot.gateway import GatewayConfig
from storybot.robot import mock_robot_serve
from storybot.service import ServiceConfig, create_app
from storybot.store import replay_events

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "study_buddy_session.json"
STORAGE = Path(__file__).resolve().parent / ".demo_store"


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


port = free_port()
config = ServiceConfig(
    storage_dir=STORAGE,
    gateway=GatewayConfig(provider="scripted_mock", mock_script=str(FIXTURE)),
    pacing="virtual",
)
server = uvicorn.Server(uvicorn.Config(create_app(config), host="127.0.0.1", port=port, log_level="error"))
threading.Thread(target=server.run, daemon=True).start()
while not server.started:
    time.sleep(0.05)

base = f"http://127.0.0.1:{port}"
with mock_robot_serve() as robot, httpx.Client(base_url=base, timeout=10.0) as client:
    sid = client.post("/sessions").json()["id"]
    print("session:", sid)

    print("agent:", client.post(f"/sessions/{sid}/chat",
                                json={"message": "I want Misty to be a study buddy"}).json()["reply"])

    for kind in ("characters", "locations", "time", "actions", "events", "ending", "emotions"):
        client.post(f"/sessions/{sid}/milestones/{kind}", json={"complete": True})
    print("milestones marked complete")

    story = client.post(f"/sessions/{sid}/summarize").json()["story_text"]
    print("story:", story[:90], "...")

    goals = client.post(f"/sessions/{sid}/goals").json()
    print("goals:")
    for goal in goals["goals"]:
        print(f"  - {goal['goal']} [{goal['verdict']['status']}]")

    program = {
        "version": 1, "seed": 7,
        "root": {"kind": "start", "args": {}, "children": {"body": [
            {"kind": "set_led", "args": {"red": 0, "green": 255, "blue": 0}, "children": {}},
            {"kind": "move_arm", "args": {"side": "right", "position": -20, "duration": 0.5}, "children": {}},
            {"kind": "speak", "args": {"text": "Hello Sam, ready to study?"}, "children": {}},
            {"kind": "set_face", "args": {"expression": "happy"}, "children": {}},
            {"kind": "play_audio", "args": {"clip": "fanfare"}, "children": {}},
        ]}},
    }
    upload = client.put(f"/sessions/{sid}/program", content=json.dumps(program)).json()
    print("program upload ok:", upload["ok"])

    connection = client.post(f"/sessions/{sid}/connect",
                             json={"ip": robot.ip, "port": robot.port}).json()
    print("robot connection:", connection["state"], "->", connection["robot_name"])

    result = client.post(f"/sessions/{sid}/run", json={"mode": "sim_and_robot"}).json()
    print("run outcome:", result["report"]["outcome"]["status"],
          f"({len(result['report']['commands_sent'])} commands,"
          f" {result['trace']['final']['clock']:.1f}s of behavior)")

    events = client.get(f"/sessions/{sid}/activity").json()["events"]
    final = client.get(f"/sessions/{sid}").json()
    print("activity log:", [event["kind"] for event in events])
    print("replaying the log reconstructs the session exactly:", replay_events(events) == final)

server.should_exit = True
