"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Everything runs against the scripted mock gateway and the mock robot; no
network or model access is needed.
"""

from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager
from pathlib import Path

import jsonschema
import pytest
from fastapi.testclient import TestClient

from genprog import ProgramGenerator
from oracle import walk_violations
from storybot.errors import SchemaError
from storybot.gateway import GatewayConfig, PromptBundle, ScriptedMockGateway, complete_structured, load_schema
from storybot.goals import generate_goals
from storybot.narrative import Narrative
from storybot.program import (
    Block,
    Wait,
    decode,
    encode,
    lower,
    program_to_jsonable,
    start_program,
    validate,
)
from storybot.robot import VirtualClock, command_for, connect, deploy
from storybot.service import ServiceConfig, create_app
from storybot.simulator import encode_trace, run
from storybot.store import replay_events

FIXTURES = Path(__file__).parent / "fixtures"


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}", flush=True)
        raise
    print(f"[PASS] {name}", flush=True)


def test_program_round_trip(catalog):
    with criterion("program round-trip (1000 programs, exact)"):
        started = time.monotonic()
        generator = ProgramGenerator(catalog, seed=1001)
        for _ in range(1000):
            program = generator.program()
            decoded = decode(encode(program))
            assert decoded == program
            assert encode(decoded) == encode(program)
        assert time.monotonic() - started < 30


def test_validator_oracle_equivalence(catalog):
    with criterion("validator oracle equivalence (1000 cases, half invalid)"):
        generator = ProgramGenerator(catalog, seed=2002)
        for case in range(1000):
            program = generator.program(min_len=1)
            if case % 2:
                program, _ = generator.mutate_invalid(program)
            expected = walk_violations(program, catalog)
            report = validate(program, catalog)
            assert report.ok == (not expected)
            if case % 2:
                assert expected, "mutation must actually invalidate the program"
            assert sorted((v.path, v.code) for v in report.violations) == sorted(expected)


def _closed_form_total(blocks) -> float:
    total = 0.0
    for block in blocks:
        if block.kind_id == "wait":
            total += float(block.args["seconds"])
        else:  # repeat
            total += block.args["count"] * _closed_form_total(block.children["body"])
    return total


def _random_wait_tree(rng, depth: int):
    blocks = []
    for _ in range(rng.randint(1, 4)):
        if depth < 3 and rng.random() < 0.4:
            blocks.append(Block("repeat", {"count": rng.randint(1, 4)},
                                {"body": _random_wait_tree(rng, depth + 1)}))
        else:
            blocks.append(Block("wait", {"seconds": rng.randint(1, 50) / 10}))
    return blocks


def test_lowering_arithmetic(catalog):
    import random

    with criterion("lowering arithmetic (closed-form totals, speech oracle)"):
        anchored = lower(start_program([
            Block("repeat", {"count": 3}, {"body": [Block("wait", {"seconds": 2})]}),
        ]), catalog)
        assert math.isclose(anchored.total_duration, 6.0, abs_tol=1e-9)
        assert len(anchored.actions) == 3

        rng = random.Random(303)
        for _ in range(100):
            body = _random_wait_tree(rng, 0)
            timeline = lower(start_program(body), catalog)
            assert math.isclose(timeline.total_duration, _closed_form_total(body), abs_tol=1e-9)

        texts = ["Hello how are you today", "hi", "", "one two three four five six seven eight",
                 "a  b   c", "word " * 40]
        for text in texts:
            for rate in (1.0, 2.0, 2.5, 3.3):
                timeline = lower(start_program([Block("speak", {"text": text})]), catalog, rate)
                expected = max(1.0, len(text.split()) / rate)
                assert timeline.actions[0][1].est_duration == expected


def test_simulator_determinism_and_clock(catalog):
    with criterion("simulator determinism and exact clock (10 reps, 200 programs)"):
        generator = ProgramGenerator(catalog, seed=4004)
        reference_timeline = lower(generator.program(min_len=3), catalog)
        reference_bytes = encode_trace(run(reference_timeline))
        for _ in range(9):
            assert encode_trace(run(reference_timeline)) == reference_bytes

        for _ in range(200):
            timeline = lower(generator.program(min_len=1), catalog)
            trace = run(timeline)
            assert trace.final.clock == timeline.total_duration


def test_sim_robot_equivalence(catalog, mock_robot):
    with criterion("sim/robot equivalence (200 programs, exact command image)"):
        started = time.monotonic()
        connection = connect(mock_robot.ip, mock_robot.port)
        generator = ProgramGenerator(catalog, seed=5005, max_repeat=3)
        for _ in range(200):
            timeline = lower(generator.program(min_len=1, max_len=4), catalog)
            mock_robot.reset()
            report = deploy(connection, timeline, clock=VirtualClock())
            assert report.completed
            expected = [command_for(action) for _, action in timeline.actions
                        if not isinstance(action, Wait)]
            received = [(call["path"], call["payload"]) for call in mock_robot.command_calls]
            assert received == expected
        assert time.monotonic() - started < 60


def test_hallucination_guardrail(catalog, tmp_path):
    with criterion("hallucination guardrail (timer blocks flagged, goals kept)"):
        gateway = ScriptedMockGateway.from_file(FIXTURES / "hallucinated_goals.json")
        story = "the robot reminds Sam every hour while a timer counts down the break"
        narrative = Narrative(story_text=story, revisions=[story])
        goalset = generate_goals(narrative, gateway, catalog)
        assert len(goalset.goals) == 2
        assert all(goal.verdict.status == "flagged" for goal in goalset.goals)
        assert goalset.goals[0].verdict.unknown_refs == ("hourly_alarm",)
        assert goalset.goals[1].verdict.unknown_refs == ("set_timer",)
        assert [goal.goal for goal in goalset.goals] == [
            "Set an hourly alarm", "Start a five minute timer",
        ]

        # The same flagged goals stay retrievable through the service.
        config = ServiceConfig(storage_dir=tmp_path / "store", gateway=GatewayConfig(), pacing="virtual")
        with TestClient(create_app(config)) as client:
            fixture_replies = json.loads((FIXTURES / "hallucinated_goals.json").read_text())
            client.app.state.gateway.push("sounds good", story, *fixture_replies)
            sid = client.post("/sessions").json()["id"]
            client.post(f"/sessions/{sid}/chat", json={"message": "hourly reminders"})
            client.post(f"/sessions/{sid}/summarize")
            assert client.post(f"/sessions/{sid}/goals").status_code == 200
            listed = client.get(f"/sessions/{sid}/goals").json()["current"]
            assert [g["verdict"]["status"] for g in listed["goals"]] == ["flagged", "flagged"]
            assert listed["goals"][0]["verdict"]["unknown_refs"] == ["hourly_alarm"]
            assert listed["goals"][1]["verdict"]["unknown_refs"] == ["set_timer"]


def test_schema_guardrail():
    valid = json.dumps({"goals": [{"snippet": "s", "goal": "g",
                                   "hints": [{"text": "t", "block_refs": [], "placement": None}]}]})
    budget = 3
    with criterion("schema guardrail (retry budget boundary, k in 0..4)"):
        for k in range(5):
            gateway = ScriptedMockGateway(["garbage"] * k + [valid])
            if k <= budget:
                reply = complete_structured(gateway, PromptBundle(system="sys"), "goal_set", budget)
                assert reply.attempts == k + 1
            else:
                with pytest.raises(SchemaError) as exc:
                    complete_structured(gateway, PromptBundle(system="sys"), "goal_set", budget)
                assert exc.value.attempts == budget + 1


def _study_buddy_program() -> dict:
    # Touches Control, Math, Movement, Light, Speech, Face, and Audio.
    program = start_program([
        Block("set_led", {"red": 0, "green": 255, "blue": 0}),
        Block("move_arm", {"side": "right", "position": -20, "duration": 0.5}),
        Block("speak", {"text": "Hello Sam, ready to study?"}),
        Block("speak", {"text": "How is the study session going?"}),
        Block("move_head", {"pitch": 10, "roll": 0, "yaw": 20, "duration": 0.5}),
        Block("play_audio", {"clip": "chime"}),
        Block("repeat", {"count": 2}, {"body": [
            Block("wait", {"seconds": Block("random_int", {"min": 1, "max": 2})}),
            Block("set_face", {"expression": "happy"}),
        ]}),
        Block("play_audio", {"clip": "fanfare"}),
    ], seed=7)
    return program_to_jsonable(program)


def test_end_to_end_scripted_session(tmp_path, mock_robot, catalog):
    with criterion("end-to-end scripted session with event replay"):
        started = time.monotonic()
        config = ServiceConfig(
            storage_dir=tmp_path / "store",
            gateway=GatewayConfig(provider="scripted_mock",
                                  mock_script=str(FIXTURES / "study_buddy_session.json")),
            pacing="virtual",
        )
        app = create_app(config)
        with TestClient(app) as client:
            sid = client.post("/sessions").json()["id"]

            reply = client.post(f"/sessions/{sid}/chat",
                                json={"message": "I want Misty to be a study buddy"})
            assert reply.status_code == 200

            for kind in ("characters", "locations", "time", "actions", "events", "ending", "emotions"):
                assert client.post(f"/sessions/{sid}/milestones/{kind}",
                                   json={"complete": True}).status_code == 200
            milestones = client.get(f"/sessions/{sid}").json()["narrative"]["milestones"]
            assert all(m["complete"] for m in milestones)

            summary = client.post(f"/sessions/{sid}/summarize").json()
            assert "greets the user" in summary["story_text"]

            goals = client.post(f"/sessions/{sid}/goals").json()
            goal_texts = [g["goal"] for g in goals["goals"]]
            assert "Have Misty greet the user" in goal_texts
            assert "Have Misty ask about the study session" in goal_texts
            assert all(g["verdict"]["status"] == "valid" for g in goals["goals"])
            for goal in goals["goals"]:
                assert goal["snippet"] in summary["story_text"]

            program_doc = _study_buddy_program()
            upload = client.put(f"/sessions/{sid}/program", content=json.dumps(program_doc))
            assert upload.json()["ok"]

            kinds_used = set()

            def collect(block):
                kinds_used.add(block["kind"])
                for value in block.get("args", {}).values():
                    if isinstance(value, dict):
                        collect(value)
                for seq in block.get("children", {}).values():
                    for child in seq:
                        collect(child)

            collect(program_doc["root"])
            categories = {catalog.by_id[k].category for k in kinds_used}
            assert len(categories) >= 5

            assert client.post(f"/sessions/{sid}/validate").json()["ok"]

            connect_reply = client.post(f"/sessions/{sid}/connect",
                                        json={"ip": mock_robot.ip, "port": mock_robot.port})
            assert connect_reply.json()["state"] == "connected"

            mock_robot.reset()
            outcome = client.post(f"/sessions/{sid}/run", json={"mode": "sim_and_robot"}).json()
            assert outcome["report"]["outcome"]["status"] == "completed"
            assert outcome["trace"]["final"]["clock"] > 0
            assert len(mock_robot.command_calls) == len(outcome["report"]["commands_sent"])

            final_doc = client.get(f"/sessions/{sid}").json()
            jsonschema.validate(final_doc, load_schema("session"))
            events = client.get(f"/sessions/{sid}/activity").json()["events"]
            assert replay_events(events) == final_doc
        assert time.monotonic() - started < 10


def test_run_mode_gate(tmp_path, mock_robot):
    with criterion("run-mode gate (no robot-only mode, no calls when disconnected)"):
        config = ServiceConfig(storage_dir=tmp_path / "store", gateway=GatewayConfig(), pacing="virtual")
        with TestClient(create_app(config)) as client:
            sid = client.post("/sessions").json()["id"]
            program = program_to_jsonable(start_program([Block("speak", {"text": "hi"})]))
            client.put(f"/sessions/{sid}/program", content=json.dumps(program))

            mock_robot.reset()
            response = client.post(f"/sessions/{sid}/run", json={"mode": "sim_and_robot"})
            assert response.status_code == 409
            assert response.json()["error"] == "not_connected"
            assert mock_robot.calls == []

            for bad_mode in ("robot", "robot_only", "hardware"):
                rejected = client.post(f"/sessions/{sid}/run", json={"mode": bad_mode})
                assert rejected.status_code == 400

            run_request = load_schema("api_requests")["$defs"]["run_request"]
            assert run_request["properties"]["mode"]["enum"] == ["sim", "sim_and_robot"]
