from __future__ import annotations

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from storybot.catalog import builtin_catalog
from storybot.gateway import GatewayConfig, ScriptedMockGateway
from storybot.robot import mock_robot_serve
from storybot.service import ServiceConfig, create_app


@pytest.fixture(scope="session")
def catalog():
    return builtin_catalog()[0]


@pytest.fixture(scope="session")
def manifest():
    return builtin_catalog()[1]


@pytest.fixture
def mock_gateway():
    return ScriptedMockGateway()


@pytest.fixture(scope="session")
def mock_robot():
    with mock_robot_serve() as robot:
        yield robot


@pytest.fixture
def service(tmp_path: Path):
    """A live service with a scripted gateway and virtual deploy pacing."""
    config = ServiceConfig(storage_dir=tmp_path / "store", gateway=GatewayConfig(), pacing="virtual")
    app = create_app(config)
    with TestClient(app) as client:
        yield client, app.state.gateway


def goal_reply(*goals: tuple[str, str, list[dict]]) -> str:
    """Build a goal-set JSON reply for the scripted gateway."""
    return json.dumps({
        "goals": [
            {"snippet": snippet, "goal": goal, "hints": hints}
            for snippet, goal, hints in goals
        ]
    })


def speech_hint(text: str = "Open the Speech category and add a speak block.") -> dict:
    return {"text": text, "block_refs": [{"category": "Speech", "kind_id": "speak"}], "placement": None}
