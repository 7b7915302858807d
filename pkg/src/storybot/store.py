"""Session persistence: one JSON document per session plus an append-only
activity log (JSON Lines), both under a configurable storage directory.

Every state change flows through ``apply_event``, and the live service and
``replay_events`` share it, so replaying a session's log over an empty
store reconstructs the exact same document.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from pathlib import Path
from typing import Any

from .errors import StorageError
from .narrative import MILESTONE_KINDS

PHASES = ("narrative_creation", "goal_generation", "programming", "deployment")

EVENT_KINDS = (
    "session_created", "chat", "help_request", "milestone_set", "summarized",
    "goals_generated", "goals_retried", "hint_opened", "program_edited",
    "simulated", "connected", "deployed",
)

# Which phase an event moves the session to. Absent kinds (help requests,
# hint opens) are reads with logging and leave the phase alone.
_EVENT_PHASE = {
    "chat": "narrative_creation",
    "milestone_set": "narrative_creation",
    "summarized": "narrative_creation",
    "goals_generated": "goal_generation",
    "goals_retried": "goal_generation",
    "program_edited": "programming",
    "simulated": "programming",
    "connected": "deployment",
    "deployed": "deployment",
}


def new_session_id() -> str:
    return secrets.token_hex(16)


def empty_session(session_id: str, created_at: float) -> dict[str, Any]:
    return {
        "id": session_id,
        "phase": "narrative_creation",
        "narrative": {
            "story_text": "",
            "revisions": [],
            "milestones": [{"kind": kind, "complete": False} for kind in MILESTONE_KINDS],
            "transcript": [],
        },
        "goalsets": [],
        "program": None,
        "connection": None,
        "created_at": created_at,
        "updated_at": created_at,
    }


def make_event(session_id: str, kind: str, payload: dict[str, Any], timestamp: float) -> dict[str, Any]:
    if kind not in EVENT_KINDS:
        raise ValueError(f"unknown event kind {kind!r}")
    return {"session_id": session_id, "timestamp": timestamp, "kind": kind, "payload": payload}


def apply_event(doc: dict[str, Any], event: dict[str, Any]) -> dict[str, Any]:
    """Fold one event into a session document (mutates and returns it)."""
    kind, payload = event["kind"], event["payload"]
    narrative = doc["narrative"]
    if kind == "chat":
        narrative["transcript"].extend(payload["turns"])
    elif kind == "milestone_set":
        for milestone in narrative["milestones"]:
            if milestone["kind"] == payload["kind"]:
                milestone["complete"] = payload["complete"]
    elif kind == "summarized":
        narrative["revisions"].append(payload["story_text"])
        narrative["story_text"] = payload["story_text"]
    elif kind in ("goals_generated", "goals_retried"):
        doc["goalsets"].append(payload["goalset"])
    elif kind == "program_edited":
        doc["program"] = payload["program"]
    elif kind == "connected":
        doc["connection"] = payload["connection"]
    # session_created, help_request, hint_opened, simulated, deployed:
    # logged for analysis, no artifact change.
    phase = _EVENT_PHASE.get(kind)
    if phase:
        doc["phase"] = phase
    doc["updated_at"] = event["timestamp"]
    return doc


def replay_events(events: list[dict[str, Any]]) -> dict[str, Any]:
    """Rebuild a session document from its activity log alone."""
    if not events or events[0]["kind"] != "session_created":
        raise ValueError("event log must start with session_created")
    first = events[0]
    doc = empty_session(first["payload"]["id"], first["payload"]["created_at"])
    for event in events:
        apply_event(doc, event)
    return doc


class SessionStore:
    """Filesystem-backed store; safe for concurrent sessions.

    Callers serialize operations on one session via ``lock_for``; the store
    itself only guards its small in-memory registries.
    """

    def __init__(self, root: str | os.PathLike[str]) -> None:
        self.root = Path(root)
        try:
            (self.root / "sessions").mkdir(parents=True, exist_ok=True)
            (self.root / "events").mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError(f"cannot use storage directory {self.root}: {exc}") from exc
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}
        self._last_ts: dict[str, float] = {}

    def _session_path(self, session_id: str) -> Path:
        return self.root / "sessions" / f"{session_id}.json"

    def _events_path(self, session_id: str) -> Path:
        return self.root / "events" / f"{session_id}.jsonl"

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def next_timestamp(self, session_id: str, now: float | None = None) -> float:
        """Monotone (non-decreasing) per-session event timestamps."""
        current = time.time() if now is None else now
        with self._guard:
            last = self._last_ts.get(session_id)
        if last is None:
            events = self.events(session_id)
            last = events[-1]["timestamp"] if events else 0.0
        stamped = max(current, last)
        with self._guard:
            self._last_ts[session_id] = stamped
        return stamped

    def save(self, doc: dict[str, Any]) -> None:
        path = self._session_path(doc["id"])
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True), "utf-8")
        tmp.replace(path)

    def load(self, session_id: str) -> dict[str, Any] | None:
        path = self._session_path(session_id)
        if not path.is_file():
            return None
        return json.loads(path.read_text("utf-8"))

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in (self.root / "sessions").glob("*.json"))

    def append_event(self, event: dict[str, Any]) -> None:
        with open(self._events_path(event["session_id"]), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")

    def events(self, session_id: str) -> list[dict[str, Any]]:
        path = self._events_path(session_id)
        if not path.is_file():
            return []
        with open(path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]
