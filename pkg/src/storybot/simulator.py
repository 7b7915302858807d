"""Deterministic execution of an action timeline into sampled robot states.

The UI animates the resulting trace client-side; here we only compute
states. Joints move by linear interpolation, speech and audio show up as
fields while their action is underway, and the clock always lands exactly
on the timeline's total duration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Any

from .catalog import builtin_catalog
from .errors import RangeError
from .program import (
    Action,
    ActionTimeline,
    MoveArm,
    MoveHead,
    PlayAudio,
    SetFace,
    SetLed,
    Speak,
    Wait,
)

DEFAULT_TICK_S = 0.1

_CATALOG, _MANIFEST = builtin_catalog()
_HEAD = _CATALOG.by_id["move_head"]
_ARM = _CATALOG.by_id["move_arm"]

# Rest pose: head level, arms hanging down, LED off.
ARM_REST_POSITION = 90.0


@dataclass(frozen=True)
class HeadPose:
    pitch: float
    roll: float
    yaw: float


@dataclass(frozen=True)
class ArmPose:
    left: float
    right: float


@dataclass(frozen=True)
class LedColor:
    r: int
    g: int
    b: int


@dataclass(frozen=True)
class RobotState:
    head: HeadPose
    arms: ArmPose
    led: LedColor
    face: str
    speaking: str | None
    audio: str | None
    clock: float


@dataclass(frozen=True)
class StateTrace:
    frames: tuple[RobotState, ...]

    @property
    def final(self) -> RobotState:
        return self.frames[-1]


def initial_state() -> RobotState:
    return RobotState(
        head=HeadPose(0.0, 0.0, 0.0),
        arms=ArmPose(ARM_REST_POSITION, ARM_REST_POSITION),
        led=LedColor(0, 0, 0),
        face="default",
        speaking=None,
        audio=None,
        clock=0.0,
    )


def _in_range(kind, name: str, value: float) -> bool:
    slot = kind.param(name).slot
    return slot.min <= value <= slot.max


def _check_action(action: Action) -> None:
    if isinstance(action, MoveHead):
        for name, value in (("pitch", action.pitch), ("roll", action.roll),
                            ("yaw", action.yaw), ("duration", action.duration)):
            if not _in_range(_HEAD, name, value):
                raise RangeError(f"move_head {name}={value} outside catalog range")
    elif isinstance(action, MoveArm):
        if action.side not in ("left", "right"):
            raise RangeError(f"move_arm side={action.side!r} is not a valid side")
        for name, value in (("position", action.position), ("duration", action.duration)):
            if not _in_range(_ARM, name, value):
                raise RangeError(f"move_arm {name}={value} outside catalog range")
    elif isinstance(action, SetLed):
        for channel in (action.r, action.g, action.b):
            if not 0 <= channel <= 255:
                raise RangeError(f"set_led channel {channel} outside 0..255")
    elif isinstance(action, SetFace):
        if action.expression not in _MANIFEST.face_expressions:
            raise RangeError(f"unknown face expression {action.expression!r}")
    elif isinstance(action, PlayAudio):
        if action.clip not in _MANIFEST.audio_clips:
            raise RangeError(f"unknown audio clip {action.clip!r}")
    if action.duration <= 0:
        raise RangeError("action duration must be positive")


def step(state: RobotState, action: Action) -> RobotState:
    """State after the action completes; the clock advances by its duration."""
    _check_action(action)
    clock = state.clock + action.duration
    if isinstance(action, Speak):
        return replace(state, speaking=None, clock=clock)
    if isinstance(action, PlayAudio):
        return replace(state, audio=None, clock=clock)
    if isinstance(action, SetFace):
        return replace(state, face=action.expression, clock=clock)
    if isinstance(action, SetLed):
        return replace(state, led=LedColor(action.r, action.g, action.b), clock=clock)
    if isinstance(action, MoveHead):
        return replace(state, head=HeadPose(action.pitch, action.roll, action.yaw), clock=clock)
    if isinstance(action, MoveArm):
        arms = ArmPose(
            action.position if action.side == "left" else state.arms.left,
            action.position if action.side == "right" else state.arms.right,
        )
        return replace(state, arms=arms, clock=clock)
    return replace(state, clock=clock)  # Wait


def sample(state: RobotState, action: Action, elapsed: float) -> RobotState:
    """State partway through an action (0 < elapsed < duration)."""
    return _sample_at(state, action, elapsed, state.clock + elapsed)


def _lerp(a: float, b: float, f: float) -> float:
    return a + (b - a) * f


def _sample_at(state: RobotState, action: Action, elapsed: float, clock: float) -> RobotState:
    if isinstance(action, Speak):
        return replace(state, speaking=action.text, clock=clock)
    if isinstance(action, PlayAudio):
        return replace(state, audio=action.clip, clock=clock)
    if isinstance(action, SetFace):
        return replace(state, face=action.expression, clock=clock)
    if isinstance(action, SetLed):
        return replace(state, led=LedColor(action.r, action.g, action.b), clock=clock)
    fraction = elapsed / action.duration
    if isinstance(action, MoveHead):
        head = HeadPose(
            _lerp(state.head.pitch, action.pitch, fraction),
            _lerp(state.head.roll, action.roll, fraction),
            _lerp(state.head.yaw, action.yaw, fraction),
        )
        return replace(state, head=head, clock=clock)
    if isinstance(action, MoveArm):
        arms = ArmPose(
            _lerp(state.arms.left, action.position, fraction) if action.side == "left" else state.arms.left,
            _lerp(state.arms.right, action.position, fraction) if action.side == "right" else state.arms.right,
        )
        return replace(state, arms=arms, clock=clock)
    return replace(state, clock=clock)  # Wait


def run(timeline: ActionTimeline, tick: float = DEFAULT_TICK_S) -> StateTrace:
    """Fold the timeline into frames at action boundaries and tick marks.

    The final state never depends on the tick: it is exactly the sequential
    fold of ``step`` over the actions.
    """
    state = initial_state()
    frames = [state]
    for _, action in timeline.actions:
        _check_action(action)
        end = state.clock + action.duration
        k = math.floor(state.clock / tick) + 1
        t = k * tick
        while t < end - 1e-9:
            if t > state.clock + 1e-12:
                frames.append(_sample_at(state, action, t - state.clock, t))
            k += 1
            t = k * tick
        state = step(state, action)
        frames.append(state)
    return StateTrace(tuple(frames))


# ---------------------------------------------------------------------------
# Wire helpers
# ---------------------------------------------------------------------------

def state_to_jsonable(state: RobotState) -> dict[str, Any]:
    return {
        "head": {"pitch": state.head.pitch, "roll": state.head.roll, "yaw": state.head.yaw},
        "arms": {"left": state.arms.left, "right": state.arms.right},
        "led": {"r": state.led.r, "g": state.led.g, "b": state.led.b},
        "face": state.face,
        "speaking": state.speaking,
        "audio": state.audio,
        "clock": state.clock,
    }


def trace_to_jsonable(trace: StateTrace) -> dict[str, Any]:
    return {
        "frames": [state_to_jsonable(f) for f in trace.frames],
        "final": state_to_jsonable(trace.final),
    }


def encode_trace(trace: StateTrace) -> bytes:
    """Canonical trace bytes for golden comparisons and the UI player."""
    return json.dumps(trace_to_jsonable(trace), sort_keys=True, separators=(",", ":")).encode("utf-8")
