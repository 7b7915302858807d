"""Block programs: the tree model, syntax validation, wire codec, and lowering.

A program is a tree of typed blocks rooted at the single ``start`` block.
Validation enforces the connection rules (which blocks may plug where, with
which argument values); ``lower`` flattens a valid tree into the timed
action IR consumed by both the simulator and robot deployment.

Violation codes emitted by the validator:
    bad-root, bad-version, bad-seed, unknown-kind, not-statement,
    missing-arg, unexpected-arg, type-mismatch, out-of-range, text-too-long,
    bad-enum, not-integer, value-not-allowed, not-value, value-out-of-range,
    bad-range, missing-child, unexpected-child
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Any, Sequence

from .catalog import (
    AUDIO_CLIP_DURATIONS,
    BlockKind,
    Catalog,
    EnumSlot,
    NumberSlot,
    TextSlot,
)
from .errors import LoweringError, MalformedProgram

WIRE_VERSION = 1

DEFAULT_SPEECH_RATE_WPS = 2.5

# Face/LED changes are instantaneous on the robot; they get a nominal
# duration so the timeline stays strictly ordered and watchable.
INSTANT_ACTION_DURATION = 0.1

# Number params that only make sense with whole values.
_INTEGER_PARAMS = {("repeat", "count"), ("random_int", "min"), ("random_int", "max")}


@dataclass(frozen=True)
class Block:
    kind_id: str
    args: dict[str, Any] = field(default_factory=dict)
    children: dict[str, list["Block"]] = field(default_factory=dict)


@dataclass(frozen=True)
class BlockProgram:
    root: Block
    version: int = WIRE_VERSION
    seed: int = 0


def start_program(body: Sequence[Block], *, seed: int = 0) -> BlockProgram:
    """Wrap a statement sequence in the root block."""
    return BlockProgram(root=Block("start", {}, {"body": list(body)}), seed=seed)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    path: str
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_jsonable(self) -> list[dict[str, str]]:
        return [{"path": v.path, "code": v.code, "message": v.message} for v in self.violations]


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_whole(value: Any) -> bool:
    return _is_number(value) and float(value).is_integer()


def validate(program: BlockProgram, catalog: Catalog) -> ValidationReport:
    """Check every connection and argument rule; violations are data, not errors."""
    out: list[Violation] = []
    if program.version != WIRE_VERSION or isinstance(program.version, bool):
        out.append(Violation("/version", "bad-version", f"unsupported format version {program.version!r}"))
    if not isinstance(program.seed, int) or isinstance(program.seed, bool) or program.seed < 0:
        out.append(Violation("/seed", "bad-seed", f"seed must be a non-negative integer, got {program.seed!r}"))
    root_kind = catalog.by_id.get(program.root.kind_id)
    if root_kind is None:
        out.append(Violation("/root", "unknown-kind", f"unknown kind {program.root.kind_id!r}"))
    else:
        if root_kind.connects_as != "root":
            out.append(Violation("/root", "bad-root", f"program root must be {catalog.root_kind.id!r}"))
        _check_block(program.root, root_kind, "/root", catalog, out)
    return ValidationReport(tuple(out))


def _check_block(block: Block, kind: BlockKind, path: str, catalog: Catalog, out: list[Violation]) -> None:
    for spec in kind.params:
        if spec.name not in block.args:
            out.append(Violation(f"{path}/{spec.name}", "missing-arg", f"missing argument {spec.name!r}"))
    for name in block.args:
        if name not in kind.param_names:
            out.append(Violation(f"{path}/{name}", "unexpected-arg", f"{kind.id!r} has no parameter {name!r}"))
    for spec in kind.params:
        if spec.name in block.args:
            _check_arg(block.args[spec.name], kind, spec.name, f"{path}/{spec.name}", catalog, out)

    for slot_name in kind.child_slots:
        if slot_name not in block.children:
            out.append(Violation(f"{path}/{slot_name}", "missing-child", f"missing child sequence {slot_name!r}"))
    for name, children in block.children.items():
        child_path = f"{path}/{name}"
        if name not in kind.child_slots:
            out.append(Violation(child_path, "unexpected-child", f"{kind.id!r} has no child sequence {name!r}"))
            continue
        for i, child in enumerate(children):
            item_path = f"{child_path}/{i}"
            child_kind = catalog.by_id.get(child.kind_id)
            if child_kind is None:
                out.append(Violation(item_path, "unknown-kind", f"unknown kind {child.kind_id!r}"))
                continue
            if child_kind.connects_as != "statement":
                out.append(
                    Violation(item_path, "not-statement", f"{child.kind_id!r} cannot sit in a statement sequence")
                )
            _check_block(child, child_kind, item_path, catalog, out)


def _check_arg(value: Any, kind: BlockKind, name: str, path: str, catalog: Catalog, out: list[Violation]) -> None:
    spec = kind.param(name)
    slot = spec.slot
    if isinstance(value, Block):
        _check_value_block(value, kind, spec, path, catalog, out)
        return
    if isinstance(slot, NumberSlot):
        if not _is_number(value):
            out.append(Violation(path, "type-mismatch", f"{name!r} expects a number, got {value!r}"))
        elif not slot.min <= value <= slot.max:
            out.append(Violation(path, "out-of-range", f"{name!r} must be within {slot.min}..{slot.max}"))
        elif (kind.id, name) in _INTEGER_PARAMS and not _is_whole(value):
            out.append(Violation(path, "not-integer", f"{name!r} must be a whole number"))
    elif isinstance(slot, TextSlot):
        if not isinstance(value, str):
            out.append(Violation(path, "type-mismatch", f"{name!r} expects text, got {value!r}"))
        elif len(value) > slot.max_len:
            out.append(Violation(path, "text-too-long", f"{name!r} exceeds {slot.max_len} characters"))
    elif isinstance(slot, EnumSlot):
        if not isinstance(value, str):
            out.append(Violation(path, "type-mismatch", f"{name!r} expects one of the listed options"))
        elif value not in slot.options:
            out.append(Violation(path, "bad-enum", f"{value!r} is not an option for {name!r}"))


def _check_value_block(nested: Block, outer_kind: BlockKind, spec, path: str, catalog: Catalog,
                       out: list[Violation]) -> None:
    slot = spec.slot
    if not (isinstance(slot, NumberSlot) and spec.accepts_value_block):
        out.append(Violation(path, "value-not-allowed", f"{spec.name!r} does not accept value blocks"))
    nested_kind = catalog.by_id.get(nested.kind_id)
    if nested_kind is None:
        out.append(Violation(path, "unknown-kind", f"unknown kind {nested.kind_id!r}"))
        return
    if nested_kind.connects_as != "value":
        out.append(Violation(path, "not-value", f"{nested.kind_id!r} is not a value block"))
    _check_block(nested, nested_kind, path, catalog, out)
    if not isinstance(slot, NumberSlot):
        return

    # Static range safety: the plugged value must be provably inside the slot.
    integer_slot = (outer_kind.id, spec.name) in _INTEGER_PARAMS
    if nested_kind.id == "number":
        literal = nested.args.get("value")
        if _is_number(literal):
            if not slot.min <= literal <= slot.max:
                out.append(Violation(path, "value-out-of-range", f"number {literal!r} falls outside {spec.name!r}"))
            elif integer_slot and not _is_whole(literal):
                out.append(Violation(path, "not-integer", f"{spec.name!r} must receive a whole number"))
    elif nested_kind.id == "random_int":
        lo, hi = nested.args.get("min"), nested.args.get("max")
        if _is_number(lo) and _is_number(hi):
            if lo > hi:
                out.append(Violation(path, "bad-range", "random_int needs min <= max"))
            elif lo < slot.min or hi > slot.max:
                out.append(Violation(path, "value-out-of-range", f"random_int {lo!r}..{hi!r} falls outside {spec.name!r}"))


# ---------------------------------------------------------------------------
# Wire codec
# ---------------------------------------------------------------------------

def _block_to_jsonable(block: Block) -> dict[str, Any]:
    args: dict[str, Any] = {}
    for name, value in block.args.items():
        args[name] = _block_to_jsonable(value) if isinstance(value, Block) else value
    children = {name: [_block_to_jsonable(child) for child in seq] for name, seq in block.children.items()}
    return {"kind": block.kind_id, "args": args, "children": children}


def program_to_jsonable(program: BlockProgram) -> dict[str, Any]:
    return {"version": program.version, "seed": program.seed, "root": _block_to_jsonable(program.root)}


def encode(program: BlockProgram) -> bytes:
    """Canonical wire bytes: sorted keys, compact separators.

    Structurally equal programs always encode to identical bytes, which keeps
    golden files and content-hash storage stable.
    """
    return json.dumps(program_to_jsonable(program), sort_keys=True, separators=(",", ":")).encode("utf-8")


def _require(condition: bool, reason: str) -> None:
    if not condition:
        raise MalformedProgram(reason)


def _block_from_jsonable(doc: Any, where: str) -> Block:
    _require(isinstance(doc, dict), f"{where}: block must be an object")
    kind = doc.get("kind")
    _require(isinstance(kind, str), f"{where}: block needs a string 'kind'")
    _require(set(doc) <= {"kind", "args", "children"}, f"{where}: unexpected block keys")

    raw_args = doc.get("args", {})
    _require(isinstance(raw_args, dict), f"{where}: 'args' must be an object")
    args: dict[str, Any] = {}
    for name, value in raw_args.items():
        if isinstance(value, dict):
            args[name] = _block_from_jsonable(value, f"{where}/{name}")
        elif isinstance(value, (str, int, float)) and not isinstance(value, bool):
            args[name] = value
        else:
            raise MalformedProgram(f"{where}/{name}: argument must be a number, text, or nested block")

    raw_children = doc.get("children", {})
    _require(isinstance(raw_children, dict), f"{where}: 'children' must be an object")
    children: dict[str, list[Block]] = {}
    for name, seq in raw_children.items():
        _require(isinstance(seq, list), f"{where}/{name}: child sequence must be a list")
        children[name] = [_block_from_jsonable(item, f"{where}/{name}/{i}") for i, item in enumerate(seq)]
    return Block(kind, args, children)


def decode(data: bytes | str) -> BlockProgram:
    """Parse wire bytes; raises MalformedProgram on shape errors.

    Shape errors cover anything that prevents building the tree at all;
    rule violations (unknown kinds, bad ranges) are left to ``validate``.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedProgram(f"not valid UTF-8: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedProgram(f"not valid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "top level must be an object")
    _require(set(doc) == {"version", "seed", "root"}, "top level must have exactly version, seed, root")
    version, seed = doc["version"], doc["seed"]
    _require(isinstance(version, int) and not isinstance(version, bool), "'version' must be an integer")
    _require(isinstance(seed, int) and not isinstance(seed, bool), "'seed' must be an integer")
    root = _block_from_jsonable(doc["root"], "/root")
    return BlockProgram(root=root, version=version, seed=seed)


# ---------------------------------------------------------------------------
# Actions and lowering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Speak:
    text: str
    est_duration: float

    @property
    def duration(self) -> float:
        return self.est_duration


@dataclass(frozen=True)
class SetFace:
    expression: str

    duration = INSTANT_ACTION_DURATION


@dataclass(frozen=True)
class MoveHead:
    pitch: float
    roll: float
    yaw: float
    duration: float


@dataclass(frozen=True)
class MoveArm:
    side: str
    position: float
    duration: float


@dataclass(frozen=True)
class SetLed:
    r: int
    g: int
    b: int

    duration = INSTANT_ACTION_DURATION


@dataclass(frozen=True)
class PlayAudio:
    clip: str
    duration: float


@dataclass(frozen=True)
class Wait:
    duration: float


Action = Speak | SetFace | MoveHead | MoveArm | SetLed | PlayAudio | Wait


@dataclass(frozen=True)
class ActionTimeline:
    actions: tuple[tuple[float, Action], ...]
    total_duration: float


def _collect_random_draws(program: BlockProgram, catalog: Catalog) -> dict[str, int]:
    """Resolve every random_int block to one value, fixed by the program seed.

    Blocks are visited in deterministic tree order, so identical (program,
    seed) pairs always resolve identically; a block inside a repeat keeps
    its single value across iterations.
    """
    rng = random.Random(program.seed)
    draws: dict[str, int] = {}

    def visit(block: Block, path: str) -> None:
        kind = catalog.by_id[block.kind_id]
        for spec in kind.params:
            value = block.args[spec.name]
            if isinstance(value, Block) and value.kind_id == "random_int":
                lo, hi = int(value.args["min"]), int(value.args["max"])
                draws[f"{path}/{spec.name}"] = rng.randint(lo, hi)
        for slot_name in kind.child_slots:
            for i, child in enumerate(block.children[slot_name]):
                visit(child, f"{path}/{slot_name}/{i}")

    visit(program.root, "/root")
    return draws


def lower(program: BlockProgram, catalog: Catalog,
          speech_rate_wps: float = DEFAULT_SPEECH_RATE_WPS) -> ActionTimeline:
    """Flatten a valid program into the timed action sequence.

    Depth-first sequential execution: repeat bodies unroll, random values
    resolve once from the program seed, speech length is estimated from the
    word count at the given rate (floor 1.0 s).
    """
    report = validate(program, catalog)
    if not report.ok:
        first = report.violations[0]
        raise LoweringError(first.path, first.message)

    draws = _collect_random_draws(program, catalog)
    actions: list[tuple[float, Action]] = []
    clock = 0.0

    def arg(block: Block, path: str, name: str) -> Any:
        value = block.args[name]
        if isinstance(value, Block):
            if value.kind_id == "number":
                return value.args["value"]
            return draws[f"{path}/{name}"]
        return value

    def emit(action: Action) -> None:
        nonlocal clock
        actions.append((clock, action))
        clock += action.duration

    def run_sequence(blocks: list[Block], prefix: str) -> None:
        for i, block in enumerate(blocks):
            path = f"{prefix}/{i}"
            kind = block.kind_id
            if kind == "repeat":
                for _ in range(int(arg(block, path, "count"))):
                    run_sequence(block.children["body"], f"{path}/body")
            elif kind == "wait":
                emit(Wait(float(arg(block, path, "seconds"))))
            elif kind == "speak":
                text = block.args["text"]
                words = len(text.split())
                emit(Speak(text, max(1.0, words / speech_rate_wps)))
            elif kind == "set_face":
                emit(SetFace(block.args["expression"]))
            elif kind == "set_led":
                emit(SetLed(
                    int(round(arg(block, path, "red"))),
                    int(round(arg(block, path, "green"))),
                    int(round(arg(block, path, "blue"))),
                ))
            elif kind == "move_head":
                emit(MoveHead(
                    float(arg(block, path, "pitch")),
                    float(arg(block, path, "roll")),
                    float(arg(block, path, "yaw")),
                    float(arg(block, path, "duration")),
                ))
            elif kind == "move_arm":
                emit(MoveArm(
                    block.args["side"],
                    float(arg(block, path, "position")),
                    float(arg(block, path, "duration")),
                ))
            elif kind == "play_audio":
                clip = block.args["clip"]
                emit(PlayAudio(clip, AUDIO_CLIP_DURATIONS[clip]))
            else:  # pragma: no cover - validation rejects anything else
                raise LoweringError(path, f"cannot lower kind {kind!r}")

    run_sequence(program.root.children["body"], "/root/body")
    return ActionTimeline(tuple(actions), clock if actions else 0.0)


_ACTION_TYPES = {
    Speak: "speak", SetFace: "set_face", MoveHead: "move_head", MoveArm: "move_arm",
    SetLed: "set_led", PlayAudio: "play_audio", Wait: "wait",
}


def action_to_jsonable(action: Action) -> dict[str, Any]:
    doc: dict[str, Any] = {"type": _ACTION_TYPES[type(action)]}
    if isinstance(action, Speak):
        doc.update(text=action.text, est_duration=action.est_duration)
    elif isinstance(action, SetFace):
        doc.update(expression=action.expression)
    elif isinstance(action, MoveHead):
        doc.update(pitch=action.pitch, roll=action.roll, yaw=action.yaw)
    elif isinstance(action, MoveArm):
        doc.update(side=action.side, position=action.position)
    elif isinstance(action, SetLed):
        doc.update(r=action.r, g=action.g, b=action.b)
    elif isinstance(action, PlayAudio):
        doc.update(clip=action.clip)
    doc["duration"] = action.duration
    return doc


def timeline_to_jsonable(timeline: ActionTimeline) -> dict[str, Any]:
    return {
        "actions": [{"start": start, "action": action_to_jsonable(a)} for start, a in timeline.actions],
        "total_duration": timeline.total_duration,
    }


def encode_timeline(timeline: ActionTimeline) -> bytes:
    """Canonical timeline bytes, for the UI player and determinism checks."""
    return json.dumps(timeline_to_jsonable(timeline), sort_keys=True, separators=(",", ":")).encode("utf-8")
