"""Block language vocabulary and the robot capability manifest.

The catalog is the single source of truth: the program validator, the
simulator's range checks, goal validation, and the text embedded in every
language-model prompt are all derived from the kind definitions below.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

CATEGORIES = ("Control", "Math", "Movement", "Light", "Speech", "Face", "Audio")

FACE_EXPRESSIONS = ("default", "happy", "sad", "surprise", "rage_eyes", "love", "sleepy")
AUDIO_CLIPS = ("chime", "fanfare", "beep_low", "beep_high")

# Playback length of each built-in clip, in seconds. Used when lowering
# play_audio blocks into timed actions.
AUDIO_CLIP_DURATIONS = {
    "chime": 1.0,
    "fanfare": 2.5,
    "beep_low": 0.5,
    "beep_high": 0.5,
}


@dataclass(frozen=True)
class NumberSlot:
    min: float
    max: float
    unit: str = ""

    type = "number"


@dataclass(frozen=True)
class TextSlot:
    max_len: int

    type = "text"


@dataclass(frozen=True)
class EnumSlot:
    options: tuple[str, ...]

    type = "enum"


Slot = Union[NumberSlot, TextSlot, EnumSlot]


@dataclass(frozen=True)
class ParamSpec:
    name: str
    slot: Slot
    accepts_value_block: bool = False


@dataclass(frozen=True)
class BlockKind:
    id: str
    category: str
    params: tuple[ParamSpec, ...]
    connects_as: str  # statement | value | root
    child_slots: tuple[str, ...] = ()

    def param(self, name: str) -> ParamSpec:
        for spec in self.params:
            if spec.name == name:
                return spec
        raise KeyError(name)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(spec.name for spec in self.params)


@dataclass(frozen=True)
class CapabilityEntry:
    verb: str
    block_ids: tuple[str, ...]
    description: str


@dataclass(frozen=True)
class CapabilityManifest:
    capabilities: tuple[CapabilityEntry, ...]
    face_expressions: tuple[str, ...]
    audio_clips: tuple[str, ...]


@dataclass(frozen=True)
class Catalog:
    """Ordered collection of block kinds with id lookup."""

    kinds: tuple[BlockKind, ...]
    by_id: Mapping[str, BlockKind] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index = {kind.id: kind for kind in self.kinds}
        if len(index) != len(self.kinds):
            raise ValueError("duplicate block kind ids")
        roots = [kind for kind in self.kinds if kind.connects_as == "root"]
        if len(roots) != 1:
            raise ValueError("catalog must define exactly one root kind")
        object.__setattr__(self, "by_id", index)

    def __iter__(self) -> Iterator[BlockKind]:
        return iter(self.kinds)

    def __len__(self) -> int:
        return len(self.kinds)

    @property
    def root_kind(self) -> BlockKind:
        return next(kind for kind in self.kinds if kind.connects_as == "root")


def _num(name: str, lo: float, hi: float, unit: str = "", value_ok: bool = True) -> ParamSpec:
    return ParamSpec(name, NumberSlot(lo, hi, unit), accepts_value_block=value_ok)


_KINDS = (
    BlockKind("start", "Control", (), "root", child_slots=("body",)),
    BlockKind("repeat", "Control", (_num("count", 1, 100),), "statement", child_slots=("body",)),
    BlockKind("wait", "Control", (_num("seconds", 0.1, 60, "s"),), "statement"),
    BlockKind("number", "Math", (_num("value", -10000, 10000, value_ok=False),), "value"),
    BlockKind(
        "random_int",
        "Math",
        (_num("min", -10000, 10000, value_ok=False), _num("max", -10000, 10000, value_ok=False)),
        "value",
    ),
    BlockKind(
        "move_head",
        "Movement",
        (
            _num("pitch", -40, 26, "deg"),
            _num("roll", -40, 40, "deg"),
            _num("yaw", -90, 90, "deg"),
            _num("duration", 0.2, 10, "s"),
        ),
        "statement",
    ),
    BlockKind(
        "move_arm",
        "Movement",
        (
            ParamSpec("side", EnumSlot(("left", "right"))),
            _num("position", -29, 90, "deg"),
            _num("duration", 0.2, 10, "s"),
        ),
        "statement",
    ),
    BlockKind(
        "set_led",
        "Light",
        (_num("red", 0, 255), _num("green", 0, 255), _num("blue", 0, 255)),
        "statement",
    ),
    BlockKind("speak", "Speech", (ParamSpec("text", TextSlot(500)),), "statement"),
    BlockKind("set_face", "Face", (ParamSpec("expression", EnumSlot(FACE_EXPRESSIONS)),), "statement"),
    BlockKind("play_audio", "Audio", (ParamSpec("clip", EnumSlot(AUDIO_CLIPS)),), "statement"),
)

# One capability verb per category; block membership is computed from the
# catalog so the manifest can never drift from the real vocabulary.
_CATEGORY_VERBS = {
    "Control": "sequence, repeat, and pause actions",
    "Math": "plug literal or random numbers into action parameters",
    "Movement": "move its head and arms",
    "Light": "change its chest LED color",
    "Speech": "speak text aloud",
    "Face": "show a facial expression on its screen",
    "Audio": "play a built-in sound clip",
}

_KIND_BLURBS = {
    "start": "begins the program and holds the action sequence",
    "repeat": "runs its body the given number of times",
    "wait": "pauses before the next action",
    "number": "a literal number usable in any number slot",
    "random_int": "a random integer drawn once per program run",
    "move_head": "turns the head to the target angles",
    "move_arm": "swings one arm to the target position",
    "set_led": "sets the chest LED to an RGB color",
    "speak": "speaks the given text aloud",
    "set_face": "shows the named expression on the face screen",
    "play_audio": "plays the named sound clip",
}


def _slot_text(spec: ParamSpec) -> str:
    slot = spec.slot
    if isinstance(slot, NumberSlot):
        unit = f" {slot.unit}" if slot.unit else ""
        return f"{spec.name}: {_fmt_num(slot.min)}..{_fmt_num(slot.max)}{unit}"
    if isinstance(slot, TextSlot):
        return f"{spec.name}: text up to {slot.max_len} chars"
    return f"{spec.name}: {'|'.join(slot.options)}"


def _fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else str(x)


def _kind_signature(kind: BlockKind) -> str:
    if not kind.params:
        return kind.id
    return f"{kind.id}({', '.join(_slot_text(p) for p in kind.params)})"


def build_manifest(catalog: Catalog) -> CapabilityManifest:
    """Derive the capability manifest mechanically from a catalog."""
    entries = []
    for category in CATEGORIES:
        kinds = [kind for kind in catalog if kind.category == category]
        if not kinds:
            continue
        detail = "; ".join(f"{_kind_signature(k)} {_KIND_BLURBS.get(k.id, '')}".strip() for k in kinds)
        entries.append(
            CapabilityEntry(
                verb=_CATEGORY_VERBS.get(category, category.lower()),
                block_ids=tuple(kind.id for kind in kinds),
                description=f"[{category}] {detail}",
            )
        )
    face = catalog.by_id["set_face"].param("expression").slot.options if "set_face" in catalog.by_id else ()
    audio = catalog.by_id["play_audio"].param("clip").slot.options if "play_audio" in catalog.by_id else ()
    return CapabilityManifest(tuple(entries), face, audio)


def builtin_catalog() -> tuple[Catalog, CapabilityManifest]:
    """The fixed block vocabulary and the manifest derived from it."""
    catalog = Catalog(_KINDS)
    return catalog, build_manifest(catalog)


def render_manifest_text(manifest: CapabilityManifest) -> str:
    """Human-readable capability text, embedded in prompts and shown in the UI.

    Deterministic: the same manifest always renders to the same string, and
    any change to the catalog surfaces here.
    """
    lines = ["Robot capabilities:"]
    for entry in manifest.capabilities:
        lines.append(f"- The robot can {entry.verb} (blocks: {', '.join(entry.block_ids)}).")
        lines.append(f"  {entry.description}")
    lines.append(f"Face expressions: {', '.join(manifest.face_expressions)}")
    lines.append(f"Audio clips: {', '.join(manifest.audio_clips)}")
    return "\n".join(lines)


def catalog_to_json(catalog: Catalog) -> str:
    """Catalog as a JSON document; the UI renders its block drawer from this."""
    records = []
    for kind in catalog:
        params = []
        for spec in kind.params:
            slot = spec.slot
            if isinstance(slot, NumberSlot):
                slot_doc = {"type": "number", "min": slot.min, "max": slot.max, "unit": slot.unit}
            elif isinstance(slot, TextSlot):
                slot_doc = {"type": "text", "max_len": slot.max_len}
            else:
                slot_doc = {"type": "enum", "options": list(slot.options)}
            params.append({"name": spec.name, "slot": slot_doc, "accepts_value_block": spec.accepts_value_block})
        records.append(
            {
                "id": kind.id,
                "category": kind.category,
                "params": params,
                "connects_as": kind.connects_as,
                "child_slots": list(kind.child_slots),
            }
        )
    return json.dumps(records, indent=2, sort_keys=False)
