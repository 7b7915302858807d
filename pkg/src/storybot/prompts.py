"""Prompt text for every language-model call in the studio.

All prompts embed the capability text rendered from the manifest, so the
model is always grounded in what the robot can actually do. The goal prompt
additionally carries one worked story-to-goals example, shipped as a repo
fixture so prompt behavior stays reviewable and testable.
"""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path

from .catalog import Catalog, CapabilityManifest, render_manifest_text

_FIXTURE_DIR = Path(__file__).with_name("fixtures")

MILESTONE_GUIDANCE = {
    "characters": "who appears in the story, including the robot's role",
    "locations": "where the story takes place",
    "time": "when the story happens",
    "actions": "what the robot does, in terms it can physically perform",
    "events": "what happens around the robot and in what order",
    "ending": "how the story wraps up",
    "emotions": "how the robot and the people around it feel",
}

CHAT_INSTRUCTIONS = """\
You are a friendly writing partner helping someone invent a short story \
starring a desk robot. Collaborate: ask one guiding question at a time, \
offer ideas they can take or leave, and never write the whole story for \
them. Keep the story within the robot's real abilities listed below. \
Gently steer the user toward any story milestone still marked incomplete."""

HELP_INSTRUCTIONS = """\
You suggest short story ideas for one specific milestone of a robot story. \
Reply with ONLY a JSON object of the form {"suggestions": ["...", "..."]} \
containing 2 to 4 suggestions, each a single sentence under 300 characters. \
Every suggestion must stay within the robot's abilities listed below."""

SUMMARY_INSTRUCTIONS = """\
You turn a brainstorming conversation into the finished story text. Write \
the user's story as a short narrative in plain prose, faithful to what they \
decided in the conversation. Reply with the story text only, no preamble. \
Keep every robot behavior within the abilities listed below."""

GOAL_INSTRUCTIONS = """\
You turn a user's story about a robot into a short ordered list of \
concrete, programmable goals. Each goal must quote the story snippet it \
comes from, describe one robot behavior, and include at least one hint \
naming which blocks to use, where to place them, and how to set their \
parameters. Only reference blocks and parameter values from the list \
below. Reply with ONLY a JSON document matching the given schema."""


def block_locations_text(catalog: Catalog) -> str:
    """Where each block lives in the program drawer, for prompt grounding."""
    by_category: dict[str, list[str]] = {}
    for kind in catalog:
        by_category.setdefault(kind.category, []).append(kind.id)
    lines = ["The program drawer groups blocks by category:"]
    for category, ids in by_category.items():
        lines.append(f"- {category}: {', '.join(ids)}")
    return "\n".join(lines)


def chat_system_prompt(manifest: CapabilityManifest, milestone_states: dict[str, bool]) -> str:
    progress = "\n".join(
        f"- {kind}: {'complete' if done else 'incomplete'}" for kind, done in milestone_states.items()
    )
    return (
        f"{CHAT_INSTRUCTIONS}\n\n{render_manifest_text(manifest)}\n\n"
        f"Story milestone progress:\n{progress}"
    )


def help_system_prompt(manifest: CapabilityManifest, milestone_kind: str) -> str:
    return (
        f"{HELP_INSTRUCTIONS}\n\n{render_manifest_text(manifest)}\n\n"
        f"The user wants help with the {milestone_kind!r} milestone: "
        f"{MILESTONE_GUIDANCE[milestone_kind]}."
    )


def summary_system_prompt(manifest: CapabilityManifest) -> str:
    return f"{SUMMARY_INSTRUCTIONS}\n\n{render_manifest_text(manifest)}"


def goal_system_prompt(manifest: CapabilityManifest, catalog: Catalog) -> str:
    schema_text = json.dumps(_goal_schema(), indent=2)
    return (
        f"{GOAL_INSTRUCTIONS}\n\n{render_manifest_text(manifest)}\n\n"
        f"{block_locations_text(catalog)}\n\n"
        f"JSON schema for your reply:\n{schema_text}"
    )


@lru_cache(maxsize=1)
def _goal_schema() -> dict:
    from .gateway import load_schema

    return load_schema("goal_set")


@lru_cache(maxsize=1)
def goal_one_shot_example() -> tuple[str, str]:
    """The worked narrative-to-goals example pair, loaded from the fixture."""
    doc = json.loads((_FIXTURE_DIR / "goal_one_shot.json").read_text("utf-8"))
    return doc["input"], json.dumps(doc["output"], indent=2)
