"""Story-creation state: narrative text, chat transcript, and milestones.

The transcript is append-only and every prompt composed here exposes the
user's process (milestone progress, full conversation) plus the capability
text, so the model's suggestions stay grounded in what the robot can do.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

from .catalog import builtin_catalog, render_manifest_text
from .gateway import ChatTurn, Gateway, PromptBundle, complete, complete_structured
from . import prompts

MILESTONE_KINDS = ("characters", "locations", "time", "actions", "events", "ending", "emotions")

_CATALOG, _MANIFEST = builtin_catalog()


@dataclass
class Milestone:
    kind: str
    complete: bool = False


@dataclass
class Narrative:
    story_text: str = ""
    revisions: list[str] = field(default_factory=list)
    milestones: list[Milestone] = field(
        default_factory=lambda: [Milestone(kind) for kind in MILESTONE_KINDS]
    )
    transcript: list[ChatTurn] = field(default_factory=list)


@dataclass(frozen=True)
class HelpSuggestions:
    milestone_kind: str
    suggestions: tuple[str, ...]


def new_narrative() -> Narrative:
    return Narrative()


def milestone_map(narrative: Narrative) -> dict[str, bool]:
    return {m.kind: m.complete for m in narrative.milestones}


def all_complete(narrative: Narrative) -> bool:
    return all(m.complete for m in narrative.milestones)


def _require_kind(kind: str) -> None:
    if kind not in MILESTONE_KINDS:
        raise ValueError(f"unknown milestone kind {kind!r}")


def chat(narrative: Narrative, user_message: str, gateway: Gateway,
         *, now: float | None = None) -> tuple[str, Narrative]:
    """One conversation turn; the transcript stays unchanged if the call fails."""
    if not user_message:
        raise ValueError("user message must be non-empty")
    timestamp = time.time() if now is None else now
    bundle = PromptBundle(
        system=prompts.chat_system_prompt(_MANIFEST, milestone_map(narrative)),
        history=tuple(narrative.transcript) + (ChatTurn("user", user_message, timestamp),),
    )
    reply = complete(gateway, bundle)
    narrative.transcript.append(ChatTurn("user", user_message, timestamp))
    narrative.transcript.append(ChatTurn("agent", reply, timestamp))
    return reply, narrative


def request_help(narrative: Narrative, milestone_kind: str, gateway: Gateway,
                 *, retry_budget: int = 3) -> HelpSuggestions:
    """Ask for 2-4 candidate suggestions for one milestone.

    Suggestions are advisory; accepting one is a separate user action that
    goes back through chat.
    """
    _require_kind(milestone_kind)
    context = narrative.story_text or _transcript_text(narrative) or "The user has not written anything yet."
    bundle = PromptBundle(
        system=prompts.help_system_prompt(_MANIFEST, milestone_kind),
        history=(ChatTurn("user", f"Story so far:\n{context}\n\nSuggest ideas for the "
                                  f"{milestone_kind} milestone."),),
        response_schema="help_suggestions",
    )
    reply = complete_structured(gateway, bundle, "help_suggestions", retry_budget)
    return HelpSuggestions(milestone_kind, tuple(reply.document["suggestions"]))


def set_milestone(narrative: Narrative, kind: str, complete_flag: bool) -> Narrative:
    """Flip exactly one milestone flag; completion is user-asserted."""
    _require_kind(kind)
    for milestone in narrative.milestones:
        if milestone.kind == kind:
            milestone.complete = complete_flag
    return narrative


def summarize(narrative: Narrative, gateway: Gateway) -> str:
    """Produce the story text from the conversation; prior versions are kept."""
    if not narrative.transcript:
        raise ValueError("cannot summarize an empty conversation")
    bundle = PromptBundle(
        system=prompts.summary_system_prompt(_MANIFEST),
        history=tuple(narrative.transcript)
        + (ChatTurn("user", "Please write out my full story text now."),),
    )
    story = complete(gateway, bundle)
    narrative.revisions.append(story)
    narrative.story_text = story
    return story


def _transcript_text(narrative: Narrative) -> str:
    return "\n".join(f"{turn.author}: {turn.text}" for turn in narrative.transcript)


def capability_text() -> str:
    """The capability text every prompt embeds; also shown in the UI panel."""
    return render_manifest_text(_MANIFEST)


# ---------------------------------------------------------------------------
# Persistence helpers
# ---------------------------------------------------------------------------

def narrative_to_jsonable(narrative: Narrative) -> dict[str, Any]:
    return {
        "story_text": narrative.story_text,
        "revisions": list(narrative.revisions),
        "milestones": [{"kind": m.kind, "complete": m.complete} for m in narrative.milestones],
        "transcript": [
            {"author": t.author, "text": t.text, "timestamp": t.timestamp} for t in narrative.transcript
        ],
    }


def narrative_from_jsonable(doc: dict[str, Any]) -> Narrative:
    return Narrative(
        story_text=doc["story_text"],
        revisions=list(doc["revisions"]),
        milestones=[Milestone(m["kind"], m["complete"]) for m in doc["milestones"]],
        transcript=[ChatTurn(t["author"], t["text"], t["timestamp"]) for t in doc["transcript"]],
    )
