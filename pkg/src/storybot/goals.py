"""Story-to-goals pipeline with capability validation.

Goals come back from the model as a schema-constrained JSON document; every
structured block reference is then resolved against the catalog so a
hallucinated block (a timer, a song library) is flagged instead of silently
shipping to the user. Flagged goals are kept and displayed, never dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .catalog import Catalog, CapabilityManifest, EnumSlot, NumberSlot, TextSlot, build_manifest
from .errors import EmptyNarrative
from .gateway import ChatTurn, Gateway, PromptBundle, complete_structured
from .narrative import Narrative
from . import prompts

VERDICT_UNCHECKED = "unchecked"
VERDICT_VALID = "valid"
VERDICT_FLAGGED = "flagged"


@dataclass(frozen=True)
class BlockRef:
    category: str
    kind_id: str
    param_overrides: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Hint:
    text: str
    block_refs: tuple[BlockRef, ...] = ()
    placement: int | None = None  # insert after this goal index


@dataclass(frozen=True)
class Verdict:
    status: str = VERDICT_UNCHECKED
    unknown_refs: tuple[str, ...] = ()


@dataclass(frozen=True)
class ProgramGoal:
    snippet: str
    goal: str
    hints: tuple[Hint, ...]
    verdict: Verdict = Verdict()


@dataclass(frozen=True)
class GoalSet:
    goals: tuple[ProgramGoal, ...]
    source_revision: int
    generation: int


def generate_goals(narrative: Narrative, gateway: Gateway, catalog: Catalog,
                   *, retry_budget: int = 3, generation: int = 1) -> GoalSet:
    """One-shot goal generation from the current story revision."""
    if not narrative.story_text:
        raise EmptyNarrative("the narrative has no story text yet")
    manifest = build_manifest(catalog)
    bundle = PromptBundle(
        system=prompts.goal_system_prompt(manifest, catalog),
        history=(ChatTurn("user", narrative.story_text),),
        one_shot_example=prompts.goal_one_shot_example(),
        response_schema="goal_set",
    )
    reply = complete_structured(gateway, bundle, "goal_set", retry_budget)
    goals = tuple(
        validate_goal(_goal_from_jsonable(doc), catalog, manifest) for doc in reply.document["goals"]
    )
    return GoalSet(goals, source_revision=max(0, len(narrative.revisions) - 1), generation=generation)


def retry_goals(goalset: GoalSet, narrative: Narrative, gateway: Gateway, catalog: Catalog,
                *, retry_budget: int = 3) -> GoalSet:
    """Fresh generation with the retry counter bumped; the caller archives the prior set."""
    if goalset is None:
        raise ValueError("no prior goal set to retry")
    return generate_goals(narrative, gateway, catalog, retry_budget=retry_budget,
                          generation=goalset.generation + 1)


def validate_goal(goal: ProgramGoal, catalog: Catalog, manifest: CapabilityManifest) -> ProgramGoal:
    """Resolve every block reference; unknowns produce a Flagged verdict.

    A hint with no block references is valid by vacuity: purely strategic
    prose has nothing to check.
    """
    unknown: list[str] = []
    for hint in goal.hints:
        for ref in hint.block_refs:
            unknown.extend(_check_ref(ref, catalog))
    deduped = tuple(dict.fromkeys(unknown))
    verdict = Verdict(VERDICT_FLAGGED, deduped) if deduped else Verdict(VERDICT_VALID)
    return ProgramGoal(goal.snippet, goal.goal, goal.hints, verdict)


def _check_ref(ref: BlockRef, catalog: Catalog) -> list[str]:
    kind = catalog.by_id.get(ref.kind_id)
    if kind is None:
        return [ref.kind_id]
    bad: list[str] = []
    if ref.category != kind.category:
        bad.append(f"{ref.kind_id}.category={ref.category}")
    for name, value in ref.param_overrides.items():
        if name not in kind.param_names:
            bad.append(f"{ref.kind_id}.{name}")
        elif not _value_fits(kind.param(name).slot, value):
            bad.append(f"{ref.kind_id}.{name}={value}")
    return bad


def _value_fits(slot: Any, value: Any) -> bool:
    if isinstance(slot, NumberSlot):
        return isinstance(value, (int, float)) and not isinstance(value, bool) and slot.min <= value <= slot.max
    if isinstance(slot, TextSlot):
        return isinstance(value, str) and len(value) <= slot.max_len
    if isinstance(slot, EnumSlot):
        return isinstance(value, str) and value in slot.options
    return False


# ---------------------------------------------------------------------------
# Wire helpers
# ---------------------------------------------------------------------------

def _goal_from_jsonable(doc: dict[str, Any]) -> ProgramGoal:
    hints = []
    for hint_doc in doc["hints"]:
        refs = tuple(
            BlockRef(r["category"], r["kind_id"], dict(r.get("param_overrides") or {}))
            for r in hint_doc["block_refs"]
        )
        placement_doc = hint_doc.get("placement")
        placement = placement_doc["after_goal_index"] if placement_doc else None
        hints.append(Hint(hint_doc["text"], refs, placement))
    return ProgramGoal(doc["snippet"], doc["goal"], tuple(hints))


def hint_to_jsonable(hint: Hint) -> dict[str, Any]:
    return {
        "text": hint.text,
        "block_refs": [
            {"category": r.category, "kind_id": r.kind_id, "param_overrides": dict(r.param_overrides)}
            for r in hint.block_refs
        ],
        "placement": None if hint.placement is None else {"after_goal_index": hint.placement},
    }


def goalset_to_jsonable(goalset: GoalSet) -> dict[str, Any]:
    return {
        "goals": [
            {
                "snippet": g.snippet,
                "goal": g.goal,
                "hints": [hint_to_jsonable(h) for h in g.hints],
                "verdict": {"status": g.verdict.status, "unknown_refs": list(g.verdict.unknown_refs)},
            }
            for g in goalset.goals
        ],
        "source_revision": goalset.source_revision,
        "generation": goalset.generation,
    }


def goalset_from_jsonable(doc: dict[str, Any]) -> GoalSet:
    goals = []
    for g in doc["goals"]:
        base = _goal_from_jsonable(g)
        verdict_doc = g.get("verdict", {"status": VERDICT_UNCHECKED})
        verdict = Verdict(verdict_doc["status"], tuple(verdict_doc.get("unknown_refs", ())))
        goals.append(ProgramGoal(base.snippet, base.goal, base.hints, verdict))
    return GoalSet(tuple(goals), doc["source_revision"], doc["generation"])
