import json

import pytest

from storybot.errors import EmptyNarrative, SchemaError
from storybot.gateway import ScriptedMockGateway
from storybot.goals import (
    BlockRef,
    Hint,
    ProgramGoal,
    Verdict,
    generate_goals,
    goalset_from_jsonable,
    goalset_to_jsonable,
    retry_goals,
    validate_goal,
)
from storybot.narrative import Narrative

STUDY_BUDDY_GOALS = json.dumps({
    "goals": [
        {
            "snippet": "the robot greets Sam warmly",
            "goal": "Have Misty greet the user",
            "hints": [
                {"text": "Use a speak block from the Speech drawer.",
                 "block_refs": [{"category": "Speech", "kind_id": "speak"}], "placement": None},
            ],
        },
        {
            "snippet": "asks how studying is going",
            "goal": "Have Misty ask about the study session",
            "hints": [
                {"text": "Add another speak block and set a curious face.",
                 "block_refs": [
                     {"category": "Speech", "kind_id": "speak"},
                     {"category": "Face", "kind_id": "set_face",
                      "param_overrides": {"expression": "happy"}},
                 ],
                 "placement": {"after_goal_index": 0}},
            ],
        },
    ]
})


def study_narrative():
    story = ("In a cozy dorm room, the robot greets Sam warmly, asks how studying "
             "is going, and cheers them on with a happy face.")
    return Narrative(story_text=story, revisions=[story])


class TestGenerate:
    def test_study_buddy_fixture_goals(self, catalog):
        gateway = ScriptedMockGateway([STUDY_BUDDY_GOALS])
        goalset = generate_goals(study_narrative(), gateway, catalog)
        assert [g.goal for g in goalset.goals] == [
            "Have Misty greet the user",
            "Have Misty ask about the study session",
        ]
        assert all(g.verdict.status == "valid" for g in goalset.goals)
        assert goalset.generation == 1
        assert goalset.source_revision == 0

    def test_empty_narrative_rejected(self, catalog):
        with pytest.raises(EmptyNarrative):
            generate_goals(Narrative(), ScriptedMockGateway(["unused"]), catalog)

    def test_zero_hint_goal_is_schema_error(self, catalog):
        reply = json.dumps({"goals": [{"snippet": "s", "goal": "g", "hints": []}]})
        gateway = ScriptedMockGateway([reply] * 4)
        with pytest.raises(SchemaError):
            generate_goals(study_narrative(), gateway, catalog)

    def test_retries_through_garbage(self, catalog):
        gateway = ScriptedMockGateway(["not json", "still not json", STUDY_BUDDY_GOALS])
        goalset = generate_goals(study_narrative(), gateway, catalog, retry_budget=3)
        assert goalset.generation == 1
        assert len(goalset.goals) == 2

    def test_prompt_contains_capability_text_example_and_story(self, catalog, manifest):
        from storybot.catalog import render_manifest_text
        gateway = ScriptedMockGateway([STUDY_BUDDY_GOALS])
        narrative = study_narrative()
        generate_goals(narrative, gateway, catalog)
        prompt = gateway.prompts[0]
        assert render_manifest_text(manifest) in prompt
        assert narrative.story_text in prompt
        assert "Rosie" in prompt  # the shipped one-shot example pair
        assert "program drawer" in prompt

    def test_goal_order_preserved(self, catalog):
        gateway = ScriptedMockGateway([STUDY_BUDDY_GOALS])
        goalset = generate_goals(study_narrative(), gateway, catalog)
        assert goalset.goals[0].snippet == "the robot greets Sam warmly"
        assert goalset.goals[1].hints[0].placement == 0


class TestValidateGoal:
    def _goal(self, *refs: BlockRef) -> ProgramGoal:
        return ProgramGoal("snippet", "goal", (Hint("hint text", tuple(refs)),))

    def test_known_kind_is_valid(self, catalog, manifest):
        goal = validate_goal(self._goal(BlockRef("Speech", "speak")), catalog, manifest)
        assert goal.verdict == Verdict("valid")

    def test_unknown_kind_flagged(self, catalog, manifest):
        goal = validate_goal(self._goal(BlockRef("Control", "hourly_alarm")), catalog, manifest)
        assert goal.verdict.status == "flagged"
        assert goal.verdict.unknown_refs == ("hourly_alarm",)

    def test_unknown_expression_flagged(self, catalog, manifest):
        ref = BlockRef("Face", "set_face", {"expression": "confused"})
        goal = validate_goal(self._goal(ref), catalog, manifest)
        assert goal.verdict.unknown_refs == ("set_face.expression=confused",)

    def test_out_of_range_override_flagged(self, catalog, manifest):
        ref = BlockRef("Light", "set_led", {"red": 999})
        goal = validate_goal(self._goal(ref), catalog, manifest)
        assert goal.verdict.unknown_refs == ("set_led.red=999",)

    def test_unknown_param_flagged(self, catalog, manifest):
        ref = BlockRef("Speech", "speak", {"volume": 10})
        goal = validate_goal(self._goal(ref), catalog, manifest)
        assert goal.verdict.unknown_refs == ("speak.volume",)

    def test_wrong_category_flagged(self, catalog, manifest):
        goal = validate_goal(self._goal(BlockRef("Movement", "speak")), catalog, manifest)
        assert goal.verdict.unknown_refs == ("speak.category=Movement",)

    def test_prose_only_hint_valid_by_vacuity(self, catalog, manifest):
        goal = validate_goal(ProgramGoal("s", "g", (Hint("think about pacing"),)), catalog, manifest)
        assert goal.verdict == Verdict("valid")

    def test_flagged_goals_retained_not_dropped(self, catalog):
        reply = json.dumps({"goals": [
            {"snippet": "s", "goal": "Set an hourly alarm",
             "hints": [{"text": "Use the timer block",
                        "block_refs": [{"category": "Control", "kind_id": "set_timer"}],
                        "placement": None}]},
        ]})
        goalset = generate_goals(study_narrative(), ScriptedMockGateway([reply]), catalog)
        assert len(goalset.goals) == 1
        assert goalset.goals[0].verdict.status == "flagged"

    def test_flag_set_matches_brute_force_scan(self, catalog, manifest):
        refs = (
            BlockRef("Speech", "speak"),
            BlockRef("Control", "hourly_alarm"),
            BlockRef("Face", "set_face", {"expression": "confused", "speed": 2}),
            BlockRef("Light", "set_led", {"red": 300, "green": 10}),
        )
        goal = validate_goal(self._goal(*refs), catalog, manifest)

        expected = []
        for ref in refs:
            kind = catalog.by_id.get(ref.kind_id)
            if kind is None:
                expected.append(ref.kind_id)
                continue
            if ref.category != kind.category:
                expected.append(f"{ref.kind_id}.category={ref.category}")
            for name, value in ref.param_overrides.items():
                if name not in kind.param_names:
                    expected.append(f"{ref.kind_id}.{name}")
                    continue
                slot = kind.param(name).slot
                ok = (
                    slot.type == "number" and isinstance(value, (int, float)) and slot.min <= value <= slot.max
                ) or (
                    slot.type == "text" and isinstance(value, str) and len(value) <= slot.max_len
                ) or (
                    slot.type == "enum" and value in slot.options
                )
                if not ok:
                    expected.append(f"{ref.kind_id}.{name}={value}")
        assert list(goal.verdict.unknown_refs) == list(dict.fromkeys(expected))


class TestRetry:
    def test_retry_bumps_generation(self, catalog):
        gateway = ScriptedMockGateway([STUDY_BUDDY_GOALS, STUDY_BUDDY_GOALS])
        narrative = study_narrative()
        first = generate_goals(narrative, gateway, catalog)
        second = retry_goals(first, narrative, gateway, catalog)
        assert (first.generation, second.generation) == (1, 2)
        assert [g.goal for g in second.goals] == [g.goal for g in first.goals]

    def test_retry_tracks_new_revision(self, catalog):
        gateway = ScriptedMockGateway([STUDY_BUDDY_GOALS, STUDY_BUDDY_GOALS])
        narrative = study_narrative()
        first = generate_goals(narrative, gateway, catalog)
        narrative.revisions.append("an edited story")
        narrative.story_text = "an edited story"
        second = retry_goals(first, narrative, gateway, catalog)
        assert first.source_revision == 0
        assert second.source_revision == 1


def test_goalset_json_round_trip(catalog):
    gateway = ScriptedMockGateway([STUDY_BUDDY_GOALS])
    goalset = generate_goals(study_narrative(), gateway, catalog)
    doc = goalset_to_jsonable(goalset)
    assert goalset_from_jsonable(json.loads(json.dumps(doc))) == goalset
