"""The narrative and goal phases, end to end on the scripted mock gateway.

Shows the milestone-aware chat prompt, story summarization, goal generation
from the story, and the capability guardrail flagging a hallucinated block.

Run:  python demos/04_story_to_goals.py
"""

import json

from storybot.catalog import builtin_catalog
from storybot.gateway import ScriptedMockGateway
from storybot.goals import generate_goals, retry_goals
from storybot.narrative import chat, new_narrative, request_help, set_milestone, summarize

catalog, _ = builtin_catalog()

story = ("Misty the robot sits on Sam's desk. Each evening she greets Sam with a wave, "
         "asks how the homework is going, and reminds Sam every hour to stretch.")

goals_reply = {
    "goals": [
        {"snippet": "greets Sam with a wave", "goal": "Have the robot greet Sam",
         "hints": [{"text": "Use speak plus a right-arm move_arm block.",
                    "block_refs": [{"category": "Speech", "kind_id": "speak"},
                                   {"category": "Movement", "kind_id": "move_arm",
                                    "param_overrides": {"side": "right"}}],
                    "placement": None}]},
        {"snippet": "reminds Sam every hour", "goal": "Remind Sam hourly",
         "hints": [{"text": "Use the hourly_alarm block from Control.",
                    "block_refs": [{"category": "Control", "kind_id": "hourly_alarm"}],
                    "placement": None}]},
    ]
}

gateway = ScriptedMockGateway([
    "Fun! Where does the story take place, and how does Misty feel about homework?",
    json.dumps({"suggestions": ["Sam's cluttered dorm desk", "A quiet library corner"]}),
    story,
    json.dumps(goals_reply),
    json.dumps(goals_reply),
])

narrative = new_narrative()
reply, _ = chat(narrative, "Misty should be a study buddy for Sam", gateway)
print("agent:", reply)

set_milestone(narrative, "characters", True)
set_milestone(narrative, "actions", True)
print("milestones:", {m.kind: m.complete for m in narrative.milestones})

suggestions = request_help(narrative, "locations", gateway)
print("help suggestions:", list(suggestions.suggestions))

summarize(narrative, gateway)
print()
print("story text:", narrative.story_text)

goalset = generate_goals(narrative, gateway, catalog)
print()
print("=== Generated goals (generation", goalset.generation, ") ===")
for index, goal in enumerate(goalset.goals):
    print(f"[{index}] {goal.goal}  <- \"{goal.snippet}\"")
    print(f"    verdict: {goal.verdict.status}", goal.verdict.unknown_refs or "")
    for hint in goal.hints:
        print(f"    hint: {hint.text}")

print()
print("The second goal names a block the robot does not have; it is flagged")
print("but kept, so the user can decide to revise or regenerate.")

regenerated = retry_goals(goalset, narrative, gateway, catalog)
print("after retry: generation", regenerated.generation)
