"""From block tree to timed actions to simulated robot states.

Run:  python demos/03_lowering_and_simulation.py
"""

from storybot.catalog import builtin_catalog
from storybot.program import Block, lower, start_program
from storybot.simulator import run

catalog, _ = builtin_catalog()

program = start_program([
    Block("set_led", {"red": 255, "green": 80, "blue": 0}),
    Block("speak", {"text": "Watch me stretch before we begin"}),
    Block("move_head", {"pitch": 20, "roll": 0, "yaw": -30, "duration": 1.5}),
    Block("move_arm", {"side": "right", "position": -20, "duration": 1.0}),
    Block("repeat", {"count": 3}, {"body": [Block("wait", {"seconds": 2})]}),
    Block("play_audio", {"clip": "fanfare"}),
], seed=7)

timeline = lower(program, catalog, speech_rate_wps=2.5)
print("=== Lowered timeline ===")
for start, action in timeline.actions:
    print(f"t={start:6.2f}s  {action}")
print(f"total duration: {timeline.total_duration:.2f}s")

trace = run(timeline)
print()
print(f"=== Simulation: {len(trace.frames)} frames at action boundaries and 0.1s ticks ===")
for frame in trace.frames[:: max(1, len(trace.frames) // 12)]:
    speech = f' saying "{frame.speaking}"' if frame.speaking else ""
    audio = f" playing {frame.audio}" if frame.audio else ""
    print(f"t={frame.clock:6.2f}s head=({frame.head.pitch:6.1f},{frame.head.roll:5.1f},"
          f"{frame.head.yaw:6.1f}) armR={frame.arms.right:5.1f} "
          f"led=({frame.led.r},{frame.led.g},{frame.led.b}) face={frame.face}{speech}{audio}")
print(f"final clock {trace.final.clock:.2f}s equals timeline total: "
      f"{trace.final.clock == timeline.total_duration}")
