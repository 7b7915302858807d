"""Connecting to a robot by IP and streaming a timeline as REST commands.

Uses the bundled mock robot, which records every call; a fault script shows
how a failing command aborts the rest of the deployment.

Run:  python demos/05_robot_deployment.py
"""

from storybot.catalog import builtin_catalog
from storybot.program import Block, lower, start_program
from storybot.robot import VirtualClock, connect, deploy, mock_robot_serve

catalog, _ = builtin_catalog()

program = start_program([
    Block("set_led", {"red": 0, "green": 0, "blue": 255}),
    Block("speak", {"text": "Deploying to hardware now"}),
    Block("wait", {"seconds": 1}),
    Block("set_face", {"expression": "surprise"}),
    Block("play_audio", {"clip": "beep_high"}),
])
timeline = lower(program, catalog)

with mock_robot_serve() as robot:
    connection = connect(robot.ip, robot.port)
    print(f"connection: {connection.state} to {connection.robot_name!r} at {connection.ip}:{connection.port}")

    report = deploy(connection, timeline, clock=VirtualClock())
    print()
    print("=== Deployment (waits pace the stream but send nothing) ===")
    for command in report.commands_sent:
        print(f"{command.http_status}  POST {command.endpoint}  {command.payload}")
    print("outcome:", report.outcome.status)
    print("robot saw:", [call["path"] for call in robot.calls])

    print()
    print("=== Same timeline with the second command scripted to fail ===")
    robot.reset()
    robot.set_faults({1: 500})
    report = deploy(connection, timeline, clock=VirtualClock())
    print("outcome:", report.outcome)
    print(f"commands attempted: {len(report.commands_sent)} of "
          f"{sum(1 for _, a in timeline.actions if type(a).__name__ != 'Wait')}")
