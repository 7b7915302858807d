"""Building block programs, catching rule violations, and the wire format.

Run:  python demos/02_program_validation.py
"""

from storybot.catalog import builtin_catalog
from storybot.program import Block, decode, encode, start_program, validate

catalog, _ = builtin_catalog()

good = start_program([
    Block("set_face", {"expression": "happy"}),
    Block("speak", {"text": "Hello Sam, ready to study?"}),
    Block("repeat", {"count": 2}, {"body": [
        Block("wait", {"seconds": Block("random_int", {"min": 1, "max": 3})}),
        Block("set_led", {"red": 0, "green": 255, "blue": 0}),
    ]}),
], seed=42)

print("=== A valid program ===")
report = validate(good, catalog)
print("violations:", report.violations or "none")

print()
print("=== Canonical wire bytes (sorted keys, stable across equal programs) ===")
wire = encode(good)
print(wire.decode()[:120], "...")
print("round-trips exactly:", decode(wire) == good)

print()
print("=== A program breaking several connection rules ===")
bad = start_program([
    Block("set_timer", {}),                                # no such block
    Block("set_face", {"expression": "confused"}),         # not a face option
    Block("wait", {"seconds": 999}),                       # outside 0.1..60
    Block("repeat", {"count": 2.5}, {"body": []}),         # counts must be whole
])
for violation in validate(bad, catalog).violations:
    print(f"{violation.path:22s} {violation.code:14s} {violation.message}")
