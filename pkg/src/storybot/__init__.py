"""Story-driven block programming studio for social robots.

Users co-write a story with a language model, turn it into programmable
goals with capability-checked hints, assemble a block program, watch it in
a deterministic simulator, and deploy it to a robot over REST. The scripted
mock gateway and mock robot make the whole pipeline reproducible offline.
"""

from .catalog import builtin_catalog, render_manifest_text
from .program import decode, encode, lower, start_program, validate
from .simulator import initial_state, run

__all__ = [
    "builtin_catalog",
    "render_manifest_text",
    "decode",
    "encode",
    "lower",
    "start_program",
    "validate",
    "initial_state",
    "run",
]

__version__ = "0.1.0"
