"""Real-time pedestrian social-distancing awareness engine.

Clients publish position/speed/heading/health at 1 Hz through a broadcast
relay; the engine keeps safety bubbles and a time-decaying contamination
field, predicts near-future positions with a constant-velocity model, and
classifies every pedestrian into a three-state warning machine.
"""

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def bundled_scenario(name: str) -> Path:
    """Path of a bundled scenario file, e.g. ``bundled_scenario("scenario1")``."""
    ref = resources.files(__package__) / "scenarios" / f"{name}.scenario.json"
    return Path(str(ref))
