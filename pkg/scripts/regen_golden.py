#!/usr/bin/env python3
"""Regenerate the frozen golden traces for the bundled scenarios.

Run this only after deliberately changing engine behavior, then re-inspect
the warning transitions by hand before committing the new files.
"""

import sys
from pathlib import Path

from walksafe import bundled_scenario
from walksafe.harness import compress, load_scenario, run, warning_sequence, write_trace

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def main() -> int:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name in ("scenario1", "scenario2"):
        script = load_scenario(bundled_scenario(name))
        trace = run(script)
        out = GOLDEN / f"{name}.trace.ndjson"
        write_trace(trace, out)
        for track in script.tracks:
            seq = compress(warning_sequence(trace, track.id))
            print(f"{name}: {track.id}: {' -> '.join(seq)}")
        print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
