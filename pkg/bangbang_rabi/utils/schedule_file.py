"""Parser for piecewise-constant coupling schedules stored as text.

One segment per line, ``<duration> <g_value>``; blank lines and ``#`` comments are ignored.
"""

import re
from pathlib import Path

from bangbang_rabi.oracle.cumulant import Schedule

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_SEGMENT_LINE = re.compile(rf"^\s*({_NUMBER})\s+({_NUMBER})\s*$")


def parse_schedule(text: str, source: str = "<string>") -> Schedule:
    """Parse schedule text.

    Raises:
        ValueError: On a malformed line (reported with its line number) or an empty schedule.
    """
    segments = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _SEGMENT_LINE.match(line)
        if not match:
            raise ValueError(
                f"{source}:{line_number}: expected '<duration> <g_value>', got {raw.strip()!r}"
            )
        segments.append((float(match.group(1)), float(match.group(2))))

    if not segments:
        raise ValueError(f"{source}: schedule has no segments")
    return Schedule(tuple(segments))


def load_schedule(path: str | Path) -> Schedule:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Schedule file '{path}' does not exist.")
    return parse_schedule(path.read_text(encoding="utf-8"), source=str(path))
