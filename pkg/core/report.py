"""
Command reports: a prose section for people and a `machine:` trailer of
`key: value` lines for scripts and golden files.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .config import get_config
from .errors import FormatError

logger = logging.getLogger(__name__)

MACHINE_MARKER = "machine:"


def machine_value(value) -> str:
    """Render a trailer value; booleans are lower case, None is `none`."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(machine_value(v) for v in value) + "]"
    return str(value)


@dataclass
class Report:
    command: str
    lines: List[str] = field(default_factory=list)
    machine: Dict[str, str] = field(default_factory=dict)
    format_version: Optional[str] = None

    def __post_init__(self):
        if self.format_version is None:
            self.format_version = get_config().get("reports.format_version", "report v1")

    def say(self, text: str) -> "Report":
        self.lines.append(text)
        return self

    def record(self, key: str, value) -> "Report":
        if key in self.machine:
            raise ValueError(f"machine key '{key}' recorded twice")
        if not key or ':' in key or '\n' in key:
            raise ValueError(f"bad machine key {key!r}")
        rendered = machine_value(value)
        if '\n' in rendered:
            raise ValueError(f"machine value for '{key}' spans lines")
        self.machine[key] = rendered
        return self

    def render(self, machine_only: bool = False) -> str:
        out = [self.format_version, f"command: {self.command}"]
        if not machine_only and self.lines:
            out.append("")
            out.extend(self.lines)
        out.append("")
        out.append(MACHINE_MARKER)
        out.extend(f"  {key}: {value}" for key, value in self.machine.items())
        return "\n".join(out) + "\n"


def parse_machine_trailer(text: str, source: str = "<report>") -> Dict[str, str]:
    """Read back the `machine:` trailer of a rendered report."""
    lines = text.splitlines()
    try:
        start = lines.index(MACHINE_MARKER)
    except ValueError:
        raise FormatError("report has no machine trailer", None, source) from None
    trailer: Dict[str, str] = {}
    for number, line in enumerate(lines[start + 1:], start + 2):
        if not line.strip():
            continue
        if not line.startswith("  ") or ": " not in line:
            raise FormatError(f"bad trailer line '{line}'", number, source)
        key, value = line[2:].split(": ", 1)
        if key in trailer:
            raise FormatError(f"duplicate trailer key '{key}'", number, source)
        trailer[key] = value
    return trailer


def diff_trailers(expected: Dict[str, str], actual: Dict[str, str]) -> List[str]:
    """Human-readable differences between two trailers, sorted by key."""
    diffs = []
    for key in sorted(set(expected) | set(actual)):
        if key not in actual:
            diffs.append(f"missing {key} (expected {expected[key]})")
        elif key not in expected:
            diffs.append(f"unexpected {key}: {actual[key]}")
        elif expected[key] != actual[key]:
            diffs.append(f"{key}: expected {expected[key]}, got {actual[key]}")
    return diffs
