#!/usr/bin/env python3
"""
Tests for command reports and their machine trailers
"""

import pytest

from core.errors import FormatError
from core.report import Report, diff_trailers, machine_value, parse_machine_trailer


def _sample():
    report = Report("cohomology")
    report.say("H^1(torus7; Z) = Z^2")
    report.record("group", "Z^2").record("free_rank", 2).record("connected", True)
    report.record("certificate", None).record("orders", [1, 2])
    return report


def test_render_layout():
    text = _sample().render()
    lines = text.splitlines()
    assert lines[0] == "report v1"
    assert lines[1] == "command: cohomology"
    assert lines[3] == "H^1(torus7; Z) = Z^2"
    assert "machine:" in lines
    assert "  connected: true" in lines
    assert "  certificate: none" in lines
    assert "  orders: [1, 2]" in lines


def test_machine_only_drops_the_prose():
    text = _sample().render(machine_only=True)
    assert "H^1" not in text
    assert parse_machine_trailer(text) == parse_machine_trailer(_sample().render())


def test_trailer_keeps_recording_order():
    trailer = parse_machine_trailer(_sample().render())
    assert list(trailer) == ["group", "free_rank", "connected", "certificate", "orders"]
    assert trailer["free_rank"] == "2"


@pytest.mark.parametrize("value,rendered", [
    (False, "false"),
    (None, "none"),
    ((3, True), "[3, true]"),
    ("Z/2", "Z/2"),
])
def test_machine_values(value, rendered):
    assert machine_value(value) == rendered


def test_record_rejects_bad_keys_and_values():
    report = Report("x").record("a", 1)
    with pytest.raises(ValueError):
        report.record("a", 2)
    with pytest.raises(ValueError):
        report.record("b: c", 1)
    with pytest.raises(ValueError):
        report.record("", 1)
    with pytest.raises(ValueError):
        report.record("d", "two\nlines")


def test_parse_trailer_errors():
    with pytest.raises(FormatError):
        parse_machine_trailer("report v1\ncommand: x\n")
    with pytest.raises(FormatError) as info:
        parse_machine_trailer("report v1\ncommand: x\n\nmachine:\n  a: 1\nb: 2\n")
    assert info.value.line == 6
    with pytest.raises(FormatError):
        parse_machine_trailer("machine:\n  a: 1\n  a: 2\n")


def test_diff_trailers():
    expected = {"a": "1", "b": "2", "c": "3"}
    actual = {"a": "1", "b": "5", "d": "4"}
    assert diff_trailers(expected, actual) == [
        "b: expected 2, got 5",
        "missing c (expected 3)",
        "unexpected d: 4",
    ]
    assert diff_trailers(expected, dict(expected)) == []
