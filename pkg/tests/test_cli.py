#!/usr/bin/env python3
"""
Tests for the command-line surface and the bundled corpus
"""

import json
import os
import random
import shutil

import pytest

from core.commands import parsing
from core.config import get_config
from core.errors import ToolkitError
from core.formats import (parse_cover, parse_fpgroup, parse_gtower, parse_intmatrix,
                          parse_scomplex, parse_smap, parse_tcochain, parse_tower)
from core.report import parse_machine_trailer
from main import main, run


def _trailer(argv):
    code, text = run(["--machine-only"] + argv)
    assert code == 0, argv
    return parse_machine_trailer(text)


def test_cohomology_of_the_torus():
    trailer = _trailer(["cohomology", "--complex", "torus7", "--degree", "1"])
    assert trailer["group"] == "Z^2"
    assert trailer["f_vector"] == "[7, 21, 14]"


def test_machine_only_hides_prose():
    code, full = run(["hom", "--a", "Z/4", "--b", "Z/6"])
    assert code == 0
    assert "Hom(Z/4, Z/6) = Z/2" in full
    _, short = run(["--machine-only", "hom", "--a", "Z/4", "--b", "Z/6"])
    assert "Hom(" not in short
    assert parse_machine_trailer(short) == parse_machine_trailer(full)


def test_main_writes_the_report(capsys):
    assert main(["--machine-only", "hom", "--a", "Z/4", "--b", "Z/6"]) == 0
    assert "  hom: Z/2" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    [],
    ["cohomology"],
    ["frobnicate"],
    ["cohomology", "--complex", "torus7", "--degree", "one"],
    ["ext", "--a", "Z/0", "--b", "Z"],
    ["cohomology", "--complex", "klein", "--degree", "1"],
    ["moore", "--group", "Z", "--n", "0"],
])
def test_invalid_input_exits_2(argv):
    code, text = run(argv)
    assert code == 2
    assert text == ""


def test_budget_exhaustion_exits_3():
    assert run(["--budget", "1", "orbits", "--group", "Z/4"])[0] == 3


def test_budget_flag_reaches_classification():
    trailer = _trailer(["--budget", "10", "classify", "--complex", "torus7", "--n", "2"])
    assert trailer["exhaustive"] == "false"
    assert trailer["group"] == "Z"


def test_config_file_sets_the_budget(tmp_path):
    path = tmp_path / "cechtool.json"
    path.write_text(json.dumps({"budgets": {"enumeration": 10}}))
    trailer = _trailer(["--config", str(path), "classify", "--complex", "torus7", "--n", "2"])
    assert trailer["exhaustive"] == "false"


def test_bad_config_file_exits_2(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{")
    assert run(["--config", str(path), "hom", "--a", "Z", "--b", "Z"])[0] == 2
    assert run(["--config", str(tmp_path / "absent.json"), "hom", "--a", "Z", "--b", "Z"])[0] == 2


def test_phantom_telescope_does_not_vanish():
    trailer = _trailer(["phantom-telescope", "--p", "2", "--d", "1", "--N", "1", "--cap", "5"])
    assert trailer["lim1_vanishes"] == "false"


def test_example711_reports_a_nonvanishing_lim1():
    code, text = run(["--machine-only", "example711", "--p", "2", "--d", "2", "--N", "5"])
    assert code == 0
    assert text.splitlines()[1] == "command: example711"
    trailer = parse_machine_trailer(text)
    assert trailer["lim1_vanishes"] == "false"
    alias = _trailer(["phantom-telescope", "--p", "2", "--d", "2", "--N", "5"])
    assert alias == trailer


@pytest.mark.parametrize("argv", [
    ["telescope", "--p", "2", "--d", "40", "--N", "2"],
    ["example711", "--p", "2", "--d", "1", "--N", "500"],
    ["moore", "--group", "Z", "--n", "1000000000"],
    ["--budget", "-1", "hom", "--a", "Z", "--b", "Z"],
    ["--subdivision-budget", "-2", "hom", "--a", "Z", "--b", "Z"],
])
def test_oversized_arguments_exit_2(argv):
    assert run(argv) == (2, "")


def test_oversized_files(tmp_path):
    wide = tmp_path / "wide.scx"
    wide.write_text("scomplex v1\n" + " ".join(str(v) for v in range(40)) + "\n")
    assert run(["cohomology", "--complex", str(wide), "--degree", "1"]) == (2, "")
    crowded = tmp_path / "crowded.cov"
    crowded.write_text("cover v1\nground: 41\n"
                       + "".join(f"U{i}: 0 {i + 1}\n" for i in range(40)))
    assert run(["nerve", "--cover", str(crowded)]) == (3, "")


def _depth_one_map(tmp_path):
    # sd(circle) numbers the edge midpoints 3, 4, 5 after the vertices
    path = tmp_path / "wrap.smap"
    path.write_text("smap v1\nsphere: 1\ndepth: 1\nbegin source\n0 1\n0 2\n1 2\nend\n"
                    "0 -> 0\n3 -> 1\n1 -> 2\n5 -> 0\n2 -> 1\n4 -> 2\n")
    return str(path)


def test_subdivision_budget_flag_reaches_map_commands(tmp_path, monkeypatch):
    path = _depth_one_map(tmp_path)
    assert _trailer(["chi", "--map", path])["degree"] in ("2", "-2")
    assert run(["--subdivision-budget", "0", "chi", "--map", path]) == (3, "")
    assert run(["--subdivision-budget", "0", "obstruct", "--map", path,
                "--complex", "simplex:2"]) == (3, "")
    monkeypatch.setenv("CECHTOOL_SUBDIVISION_BUDGET", "0")
    assert run(["chi", "--map", path])[0] == 3
    assert run(["--subdivision-budget", "1", "chi", "--map", path])[0] == 0


def test_global_flags_are_pinned_for_one_command(monkeypatch):
    monkeypatch.setenv("CECHTOOL_BUDGET", "1")
    assert run(["orbits", "--group", "Z/4"])[0] == 3
    assert run(["--budget", "100", "orbits", "--group", "Z/4"])[0] == 0
    assert run(["orbits", "--group", "Z/4"])[0] == 3
    assert get_config().enumeration_budget() == 1
    assert get_config().get("random.seed") == 20240601


_SAMPLES = {
    "scomplex": ("disk_rel_boundary.scx", parse_scomplex, ["cohomology", "--degree", "1",
                                                         "--complex"]),
    "intmatrix": ("snf_2x2.mat", parse_intmatrix, ["snf", "--matrix"]),
    "fpgroup": (None, parse_fpgroup, None),
    "smap": ("circle_identity.smap", parse_smap, ["chi", "--map"]),
    "cover": ("circle3.cov", parse_cover, ["nerve", "--cover"]),
    "tower": ("circle_3_6.tow", parse_tower, ["cech", "--degree", "1", "--tower"]),
    "gtower": ("z_times2.gtw", parse_gtower, ["lim1", "--cap", "8", "--gtower"]),
    "tcochain": ("bump_cochain.tco", parse_tcochain, None),
}
_TOKENS = ["0", "1", "2", "-1", "7", "x", "", ":", "->", "end", "begin", "begin level 0",
           "U0:", "X0:", "Z/0", "Z/2", "99999999999", "depth: 3", "sphere: 2",
           " ".join(str(v) for v in range(40))]


def _mutate(rng, text):
    lines = text.splitlines()
    for _ in range(rng.randint(1, 3)):
        position = rng.randrange(len(lines) + 1)
        action = rng.randrange(5)
        if action == 0 and lines:
            del lines[min(position, len(lines) - 1)]
        elif action == 1 and lines:
            lines.insert(position, lines[rng.randrange(len(lines))])
        elif action == 2 and lines:
            index = min(position, len(lines) - 1)
            words = lines[index].split()
            if words:
                words[rng.randrange(len(words))] = rng.choice(_TOKENS)
            lines[index] = " ".join(words)
        elif action == 3:
            lines.insert(position, rng.choice(_TOKENS))
        else:
            lines = "\n".join(lines)[:rng.randrange(len(text) + 1)].splitlines()
    return "\n".join(lines) + "\n"


def test_malformed_files_never_crash(tmp_path, corpus_dir):
    rng = random.Random(get_config().seed())
    samples = {}
    for kind, (name, _, _) in _SAMPLES.items():
        if name is None:
            samples[kind] = "fpgroup v1\ngenerators: 2\n2 0\n0 3\n"
        else:
            with open(os.path.join(corpus_dir, "inputs", name)) as f:
                samples[kind] = f.read()
    kinds = sorted(_SAMPLES)
    for index in range(10_000):
        kind = kinds[index % len(kinds)]
        _, parser, command = _SAMPLES[kind]
        text = _mutate(rng, samples[kind])
        try:
            with parsing(kind):
                parser(text)
        except ToolkitError as e:
            assert e.exit_code in (2, 3), text
        if command is not None and index % 200 < len(kinds):
            path = tmp_path / f"mutant{index}.{kind}"
            path.write_text(text)
            assert run(command + [str(path)])[0] in (0, 2, 3), text
    binary = tmp_path / "binary.txt"
    binary.write_bytes(b"\xff\xfe\x00scomplex")
    assert run(["snf", "--matrix", str(binary)])[0] == 2


def test_bundled_corpus_is_green():
    code, text = run(["corpus"])
    trailer = parse_machine_trailer(text)
    assert trailer["green"] == "true", text
    assert trailer["examples"] == "30"
    assert code == 0


def _small_corpus(directory, golden):
    (directory / "golden").mkdir()
    manifest = {"examples": [{"name": "hom_z4_z6", "args": ["hom", "--a", "Z/4", "--b", "Z/6"]}]}
    (directory / "corpus.json").write_text(json.dumps(manifest))
    if golden is not None:
        (directory / "golden" / "hom_z4_z6.txt").write_text(golden)


def test_corrupted_golden_fails_the_corpus(tmp_path):
    _small_corpus(tmp_path, "report v1\ncommand: hom\n\nmachine:\n  hom: Z/4\n")
    code, text = run(["corpus", "--directory", str(tmp_path)])
    assert code == 2
    trailer = parse_machine_trailer(text)
    assert trailer["green"] == "false"
    assert trailer["failed"] == "[hom_z4_z6]"
    assert "hom: expected Z/4, got Z/2" in text


def test_missing_golden_then_update(tmp_path):
    _small_corpus(tmp_path, None)
    assert run(["corpus", "--directory", str(tmp_path)])[0] == 2
    assert run(["corpus", "--directory", str(tmp_path), "--update-golden"])[0] == 0
    assert run(["corpus", "--directory", str(tmp_path)])[0] == 0


def test_copied_corpus_detects_a_changed_golden(tmp_path, corpus_dir):
    copy = tmp_path / "corpus"
    shutil.copytree(corpus_dir, copy)
    golden = copy / "golden" / "torus_h1.txt"
    golden.write_text(golden.read_text().replace("Z^2", "Z^3"))
    code, text = run(["corpus", "--directory", str(copy)])
    assert code == 2
    assert parse_machine_trailer(text)["failed"] == "[torus_h1]"


def test_empty_or_missing_corpus_exits_2(tmp_path):
    assert run(["corpus", "--directory", str(tmp_path)])[0] == 2
    assert run(["corpus", "--directory", str(tmp_path / "nowhere")])[0] == 2
    (tmp_path / "corpus.json").write_text(json.dumps({"examples": []}))
    assert run(["corpus", "--directory", str(tmp_path)])[0] == 2
    assert os.path.exists(tmp_path / "corpus.json")
