#!/usr/bin/env python3
"""
Tests for the versioned text formats
"""

import os

import pytest

from core.errors import FormatError
from core.formats import (FormatReader, ParsedMap, builtin_complex, load_pair, load_tower,
                          parse_cover, parse_fpgroup, parse_gtower, parse_intmatrix,
                          parse_scomplex, parse_smap, parse_tcochain, parse_tower, read_text,
                          serialize_fpgroup, serialize_gtower, serialize_smap,
                          serialize_tcochain, serialize_tower)
from core.simplicial import SimplicialPair, full_simplex, sphere_model


def _read(corpus_dir, name):
    with open(os.path.join(corpus_dir, "inputs", name)) as f:
        return f.read()


def _error_line(parser, text):
    with pytest.raises(FormatError) as info:
        parser(text)
    return info.value.line


def test_fpgroup_relators_are_columns():
    group = parse_fpgroup("fpgroup v1\ngenerators: 2\n2 0\n0 3\n")
    assert str(group) == "Z/6"
    assert str(parse_fpgroup("fpgroup v1\ngenerators: 1\n")) == "Z"
    assert parse_fpgroup(serialize_fpgroup(group)) == group


def test_fpgroup_errors():
    assert _error_line(parse_fpgroup, "fpgroup v1\ngenerators: 2\n1 2 3\n") == 3
    assert _error_line(parse_fpgroup, "fpgroup v1\ngenerators: -1\n") == 2
    with pytest.raises(FormatError):
        parse_fpgroup("fpgroup v1\n1 2\n")


def test_intmatrix_parse_and_errors():
    matrix = parse_intmatrix("intmatrix v1\nshape: 2 2\n2 4\n6 8\n")
    assert matrix.data == ((2, 4), (6, 8))
    assert _error_line(parse_intmatrix, "intmatrix v1\nshape: 2 2\n2 4\n6 eight\n") == 4
    assert _error_line(parse_intmatrix, "intmatrix v1\nshape: 2 2\n2 4\n") == 2


def test_headers_and_layout_errors():
    assert _error_line(parse_intmatrix, "intmatrix v2\nshape: 1 1\n1\n") == 1
    assert _error_line(parse_intmatrix, "# nothing here\n\n") is None
    assert _error_line(parse_intmatrix, "intmatrix v1\nshape: 1 1\nshape: 1 1\n1\n") == 3
    assert _error_line(parse_scomplex, "scomplex v1\n0 1\nbegin subcomplex\n0\n") == 3
    assert _error_line(parse_scomplex, "scomplex v1\n0 1\nend\n") == 3
    assert _error_line(parse_scomplex,
                       "scomplex v1\nbegin subcomplex\nbegin inner\nend\nend\n") == 3
    assert _error_line(parse_scomplex,
                       "scomplex v1\n0 1\nbegin subcomplex\n0\nend\nbegin subcomplex\n1\nend\n") == 6


def test_comments_and_blank_lines_are_ignored():
    doc = read_text("# leading comment\n\nscomplex v1  # trailing\n0 1 2\n", "scomplex")
    assert [line.content for line in doc.body] == ["0 1 2"]
    reader = FormatReader().load_text("a\n# only a comment\n\n")
    assert [line.is_comment for line in reader.lines] == [False, True, False]
    assert [line.is_blank for line in reader.lines] == [False, False, True]


def test_scomplex_with_subcomplex(corpus_dir):
    pair = load_pair(os.path.join(corpus_dir, "inputs", "disk_rel_boundary.scx"))
    assert pair.complex == full_simplex(2)
    assert pair.subcomplex.f_vector() == (3, 3)


def test_scomplex_rejects_bad_simplices():
    assert _error_line(parse_scomplex, "scomplex v1\n0 0 1\n") == 2
    with pytest.raises(FormatError):
        parse_scomplex("scomplex v1\n0 1\nbegin subcomplex\n2\nend\n")


def test_builtin_complexes():
    assert builtin_complex("torus7").f_vector() == (7, 21, 14)
    assert builtin_complex("sphere:2") == sphere_model(2)
    assert builtin_complex("circle:5").f_vector() == (5, 5)
    assert builtin_complex("simplex:3") == full_simplex(3)
    assert builtin_complex("klein") is None
    assert load_pair("hexagon") == SimplicialPair(builtin_complex("hexagon"))
    with pytest.raises(FormatError):
        builtin_complex("sphere:11")


def test_missing_file_is_a_format_error(tmp_path):
    with pytest.raises(FormatError):
        load_pair(str(tmp_path / "absent.scx"))


def test_smap_parse(corpus_dir):
    parsed = parse_smap(_read(corpus_dir, "circle_reflection.smap"))
    assert parsed.sphere == 1
    assert parsed.vertex_map == {0: 1, 1: 0, 2: 2}
    assert parsed.simplicial().target == sphere_model(1)
    again = parse_smap(serialize_smap(parsed))
    assert again.vertex_map == parsed.vertex_map
    assert again.pair == parsed.pair


def test_smap_errors():
    head = "smap v1\nsphere: 1\nbegin source\n0 1\nend\n"
    assert _error_line(parse_smap, head + "0 => 1\n") == 6
    assert _error_line(parse_smap, head + "0 -> 1\n0 -> 2\n") == 7
    with pytest.raises(FormatError):
        parse_smap("smap v1\nsphere: 11\nbegin source\n0 1\nend\n")
    pair = SimplicialPair(full_simplex(2), full_simplex(1))
    with pytest.raises(FormatError):
        serialize_smap(ParsedMap(pair, sphere_model(2), {0: 0, 1: 1, 2: 2}, 0, 2))


def test_cover_parse_and_errors():
    cover = parse_cover("cover v1\nground: 3\nU0: 0 1\nU1: 1 2\n")
    assert cover.containing(1) == [0, 1]
    assert _error_line(parse_cover, "cover v1\nground: 3\nU1: 0 1 2\n") == 3
    with pytest.raises(FormatError):
        parse_cover("cover v1\nground: 4\nU0: 0 1 2\n")


def test_tower_files(corpus_dir):
    tower = load_tower(os.path.join(corpus_dir, "inputs", "three_points.tow"))
    assert tower.depth == 1
    assert tower.exhaustion[-1] == frozenset({0, 1, 2})
    assert parse_tower(serialize_tower(tower)) == tower
    referenced = load_tower(os.path.join(corpus_dir, "inputs", "circle_full_exhaustion.tow"))
    assert referenced.depth == 2
    assert referenced.refinements[0].assignment == (0, 0, 1, 1, 2, 2)


def test_tower_errors():
    level = "begin level 0\nU0: 0 1\nend\n"
    assert _error_line(parse_tower, "tower v1\nground: 2\nbegin level 1\nU0: 0 1\nend\n") == 1
    with pytest.raises(FormatError):
        parse_tower("tower v1\nground: 2\n" + level + "begin level 1\nU0: 0\nU1: 1\nend\n"
                    "begin refine 1\n0 -> 0\nend\n")
    with pytest.raises(FormatError):
        parse_tower("tower v1\nground: 2\n" + level + "begin exhaustion\nX0: 0\nend\n")


def test_gtower_files(corpus_dir):
    periodic = parse_gtower(_read(corpus_dir, "z8_times2.gtw"))
    assert periodic.periodic
    assert str(periodic.stage(0)) == "Z/8"
    explicit = parse_gtower(_read(corpus_dir, "z4_from_z2.gtw"))
    assert explicit.last_explicit_stage == 1
    assert parse_gtower(serialize_gtower(explicit)) == explicit


def test_gtower_errors():
    with pytest.raises(FormatError):
        parse_gtower("gtower v1\nkind: cyclic\n")
    with pytest.raises(FormatError):
        parse_gtower("gtower v1\nkind: periodic\nbegin group\ngenerators: 1\n8\nend\n"
                     "begin endomorphism\n1 2\nend\n")
    with pytest.raises(FormatError):
        parse_gtower("gtower v1\nkind: explicit\nbegin stage 1\ngenerators: 1\nend\n")


def test_tcochain_parse_and_errors():
    cochain = parse_tcochain("tcochain v1\nlevel: 0\ndegree: 1\ncoefficients: Z/2 + Z/2\n"
                             "0 1: 1 0\n")
    assert cochain.values == {(0, 1): (1, 0)}
    assert str(cochain.coefficients) == "Z/2 + Z/2"
    assert parse_tcochain(serialize_tcochain(cochain)).values == cochain.values
    head = "tcochain v1\nlevel: 0\ndegree: 1\ncoefficients: Z\n"
    assert _error_line(parse_tcochain, head + "1 0: 1\n") == 5
    assert _error_line(parse_tcochain, head + "0 1: 1 1\n") == 5
    assert _error_line(parse_tcochain, head + "0 1: 1\n0 1: 2\n") == 6
    with pytest.raises(FormatError):
        parse_tcochain("tcochain v1\nlevel: 0\ndegree: 0\ncoefficients: Q\n")


def test_scomplex_limits_simplex_size():
    wide = "scomplex v1\n0 1\n" + " ".join(str(v) for v in range(40)) + "\n"
    assert _error_line(parse_scomplex, wide) == 3
    largest = " ".join(str(v) for v in range(12))
    assert parse_scomplex(f"scomplex v1\n{largest}\n").complex.dimension == 11
