#!/usr/bin/env python3
"""
Versioned text formats for cechtool

Every file starts with a header line such as `fpgroup v1`. The rest is made
of `key: value` fields, bare body lines and named blocks delimited by
`begin <name>` / `end`. `#` starts a comment. Parse errors carry the line
number they occurred on.
"""

import os
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .covers import Cover, CoverTower, RefinementMap, TowerCochain
from .errors import BudgetExceededError, FormatError, ToolkitError
from .exact_abelian import FpGroup, GroupHom, format_group
from .intmatrix import IntMatrix
from .simplicial import (SimplicialComplex, SimplicialMap, SimplicialPair, cycle_complex,
                         full_simplex, hexagon, sphere_model, torus_7)
from .towers import GroupTower

FORMAT_VERSION = "v1"
MAX_GENERATORS = 10_000


@dataclass
class SourceLine:
    """A single input line with metadata."""
    line_number: int          # Original line number in file
    content: str              # Content with comments removed
    original: str             # Original line before processing
    is_comment: bool          # Whether the line is only a comment
    is_blank: bool            # Whether the line is blank


@dataclass
class Document:
    """Parsed layout of a versioned file or of one of its blocks."""
    header: str
    source: str
    line_number: int = 1
    fields: Dict[str, Tuple[str, int]] = field(default_factory=dict)
    body: List[SourceLine] = field(default_factory=list)
    blocks: Dict[str, "Document"] = field(default_factory=dict)

    def require(self, key: str) -> Tuple[str, int]:
        if key not in self.fields:
            raise FormatError(f"missing field '{key}'", self.line_number, self.source)
        return self.fields[key]

    def get(self, key: str) -> Optional[Tuple[str, int]]:
        return self.fields.get(key)

    def block(self, name: str) -> Optional["Document"]:
        return self.blocks.get(name)

    def require_block(self, name: str) -> "Document":
        if name not in self.blocks:
            raise FormatError(f"missing block '{name}'", self.line_number, self.source)
        return self.blocks[name]

    def blocks_with_prefix(self, prefix: str) -> List[Tuple[str, "Document"]]:
        return [(name[len(prefix):].strip(), doc) for name, doc in self.blocks.items()
                if name.startswith(prefix + " ")]


class FormatReader:
    """Splits versioned text into header, fields, body lines and blocks."""

    def __init__(self):
        self.lines: List[SourceLine] = []
        self.source: str = ""
        self.field_pattern = re.compile(r'^([a-z_][a-z_0-9 ]*):\s*(.*)$')
        self.begin_pattern = re.compile(r'^begin\s+(\S.*)$')

    def load_file(self, filepath: str) -> "FormatReader":
        """Load a file; unreadable files are reported as format errors."""
        self.source = filepath
        if not os.path.exists(filepath):
            raise FormatError("file not found", None, filepath)
        try:
            with open(filepath, 'r', encoding='utf-8') as f:
                text = f.read()
        except (OSError, UnicodeDecodeError) as e:
            raise FormatError(f"cannot read file: {e}", None, filepath) from e
        return self.load_text(text, filepath)

    def load_text(self, text: str, source: str = "<input>") -> "FormatReader":
        self.source = source
        self.lines = [self._process_line(n, raw) for n, raw in enumerate(text.splitlines(), 1)]
        return self

    def _process_line(self, line_number: int, raw_line: str) -> SourceLine:
        original = raw_line.rstrip('\n\r')
        stripped = original.strip()
        if not stripped:
            return SourceLine(line_number, "", original, False, True)
        content = stripped.split('#', 1)[0].strip()
        return SourceLine(line_number, content, original, not content, False)

    def document(self, expected_header: str) -> Document:
        meaningful = [line for line in self.lines if line.content]
        if not meaningful:
            raise FormatError("empty input", None, self.source)
        first = meaningful[0]
        if first.content != f"{expected_header} {FORMAT_VERSION}":
            raise FormatError(f"expected header '{expected_header} {FORMAT_VERSION}', "
                              f"found '{first.content}'", first.line_number, self.source)
        return self._collect(expected_header, meaningful[1:], first.line_number)

    def _collect(self, header: str, lines: Sequence[SourceLine], line_number: int) -> Document:
        doc = Document(header, self.source, line_number)
        i = 0
        while i < len(lines):
            line = lines[i]
            begin = self.begin_pattern.match(line.content)
            if begin:
                name = begin.group(1).strip()
                j = i + 1
                while j < len(lines) and lines[j].content != "end":
                    if self.begin_pattern.match(lines[j].content):
                        raise FormatError("blocks cannot be nested", lines[j].line_number,
                                          self.source)
                    j += 1
                if j == len(lines):
                    raise FormatError(f"block '{name}' is not closed", line.line_number,
                                      self.source)
                if name in doc.blocks:
                    raise FormatError(f"duplicate block '{name}'", line.line_number, self.source)
                doc.blocks[name] = self._collect(name, lines[i + 1:j], line.line_number)
                i = j + 1
                continue
            if line.content == "end":
                raise FormatError("'end' without 'begin'", line.line_number, self.source)
            match = self.field_pattern.match(line.content)
            if match:
                key = match.group(1).strip()
                if key in doc.fields:
                    raise FormatError(f"duplicate field '{key}'", line.line_number, self.source)
                doc.fields[key] = (match.group(2).strip(), line.line_number)
            else:
                doc.body.append(line)
            i += 1
        return doc


def read_text(text: str, header: str, source: str = "<input>") -> Document:
    return FormatReader().load_text(text, source).document(header)


def read_file(path: str, header: str) -> Document:
    return FormatReader().load_file(path).document(header)


def _ints(text: str, line: Optional[int], source: str) -> List[int]:
    try:
        return [int(token) for token in text.split()]
    except ValueError:
        raise FormatError(f"expected integers, found '{text}'", line, source) from None


def _single_int(text: str, line: Optional[int], source: str, minimum: int = 0) -> int:
    values = _ints(text, line, source)
    if len(values) != 1 or values[0] < minimum:
        raise FormatError(f"expected one integer >= {minimum}, found '{text}'", line, source)
    return values[0]


def _guard(doc_source: str, builder):
    """Run a builder, turning validation failures into format errors with context."""
    try:
        return builder()
    except (FormatError, BudgetExceededError):
        raise
    except ToolkitError as e:
        raise FormatError(str(e), None, doc_source) from e


# fpgroup / intmatrix

def group_from_document(doc: Document) -> FpGroup:
    text, line = doc.require("generators")
    k = _single_int(text, line, doc.source)
    if k > MAX_GENERATORS:
        raise FormatError(f"at most {MAX_GENERATORS} generators are supported", line, doc.source)
    relators = []
    for row in doc.body:
        values = _ints(row.content, row.line_number, doc.source)
        if len(values) != k:
            raise FormatError(f"relator has {len(values)} entries, expected {k}",
                              row.line_number, doc.source)
        relators.append(values)
    return FpGroup(k, IntMatrix.from_columns(relators, k))


def parse_fpgroup(text: str, source: str = "<input>") -> FpGroup:
    return group_from_document(read_text(text, "fpgroup", source))


def serialize_fpgroup(group: FpGroup) -> str:
    lines = [f"fpgroup {FORMAT_VERSION}", f"generators: {group.generator_count}"]
    lines.extend(" ".join(str(x) for x in column) for column in group.relations.columns())
    return "\n".join(lines) + "\n"


def matrix_from_document(doc: Document) -> IntMatrix:
    text, line = doc.require("shape")
    shape = _ints(text, line, doc.source)
    if len(shape) != 2 or min(shape) < 0:
        raise FormatError(f"shape must be two non-negative integers, found '{text}'", line,
                          doc.source)
    rows, cols = shape
    data = []
    for row in doc.body:
        values = _ints(row.content, row.line_number, doc.source)
        if len(values) != cols:
            raise FormatError(f"row has {len(values)} entries, expected {cols}", row.line_number,
                              doc.source)
        data.append(values)
    if len(data) != rows:
        raise FormatError(f"found {len(data)} rows, expected {rows}", line, doc.source)
    return IntMatrix.from_rows(data, cols)


def parse_intmatrix(text: str, source: str = "<input>") -> IntMatrix:
    return matrix_from_document(read_text(text, "intmatrix", source))


def serialize_intmatrix(matrix: IntMatrix) -> str:
    lines = [f"intmatrix {FORMAT_VERSION}", f"shape: {matrix.rows} {matrix.cols}"]
    lines.extend(" ".join(str(x) for x in row) for row in matrix.data)
    return "\n".join(lines) + "\n"


# scomplex

def _simplices(lines: Sequence[SourceLine], source: str) -> List[Tuple[int, ...]]:
    result = []
    for row in lines:
        values = _ints(row.content, row.line_number, source)
        if not values or len(set(values)) != len(values):
            raise FormatError("simplex must list distinct vertices", row.line_number, source)
        if len(values) > MAX_SIMPLEX_VERTICES:
            raise FormatError(f"simplex has more than {MAX_SIMPLEX_VERTICES} vertices",
                              row.line_number, source)
        result.append(tuple(sorted(values)))
    return result


def pair_from_document(doc: Document) -> SimplicialPair:
    maximal = _simplices(doc.body, doc.source)
    sub_doc = doc.block("subcomplex")
    sub = _simplices(sub_doc.body, doc.source) if sub_doc else []

    def build():
        complex_ = SimplicialComplex.from_maximal(maximal)
        return SimplicialPair(complex_, SimplicialComplex.from_maximal(sub))
    return _guard(doc.source, build)


def parse_scomplex(text: str, source: str = "<input>") -> SimplicialPair:
    return pair_from_document(read_text(text, "scomplex", source))


def _simplex_lines(complex_: SimplicialComplex) -> List[str]:
    return [" ".join(str(v) for v in s) for s in complex_.maximal_simplices()]


def serialize_scomplex(pair: SimplicialPair) -> str:
    lines = [f"scomplex {FORMAT_VERSION}"] + _simplex_lines(pair.complex)
    if pair.subcomplex.simplices:
        lines += ["begin subcomplex"] + _simplex_lines(pair.subcomplex) + ["end"]
    return "\n".join(lines) + "\n"


BUILTIN_COMPLEXES = ("torus7", "hexagon", "sphere:<n>", "simplex:<n>", "circle:<n>")
MAX_SPHERE_DIMENSION = 10
MAX_SIMPLEX_VERTICES = MAX_SPHERE_DIMENSION + 2
MAX_CIRCLE_VERTICES = 10_000


def builtin_complex(name: str) -> Optional[SimplicialComplex]:
    """Named standard complexes; None if the name is not a builtin."""
    if name == "torus7":
        return torus_7()
    if name == "hexagon":
        return hexagon()
    match = re.match(r'^(sphere|simplex|circle):(\d+)$', name)
    if not match:
        return None
    kind, n = match.group(1), int(match.group(2))
    limit = MAX_CIRCLE_VERTICES if kind == "circle" else MAX_SPHERE_DIMENSION
    if n > limit:
        raise FormatError(f"builtin {kind} is limited to {limit}", None, name)
    if kind == "sphere":
        return sphere_model(n)
    if kind == "simplex":
        return full_simplex(n)
    return _guard(name, lambda: cycle_complex(n))


def load_pair(argument: str) -> SimplicialPair:
    builtin = builtin_complex(argument)
    if builtin is not None:
        return SimplicialPair(builtin)
    return pair_from_document(read_file(argument, "scomplex"))


# smap

@dataclass
class ParsedMap:
    pair: SimplicialPair
    target: SimplicialComplex
    vertex_map: Dict[int, int]
    depth: int = 0
    sphere: Optional[int] = None

    def simplicial(self) -> SimplicialMap:
        return SimplicialMap(self.pair.complex, self.target, self.vertex_map)


_ARROW = re.compile(r'^(-?\d+)\s*->\s*(-?\d+)$')


def _arrows(lines: Sequence[SourceLine], source: str) -> Dict[int, int]:
    mapping = {}
    for row in lines:
        match = _ARROW.match(row.content)
        if not match:
            raise FormatError(f"expected 'v -> w', found '{row.content}'", row.line_number, source)
        v, w = int(match.group(1)), int(match.group(2))
        if v in mapping:
            raise FormatError(f"vertex {v} mapped twice", row.line_number, source)
        mapping[v] = w
    return mapping


def map_from_document(doc: Document) -> ParsedMap:
    pair = pair_from_document(doc.require_block("source"))
    depth = 0
    if doc.get("depth"):
        depth = _single_int(*doc.require("depth"), doc.source)
    sphere = None
    if doc.get("sphere"):
        sphere = _single_int(*doc.require("sphere"), doc.source, minimum=1)
        if sphere > MAX_SPHERE_DIMENSION:
            raise FormatError(f"sphere dimension is limited to {MAX_SPHERE_DIMENSION}",
                              doc.require("sphere")[1], doc.source)
        target = sphere_model(sphere)
    else:
        target = pair_from_document(doc.require_block("target")).complex
    return ParsedMap(pair, target, _arrows(doc.body, doc.source), depth, sphere)


def parse_smap(text: str, source: str = "<input>") -> ParsedMap:
    return map_from_document(read_text(text, "smap", source))


def serialize_smap(parsed: ParsedMap) -> str:
    lines = [f"smap {FORMAT_VERSION}"]
    if parsed.sphere is not None:
        lines.append(f"sphere: {parsed.sphere}")
    if parsed.depth:
        lines.append(f"depth: {parsed.depth}")
    lines += ["begin source"] + _simplex_lines(parsed.pair.complex) + ["end"]
    if parsed.pair.subcomplex.simplices:
        raise FormatError("maps of pairs are written with a separate subcomplex file")
    if parsed.sphere is None:
        lines += ["begin target"] + _simplex_lines(parsed.target) + ["end"]
    lines += [f"{v} -> {w}" for v, w in sorted(parsed.vertex_map.items())]
    return "\n".join(lines) + "\n"


def load_map(path: str) -> ParsedMap:
    return map_from_document(read_file(path, "smap"))


# cover / tower

MAX_GROUND = 100_000


def _ground(doc: Document) -> int:
    text, line = doc.require("ground")
    ground = _single_int(text, line, doc.source)
    if ground > MAX_GROUND:
        raise FormatError(f"ground sets are limited to {MAX_GROUND} points", line, doc.source)
    return ground


_MEMBER = re.compile(r'^U(\d+):\s*(.*)$')
_SET = re.compile(r'^X(\d+):\s*(.*)$')


def _indexed_sets(lines: Sequence[SourceLine], pattern, prefix: str, source: str) -> List[frozenset]:
    sets = []
    for row in lines:
        match = pattern.match(row.content)
        if not match:
            raise FormatError(f"expected '{prefix}<i>: points', found '{row.content}'",
                              row.line_number, source)
        if int(match.group(1)) != len(sets):
            raise FormatError(f"expected index {len(sets)}", row.line_number, source)
        sets.append(frozenset(_ints(match.group(2), row.line_number, source)))
    return sets


def cover_from_document(doc: Document, ground: Optional[int] = None) -> Cover:
    if doc.get("ground") or ground is None:
        ground = _ground(doc)
    sets = _indexed_sets(doc.body, _MEMBER, "U", doc.source)
    return _guard(doc.source, lambda: Cover(frozenset(range(ground)), tuple(sets)))


def parse_cover(text: str, source: str = "<input>") -> Cover:
    return cover_from_document(read_text(text, "cover", source))


def _cover_lines(cover: Cover) -> List[str]:
    return [f"U{i}: " + " ".join(str(p) for p in sorted(m)) for i, m in enumerate(cover.members)]


def serialize_cover(cover: Cover) -> str:
    lines = [f"cover {FORMAT_VERSION}", f"ground: {len(cover.ground)}"] + _cover_lines(cover)
    return "\n".join(lines) + "\n"


def tower_from_document(doc: Document) -> CoverTower:
    ground = _ground(doc)
    levels: Dict[int, Cover] = {}
    for name, block in doc.blocks_with_prefix("level"):
        index = _single_int(name, block.line_number, doc.source)
        levels[index] = cover_from_document(block, ground)
    for key, (value, line) in doc.fields.items():
        match = re.match(r'^level (\d+) file$', key)
        if match:
            index = int(match.group(1))
            if index in levels:
                raise FormatError(f"level {index} given twice", line, doc.source)
            path = value if os.path.isabs(value) else os.path.join(
                os.path.dirname(doc.source) if os.path.exists(doc.source) else "", value)
            levels[index] = cover_from_document(read_file(path, "cover"))
    if sorted(levels) != list(range(len(levels))) or not levels:
        raise FormatError("levels must be numbered 0, 1, 2, ...", doc.line_number, doc.source)
    covers = [levels[k] for k in range(len(levels))]
    refinements = []
    for k in range(1, len(covers)):
        block = doc.block(f"refine {k}")
        if block is None:
            assignment = tuple(range(len(covers[k].members)))
        else:
            mapping = _arrows(block.body, doc.source)
            if sorted(mapping) != list(range(len(covers[k].members))):
                raise FormatError(f"refinement {k} must assign every member of level {k}",
                                  block.line_number, doc.source)
            assignment = tuple(mapping[i] for i in range(len(covers[k].members)))
        refinements.append(_guard(doc.source, lambda k=k, a=assignment:
                                  RefinementMap(covers[k], covers[k - 1], a)))
    exhaustion = None
    block = doc.block("exhaustion")
    if block is not None:
        exhaustion = tuple(_indexed_sets(block.body, _SET, "X", doc.source))
    return _guard(doc.source, lambda: CoverTower(tuple(covers), tuple(refinements), exhaustion))


def parse_tower(text: str, source: str = "<input>") -> CoverTower:
    return tower_from_document(read_text(text, "tower", source))


def load_tower(path: str) -> CoverTower:
    return tower_from_document(read_file(path, "tower"))


def serialize_tower(tower: CoverTower) -> str:
    lines = [f"tower {FORMAT_VERSION}", f"ground: {len(tower.ground)}"]
    for k, cover in enumerate(tower.levels):
        lines += [f"begin level {k}"] + _cover_lines(cover) + ["end"]
    for k, r in enumerate(tower.refinements, 1):
        lines += [f"begin refine {k}"] + [f"{i} -> {j}" for i, j in enumerate(r.assignment)] + ["end"]
    if tower.exhaustion is not None:
        lines += ["begin exhaustion"]
        lines += [f"X{i}: " + " ".join(str(p) for p in sorted(x))
                  for i, x in enumerate(tower.exhaustion)]
        lines += ["end"]
    return "\n".join(lines) + "\n"


# gtower

def _hom_matrix(block: Document, source: FpGroup, target: FpGroup, src: str) -> GroupHom:
    rows = [_ints(r.content, r.line_number, src) for r in block.body]
    if len(rows) != target.generator_count or any(len(r) != source.generator_count for r in rows):
        raise FormatError(f"matrix must be {target.generator_count} x {source.generator_count}",
                          block.line_number, src)
    return _guard(src, lambda: GroupHom(source, target,
                                        IntMatrix.from_rows(rows, source.generator_count)))


def gtower_from_document(doc: Document) -> GroupTower:
    kind, line = doc.require("kind")
    if kind == "periodic":
        group = group_from_document(doc.require_block("group"))
        e = _hom_matrix(doc.require_block("endomorphism"), group, group, doc.source)
        return GroupTower.periodic_tower(group, e)
    if kind != "explicit":
        raise FormatError(f"kind must be 'periodic' or 'explicit', found '{kind}'", line,
                          doc.source)
    stages: Dict[int, FpGroup] = {}
    for name, block in doc.blocks_with_prefix("stage"):
        stages[_single_int(name, block.line_number, doc.source)] = group_from_document(block)
    if not stages or sorted(stages) != list(range(len(stages))):
        raise FormatError("stages must be numbered 0, 1, 2, ...", doc.line_number, doc.source)
    groups = [stages[k] for k in range(len(stages))]
    bonding = []
    for k in range(1, len(groups)):
        bonding.append(_hom_matrix(doc.require_block(f"bond {k}"), groups[k], groups[k - 1],
                                   doc.source))
    return _guard(doc.source, lambda: GroupTower.explicit(groups, bonding))


def parse_gtower(text: str, source: str = "<input>") -> GroupTower:
    return gtower_from_document(read_text(text, "gtower", source))


def _group_block(name: str, group: FpGroup) -> List[str]:
    body = serialize_fpgroup(group).splitlines()[1:]
    return [f"begin {name}"] + body + ["end"]


def serialize_gtower(tower: GroupTower) -> str:
    lines = [f"gtower {FORMAT_VERSION}"]
    if tower.periodic:
        lines.append("kind: periodic")
        lines += _group_block("group", tower.groups[0])
        lines += ["begin endomorphism"] + [" ".join(str(x) for x in r)
                                           for r in tower.bonding[0].matrix.data] + ["end"]
    else:
        lines.append("kind: explicit")
        for k, g in enumerate(tower.groups):
            lines += _group_block(f"stage {k}", g)
        for k, b in enumerate(tower.bonding, 1):
            lines += [f"begin bond {k}"] + [" ".join(str(x) for x in r)
                                            for r in b.matrix.data] + ["end"]
    return "\n".join(lines) + "\n"


# tcochain

_VALUE = re.compile(r'^([-\d\s]+):\s*(.*)$')


def tcochain_from_document(doc: Document) -> TowerCochain:
    level = _single_int(*doc.require("level"), doc.source)
    degree = _single_int(*doc.require("degree"), doc.source)
    text, line = doc.require("coefficients")
    coefficients = _guard(doc.source, lambda: FpGroup.parse(text))
    values = {}
    for row in doc.body:
        match = _VALUE.match(row.content)
        if not match:
            raise FormatError(f"expected 'i j ...: value', found '{row.content}'",
                              row.line_number, doc.source)
        simplex = tuple(_ints(match.group(1), row.line_number, doc.source))
        if len(simplex) != degree + 1 or list(simplex) != sorted(set(simplex)):
            raise FormatError("simplex must be ascending with degree + 1 vertices",
                              row.line_number, doc.source)
        value = tuple(_ints(match.group(2), row.line_number, doc.source))
        if len(value) != coefficients.generator_count:
            raise FormatError(f"value needs {coefficients.generator_count} coordinates",
                              row.line_number, doc.source)
        if simplex in values:
            raise FormatError("simplex given twice", row.line_number, doc.source)
        values[simplex] = value
    return TowerCochain(level, degree, coefficients, values)


def parse_tcochain(text: str, source: str = "<input>") -> TowerCochain:
    return tcochain_from_document(read_text(text, "tcochain", source))


def load_tcochain(path: str) -> TowerCochain:
    return tcochain_from_document(read_file(path, "tcochain"))


def serialize_tcochain(cochain: TowerCochain) -> str:
    coefficients = format_group(cochain.coefficients.torsion, cochain.coefficients.free_rank)
    lines = [f"tcochain {FORMAT_VERSION}", f"level: {cochain.level}", f"degree: {cochain.degree}",
             f"coefficients: {coefficients}"]
    for simplex, value in sorted(cochain.values.items()):
        lines.append(" ".join(str(v) for v in simplex) + ": " + " ".join(str(x) for x in value))
    return "\n".join(lines) + "\n"
