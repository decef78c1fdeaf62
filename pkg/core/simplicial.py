"""
Finite simplicial complexes, simplicial maps and their cochain complexes.

Simplices are ascending tuples of integer vertices and carry the ascending
orientation. The coboundary is

    (δζ)(v_0 ... v_{n+1}) = Σ_{i=0}^{n+1} (-1)^i ζ(v_0 ... v̂_i ... v_{n+1}).

Cochain complexes are label based: every degree lists basis labels (the
simplices, for a simplicial complex), and relative complexes are obtained by
deleting the labels a cochain must vanish on. The same class carries Moore
spaces and algebraic telescopes in towers.py.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import (Callable, Dict, FrozenSet, Hashable, Iterable, List, Mapping,
                    Optional, Sequence, Tuple)

import networkx as nx

from .config import get_config
from .errors import (BudgetExceededError, ConsistencyError, InvalidMapError, NonChainMapError,
                     NotSphereLikeError, ValidationError)
from .exact_abelian import (FpGroup, GroupHom, Subgroup, Subquotient, image, kernel,
                            quotient_of_subgroups)
from .intmatrix import IntMatrix, Vector, block_diagonal, smith_normal_form

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]


def permutation_sign(sequence: Sequence[int]) -> int:
    """Sign of the permutation sorting a sequence of distinct integers."""
    inversions = sum(1 for i, j in itertools.combinations(range(len(sequence)), 2)
                     if sequence[i] > sequence[j])
    return -1 if inversions % 2 else 1


def boundary_faces(simplex: Simplex) -> List[Tuple[int, Simplex]]:
    """(i, face with the i-th vertex removed) for each codimension-one face."""
    if len(simplex) < 2:
        return []
    return [(i, simplex[:i] + simplex[i + 1:]) for i in range(len(simplex))]


def all_faces(simplex: Simplex) -> List[Simplex]:
    """Every nonempty face, including the simplex itself."""
    return [c for k in range(1, len(simplex) + 1) for c in itertools.combinations(simplex, k)]


def check_face_budget(bound: int) -> None:
    """Refuse to expand a complex when the face count bound exceeds the face budget."""
    budget = get_config().face_budget()
    if bound > budget:
        raise BudgetExceededError("complex would have too many faces", required=bound,
                                  budget=budget)


@dataclass(frozen=True)
class SimplicialComplex:
    """Downward-closed set of ascending vertex tuples."""
    simplices: FrozenSet[Simplex]

    def __post_init__(self):
        for s in self.simplices:
            if not s or any(a >= b for a, b in zip(s, s[1:])):
                raise ValidationError("simplex must be a nonempty ascending tuple",
                                      invariant="ascending-orientation", witness=s)
            for _, face in boundary_faces(s):
                if face not in self.simplices:
                    raise ValidationError("complex is not closed under faces",
                                          invariant="downward-closed", witness=face)

    @classmethod
    def from_maximal(cls, simplices: Iterable[Iterable[int]]) -> "SimplicialComplex":
        maximal = set()
        for s in simplices:
            vertices = tuple(sorted(s))
            if len(set(vertices)) != len(vertices):
                raise ValidationError("simplex repeats a vertex", invariant="ascending-orientation",
                                      witness=vertices)
            if vertices:
                maximal.add(vertices)
        check_face_budget(sum(2 ** len(s) - 1 for s in maximal))
        closure = set()
        for vertices in maximal:
            closure.update(all_faces(vertices))
        return cls(frozenset(closure))

    @classmethod
    def empty(cls) -> "SimplicialComplex":
        return cls(frozenset())

    @cached_property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted(s[0] for s in self.simplices if len(s) == 1))

    @cached_property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    @cached_property
    def _by_dimension(self) -> Dict[int, List[Simplex]]:
        table: Dict[int, List[Simplex]] = {}
        for s in self.simplices:
            table.setdefault(len(s) - 1, []).append(s)
        return {n: sorted(v) for n, v in table.items()}

    def simplices_of_dim(self, n: int) -> List[Simplex]:
        return self._by_dimension.get(n, [])

    def ordered_simplices(self) -> List[Simplex]:
        return sorted(self.simplices, key=lambda s: (len(s), s))

    def __contains__(self, simplex) -> bool:
        return tuple(simplex) in self.simplices

    def __len__(self) -> int:
        return len(self.simplices)

    def skeleton(self, n: int) -> "SimplicialComplex":
        return SimplicialComplex(frozenset(s for s in self.simplices if len(s) - 1 <= n))

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self.simplices <= other.simplices

    def union(self, other: "SimplicialComplex") -> "SimplicialComplex":
        return SimplicialComplex(self.simplices | other.simplices)

    def subcomplex(self, simplices: Iterable[Iterable[int]]) -> "SimplicialComplex":
        """Closure of the given simplices, which must belong to this complex."""
        sub = SimplicialComplex.from_maximal(simplices)
        if not sub.is_subcomplex_of(self):
            missing = min(sub.simplices - self.simplices)
            raise ValidationError("simplex is not in the ambient complex",
                                  invariant="subcomplex", witness=missing)
        return sub

    def maximal_simplices(self) -> List[Simplex]:
        maximal = set(self.simplices)
        for s in self.simplices:
            for _, face in boundary_faces(s):
                maximal.discard(face)
        return sorted(maximal, key=lambda s: (len(s), s))

    def star(self, vertex: int) -> List[Simplex]:
        """Simplices of the open star of a vertex."""
        return sorted(s for s in self.simplices if vertex in s)

    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(self.simplices_of_dim(n)) for n in range(self.dimension + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * c for n, c in enumerate(self.f_vector()))

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.simplices_of_dim(1))
        return g

    def is_connected(self) -> bool:
        return bool(self.vertices) and nx.is_connected(self.graph())

    def component_count(self) -> int:
        return nx.number_connected_components(self.graph()) if self.vertices else 0


# standard complexes

def full_simplex(n: int, offset: int = 0) -> SimplicialComplex:
    return SimplicialComplex.from_maximal([range(offset, offset + n + 1)])


def boundary_complex(vertices: Sequence[int]) -> SimplicialComplex:
    """Boundary of the simplex spanned by the given vertices."""
    vertices = tuple(sorted(vertices))
    return SimplicialComplex.from_maximal(
        [vertices[:i] + vertices[i + 1:] for i in range(len(vertices))])


@lru_cache(maxsize=16)
def sphere_model(n: int) -> SimplicialComplex:
    """∂Δ^{n+1} on vertices 0 .. n+1."""
    if n < 0:
        raise ValidationError("sphere dimension must be non-negative", invariant="sphere-dim",
                              witness=n)
    return boundary_complex(range(n + 2))


def torus_7() -> SimplicialComplex:
    """The seven-vertex torus."""
    triangles = []
    for i in range(7):
        triangles.append((i, (i + 1) % 7, (i + 3) % 7))
        triangles.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex.from_maximal(triangles)


def cycle_complex(n: int) -> SimplicialComplex:
    """A circle triangulated as an n-gon, n >= 3."""
    return SimplicialComplex.from_maximal([(i, (i + 1) % n) for i in range(n)])


def hexagon() -> SimplicialComplex:
    return cycle_complex(6)


def cone(complex_: SimplicialComplex, apex: Optional[int] = None) -> SimplicialComplex:
    apex = max(complex_.vertices, default=-1) + 1 if apex is None else apex
    if apex in complex_.vertices:
        raise ValidationError("cone apex is already a vertex", invariant="cone-apex", witness=apex)
    maximal = [s + (apex,) if apex > s[-1] else (apex,) + s for s in complex_.maximal_simplices()]
    return SimplicialComplex.from_maximal(maximal + [(apex,)])


@dataclass
class SimplicialMap:
    """Vertex map whose images of simplices are simplices of the target."""
    source: SimplicialComplex
    target: SimplicialComplex
    vertex_map: Dict[int, int]

    def __post_init__(self):
        self.vertex_map = {int(k): int(v) for k, v in self.vertex_map.items()}
        for v in self.source.vertices:
            if v not in self.vertex_map:
                raise InvalidMapError("vertex has no image", invariant="simplicial-map", witness=v)
            if self.vertex_map[v] not in self.target.vertices:
                raise InvalidMapError("vertex image is not a target vertex",
                                      invariant="simplicial-map", witness=v)
        for s in self.source.simplices:
            if self.image(s) not in self.target.simplices:
                raise InvalidMapError("image of a simplex is not a simplex of the target",
                                      invariant="simplicial-map", witness=s)

    @classmethod
    def identity(cls, complex_: SimplicialComplex) -> "SimplicialMap":
        return cls(complex_, complex_, {v: v for v in complex_.vertices})

    @classmethod
    def inclusion(cls, sub: SimplicialComplex, ambient: SimplicialComplex) -> "SimplicialMap":
        return cls(sub, ambient, {v: v for v in sub.vertices})

    def image(self, simplex: Simplex) -> Simplex:
        return tuple(sorted({self.vertex_map[v] for v in simplex}))

    def oriented_image(self, simplex: Simplex) -> Optional[Tuple[Simplex, int]]:
        """(image, sign) for a nondegenerate image, else None."""
        images = [self.vertex_map[v] for v in simplex]
        if len(set(images)) != len(images):
            return None
        return tuple(sorted(images)), permutation_sign(images)

    def compose(self, inner: "SimplicialMap") -> "SimplicialMap":
        """self ∘ inner."""
        if inner.target != self.source:
            raise InvalidMapError("maps are not composable", invariant="simplicial-map")
        return SimplicialMap(inner.source, self.target,
                             {v: self.vertex_map[w] for v, w in inner.vertex_map.items()})

    def restrict(self, sub: SimplicialComplex) -> "SimplicialMap":
        if not sub.is_subcomplex_of(self.source):
            raise ValidationError("restriction to a non-subcomplex", invariant="subcomplex")
        return SimplicialMap(sub, self.target, {v: self.vertex_map[v] for v in sub.vertices})

    def maps_into(self, sub: SimplicialComplex, within: Optional[SimplicialComplex] = None) -> bool:
        domain = within.simplices if within is not None else self.source.simplices
        return all(self.image(s) in sub.simplices for s in domain)


@dataclass(frozen=True)
class SimplicialPair:
    complex: SimplicialComplex
    subcomplex: SimplicialComplex = field(default_factory=SimplicialComplex.empty)

    def __post_init__(self):
        if not self.subcomplex.is_subcomplex_of(self.complex):
            missing = min(self.subcomplex.simplices - self.complex.simplices)
            raise ValidationError("subcomplex is not contained in the complex",
                                  invariant="subcomplex", witness=missing)

    def relative_simplices(self, n: int) -> List[Simplex]:
        return [s for s in self.complex.simplices_of_dim(n) if s not in self.subcomplex.simplices]


# cochain complexes

@dataclass(eq=False)
class CochainComplexFp:
    """Cochain complex C^n = G^{labels[n]} with integer coboundary matrices.

    differentials[n] has one row per label of degree n+1 and one column per
    label of degree n; it acts on each coordinate of G separately.

    Instances are shared through the cochain_complex cache. The lazily filled
    tables keep the first value stored, so concurrent readers all see one object.
    """
    coefficients: FpGroup
    labels: Dict[int, Tuple[Hashable, ...]]
    differentials: Dict[int, IntMatrix]
    parent: Optional["CochainComplexFp"] = field(default=None, repr=False)
    kept: Dict[int, Tuple[int, ...]] = field(default_factory=dict, repr=False)
    _groups: Dict[int, FpGroup] = field(default_factory=dict, repr=False)
    _coboundaries: Dict[int, GroupHom] = field(default_factory=dict, repr=False)
    _cohomology: Dict[int, "CohomologyGroup"] = field(default_factory=dict, repr=False)
    _index: Dict[int, Dict[Hashable, int]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.labels = {n: tuple(v) for n, v in self.labels.items()}
        for n, d in self.differentials.items():
            if d.shape != (self.rank(n + 1), self.rank(n)):
                raise ValidationError("coboundary matrix has the wrong shape",
                                      invariant="cochain-shape", witness=n)
        for n in self.differentials:
            if n + 1 in self.differentials:
                if not (self.differentials[n + 1] @ self.differentials[n]).is_zero():
                    raise ValidationError("coboundary does not square to zero",
                                          invariant="delta-squared-zero", witness=n)

    @property
    def degrees(self) -> List[int]:
        return sorted(self.labels)

    def rank(self, n: int) -> int:
        return len(self.labels.get(n, ()))

    def label_index(self, n: int) -> Dict[Hashable, int]:
        if n not in self._index:
            self._index.setdefault(n, {label: i for i, label in enumerate(self.labels.get(n, ()))})
        return self._index[n]

    def integer_coboundary(self, n: int) -> IntMatrix:
        d = self.differentials.get(n)
        return d if d is not None else IntMatrix.zeros(self.rank(n + 1), self.rank(n))

    def group(self, n: int) -> FpGroup:
        if n not in self._groups:
            count = self.rank(n)
            k = self.coefficients.generator_count
            if count:
                relations = block_diagonal([self.coefficients.relations] * count)
                self._groups.setdefault(n, FpGroup(count * k, relations))
            else:
                self._groups.setdefault(n, FpGroup.trivial())
        return self._groups[n]

    def coboundary(self, n: int) -> GroupHom:
        if n not in self._coboundaries:
            matrix = self.integer_coboundary(n).kron_identity(self.coefficients.generator_count)
            self._coboundaries.setdefault(n, GroupHom(self.group(n), self.group(n + 1), matrix))
        return self._coboundaries[n]

    def cochain(self, n: int, values: Mapping[Hashable, Sequence[int]]) -> Vector:
        """Flat cochain vector from label → coefficient vector (generator coordinates)."""
        k = self.coefficients.generator_count
        vector = [0] * (self.rank(n) * k)
        index = self.label_index(n)
        for label, value in values.items():
            if label not in index:
                raise ValidationError("cochain value on a label outside the complex",
                                      invariant="cochain-support", witness=label)
            i = index[label]
            vector[i * k:(i + 1) * k] = list(value)
        return tuple(vector)

    def values_of(self, n: int, vector: Sequence[int]) -> Dict[Hashable, Vector]:
        """Nonzero values of a cochain, as canonical elements of G."""
        k = self.coefficients.generator_count
        result = {}
        for i, label in enumerate(self.labels.get(n, ())):
            value = self.coefficients.reduce(vector[i * k:(i + 1) * k])
            if any(value):
                result[label] = value
        return result

    def apply_coboundary(self, n: int, vector: Sequence[int]) -> Vector:
        return self.coboundary(n).apply(vector)

    def vanishing_on(self, drop: Callable[[int, Hashable], bool]) -> "CochainComplexFp":
        """Subcomplex of cochains vanishing on every label with drop(n, label)."""
        kept = {n: tuple(i for i, label in enumerate(labels) if not drop(n, label))
                for n, labels in self.labels.items()}
        labels = {n: tuple(self.labels[n][i] for i in kept[n]) for n in self.labels}
        differentials = {}
        for n, d in self.differentials.items():
            rows_kept = set(kept.get(n + 1, ()))
            for r in range(d.rows):
                if r in rows_kept:
                    continue
                if any(d[r, c] for c in kept.get(n, ())):
                    raise ValidationError("dropped labels do not form a subcomplex",
                                          invariant="subcomplex", witness=self.labels[n + 1][r])
            differentials[n] = d.select_rows(kept.get(n + 1, ())).select_columns(kept.get(n, ()))
        return CochainComplexFp(self.coefficients, labels, differentials, parent=self, kept=kept)

    def inclusion_into_parent(self) -> "CochainMap":
        if self.parent is None:
            raise ValidationError("complex has no parent", invariant="relative-complex")
        components = {}
        for n in self.degrees:
            kept = self.kept.get(n, ())
            rows = [[1 if kept[j] == i else 0 for j in range(len(kept))]
                    for i in range(self.parent.rank(n))]
            components[n] = IntMatrix.from_rows(rows, len(kept))
        return CochainMap(self, self.parent, components)


@dataclass
class CochainMap:
    """Degree-wise integer matrices (target labels x source labels)."""
    source: CochainComplexFp
    target: CochainComplexFp
    components: Dict[int, IntMatrix]

    def __post_init__(self):
        if self.source.coefficients != self.target.coefficients:
            raise ValidationError("cochain map between different coefficient groups",
                                  invariant="coefficients")
        for n in set(self.source.degrees) | set(self.target.degrees):
            if self.component(n).shape != (self.target.rank(n), self.source.rank(n)):
                raise ValidationError("cochain map component has the wrong shape",
                                      invariant="cochain-shape", witness=n)

    def component(self, n: int) -> IntMatrix:
        c = self.components.get(n)
        return c if c is not None else IntMatrix.zeros(self.target.rank(n), self.source.rank(n))

    def verify(self) -> None:
        for n in set(self.source.degrees) | set(self.target.degrees):
            left = self.target.integer_coboundary(n) @ self.component(n)
            right = self.component(n + 1) @ self.source.integer_coboundary(n)
            if left != right:
                raise NonChainMapError("map does not commute with the coboundaries",
                                       invariant="chain-map", witness=n)

    def group_hom(self, n: int) -> GroupHom:
        matrix = self.component(n).kron_identity(self.source.coefficients.generator_count)
        return GroupHom(self.source.group(n), self.target.group(n), matrix)

    def compose(self, inner: "CochainMap") -> "CochainMap":
        degrees = set(inner.source.degrees) | set(self.target.degrees)
        return CochainMap(inner.source, self.target,
                          {n: self.component(n) @ inner.component(n) for n in degrees})


@dataclass
class CohomologyGroup:
    """H^n of a cochain complex with decoder and encoder for cocycles."""
    complex: CochainComplexFp
    degree: int
    subquotient: Subquotient

    @property
    def group(self) -> FpGroup:
        return self.subquotient.group

    def decode(self, v: Sequence[int]) -> Vector:
        """A cocycle representing the class with generator coordinates v."""
        return self.subquotient.representative(v)

    def decode_canonical(self, c: Sequence[int]) -> Vector:
        return self.decode(self.group.lift(c))

    def is_cocycle(self, z: Sequence[int]) -> bool:
        return self.complex.coboundary(self.degree).target.is_zero(
            self.complex.apply_coboundary(self.degree, z))

    def encode_raw(self, z: Sequence[int]) -> Vector:
        """Generator coordinates in `group` of the class of a cocycle."""
        if not self.is_cocycle(z):
            raise ValidationError("cochain is not a cocycle", invariant="cocycle",
                                  witness=self.degree)
        return self.subquotient.class_of(z)

    def encode(self, z: Sequence[int]) -> Vector:
        return self.group.reduce(self.encode_raw(z))

    def generator_cocycles(self) -> List[Vector]:
        return [self.decode_canonical(tuple(1 if i == j else 0
                                            for i in range(self.group.canonical_rank)))
                for j in range(self.group.canonical_rank)]


def complex_cohomology(cc: CochainComplexFp, n: int) -> CohomologyGroup:
    if n not in cc._cohomology:
        cycles = kernel(cc.coboundary(n))
        boundaries = image(cc.coboundary(n - 1))
        h = CohomologyGroup(cc, n, quotient_of_subgroups(cycles, boundaries))
        cc._cohomology.setdefault(n, h)
        logger.debug(f"H^{n} of complex with ranks "
                     f"{[cc.rank(d) for d in cc.degrees]}: {cc._cohomology[n].group}")
    return cc._cohomology[n]


def induced_by_cochain_map(cmap: CochainMap, n: int) -> GroupHom:
    """H^n(source) → H^n(target) induced by a cochain map."""
    h_source = complex_cohomology(cmap.source, n)
    h_target = complex_cohomology(cmap.target, n)
    hom = cmap.group_hom(n)
    columns = []
    for j in range(h_source.group.generator_count):
        z = h_source.decode(h_source.group.basis_vector(j))
        columns.append(h_target.encode_raw(hom.apply(z)))
    matrix = IntMatrix.from_columns(columns, h_target.group.generator_count)
    return GroupHom(h_source.group, h_target.group, matrix)


@lru_cache(maxsize=128)
def _absolute_complex(complex_: SimplicialComplex, coefficients: FpGroup) -> CochainComplexFp:
    labels = {n: tuple(complex_.simplices_of_dim(n)) for n in range(complex_.dimension + 1)}
    differentials = {}
    for n in range(complex_.dimension):
        index = {s: i for i, s in enumerate(labels[n])}
        rows = []
        for tau in labels[n + 1]:
            row = [0] * len(labels[n])
            for i, face in boundary_faces(tau):
                row[index[face]] += -1 if i % 2 else 1
            rows.append(row)
        differentials[n] = IntMatrix.from_rows(rows, len(labels[n]))
    return CochainComplexFp(coefficients, labels, differentials)


@lru_cache(maxsize=128)
def cochain_complex(pair: SimplicialPair, coefficients: FpGroup) -> CochainComplexFp:
    """Relative cochains C^n(K, L; G): labels are the simplices of K not in L."""
    absolute = _absolute_complex(pair.complex, coefficients)
    if not pair.subcomplex.simplices:
        return absolute
    sub = pair.subcomplex.simplices
    return absolute.vanishing_on(lambda n, s: s in sub)


def _as_pair(complex_or_pair, subcomplex: Optional[SimplicialComplex] = None) -> SimplicialPair:
    if isinstance(complex_or_pair, SimplicialPair):
        return complex_or_pair
    if subcomplex is None:
        return SimplicialPair(complex_or_pair)
    return SimplicialPair(complex_or_pair, subcomplex)


def cohomology(complex_or_pair, coefficients: FpGroup, n: int,
               subcomplex: Optional[SimplicialComplex] = None) -> CohomologyGroup:
    """H^n(K, L; G) with decoder and encoder."""
    pair = _as_pair(complex_or_pair, subcomplex)
    return complex_cohomology(cochain_complex(pair, coefficients), n)


def pullback_cochain_map(f: SimplicialMap, coefficients: FpGroup,
                         source_sub: Optional[SimplicialComplex] = None,
                         target_sub: Optional[SimplicialComplex] = None) -> CochainMap:
    """f^#: C(target, target_sub) → C(source, source_sub)."""
    source_pair = _as_pair(f.source, source_sub)
    target_pair = _as_pair(f.target, target_sub)
    for s in source_pair.subcomplex.simplices:
        if f.image(s) not in target_pair.subcomplex.simplices:
            raise InvalidMapError("map does not send the subcomplex into the target subcomplex",
                                  invariant="map-of-pairs", witness=s)
    cc_source = cochain_complex(source_pair, coefficients)
    cc_target = cochain_complex(target_pair, coefficients)
    components = {}
    for n in set(cc_source.degrees) | set(cc_target.degrees):
        target_index = cc_target.label_index(n)
        rows = []
        for sigma in cc_source.labels.get(n, ()):
            row = [0] * cc_target.rank(n)
            oriented = f.oriented_image(sigma)
            if oriented is not None and oriented[0] in target_index:
                row[target_index[oriented[0]]] = oriented[1]
            rows.append(row)
        components[n] = IntMatrix.from_rows(rows, cc_target.rank(n))
    cmap = CochainMap(cc_target, cc_source, components)
    cmap.verify()
    return cmap


def induced_map(f: SimplicialMap, coefficients: FpGroup, n: int,
                source_sub: Optional[SimplicialComplex] = None,
                target_sub: Optional[SimplicialComplex] = None) -> GroupHom:
    """H^n(target pair; G) → H^n(source pair; G)."""
    return induced_by_cochain_map(pullback_cochain_map(f, coefficients, source_sub, target_sub), n)


def label_inclusion(source: CochainComplexFp, target: CochainComplexFp) -> CochainMap:
    """Inclusion of a complex whose labels all occur, degree by degree, in target."""
    components = {}
    for n in source.degrees:
        index = target.label_index(n)
        rows = [[0] * source.rank(n) for _ in range(target.rank(n))]
        for j, label in enumerate(source.labels[n]):
            if label not in index:
                raise ValidationError("label missing from the target complex",
                                      invariant="label-inclusion", witness=label)
            rows[index[label]][j] = 1
        components[n] = IntMatrix.from_rows(rows, source.rank(n))
    cmap = CochainMap(source, target, components)
    cmap.verify()
    return cmap


def comparison_map(pair: SimplicialPair, coefficients: FpGroup, n: int) -> GroupHom:
    """H^n(K, L) → H^n(K) from the inclusion of relative cochains."""
    relative = cochain_complex(pair, coefficients)
    if relative.parent is None:
        return GroupHom.identity(complex_cohomology(relative, n).group)
    return induced_by_cochain_map(relative.inclusion_into_parent(), n)


def restriction_map(pair: SimplicialPair, coefficients: FpGroup, n: int) -> GroupHom:
    """H^n(K) → H^n(L) induced by the inclusion L ⊆ K."""
    return induced_map(SimplicialMap.inclusion(pair.subcomplex, pair.complex), coefficients, n)


# degree

def homology_top_cycle(complex_: SimplicialComplex) -> Dict[Simplex, int]:
    """Generator of H_n for n = dim K, the first top simplex carrying +1."""
    n = complex_.dimension
    if n < 1:
        raise NotSphereLikeError("fundamental cycle needs a complex of dimension >= 1",
                                 invariant="sphere-like", witness=n)
    cc = _absolute_complex(complex_, FpGroup.free(1))
    boundary = cc.integer_coboundary(n - 1).transpose()
    basis = smith_normal_form(boundary).kernel_basis()
    if len(basis) != 1:
        raise NotSphereLikeError("top homology is not infinite cyclic", invariant="sphere-like",
                                 witness=len(basis))
    z = basis[0]
    leading = next(x for x in z if x)
    sign = 1 if leading > 0 else -1
    tops = cc.labels[n]
    return {tops[i]: sign * x for i, x in enumerate(z) if x}


def chain_boundary(chain: Mapping[Simplex, int]) -> Dict[Simplex, int]:
    result: Dict[Simplex, int] = {}
    for simplex, coefficient in chain.items():
        for i, face in boundary_faces(simplex):
            result[face] = result.get(face, 0) + (-1 if i % 2 else 1) * coefficient
    return {s: c for s, c in result.items() if c}


def fundamental_cocycle_simplex(n: int) -> Simplex:
    """The face of ∂Δ^{n+1} omitting the largest vertex."""
    return tuple(range(n + 1))


def degree(f: SimplicialMap, n: Optional[int] = None,
           fundamental_cycle: Optional[Mapping[Simplex, int]] = None) -> int:
    """Degree of f: S → sphere_model(n) for a sphere-like n-dimensional S.

    Without an explicit fundamental cycle, the source must have H^n ≅ Z and
    its cycle is oriented so that the first top simplex has coefficient +1.
    """
    n = f.source.dimension if n is None else n
    if f.target != sphere_model(n):
        raise ValidationError("degree target must be the sphere model of the same dimension",
                              invariant="sphere-target", witness=n)
    if f.source.dimension != n:
        raise NotSphereLikeError("source dimension differs from the sphere dimension",
                                 invariant="sphere-like", witness=f.source.dimension)
    if fundamental_cycle is None:
        top = cohomology(f.source, FpGroup.free(1), n).group
        if top.invariants() != ((), 1):
            raise NotSphereLikeError(f"H^{n} of the source is {top}, not Z",
                                     invariant="sphere-like", witness=str(top))
        fundamental_cycle = homology_top_cycle(f.source)
    elif chain_boundary(fundamental_cycle):
        raise NotSphereLikeError("given fundamental chain is not a cycle",
                                 invariant="sphere-like")
    u = fundamental_cocycle_simplex(n)
    total = 0
    for sigma, coefficient in fundamental_cycle.items():
        oriented = f.oriented_image(sigma)
        if oriented is not None and oriented[0] == u:
            total += coefficient * oriented[1]
    return total


# subdivision

@dataclass
class Subdivision:
    """Barycentric subdivision with carriers back to the base complex."""
    base: SimplicialComplex
    complex: SimplicialComplex
    carrier: Dict[int, Simplex]
    vertex_of: Dict[Simplex, int]

    def simplex_carrier(self, tau: Simplex) -> Simplex:
        """Smallest base simplex containing a simplex of the subdivision."""
        return max((self.carrier[v] for v in tau), key=len)

    def last_vertex_map(self) -> SimplicialMap:
        return SimplicialMap(self.complex, self.base,
                             {v: max(s) for v, s in self.carrier.items()})

    def chain_map(self, n: int) -> Dict[Simplex, Dict[Simplex, int]]:
        """sd_#: each base n-simplex as a signed sum of n-simplices of the subdivision."""
        result = {}
        for sigma in self.base.simplices_of_dim(n):
            chain = {}
            for order in itertools.permutations(sigma):
                flag = tuple(self.vertex_of[tuple(sorted(order[:k + 1]))] for k in range(n + 1))
                chain[flag] = permutation_sign(order)
            result[sigma] = chain
        return result

    def carried_by(self, sub: SimplicialComplex) -> SimplicialComplex:
        return SimplicialComplex(frozenset(
            t for t in self.complex.simplices if self.simplex_carrier(t) in sub.simplices))


@lru_cache(maxsize=None)
def _ordered_partitions(n: int) -> int:
    if n == 0:
        return 1
    return sum(math.comb(n, k) * _ordered_partitions(n - k) for k in range(1, n + 1))


def subdivision_face_count(complex_: SimplicialComplex) -> int:
    """Number of simplices of sd K: flags of faces ending at each simplex."""
    return sum(f * _ordered_partitions(k + 1) for k, f in enumerate(complex_.f_vector()))


def barycentric_subdivision(complex_: SimplicialComplex) -> Subdivision:
    check_face_budget(subdivision_face_count(complex_))
    ordered = complex_.ordered_simplices()
    vertex_of = {s: i for i, s in enumerate(ordered)}
    chains: Dict[Simplex, List[Simplex]] = {}
    simplices = set()
    for sigma in ordered:
        mine = [(vertex_of[sigma],)]
        for face in all_faces(sigma):
            if face != sigma:
                mine.extend(c + (vertex_of[sigma],) for c in chains[face])
        chains[sigma] = mine
        simplices.update(mine)
    carrier = {i: s for s, i in vertex_of.items()}
    result = SimplicialComplex(frozenset(simplices))
    logger.debug(f"Subdivided complex with f-vector {complex_.f_vector()} "
                 f"into f-vector {result.f_vector()}")
    return Subdivision(complex_, result, carrier, vertex_of)


@dataclass
class IteratedSubdivision:
    """sd^r K with carriers into K and the composite chain map."""
    base: SimplicialComplex
    depth: int
    steps: List[Subdivision]

    @property
    def complex(self) -> SimplicialComplex:
        return self.steps[-1].complex if self.steps else self.base

    @cached_property
    def carrier(self) -> Dict[int, Simplex]:
        carrier = {v: (v,) for v in self.base.vertices}
        for step in self.steps:
            carrier = {w: _union_carrier(carrier, s) for w, s in step.carrier.items()}
        return carrier

    def simplex_carrier(self, tau: Simplex) -> Simplex:
        return _union_carrier(self.carrier, tau)

    def carried_by(self, sub: SimplicialComplex) -> SimplicialComplex:
        return SimplicialComplex(frozenset(
            t for t in self.complex.simplices if self.simplex_carrier(t) in sub.simplices))

    def chain_map(self, n: int) -> Dict[Simplex, Dict[Simplex, int]]:
        current = {s: {s: 1} for s in self.base.simplices_of_dim(n)}
        for step in self.steps:
            step_map = step.chain_map(n)
            updated = {}
            for sigma, chain in current.items():
                combined: Dict[Simplex, int] = {}
                for tau, c in chain.items():
                    for rho, d in step_map[tau].items():
                        combined[rho] = combined.get(rho, 0) + c * d
                updated[sigma] = {k: v for k, v in combined.items() if v}
            current = updated
        return current

    def last_vertex_map(self) -> SimplicialMap:
        result = SimplicialMap.identity(self.base)
        for step in self.steps:
            result = result.compose(step.last_vertex_map())
        return result


def _union_carrier(carrier: Mapping[int, Simplex], simplex: Iterable[int]) -> Simplex:
    vertices = set()
    for v in simplex:
        vertices.update(carrier[v])
    return tuple(sorted(vertices))


def subdivide(complex_: SimplicialComplex, depth: int) -> IteratedSubdivision:
    steps = []
    current = complex_
    for _ in range(depth):
        step = barycentric_subdivision(current)
        steps.append(step)
        current = step.complex
    return IteratedSubdivision(complex_, depth, steps)


# products

@dataclass
class Prism:
    """K x [0, 1] with vertex (v, t) labelled 2v + t."""
    base: SimplicialComplex
    complex: SimplicialComplex

    def bottom(self) -> SimplicialMap:
        return SimplicialMap(self.base, self.complex, {v: 2 * v for v in self.base.vertices})

    def top(self) -> SimplicialMap:
        return SimplicialMap(self.base, self.complex, {v: 2 * v + 1 for v in self.base.vertices})


def prism(complex_: SimplicialComplex) -> Prism:
    maximal = []
    for sigma in complex_.maximal_simplices():
        for i in range(len(sigma)):
            maximal.append(tuple(2 * v for v in sigma[:i + 1]) + tuple(2 * v + 1 for v in sigma[i:]))
    return Prism(complex_, SimplicialComplex.from_maximal(maximal))
