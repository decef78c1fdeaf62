"""
Finitely presented abelian groups with exact arithmetic.

An FpGroup is Z^k modulo the column span of a k x r relation matrix. Its
canonical form (free rank plus torsion coefficients d_1 | d_2 | ...) and the
reduction of elements to canonical coordinates both come from one Smith
decomposition of the relation matrix, computed lazily and cached.

Canonical coordinates list the torsion coordinates first, in divisibility
order, followed by the free coordinates.
"""

import itertools
import logging
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, List, Optional, Sequence, Tuple

from .errors import AmbientMismatchError, InvalidMapError, ValidationError
from .intmatrix import (IntMatrix, SmithDecomposition, Vector, block_diagonal,
                        hermite_normal_form, smith_normal_form)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FpGroup:
    """Z^generator_count / colspan(relations)."""
    generator_count: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.rows != self.generator_count:
            raise ValidationError(
                "relation matrix must have one row per generator",
                invariant="presentation-shape",
                witness=(self.generator_count, self.relations.rows))

    # construction

    @classmethod
    def free(cls, rank: int) -> "FpGroup":
        return cls(rank, IntMatrix.zeros(rank, 0))

    @classmethod
    def trivial(cls) -> "FpGroup":
        return cls.free(0)

    @classmethod
    def cyclic(cls, n: int) -> "FpGroup":
        """Z/n; n = 0 gives Z."""
        return cls.from_invariants([n] if n else [], 0 if n else 1)

    @classmethod
    def from_invariants(cls, torsion: Sequence[int], free_rank: int = 0) -> "FpGroup":
        k = len(torsion) + free_rank
        columns = []
        for i, d in enumerate(torsion):
            if d < 1:
                raise ValidationError("torsion coefficient must be positive",
                                      invariant="torsion-coefficient", witness=d)
            column = [0] * k
            column[i] = d
            columns.append(column)
        return cls(k, IntMatrix.from_columns(columns, k))

    @classmethod
    def parse(cls, literal: str) -> "FpGroup":
        return parse_group_literal(literal)

    # canonical form

    @cached_property
    def smith(self) -> SmithDecomposition:
        return smith_normal_form(self.relations)

    @cached_property
    def _kept(self) -> Tuple[Tuple[int, int], ...]:
        """(index, modulus) for each surviving SNF coordinate; modulus 0 is free."""
        diag = self.smith.diagonal
        kept = []
        for i in range(self.generator_count):
            d = diag[i] if i < len(diag) else 0
            if d != 1:
                kept.append((i, d))
        return tuple(kept)

    @property
    def moduli(self) -> Tuple[int, ...]:
        return tuple(d for _, d in self._kept)

    @property
    def torsion(self) -> Tuple[int, ...]:
        return tuple(d for d in self.moduli if d)

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.moduli if d == 0)

    @property
    def canonical_rank(self) -> int:
        return len(self._kept)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return not self._kept

    @property
    def order(self) -> Optional[int]:
        """Group order, or None when infinite."""
        if not self.is_finite:
            return None
        return math.prod(self.torsion)

    def canonical_group(self) -> "FpGroup":
        return FpGroup.from_invariants(self.torsion, self.free_rank)

    def is_isomorphic(self, other: "FpGroup") -> bool:
        return self.torsion == other.torsion and self.free_rank == other.free_rank

    def invariants(self) -> Tuple[Tuple[int, ...], int]:
        return (self.torsion, self.free_rank)

    # elements

    def zero(self) -> Vector:
        return (0,) * self.generator_count

    def basis_vector(self, i: int) -> Vector:
        return tuple(1 if j == i else 0 for j in range(self.generator_count))

    def reduce(self, x: Sequence[int]) -> Vector:
        """Canonical coordinates of the element represented by x."""
        if len(x) != self.generator_count:
            raise ValidationError("element has the wrong number of coordinates",
                                  invariant="element-shape",
                                  witness=(len(x), self.generator_count))
        y = self.smith.U.apply(x)
        return tuple(y[i] % d if d else y[i] for i, d in self._kept)

    def lift(self, c: Sequence[int]) -> Vector:
        """A vector in generator coordinates representing canonical element c."""
        if len(c) != self.canonical_rank:
            raise ValidationError("canonical element has the wrong length",
                                  invariant="element-shape",
                                  witness=(len(c), self.canonical_rank))
        y = [0] * self.generator_count
        for (i, _), value in zip(self._kept, c):
            y[i] = value
        return self.smith.U_inv.apply(y)

    def canonical_generator(self, j: int) -> Vector:
        return self.lift(tuple(1 if i == j else 0 for i in range(self.canonical_rank)))

    def is_zero(self, x: Sequence[int]) -> bool:
        return not any(self.reduce(x))

    def equal(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return self.is_zero([a - b for a, b in zip(x, y)])

    def add(self, c1: Sequence[int], c2: Sequence[int]) -> Vector:
        """Sum of two canonical elements, in canonical coordinates."""
        return tuple((a + b) % d if d else a + b for a, b, d in zip(c1, c2, self.moduli))

    def negate(self, c: Sequence[int]) -> Vector:
        return tuple((-a) % d if d else -a for a, d in zip(c, self.moduli))

    def multiple(self, c: Sequence[int], n: int) -> Vector:
        return tuple((n * a) % d if d else n * a for a, d in zip(c, self.moduli))

    def element_order(self, c: Sequence[int]) -> int:
        """Order of a canonical element; 0 for elements of infinite order."""
        order = 1
        for a, d in zip(c, self.moduli):
            if d == 0:
                if a:
                    return 0
            else:
                order = math.lcm(order, d // math.gcd(a, d))
        return order

    def elements(self) -> Iterator[Vector]:
        """All canonical elements of a finite group, in lexicographic order."""
        if not self.is_finite:
            raise ValidationError("cannot enumerate an infinite group",
                                  invariant="finite-group", witness=str(self))
        return iter(itertools.product(*(range(d) for d in self.moduli)))

    def __str__(self) -> str:
        return format_group(self.torsion, self.free_rank)


def format_group(torsion: Sequence[int], free_rank: int) -> str:
    terms = []
    if free_rank == 1:
        terms.append("Z")
    elif free_rank > 1:
        terms.append(f"Z^{free_rank}")
    terms.extend(f"Z/{d}" for d in torsion)
    return " + ".join(terms) if terms else "0"


_TERM = re.compile(r'^(?:Z(?:\^(\d+)|/(\d+))?|0)$')


def parse_group_literal(literal: str) -> FpGroup:
    """Parse `Z`, `Z/n`, `Z^k` and `+`-separated sums of them (`0` is trivial)."""
    torsion: List[int] = []
    free_rank = 0
    text = literal.strip()
    if not text:
        raise ValidationError("empty group literal", invariant="group-literal", witness=literal)
    for term in text.split('+'):
        term = term.replace(' ', '')
        match = _TERM.match(term)
        if not match:
            raise ValidationError(f"bad group term {term!r}", invariant="group-literal",
                                  witness=literal)
        if term == '0':
            continue
        power, modulus = match.group(1), match.group(2)
        if modulus is not None:
            n = int(modulus)
            if n == 0:
                raise ValidationError("Z/0 is not allowed; write Z", invariant="group-literal",
                                      witness=literal)
            torsion.append(n)
        else:
            free_rank += int(power) if power is not None else 1
    return FpGroup.from_invariants(torsion, free_rank)


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by a matrix on generators (target.k x source.k)."""
    source: FpGroup
    target: FpGroup
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.generator_count, self.source.generator_count):
            raise InvalidMapError("homomorphism matrix has the wrong shape",
                                  invariant="hom-shape", witness=self.matrix.shape)
        for j, relator in enumerate(self.source.relations.columns()):
            if not self.target.is_zero(self.matrix.apply(relator)):
                raise InvalidMapError("relator does not map into the target relations",
                                      invariant="hom-well-defined", witness=j)

    @classmethod
    def identity(cls, group: FpGroup) -> "GroupHom":
        return cls(group, group, IntMatrix.identity(group.generator_count))

    @classmethod
    def zero(cls, source: FpGroup, target: FpGroup) -> "GroupHom":
        return cls(source, target, IntMatrix.zeros(target.generator_count, source.generator_count))

    def apply(self, x: Sequence[int]) -> Vector:
        return self.matrix.apply(x)

    def apply_canonical(self, c: Sequence[int]) -> Vector:
        return self.target.reduce(self.matrix.apply(self.source.lift(c)))

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self ∘ inner."""
        if inner.target != self.source:
            raise AmbientMismatchError("composition of non-composable homomorphisms",
                                       invariant="hom-compose")
        return GroupHom(inner.source, self.target, self.matrix @ inner.matrix)

    def canonical_matrix(self) -> IntMatrix:
        """Matrix in canonical coordinates, entries reduced."""
        columns = [self.apply_canonical(tuple(1 if i == j else 0
                                              for i in range(self.source.canonical_rank)))
                   for j in range(self.source.canonical_rank)]
        return IntMatrix.from_columns(columns, self.target.canonical_rank)

    def equals(self, other: "GroupHom") -> bool:
        if self.source != other.source or self.target != other.target:
            return False
        return all(self.target.is_zero(a) for a in (self.matrix - other.matrix).columns())

    def is_zero(self) -> bool:
        return all(self.target.is_zero(col) for col in self.matrix.columns())

    def is_isomorphism(self) -> bool:
        return kernel(self).as_group().is_trivial and cokernel(self).is_trivial


@dataclass(frozen=True)
class Subgroup:
    """Subgroup of an FpGroup generated by vectors in generator coordinates."""
    ambient: FpGroup
    generators: Tuple[Vector, ...] = field(default_factory=tuple)

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        if any(len(g) != self.ambient.generator_count for g in gens):
            raise ValidationError("subgroup generator has the wrong length",
                                  invariant="element-shape")
        object.__setattr__(self, 'generators', gens)

    @property
    def generator_matrix(self) -> IntMatrix:
        return IntMatrix.from_columns(self.generators, self.ambient.generator_count)

    @cached_property
    def _span(self) -> SmithDecomposition:
        return smith_normal_form(self.generator_matrix.hstack(self.ambient.relations))

    def coordinates(self, x: Sequence[int]) -> Optional[Vector]:
        """c with x = Σ c_j g_j modulo relations, or None if x is not in the subgroup."""
        z = self._span.solve(x)
        if z is None:
            return None
        return z[:len(self.generators)]

    def contains(self, x: Sequence[int]) -> bool:
        return self._span.solve(x) is not None

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        _check_ambient(self, other)
        return all(other.contains(g) for g in self.generators)

    def normalized_generators(self) -> Tuple[Vector, ...]:
        """Hermite basis of the subgroup's lattice in canonical coordinates.

        Torsion coordinates include the lattice d_i Z, so two subgroups of the
        same ambient group are equal exactly when these tuples are equal.
        """
        q = self.ambient.canonical_rank
        rows = [self.ambient.reduce(g) for g in self.generators]
        for i, d in enumerate(self.ambient.moduli):
            if d:
                rows.append(tuple(d if j == i else 0 for j in range(q)))
        return hermite_normal_form(IntMatrix.from_rows(rows, q)).data

    def as_group(self) -> FpGroup:
        """The subgroup as an abstract group on its own generators."""
        s = len(self.generators)
        relations = [z[:s] for z in self._span.kernel_basis()]
        return FpGroup(s, IntMatrix.from_columns(relations, s))

    def inclusion(self) -> GroupHom:
        return GroupHom(self.as_group(), self.ambient, self.generator_matrix)

    @property
    def order(self) -> Optional[int]:
        return self.as_group().order

    def is_trivial(self) -> bool:
        return all(self.ambient.is_zero(g) for g in self.generators)

    def image_under(self, h: GroupHom) -> "Subgroup":
        if h.source != self.ambient:
            raise AmbientMismatchError("subgroup is not in the homomorphism source",
                                       invariant="ambient")
        return Subgroup(h.target, tuple(h.apply(g) for g in self.generators))

    def preimage_under(self, h: GroupHom) -> "Subgroup":
        if h.target != self.ambient:
            raise AmbientMismatchError("subgroup is not in the homomorphism target",
                                       invariant="ambient")
        k = h.source.generator_count
        big = h.matrix.hstack(self.generator_matrix, self.ambient.relations)
        basis = smith_normal_form(big).kernel_basis()
        return Subgroup(h.source, tuple(z[:k] for z in basis))

    @classmethod
    def whole(cls, group: FpGroup) -> "Subgroup":
        return cls(group, tuple(group.basis_vector(i) for i in range(group.generator_count)))

    @classmethod
    def trivial(cls, group: FpGroup) -> "Subgroup":
        return cls(group, ())


def _check_ambient(s1: Subgroup, s2: Subgroup) -> None:
    if s1.ambient != s2.ambient:
        raise AmbientMismatchError("subgroups live in different ambient groups",
                                   invariant="ambient")


# subgroup calculus

def kernel(h: GroupHom) -> Subgroup:
    k = h.source.generator_count
    basis = smith_normal_form(h.matrix.hstack(h.target.relations)).kernel_basis()
    return Subgroup(h.source, tuple(z[:k] for z in basis))


def image(h: GroupHom) -> Subgroup:
    return Subgroup(h.target, tuple(h.matrix.columns()))


def cokernel(h: GroupHom) -> FpGroup:
    return FpGroup(h.target.generator_count, h.target.relations.hstack(h.matrix))


def intersect(s1: Subgroup, s2: Subgroup) -> Subgroup:
    """s1 ∩ s2 via the kernel of (a, b) ↦ G1 a - G2 b on the product."""
    _check_ambient(s1, s2)
    n1 = len(s1.generators)
    big = s1.generator_matrix.hstack(s2.generator_matrix, s1.ambient.relations)
    basis = smith_normal_form(big).kernel_basis()
    g1 = s1.generator_matrix
    return Subgroup(s1.ambient, tuple(g1.apply(z[:n1]) for z in basis))


def quotient(group: FpGroup, sub: Subgroup) -> FpGroup:
    if sub.ambient != group:
        raise AmbientMismatchError("subgroup is not in the given group", invariant="ambient")
    return FpGroup(group.generator_count, group.relations.hstack(sub.generator_matrix))


def subgroup_equal(s1: Subgroup, s2: Subgroup) -> bool:
    _check_ambient(s1, s2)
    return s1.normalized_generators() == s2.normalized_generators()


@dataclass
class Subquotient:
    """big / small for subgroups small ⊆ big of one ambient group."""
    big: Subgroup
    small: Subgroup
    group: FpGroup

    def class_of(self, x: Sequence[int]) -> Vector:
        """Generator coordinates in `group` of an ambient element of `big`."""
        c = self.big.coordinates(x)
        if c is None:
            raise ValidationError("element is not in the numerator subgroup",
                                  invariant="subquotient-membership", witness=tuple(x))
        return c

    def representative(self, v: Sequence[int]) -> Vector:
        """An ambient element representing the class with generator coordinates v."""
        return self.big.generator_matrix.apply(v)


def quotient_of_subgroups(big: Subgroup, small: Subgroup) -> Subquotient:
    _check_ambient(big, small)
    s = len(big.generators)
    columns = [z[:s] for z in big._span.kernel_basis()]
    for g in small.generators:
        c = big.coordinates(g)
        if c is None:
            raise ValidationError("denominator is not contained in the numerator",
                                  invariant="subquotient-containment", witness=g)
        columns.append(c)
    group = FpGroup(s, IntMatrix.from_columns(columns, s))
    return Subquotient(big, small, group)


# sums and colimits

def direct_sum(groups: Sequence[FpGroup]) -> FpGroup:
    k = sum(g.generator_count for g in groups)
    if not groups:
        return FpGroup.trivial()
    return FpGroup(k, block_diagonal([g.relations for g in groups]))


def _insertion_matrix(total: int, offset: int, k: int) -> IntMatrix:
    return IntMatrix.from_rows([[1 if i == offset + j else 0 for j in range(k)]
                                for i in range(total)], k)


@dataclass
class ChainColimit:
    group: FpGroup
    insertions: List[GroupHom]


def chain_colimit(groups: Sequence[FpGroup], maps: Sequence[GroupHom]) -> ChainColimit:
    """Colimit of G_0 → G_1 → ... → G_N as ⊕ G_i modulo x - φ_i(x)."""
    if len(maps) != len(groups) - 1:
        raise ValidationError("a chain of N+1 groups needs N maps", invariant="chain-shape",
                              witness=(len(groups), len(maps)))
    for i, phi in enumerate(maps):
        if phi.source != groups[i] or phi.target != groups[i + 1]:
            raise AmbientMismatchError("chain map does not match consecutive groups",
                                       invariant="chain-shape", witness=i)
    offsets = list(itertools.accumulate([0] + [g.generator_count for g in groups]))
    total = offsets[-1]
    summed = direct_sum(groups)
    columns = list(summed.relations.columns())
    for i, phi in enumerate(maps):
        for j in range(groups[i].generator_count):
            column = [0] * total
            column[offsets[i] + j] += 1
            for r, value in enumerate(phi.matrix.column(j)):
                column[offsets[i + 1] + r] -= value
            columns.append(column)
    colimit = FpGroup(total, IntMatrix.from_columns(columns, total))
    insertions = [GroupHom(g, colimit, _insertion_matrix(total, offsets[i], g.generator_count))
                  for i, g in enumerate(groups)]
    logger.debug(f"Colimit of a chain of {len(groups)} groups: {colimit}")
    return ChainColimit(colimit, insertions)


# Hom and Ext

@dataclass
class HomGroup:
    """Hom(A, B) with a decoder from group elements to homomorphisms."""
    source: FpGroup
    target: FpGroup
    group: FpGroup
    pairs: List[Tuple[int, int, int]]  # (source coord, target coord, scale factor)

    def _projection(self) -> IntMatrix:
        a = self.source
        return IntMatrix.from_rows([a.smith.U.row(i) for i, _ in a._kept], a.generator_count)

    def _section(self) -> IntMatrix:
        b = self.target
        return IntMatrix.from_columns([b.smith.U_inv.column(i) for i, _ in b._kept],
                                      b.generator_count)

    def decode(self, v: Sequence[int]) -> GroupHom:
        """The homomorphism represented by v (generator coordinates of `group`)."""
        if len(v) != len(self.pairs):
            raise ValidationError("Hom element has the wrong length", invariant="element-shape",
                                  witness=len(v))
        qa, qb = self.source.canonical_rank, self.target.canonical_rank
        h = [[0] * qa for _ in range(qb)]
        for value, (i, j, factor) in zip(v, self.pairs):
            h[j][i] += value * factor
        h_can = IntMatrix.from_rows(h, qa)
        matrix = self._section() @ h_can @ self._projection()
        return GroupHom(self.source, self.target, matrix)

    def encode(self, hom: GroupHom) -> Vector:
        """Canonical element of `group` representing hom."""
        if hom.source != self.source or hom.target != self.target:
            raise AmbientMismatchError("homomorphism has the wrong source or target",
                                       invariant="ambient")
        h_can = hom.canonical_matrix()
        v = [h_can[j, i] // factor for i, j, factor in self.pairs]
        return self.group.reduce(v)


def hom_group(a: FpGroup, b: FpGroup) -> HomGroup:
    """Hom(A, B) summand by summand over the canonical decompositions."""
    pairs = []
    moduli = []
    for i, ai in enumerate(a.moduli):
        for j, bj in enumerate(b.moduli):
            if ai == 0:
                pairs.append((i, j, 1))
                moduli.append(bj)
            elif bj != 0:
                g = math.gcd(ai, bj)
                pairs.append((i, j, bj // g))
                moduli.append(g)
    n = len(pairs)
    columns = [[m if r == p else 0 for r in range(n)] for p, m in enumerate(moduli) if m]
    group = FpGroup(n, IntMatrix.from_columns(columns, n))
    logger.debug(f"Hom({a}, {b}) = {group}")
    return HomGroup(a, b, group, pairs)


def free_resolution(a: FpGroup) -> IntMatrix:
    """Injective F1 → F0 = Z^k with cokernel A: a basis of the relation lattice."""
    basis = a.smith.image_basis()
    return IntMatrix.from_columns(basis, a.generator_count)


def reduced_resolution(a: FpGroup) -> Tuple[FpGroup, IntMatrix]:
    """The diagonal resolution of A's canonical form: Z^t → Z^(t+f)."""
    canonical = a.canonical_group()
    return canonical, free_resolution(canonical)


@dataclass
class ExtGroup:
    source: FpGroup
    coefficients: FpGroup
    resolution: IntMatrix
    group: FpGroup


def _ext_from_resolution(a: FpGroup, b: FpGroup, resolution: IntMatrix) -> ExtGroup:
    r, l = resolution.cols, b.generator_count
    relations = block_diagonal([b.relations] * r) if r else IntMatrix.zeros(0, 0)
    phi = resolution.transpose().kron_identity(l)
    if r:
        presentation = FpGroup(r * l, relations.hstack(phi))
    else:
        presentation = FpGroup.trivial()
    return ExtGroup(a, b, resolution, presentation)


def ext_group(a: FpGroup, b: FpGroup, resolution: str = "kernel") -> ExtGroup:
    """Ext¹(A, B) = coker(Hom(F0, B) → Hom(F1, B)).

    resolution="kernel" resolves A's own presentation by a basis of its
    relation lattice; resolution="reduced" first passes to A's canonical form.
    The canonical form of the result does not depend on the choice.
    """
    if resolution == "kernel":
        result = _ext_from_resolution(a, b, free_resolution(a))
    elif resolution == "reduced":
        canonical, res = reduced_resolution(a)
        result = _ext_from_resolution(canonical, b, res)
        result.source = a
    else:
        raise ValidationError(f"unknown resolution {resolution!r}", invariant="resolution")
    logger.debug(f"Ext({a}, {b}) = {result.group}")
    return result


def ext_functorial(f: GroupHom, b: FpGroup, source_ext: Optional[ExtGroup] = None,
                   target_ext: Optional[ExtGroup] = None) -> GroupHom:
    """Ext¹(f, B): Ext¹(A', B) → Ext¹(A, B) for f: A → A'.

    Precomputed Ext groups of A' and A may be passed to avoid recomputation;
    they must come from ext_group with the default resolution.
    """
    source_ext = source_ext or ext_group(f.target, b)
    target_ext = target_ext or ext_group(f.source, b)
    res, res_prime = target_ext.resolution, source_ext.resolution
    lift = smith_normal_form(res_prime)
    f1_columns = []
    for column in res.columns():
        z = lift.solve(f.apply(column))
        if z is None:
            raise InvalidMapError("homomorphism does not respect the relation lattices",
                                  invariant="hom-well-defined")
        f1_columns.append(z)
    f1 = IntMatrix.from_columns(f1_columns, res_prime.cols)
    matrix = f1.transpose().kron_identity(b.generator_count)
    return GroupHom(source_ext.group, target_ext.group, matrix)
