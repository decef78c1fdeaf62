"""
Abelian extensions through symmetric 2-cocycles.

A symmetric cocycle c: B x B → A describes the extension
0 → A → B x_c A → B → 0 with (b, a) + (b', a') = (b + b', a + a' + c(b, b')).
The classes of such tables modulo coboundaries form Ext¹(B, A). The
functions here take their arguments in two orders:

  cocycle_ext_group(A, B)      tables B x B → A (coefficients first)
  cocycle_ext_classical(A, B)  Ext¹(A, B) in the usual order, i.e. tables A x A → B

For finite groups both agree with ext_group up to isomorphism.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import sympy

from .config import get_config
from .errors import BudgetExceededError, ConsistencyError, ValidationError
from .exact_abelian import (FpGroup, GroupHom, Subgroup, Subquotient, direct_sum,
                            ext_functorial, ext_group, quotient_of_subgroups)
from .intmatrix import IntMatrix, Vector, smith_normal_form

logger = logging.getLogger(__name__)

Pair = Tuple[Vector, Vector]


@dataclass
class SymmetricCocycle:
    """Table c: B x B → A in canonical coordinates of both groups."""
    coefficients: FpGroup
    domain: FpGroup
    values: Dict[Pair, Vector] = field(default_factory=dict)

    def value(self, x: Vector, y: Vector) -> Vector:
        return self.values[(tuple(x), tuple(y))]

    def _relation_failures(self) -> Iterable[Tuple[str, tuple]]:
        a, b = self.coefficients, self.domain
        elements = list(b.elements())
        zero = elements[0]
        for x in elements:
            if self.value(x, zero) != self.value(zero, x):
                yield ("normalization", (x,))
        for x, y in itertools.combinations(elements, 2):
            if self.value(x, y) != self.value(y, x):
                yield ("symmetry", (x, y))
        for x, y, z in itertools.product(elements, repeat=3):
            left = a.add(self.value(x, y), self.value(b.add(x, y), z))
            right = a.add(self.value(x, b.add(y, z)), self.value(y, z))
            if left != right:
                yield ("cocycle", (x, y, z))

    def is_cocycle(self) -> bool:
        return next(iter(self._relation_failures()), None) is None

    def __add__(self, other: "SymmetricCocycle") -> "SymmetricCocycle":
        """Baer sum at the level of tables."""
        if other.coefficients != self.coefficients or other.domain != self.domain:
            raise ValidationError("Baer sum of cocycles over different groups",
                                  invariant="ambient")
        a = self.coefficients
        return SymmetricCocycle(a, self.domain,
                                {k: a.add(v, other.values[k]) for k, v in self.values.items()})

    @classmethod
    def coboundary_of(cls, coefficients: FpGroup, domain: FpGroup,
                      h: Dict[Vector, Vector]) -> "SymmetricCocycle":
        """δh(x, y) = h(x) + h(y) - h(x + y)."""
        a, b = coefficients, domain
        values = {}
        for x, y in itertools.product(b.elements(), repeat=2):
            values[(x, y)] = a.add(a.add(h[x], h[y]), a.negate(h[b.add(x, y)]))
        return cls(a, b, values)

    @classmethod
    def zero(cls, coefficients: FpGroup, domain: FpGroup) -> "SymmetricCocycle":
        z = (0,) * coefficients.canonical_rank
        return cls(coefficients, domain,
                   {p: z for p in itertools.product(domain.elements(), repeat=2)})


@dataclass
class CocycleExt:
    """Cocycle classes modulo coboundaries, one cyclic coefficient at a time."""
    coefficients: FpGroup
    domain: FpGroup
    group: FpGroup
    representatives: List[SymmetricCocycle]
    method: str
    _pieces: List[Subquotient] = field(default_factory=list, repr=False)
    _pairs: List[Pair] = field(default_factory=list, repr=False)

    def class_of(self, cocycle: SymmetricCocycle) -> Vector:
        """Canonical element of `group` for a cocycle table."""
        coords: List[int] = []
        for i, piece in enumerate(self._pieces):
            vector = [cocycle.values[p][i] for p in self._pairs]
            coords.extend(piece.class_of(vector))
        return self.group.reduce(coords)

    def is_coboundary(self, cocycle: SymmetricCocycle) -> bool:
        return not any(self.class_of(cocycle))

    def table_of(self, element: Sequence[int]) -> SymmetricCocycle:
        """A representative table of a canonical element of `group`."""
        v = self.group.lift(element)
        a = self.coefficients
        offset = 0
        per_coordinate = []
        for piece in self._pieces:
            k = piece.group.generator_count
            per_coordinate.append(piece.representative(v[offset:offset + k]))
            offset += k
        values = {}
        for index, pair in enumerate(self._pairs):
            raw = tuple(rep[index] for rep in per_coordinate)
            values[pair] = tuple(x % d for x, d in zip(raw, a.moduli))
        return SymmetricCocycle(a, self.domain, values)


def _require_finite(group: FpGroup, role: str) -> None:
    if not group.is_finite:
        raise ValidationError(f"{role} group must be finite", invariant="finite-group",
                              witness=str(group))


def _equation_matrix(domain: FpGroup) -> Tuple[List[Pair], IntMatrix, IntMatrix]:
    """Integer matrices of the cocycle relations and of the coboundary map.

    Returns the ordered pairs (the unknowns), the relation matrix Φ with one
    row per distinct nonzero relation, and the coboundary matrix Δ from
    functions on B to tables.
    """
    b = domain
    elements = list(b.elements())
    index = {x: i for i, x in enumerate(elements)}
    pairs = [(x, y) for x in elements for y in elements]
    n = len(elements)

    def unknown(x, y):
        return index[x] * n + index[y]

    rows = set()

    def add_row(terms):
        row = [0] * (n * n)
        for position, sign in terms:
            row[position] += sign
        if any(row):
            rows.add(tuple(row))

    zero = elements[0]
    for x in elements:
        add_row([(unknown(x, zero), 1), (unknown(zero, x), -1)])
    for x, y in itertools.combinations(elements, 2):
        add_row([(unknown(x, y), 1), (unknown(y, x), -1)])
    for x, y, z in itertools.product(elements, repeat=3):
        add_row([(unknown(x, y), 1), (unknown(b.add(x, y), z), 1),
                 (unknown(x, b.add(y, z)), -1), (unknown(y, z), -1)])
    phi = IntMatrix.from_rows(sorted(rows), n * n)

    delta_rows = []
    for x, y in pairs:
        row = [0] * n
        row[index[x]] += 1
        row[index[y]] += 1
        row[index[b.add(x, y)]] -= 1
        delta_rows.append(row)
    delta = IntMatrix.from_rows(delta_rows, n)
    return pairs, phi, delta


def _cyclic_piece(modulus: int, phi_smith, delta: IntMatrix, unknowns: int) -> Subquotient:
    """Cocycles mod coboundaries with coefficients Z/modulus."""
    ambient = FpGroup.from_invariants([modulus] * unknowns)
    diag = phi_smith.diagonal
    cocycles = []
    for j in range(unknowns):
        d = diag[j] if j < len(diag) else 0
        factor = modulus // math.gcd(d, modulus)
        column = phi_smith.V.column(j)
        cocycles.append(tuple(factor * x for x in column))
    big = Subgroup(ambient, tuple(cocycles))
    small = Subgroup(ambient, tuple(delta.columns()))
    return quotient_of_subgroups(big, small)


def _span_generators(group: FpGroup, elements: Iterable[Vector]) -> List[Vector]:
    """Greedy generating set of the subgroup spanned by explicit canonical elements."""
    span = {(0,) * group.canonical_rank}
    generators = []
    for element in elements:
        if element in span:
            continue
        generators.append(element)
        order = group.element_order(element)
        multiples = [group.multiple(element, k) for k in range(order)]
        span = {group.add(s, m) for s in span for m in multiples}
    return generators


def _enumerated_piece(coefficients: FpGroup, domain: FpGroup, pairs: List[Pair],
                      delta: IntMatrix, budget: int) -> Tuple[List[Subquotient], int]:
    """Literal enumeration of all tables; returns per-coordinate subquotients."""
    a = coefficients
    size = (a.order or 0) ** len(pairs)
    if size > budget:
        raise BudgetExceededError("cocycle table enumeration exceeds the budget",
                                  required=size, budget=budget)
    table_group = direct_sum([a.canonical_group()] * len(pairs))
    found = []
    for values in itertools.product(list(a.elements()), repeat=len(pairs)):
        table = SymmetricCocycle(a, domain, dict(zip(pairs, values)))
        if table.is_cocycle():
            found.append(tuple(x for value in values for x in value))
    logger.debug(f"Enumerated {size} tables, {len(found)} cocycles")
    # coordinates of table_group run pair by pair: coordinate i of pair p sits at p * q + i
    flat = [table_group.reduce(v) for v in found]
    generators = _span_generators(table_group, flat)
    q = a.canonical_rank
    pieces = []
    for i, modulus in enumerate(a.moduli):
        ambient = FpGroup.from_invariants([modulus] * len(pairs))
        big = Subgroup(ambient, tuple(tuple(table_group.lift(g)[p * q + i]
                                            for p in range(len(pairs)))
                                      for g in generators))
        small = Subgroup(ambient, tuple(delta.columns()))
        pieces.append(quotient_of_subgroups(big, small))
    return pieces, len(found)


def cocycle_ext_group(coefficients: FpGroup, domain: FpGroup, method: str = "linear",
                      budget: Optional[int] = None) -> CocycleExt:
    """Symmetric cocycles domain x domain → coefficients modulo coboundaries.

    method="linear" solves the three relations exactly as an integer system;
    method="enumerate" walks every table and is limited by the enumeration
    budget, reporting the number of tables it would need.
    """
    _require_finite(coefficients, "coefficient")
    _require_finite(domain, "domain")
    budget = get_config().enumeration_budget() if budget is None else budget
    a = coefficients
    pairs, phi, delta = _equation_matrix(domain)
    system_size = phi.rows * phi.cols
    if method == "linear":
        if system_size > budget:
            raise BudgetExceededError("cocycle relation system exceeds the budget",
                                      required=system_size, budget=budget)
        phi_smith = smith_normal_form(phi)
        pieces = [_cyclic_piece(d, phi_smith, delta, len(pairs)) for d in a.moduli]
    elif method == "enumerate":
        pieces, _ = _enumerated_piece(a, domain, pairs, delta, budget)
    else:
        raise ValidationError(f"unknown method {method!r}", invariant="cocycle-method")

    group = direct_sum([p.group for p in pieces])
    result = CocycleExt(a, domain, group, [], method, pieces, pairs)
    if not group.is_finite:
        raise ConsistencyError("cocycle classes of finite groups form an infinite group")
    result.representatives = [result.table_of(e) for e in group.elements()]
    for table in result.representatives:
        if not table.is_cocycle():
            raise ConsistencyError("class representative violates the cocycle relations")
    logger.debug(f"Cocycle Ext with coefficients {a} over {domain}: {group}")
    return result


def cocycle_ext_classical(source: FpGroup, coefficients: FpGroup, method: str = "linear",
                          budget: Optional[int] = None) -> CocycleExt:
    """Ext¹(source, coefficients): extensions 0 → coefficients → E → source → 0."""
    return cocycle_ext_group(coefficients, source, method=method, budget=budget)


def invariants_from_element_orders(elements: List, add, zero, order: int) -> Tuple[int, ...]:
    """Torsion coefficients of a finite abelian group given by its addition law."""

    def times(x, n):
        result = zero
        for _ in range(n):
            result = add(result, x)
        return result

    partitions: Dict[int, List[int]] = {}
    for p, exponent in sympy.factorint(order).items():
        counts = [1]
        for k in range(1, exponent + 1):
            counts.append(sum(1 for x in elements if times(x, p ** k) == zero))
        # number of cyclic p-factors of order at least p^k
        at_least = [round(math.log(counts[k] // counts[k - 1], p)) for k in range(1, exponent + 1)]
        exponents = []
        for k in range(exponent, 0, -1):
            higher = at_least[k] if k < exponent else 0
            exponents.extend([k] * (at_least[k - 1] - higher))
        partitions[p] = sorted(exponents, reverse=True)
    width = max((len(v) for v in partitions.values()), default=0)
    factors = [1] * width
    for p, exponents in partitions.items():
        for i, e in enumerate(exponents):
            factors[i] *= p ** e
    return tuple(sorted(f for f in factors if f > 1))


def extension_group_of(cocycle: SymmetricCocycle) -> FpGroup:
    """Canonical form of the middle group B x_c A of the extension."""
    a, b = cocycle.coefficients, cocycle.domain
    if not cocycle.is_cocycle():
        raise ValidationError("table is not a symmetric cocycle", invariant="cocycle")
    elements = [(x, y) for x in b.elements() for y in a.elements()]
    b_zero = (0,) * b.canonical_rank
    identity = (b_zero, a.negate(cocycle.value(b_zero, b_zero)))

    def add(u, v):
        return (b.add(u[0], v[0]), a.add(a.add(u[1], v[1]), cocycle.value(u[0], v[0])))

    torsion = invariants_from_element_orders(elements, add, identity, len(elements))
    return FpGroup.from_invariants(torsion)


@dataclass
class AutOrbits:
    group: FpGroup
    ext: FpGroup
    automorphism_count: int
    orbits: List[List[Vector]]

    @property
    def orbit_count(self) -> int:
        return len(self.orbits)

    @property
    def sizes(self) -> List[int]:
        return sorted(len(o) for o in self.orbits)


def automorphisms(group: FpGroup, budget: Optional[int] = None) -> List[IntMatrix]:
    """All automorphisms of a finite group, as matrices in canonical coordinates."""
    _require_finite(group, "automorphism")
    budget = get_config().enumeration_budget() if budget is None else budget
    moduli = group.moduli
    t = len(moduli)
    choices = []
    for j in range(t):
        for i in range(t):
            g = math.gcd(moduli[i], moduli[j])
            step = moduli[j] // g
            choices.append([m * step for m in range(g)])
    size = math.prod(len(c) for c in choices)
    if size > budget:
        raise BudgetExceededError("endomorphism enumeration exceeds the budget",
                                  required=size, budget=budget)
    elements = list(group.elements())
    result = []
    for entries in itertools.product(*choices):
        rows = [entries[j * t:(j + 1) * t] for j in range(t)]
        images = {tuple(sum(r[i] * x[i] for i in range(t)) % moduli[j] for j, r in enumerate(rows))
                  for x in elements}
        if len(images) == len(elements):
            result.append(IntMatrix.from_rows(rows, t))
    logger.debug(f"Aut({group}) has {len(result)} elements out of {size} endomorphisms")
    return result


def aut_orbits_on_ext(group: FpGroup, budget: Optional[int] = None) -> AutOrbits:
    """Orbits of Aut(A) acting on Ext¹(A, Z) for finite A."""
    _require_finite(group, "orbit")
    canonical = group.canonical_group()
    integers = FpGroup.free(1)
    ext = ext_group(canonical, integers)
    autos = automorphisms(canonical, budget)
    actions = [ext_functorial(GroupHom(canonical, canonical, f), integers, ext, ext) for f in autos]

    remaining = set(ext.group.elements())
    orbits = []
    for start in sorted(remaining):
        if start not in remaining:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for action in actions:
                y = action.apply_canonical(x)
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        remaining -= orbit
        orbits.append(sorted(orbit))
    if sum(len(o) for o in orbits) != ext.group.order:
        raise ConsistencyError("orbits do not partition Ext")
    return AutOrbits(group, ext.group, len(autos), orbits)
