"""
Obstruction theory for maps into the sphere models ∂Δ^{n+1}.

Maps are vertex maps on an iterated barycentric subdivision sd^r of their
domain. The basepoint of sphere_model(n) is the vertex n+1 and the
fundamental cocycle is the indicator u of the face (0, ..., n). Pushing
f^#u forward along the subdivision chain map gives an n-cochain P f^#u on
the unsubdivided complex; its coboundary is the obstruction cocycle and its
class is χ(f).
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Union

from .config import get_config
from .covers import CoverTower, cech_cohomology_truncated, star_condition_check
from .errors import (AgreementError, ConsistencyError, DimensionHypothesisError,
                     LevelIndexError, SubdivisionBudgetError, ValidationError)
from .exact_abelian import FpGroup
from .intmatrix import Vector, solve
from .simplicial import (CohomologyGroup, IteratedSubdivision, Prism, Simplex,
                         SimplicialComplex, SimplicialMap, SimplicialPair, boundary_complex,
                         boundary_faces, cochain_complex, complex_cohomology, degree,
                         fundamental_cocycle_simplex, homology_top_cycle, sphere_model, subdivide)

logger = logging.getLogger(__name__)

INTEGERS = FpGroup.free(1)


@dataclass
class SphereTarget:
    """sphere_model(n) with its fundamental cocycle."""
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("sphere targets need n >= 1", invariant="sphere-dim",
                                  witness=self.n)
        top = self.cohomology.group
        if top.invariants() != ((), 1) or abs(self.cohomology.encode(self.fundamental_cocycle)[0]) != 1:
            raise ConsistencyError(f"fundamental cocycle does not generate H^{self.n} of the model")

    @property
    def model(self) -> SimplicialComplex:
        return sphere_model(self.n)

    @property
    def basepoint(self) -> int:
        return self.n + 1

    @property
    def fundamental_simplex(self) -> Simplex:
        return fundamental_cocycle_simplex(self.n)

    @cached_property
    def cohomology(self) -> CohomologyGroup:
        return complex_cohomology(cochain_complex(SimplicialPair(self.model), INTEGERS), self.n)

    @cached_property
    def fundamental_cocycle(self) -> Vector:
        cc = self.cohomology.complex
        return cc.cochain(self.n, {self.fundamental_simplex: (1,)})


@dataclass
class SubdividedMap:
    """A simplicial map sd^depth(domain) → sphere_model(n)."""
    domain: SimplicialComplex
    n: int
    vertex_map: Dict[int, int]
    depth: int = 0
    budget: Optional[int] = None

    def __post_init__(self):
        budget = get_config().subdivision_budget() if self.budget is None else self.budget
        if self.depth > budget:
            raise SubdivisionBudgetError("map needs more barycentric subdivisions than allowed",
                                         required=self.depth, budget=budget)
        self.map = SimplicialMap(self.subdivision.complex, sphere_model(self.n), self.vertex_map)

    @classmethod
    def from_simplicial(cls, f: SimplicialMap, n: Optional[int] = None) -> "SubdividedMap":
        n = f.target.dimension if n is None else n
        if f.target != sphere_model(n):
            raise ValidationError("map target is not the sphere model", invariant="sphere-target",
                                  witness=n)
        return cls(f.source, n, dict(f.vertex_map), 0)

    @classmethod
    def constant(cls, domain: SimplicialComplex, n: int, vertex: Optional[int] = None) -> "SubdividedMap":
        vertex = n + 1 if vertex is None else vertex
        return cls(domain, n, {v: vertex for v in domain.vertices}, 0)

    @cached_property
    def subdivision(self) -> IteratedSubdivision:
        return subdivide(self.domain, self.depth)

    def chain_values(self, simplices: Sequence[Simplex]) -> Dict[Simplex, int]:
        """(P f^#u)(ρ) for the given n-simplices of the domain."""
        u = fundamental_cocycle_simplex(self.n)
        chains = self.subdivision.chain_map(self.n)
        values = {}
        for rho in simplices:
            total = 0
            for tau, coefficient in chains[rho].items():
                oriented = self.map.oriented_image(tau)
                if oriented is not None and oriented[0] == u:
                    total += coefficient * oriented[1]
            values[rho] = total
        return values

    def restricted_to(self, sub: SimplicialComplex) -> SimplicialMap:
        """The simplicial map on the part of sd^depth carried by a subcomplex."""
        carried = self.subdivision.carried_by(sub)
        return SimplicialMap(carried, self.map.target,
                             {v: self.vertex_map[v] for v in carried.vertices})

    def compose(self, inner: SimplicialMap) -> "SubdividedMap":
        """self ∘ inner for a map into the domain; needs depth 0."""
        if self.depth:
            raise ValidationError("precomposition needs an unsubdivided map",
                                  invariant="subdivision-depth", witness=self.depth)
        return SubdividedMap.from_simplicial(self.map.compose(inner), self.n)


MapLike = Union[SimplicialMap, SubdividedMap]


def as_subdivided(f: MapLike, n: int) -> SubdividedMap:
    if isinstance(f, SubdividedMap):
        if f.n != n:
            raise ValidationError("map targets a sphere of another dimension",
                                  invariant="sphere-target", witness=f.n)
        return f
    return SubdividedMap.from_simplicial(f, n)


def _check_relative_discipline(f: SubdividedMap, pair: SimplicialPair) -> None:
    u = fundamental_cocycle_simplex(f.n)
    if not pair.subcomplex.simplices:
        return
    for tau in f.subdivision.carried_by(pair.subcomplex).simplices_of_dim(f.n):
        if f.map.image(tau) == u:
            raise ValidationError("map sends the subcomplex onto the fundamental face",
                                  invariant="relative-basepoint",
                                  witness=f.subdivision.simplex_carrier(tau))


def _check_domain(f: SubdividedMap, pair: SimplicialPair, whole: bool) -> None:
    if not f.domain.is_subcomplex_of(pair.complex):
        raise ValidationError("map domain is not inside the complex", invariant="map-domain")
    needed = pair.complex if whole else pair.complex.skeleton(f.n).union(pair.subcomplex)
    if not needed.is_subcomplex_of(f.domain):
        missing = min(needed.simplices - f.domain.simplices, key=lambda s: (len(s), s))
        raise ValidationError("map is not defined on a required simplex",
                              invariant="map-domain", witness=missing)


@dataclass
class ObstructionCochain:
    pair: SimplicialPair
    degree: int
    values: Dict[Simplex, int]

    def nonzero_cells(self) -> List[Simplex]:
        return sorted(s for s, v in self.values.items() if v)

    def vector(self) -> Vector:
        cc = cochain_complex(self.pair, INTEGERS)
        return cc.cochain(self.degree, {s: (v,) for s, v in self.values.items()})


@dataclass
class DifferenceCochain:
    pair: SimplicialPair
    degree: int
    values: Dict[Simplex, int]
    mode: str = "exact"

    def total(self) -> int:
        return sum(self.values.values())

    def vector(self) -> Vector:
        cc = cochain_complex(self.pair, INTEGERS)
        return cc.cochain(self.degree, {s: (v,) for s, v in self.values.items()})


def _coboundary_values(pair: SimplicialPair, n: int, cochain: Dict[Simplex, int]) -> Dict[Simplex, int]:
    result = {}
    for sigma in pair.relative_simplices(n + 1):
        result[sigma] = sum((-1 if i % 2 else 1) * cochain.get(face, 0)
                            for i, face in boundary_faces(sigma))
    return result


def pushed_fundamental_cochain(f: MapLike, pair: SimplicialPair, n: int) -> Dict[Simplex, int]:
    """P f^#u on the n-simplices of K outside L."""
    g = as_subdivided(f, n)
    _check_relative_discipline(g, pair)
    return g.chain_values(pair.relative_simplices(n))


def obstruction_cocycle(f: MapLike, pair: SimplicialPair, n: int) -> ObstructionCochain:
    """c(σ) = degree of f on the subdivided boundary of σ, for (n+1)-simplices outside L."""
    g = as_subdivided(f, n)
    _check_domain(g, pair, whole=False)
    _check_relative_discipline(g, pair)
    values = {}
    chains = g.subdivision.chain_map(n)
    for sigma in pair.relative_simplices(n + 1):
        cycle: Dict[Simplex, int] = {}
        for i, face in boundary_faces(sigma):
            for tau, coefficient in chains[face].items():
                cycle[tau] = cycle.get(tau, 0) + (-1 if i % 2 else 1) * coefficient
        cycle = {t: c for t, c in cycle.items() if c}
        values[sigma] = degree(g.restricted_to(boundary_complex(sigma)), n, fundamental_cycle=cycle)
    pushed = g.chain_values(pair.complex.simplices_of_dim(n))
    if values != _coboundary_values(pair, n, pushed):
        raise ConsistencyError("boundary degrees disagree with the coboundary of P f^#u")
    cocycle = ObstructionCochain(pair, n + 1, values)
    if any(_coboundary_values(pair, n + 1, values).values()):
        raise ConsistencyError("obstruction cochain is not a cocycle")
    logger.debug(f"Obstruction cocycle with {len(cocycle.nonzero_cells())} nonzero cells")
    return cocycle


@dataclass
class Extensibility:
    extensible: bool
    witnesses: List[Simplex]


def is_extensible(c: ObstructionCochain) -> Extensibility:
    cells = c.nonzero_cells()
    return Extensibility(not cells, cells)


@dataclass
class VanishingCertificate:
    vanishes: bool
    witness: Optional[Dict[Simplex, int]]


def obstruction_class_vanishes(c: ObstructionCochain) -> VanishingCertificate:
    """Decide [c] = 0 in H^{n+1}(K, L; Z); the witness d satisfies δd = c."""
    cc = cochain_complex(c.pair, INTEGERS)
    d = solve(cc.integer_coboundary(c.degree - 1), c.vector())
    if d is None:
        return VanishingCertificate(False, None)
    labels = cc.labels.get(c.degree - 1, ())
    return VanishingCertificate(True, {labels[i]: x for i, x in enumerate(d) if x})


def _check_agreement(f: SubdividedMap, g: SubdividedMap, pair: SimplicialPair, n: int) -> None:
    allowed = {s for s in pair.complex.simplices
               if len(s) <= n and s not in pair.subcomplex.simplices}
    for v in f.subdivision.complex.vertices:
        carrier = f.subdivision.carrier[v]
        if carrier in allowed and f.vertex_map[v] != g.vertex_map[v]:
            raise AgreementError("maps differ on the (n-1)-skeleton outside the subcomplex",
                                 invariant="skeleton-agreement", witness=carrier)


def difference_cochain(f: MapLike, g: MapLike, pair: SimplicialPair, n: int,
                       mode: str = "exact") -> DifferenceCochain:
    """d(ρ) = degree of the map on the double of ρ carrying f and reversed g.

    "exact" requires f and g to agree on the (n-1)-skeleton outside L.
    "canonical" joins them through a homotopy inside the complement of a point
    of the fundamental face, which contributes nothing to the degree count.
    """
    if mode not in ("exact", "canonical"):
        raise ValidationError(f"unknown difference mode {mode!r}", invariant="difference-mode")
    a = as_subdivided(f, n)
    b = as_subdivided(g, n)
    if a.domain != b.domain or a.depth != b.depth:
        raise ValidationError("maps live on different subdivisions", invariant="same-subdivision",
                              witness=(a.depth, b.depth))
    _check_domain(a, pair, whole=False)
    if mode == "exact":
        _check_agreement(a, b, pair, n)
    simplices = pair.relative_simplices(n)
    va = pushed_fundamental_cochain(a, pair, n)
    vb = pushed_fundamental_cochain(b, pair, n)
    return DifferenceCochain(pair, n, {s: va[s] - vb[s] for s in simplices}, mode)


def is_deformation_cocycle(d: DifferenceCochain) -> bool:
    return not any(_coboundary_values(d.pair, d.degree, d.values).values())


@dataclass
class ChiClass:
    """χ^n(f) ∈ H^n(K, L; Z)."""
    pair: SimplicialPair
    n: int
    cohomology: CohomologyGroup
    element: Vector
    cochain: Dict[Simplex, int]
    evaluation: Optional[int] = None

    @property
    def group(self) -> FpGroup:
        return self.cohomology.group

    @property
    def is_zero(self) -> bool:
        return not any(self.element)


def chi_class(f: MapLike, pair: SimplicialPair, n: int) -> ChiClass:
    """Class of P f^#u for a map defined on all of K.

    When L is empty and K is an n-dimensional sphere-like complex, the class
    is also evaluated on the fundamental cycle of K.
    """
    g = as_subdivided(f, n)
    _check_domain(g, pair, whole=True)
    values = pushed_fundamental_cochain(g, pair, n)
    cc = cochain_complex(pair, INTEGERS)
    h = complex_cohomology(cc, n)
    element = h.encode(cc.cochain(n, {s: (v,) for s, v in values.items()}))
    evaluation = None
    if not pair.subcomplex.simplices and pair.complex.dimension == n and h.group.invariants() == ((), 1):
        cycle = homology_top_cycle(pair.complex)
        evaluation = sum(cycle.get(s, 0) * v for s, v in values.items())
    return ChiClass(pair, n, h, element, values, evaluation)


def simplicial_homotopy_chi_check(h: SimplicialMap, prism: Prism, n: int) -> bool:
    """χ(h∘i_0) = χ(h∘i_1) for a map out of a prism."""
    pair = SimplicialPair(prism.base)
    bottom = chi_class(h.compose(prism.bottom()), pair, n)
    top = chi_class(h.compose(prism.top()), pair, n)
    return bottom.element == top.element


@dataclass
class Classification:
    """[(K, L), S^n] ≅ H^n(K, L; Z) with realizing maps where found."""
    pair: SimplicialPair
    n: int
    group: FpGroup
    realizations: Dict[Vector, SimplicialMap] = field(default_factory=dict)
    candidates: int = 0
    exhaustive: bool = True

    def representative(self, element: Sequence[int]) -> Optional[SimplicialMap]:
        return self.realizations.get(self.group.reduce(self.group.lift(element)))

    def unreached(self) -> Optional[List[Vector]]:
        """Unrealized elements for finite groups, None when the group is infinite."""
        if not self.group.is_finite:
            return None
        return [e for e in self.group.elements() if e not in self.realizations]


def classify_maps(pair: SimplicialPair, n: int, budget: Optional[int] = None,
                  seed: Optional[int] = None) -> Classification:
    """Homotopy classes of maps (K, L) → (S^n, basepoint) for dim K <= n.

    Vertex maps are enumerated to realize classes; above the enumeration
    budget a seeded random sample of that size is drawn instead.
    """
    if pair.complex.dimension > n:
        raise DimensionHypothesisError("classification needs dim K <= n",
                                       invariant="dimension-hypothesis",
                                       witness=(pair.complex.dimension, n))
    SphereTarget(n)
    config = get_config()
    budget = config.enumeration_budget() if budget is None else budget
    seed = config.seed() if seed is None else seed
    h = complex_cohomology(cochain_complex(pair, INTEGERS), n)
    result = Classification(pair, n, h.group)
    vertices = pair.complex.vertices
    targets = tuple(range(n + 2))
    total = len(targets) ** len(vertices)
    if total <= budget:
        candidates = itertools.product(targets, repeat=len(vertices))
    else:
        rng = random.Random(seed)
        candidates = (tuple(rng.choice(targets) for _ in vertices) for _ in range(budget))
        result.exhaustive = False
        logger.warning(f"{total} vertex maps exceed the budget {budget}; sampling instead")
    model = sphere_model(n)
    for images in candidates:
        result.candidates += 1
        f = SimplicialMap(pair.complex, model, dict(zip(vertices, images)))
        try:
            element = chi_class(f, pair, n).element
        except ValidationError:
            continue
        result.realizations.setdefault(element, f)
    logger.info(f"Classified maps into S^{n}: {h.group}, "
                f"{len(result.realizations)} classes realized from {result.candidates} maps")
    return result


@dataclass
class ThetaResult:
    level: int
    level_class: Vector
    colimit_class: Vector
    group: FpGroup
    stable: bool


def theta_finite_stage(tower: CoverTower, level: int, p: SimplicialMap, n: int,
                       images=None) -> ThetaResult:
    """χ of a map on the level nerve, pushed into the truncated Čech colimit."""
    tower.check_level(level)
    if p.source != tower.nerve(level):
        raise LevelIndexError("map is not defined on the nerve of the given level",
                              invariant="level-map", witness=level)
    if images is not None:
        check = star_condition_check(images, p, tower.levels[level])
        if not check.holds:
            raise ValidationError("map violates the star condition", invariant="star-condition",
                                  witness=check.violations[0])
    cech = cech_cohomology_truncated(tower, INTEGERS, n)
    chi = chi_class(p, SimplicialPair(p.source), n)
    pushed = cech.level_class(level, chi.element)
    stable = True
    if level + 1 < tower.depth:
        refined = p.compose(tower.nerve_map(level + 1, level))
        again = chi_class(refined, SimplicialPair(refined.source), n)
        if cech.level_class(level + 1, again.element) != pushed:
            raise ConsistencyError("Čech class changed under refinement")
    else:
        stable = False
    return ThetaResult(level, chi.element, pushed, cech.group, stable)
