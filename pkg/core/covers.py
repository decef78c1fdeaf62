"""
Finite covers, nerves and truncated covering systems.

A CoverTower stores levels 0..N with refinements from level k+1 to level k
and an optional exhaustion X_0 ⊆ X_1 ⊆ ... of the ground set. Composite
refinements are derived, never stored. Čech cohomology of a tower is the
colimit of the nerve cohomologies along the induced maps.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import (AmbientMismatchError, ApproximationError, DegreeMismatchError,
                     InvalidMapError, InvalidRefinementError, LevelIndexError,
                     MissingExhaustionError, ValidationError, WeightSupportError)
from .exact_abelian import (ChainColimit, FpGroup, GroupHom, Subgroup, chain_colimit, image)
from .intmatrix import IntMatrix, Vector, block_diagonal
from .simplicial import (CohomologyGroup, Simplex, SimplicialComplex, SimplicialMap,
                         SimplicialPair, check_face_budget, cochain_complex,
                         complex_cohomology, induced_by_cochain_map, label_inclusion,
                         pullback_cochain_map)

logger = logging.getLogger(__name__)

Barycentric = Dict[int, Fraction]


@dataclass(frozen=True)
class Cover:
    """Indexed family of subsets of a finite ground set; member i is nerve vertex i."""
    ground: FrozenSet[int]
    members: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "ground", frozenset(self.ground))
        object.__setattr__(self, "members", tuple(frozenset(m) for m in self.members))
        union = frozenset().union(*self.members) if self.members else frozenset()
        if not union <= self.ground:
            raise ValidationError("cover member leaves the ground set", invariant="cover-union",
                                  witness=min(union - self.ground))
        if union != self.ground:
            raise ValidationError("members do not cover the ground set", invariant="cover-union",
                                  witness=min(self.ground - union))

    @classmethod
    def from_members(cls, members: Iterable[Iterable[int]]) -> "Cover":
        members = tuple(frozenset(m) for m in members)
        return cls(frozenset().union(*members) if members else frozenset(), members)

    def __len__(self) -> int:
        return len(self.members)

    def containing(self, point: int) -> List[int]:
        return [i for i, m in enumerate(self.members) if point in m]


def _intersecting_families(cover: Cover) -> List[Simplex]:
    # every family with a common point lies inside the members containing that point
    stars = {frozenset(cover.containing(x)) for x in cover.ground}
    check_face_budget(sum(2 ** len(s) - 1 for s in stars))
    simplices = []
    frontier = [((i,), m) for i, m in enumerate(cover.members) if m]
    while frontier:
        extended = []
        for simplex, common in frontier:
            simplices.append(simplex)
            for j in range(simplex[-1] + 1, len(cover.members)):
                meet = common & cover.members[j]
                if meet:
                    extended.append((simplex + (j,), meet))
        frontier = extended
    return simplices


def nerve(cover: Cover) -> SimplicialComplex:
    """One simplex per family of members with nonempty common intersection."""
    return SimplicialComplex(frozenset(_intersecting_families(cover)))


def restricted_nerve(cover: Cover, subset: Iterable[int]) -> SimplicialComplex:
    """Full subcomplex of the nerve on the members that meet the subset."""
    subset = frozenset(subset)
    meeting = {i for i, m in enumerate(cover.members) if m & subset}
    return SimplicialComplex(frozenset(s for s in _intersecting_families(cover)
                                       if meeting.issuperset(s)))


@dataclass(frozen=True)
class RefinementMap:
    fine: Cover
    coarse: Cover
    assignment: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(self.assignment))
        if self.fine.ground != self.coarse.ground:
            raise AmbientMismatchError("refinement between covers of different ground sets",
                                       invariant="refinement")
        if len(self.assignment) != len(self.fine.members):
            raise InvalidRefinementError("every fine member needs an assigned coarse member",
                                         invariant="refinement", witness=len(self.assignment))
        for i, j in enumerate(self.assignment):
            if not 0 <= j < len(self.coarse.members):
                raise InvalidRefinementError("assigned index is not a coarse member",
                                             invariant="refinement", witness=(i, j))
            if not self.fine.members[i] <= self.coarse.members[j]:
                raise InvalidRefinementError("fine member is not inside its assigned member",
                                             invariant="refinement", witness=(i, j))

    @classmethod
    def identity(cls, cover: Cover) -> "RefinementMap":
        return cls(cover, cover, tuple(range(len(cover.members))))

    def compose(self, inner: "RefinementMap") -> "RefinementMap":
        """self ∘ inner, refining inner.fine into self.coarse."""
        if inner.coarse != self.fine:
            raise InvalidRefinementError("refinements are not composable", invariant="refinement")
        return RefinementMap(inner.fine, self.coarse,
                             tuple(self.assignment[j] for j in inner.assignment))


def nerve_map(refinement: RefinementMap) -> SimplicialMap:
    source = nerve(refinement.fine)
    try:
        return SimplicialMap(source, nerve(refinement.coarse),
                             {v: refinement.assignment[v] for v in source.vertices})
    except InvalidMapError as e:
        raise InvalidRefinementError(f"nerve map is not simplicial: {e.message}",
                                     invariant="refinement", witness=e.witness) from e


@dataclass(frozen=True)
class CoverTower:
    """Covers at levels 0..N; refinements[k] refines level k+1 into level k."""
    levels: Tuple[Cover, ...]
    refinements: Tuple[RefinementMap, ...]
    exhaustion: Optional[Tuple[FrozenSet[int], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "refinements", tuple(self.refinements))
        if not self.levels:
            raise ValidationError("a cover tower needs at least one level", invariant="tower-shape")
        if len(self.refinements) != len(self.levels) - 1:
            raise ValidationError("one refinement is needed between consecutive levels",
                                  invariant="tower-shape", witness=len(self.refinements))
        for k, r in enumerate(self.refinements):
            if r.fine != self.levels[k + 1] or r.coarse != self.levels[k]:
                raise InvalidRefinementError("refinement does not connect consecutive levels",
                                             invariant="tower-shape", witness=k)
        if self.exhaustion is not None:
            sets = tuple(frozenset(x) for x in self.exhaustion)
            object.__setattr__(self, "exhaustion", sets)
            for i, (a, b) in enumerate(zip(sets, sets[1:])):
                if not a <= b:
                    raise ValidationError("exhaustion is not nested", invariant="exhaustion",
                                          witness=i)
            if not sets or sets[-1] != self.ground:
                raise ValidationError("exhaustion does not reach the ground set",
                                      invariant="exhaustion")

    @classmethod
    def constant(cls, cover: Cover, depth: int = 1,
                 exhaustion: Optional[Sequence[Iterable[int]]] = None) -> "CoverTower":
        identity = RefinementMap.identity(cover)
        return cls(tuple([cover] * depth), tuple([identity] * (depth - 1)),
                   None if exhaustion is None else tuple(frozenset(x) for x in exhaustion))

    @property
    def ground(self) -> FrozenSet[int]:
        return self.levels[0].ground

    @property
    def depth(self) -> int:
        return len(self.levels)

    def check_level(self, k: int) -> None:
        if not 0 <= k < self.depth:
            raise LevelIndexError("level out of range", invariant="level-index", witness=k)

    def require_exhaustion(self) -> Tuple[FrozenSet[int], ...]:
        if self.exhaustion is None:
            raise MissingExhaustionError("tower has no exhaustion", invariant="exhaustion")
        return self.exhaustion

    def check_exhaustion_index(self, i: int) -> FrozenSet[int]:
        sets = self.require_exhaustion()
        if not 0 <= i < len(sets):
            raise LevelIndexError("exhaustion index out of range", invariant="exhaustion-index",
                                  witness=i)
        return sets[i]

    def composite(self, j: int, i: int) -> RefinementMap:
        """Refinement of level j into level i, for j >= i."""
        self.check_level(i)
        self.check_level(j)
        if j < i:
            raise LevelIndexError("composite refinements go from finer to coarser levels",
                                  invariant="level-index", witness=(j, i))
        result = RefinementMap.identity(self.levels[i])
        for k in range(i, j):
            result = result.compose(self.refinements[k])
        return result

    def nerve(self, k: int) -> SimplicialComplex:
        self.check_level(k)
        return nerve(self.levels[k])

    def nerve_map(self, j: int, i: int) -> SimplicialMap:
        return nerve_map(self.composite(j, i))

    def with_repeated_level(self, k: int) -> "CoverTower":
        """Insert a copy of level k right after it, joined by the identity."""
        self.check_level(k)
        levels = self.levels[:k + 1] + (self.levels[k],) + self.levels[k + 1:]
        refinements = (self.refinements[:k] + (RefinementMap.identity(self.levels[k]),)
                       + self.refinements[k:])
        return CoverTower(levels, refinements, self.exhaustion)


def circle_arc_cover(point_count: int, arc_count: int) -> Cover:
    """Arcs {i*s, ..., i*s + s} (mod point_count) of a discrete circle, s = point_count/arc_count."""
    if arc_count < 3 or point_count % arc_count:
        raise ValidationError("arc count must be at least 3 and divide the point count",
                              invariant="circle-cover", witness=(point_count, arc_count))
    step = point_count // arc_count
    return Cover(frozenset(range(point_count)),
                 tuple(frozenset((i * step + t) % point_count for t in range(step + 1))
                       for i in range(arc_count)))


def circle_tower(point_count: int, arc_counts: Sequence[int],
                 exhaustion: Optional[Sequence[Iterable[int]]] = None) -> CoverTower:
    """Tower of arc covers, each arc count dividing the next."""
    levels = [circle_arc_cover(point_count, a) for a in arc_counts]
    refinements = []
    for coarse_count, fine, coarse in zip(arc_counts, levels[1:], levels):
        ratio = len(fine.members) // coarse_count
        refinements.append(RefinementMap(fine, coarse,
                                         tuple(j // ratio for j in range(len(fine.members)))))
    return CoverTower(tuple(levels), tuple(refinements),
                      None if exhaustion is None else tuple(frozenset(x) for x in exhaustion))


# truncated Čech cohomology

@dataclass
class TruncatedCech:
    """colim_k H^n(N_k; G) over the levels of a tower."""
    tower: CoverTower
    coefficients: FpGroup
    degree: int
    levels: List[CohomologyGroup]
    bonding: List[GroupHom]
    colimit: ChainColimit

    @property
    def group(self) -> FpGroup:
        return self.colimit.group

    def class_of(self, level: int, cocycle: Sequence[int]) -> Vector:
        """Canonical colimit element of a level cocycle."""
        self.tower.check_level(level)
        raw = self.levels[level].encode_raw(cocycle)
        return self.group.reduce(self.colimit.insertions[level].apply(raw))

    def level_class(self, level: int, canonical: Sequence[int]) -> Vector:
        """Push a canonical element of H^n(N_level) into the colimit."""
        raw = self.levels[level].group.lift(canonical)
        return self.group.reduce(self.colimit.insertions[level].apply(raw))

    def image_chain(self) -> List[Subgroup]:
        return [image(insertion) for insertion in self.colimit.insertions]

    def stable_from(self) -> Optional[int]:
        """First level whose image is the whole colimit."""
        whole = Subgroup.whole(self.group)
        for k, sub in enumerate(self.image_chain()):
            if whole.is_subgroup_of(sub):
                return k
        return None


def _level_pair(tower: CoverTower, k: int, subset: Optional[FrozenSet[int]]) -> SimplicialPair:
    complex_ = tower.nerve(k)
    if subset is None:
        return SimplicialPair(complex_)
    return SimplicialPair(complex_, restricted_nerve(tower.levels[k], subset))


def _cech(tower: CoverTower, coefficients: FpGroup, n: int,
          subset: Optional[FrozenSet[int]]) -> TruncatedCech:
    pairs = [_level_pair(tower, k, subset) for k in range(tower.depth)]
    levels = [complex_cohomology(cochain_complex(p, coefficients), n) for p in pairs]
    bonding = []
    for k, r in enumerate(tower.refinements):
        f = nerve_map(r)
        cmap = pullback_cochain_map(f, coefficients, pairs[k + 1].subcomplex, pairs[k].subcomplex)
        bonding.append(induced_by_cochain_map(cmap, n))
    colimit = chain_colimit([h.group for h in levels], bonding)
    return TruncatedCech(tower, coefficients, n, levels, bonding, colimit)


def cech_cohomology_truncated(tower: CoverTower, coefficients: FpGroup, n: int) -> TruncatedCech:
    result = _cech(tower, coefficients, n, None)
    logger.info(f"Truncated Čech H^{n} over {tower.depth} levels: {result.group}")
    return result


def _levelwise_map(source: TruncatedCech, target: TruncatedCech) -> GroupHom:
    """Colimit map from per-level label inclusions of relative cochains."""
    blocks = []
    for k in range(source.tower.depth):
        cmap = label_inclusion(source.levels[k].complex, target.levels[k].complex)
        blocks.append(induced_by_cochain_map(cmap, source.degree).matrix)
    return GroupHom(source.group, target.group, block_diagonal(blocks))


@dataclass
class RelativeCech:
    index: int
    relative: TruncatedCech
    comparison: GroupHom

    @property
    def group(self) -> FpGroup:
        return self.relative.group

    def comparison_image(self) -> Subgroup:
        return image(self.comparison)


def relative_cech_truncated(tower: CoverTower, index: int, coefficients: FpGroup, n: int,
                            absolute: Optional[TruncatedCech] = None) -> RelativeCech:
    """Ȟ^n(X, X_index; G) on the truncation, with its comparison map into Ȟ^n(X; G)."""
    subset = tower.check_exhaustion_index(index)
    relative = _cech(tower, coefficients, n, subset)
    absolute = absolute or cech_cohomology_truncated(tower, coefficients, n)
    comparison = _levelwise_map(relative, absolute)
    logger.debug(f"Relative Čech H^{n}(X, X_{index}) = {relative.group}")
    return RelativeCech(index, relative, comparison)


def relative_transition(tower: CoverTower, later: RelativeCech, earlier: RelativeCech) -> GroupHom:
    """Ȟ^n(X, X_j) → Ȟ^n(X, X_i) for i <= j."""
    if later.index < earlier.index:
        raise LevelIndexError("transition maps go from later to earlier exhaustion sets",
                              invariant="exhaustion-index", witness=(later.index, earlier.index))
    return _levelwise_map(later.relative, earlier.relative)


# cochains on towers and the metric

@dataclass
class TowerCochain:
    """n-cochain on the nerve of one level; values in generator coordinates of G."""
    level: int
    degree: int
    coefficients: FpGroup
    values: Dict[Simplex, Tuple[int, ...]] = field(default_factory=dict)

    def vector(self, tower: CoverTower) -> Vector:
        cc = cochain_complex(SimplicialPair(tower.nerve(self.level)), self.coefficients)
        return cc.cochain(self.degree, self.values)


def pull_back_cochain(tower: CoverTower, cochain: TowerCochain, level: int) -> Vector:
    """The cochain pulled back along the composite refinement to a finer level."""
    f = tower.nerve_map(level, cochain.level)
    cmap = pullback_cochain_map(f, cochain.coefficients)
    return cmap.group_hom(cochain.degree).apply(cochain.vector(tower))


def agreement_profile(a: TowerCochain, b: TowerCochain, tower: CoverTower) -> List[int]:
    """δ_k = 1 where the cochains differ on the nerve restricted to X_k, else 0."""
    if a.degree != b.degree:
        raise DegreeMismatchError("cochains of different degrees", invariant="same-degree",
                                  witness=(a.degree, b.degree))
    if a.coefficients != b.coefficients:
        raise DegreeMismatchError("cochains with different coefficient groups",
                                  invariant="same-coefficients")
    level = max(a.level, b.level)
    exhaustion = tower.require_exhaustion()
    cc = cochain_complex(SimplicialPair(tower.nerve(level)), a.coefficients)
    va = cc.values_of(a.degree, pull_back_cochain(tower, a, level))
    vb = cc.values_of(a.degree, pull_back_cochain(tower, b, level))
    zero = a.coefficients.reduce(a.coefficients.zero())
    profile = []
    for subset in exhaustion:
        restricted = restricted_nerve(tower.levels[level], subset)
        differs = any(va.get(s, zero) != vb.get(s, zero)
                      for s in restricted.simplices_of_dim(a.degree))
        profile.append(1 if differs else 0)
    return profile


def cochain_metric(a: TowerCochain, b: TowerCochain, tower: CoverTower) -> Fraction:
    """ρ(a, b) = Σ_j δ_j / 2^(j+1) over the exhaustion positions j = 0, 1, ..."""
    profile = agreement_profile(a, b, tower)
    return sum((Fraction(d, 2 ** (j + 1)) for j, d in enumerate(profile)), Fraction(0))


# partitions of unity and simplicial approximation

def uniform_weights(cover: Cover) -> Dict[int, Barycentric]:
    weights = {}
    for x in sorted(cover.ground):
        members = cover.containing(x)
        weights[x] = {i: Fraction(1, len(members)) for i in members}
    return weights


def canonical_map(cover: Cover, weights: Mapping[int, Mapping[int, Fraction]]) -> Dict[int, Barycentric]:
    """Barycentric coordinates on the nerve for every ground point.

    Weights must be strictly positive on exactly the members containing a
    point and sum to one there.
    """
    result = {}
    for x in sorted(cover.ground):
        given = {i: Fraction(w) for i, w in weights.get(x, {}).items() if w}
        members = set(cover.containing(x))
        for i, w in given.items():
            if w < 0:
                raise WeightSupportError("negative weight", invariant="partition-of-unity",
                                         witness=(x, i))
            if i not in members:
                raise WeightSupportError("weight on a member not containing the point",
                                         invariant="weight-support", witness=(x, i))
        missing = members - set(given)
        if missing:
            raise WeightSupportError("member containing the point has zero weight",
                                     invariant="weight-support", witness=(x, min(missing)))
        if sum(given.values()) != 1:
            raise ValidationError("weights do not sum to one", invariant="partition-of-unity",
                                  witness=x)
        result[x] = dict(sorted(given.items()))
    check = star_condition_check(result, SimplicialMap.identity(nerve(cover)), cover)
    if not check.holds:
        raise ValidationError("canonical map violates the star condition",
                              invariant="star-condition", witness=check.violations[0])
    return result


@dataclass
class StarCheck:
    holds: bool
    violations: List[Tuple[int, int]]  # (member, point)


def star_condition_check(images: Mapping[int, Mapping[int, Fraction]], p: SimplicialMap,
                         cover: Cover) -> StarCheck:
    """f(x) lies in the open star of p(U) for every member U and every x in U."""
    violations = []
    for i, member in enumerate(cover.members):
        if i not in p.vertex_map:
            continue
        target = p.vertex_map[i]
        for x in sorted(member):
            if images.get(x, {}).get(target, 0) <= 0:
                violations.append((i, x))
    return StarCheck(not violations, violations)


def simplicial_approximation(cover: Cover, images: Mapping[int, Mapping[int, Fraction]],
                             target: SimplicialComplex) -> SimplicialMap:
    """p(U) = least target vertex in the support of f(x) for all x in U."""
    supports = {}
    for x in cover.ground:
        support = tuple(sorted(v for v, w in images.get(x, {}).items() if w > 0))
        if support not in target.simplices:
            raise ApproximationError("image point is not in the target complex",
                                     invariant="barycentric-support", witness=x)
        supports[x] = set(support)
    assignment = {}
    for i, member in enumerate(cover.members):
        if not member:
            continue
        common = set.intersection(*(supports[x] for x in member))
        if not common:
            raise ApproximationError("no vertex star contains the image of the member",
                                     invariant="star-condition", witness=i)
        assignment[i] = min(common)
    try:
        return SimplicialMap(nerve(cover), target, assignment)
    except InvalidMapError as e:
        raise ApproximationError(f"approximation is not simplicial: {e.message}",
                                 invariant="star-condition", witness=e.witness) from e


def pulled_back_class(p: SimplicialMap, coefficients: FpGroup, n: int,
                      canonical_class: Sequence[int]) -> Vector:
    """p^*(class) in canonical coordinates of H^n(source)."""
    source = complex_cohomology(cochain_complex(SimplicialPair(p.source), coefficients), n)
    target = complex_cohomology(cochain_complex(SimplicialPair(p.target), coefficients), n)
    cmap = pullback_cochain_map(p, coefficients)
    z = target.decode_canonical(canonical_class)
    return source.encode(cmap.group_hom(n).apply(z))


def common_refinement_level(tower: CoverTower, p_a: SimplicialMap, alpha: int,
                            p_b: SimplicialMap, beta: int, coefficients: FpGroup, n: int,
                            canonical_class: Sequence[int]) -> Optional[int]:
    """Least level γ >= α, β where p_a∘r and p_b∘r pull the class back equally."""
    if p_a.target != p_b.target:
        raise AmbientMismatchError("maps have different targets", invariant="same-target")
    for gamma in range(max(alpha, beta), tower.depth):
        a = p_a.compose(tower.nerve_map(gamma, alpha))
        b = p_b.compose(tower.nerve_map(gamma, beta))
        if (pulled_back_class(a, coefficients, n, canonical_class)
                == pulled_back_class(b, coefficients, n, canonical_class)):
            return gamma
    return None
