"""
Inverse towers of finitely presented groups, Moore spaces, algebraic mapping
telescopes and finite-level phantom filtrations.

A GroupTower reads A_0 ← A_1 ← A_2 ← ...; periodic towers repeat one
endomorphism forever, explicit towers continue by identities past their last
stage. Only the vanishing of lim¹ is decided, always with a certificate.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Protocol, Sequence, Tuple

from .config import get_config
from .covers import (CoverTower, RelativeCech, cech_cohomology_truncated,
                     relative_cech_truncated, relative_transition)
from .errors import (ConsistencyError, InvalidMapError, LevelIndexError,
                     MissingExhaustionError, NonChainMapError, NonInjectivePresentationError,
                     ValidationError)
from .exact_abelian import (ChainColimit, FpGroup, GroupHom, Subgroup, chain_colimit, image,
                            intersect)
from .intmatrix import IntMatrix, Vector, smith_normal_form
from .simplicial import (CochainComplexFp, CochainMap, CohomologyGroup, SimplicialPair,
                         cochain_complex, complex_cohomology, homology_top_cycle,
                         induced_by_cochain_map, label_inclusion, sphere_model)

logger = logging.getLogger(__name__)

INTEGERS = FpGroup.free(1)
MAX_TELESCOPE_DIMENSION = 4
MAX_TELESCOPE_LENGTH = 12
MAX_MOORE_DEGREE = 1000


# group towers

@dataclass(frozen=True)
class GroupTower:
    groups: Tuple[FpGroup, ...]
    bonding: Tuple[GroupHom, ...]
    periodic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "bonding", tuple(self.bonding))
        if not self.groups:
            raise ValidationError("a tower needs at least one group", invariant="tower-shape")
        if self.periodic:
            if len(self.groups) != 1 or len(self.bonding) != 1:
                raise ValidationError("a periodic tower has one group and one endomorphism",
                                      invariant="tower-shape")
            e = self.bonding[0]
            if e.source != self.groups[0] or e.target != self.groups[0]:
                raise InvalidMapError("periodic bonding map is not an endomorphism",
                                      invariant="tower-shape")
            return
        if len(self.bonding) != len(self.groups) - 1:
            raise ValidationError("an explicit tower needs one bonding map per step",
                                  invariant="tower-shape", witness=len(self.bonding))
        for k, b in enumerate(self.bonding):
            if b.source != self.groups[k + 1] or b.target != self.groups[k]:
                raise InvalidMapError("bonding map does not go from stage k+1 to stage k",
                                      invariant="tower-shape", witness=k)

    @classmethod
    def periodic_tower(cls, group: FpGroup, endomorphism: GroupHom) -> "GroupTower":
        return cls((group,), (endomorphism,), periodic=True)

    @classmethod
    def multiplication(cls, group: FpGroup, factor: int) -> "GroupTower":
        matrix = IntMatrix.identity(group.generator_count).scale(factor)
        return cls.periodic_tower(group, GroupHom(group, group, matrix))

    @classmethod
    def explicit(cls, groups: Sequence[FpGroup], bonding: Sequence[GroupHom]) -> "GroupTower":
        return cls(tuple(groups), tuple(bonding), periodic=False)

    @property
    def last_explicit_stage(self) -> Optional[int]:
        return None if self.periodic else len(self.groups) - 1

    def stage(self, k: int) -> FpGroup:
        if k < 0:
            raise LevelIndexError("negative tower stage", invariant="level-index", witness=k)
        if self.periodic:
            return self.groups[0]
        return self.groups[min(k, len(self.groups) - 1)]

    def bond(self, k: int) -> GroupHom:
        """A_{k+1} → A_k."""
        if self.periodic:
            return self.bonding[0]
        if k < len(self.bonding):
            return self.bonding[k]
        return GroupHom.identity(self.stage(k))

    def composite(self, k: int) -> GroupHom:
        """A_k → A_0."""
        result = GroupHom.identity(self.stage(0))
        for j in range(k):
            result = result.compose(self.bond(j))
        return result

    @property
    def is_finite(self) -> bool:
        return all(g.is_finite for g in self.groups)

    def max_order(self) -> int:
        return max(g.order or 0 for g in self.groups)


class MLStatus(Enum):
    STABILIZED = "stabilized"
    STRICTLY_DECREASING = "strictly_decreasing"
    UNDETERMINED = "undetermined"


@dataclass
class MittagLefflerResult:
    """Images Im(A_k → A_0) for k = 0..len(images)-1 and the verdict."""
    status: MLStatus
    step: int
    images: List[Subgroup]
    witnesses: List[Vector] = field(default_factory=list)

    def __str__(self) -> str:
        if self.status is MLStatus.STABILIZED:
            return f"Stabilized({self.step})"
        if self.status is MLStatus.STRICTLY_DECREASING:
            return f"StrictlyDecreasingUpTo({self.step})"
        return f"UndeterminedAtCap({self.step})"


def _strict_witness(larger: Subgroup, smaller: Subgroup) -> Optional[Vector]:
    for g in larger.generators:
        if not smaller.contains(g):
            return larger.ambient.reduce(g)
    return None


def mittag_leffler(tower: GroupTower, cap: Optional[int] = None) -> MittagLefflerResult:
    """Compare the stage-0 images Im(A_k → A_0) for k <= cap.

    For a periodic tower one equal step means equality forever. An explicit
    tower is constant past its last stage, so its images settle at the last
    strict step once every explicit step has been looked at.
    """
    cap = get_config().ml_cap() if cap is None else cap
    steps = cap if tower.periodic else min(cap, tower.last_explicit_stage)
    composite = GroupHom.identity(tower.stage(0))
    images = [image(composite)]
    witnesses: List[Optional[Vector]] = []
    for k in range(steps):
        composite = composite.compose(tower.bond(k))
        images.append(image(composite))
        witness = _strict_witness(images[k], images[k + 1])
        if tower.periodic and witness is None:
            logger.debug(f"Images stabilized at step {k}")
            return MittagLefflerResult(MLStatus.STABILIZED, k, images,
                                       [w for w in witnesses if w is not None])
        witnesses.append(witness)
    strict = [w for w in witnesses if w is not None]
    if tower.periodic:
        return MittagLefflerResult(MLStatus.STRICTLY_DECREASING, cap, images, strict)
    if steps < tower.last_explicit_stage:
        return MittagLefflerResult(MLStatus.UNDETERMINED, cap, images, strict)
    last_change = max((k + 1 for k, w in enumerate(witnesses) if w is not None), default=0)
    return MittagLefflerResult(MLStatus.STABILIZED, last_change, images, strict)


class Lim1Verdict(Enum):
    VANISHES = "vanishes"
    DOES_NOT_VANISH = "does_not_vanish"
    UNDETERMINED = "undetermined"


@dataclass
class Lim1Result:
    verdict: Lim1Verdict
    mittag_leffler: MittagLefflerResult
    certificate: str

    @property
    def vanishes(self) -> Optional[bool]:
        if self.verdict is Lim1Verdict.UNDETERMINED:
            return None
        return self.verdict is Lim1Verdict.VANISHES


def lim1_vanishes(tower: GroupTower, cap: Optional[int] = None) -> Lim1Result:
    """Decide lim¹ = 0 through the Mittag-Leffler condition at stage 0.

    A strict step Im_{k+1} ⊊ Im_k of a periodic tower with Im_{k+1} ≅ Im_k
    certifies strict descent forever: e maps Im_k onto an isomorphic group,
    so it is injective there, and injective maps preserve strict inclusions.
    """
    cap = get_config().ml_cap() if cap is None else cap
    if tower.is_finite:
        cap = max(cap, tower.max_order())
    if not tower.periodic:
        cap = max(cap, tower.last_explicit_stage)
    ml = mittag_leffler(tower, cap)
    if ml.status is MLStatus.STABILIZED:
        return Lim1Result(Lim1Verdict.VANISHES, ml, f"images stabilize from step {ml.step}")
    if tower.periodic:
        for k in range(len(ml.images) - 1):
            larger, smaller = ml.images[k], ml.images[k + 1]
            if (_strict_witness(larger, smaller) is not None
                    and larger.as_group().is_isomorphic(smaller.as_group())):
                return Lim1Result(Lim1Verdict.DOES_NOT_VANISH, ml,
                                  f"strict step {k} between isomorphic images "
                                  f"{larger.as_group()} ⊋ {smaller.as_group()}")
    return Lim1Result(Lim1Verdict.UNDETERMINED, ml, f"no certificate within cap {cap}")


# Moore spaces

@dataclass
class MooreSpace:
    """Cells: one basepoint, F0 n-cells, F1 (n+1)-cells attached by `attaching` (F0 x F1)."""
    group: FpGroup
    n: int
    attaching: IntMatrix

    def __post_init__(self):
        if not 1 <= self.n <= MAX_MOORE_DEGREE:
            raise ValidationError(f"Moore spaces need 1 <= n <= {MAX_MOORE_DEGREE}",
                                  invariant="moore-dim", witness=self.n)
        if self.attaching.rows != self.group.generator_count:
            raise ValidationError("attaching matrix does not match the generators",
                                  invariant="moore-shape")
        if smith_normal_form(self.attaching).kernel_basis():
            raise NonInjectivePresentationError("relators are not independent",
                                                invariant="independent-relators")
        if not FpGroup(self.attaching.rows, self.attaching).is_isomorphic(self.group):
            raise ConsistencyError("H_n of the Moore space differs from the group")

    @property
    def f0_rank(self) -> int:
        return self.attaching.rows

    @property
    def f1_rank(self) -> int:
        return self.attaching.cols

    def cochain_complex(self, coefficients: FpGroup = INTEGERS) -> CochainComplexFp:
        labels = {0: (("cell", 0, 0),),
                  self.n: tuple(("cell", self.n, i) for i in range(self.f0_rank)),
                  self.n + 1: tuple(("cell", self.n + 1, j) for j in range(self.f1_rank))}
        differentials = {self.n: self.attaching.transpose()}
        if self.n > 1:
            labels.update({d: () for d in range(1, self.n)})
        return CochainComplexFp(coefficients, labels, differentials)

    def cohomology(self, degree: int, coefficients: FpGroup = INTEGERS) -> FpGroup:
        return complex_cohomology(self.cochain_complex(coefficients), degree).group


def moore_space(group: FpGroup, n: int, reduce: bool = True) -> MooreSpace:
    """M(A, n); reduced presentations have one relator per torsion coefficient."""
    if reduce:
        canonical = group.canonical_group()
        k = canonical.generator_count
        torsion = canonical.torsion
        attaching = IntMatrix.from_columns(
            [tuple(d if i == j else 0 for i in range(k)) for j, d in enumerate(torsion)], k)
        return MooreSpace(canonical, n, attaching)
    return MooreSpace(group, n, group.relations)


@dataclass
class MooreStage:
    m: int
    k: int
    group: FpGroup
    space: MooreSpace


@dataclass
class MooreFiltration:
    stages: List[MooreStage]
    inclusions: List[GroupHom]
    colimit: ChainColimit
    group: FpGroup


def moore_filtration(injection: IntMatrix, n: int) -> MooreFiltration:
    """Filtration M(A_m, n) of M(A, n) for A = coker(i: Z^Q' → Z^Q).

    k_m is the largest k with i(first k basis vectors) inside the first m
    coordinates; A_m is presented by the restriction of i.
    """
    q = injection.rows
    if smith_normal_form(injection).kernel_basis():
        raise NonInjectivePresentationError("presentation map is not injective",
                                            invariant="injective-presentation")
    group = FpGroup(q, injection)
    if group.torsion:
        raise ValidationError("filtered group is not torsion-free", invariant="torsion-free",
                              witness=str(group))
    supports = [max((r for r in range(q) if injection[r, j]), default=-1)
                for j in range(injection.cols)]
    stages = []
    for m in range(1, q + 1):
        k = 0
        while k < injection.cols and supports[k] < m:
            k += 1
        restricted = injection.select_rows(range(m)).select_columns(range(k))
        stage_group = FpGroup(m, restricted)
        if stage_group.torsion:
            raise ValidationError("filtration stage has torsion", invariant="torsion-free",
                                  witness=m)
        stages.append(MooreStage(m, k, stage_group, moore_space(stage_group, n)))
    inclusions = []
    for a, b in zip(stages, stages[1:]):
        matrix = IntMatrix.from_rows([[1 if i == j else 0 for j in range(a.m)] for i in range(b.m)],
                                     a.m)
        inclusions.append(GroupHom(a.group, b.group, matrix))
    colimit = chain_colimit([s.group for s in stages], inclusions)
    if not colimit.group.is_isomorphic(group):
        raise ConsistencyError("colimit of the filtration differs from the group")
    return MooreFiltration(stages, inclusions, colimit, group)


# telescopes

@dataclass
class TelescopeComplex:
    """Total cochain complex of the mapping telescope of X_0 → X_1 → ... → X_N.

    T^q = ⊕ C_k^q ⊕ ⊕_{k<N} C_k^{q-1} with d(a, b) = (δa, Φ(a) - δb) and
    Φ(a)_k = f_k(a_{k+1}) - a_k, where f_k: C_{k+1} → C_k.
    """
    stages: List[CochainComplexFp]
    bonding: List[CochainMap]
    complex: CochainComplexFp = field(init=False)

    def __post_init__(self):
        if not self.stages:
            raise ValidationError("a telescope needs at least one stage", invariant="tower-shape")
        if len(self.bonding) != len(self.stages) - 1:
            raise ValidationError("one bonding map is needed per step", invariant="tower-shape")
        coefficients = self.stages[0].coefficients
        for k, f in enumerate(self.bonding):
            if f.source is not self.stages[k + 1] or f.target is not self.stages[k]:
                raise NonChainMapError("bonding map does not go from stage k+1 to stage k",
                                       invariant="chain-map", witness=k)
            f.verify()
        if any(s.coefficients != coefficients for s in self.stages):
            raise ValidationError("stages use different coefficients", invariant="coefficients")
        self.complex = self._assemble(coefficients)

    @property
    def depth(self) -> int:
        return len(self.stages)

    def _assemble(self, coefficients: FpGroup) -> CochainComplexFp:
        last = len(self.stages) - 1
        degrees = sorted({d for s in self.stages for d in s.degrees})
        top = max(degrees) + 1
        labels: Dict[int, Tuple] = {}
        for q in range(min(degrees), top + 1):
            a = [("a", k, lab) for k, s in enumerate(self.stages) for lab in s.labels.get(q, ())]
            b = [("b", k, lab) for k, s in enumerate(self.stages[:last])
                 for lab in s.labels.get(q - 1, ())]
            labels[q] = tuple(a + b)
        differentials = {}
        for q in range(min(degrees), top):
            rows = {lab: i for i, lab in enumerate(labels[q + 1])}
            matrix = [[0] * len(labels[q]) for _ in labels[q + 1]]
            for col, (kind, k, lab) in enumerate(labels[q]):
                stage = self.stages[k]
                if kind == "a":
                    j = stage.label_index(q)[lab]
                    d = stage.integer_coboundary(q)
                    for i, target in enumerate(stage.labels.get(q + 1, ())):
                        if d[i, j]:
                            matrix[rows[("a", k, target)]][col] += d[i, j]
                    if k < last:
                        matrix[rows[("b", k, lab)]][col] -= 1
                    if k > 0:
                        f = self.bonding[k - 1].component(q)
                        for i, target in enumerate(self.stages[k - 1].labels.get(q, ())):
                            if f[i, j]:
                                matrix[rows[("b", k - 1, target)]][col] += f[i, j]
                else:
                    j = stage.label_index(q - 1)[lab]
                    d = stage.integer_coboundary(q - 1)
                    for i, target in enumerate(stage.labels.get(q, ())):
                        if d[i, j]:
                            matrix[rows[("b", k, target)]][col] -= d[i, j]
            differentials[q] = IntMatrix.from_rows(matrix, len(labels[q]))
        return CochainComplexFp(coefficients, labels, differentials)

    def truncation(self, i: int) -> "TelescopeComplex":
        if not 0 <= i < self.depth:
            raise LevelIndexError("truncation index out of range", invariant="level-index",
                                  witness=i)
        return TelescopeComplex(self.stages[:i + 1], self.bonding[:i])

    def relative(self, i: int) -> CochainComplexFp:
        """Cochains vanishing on the telescope of stages 0..i."""
        if not 0 <= i < self.depth:
            raise LevelIndexError("exhaustion index out of range", invariant="exhaustion-index",
                                  witness=i)
        return self.complex.vanishing_on(
            lambda q, lab: (lab[0] == "a" and lab[1] <= i) or (lab[0] == "b" and lab[1] < i))

    def cohomology(self, n: int) -> CohomologyGroup:
        return complex_cohomology(self.complex, n)


def telescope(stages: Sequence[CochainComplexFp], bonding: Sequence[CochainMap]) -> TelescopeComplex:
    return TelescopeComplex(list(stages), list(bonding))


def multiplication_on_top(complex_: CochainComplexFp, degree: int, factor: int,
                          cycle: Dict, fundamental) -> CochainMap:
    """Identity plus (factor - 1)·u·z^T in the top degree: ×factor on H^top."""
    components = {q: IntMatrix.identity(complex_.rank(q)) for q in complex_.degrees}
    labels = complex_.labels[degree]
    index = complex_.label_index(degree)
    z = [cycle.get(lab, 0) for lab in labels]
    u = index[fundamental]
    rows = [[(1 if i == j else 0) + ((factor - 1) * z[j] if i == u else 0)
             for j in range(len(labels))] for i in range(len(labels))]
    components[degree] = IntMatrix.from_rows(rows, len(labels))
    cmap = CochainMap(complex_, complex_, components)
    cmap.verify()
    return cmap


# phantom filtrations

class PhantomSource(Protocol):
    """H^n(X) and H^n(X, X_i) for an exhaustion X_0 ⊆ ... ⊆ X_{L-1} = X."""

    def exhaustion_length(self) -> int: ...

    def group(self, i: Optional[int]) -> FpGroup: ...

    def transition(self, j: int, i: Optional[int]) -> GroupHom:
        """H^n(X, X_j) → H^n(X, X_i), or → H^n(X) when i is None."""
        ...


class CoverTowerPhantomSource:
    def __init__(self, tower: CoverTower, coefficients: FpGroup, n: int):
        self.tower = tower
        self.length = len(tower.require_exhaustion())
        self.absolute = cech_cohomology_truncated(tower, coefficients, n)
        self.relatives: List[RelativeCech] = [
            relative_cech_truncated(tower, i, coefficients, n, self.absolute)
            for i in range(self.length)]

    def exhaustion_length(self) -> int:
        return self.length

    def group(self, i: Optional[int]) -> FpGroup:
        return self.absolute.group if i is None else self.relatives[i].group

    def transition(self, j: int, i: Optional[int]) -> GroupHom:
        if i is None:
            return self.relatives[j].comparison
        return relative_transition(self.tower, self.relatives[j], self.relatives[i])


class TelescopePhantomSource:
    def __init__(self, telescope_: TelescopeComplex, n: int):
        self.telescope = telescope_
        self.n = n
        self.relatives = [telescope_.relative(i) for i in range(telescope_.depth)]

    def exhaustion_length(self) -> int:
        return self.telescope.depth

    def group(self, i: Optional[int]) -> FpGroup:
        cc = self.telescope.complex if i is None else self.relatives[i]
        return complex_cohomology(cc, self.n).group

    def transition(self, j: int, i: Optional[int]) -> GroupHom:
        target = self.telescope.complex if i is None else self.relatives[i]
        return induced_by_cochain_map(label_inclusion(self.relatives[j], target), self.n)


@dataclass
class PhantomFiltration:
    """Ph^0 ⊇ Ph^1 ⊇ ... inside H^n(X)."""
    group: FpGroup
    levels: List[Subgroup]

    def orders(self) -> List[Optional[int]]:
        return [s.order for s in self.levels]

    def is_zero(self, k: int) -> bool:
        return self.levels[k].is_trivial()


def phantom_filtration(source: PhantomSource, depth: int = 1) -> PhantomFiltration:
    """Ph^0 = ∩_i Ran(H(X, X_i) → H(X)); Ph^{k+1} = ∩_i image of Ph^k(X, X_i).

    Relative objects (X, X_i) are exhausted by the later sets X_j, j > i.
    """
    length = source.exhaustion_length()
    if length == 0:
        raise MissingExhaustionError("phantom filtration needs an exhaustion",
                                     invariant="exhaustion")
    indices: List[Optional[int]] = [None] + list(range(length))
    previous = {i: Subgroup.whole(source.group(i)) for i in indices}
    levels = []
    for _ in range(depth + 1):
        current = {}
        for i in indices:
            later = range(length) if i is None else range(i + 1, length)
            result = Subgroup.whole(source.group(i))
            for j in later:
                result = intersect(result, previous[j].image_under(source.transition(j, i)))
            current[i] = result
        for i in indices:
            if not current[i].is_subgroup_of(previous[i]):
                raise ConsistencyError("phantom filtration is not descending")
        levels.append(current[None])
        previous = current
    logger.info(f"Phantom filtration orders: {[s.order for s in levels]}")
    return PhantomFiltration(source.group(None), levels)


# degree-p telescope

@dataclass
class TelescopePipeline:
    p: int
    d: int
    truncation: int
    telescope: TelescopeComplex
    stage_cohomology: FpGroup
    bonding_factor: int
    tower: GroupTower
    lim1: Lim1Result
    truncation_cohomology: List[Tuple[FpGroup, FpGroup]]
    phantom: PhantomFiltration

    @property
    def lim1_vanishes(self) -> bool:
        return self.lim1.verdict is Lim1Verdict.VANISHES


def degree_p_telescope_pipeline(p: int, d: int, truncation: int,
                                cap: Optional[int] = None) -> TelescopePipeline:
    """Telescope of S^d → S^d → ... by degree-p maps, truncated after N stages.

    The bonding maps induce ×p on H^d, so the tower Hom(H_d(stage), Z) is
    (Z, ×p); its lim¹ stands in for Ext¹(Z[1/p], Z), which is not computed.
    """
    if p < 1 or d < 1 or truncation < 0:
        raise ValidationError("pipeline needs p >= 1, d >= 1 and N >= 0", invariant="pipeline-args",
                              witness=(p, d, truncation))
    if d > MAX_TELESCOPE_DIMENSION or truncation > MAX_TELESCOPE_LENGTH:
        raise ValidationError(f"pipeline is limited to d <= {MAX_TELESCOPE_DIMENSION} and "
                              f"N <= {MAX_TELESCOPE_LENGTH}", invariant="pipeline-args",
                              witness=(d, truncation))
    sphere = sphere_model(d)
    stage = cochain_complex(SimplicialPair(sphere), INTEGERS)
    cycle = homology_top_cycle(sphere)
    bond = multiplication_on_top(stage, d, p, cycle, tuple(range(d + 1)))
    stages = [stage] * (truncation + 1)
    tel = TelescopeComplex(stages, [bond] * truncation)
    induced = induced_by_cochain_map(bond, d)
    factor = induced.canonical_matrix()[0, 0]
    h_stage = induced.source
    tower = GroupTower.multiplication(h_stage.canonical_group(), factor)
    verdict = lim1_vanishes(tower, cap)
    per_truncation = []
    for i in range(truncation + 1):
        part = tel.truncation(i)
        per_truncation.append((part.cohomology(d).group, part.cohomology(d + 1).group))
    phantom = phantom_filtration(TelescopePhantomSource(tel, d + 1), depth=1)
    logger.info(f"Degree-{p} telescope on S^{d}, N={truncation}: lim1 {verdict.verdict.value}")
    return TelescopePipeline(p, d, truncation, tel, h_stage, factor, tower, verdict,
                             per_truncation, phantom)
