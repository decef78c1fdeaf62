#!/usr/bin/env python3
"""
Tests for covers, nerves, cover towers, truncated Čech cohomology and the
cochain metric
"""

from fractions import Fraction

import pytest

from core.covers import (Cover, CoverTower, RefinementMap, TowerCochain, agreement_profile,
                         canonical_map, cech_cohomology_truncated, circle_arc_cover,
                         circle_tower, cochain_metric, common_refinement_level, nerve,
                         relative_cech_truncated, restricted_nerve, simplicial_approximation,
                         star_condition_check, uniform_weights)
from core.errors import (ApproximationError, BudgetExceededError, DegreeMismatchError,
                         InvalidRefinementError, LevelIndexError, MissingExhaustionError,
                         ValidationError, WeightSupportError)
from core.exact_abelian import FpGroup
from core.simplicial import SimplicialComplex, SimplicialMap, cohomology, sphere_model


def test_nerve_of_circle_cover(circle_cover, integers):
    n = nerve(circle_cover)
    assert n.f_vector() == (3, 3)
    assert n == sphere_model(1)
    assert str(cohomology(n, integers, 1).group) == "Z"


def test_nerve_sees_common_points():
    cover = Cover.from_members([{0, 1}, {1, 2}, {1, 3}])
    assert nerve(cover).f_vector() == (3, 3, 1)
    assert nerve(Cover.from_members([{0}, {1}])).component_count() == 2


def test_restricted_nerve(circle_cover):
    part = restricted_nerve(circle_cover, {1})
    assert part.vertices == (0,)
    assert restricted_nerve(circle_cover, {2}).f_vector() == (2, 1)
    assert restricted_nerve(circle_cover, set()).f_vector() == ()


def test_restricted_nerve_keeps_every_simplex_of_meeting_members(circle_cover):
    # all three arcs meet {0, 3}, but only U0 and U2 share a point inside it
    assert restricted_nerve(circle_cover, {0, 3}) == nerve(circle_cover)
    arcs = circle_arc_cover(12, 3)
    part = restricted_nerve(arcs, {2, 6})
    assert part.vertices == (0, 1)
    assert (0, 1) in part.simplices


def test_metric_sees_edges_between_meeting_members(integers):
    tower = circle_tower(12, [3], exhaustion=[{2, 6}, range(12)])
    zero = TowerCochain(0, 1, integers, {})
    edge = TowerCochain(0, 1, integers, {(0, 1): (1,)})
    assert agreement_profile(zero, edge, tower) == [1, 1]
    assert cochain_metric(zero, edge, tower) == Fraction(3, 4)
    # relative to the arc U0 ∪ U1 rather than to two isolated points
    assert str(relative_cech_truncated(tower, 0, integers, 1).group) == "Z"


def test_cover_must_cover_its_ground_set():
    with pytest.raises(ValidationError):
        Cover(frozenset(range(3)), (frozenset({0, 1}),))
    with pytest.raises(ValidationError):
        Cover(frozenset(range(2)), (frozenset({0, 1, 2}),))


def test_refinements_are_checked(circle_cover):
    fine = circle_arc_cover(6, 6)
    RefinementMap(fine, circle_cover, tuple(j // 2 for j in range(6)))
    with pytest.raises(InvalidRefinementError):
        RefinementMap(fine, circle_cover, (1, 0, 1, 1, 2, 2))
    with pytest.raises(InvalidRefinementError):
        RefinementMap(fine, circle_cover, (0, 0, 1))


def test_circle_arc_cover_arguments():
    with pytest.raises(ValidationError):
        circle_arc_cover(6, 4)
    with pytest.raises(ValidationError):
        circle_arc_cover(4, 2)


def test_tower_composites_and_levels():
    tower = circle_tower(12, [3, 6, 12])
    assert tower.depth == 3
    assert tower.composite(2, 0).assignment == tuple(j // 4 for j in range(12))
    assert tower.nerve_map(2, 0).target == tower.nerve(0)
    with pytest.raises(LevelIndexError):
        tower.composite(0, 2)
    with pytest.raises(LevelIndexError):
        tower.nerve(3)
    repeated = tower.with_repeated_level(1)
    assert repeated.depth == 4


def test_exhaustion_must_be_nested_and_complete(circle_cover):
    with pytest.raises(ValidationError):
        CoverTower.constant(circle_cover, 1, exhaustion=[{0, 1}, {0}])
    with pytest.raises(ValidationError):
        CoverTower.constant(circle_cover, 1, exhaustion=[{0, 1}])
    with pytest.raises(MissingExhaustionError):
        CoverTower.constant(circle_cover, 1).require_exhaustion()


def test_truncated_cech_of_circle_tower(integers):
    tower = circle_tower(12, [3, 6, 12])
    cech = cech_cohomology_truncated(tower, integers, 1)
    assert [str(h.group) for h in cech.levels] == ["Z", "Z", "Z"]
    assert str(cech.group) == "Z"
    assert cech.stable_from() == 0
    for bond in cech.bonding:
        assert bond.is_isomorphism()


def test_truncated_cech_in_degree_zero(integers):
    tower = circle_tower(6, [3, 6])
    assert str(cech_cohomology_truncated(tower, integers, 0).group) == "Z"
    assert str(cech_cohomology_truncated(tower, FpGroup.cyclic(3), 1).group) == "Z/3"


def test_refinement_invariance_of_truncated_cech(integers):
    tower = circle_tower(6, [3, 6])
    before = cech_cohomology_truncated(tower, integers, 1).group
    after = cech_cohomology_truncated(tower.with_repeated_level(0), integers, 1).group
    assert before.is_isomorphic(after)


def test_relative_cech_of_points(three_point_tower, integers):
    relative = relative_cech_truncated(three_point_tower, 0, integers, 0)
    assert relative.group.invariants() == ((), 2)
    assert relative.comparison_image().as_group().invariants() == ((), 2)
    full = relative_cech_truncated(three_point_tower, 2, integers, 0)
    assert full.group.is_trivial
    with pytest.raises(LevelIndexError):
        relative_cech_truncated(three_point_tower, 3, integers, 0)


def test_metric_of_bump_cochain(three_point_tower, integers):
    zero = TowerCochain(0, 0, integers, {})
    bump = TowerCochain(0, 0, integers, {(1,): (1,)})
    assert agreement_profile(zero, bump, three_point_tower) == [0, 1, 1]
    assert cochain_metric(zero, bump, three_point_tower) == Fraction(3, 8)
    assert cochain_metric(bump, zero, three_point_tower) == Fraction(3, 8)
    assert cochain_metric(bump, bump, three_point_tower) == 0


def test_metric_ultrametric_inequality(three_point_tower, integers):
    a = TowerCochain(0, 0, integers, {(0,): (1,)})
    b = TowerCochain(0, 0, integers, {(1,): (1,)})
    c = TowerCochain(0, 0, integers, {(2,): (1,)})
    ab = cochain_metric(a, b, three_point_tower)
    bc = cochain_metric(b, c, three_point_tower)
    ac = cochain_metric(a, c, three_point_tower)
    assert ac <= max(ab, bc)
    assert ab == Fraction(7, 8)


def test_metric_rejects_mismatched_cochains(three_point_tower, integers):
    a = TowerCochain(0, 0, integers, {})
    with pytest.raises(DegreeMismatchError):
        cochain_metric(a, TowerCochain(0, 1, integers, {}), three_point_tower)
    with pytest.raises(DegreeMismatchError):
        cochain_metric(a, TowerCochain(0, 0, FpGroup.cyclic(2), {}), three_point_tower)


def test_metric_needs_an_exhaustion(circle_cover, integers):
    tower = CoverTower.constant(circle_cover, 1)
    a = TowerCochain(0, 0, integers, {})
    with pytest.raises(MissingExhaustionError):
        cochain_metric(a, a, tower)


def test_canonical_map_of_uniform_weights(circle_cover):
    weights = uniform_weights(circle_cover)
    images = canonical_map(circle_cover, weights)
    assert images[1] == {0: Fraction(1)}
    assert images[2] == {0: Fraction(1, 2), 1: Fraction(1, 2)}
    identity = SimplicialMap.identity(nerve(circle_cover))
    assert star_condition_check(images, identity, circle_cover).holds


def test_canonical_map_requires_positive_weights(circle_cover):
    weights = uniform_weights(circle_cover)
    weights[2] = {0: Fraction(1)}
    with pytest.raises(WeightSupportError):
        canonical_map(circle_cover, weights)
    weights[2] = {0: Fraction(1, 2), 2: Fraction(1, 2)}
    with pytest.raises(WeightSupportError):
        canonical_map(circle_cover, weights)
    weights[2] = {0: Fraction(1, 3), 1: Fraction(1, 3)}
    with pytest.raises(ValidationError):
        canonical_map(circle_cover, weights)


def test_simplicial_approximation_of_canonical_map(circle_cover):
    images = canonical_map(circle_cover, uniform_weights(circle_cover))
    p = simplicial_approximation(circle_cover, images, nerve(circle_cover))
    assert p.vertex_map == {0: 0, 1: 1, 2: 2}
    with pytest.raises(ApproximationError):
        simplicial_approximation(circle_cover,
                                 {x: {0: Fraction(1, 2), 1: Fraction(1, 2)} for x in range(6)},
                                 SimplicialComplex.from_maximal([(0,), (1,)]))


def test_common_refinement_level_of_identical_maps(integers):
    tower = circle_tower(6, [3, 6])
    p = SimplicialMap.identity(tower.nerve(0))
    assert common_refinement_level(tower, p, 0, p, 0, integers, 1, (1,)) == 0
    q = p.compose(tower.nerve_map(1, 0))
    assert common_refinement_level(tower, p, 0, q, 1, integers, 1, (1,)) == 1


def test_nerve_of_heavily_overlapping_cover_is_refused():
    crowded = Cover.from_members([{0, i} for i in range(1, 41)])
    with pytest.raises(BudgetExceededError):
        nerve(crowded)
    with pytest.raises(BudgetExceededError):
        restricted_nerve(crowded, {1})
    assert nerve(Cover.from_members([{0, i} for i in range(1, 11)])).dimension == 9
