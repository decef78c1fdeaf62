#!/usr/bin/env python3
"""
Tests for obstruction cocycles, difference cochains, χ classes and the
classification of maps into spheres
"""

import random

import pytest

from core.covers import canonical_map, circle_tower, uniform_weights
from core.errors import (AgreementError, DimensionHypothesisError, LevelIndexError,
                         SubdivisionBudgetError, ValidationError)
from core.obstruction import (SphereTarget, SubdividedMap, chi_class, classify_maps,
                              difference_cochain, is_deformation_cocycle, is_extensible,
                              obstruction_class_vanishes, obstruction_cocycle,
                              simplicial_homotopy_chi_check, theta_finite_stage)
from core.simplicial import (SimplicialMap, SimplicialPair, boundary_faces, full_simplex,
                             hexagon, prism, sphere_model)


def _coboundary(values, simplices):
    return {sigma: sum((-1 if i % 2 else 1) * values.get(face, 0)
                       for i, face in boundary_faces(sigma))
            for sigma in simplices}


def test_sphere_targets():
    target = SphereTarget(2)
    assert target.basepoint == 3
    assert target.fundamental_simplex == (0, 1, 2)
    with pytest.raises(ValidationError):
        SphereTarget(0)


def test_boundary_of_triangle_is_obstructed(circle):
    pair = SimplicialPair(full_simplex(2))
    c = obstruction_cocycle(SimplicialMap.identity(circle), pair, 1)
    assert c.values == {(0, 1, 2): 1}
    result = is_extensible(c)
    assert not result.extensible
    assert result.witnesses == [(0, 1, 2)]
    # H^2 of a disk is zero
    certificate = obstruction_class_vanishes(c)
    assert certificate.vanishes
    assert certificate.witness


def test_constant_map_extends(circle):
    pair = SimplicialPair(full_simplex(2))
    c = obstruction_cocycle(SubdividedMap.constant(circle, 1), pair, 1)
    assert is_extensible(c).extensible
    assert c.nonzero_cells() == []


def test_difference_of_identity_and_reflection(circle):
    pair = SimplicialPair(circle)
    identity = SimplicialMap.identity(circle)
    reflection = SimplicialMap(circle, circle, {0: 1, 1: 0, 2: 2})
    d = difference_cochain(identity, reflection, pair, 1, mode="canonical")
    assert d.values[(0, 1)] == 2
    assert d.total() == 2
    assert is_deformation_cocycle(d)
    with pytest.raises(AgreementError):
        difference_cochain(identity, reflection, pair, 1)
    with pytest.raises(ValidationError):
        difference_cochain(identity, reflection, pair, 1, mode="fuzzy")


def test_difference_of_equal_maps_is_zero(circle):
    identity = SimplicialMap.identity(circle)
    d = difference_cochain(identity, identity, SimplicialPair(circle), 1)
    assert not any(d.values.values())


@pytest.mark.parametrize("vertex_map,expected", [
    ({0: 0, 1: 1, 2: 2}, 1),
    ({0: 1, 1: 0, 2: 2}, -1),
    ({0: 2, 1: 2, 2: 2}, 0),
])
def test_chi_evaluates_to_the_degree(circle, vertex_map, expected):
    chi = chi_class(SimplicialMap(circle, circle, vertex_map), SimplicialPair(circle), 1)
    assert str(chi.group) == "Z"
    assert chi.evaluation == expected
    assert chi.is_zero == (expected == 0)


def test_chi_of_double_wrap(circle):
    wrap = SimplicialMap(hexagon(), circle, {v: v % 3 for v in range(6)})
    chi = chi_class(wrap, SimplicialPair(hexagon()), 1)
    assert chi.evaluation == 2
    assert abs(chi.element[0]) == 2


def test_chi_of_a_subdivided_map(circle):
    # sd(circle) numbers its vertices 0, 1, 2 and then the edges (0,1), (0,2), (1,2)
    f = SubdividedMap(circle, 1, {0: 0, 3: 1, 1: 2, 5: 0, 2: 1, 4: 2}, depth=1)
    chi = chi_class(f, SimplicialPair(circle), 1)
    assert abs(chi.evaluation) == 2


def test_subdivision_budget(circle):
    with pytest.raises(SubdivisionBudgetError) as info:
        SubdividedMap(circle, 1, {}, depth=5, budget=3)
    assert info.value.required == 5
    with pytest.raises(SubdivisionBudgetError):
        SubdividedMap(circle, 1, {}, depth=4)


@pytest.mark.parametrize("n,seed", [(1, 11), (2, 12)])
def test_obstruction_identities_on_random_maps(n, seed):
    rng = random.Random(seed)
    ambient = full_simplex(n + 2)
    pair = SimplicialPair(ambient)
    domain = ambient.skeleton(n)
    target = sphere_model(n)
    cells = ambient.simplices_of_dim(n + 1)
    above = ambient.simplices_of_dim(n + 2)
    nonzero = 0
    for _ in range(200):
        f = SimplicialMap(domain, target, {v: rng.randrange(n + 2) for v in domain.vertices})
        g = SimplicialMap(domain, target, {v: rng.randrange(n + 2) for v in domain.vertices})
        cf = obstruction_cocycle(f, pair, n)
        cg = obstruction_cocycle(g, pair, n)
        assert not any(_coboundary(cf.values, above).values())
        assert obstruction_class_vanishes(cf).vanishes
        d = difference_cochain(f, g, pair, n, mode="canonical")
        expected = {s: cf.values[s] - cg.values[s] for s in cells}
        assert _coboundary(d.values, cells) == expected
        nonzero += bool(cf.nonzero_cells())
    assert nonzero > 0


def test_homotopic_ends_of_a_prism(circle):
    cylinder = prism(circle)
    h = SimplicialMap(cylinder.complex, circle, {w: w // 2 for w in cylinder.complex.vertices})
    assert simplicial_homotopy_chi_check(h, cylinder, 1)


def test_classify_maps_from_the_circle(circle):
    result = classify_maps(SimplicialPair(circle), 1)
    assert result.exhaustive
    assert result.candidates == 27
    assert str(result.group) == "Z"
    assert set(result.realizations) == {(-1,), (0,), (1,)}
    assert result.unreached() is None
    assert result.representative((0,)) is not None


def test_classify_samples_above_the_budget(torus):
    result = classify_maps(SimplicialPair(torus), 2, budget=20, seed=5)
    assert not result.exhaustive
    assert result.candidates == 20
    assert str(result.group) == "Z"


def test_classify_needs_low_dimension():
    with pytest.raises(DimensionHypothesisError):
        classify_maps(SimplicialPair(full_simplex(2)), 1)


def test_theta_at_a_finite_stage():
    tower = circle_tower(6, [3, 6])
    p = SimplicialMap.identity(tower.nerve(0))
    images = canonical_map(tower.levels[0], uniform_weights(tower.levels[0]))
    theta = theta_finite_stage(tower, 0, p, 1, images)
    assert theta.stable
    assert str(theta.group) == "Z"
    assert abs(theta.colimit_class[0]) == 1
    with pytest.raises(LevelIndexError):
        theta_finite_stage(tower, 1, p, 1)
