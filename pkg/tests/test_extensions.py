#!/usr/bin/env python3
"""
Tests for symmetric cocycles, extension classes and automorphism orbits
"""

import itertools

import pytest

from core.errors import BudgetExceededError, ValidationError
from core.exact_abelian import FpGroup, ext_group
from core.extensions import (SymmetricCocycle, aut_orbits_on_ext, automorphisms,
                             cocycle_ext_classical, cocycle_ext_group, extension_group_of)

FINITE = ["Z/2", "Z/3", "Z/4", "Z/6", "Z/2 + Z/2"]


def G(literal):
    return FpGroup.parse(literal)


@pytest.mark.parametrize("source,coefficients", list(itertools.product(FINITE, repeat=2)))
def test_cocycle_classes_match_resolution_ext(source, coefficients):
    a, b = G(source), G(coefficients)
    by_cocycles = cocycle_ext_classical(a, b).group
    by_resolution = ext_group(a, b).group
    assert by_cocycles.is_isomorphic(by_resolution)


@pytest.mark.parametrize("coefficients,domain", [("Z/2", "Z/2"), ("Z/3", "Z/2"), ("Z/2", "Z/3")])
def test_enumeration_agrees_with_linear_method(coefficients, domain):
    a, b = G(coefficients), G(domain)
    linear = cocycle_ext_group(a, b, method="linear").group
    enumerated = cocycle_ext_group(a, b, method="enumerate").group
    assert linear.is_isomorphic(enumerated)


def test_enumeration_respects_the_budget():
    with pytest.raises(BudgetExceededError) as info:
        cocycle_ext_group(G("Z/2"), G("Z/3"), method="enumerate", budget=100)
    assert info.value.required == 2 ** 9


def test_coboundaries_have_zero_class():
    a, b = G("Z/2"), G("Z/4")
    ext = cocycle_ext_group(a, b)
    h = {x: (x[0] % 2,) for x in b.elements()}
    table = SymmetricCocycle.coboundary_of(a, b, h)
    assert table.is_cocycle()
    assert ext.is_coboundary(table)


def test_representatives_are_cocycles_of_their_class():
    ext = cocycle_ext_group(G("Z/2"), G("Z/2 + Z/2"))
    assert str(ext.group) == "Z/2 + Z/2"
    for element in ext.group.elements():
        table = ext.table_of(element)
        assert table.is_cocycle()
        assert ext.class_of(table) == element


def test_baer_sum_adds_classes():
    ext = cocycle_ext_group(G("Z/3"), G("Z/3"))
    one = ext.table_of((1,))
    assert ext.class_of(one + one) == (2,)
    assert ext.class_of(one + one + one) == (0,)


def test_middle_groups_of_extensions_of_z2_by_z2():
    ext = cocycle_ext_group(G("Z/2"), G("Z/2"))
    assert extension_group_of(ext.table_of((0,))).invariants() == ((2, 2), 0)
    assert extension_group_of(ext.table_of((1,))).invariants() == ((4,), 0)


def test_infinite_groups_are_rejected():
    with pytest.raises(ValidationError):
        cocycle_ext_group(FpGroup.free(1), G("Z/2"))
    with pytest.raises(ValidationError):
        aut_orbits_on_ext(G("Z + Z/2"))


def test_orbits_on_ext_of_z4():
    orbits = aut_orbits_on_ext(G("Z/4"))
    assert str(orbits.ext) == "Z/4"
    assert orbits.automorphism_count == 2
    assert orbits.orbit_count == 3
    assert orbits.sizes == [1, 1, 2]


def test_orbits_on_ext_of_klein_group():
    orbits = aut_orbits_on_ext(G("Z/2 + Z/2"))
    assert orbits.automorphism_count == 6
    assert orbits.sizes == [1, 3]


def test_automorphism_enumeration_budget():
    assert len(automorphisms(G("Z/6"))) == 2
    with pytest.raises(BudgetExceededError):
        aut_orbits_on_ext(G("Z/4"), budget=1)
