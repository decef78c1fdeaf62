#!/usr/bin/env python3
"""
Tests for finitely presented abelian groups, Hom and Ext
"""

import pytest

from core.errors import InvalidMapError, ValidationError
from core.exact_abelian import (FpGroup, GroupHom, Subgroup, chain_colimit, cokernel,
                                direct_sum, ext_functorial, ext_group, hom_group, image,
                                intersect, kernel, quotient, quotient_of_subgroups,
                                subgroup_equal)
from core.intmatrix import IntMatrix

Z = FpGroup.free(1)


def G(literal):
    return FpGroup.parse(literal)


@pytest.mark.parametrize("literal,canonical", [
    ("Z", "Z"),
    ("0", "0"),
    ("Z^2 + Z/4", "Z^2 + Z/4"),
    ("Z/4 + Z^2", "Z^2 + Z/4"),
    ("Z/6 + Z/4", "Z/2 + Z/12"),
    ("Z/2 + Z/3", "Z/6"),
    ("Z/1", "0"),
])
def test_canonical_form(literal, canonical):
    assert str(G(literal)) == canonical


@pytest.mark.parametrize("literal", ["", "Z/0", "Q", "Z^", "Z/-2", "Z + + Z"])
def test_bad_literals_are_rejected(literal):
    with pytest.raises(ValidationError):
        G(literal)


def test_presentation_by_relation_matrix():
    group = FpGroup(2, IntMatrix.from_rows([[2, 4], [6, 8]]))
    assert group.invariants() == ((2, 4), 0)
    assert group.order == 8
    assert FpGroup(2, IntMatrix.from_rows([[2], [0]])).invariants() == ((2,), 1)


def test_element_arithmetic():
    z6 = G("Z/6")
    assert z6.is_zero((6,))
    assert z6.equal((7,), (1,))
    assert not z6.is_zero((3,))
    klein = G("Z/2 + Z/2")
    assert len(list(klein.elements())) == 4
    assert klein.element_order((1, 1)) == 2
    mixed = G("Z + Z/4")
    c = mixed.reduce(mixed.lift((1, 5)))
    assert mixed.element_order(c) == 0
    with pytest.raises(ValidationError):
        list(mixed.elements())


def test_lift_and_reduce_are_inverse():
    group = FpGroup(2, IntMatrix.from_rows([[2, 4], [6, 8]]))
    for element in group.elements():
        assert group.reduce(group.lift(element)) == element


def test_homomorphism_must_respect_relations():
    with pytest.raises(InvalidMapError):
        GroupHom(G("Z/2"), Z, IntMatrix.from_rows([[1]]))
    h = GroupHom(G("Z/2"), G("Z/4"), IntMatrix.from_rows([[2]]))
    assert not h.is_zero()
    assert not h.is_isomorphism()


def test_kernel_image_cokernel():
    h = GroupHom(Z, G("Z/6"), IntMatrix.from_rows([[2]]))
    assert image(h).order == 3
    assert kernel(h).as_group().invariants() == ((), 1)
    assert str(cokernel(h)) == "Z/2"
    assert kernel(h).contains((3,))
    assert not kernel(h).contains((1,))


def test_subgroup_calculus_in_z():
    meet = intersect(Subgroup(Z, ((4,),)), Subgroup(Z, ((6,),)))
    assert subgroup_equal(meet, Subgroup(Z, ((12,),)))
    assert str(quotient(G("Z/12"), Subgroup(G("Z/12"), ((4,),)))) == "Z/4"
    sq = quotient_of_subgroups(Subgroup(Z, ((2,),)), Subgroup(Z, ((6,),)))
    assert str(sq.group) == "Z/3"


def test_subgroup_equality_ignores_generators():
    z12 = G("Z/12")
    assert subgroup_equal(Subgroup(z12, ((2,),)), Subgroup(z12, ((10,), (4,))))
    assert not subgroup_equal(Subgroup(z12, ((2,),)), Subgroup(z12, ((4,),)))


def test_direct_sum_and_colimit():
    assert str(direct_sum([G("Z/2"), G("Z/3"), Z])) == "Z + Z/6"
    double = GroupHom(Z, Z, IntMatrix.from_rows([[2]]))
    colimit = chain_colimit([Z, Z, Z], [double, double])
    assert colimit.group.invariants() == ((), 1)
    with pytest.raises(ValidationError):
        chain_colimit([Z, Z], [])


@pytest.mark.parametrize("a,b,expected", [
    ("Z/4", "Z/6", "Z/2"),
    ("Z", "Z/6", "Z/6"),
    ("Z/6", "Z", "0"),
    ("Z^2", "Z", "Z^2"),
    ("Z/2 + Z/2", "Z/2", "Z/2 + Z/2"),
])
def test_hom_groups(a, b, expected):
    assert str(hom_group(G(a), G(b)).group) == expected


def test_hom_decode_encode():
    hom = hom_group(G("Z/4"), G("Z/8"))
    assert str(hom.group) == "Z/4"
    for element in hom.group.elements():
        assert hom.encode(hom.decode(hom.group.lift(element))) == element


@pytest.mark.parametrize("a,b,expected", [
    ("Z/6", "Z", "Z/6"),
    ("Z", "Z/3", "0"),
    ("Z/4", "Z/6", "Z/2"),
    ("Z/2 + Z/2", "Z/2", "Z/2 + Z/2"),
    ("Z^2 + Z/3", "Z", "Z/3"),
    ("Z/2", "Z", "Z/2"),
])
def test_ext_groups(a, b, expected):
    assert str(ext_group(G(a), G(b)).group) == expected


def test_ext_does_not_depend_on_the_resolution():
    group = FpGroup(2, IntMatrix.from_rows([[2, 4], [6, 8]]))
    for b in ("Z", "Z/2", "Z/4 + Z"):
        kernel_ext = ext_group(group, G(b), resolution="kernel").group
        reduced_ext = ext_group(group, G(b), resolution="reduced").group
        assert kernel_ext.is_isomorphic(reduced_ext)
    with pytest.raises(ValidationError):
        ext_group(group, Z, resolution="projective")


def test_ext_is_functorial():
    z4 = G("Z/4")
    double = GroupHom(z4, z4, IntMatrix.from_rows([[2]]))
    induced = ext_functorial(double, Z)
    assert image(induced).order == 2
    identity = ext_functorial(GroupHom.identity(z4), Z)
    assert identity.is_isomorphism()
