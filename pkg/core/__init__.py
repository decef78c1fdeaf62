"""
Core functionality for cechtool.
"""

from .errors import (BudgetExceededError, ConsistencyError, FormatError, ToolkitError,
                     ValidationError)
from .intmatrix import IntMatrix, SmithDecomposition, smith_normal_form
from .exact_abelian import (FpGroup, GroupHom, Subgroup, cokernel, ext_group, hom_group, image,
                            intersect, kernel, quotient)
from .extensions import SymmetricCocycle, aut_orbits_on_ext, cocycle_ext_group
from .simplicial import (SimplicialComplex, SimplicialMap, SimplicialPair, cohomology, degree,
                         induced_map, sphere_model, subdivide)
from .covers import (Cover, CoverTower, RefinementMap, TowerCochain, canonical_map,
                     cech_cohomology_truncated, cochain_metric, nerve, relative_cech_truncated)
from .obstruction import (SubdividedMap, chi_class, classify_maps, difference_cochain,
                          obstruction_cocycle, theta_finite_stage)
from .towers import (GroupTower, degree_p_telescope_pipeline, lim1_vanishes, mittag_leffler,
                     moore_filtration, moore_space, phantom_filtration, telescope)
from .report import Report, parse_machine_trailer

__all__ = [
    'ToolkitError',
    'ValidationError',
    'FormatError',
    'BudgetExceededError',
    'ConsistencyError',
    'IntMatrix',
    'SmithDecomposition',
    'smith_normal_form',
    'FpGroup',
    'GroupHom',
    'Subgroup',
    'kernel',
    'image',
    'cokernel',
    'intersect',
    'quotient',
    'hom_group',
    'ext_group',
    'SymmetricCocycle',
    'cocycle_ext_group',
    'aut_orbits_on_ext',
    'SimplicialComplex',
    'SimplicialMap',
    'SimplicialPair',
    'cohomology',
    'induced_map',
    'degree',
    'sphere_model',
    'subdivide',
    'Cover',
    'CoverTower',
    'RefinementMap',
    'TowerCochain',
    'nerve',
    'cech_cohomology_truncated',
    'relative_cech_truncated',
    'cochain_metric',
    'canonical_map',
    'SubdividedMap',
    'obstruction_cocycle',
    'difference_cochain',
    'chi_class',
    'classify_maps',
    'theta_finite_stage',
    'GroupTower',
    'mittag_leffler',
    'lim1_vanishes',
    'moore_space',
    'moore_filtration',
    'telescope',
    'phantom_filtration',
    'degree_p_telescope_pipeline',
    'Report',
    'parse_machine_trailer',
]
