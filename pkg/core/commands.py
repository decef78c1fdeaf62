"""
Command implementations behind the command-line front end.

Each command takes the parsed argparse namespace and returns a Report.
Inputs are loaded through core.formats; anything unexpected raised while
reading them is reported as a format error.
"""

import logging
from contextlib import contextmanager
from typing import Callable, Dict, Iterator, List, Optional

from .covers import agreement_profile, cech_cohomology_truncated, cochain_metric, nerve
from .errors import FormatError, ToolkitError, ValidationError
from .exact_abelian import FpGroup, ext_group, hom_group, parse_group_literal
from .extensions import aut_orbits_on_ext, cocycle_ext_classical
from .formats import (ParsedMap, cover_from_document, gtower_from_document, load_map, load_pair,
                      load_tcochain, load_tower, matrix_from_document, read_file)
from .obstruction import (SubdividedMap, chi_class, classify_maps, difference_cochain,
                          is_deformation_cocycle, is_extensible, obstruction_class_vanishes,
                          obstruction_cocycle, theta_finite_stage)
from .report import Report
from .simplicial import SimplicialPair, cohomology
from .towers import (CoverTowerPhantomSource, degree_p_telescope_pipeline, lim1_vanishes,
                     moore_filtration, moore_space, phantom_filtration)

logger = logging.getLogger(__name__)

INTEGERS = FpGroup.free(1)


@contextmanager
def parsing(source: str) -> Iterator[None]:
    """Report any non-toolkit failure while reading `source` as a format error."""
    try:
        yield
    except ToolkitError:
        raise
    except (ValueError, TypeError, KeyError, IndexError, AttributeError, RecursionError) as e:
        raise FormatError(f"malformed input ({type(e).__name__}: {e})", None, source) from e


def _group(literal: str) -> FpGroup:
    with parsing(literal):
        return parse_group_literal(literal)


def _pair(argument: str) -> SimplicialPair:
    with parsing(argument):
        return load_pair(argument)


def _map(path: str) -> ParsedMap:
    with parsing(path):
        return load_map(path)


def _sphere_map(parsed: ParsedMap, path: str) -> SubdividedMap:
    if parsed.sphere is None:
        raise ValidationError("map must target a sphere model (`sphere: n`)",
                              invariant="sphere-target", witness=path)
    return SubdividedMap(parsed.pair.complex, parsed.sphere, parsed.vertex_map, parsed.depth)


def _ambient_pair(args, parsed: ParsedMap) -> SimplicialPair:
    if getattr(args, "complex", None):
        return _pair(args.complex)
    return parsed.pair


def _values(values: Dict) -> List[str]:
    return [" ".join(str(v) for v in s) + f"={x}" for s, x in sorted(values.items()) if x]


# algebra

def cmd_snf(args) -> Report:
    with parsing(args.matrix):
        matrix = matrix_from_document(read_file(args.matrix, "intmatrix"))
    group = FpGroup(matrix.rows, matrix)
    smith = group.smith
    smith.verify(unimodular=True)
    report = Report("snf")
    report.say(f"Matrix {matrix.rows} x {matrix.cols}, rank {smith.rank}")
    report.say(f"Invariant factors: {list(smith.invariant_factors)}")
    report.say(f"Cokernel: {group}")
    report.record("shape", [matrix.rows, matrix.cols])
    report.record("rank", smith.rank)
    report.record("invariant_factors", list(smith.invariant_factors))
    report.record("cokernel", str(group))
    return report


def cmd_hom(args) -> Report:
    a, b = _group(args.a), _group(args.b)
    result = hom_group(a, b).group
    report = Report("hom").say(f"Hom({a}, {b}) = {result}")
    report.record("hom", str(result))
    return report


def cmd_ext(args) -> Report:
    a, b = _group(args.a), _group(args.b)
    result = ext_group(a, b, resolution=args.resolution).group
    report = Report("ext").say(f"Ext({a}, {b}) = {result}")
    report.record("ext", str(result))
    if args.cocycles:
        cocycle = cocycle_ext_classical(a, b, method=args.method, budget=args.budget).group
        agree = cocycle.is_isomorphic(result)
        report.say(f"Symmetric cocycles modulo coboundaries: {cocycle}")
        report.record("cocycle_ext", str(cocycle.canonical_group()))
        report.record("agree", agree)
    return report


def cmd_orbits(args) -> Report:
    group = _group(args.group)
    orbits = aut_orbits_on_ext(group, budget=args.budget)
    report = Report("orbits")
    report.say(f"Aut({group}) has {orbits.automorphism_count} elements acting on Ext = {orbits.ext}")
    for orbit in orbits.orbits:
        report.say("  orbit " + ", ".join(str(list(x)) for x in orbit))
    report.record("ext", str(orbits.ext))
    report.record("automorphisms", orbits.automorphism_count)
    report.record("orbit_count", orbits.orbit_count)
    report.record("orbit_sizes", orbits.sizes)
    return report


# complexes and covers

def cmd_cohomology(args) -> Report:
    pair = _pair(args.complex)
    coefficients = _group(args.coeff)
    h = cohomology(pair, coefficients, args.degree)
    report = Report("cohomology")
    relative = " relative to the subcomplex" if pair.subcomplex.simplices else ""
    report.say(f"Complex with f-vector {list(pair.complex.f_vector())}{relative}")
    report.say(f"H^{args.degree}(-; {coefficients}) = {h.group}")
    report.record("f_vector", list(pair.complex.f_vector()))
    report.record("relative", bool(pair.subcomplex.simplices))
    report.record("coefficients", str(coefficients))
    report.record("degree", args.degree)
    report.record("group", str(h.group))
    return report


def cmd_nerve(args) -> Report:
    with parsing(args.cover):
        cover = cover_from_document(read_file(args.cover, "cover"))
    complex_ = nerve(cover)
    report = Report("nerve")
    report.say(f"Cover of {len(cover.ground)} points by {len(cover)} members")
    report.say("Maximal simplices: " + "; ".join(" ".join(map(str, s))
                                                   for s in complex_.maximal_simplices()))
    groups = [str(cohomology(complex_, INTEGERS, n).group) for n in range(complex_.dimension + 1)]
    for n, g in enumerate(groups):
        report.say(f"H^{n} = {g}")
    report.record("f_vector", list(complex_.f_vector()))
    report.record("components", complex_.component_count())
    report.record("cohomology", groups)
    return report


def cmd_cech(args) -> Report:
    with parsing(args.tower):
        tower = load_tower(args.tower)
    coefficients = _group(args.coeff)
    cech = cech_cohomology_truncated(tower, coefficients, args.degree)
    report = Report("cech")
    for k, level in enumerate(cech.levels):
        report.say(f"level {k}: H^{args.degree}(N_{k}) = {level.group}")
    report.say(f"Truncated colimit: {cech.group}")
    report.record("levels", [str(level.group) for level in cech.levels])
    report.record("colimit", str(cech.group))
    report.record("stable_from", cech.stable_from())
    return report


def cmd_metric(args) -> Report:
    with parsing(args.tower):
        tower = load_tower(args.tower)
    with parsing(args.a):
        a = load_tcochain(args.a)
    with parsing(args.b):
        b = load_tcochain(args.b)
    distance = cochain_metric(a, b, tower)
    profile = agreement_profile(a, b, tower)
    report = Report("metric").say(f"Distance {distance}; agreement by level {profile}")
    report.record("distance", distance)
    report.record("agreement", profile)
    return report


def cmd_phantom(args) -> Report:
    with parsing(args.tower):
        tower = load_tower(args.tower)
    coefficients = _group(args.coeff)
    source = CoverTowerPhantomSource(tower, coefficients, args.degree)
    filtration = phantom_filtration(source, depth=args.depth)
    report = Report("phantom")
    report.say(f"H^{args.degree} = {filtration.group}")
    for k, level in enumerate(filtration.levels):
        report.say(f"Ph^{k} = {level.as_group()}")
    report.record("group", str(filtration.group))
    report.record("levels", [str(level.as_group()) for level in filtration.levels])
    report.record("zero", [filtration.is_zero(k) for k in range(len(filtration.levels))])
    return report


# obstruction theory

def cmd_obstruct(args) -> Report:
    parsed = _map(args.map)
    f = _sphere_map(parsed, args.map)
    pair = _ambient_pair(args, parsed)
    c = obstruction_cocycle(f, pair, f.n)
    extensible = is_extensible(c)
    vanishing = obstruction_class_vanishes(c)
    report = Report("obstruct")
    report.say(f"Obstruction cocycle in degree {c.degree}: "
                f"{len(extensible.witnesses)} nonzero cells")
    for line in _values(c.values):
        report.say(f"  {line}")
    report.say("Extends over the next skeleton" if extensible.extensible
               else "Does not extend as given")
    report.say("Obstruction class vanishes" if vanishing.vanishes
               else "Obstruction class is nonzero")
    report.record("degree", c.degree)
    report.record("nonzero", _values(c.values))
    report.record("extensible", extensible.extensible)
    report.record("class_vanishes", vanishing.vanishes)
    return report


def cmd_difference(args) -> Report:
    parsed_f, parsed_g = _map(args.f), _map(args.g)
    f, g = _sphere_map(parsed_f, args.f), _sphere_map(parsed_g, args.g)
    pair = _ambient_pair(args, parsed_f)
    d = difference_cochain(f, g, pair, f.n, mode=args.mode)
    report = Report("difference")
    report.say(f"Difference cochain in degree {d.degree} ({d.mode} mode), total {d.total()}")
    for line in _values(d.values):
        report.say(f"  {line}")
    report.record("mode", d.mode)
    report.record("total", d.total())
    report.record("nonzero", _values(d.values))
    report.record("cocycle", is_deformation_cocycle(d))
    return report


def cmd_chi(args) -> Report:
    parsed = _map(args.map)
    f = _sphere_map(parsed, args.map)
    pair = _ambient_pair(args, parsed)
    chi = chi_class(f, pair, f.n)
    report = Report("chi")
    report.say(f"χ lies in H^{f.n} = {chi.group}; class {list(chi.element)}")
    if chi.evaluation is not None:
        report.say(f"Degree on the fundamental cycle: {chi.evaluation}")
    report.record("group", str(chi.group))
    report.record("class", list(chi.element))
    report.record("zero", chi.is_zero)
    report.record("degree", chi.evaluation)
    return report


def cmd_classify(args) -> Report:
    pair = _pair(args.complex)
    result = classify_maps(pair, args.n, budget=args.budget, seed=args.seed)
    report = Report("classify")
    report.say(f"[K, S^{args.n}] ≅ H^{args.n}(K) = {result.group}")
    report.say(f"{len(result.realizations)} classes realized by "
               f"{'all' if result.exhaustive else 'a sample of'} {result.candidates} vertex maps")
    for element in sorted(result.realizations):
        report.say(f"  class {list(element)}")
    report.record("group", str(result.group))
    report.record("realized", [list(e) for e in sorted(result.realizations)])
    report.record("exhaustive", result.exhaustive)
    return report


def cmd_theta(args) -> Report:
    with parsing(args.tower):
        tower = load_tower(args.tower)
    parsed = _map(args.map)
    if parsed.sphere is None:
        raise ValidationError("map must target a sphere model (`sphere: n`)",
                              invariant="sphere-target", witness=args.map)
    theta = theta_finite_stage(tower, args.level, parsed.simplicial(), parsed.sphere)
    report = Report("theta")
    report.say(f"χ at level {theta.level}: {list(theta.level_class)}")
    report.say(f"Image in the truncated Čech group {theta.group}: {list(theta.colimit_class)}")
    report.record("level", theta.level)
    report.record("level_class", list(theta.level_class))
    report.record("group", str(theta.group))
    report.record("colimit_class", list(theta.colimit_class))
    report.record("refinement_checked", theta.stable)
    return report


# towers, Moore spaces and telescopes

def cmd_moore(args) -> Report:
    group = _group(args.group)
    space = moore_space(group, args.n)
    h_n = space.cohomology(args.n)
    h_next = space.cohomology(args.n + 1)
    hom = hom_group(group, INTEGERS).group
    ext = ext_group(group, INTEGERS).group
    report = Report("moore")
    report.say(f"M({group}, {args.n}): {space.f0_rank} cells of dimension {args.n}, "
               f"{space.f1_rank} of dimension {args.n + 1}")
    report.say(f"H^{args.n} = {h_n}, H^{args.n + 1} = {h_next}")
    report.record("h_n", str(h_n))
    report.record("h_n_plus_1", str(h_next))
    report.record("uct_holds", h_n.is_isomorphic(hom) and h_next.is_isomorphic(ext))
    return report


def cmd_filtration(args) -> Report:
    with parsing(args.matrix):
        injection = matrix_from_document(read_file(args.matrix, "intmatrix"))
    filtration = moore_filtration(injection, args.n)
    report = Report("filtration").say(f"A = {filtration.group}")
    for stage in filtration.stages:
        report.say(f"  m={stage.m} k={stage.k} A_m={stage.group}")
    report.record("group", str(filtration.group))
    report.record("k", [s.k for s in filtration.stages])
    report.record("stages", [str(s.group) for s in filtration.stages])
    return report


def cmd_lim1(args) -> Report:
    with parsing(args.gtower):
        tower = gtower_from_document(read_file(args.gtower, "gtower"))
    result = lim1_vanishes(tower, cap=args.cap)
    report = Report("lim1")
    report.say(f"Mittag-Leffler: {result.mittag_leffler}")
    report.say(f"lim1 {result.verdict.value}: {result.certificate}")
    report.record("mittag_leffler", str(result.mittag_leffler))
    report.record("lim1", result.verdict.value)
    return report


def cmd_telescope(args) -> Report:
    pipeline = degree_p_telescope_pipeline(args.p, args.d, args.N, cap=args.cap)
    report = Report("telescope")
    report.say(f"Telescope of S^{args.d} by degree-{args.p} maps, {args.N} bonds")
    for i, (h_d, h_next) in enumerate(pipeline.truncation_cohomology):
        report.say(f"  stages 0..{i}: H^{args.d} = {h_d}, H^{args.d + 1} = {h_next}")
    report.record("bonding_factor", pipeline.bonding_factor)
    report.record("h_d", [str(h) for h, _ in pipeline.truncation_cohomology])
    report.record("h_d_plus_1", [str(h) for _, h in pipeline.truncation_cohomology])
    return report


def cmd_phantom_telescope(args) -> Report:
    pipeline = degree_p_telescope_pipeline(args.p, args.d, args.N, cap=args.cap)
    report = Report(args.command)
    report.say(f"Degree-{args.p} telescope on S^{args.d}, truncated after {args.N} bonds")
    report.say(f"Bonding maps act by {pipeline.bonding_factor} on H^{args.d} = "
               f"{pipeline.stage_cohomology}")
    report.say(f"Tower (Z, x{pipeline.bonding_factor}): {pipeline.lim1.mittag_leffler}")
    report.say(f"lim1 {pipeline.lim1.verdict.value}: {pipeline.lim1.certificate}")
    report.say("Ext(Z[1/p], Z) itself is uncountable and is not computed")
    report.record("bonding_factor", pipeline.bonding_factor)
    report.record("mittag_leffler", str(pipeline.lim1.mittag_leffler))
    report.record("lim1_vanishes", pipeline.lim1_vanishes)
    report.record("phantom", [str(level.as_group()) for level in pipeline.phantom.levels])
    return report


COMMANDS: Dict[str, Callable] = {
    "cohomology": cmd_cohomology,
    "ext": cmd_ext,
    "hom": cmd_hom,
    "snf": cmd_snf,
    "nerve": cmd_nerve,
    "cech": cmd_cech,
    "metric": cmd_metric,
    "obstruct": cmd_obstruct,
    "difference": cmd_difference,
    "chi": cmd_chi,
    "classify": cmd_classify,
    "theta": cmd_theta,
    "moore": cmd_moore,
    "filtration": cmd_filtration,
    "telescope": cmd_telescope,
    "lim1": cmd_lim1,
    "phantom": cmd_phantom,
    "phantom-telescope": cmd_phantom_telescope,
    "example711": cmd_phantom_telescope,
    "orbits": cmd_orbits,
}


def execute(args) -> Optional[Report]:
    handler = COMMANDS.get(args.command)
    if handler is None:
        return None
    logger.debug(f"Running {args.command}")
    return handler(args)
