#!/usr/bin/env python3
"""
cechtool

Command-line entry point: exact cohomology, obstruction theory, Čech towers
and phantom filtrations on finite simplicial data.

Exit codes: 0 success, 1 internal consistency failure, 2 invalid input,
3 budget exhausted.
"""

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional, Sequence, Tuple

# Add the current directory to Python path
current_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, current_dir)

from core.commands import execute  # noqa: E402
from core.config import get_config  # noqa: E402
from core.corpus import run_corpus  # noqa: E402
from core.errors import CorpusError, ToolkitError, ValidationError  # noqa: E402


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cechtool",
                                     description="Exact computational topology of Čech towers")
    parser.add_argument('--verbose', action='store_true', help='Log debug output to stderr.')
    parser.add_argument('--seed', type=int, help='Seed for sampling (default from config).')
    parser.add_argument('--budget', type=int, help='Enumeration budget (default from config).')
    parser.add_argument('--subdivision-budget', type=int,
                        help='Barycentric subdivisions allowed for maps (default from config).')
    parser.add_argument('--config', type=str, help='JSON configuration file merged over defaults.')
    parser.add_argument('--machine-only', action='store_true',
                        help='Print only the machine trailer of the report.')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('cohomology', help='H^n(K, L; G) of a simplicial complex or pair')
    p.add_argument('--complex', required=True, help='scomplex file or builtin (torus7, sphere:n, ...)')
    p.add_argument('--coeff', default='Z', help='coefficient group literal')
    p.add_argument('--degree', type=int, required=True)

    p = sub.add_parser('ext', help='Ext(A, B) from a free resolution')
    p.add_argument('--a', required=True)
    p.add_argument('--b', required=True)
    p.add_argument('--resolution', choices=['kernel', 'reduced'], default='kernel')
    p.add_argument('--cocycles', action='store_true',
                   help='also compute symmetric cocycles modulo coboundaries (finite groups)')
    p.add_argument('--method', choices=['linear', 'enumerate'], default='linear')

    p = sub.add_parser('hom', help='Hom(A, B)')
    p.add_argument('--a', required=True)
    p.add_argument('--b', required=True)

    p = sub.add_parser('snf', help='Smith normal form of an integer matrix')
    p.add_argument('--matrix', required=True, help='intmatrix file')

    p = sub.add_parser('nerve', help='nerve of a finite cover')
    p.add_argument('--cover', required=True, help='cover file')

    p = sub.add_parser('cech', help='truncated Čech cohomology of a cover tower')
    p.add_argument('--tower', required=True)
    p.add_argument('--coeff', default='Z')
    p.add_argument('--degree', type=int, required=True)

    p = sub.add_parser('metric', help='distance between two tower cochains')
    p.add_argument('--tower', required=True)
    p.add_argument('--a', required=True, help='tcochain file')
    p.add_argument('--b', required=True, help='tcochain file')

    p = sub.add_parser('obstruct', help='obstruction cocycle of a map into a sphere model')
    p.add_argument('--map', required=True, help='smap file')
    p.add_argument('--complex', help='ambient complex or pair (default: the map source)')

    p = sub.add_parser('difference', help='difference cochain of two maps')
    p.add_argument('--f', required=True)
    p.add_argument('--g', required=True)
    p.add_argument('--complex')
    p.add_argument('--mode', choices=['exact', 'canonical'], default='exact')

    p = sub.add_parser('chi', help='cohomology class of a map into a sphere model')
    p.add_argument('--map', required=True)
    p.add_argument('--complex')

    p = sub.add_parser('classify', help='homotopy classes of maps into S^n')
    p.add_argument('--complex', required=True)
    p.add_argument('--n', type=int, required=True)

    p = sub.add_parser('theta', help='class of a level map in the truncated Čech group')
    p.add_argument('--tower', required=True)
    p.add_argument('--level', type=int, required=True)
    p.add_argument('--map', required=True, help='smap from the level nerve to a sphere model')

    p = sub.add_parser('moore', help='cohomology of a Moore space M(A, n)')
    p.add_argument('--group', required=True)
    p.add_argument('--n', type=int, required=True)

    p = sub.add_parser('filtration', help='Moore-space filtration of coker of an injection')
    p.add_argument('--matrix', required=True)
    p.add_argument('--n', type=int, default=2)

    for name, text in (('telescope', 'cohomology of truncated degree-p telescopes'),
                       ('phantom-telescope', 'lim1 and phantom data of the degree-p telescope'),
                       ('example711', 'same as phantom-telescope')):
        p = sub.add_parser(name, help=text)
        p.add_argument('--p', type=int, required=True)
        p.add_argument('--d', type=int, required=True)
        p.add_argument('--N', type=int, required=True)
        p.add_argument('--cap', type=int)

    p = sub.add_parser('lim1', help='Mittag-Leffler and lim1 verdict of a group tower')
    p.add_argument('--gtower', required=True)
    p.add_argument('--cap', type=int)

    p = sub.add_parser('phantom', help='phantom filtration of a cover tower with exhaustion')
    p.add_argument('--tower', required=True)
    p.add_argument('--coeff', default='Z')
    p.add_argument('--degree', type=int, required=True)
    p.add_argument('--depth', type=int, default=1)

    p = sub.add_parser('orbits', help='Aut(A)-orbits on Ext(A, Z)')
    p.add_argument('--group', required=True)

    p = sub.add_parser('corpus', help='run the bundled examples against golden trailers')
    p.add_argument('--directory', help='corpus directory (default from config)')
    p.add_argument('--update-golden', action='store_true')

    return parser


def _configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger().setLevel(level)


def _pinned_settings(args) -> Dict[str, Optional[int]]:
    """Global flags as configuration keys; unset flags map to None."""
    for flag in ("budget", "subdivision_budget"):
        value = getattr(args, flag)
        if value is not None and value < 0:
            raise ValidationError(f"--{flag.replace('_', '-')} must be non-negative",
                                  invariant="budget-flag", witness=value)
    return {"budgets.enumeration": args.budget,
            "budgets.subdivision": args.subdivision_budget,
            "random.seed": args.seed}


def run(argv: Sequence[str], machine_only: Optional[bool] = None) -> Tuple[int, str]:
    """Run one command; returns (exit code, report text). Errors go to stderr."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return (e.code if isinstance(e.code, int) else 2), ""
    _configure_logging(args.verbose)
    if machine_only is None:
        machine_only = args.machine_only
    try:
        config = get_config()
        if args.config:
            config.load_file(args.config)
        with config.overridden(_pinned_settings(args)):
            if args.command == "corpus":
                result = run_corpus(args.directory, lambda a: run(a, machine_only=True),
                                    update_golden=args.update_golden)
                code = 0 if result.green else CorpusError.exit_code
                return code, result.report.render(machine_only=machine_only)
            report = execute(args)
            return 0, report.render(machine_only=machine_only)
    except ToolkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code, ""
    except RecursionError:
        print("error: input too deeply nested", file=sys.stderr)
        return 2, ""


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point."""
    code, text = run(sys.argv[1:] if argv is None else argv)
    if text:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
