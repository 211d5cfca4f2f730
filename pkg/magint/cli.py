"""Command-line front end: ``magint list|verify|detgen|simulate|fixtures``.

Exit status is 0 on success, 1 when a verification or fixture check fails
and 2 for invalid input (bad flags, unknown ids, violated constraints,
unparsable expressions). Reports and artifacts go to stdout or ``--out``;
diagnostics go to stderr.
"""
import argparse
import contextlib
import json
import logging
import os
import sys

import magint
from magint.errors import (
    ConfigError,
    ConstraintError,
    ExprSyntaxError,
    MagintError,
    UnknownFixtureError,
    UnknownSystemError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

USAGE_ERRORS = (
    ConfigError,
    UnknownSystemError,
    UnknownFixtureError,
    ConstraintError,
    ExprSyntaxError,
)

PRESET_ALIASES = {"fig1": "escaping", "fig2": "confined"}
SEED_ENV = "IF_SEED"


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        yield f
    logger.info("wrote %s", path)


def _seed(args):
    if not hasattr(args, "seed"):
        return None
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None or not env.strip():
        return None
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _overrides(args):
    """Options set by flags, for option_context."""
    overrides = {}
    for name in ("rtol", "atol", "dt", "samples"):
        value = getattr(args, name, None)
        if value is not None:
            if value <= 0:
                raise ConfigError(f"--{name} must be positive, got {value}")
            overrides[name] = value
    seed = _seed(args)
    if seed is not None:
        overrides["seed"] = seed
    if getattr(args, "no_cache", False):
        overrides["cache"] = False
    return overrides


def cmd_list(args):
    df = magint.catalog.list_systems()[["id", "chart", "title", "anchors"]]
    with _output(args.out) as f:
        if args.format == "json":
            f.write(df.to_json(orient="records", indent=2) + "\n")
        else:
            f.write(df.to_string(index=False) + "\n")
    return EXIT_OK


def cmd_verify(args):
    if args.all == bool(args.system):
        raise ConfigError("give either a system id or --all")
    mode = "numeric" if args.numeric else "symbolic"
    if args.all:
        if args.params:
            raise ConfigError("--params cannot be combined with --all")
        reports = magint.catalog.verify_all(mode, n_jobs=args.jobs)
    else:
        params = magint.utils.parse_assignments(args.params)
        reports = [magint.catalog.verify_system(args.system, params, mode=mode)]

    with _output(args.out) as f:
        if args.format == "json":
            payload = [r.to_dict() for r in reports]
            f.write(json.dumps(payload if args.all else payload[0], indent=2, sort_keys=True))
            f.write("\n")
        else:
            f.write("\n".join(r.to_text() for r in reports))
    failed = [r.system_id for r in reports if not r.passed]
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_detgen(args):
    if args.cls not in magint.bracket.CLASSES:
        raise ConfigError(
            f"unknown class {args.cls}; choose from {', '.join(magint.bracket.CLASSES)}"
        )
    consts = magint.utils.parse_assignments(args.params)
    sets = magint.bracket.detgen(args.cls, args.chart, **consts)
    with _output(args.out) as f:
        if args.format == "json":
            f.write(json.dumps([s.to_dict() for s in sets], indent=2, sort_keys=True) + "\n")
        else:
            f.write("\n".join(s.to_text() for s in sets))
    return EXIT_OK


def _simulation(args):
    params = magint.utils.parse_assignments(args.params)
    ic = magint.utils.parse_vector(args.ic, 6) if args.ic else None
    t_end = magint.expr.parse_expr(args.t) if args.t else None
    options = {}
    if args.preset:
        preset = PRESET_ALIASES.get(args.preset, args.preset)
        base = magint.catalog.build_system(args.system)
        preset_params, preset_ic, preset_t = base.preset(preset)
        params = dict(preset_params, **params)
        if ic is None:
            ic = preset_ic
            options = base.preset_options(preset)
        t_end = preset_t if t_end is None else t_end
    if ic is None or t_end is None:
        raise ConfigError("simulate needs --ic and --t, or a --preset")
    if args.ic:
        options["kinetic"] = not args.canonical
    if args.method is not None:
        options["method"] = args.method
    system = magint.catalog.build_system(args.system, params)
    return system, ic, t_end, options


def cmd_simulate(args):
    system, ic, t_end, options = _simulation(args)
    traj = magint.dynamics.integrate(system, ic, t_end, **options)
    with _output(args.out) as f:
        if args.format == "json":
            f.write(json.dumps(traj.to_dict(), sort_keys=True) + "\n")
        elif args.format == "svg":
            traj.write_svg(f)
        elif args.format == "gnuplot":
            traj.write_gnuplot(f)
        else:
            traj.write_csv(f)
    if args.svg:
        traj.write_svg(args.svg)
        logger.info("wrote %s", args.svg)
    if args.report:
        report = magint.dynamics.conservation_report(traj)
        extent = magint.dynamics.classify_z_extent(traj)
        print(report.to_string(index=False), file=sys.stderr)
        print(
            "z in [{z_min:.6g}, {z_max:.6g}], window {window:.6g}: {verdict}".format(**extent),
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_fixtures(args):
    ids = args.ids or list(magint.catalog.FIXTURE_IDS)
    reports = [magint.catalog.check_fixture(fixture_id) for fixture_id in ids]
    with _output(args.out) as f:
        if args.format == "json":
            f.write(json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n")
        else:
            f.write("\n".join(r.to_text() for r in reports))
    failed = [r.fixture_id for r in reports if not r.passed]
    if failed:
        print(f"fixtures failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="magint",
        description="Quadratically integrable magnetic Hamiltonians in three dimensions.",
    )
    parser.add_argument("--version", action="version", version=magint.__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="INFO with -v, DEBUG with -vv"
    )
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--no-cache", action="store_true", help="bypass the report cache")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("list", parents=[common], help="list catalog systems")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("verify", parents=[common], help="verify the claims of a system")
    p.add_argument("system", nargs="?", help="catalog id")
    p.add_argument("--all", action="store_true", help="verify every catalog system")
    p.add_argument("--params", default="", help="parameter values, k=v,...")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--symbolic", action="store_true", help="normal-form zero test (default)")
    mode.add_argument("--numeric", action="store_true", help="seeded sample zero test")
    p.add_argument("--seed", type=int, help=f"sampling seed (default: ${SEED_ENV}, then 0)")
    p.add_argument("--samples", type=int, help="sample points in numeric mode")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for --all")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("detgen", parents=[common], help="emit determining equations")
    p.add_argument("cls", metavar="class", help=", ".join(magint.bracket.CLASSES))
    p.add_argument("--chart", choices=("cartesian", "cylindrical"), default="cartesian")
    p.add_argument("--params", default="", help="leading-order constants, k=v,...")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_detgen)

    p = sub.add_parser("simulate", parents=[common], help="integrate a trajectory")
    p.add_argument("system", help="catalog id")
    p.add_argument("--params", default="", help="parameter values, k=v,...")
    p.add_argument("--preset", help="escaping or confined (aliases fig1, fig2)")
    p.add_argument("--ic", help="x,y,z,p1,p2,p3 with kinetic momenta")
    p.add_argument("--canonical", action="store_true", help="--ic momenta are canonical")
    p.add_argument("--t", help="end time")
    p.add_argument(
        "--method", choices=magint.dynamics.METHODS, help="default rk45, or the preset's method"
    )
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    p.add_argument("--dt", type=float, help="output spacing")
    p.add_argument("--format", choices=("csv", "json", "svg", "gnuplot"), default="csv")
    p.add_argument("--svg", help="also write SVG projections to this file")
    p.add_argument(
        "--report", action="store_true", help="print conservation and z-extent to stderr"
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fixtures", parents=[common], help="check packaged fixtures")
    p.add_argument("ids", nargs="*", help="fixture ids (default: all)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )

    try:
        with magint.option_context(**_overrides(args)):
            return args.func(args)
    except USAGE_ERRORS as e:
        print(f"magint: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"magint: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MagintError as e:
        print(f"magint: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
