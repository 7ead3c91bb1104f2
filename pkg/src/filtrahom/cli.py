"""Command-line pipeline: filtration -> homology -> groups of the filtration -> report.

Exit codes: 0 success, 1 internal failure, 2 input error, 3 cache error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import report
from .builders_cloud import density_radius_bifiltration, read_csv_cloud, rips_filtration
from .builders_image import read_pgm, threshold_filtration
from .complex_core import InputError, _check_prime, filtration_from_json
from .diagram_metrics import aligned_thresholds, stability_report
from .filtration_groups import filtration_homology, verify_barcode
from .homology_engine import HomologyError
from .multiparam import bifiltration_from_json, bifiltration_homology

log = logging.getLogger("filtrahom")

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_CACHE = 0, 1, 2, 3


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers: %r" % text) from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers: %r" % text) from None


def _numbers(text: str) -> list:
    return [int(v) if float(v).is_integer() else v for v in _floats(text)]


def _emit(doc: dict, out) -> None:
    text = report.dumps(doc)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _finish(FH, settings: dict, args) -> None:
    if getattr(args, "verify", False):
        verify_barcode(FH)
        log.info("barcode verified against the reduction oracle")
    cache = report.build_cache(FH, settings)
    if args.cache:
        report.write_cache(args.cache, cache)
    _emit(report.render(cache, args.p), args.out)


def _finish_bi(BH, settings: dict, args) -> None:
    cache = report.build_bicache(BH, settings)
    if args.cache:
        report.write_cache(args.cache, cache)
    _emit(report.render(cache, args.p, args.q), args.out)


def cmd_image(args) -> None:
    img = read_pgm(args.path)
    F = threshold_filtration(img, args.thresholds, args.field)
    settings = report.settings_for("image", args.path, args.field,
                                   thresholds=list(F.param_values), measure=args.measure)
    _finish(filtration_homology(F), settings, args)


def cmd_cloud(args) -> None:
    cloud = read_csv_cloud(args.path)
    F = rips_filtration(cloud, args.radii, args.max_dim, args.field)
    settings = report.settings_for("cloud", args.path, args.field, radii=args.radii,
                                   max_dim=args.max_dim, measure=args.measure)
    _finish(filtration_homology(F, args.max_dim), settings, args)


def cmd_bicloud(args) -> None:
    cloud = read_csv_cloud(args.path)
    BF = density_radius_bifiltration(cloud, args.radii, args.densities, args.density_radius,
                                     args.max_dim, args.field)
    settings = report.settings_for("bicloud", args.path, args.field, radii=args.radii,
                                   densities=args.densities, density_radius=args.density_radius,
                                   max_dim=args.max_dim)
    _finish_bi(bifiltration_homology(BF, args.max_dim), settings, args)


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc.strerror)) from None
    except ValueError as exc:
        raise InputError("%s is not valid JSON: %s" % (path, exc)) from None


def cmd_complex(args) -> None:
    F = filtration_from_json(_read_json(args.path), args.field_override)
    settings = report.settings_for("complex", args.path, F.p, measure=args.measure)
    _finish(filtration_homology(F), settings, args)


def cmd_bicomplex(args) -> None:
    BF = bifiltration_from_json(_read_json(args.path), args.field_override)
    settings = report.settings_for("bicomplex", args.path, BF.p)
    _finish_bi(bifiltration_homology(BF), settings, args)


def cmd_rethreshold(args) -> None:
    cache = report.load_cache(args.cache_path)
    _emit(report.render(cache, args.p, args.q), args.out)


def cmd_compare(args) -> None:
    f, g = read_pgm(args.path_a), read_pgm(args.path_b)
    thresholds = args.thresholds or aligned_thresholds(f, g)
    rep = stability_report(f, g, thresholds, p=args.field)
    _emit(report.compare_report(rep, thresholds), args.out)


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _prime(text: str) -> int:
    try:
        return _check_prime(int(text), "--field")
    except (ValueError, InputError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="filtrahom", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, field_default=2):
        sp.add_argument("--field", type=_prime, default=field_default,
                        help="prime coefficient field (default 2)")
        sp.add_argument("--p", type=_positive, default=1, help="persistence threshold")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--cache", help="write the analysis cache (.fhg) here")

    sp = sub.add_parser("image", help="threshold filtration of a PGM image")
    sp.add_argument("path")
    sp.add_argument("--thresholds", type=_numbers)
    sp.add_argument("--measure", choices=("diff", "ratio"), default="diff")
    sp.add_argument("--verify", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_image)

    sp = sub.add_parser("cloud", help="Vietoris-Rips filtration of a CSV point cloud")
    sp.add_argument("path")
    sp.add_argument("--radii", type=_floats, required=True)
    sp.add_argument("--max-dim", type=int, default=2)
    sp.add_argument("--measure", choices=("diff", "ratio"), default="diff")
    sp.add_argument("--verify", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_cloud)

    sp = sub.add_parser("bicloud", help="radius x density bifiltration of a CSV point cloud")
    sp.add_argument("path")
    sp.add_argument("--radii", type=_floats, required=True)
    sp.add_argument("--densities", type=_ints, required=True,
                    help="decreasing minimum neighbor counts")
    sp.add_argument("--density-radius", type=float, required=True)
    sp.add_argument("--max-dim", type=int, default=2)
    sp.add_argument("--q", type=_positive, default=1)
    common(sp)
    sp.set_defaults(func=cmd_bicloud)

    sp = sub.add_parser("complex", help="abstract filtration from fixture JSON")
    sp.add_argument("path")
    sp.add_argument("--measure", choices=("diff", "ratio"), default="diff")
    sp.add_argument("--verify", action="store_true")
    common(sp, field_default=None)
    sp.set_defaults(func=cmd_complex)

    sp = sub.add_parser("bicomplex", help="abstract bifiltration from fixture JSON")
    sp.add_argument("path")
    sp.add_argument("--q", type=_positive, default=1)
    common(sp, field_default=None)
    sp.set_defaults(func=cmd_bicomplex)

    sp = sub.add_parser("rethreshold", help="re-render a report from a cache at a new threshold")
    sp.add_argument("cache_path")
    sp.add_argument("--p", type=_positive, default=1)
    sp.add_argument("--q", type=_positive, default=1)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_rethreshold)

    sp = sub.add_parser("compare", help="bottleneck stability check for two PGM images")
    sp.add_argument("path_a")
    sp.add_argument("path_b")
    sp.add_argument("--thresholds", type=_numbers)
    sp.add_argument("--field", type=_prime, default=2)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    if args.command in ("complex", "bicomplex"):
        args.field_override = args.field
    try:
        args.func(args)
    except report.CacheError as exc:
        log.error("%s", exc)
        return EXIT_CACHE
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except HomologyError as exc:
        log.error("internal error: %s", exc)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
