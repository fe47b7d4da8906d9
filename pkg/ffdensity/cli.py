"""The `ffdensity` command

Every subcommand prints JSON (one record per line) or a table on stdout.
Exit codes: 0 success, 1 domain error (including caps), 2 usage error.
"""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import ValidationError

from ffdensity.algebra.holomorphy import chain_divisor, format_divisor, format_spec, parse_spec
from ffdensity.algebra.places import parse_place
from ffdensity.config.logging import setup_logging
from ffdensity.config.settings import Settings, get_settings
from ffdensity.constants import (
    EXIT_DOMAIN_ERROR,
    EXIT_OK,
    EXIT_USAGE_ERROR,
    MODE_EXHAUSTIVE,
    MODE_SAMPLE,
    OUTPUT_JSON,
    OUTPUT_MODES,
    PREDICATE_RAMIFIED,
    PREDICATE_UNIMODULAR,
)
from ffdensity.densities.eisenstein import parse_poly_over_f
from ffdensity.densities.unimodular import parse_matrix, unimodular_density_exact
from ffdensity.densities.zeta import LPolynomial
from ffdensity.exceptions import DomainError, FFDensityError, UsageError
from ffdensity.models.cli_config import CliConfig
from ffdensity.models.experiment import DensityExperiment, PredicateSpec
from ffdensity.models.report import DensityReport
from ffdensity.services.density_service import DensityService
from ffdensity.services.measure_service import MeasureService
from ffdensity.utils.formatting import dumps, format_rational, render_mapping, render_table
from ffdensity.utils.parsing import load_experiment

logger = logging.getLogger(__name__)

DEFAULT_SPEC = "q=2; excluded=inf"

Output = Union[Dict[str, Any], DensityReport, List[Dict[str, Any]]]


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--spec", default=DEFAULT_SPEC, help='holomorphy ring, e.g. "q=2; excluded=inf,(x)"')
    parent.add_argument("--seed", type=int, default=None, help="seed for sampling (default: documented constant)")
    parent.add_argument("--output", choices=OUTPUT_MODES, default=OUTPUT_JSON)
    parent.add_argument("--workers", type=int, default=1, help="worker processes for the harness")
    parent.add_argument("--max-box", type=int, default=None, help="cap on q^l(D)")
    parent.add_argument("--max-bruteforce", type=int, default=None, help="cap on local censuses")
    parent.add_argument("--max-enum", type=int, default=None, help="cap on exhaustive tuple spaces")
    parent.add_argument("--log-level", default=None, help="console log level (logs go to stderr)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="ffdensity", description="Densities in holomorphy rings of F_q(x)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("places", parents=[common], help="list places of S of a given degree")
    p.add_argument("--degree", type=int, required=True)

    p = sub.add_parser("eisenstein", parents=[common], help="Eisenstein test of a polynomial over F at a place")
    p.add_argument("--f", required=True, help="coefficient list, constant first: [x,x,0,1]")
    p.add_argument("--place", required=True, help="inf or a monic irreducible")
    p.add_argument("--details", action="store_true", help="also report U_P membership and the branch")

    p = sub.add_parser("ramified-density", parents=[common], help="density of nicely ramified polynomials")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--truncate", type=int, default=None, help="place degree bound of the Euler product")
    p.add_argument("--empirical", action="store_true", help="Monte Carlo estimate instead of the product")
    p.add_argument("--deg", type=int, default=6, help="chain index j of the box D_j")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--scan-degree", type=int, default=4)

    p = sub.add_parser("unimodular", parents=[common], help="unimodularity of a k x m matrix")
    p.add_argument("--matrix", required=True, help="rows separated by ';', entries by ','")

    p = sub.add_parser("unimodular-density", parents=[common], help="density of unimodular k x m matrices")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lpoly", default=None, help="L-polynomial coefficients, constant first")
    p.add_argument("--empirical", action="store_true")
    p.add_argument("--exhaustive", action="store_true", help="exhaust every box D_0..D_deg")
    p.add_argument("--deg", type=int, default=4)
    p.add_argument("--samples", type=int, default=10_000)

    p = sub.add_parser("zeta", parents=[common], help="zeta_H(s) and its Euler truncation")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--lpoly", default=None)
    p.add_argument("--truncate", type=int, default=None)

    p = sub.add_parser("run", parents=[common], help="run a key=value experiment config")
    p.add_argument("--experiment", required=True)
    p.add_argument("--compare", action="store_true", help="append the convergence summary")

    p = sub.add_parser("local-measure", parents=[common], help="local measure at one place")
    p.add_argument("--kind", choices=("ramified", "unimodular"), required=True)
    p.add_argument("--place", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--bruteforce", action="store_true")
    return parser


def _config(args: argparse.Namespace, base: Settings) -> CliConfig:
    try:
        return CliConfig(
            subcommand=args.subcommand,
            spec=args.spec,
            seed=args.seed if args.seed is not None else base.default_seed,
            max_box=args.max_box if args.max_box is not None else base.max_box,
            max_bruteforce=args.max_bruteforce if args.max_bruteforce is not None else base.max_bruteforce,
            max_enum=args.max_enum if args.max_enum is not None else base.max_enum,
            output=args.output,
            workers=args.workers,
        )
    except ValidationError as e:
        raise UsageError(f"Invalid options: {e}") from e


def _lpoly(text: Optional[str]) -> Optional[LPolynomial]:
    return LPolynomial.parse(text) if text is not None else None


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{name}" for name in names if getattr(args, name) is None]
    if missing:
        raise UsageError(f"{args.subcommand} needs {', '.join(missing)}")


def _dispatch(args: argparse.Namespace, config: CliConfig, settings: Settings) -> Output:
    spec = parse_spec(config.spec)
    measures = MeasureService(settings)
    harness = DensityService(settings, workers=config.workers)
    command = config.subcommand

    if command == "places":
        return measures.places(spec, args.degree)

    if command == "eisenstein":
        f = parse_poly_over_f(spec.field, args.f)
        return measures.eisenstein(f, parse_place(spec.field, args.place), details=args.details)

    if command == "ramified-density":
        if args.empirical:
            predicate = PredicateSpec(name=PREDICATE_RAMIFIED, n=args.n, t_scan=args.scan_degree)
            experiment = DensityExperiment(
                predicate=predicate, spec=format_spec(spec), chain=[format_divisor(chain_divisor(spec, args.deg))],
                mode=MODE_SAMPLE, seed=config.seed, samples=args.samples,
            )
            return harness.run(experiment)
        _require(args, "truncate")
        return measures.ramified_density(args.n, spec, args.truncate)

    if command == "unimodular":
        return measures.unimodular(parse_matrix(spec.field, args.matrix), spec)

    if command == "unimodular-density":
        L = _lpoly(args.lpoly)
        if not (args.empirical or args.exhaustive):
            return measures.unimodular_density(spec, args.k, args.m, L)
        reference = format_rational(unimodular_density_exact(spec, args.k, args.m, L))
        predicate = PredicateSpec(name=PREDICATE_UNIMODULAR, k=args.k, m=args.m)
        if args.exhaustive:
            experiment = DensityExperiment(predicate=predicate, spec=format_spec(spec), j_max=args.deg,
                                           mode=MODE_EXHAUSTIVE, cap=config.max_enum, reference=reference)
        else:
            experiment = DensityExperiment(
                predicate=predicate, spec=format_spec(spec), chain=[format_divisor(chain_divisor(spec, args.deg))],
                mode=MODE_SAMPLE, seed=config.seed, samples=args.samples, reference=reference,
            )
        return harness.run(experiment)

    if command == "zeta":
        return measures.zeta(args.s, spec, _lpoly(args.lpoly), args.truncate)

    if command == "run":
        experiment = load_experiment(args.experiment)
        if experiment.seed is None:
            experiment = experiment.model_copy(update={"seed": config.seed})
        report = harness.run(experiment)
        if args.compare:
            summary = harness.compare(report)
            return [*_report_records(report), {"summary": summary.model_dump()}]
        return report

    if command == "local-measure":
        place = parse_place(spec.field, args.place)
        if args.kind == "ramified":
            _require(args, "n")
            return measures.local_ramified(place, args.n, args.bruteforce)
        _require(args, "k", "m")
        return measures.local_unimodular(place, args.k, args.m, args.bruteforce)

    raise UsageError(f"Unknown subcommand {command!r}")


def _report_records(report: DensityReport) -> List[Dict[str, Any]]:
    """One record per chain point, then a trailer with the report-level fields"""
    records = [point.model_dump() for point in report.points]
    trailer = report.model_dump(exclude={"points"})
    records.append({"report": trailer})
    return records


def render(result: Output, output: str) -> str:
    if isinstance(result, DensityReport):
        result = _report_records(result)
    if output == OUTPUT_JSON:
        if isinstance(result, list):
            return "\n".join(dumps(record) for record in result)
        return dumps(result)
    if isinstance(result, list):
        rows = [r for r in result if "report" not in r and "summary" not in r]
        return render_table(rows)
    return render_mapping(result)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE_ERROR
    try:
        settings = get_settings()
        if args.log_level is not None:
            settings = Settings.model_validate({**settings.model_dump(), "log_level": args.log_level})
        setup_logging(settings.log_level, settings.log_dir)
        config = _config(args, settings)
        settings = settings.model_copy(update={
            "max_box": config.max_box,
            "max_bruteforce": config.max_bruteforce,
            "max_enum": config.max_enum,
            "default_seed": config.seed,
        })
        result = _dispatch(args, config, settings)
        print(render(result, config.output))
        return EXIT_OK
    except UsageError as e:
        print(f"ffdensity: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE_ERROR
    except ValidationError as e:
        print(f"ffdensity: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE_ERROR
    except DomainError as e:
        print(f"ffdensity: {e}", file=sys.stderr)
        return EXIT_DOMAIN_ERROR
    except FFDensityError as e:
        logger.error(f"Internal error: {str(e)}", exc_info=True)
        print(f"ffdensity: internal error: {e}", file=sys.stderr)
        return EXIT_DOMAIN_ERROR


if __name__ == "__main__":
    sys.exit(main())
