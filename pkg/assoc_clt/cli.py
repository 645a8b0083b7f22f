"""
Command-line entry point.

    assoc-clt <command> [--config FILE] [--family SPEC] [--n-grid GRID] [...]

Commands:
    generate  simulate replicate paths (csv or npz)
    analyze   covariance summary: s_n^2, sigma^2, u(r), association probes
    check     condition trajectories and composite checks with verdicts
    cf        empirical characteristic function and block gaps at one n
    clt       Monte Carlo CLT run with a KS normality test
    report    theorem report (conditions, CLT, consistency)

Flags override the config file; every override is recorded in the
provenance block of the emitted files. Exit codes: 0 output produced,
1 execution or configuration failure, 2 usage error.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .blocking.composite import check_conditions, list_conditions
from .blocking.context import GridContext
from .cf.ecf import ecf
from .core.config import apply_overrides, build_config, list_family_aliases, load_config
from .core.exceptions import AssocCLTError, ConfigError
from .core.models import REPORT_SCHEMA, ExperimentConfig, Provenance
from .covariance.probes import association_probe, demimartingale_probe
from .covariance.profile import analytic_profile, empirical_profile, summarize_profile
from .generators.replicate import replicate
from .harness.clt import NORMALIZERS, run_clt
from .harness.report import (
    CLT_COLUMNS,
    CONDITION_COLUMNS,
    VERDICT_COLUMNS,
    clt_rows,
    condition_rows,
    emit_report,
    provenance_line,
    render_csv,
    render_json,
    verdict_rows,
    write_text,
)
from .harness.theorems import cf_gaps, list_theorems, make_provenance, run_theorem

logger = logging.getLogger("assoc_clt")

OUTPUT_DIR_ENV = "ASSOC_CLT_OUTPUT_DIR"
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
DEFAULT_CONDITIONS = "H0,Ha,Hab,Hb,Hc"

EXIT_OK = 0
EXIT_FAILURE = 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument(
        "--family",
        help="family shorthand name:key=value,... (aliases: %s)" % ", ".join(list_family_aliases()),
    )
    common.add_argument("--block-rule", help="power:ALPHA, fixed:ELL or table:N=ELL/N=ELL")
    common.add_argument("--n-grid", help="grid a:b:xK, a:b:+K or a comma list")
    common.add_argument("--n", type=int, help="single length for generate/analyze/cf/clt (default n_max)")
    common.add_argument("--reps", type=int, help="Monte Carlo replicates")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--delta", type=float, help="Lyapounov moment exponent")
    common.add_argument("--epsilon", type=float, help="Lindeberg truncation level")
    common.add_argument("--workers", type=int, help="concurrent generation tasks")
    common.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override any config field (repeatable, dotted keys)",
    )
    common.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV}, else stdout)")
    common.add_argument("--format", dest="fmt", help="output format")
    common.add_argument("--allow-large", action="store_true", help="lift the reps*n sample budget")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="assoc-clt",
        description="Finite-n diagnostics of CLT hypotheses for associated sequences.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    generate = sub.add_parser("generate", parents=[common], help="simulate replicate paths")
    generate.set_defaults(formats=("csv", "npz"))

    analyze = sub.add_parser("analyze", parents=[common], help="covariance summary")
    analyze.add_argument("--probes", action="store_true", help="run association probes")
    analyze.set_defaults(formats=("json",))

    check = sub.add_parser("check", parents=[common], help="condition trajectories")
    check.add_argument(
        "--conditions", default=DEFAULT_CONDITIONS,
        help="comma list from: %s" % ", ".join(list_conditions()),
    )
    check.set_defaults(formats=("json", "csv"))

    cf = sub.add_parser("cf", parents=[common], help="characteristic-function gaps")
    cf.add_argument("--t-grid", help="comma list of arguments t")
    cf.set_defaults(formats=("csv", "json"))

    clt = sub.add_parser("clt", parents=[common], help="Monte Carlo CLT run")
    clt.add_argument("--normalizer", default="analytic_s_n", choices=NORMALIZERS)
    clt.set_defaults(formats=("json", "csv"))

    report = sub.add_parser("report", parents=[common], help="theorem report")
    report.add_argument("--theorem", required=True, choices=list_theorems())
    report.set_defaults(formats=("json", "csv"))
    return parser


# ---------------------------------------------------------------------------
# Configuration from flags
# ---------------------------------------------------------------------------


def flag_overrides(args: argparse.Namespace) -> List[str]:
    """Flags as key=value overrides, in a fixed order, followed by --set items."""
    pairs = [
        ("family", args.family),
        ("block_rule", args.block_rule),
        ("n_grid", args.n_grid),
        ("reps", args.reps),
        ("seed", args.seed),
        ("delta", args.delta),
        ("epsilon", args.epsilon),
        ("workers", args.workers),
        ("t_grid", getattr(args, "t_grid", None)),
    ]
    overrides = [f"{key}={value}" for key, value in pairs if value is not None]
    if args.allow_large:
        overrides.append("allow_large_budget=true")
    return overrides + list(args.overrides)


def resolve_config(args: argparse.Namespace) -> "tuple[ExperimentConfig, List[str]]":
    """
    Load the config file (or start from --family) and apply flag overrides.

    Raises:
        ConfigError: If neither --config nor --family is given, or on invalid values
    """
    overrides = flag_overrides(args)
    if args.config:
        base = load_config(args.config)
    elif args.family:
        base = build_config({"family": args.family}, "--family")
    else:
        raise ConfigError(["either --config or --family is required"])
    return apply_overrides(base, overrides), overrides


def _output_dir(args: argparse.Namespace) -> Optional[Path]:
    out = args.out or os.environ.get(OUTPUT_DIR_ENV)
    return Path(out) if out else None


def _format(args: argparse.Namespace) -> str:
    fmt = args.fmt or args.formats[0]
    if fmt not in args.formats:
        raise ConfigError([f"--format {fmt} not supported by {args.command} ({'/'.join(args.formats)})"])
    return fmt


def _length(args: argparse.Namespace, config: ExperimentConfig) -> int:
    n = args.n if args.n is not None else config.n_max
    if n < 1:
        raise ConfigError([f"--n must be >= 1, got {n}"])
    return n


def _envelope(provenance: Provenance, **body: Any) -> Dict[str, Any]:
    return {"schema": REPORT_SCHEMA, "provenance": provenance, **body}


def _emit(text: str, out_dir: Optional[Path], name: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
    else:
        write_text(out_dir / name, text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace, config: ExperimentConfig, provenance: Provenance) -> None:
    n = _length(args, config)
    reps = replicate(
        config.family, n, config.reps, config.seed,
        workers=config.workers, chunk_size=config.chunk_size,
    )
    family_hash = config.family.family_hash()
    fmt = _format(args)
    if fmt == "npz":
        out_dir = _output_dir(args) or Path(".")
        path = out_dir / "replicates.npz"
        out_dir.mkdir(parents=True, exist_ok=True)
        np.savez_compressed(
            path,
            values=reps.values,
            seeds=np.array(reps.seeds, dtype=np.uint64),
            provenance=np.array(provenance_line(provenance, family_hash=family_hash)),
        )
        logger.info("Wrote %s", path)
        return
    # long format: replicate is the stream index, index runs 1..n
    rows = (
        [j, i, repr(value)]
        for j, row in enumerate(reps.values.tolist())
        for i, value in enumerate(row, start=1)
    )
    text = render_csv(
        ["replicate", "index", "value"], rows, provenance, family_hash=family_hash
    )
    _emit(text, _output_dir(args), "replicates.csv")


def cmd_analyze(args: argparse.Namespace, config: ExperimentConfig, provenance: Provenance) -> None:
    n = _length(args, config)
    ctx = GridContext(config)
    stored = None
    if ctx.covariance_source == "analytic":
        profile = analytic_profile(config.family, n)
    else:
        stored = replicate(config.family, n, config.reps, config.seed, config.workers, config.chunk_size)
        profile = empirical_profile(stored)
    probes = []
    if args.probes:
        stored = stored or replicate(
            config.family, n, config.reps, config.seed, config.workers, config.chunk_size
        )
        probes.append(association_probe(stored))
        try:
            probes.append(demimartingale_probe(stored))
        except AssocCLTError as e:
            logger.warning("Demimartingale probe skipped: %s", e)
    r_values = sorted({0, 1, *(2**k for k in range(1, n.bit_length()) if 2**k < n), ctx.scheme(n).ell})
    report = summarize_profile(profile, r_values, probes)
    _emit(render_json(_envelope(provenance, covariance=report)), _output_dir(args), "analyze.json")


def cmd_check(args: argparse.Namespace, config: ExperimentConfig, provenance: Provenance) -> None:
    ids = [c.strip() for c in args.conditions.split(",") if c.strip()]
    composites = check_conditions(GridContext(config), ids)
    reports = [r for composite in composites for r in composite.reports]
    failures = [f for composite in composites for f in composite.failures]
    out_dir = _output_dir(args)
    if _format(args) == "json":
        body = _envelope(
            provenance,
            conditions=reports,
            composites=[{"name": c.name, "verdict": c.verdict, "extras": c.extras} for c in composites],
            failures=failures,
            incomplete=bool(failures),
        )
        _emit(render_json(body), out_dir, "check.json")
        return
    if out_dir is None:
        raise ConfigError(["--format csv writes a bundle and needs --out"])
    for report in reports:
        write_text(
            out_dir / f"{report.condition_id}.csv",
            render_csv(CONDITION_COLUMNS, condition_rows(report), provenance),
        )
    write_text(out_dir / "verdicts.csv", render_csv(VERDICT_COLUMNS, verdict_rows(reports), provenance))


def cmd_cf(args: argparse.Namespace, config: ExperimentConfig, provenance: Provenance) -> None:
    n = _length(args, config)
    ctx = GridContext(config)
    s_n = ctx.s_n2(n) ** 0.5
    points = ecf(ctx.sums(n).totals() / s_n, config.t_grid)
    gaps = cf_gaps(ctx, n)
    if _format(args) == "json":
        _emit(render_json(_envelope(provenance, n=n, ecf=points, gaps=gaps)), _output_dir(args), "cf.json")
        return
    columns = ["kind", "t", "re", "im", "stderr", "gap", "gap_stderr", "bound", "holds"]
    rows = []
    for kind, series in gaps.items():
        for point, gap in zip(points, series):
            rows.append([
                kind, gap.t, repr(point.re), repr(point.im), repr(point.stderr),
                repr(gap.gap), repr(gap.stderr), gap.bound, gap.holds,
            ])
    _emit(render_csv(columns, rows, provenance), _output_dir(args), "cf.csv")


def cmd_clt(args: argparse.Namespace, config: ExperimentConfig, provenance: Provenance) -> None:
    verdict = run_clt(
        config.family,
        _length(args, config),
        config.reps,
        config.seed,
        normalizer=args.normalizer,
        workers=config.workers,
        chunk_size=config.chunk_size,
        alpha=config.tolerances.ks_alpha,
        sample_budget=config.sample_budget,
        allow_large=config.allow_large_budget,
    )
    if _format(args) == "json":
        _emit(render_json(_envelope(provenance, clt=verdict)), _output_dir(args), "clt.json")
    else:
        _emit(render_csv(CLT_COLUMNS, clt_rows(verdict), provenance), _output_dir(args), "clt.csv")


def cmd_report(args: argparse.Namespace, config: ExperimentConfig, overrides: List[str]) -> None:
    report = run_theorem(args.theorem, config, overrides)
    out_dir = _output_dir(args)
    fmt = _format(args)
    if out_dir is None:
        if fmt != "json":
            raise ConfigError(["--format csv writes a bundle and needs --out"])
        sys.stdout.write(render_json(report))
        return
    emit_report(report, out_dir, fmt)  # type: ignore[arg-type]


_COMMANDS = {
    "generate": cmd_generate,
    "analyze": cmd_analyze,
    "check": cmd_check,
    "cf": cmd_cf,
    "clt": cmd_clt,
}


def configure_logging(verbosity: int) -> None:
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbosity, 2)]
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def parse_and_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, resolve the configuration and run one command.

    Returns:
        Exit code (argparse exits with 2 on usage errors)
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        config, overrides = resolve_config(args)
        if args.command == "report":
            cmd_report(args, config, overrides)
        else:
            _COMMANDS[args.command](args, config, make_provenance(config, overrides))
    except ConfigError as e:
        print(f"assoc-clt: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except (AssocCLTError, ValueError, OSError) as e:
        logger.error("%s failed: %s: %s", args.command, type(e).__name__, e)
        return EXIT_FAILURE
    return EXIT_OK


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
