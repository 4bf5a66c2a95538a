import argparse
import logging
import sys
import time
from dataclasses import replace
from typing import Any, NoReturn

from config import Config, load_config
from pipeline.construct_stage import build_surface, load_spec
from pipeline.logger import ErrorTracker, setup_logger
from pipeline.report_stage import (
    export_csv,
    export_obj,
    export_ply,
    format_profile_csv,
    generate_json_report,
    generate_markdown_report,
    write_output,
)
from pipeline.sample_stage import build_mesh, sample_surface
from pipeline.verify_stage import classify, verify_surface
from tools.cpd import cmc_profile
from tools.errors import CpdError
from tools.gallery import GALLERY_NAMES, gallery
from tools.geometry import ParamSurface
from tools.models import FixedDirection, GridSpec, Interval

FORMATS = ("obj", "ply", "csv", "json", "md")

# subcommand -> (default format, accepted formats)
OUTPUT_FORMATS: dict[str, tuple[str, tuple[str, ...]]] = {
    "gallery": ("obj", ("obj", "ply", "csv", "json")),
    "construct": ("obj", ("obj", "ply", "csv", "json")),
    "sample": ("csv", ("obj", "ply", "csv", "json")),
    "verify": ("json", ("json", "md")),
    "classify": ("json", ("json",)),
    "cmc": ("csv", ("csv", "json")),
}


class CliParser(argparse.ArgumentParser):
    """Usage errors exit 1; exit 2 is reserved for failed verification."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}") from e
    return lo, hi


def _direction(text: str) -> FixedDirection:
    try:
        k = tuple(float(v) for v in text.split(","))
        if len(k) != 3:
            raise ValueError("need three components")
        return FixedDirection((k[0], k[1], k[2]))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid direction {text!r}: {e}") from e


def build_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--nx", type=int, help="Grid points along x (overrides config)")
    common.add_argument("--ny", type=int, help="Grid points along y (overrides config)")
    common.add_argument("--margin", type=float, help="Fraction of the domain trimmed at each side")
    common.add_argument("--tol", type=float, help="Check tolerance (verify/classify) or ODE tolerance (cmc)")
    common.add_argument("--out", type=str, help="Output file. Default: stdout")
    common.add_argument("--format", choices=FORMATS, help="Output format")
    common.add_argument("--direction", type=_direction, default=FixedDirection(), help="Fixed unit direction kx,ky,kz")
    common.add_argument("--config", type=str, default="config.yaml", help="Path to config file")
    common.add_argument("--log-file", type=str, help="Also write the log to this file")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    parser = CliParser(description="Surfaces with a canonical principal direction: construct, verify, export")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gallery", parents=[common], help="Export a named example surface")
    p.add_argument("name", choices=GALLERY_NAMES)
    for name, help_text in (
        ("construct", "Build a surface from a JSON spec and export its mesh"),
        ("sample", "Sample geometry of a JSON spec surface on a grid"),
        ("verify", "Run the identity checks on a JSON spec surface"),
        ("classify", "Classify a JSON spec surface"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("spec", help="Path to SurfaceSpecFile (JSON)")

    p = sub.add_parser("cmc", parents=[common], help="Integrate a constant-mean-curvature angle profile")
    p.add_argument("--H", dest="H", type=float, required=True, help="Mean curvature")
    p.add_argument("--psi0", type=float, required=True)
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--phi0", type=float, required=True)
    p.add_argument("--span", type=_pair, required=True, help="x interval a,b")
    p.add_argument("--step", type=float, help="Table spacing (overrides config)")
    return parser


def _apply_overrides(config: Config, args: argparse.Namespace) -> Config:
    grid = replace(
        config.grid,
        nx=args.nx if args.nx is not None else config.grid.nx,
        ny=args.ny if args.ny is not None else config.grid.ny,
        margin=args.margin if args.margin is not None else config.grid.margin,
    )
    tolerances, numerics = config.tolerances, config.numerics
    if args.tol is not None:
        if args.command == "cmc":
            numerics = replace(numerics, ode_tol=args.tol)
        else:
            tolerances = replace(tolerances, first_order=args.tol, second_order=args.tol, classify=args.tol)
    if getattr(args, "step", None) is not None:
        numerics = replace(numerics, profile_step=args.step)
    return replace(config, grid=grid, tolerances=tolerances, numerics=numerics)


def _load_surface(args: argparse.Namespace, config: Config) -> ParamSurface:
    if args.command == "gallery":
        return gallery(args.name)
    return build_surface(load_spec(args.spec), config.numerics)


def _export_samples(S: ParamSurface, grid: GridSpec, fmt: str, out: str | None, threads: int) -> int:
    rows = sample_surface(S, grid, threads)
    if fmt == "csv":
        export_csv(rows, out)
    else:
        payload: dict[str, Any] = {
            "surface": S.name,
            "kind": str(S.kind),
            "grid": grid.to_dict(),
            "samples": [vars(r) for r in rows],
        }
        generate_json_report(payload, out)
    return len(rows)


def _run_cmc(args: argparse.Namespace, config: Config, fmt: str, logger: logging.Logger) -> None:
    logger.info("[1/2] Solve: Integrating CMC profile...")
    start = time.time()
    profile = cmc_profile(
        H=args.H,
        psi0=args.psi0,
        theta0=args.theta0,
        phi0=args.phi0,
        span=Interval(*args.span),
        tol=config.numerics.ode_tol,
        step=config.numerics.profile_step,
    )
    logger.info(f"  ✓ {len(profile.table)} rows in {time.time() - start:.1f}s")

    logger.info("[2/2] Report: Writing profile...")
    if fmt == "csv":
        write_output(format_profile_csv(profile), args.out)
    else:
        generate_json_report(
            {
                "H": profile.H,
                "psi0": profile.psi0,
                "theta0": profile.theta0,
                "phi0": profile.phi0,
                "span": profile.span.to_list(),
                "rows": [{"x": x, "theta": t, "phi": p} for x, t, p in profile.rows()],
            },
            args.out,
        )


def run_cli(argv: list[str] | None = None) -> int:
    """Run one CLI command; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logger = setup_logger(level=logging.DEBUG if args.verbose else logging.INFO)
    tracker = ErrorTracker()

    default_fmt, accepted = OUTPUT_FORMATS[args.command]
    fmt = args.format or default_fmt
    if fmt not in accepted:
        parser.error(f"{args.command} writes {', '.join(accepted)}, not {fmt}")

    stage = "config"
    try:
        config = _apply_overrides(load_config(args.config), args)
        log_file = args.log_file or config.runtime.log_file
        if log_file:
            logger = setup_logger(log_file=log_file, level=logger.level)
        grid = GridSpec(config.grid.nx, config.grid.ny, config.grid.margin)
        threads = config.runtime.threads

        if args.command == "cmc":
            stage = "cmc"
            _run_cmc(args, config, fmt, logger)
            return tracker.exit_code()

        stage = "construct"
        logger.info("[1/3] Construct: Building surface...")
        start = time.time()
        S = _load_surface(args, config)
        logger.info(f"  ✓ {S.name} ({S.kind}) on {S.domain.to_dict()} in {time.time() - start:.1f}s")

        if args.command == "verify":
            stage = "verify"
            logger.info(f"[2/3] Verify: Running checks on a {grid.nx}x{grid.ny} grid...")
            start = time.time()
            report = verify_surface(S, args.direction, grid, config.tolerances, threads, config.numerics.jet_fd_step)
            elapsed = time.time() - start
            if report.passed:
                logger.info(f"  ✓ {len(report.checks)} checks passed in {elapsed:.1f}s ({report.status})")
            else:
                tracker.add_failure("verify", S.name, report.failed_checks())
                logger.error(f"  ✗ {report.status}")

            stage = "report"
            logger.info("[3/3] Report: Writing verification report...")
            if fmt == "md":
                generate_markdown_report([report], args.out)
            else:
                generate_json_report(report.to_dict(), args.out)

        elif args.command == "classify":
            stage = "classify"
            logger.info(f"[2/3] Classify: Sampling curvatures on a {grid.nx}x{grid.ny} grid...")
            result = classify(S, grid, config.tolerances, args.direction, threads)
            flags = [k for k, v in result.to_dict().items() if v is True]
            logger.info(f"  ✓ {', '.join(flags) if flags else 'no flags set'}")

            stage = "report"
            logger.info("[3/3] Report: Writing classification...")
            generate_json_report({"surface": S.name, **result.to_dict()}, args.out)

        else:
            stage = "sample"
            logger.info(f"[2/3] Sample: Evaluating geometry on a {grid.nx}x{grid.ny} grid...")
            start = time.time()
            if fmt in ("obj", "ply"):
                mesh = build_mesh(S, grid, threads)
                logger.info(f"  ✓ {len(mesh.vertices)} vertices, {len(mesh.faces)} faces in {time.time() - start:.1f}s")
                stage = "report"
                logger.info(f"[3/3] Report: Writing {fmt.upper()} mesh...")
                (export_obj if fmt == "obj" else export_ply)(mesh, args.out)
            else:
                stage = "report"
                logger.info(f"[3/3] Report: Writing {fmt.upper()} samples...")
                count = _export_samples(S, grid, fmt, args.out, threads)
                logger.info(f"  ✓ {count} samples in {time.time() - start:.1f}s")

        if args.out:
            logger.info(f"    - Output: {args.out}")

    except (CpdError, OSError, ValueError) as e:
        tracker.add_error(stage, e)
        logger.error(f"  ✗ {stage.capitalize()} failed: {e}")

    if tracker.errors or tracker.failures:
        logger.error(tracker.get_summary())
    return tracker.exit_code()


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
