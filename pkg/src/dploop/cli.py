"""Command line front end.

Subcommands::

    dploop solve  (<config> | --preset NAME) [--out DIR] [--workers N]
    dploop verify (<config> | --preset NAME) [--out DIR]
    dploop presets

Exit codes: 0 success, 1 usage/config error, 2 verification failure or
runtime singularity.  Frames for distinct times may be computed by a
thread pool; output ordering (and bytes) do not depend on the worker
count.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import PRESETS, ScenarioConfig, parse_config, preset
from .errors import (
    DPLoopError,
    MapSingularity,
    ParameterError,
    ParseError,
    SingularIntegrand,
    ValidationError,
)
from .fields import assemble_fields, sample_frame
from .output import write_csv, write_svg
from .verify import Grid, run_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2


def _load_config(args: argparse.Namespace) -> ScenarioConfig:
    if args.preset:
        if args.config:
            raise ValidationError("give either a config path or --preset, not both")
        return preset(args.preset)
    if not args.config:
        raise ValidationError("a config path or --preset is required")
    path = Path(args.config)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    return parse_config(text, name=path.stem)


def _compute_frames(config: ScenarioConfig, workers: int):
    fields = assemble_fields(config.to_spec(), perturb=config.perturb)
    y_min, y_max = config.y_range

    def one(t: float):
        return sample_frame(fields, t, y_min, y_max, config.samples)

    times = sorted(config.times)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            curves = list(pool.map(one, times))
    else:
        curves = [one(t) for t in times]
    return curves


def cmd_solve(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    curves = _compute_frames(config, max(1, args.workers))

    written = []
    if "csv" in config.outputs:
        written.append(write_csv(out_dir / f"{config.name}.csv", curves))
    if "svg" in config.outputs:
        for curve in curves:
            name = f"{config.name}_t{curve.t:g}.svg"
            written.append(
                write_svg(out_dir / name, curve, f"{config.name}  t = {curve.t:g}")
            )
    for path in written:
        print(path)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    config = _load_config(args)
    spec = config.to_spec()
    grid = Grid(
        y_min=config.y_range[0],
        y_max=config.y_range[1],
        n_y=400,
        times=tuple(sorted(config.times)),
    )
    fields = assemble_fields(spec, perturb=config.perturb)
    report = run_suite(fields, grid)
    text = report.text()
    sys.stdout.write(text)
    if "report" in config.outputs:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / f"{config.name}_report.txt").write_text(text, encoding="utf-8")
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_presets(_: argparse.Namespace) -> int:
    for name in sorted(PRESETS):
        cfg = PRESETS[name]
        modes = ", ".join(f"k={m.k:g} sign={m.sign} y0={m.y0:g}" for m in cfg.modes)
        times = ", ".join(f"{t:g}" for t in cfg.times)
        print(f"{name}: kappa={cfg.kappa:g} d={cfg.d:g} modes[{modes}] times[{times}]")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dploop",
        description="Loop and mixed loop-smooth solitons of the Degasperis-Procesi "
        "equation: frame sampling and verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("config", nargs="?", help="scenario config path")
        p.add_argument("--preset", help="bundled scenario name (see 'presets')")
        p.add_argument("--out", default=".", help="output directory (default: .)")

    p_solve = sub.add_parser("solve", help="sample frames and write CSV/SVG")
    add_common(p_solve)
    p_solve.add_argument(
        "--workers", type=int, default=1, help="thread count for frame computation"
    )
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="run the verification suite")
    add_common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_presets = sub.add_parser("presets", help="list bundled scenarios")
    p_presets.set_defaults(func=cmd_presets)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MapSingularity, SingularIntegrand) as exc:
        print(f"runtime singularity: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except DPLoopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
