#!/usr/bin/env python3
"""
Sphere Model Runner

Commands:
- schmidt    Schmidt diagonal form (r, coefficients, both bases) of a state file
- collapse   Von Neumann collapse of one spin along a direction
- luder      Luder measurement of one spin; shows both partial traces
- spheremap  Grid of how sphere 1 is mapped onto sphere 2 (comma-separated)
- verify     Run every property suite against the brute-force oracle

Exit codes: 0 success, 1 verification failure, 2 input error.
Angles are radians unless --degrees is given. Measurement directions are
always given relative to the input (computational) bases; --frame selects
the frame of reported angles.
"""

from __future__ import annotations

import argparse
import math
import platform
import sys
from pathlib import Path

import numpy as np
import orjson
from pydantic import ValidationError

from entangle_sphere import entangle, linalg, measurement
from entangle_sphere.bloch import MeasurementDirection
from entangle_sphere.documents import StateDocument, write_grid
from entangle_sphere.errors import SphereModelError
from entangle_sphere.measurement import Frame, SchmidtFrames
from entangle_sphere.verify import (
    VerifyConfig,
    format_result,
    generate_markdown_report,
    library_versions,
    run_verification,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

PROJECT_ROOT = Path(__file__).resolve().parent


def _num(value: float) -> str:
    return f"{value:.12g}"


def _angle(args: argparse.Namespace, value: float) -> str:
    return _num(math.degrees(value) if args.degrees else value)


def _vector(values: np.ndarray) -> str:
    return "[" + ", ".join(f"{complex(v.real, v.imag):.12g}" for v in values) + "]"


def _matrix(values: np.ndarray, indent: str = "    ") -> str:
    return "\n".join(indent + _vector(row) for row in values)


def _banner(title: str) -> None:
    print("=" * 60)
    print(title)
    print("=" * 60)


def _load_state(args: argparse.Namespace) -> tuple[StateDocument, entangle.TwoQubitState]:
    document = StateDocument.load(args.file, normalize=args.normalize)
    return document, document.to_state()


def _direction(args: argparse.Namespace) -> MeasurementDirection:
    if args.degrees:
        return MeasurementDirection.from_degrees(args.theta, args.phi)
    return MeasurementDirection(args.theta, args.phi)


def _describe(args: argparse.Namespace, frames: SchmidtFrames, side: int, vector: np.ndarray) -> str:
    state = frames.describe(side, vector, args.frame)
    return f"theta={_angle(args, state.theta)}, phi={_angle(args, state.phi)}  vector={_vector(vector)}"


def cmd_schmidt(args: argparse.Namespace) -> int:
    document, psi = _load_state(args)
    form = entangle.schmidt_decompose(psi)
    frames = SchmidtFrames(form)
    c1, c2 = form.coefficients

    _banner(f"Schmidt form: {document.label or args.file}")
    print(f"r = {_num(form.r)}")
    print(f"coefficients = ({_num(c1)}, {_num(c2)})")
    print(f"cone angle beta = {_angle(args, math.acos(form.r))}")
    for side, basis in ((1, form.basis1), (2, form.basis2)):
        for index, vector in enumerate(basis, start=1):
            print(f"x{side}^{index}: {_describe(args, frames, side, vector)}")
    return EXIT_OK


def cmd_collapse(args: argparse.Namespace) -> int:
    document, psi = _load_state(args)
    direction = _direction(args)
    frames = SchmidtFrames(entangle.schmidt_decompose(psi))
    outcomes = measurement.collapse(psi, direction, args.side)

    _banner(f"Collapse of spin {args.side}: {document.label or args.file}")
    print(f"direction: theta={_angle(args, direction.theta)}, phi={_angle(args, direction.phi)} (input frame)")
    for result in outcomes:
        sign = "+" if result.outcome > 0 else "-"
        if result.impossible:
            print(f"[{sign}] probability = {_num(result.probability)} (impossible)")
            continue
        print(f"[{sign}] probability = {_num(result.probability)}")
        print(f"    spin 1: {_describe(args, frames, 1, result.collapsed_first)}")
        print(f"    spin 2: {_describe(args, frames, 2, result.collapsed_second)}")
    print(f"probability sum = {_num(sum(r.probability for r in outcomes))}")
    return EXIT_OK


def cmd_luder(args: argparse.Namespace) -> int:
    document, psi = _load_state(args)
    direction = _direction(args)
    form = entangle.schmidt_decompose(psi)
    frames = SchmidtFrames(form)
    measured, remote = args.side, 3 - args.side
    after = measurement.luder(psi, direction, measured)

    _banner(f"Luder measurement of spin {measured}: {document.label or args.file}")
    print("D' =")
    print(_matrix(after))
    for side in (1, 2):
        before_side = linalg.partial_trace(psi.density, keep=side)
        after_side = linalg.partial_trace(after, keep=side)
        role = "measured" if side == measured else "remote"
        print(f"D{side} before ({role}):")
        print(_matrix(before_side))
        print(f"D{side} after ({role}):")
        print(_matrix(after_side))
        if Frame(args.frame) is Frame.SCHMIDT:
            u = frames.matrix(side)
            print(f"D{side} after, Schmidt frame:")
            print(_matrix(linalg.dagger(u) @ after_side @ u))

    before, after_remote = measurement.remote_invariance_check(psi, direction, measured)
    delta = linalg.max_abs(after_remote - before)
    verdict = "unchanged" if delta <= args.tolerance else "CHANGED"
    print(f"remote D{remote} delta = {delta:.3e} ({verdict})")
    predicted = measurement.measured_side_prediction(psi, direction, measured, schmidt=form)
    actual = linalg.partial_trace(after, keep=measured)
    print(f"measured D{measured} vs projection rule delta = {linalg.max_abs(predicted - actual):.3e}")
    return EXIT_OK


def cmd_spheremap(args: argparse.Namespace) -> int:
    document, psi = _load_state(args)
    grid = measurement.sphere_deformation_grid(psi, args.ntheta, args.nphi, args.frame)
    out = Path(args.out)
    write_grid(out, grid)
    print(f"[spheremap] {document.label or args.file}: wrote {len(grid.rows)} rows to {out}")
    print(f"[spheremap] r = {_num(grid.r)}, cone angle beta = {_angle(args, grid.beta)}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    config = VerifyConfig(
        seed=args.seed,
        cases=args.cases,
        workers=args.workers,
        tolerance=args.tolerance,
        skip_monte_carlo=args.skip_monte_carlo,
    )
    print("Sphere Model Verification")
    print("=" * 60)
    print(f"Seed: {config.seed}")
    print(f"Cases: {config.cases}")
    print(f"Workers: {config.workers}")
    print(f"Tolerance: {config.tolerance:.0e}")

    if config.cases == 0:
        print("WARNING: --cases 0 runs no suite; passing vacuously")
        return EXIT_OK

    results = run_verification(config, report=lambda result: print(format_result(result)))
    failed = [r for r in results if not r.passed]

    if args.output:
        report = generate_markdown_report(
            results,
            config,
            project_versions=library_versions(PROJECT_ROOT / "pyproject.toml"),
            python_version=platform.python_version(),
        )
        output_path = Path(args.output)
        output_path.write_text(report)
        print(f"\nResults saved to: {output_path}")

    print("=" * 60)
    if failed:
        print(f"FAILED: {len(failed)} of {len(results)} suites")
        return EXIT_FAILED
    print(f"PASSED: {len(results)} suites")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degrees", action="store_true", help="Angles in degrees instead of radians")
    common.add_argument(
        "--frame",
        choices=[f.value for f in Frame],
        default=Frame.SCHMIDT.value,
        help="Frame of reported angles",
    )
    common.add_argument(
        "--tolerance",
        type=float,
        default=linalg.ALGEBRAIC_TOL,
        help="Tolerance for closed-form identities",
    )

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("file", help="State document (JSON)")
    state.add_argument("--normalize", action="store_true", help="Rescale amplitudes to unit norm")

    measure = argparse.ArgumentParser(add_help=False)
    measure.add_argument("--theta", type=float, required=True, help="Polar angle of the direction")
    measure.add_argument("--phi", type=float, default=0.0, help="Azimuth of the direction")
    measure.add_argument("--side", type=int, choices=[1, 2], default=1, help="Measured spin")

    parser = argparse.ArgumentParser(description="Sphere Model Runner")
    commands = parser.add_subparsers(dest="command", required=True)

    schmidt = commands.add_parser("schmidt", parents=[common, state], help="Schmidt diagonal form")
    schmidt.set_defaults(handler=cmd_schmidt)

    collapse = commands.add_parser("collapse", parents=[common, state, measure], help="Von Neumann collapse")
    collapse.set_defaults(handler=cmd_collapse)

    luder = commands.add_parser("luder", parents=[common, state, measure], help="Luder measurement")
    luder.set_defaults(handler=cmd_luder)

    spheremap = commands.add_parser("spheremap", parents=[common, state], help="Sphere deformation grid")
    spheremap.add_argument("--ntheta", type=int, default=19, help="Polar samples (>= 2, poles included)")
    spheremap.add_argument("--nphi", type=int, default=36, help="Azimuth samples (>= 1)")
    spheremap.add_argument("--out", required=True, help="Output grid file")
    spheremap.set_defaults(handler=cmd_spheremap)

    verify = commands.add_parser("verify", parents=[common], help="Run the property suites")
    verify.add_argument("--seed", type=int, default=VerifyConfig.seed, help="Random seed")
    verify.add_argument("--cases", type=int, default=VerifyConfig.cases, help="Cases per suite")
    verify.add_argument("-w", "--workers", type=int, default=1, help="Monte Carlo worker threads")
    verify.add_argument("--skip-monte-carlo", action="store_true", help="Skip the sampling suite")
    verify.add_argument("-o", "--output", default=None, help="Markdown report file")
    verify.set_defaults(handler=cmd_verify)

    return parser


def _location(error: dict) -> str:
    return ".".join(str(part) for part in error["loc"]) or "document"


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not (math.isfinite(args.tolerance) and args.tolerance > 0):
            raise SphereModelError(f"--tolerance must be a positive number, got {args.tolerance!r}")
        return args.handler(args)
    except ValidationError as exc:
        for error in exc.errors():
            print(f"ERROR: {args.file}: {_location(error)}: {error['msg']}", file=sys.stderr)
    except orjson.JSONDecodeError as exc:
        print(f"ERROR: {args.file}: not valid JSON: {exc}", file=sys.stderr)
    except SphereModelError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
