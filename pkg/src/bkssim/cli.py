"""Command-line entry point: ``bkssim {verify,nchv-table,qm-probs,simulate}``."""

from __future__ import annotations

import argparse
import sys

from . import harness
from .observables import DEFAULT_COEFFICIENTS
from .qm import StateSpecError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bkssim",
        description="Two-qubit hidden-variable vs quantum proposition test.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify", help="check every algebraic invariant (no sampling)")

    p = sub.add_parser("nchv-table", help="the 16-row hidden-variable enumeration")
    p.add_argument("--format", choices=harness.FORMATS, default="csv")
    p.add_argument("--out")

    p = sub.add_parser("qm-probs", help="Born probabilities of P1..P4 for a state")
    p.add_argument("--state", required=True)
    p.add_argument("--format", choices=harness.FORMATS, default="json")
    p.add_argument("--out")

    p = sub.add_parser("simulate", help="run a seeded shot-by-shot experiment")
    p.add_argument("--state", required=True,
                   help="preset:<name> | amps:re,im;re,im;re,im;re,im | random:<seed>")
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mode", choices=harness.MODES, default="joint")
    p.add_argument("--coeffs", type=_floats, default=DEFAULT_COEFFICIENTS,
                   help="four distinct reals for maximal mode (use --coeffs=-1,0,1,2 for negatives)")
    p.add_argument("--order", type=_ints, default=(1, 2, 3, 4),
                   help="measurement order for sequential mode")
    p.add_argument("--noise", type=float, default=0.0, help="depolarizing probability per shot")
    p.add_argument("--format", choices=harness.FORMATS, default="json")
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            report = harness.run_verify()
            print(report.render())
            return EXIT_OK if report.ok else EXIT_FAIL
        if args.command == "nchv-table":
            _emit(harness.run_nchv_table(args.format), args.out)
            return EXIT_OK
        if args.command == "qm-probs":
            _emit(harness.run_qm_probs(args.state, args.format), args.out)
            return EXIT_OK
        config = harness.ExperimentConfig(
            state_spec=args.state, shots=args.shots, master_seed=args.seed, mode=args.mode,
            coefficients=args.coeffs, noise_p=args.noise, order=args.order,
            output_format=args.format, output_path=args.out, workers=args.workers,
        )
        report, records = harness.run_experiment(config)
    except (StateSpecError, ValueError) as exc:
        print(f"bkssim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"bkssim: error: {exc}", file=sys.stderr)
        return EXIT_FAIL

    try:
        _emit(harness.serialize_experiment(config, report, records), config.output_path)
    except OSError as exc:
        print(f"bkssim: error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(harness.summary_line(report), file=sys.stderr if config.output_path is None else sys.stdout)
    return EXIT_OK if report.nchv_consistent_shots == 0 and report.verdict == "QM" else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
