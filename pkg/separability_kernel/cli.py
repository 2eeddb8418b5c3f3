#!/usr/bin/env python3
"""
Command line front end

Usage:
    separability-kernel verify instance.yaml
    separability-kernel derive instance.yaml --what integrals
    separability-kernel decompose instance.yaml
    separability-kernel construct --kind twisted --r "[[7/5, 0], [0, 1/5]]" --s "[[7/5, 0], [0, 1/5]]" --out e.yaml

The document goes to standard output (or --out), log messages to standard
error. Exit status: 0 separability idempotent, 3 nilpotent variant,
1 rejected, 2 input error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from sepcore import settings
from sepcore.errors import DocumentError, RefusedForMode, SeparabilityError

from .codec import dump_text, load_text, read_instance, write_atomic
from .documents import (
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_REJECTED,
    ConstructionKind,
    DeriveTarget,
    exit_code_for,
)
from .kernel import SeparabilityKernel


def _literal(text: str):
    """A matrix literal such as "[[1, 0], [0, 1/2]]"."""
    try:
        return load_text(text, "<argument>")
    except DocumentError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="separability-kernel",
        description="Verify separability idempotents and derive their antipodes, integrals and duals.",
    )
    parser.add_argument("--mode", choices=["exact", "float", "float64"],
                        help="scalar backend (default: instance file, then SEPKERNEL_MODE)")
    parser.add_argument("--tol", type=float, help="comparison tolerance in float mode")
    parser.add_argument("--seed", type=int, help="seed for random sampling and random constructions")
    parser.add_argument("--workers", type=int, help="worker threads for independent checks")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="log level on standard error")

    commands = parser.add_subparsers(dest="command", required=True)

    cmd = commands.add_parser("verify", help="certify an instance")
    cmd.add_argument("instance", help="instance description file")
    cmd.add_argument("--out", help="write the certificate here instead of standard output")

    cmd = commands.add_parser("derive", help="derive antipodes, integrals, modular data or duals")
    cmd.add_argument("instance", help="instance description file")
    cmd.add_argument("--what", required=True, choices=[t.value for t in DeriveTarget])
    cmd.add_argument("--out", help="write the document here instead of standard output")

    cmd = commands.add_parser("decompose", help="split a block-diagonal instance and recover per-block twists")
    cmd.add_argument("instance", help="instance description file")
    cmd.add_argument("--out", help="write the document here instead of standard output")

    cmd = commands.add_parser("construct", help="write the instance description of a construction")
    cmd.add_argument("--kind", required=True,
                     choices=[k.value for k in ConstructionKind if k != ConstructionKind.EXPLICIT])
    cmd.add_argument("--n", type=int, help="matrix size for E0, nonfull and random_twisted")
    cmd.add_argument("--r", type=_literal, help="matrix literal for r")
    cmd.add_argument("--s", type=_literal, help="matrix literal for s")
    cmd.add_argument("--normalize", action="store_true", help="rescale s so that Tr(s r) = n")
    cmd.add_argument("--component", action="append", default=[],
                     help="instance file of a direct sum component (repeatable)")
    cmd.add_argument("--explicit", action="store_true", help="write expanded coefficients instead of the recipe")
    cmd.add_argument("--out", help="write the instance here instead of standard output")
    return parser


def _emit(data: dict, out: Optional[str]) -> None:
    if out:
        write_atomic(out, data)
    else:
        sys.stdout.write(dump_text(data))


def run(args: argparse.Namespace) -> int:
    kernel = SeparabilityKernel(mode=args.mode, tol=args.tol, seed=args.seed, workers=args.workers)
    if args.command == "construct":
        components = [read_instance(path) for path in args.component] or None
        desc = kernel.construct(args.kind, n=args.n, r=args.r, s=args.s, normalize=args.normalize,
                                components=components, explicit=args.explicit)
        _emit(desc.to_dict(), args.out)
        return EXIT_OK

    desc = read_instance(args.instance)
    if args.command == "verify":
        doc = kernel.verify(desc)
    elif args.command == "derive":
        doc = kernel.derive(desc, args.what)
    else:
        doc = kernel.decompose(desc)
    _emit(doc.to_dict(), args.out)
    return doc.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, args.log_level),
                        format="%(asctime)s %(levelname)s %(message)s")
    try:
        settings.init_settings()
        return run(args)
    except (DocumentError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except RefusedForMode as e:
        print(f"refused: {e}", file=sys.stderr)
        return exit_code_for(e.mode)
    except (SeparabilityError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_REJECTED


if __name__ == "__main__":
    sys.exit(main())
