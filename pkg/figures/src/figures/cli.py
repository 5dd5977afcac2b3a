"""Command-line entry point: `figures --spec <file> --out <img>`."""

import argparse
import sys

from .data import MissingColumnError
from .render import render
from .spec import load_spec

__all__ = ["main"]

EXIT_OK = 0
EXIT_ERROR = 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render a figure from solver CSV output.",
    )
    parser.add_argument("--spec", required=True,
                        help="JSON figure specification file")
    parser.add_argument("--out", default="",
                        help="output image path (overrides the spec)")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec, out_override=args.out)
        path = render(spec)
    except (OSError, ValueError, MissingColumnError) as exc:
        print(f"figures: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
