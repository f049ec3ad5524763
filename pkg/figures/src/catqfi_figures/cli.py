"""Entry point: catqfi-plot --figure <id> --data DIR --out DIR."""
import argparse
import sys

from .recipes import RECIPES, render
from .schema import SchemaError


def build_parser():
    parser = argparse.ArgumentParser(
        prog="catqfi-plot",
        description="Render sweep CSVs into figure panels (SVG and PNG).")
    parser.add_argument("--figure", required=True, choices=sorted(RECIPES),
                        help="panel id")
    parser.add_argument("--data", required=True,
                        help="directory holding the sweep CSVs")
    parser.add_argument("--out", required=True,
                        help="directory the images are written to")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        result = render(args.figure, args.data, args.out)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    for path in result["files"]:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
