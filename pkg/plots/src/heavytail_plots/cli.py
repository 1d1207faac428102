"""Command line entry: render a bundle directory into one image."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figure import InputError, PlotSpec, discover_inputs, plot_error_bundle

EXIT_OK = 0
EXIT_INPUT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heavytail-plots",
        description="Render the error-curve CSVs of a bundle directory "
                    "into a single log-scale comparison figure.")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the error-curve CSV files")
    parser.add_argument("--out", dest="out_file", required=True,
                        help="output image path (png, pdf, svg, ...)")
    parser.add_argument("--linear-y", action="store_true",
                        help="use a linear instead of log y axis")
    parser.add_argument("--title", default="Squared error of time-t estimates")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        inputs = discover_inputs(args.in_dir)
        plot_error_bundle(PlotSpec(inputs=inputs,
                                   output=Path(args.out_file),
                                   log_y=not args.linear_y,
                                   title=args.title))
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
