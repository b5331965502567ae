"""Command line: figures <kind> <report...> -o <file>.

Exit codes mirror the solver CLI: 0 on success, 2 for bad arguments,
unreadable inputs, or schema mismatches.
"""

import argparse
import sys

from gsqg_figures.loading import FigureDataError
from gsqg_figures.render import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="figures",
        description="Render a figure from gsqg report/series/snapshot files.")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("inputs", nargs="+", metavar="report",
                   help="report.json (sweep kinds), series.csv (residuals) "
                        "or a snapshot (spectrum); dissipation_vs_nu "
                        "overlays several reports")
    p.add_argument("-o", "--out", required=True,
                   help="output file, .svg or .pdf")
    p.add_argument("--title", default=None)
    p.add_argument("--label", action="append", default=[],
                   help="legend label per input, repeatable")
    p.add_argument("--no-legend", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                          out=args.out, title=args.title,
                          labels=tuple(args.label),
                          legend=not args.no_legend)
        render(spec)
    except FigureDataError as e:
        print(f"figures error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
