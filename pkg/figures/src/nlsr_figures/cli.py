"""nlsr-figures: one subcommand per figure, CSV in, image (or text) out."""

import argparse
import sys

from .render import FIGURE_IDS, FigureSpec, SchemaError, render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nlsr-figures",
        description="Regenerate benchmark figures from nlsr CSV output")
    sub = parser.add_subparsers(dest="figure", required=True)
    for fid in FIGURE_IDS:
        p = sub.add_parser(fid, help=f"render the {fid} figure")
        p.add_argument("--csv", action="append", required=True,
                       help="input CSV (repeatable)")
        p.add_argument("--out", required=True,
                       help="output path (.png or .svg; .txt for table1)")
        p.add_argument("--title", default="")
        if fid in ("convergence", "efficiency"):
            p.add_argument("--no-guides", action="store_true",
                           help="suppress the order-1/order-2 slope guide lines")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    guides = () if getattr(args, "no_guides", False) else (1, 2)
    spec = FigureSpec(figure=args.figure, csv_paths=args.csv,
                      out_path=args.out, slope_guides=guides, title=args.title)
    try:
        out, info = render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        code = 2
    else:
        print(out)
        if args.figure == "table1":
            print(info["text"], end="")
        code = 0
    if argv is None:
        sys.exit(code)
    return code
