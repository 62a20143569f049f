"""figtool: render sweep CSVs to images.

Exit codes: 0 ok, 2 usage, 3 schema/data mismatch (with column diff), 4 I/O.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import EmptyDataError, FigureJob, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="figtool", description="render barenco sweep CSVs")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render one figure from a sweep CSV")
    r.add_argument("--kind", choices=("fig3", "fig5", "fig6"), required=True)
    r.add_argument("--csv", required=True, help="input CSV from `barenco sweep`")
    r.add_argument("--out", required=True, help="output image (suffix picks the format)")
    r.add_argument("--xlabel")
    r.add_argument("--ylabel")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    job = FigureJob(csv=Path(args.csv), kind=args.kind, out=Path(args.out),
                    xlabel=args.xlabel, ylabel=args.ylabel)
    try:
        render(job)
    except (SchemaError, EmptyDataError) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
