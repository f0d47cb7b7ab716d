"""CLI: render the full figure set from a results directory."""

from __future__ import annotations

import argparse
import sys

from .io import TableError
from .render import render_all


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pofdma-plots",
        description="Render figures from pofdma result CSVs.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render-all", help="render every applicable figure")
    p.add_argument("results_dir", help="directory holding the result CSVs")
    p.add_argument("--format", choices=("svg", "png"), default="png")

    ns = parser.parse_args(argv)
    try:
        images = render_all(ns.results_dir, ns.format)
    except TableError as exc:
        print(f"pofdma-plots: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"pofdma-plots: I/O error: {exc}", file=sys.stderr)
        return 3
    for img in images:
        print(img)
    return 0


if __name__ == "__main__":
    sys.exit(main())
