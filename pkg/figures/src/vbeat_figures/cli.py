"""Command line: render canonical figures from a reproduce-fig output directory."""
from __future__ import annotations

import argparse
import json
import sys

from .render import BUILDERS, MissingInput, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vbeat-figures",
        description="Render vbeat CSV/JSON outputs into figure files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one canonical figure")
    p.add_argument("figure", choices=sorted(BUILDERS))
    p.add_argument("--data-dir", required=True,
                   help="directory produced by 'vbeat reproduce-fig'")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--report", default=None,
                   help="optional path for the JSON render report")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = BUILDERS[args.figure](args.data_dir)
    try:
        report = render(spec, args.out_dir)
    except MissingInput as exc:
        print(f"error: missing input file: {exc}", file=sys.stderr)
        return 2
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    for path in report["outputs"]:
        print(path)
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
