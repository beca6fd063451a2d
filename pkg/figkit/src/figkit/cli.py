"""figkit <kind> --in CSV... --out FILE

Kinds: pdr-timeseries | power-timeseries | power-per-node.
Consumes the simulator's documented CSV schemas; emits raster + vector images.
"""

import argparse
import sys

from .render import KINDS, FigkitError, render, save


def build_parser():
    parser = argparse.ArgumentParser(
        prog="figkit", description="Render figures from simulator metrics CSVs")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        metavar="CSV", help="input CSVs, one series per file")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--attack-start", type=float, default=120.0,
                        help="vertical marker position in seconds "
                             "(timeseries kinds only)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        fig = render(args.kind, args.inputs, attack_start_s=args.attack_start)
        written = save(fig, args.out)
    except FigkitError as exc:
        print(f"figkit: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
