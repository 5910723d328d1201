"""CLI: acsplot report.csv [more.csv ...] -o figure.png [--snr 0 10] [--curves]"""

import argparse
import sys

from .render import PlotSpec, ReportFormatError, render


def main(argv=None):
    ap = argparse.ArgumentParser(prog="acsplot", description=__doc__)
    ap.add_argument("inputs", nargs="+", help="report CSV files")
    ap.add_argument("-o", "--output", default="sum_rate.png", help="output image path")
    ap.add_argument(
        "--snr", type=float, nargs="+", default=None, help="only draw these DL SNR values"
    )
    ap.add_argument(
        "--curves", action="store_true", help="separate lb/ub curves instead of bands"
    )
    ap.add_argument("--title", default="Sum-rate bounds vs. pilot dimension")
    ap.add_argument("--dpi", type=int, default=150)
    args = ap.parse_args(argv)

    spec = PlotSpec(
        inputs=args.inputs,
        output=args.output,
        snr_values=args.snr,
        band=not args.curves,
        title=args.title,
        dpi=args.dpi,
    )
    try:
        path = render(spec)
    except (ReportFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
