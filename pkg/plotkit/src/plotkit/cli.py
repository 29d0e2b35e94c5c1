"""Command line wrapper: plot-panel --csv IN --out OUT.png [--no-cross-section]."""

import argparse
import sys

from .panel import MissingColumnError, PanelSpec, render_panel


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-panel",
        description="Render a delay-profile panel from a scatdelay delay-scan CSV.",
    )
    parser.add_argument("--csv", required=True, help="input CSV path")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument(
        "--no-cross-section",
        action="store_true",
        help="omit the log-scale cross-section overlay",
    )
    args = parser.parse_args(argv)

    spec = PanelSpec(
        csv_path=args.csv,
        out_path=args.out,
        cross_section_column=None if args.no_cross_section else "dsdo_over_R2",
    )
    try:
        render_panel(spec)
    except (MissingColumnError, ValueError, OSError) as exc:
        print(f"plot-panel: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
