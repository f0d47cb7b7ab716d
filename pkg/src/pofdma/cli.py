"""Command-line entry point.

Subcommands: papr, ber, psd, complexity, all. Flags override config-file
values, which override the per-command defaults. Exit codes: 0 on
success, 2 for configuration errors, 3 for I/O errors.
"""

from __future__ import annotations

import argparse
import sys

from . import harness
from .harness import ConfigError
from .txchain import SCHEMES


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pofdma",
        description="Uplink multiple-access link simulator "
                    "(PAPR / BER / PSD / operation counts).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("papr", "PAPR sample collection: CCDF grid and averages"),
        ("ber", "bit-error-rate sweep over SNR and delay spread"),
        ("psd", "Welch spectra of two users and the aggregate band"),
        ("complexity", "closed-form operation-count tables"),
        ("all", "run every experiment"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--N", dest="n", type=int, help="subcarrier count (power of two)")
        p.add_argument("--K", dest="k_list", type=int, action="append",
                       help="user count; repeat for several grid values")
        p.add_argument("--scheme", dest="schemes", action="append", choices=SCHEMES,
                       help="scheme to include; repeat for several")
        p.add_argument("--mod", dest="modulations", type=int, action="append",
                       choices=(16, 64), help="modulation order; repeatable")
        p.add_argument("--snr", dest="snr_db", type=str,
                       help="SNR grid in dB: lo..hi:step or a comma list")
        p.add_argument("--delay-ns", dest="delay_ns", type=float, action="append",
                       help="delay spread in ns; repeatable")
        p.add_argument("--blocks", type=int, help="Monte Carlo blocks per grid point")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--cp-len", dest="cp_len", type=int,
                       help="cyclic prefix length in samples (default N/4)")
        p.add_argument("--oversample", type=int, help="PAPR oversampling factor")
        p.add_argument("--out", type=str, help="output directory for CSV files")
        p.add_argument("--workers", type=int, help="parallel workers over grid points")
        p.add_argument("--config", type=str, help="key=value config file")
    return parser


def _provided(ns: argparse.Namespace) -> dict:
    fields = ("n", "k_list", "schemes", "modulations", "snr_db", "delay_ns",
              "blocks", "seed", "cp_len", "oversample", "out", "workers")
    values = {f: getattr(ns, f) for f in fields}
    if values["snr_db"] is not None:
        values["snr_db"] = harness.parse_snr_spec(values["snr_db"])
    for f in ("k_list", "schemes", "modulations", "delay_ns"):
        if values[f] is not None:
            values[f] = tuple(values[f])
    return values


_RUNNERS = {
    "papr": harness.run_papr_experiment,
    "ber": harness.run_ber_experiment,
    "psd": harness.run_psd_experiment,
    "complexity": harness.run_complexity_report,
}


def main(argv: list[str] | None = None) -> int:
    ns = _build_parser().parse_args(argv)
    try:
        provided = _provided(ns)
    except ValueError as exc:
        print(f"pofdma: bad flag value: {exc}", file=sys.stderr)
        return 2

    commands = ("complexity", "papr", "ber", "psd") if ns.command == "all" \
        else (ns.command,)
    try:
        configs = {c: harness.parse_config(provided, ns.config, command=c)
                   for c in commands}
    except ConfigError as exc:
        print(f"pofdma: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"pofdma: cannot read config file: {exc}", file=sys.stderr)
        return 3

    try:
        for c in commands:
            harness.ensure_outdir(configs[c])
        for c in commands:
            print(f"[{c}] writing to {configs[c].out}", file=sys.stderr)
            _RUNNERS[c](configs[c])
    except OSError as exc:
        print(f"pofdma: I/O error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
