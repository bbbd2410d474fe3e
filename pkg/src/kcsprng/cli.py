"""kcsprng command line.

Data and reports go to stdout (or the named files); diagnostics go to
stderr.  Exit codes: 0 success, 1 a test or check failed, 2 usage,
3 curve table problem, 4 seed/entropy problem, 5 I/O problem, 6 input
stream too short.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import curvestore, stats
from .generator import (RESEED_INTERVAL, SEED_BYTES, EntropyExhaustedError, KcsPrng,
                        OsEntropySource, SeedFileSource)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TABLE, EXIT_SEED, EXIT_IO, EXIT_SHORT = range(7)
CHUNK_BITS = 1 << 20

log = logging.getLogger("kcsprng")


class CliError(Exception):
    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


def _table_path(args) -> Path:
    path = args.table or os.environ.get("KCSPRNG_TABLE")
    if not path:
        raise CliError("no curve table given (use --table or set KCSPRNG_TABLE)", EXIT_TABLE)
    return Path(path)


def _entropy(args):
    if args.seed_os:
        log.warning("OS randomness is not the physical entropy source the design assumes")
        return OsEntropySource()
    return SeedFileSource(args.seed_file)


def cmd_gen(args) -> int:
    n = args.bits
    if n < 1:
        raise CliError("--bits must be >= 1", EXIT_USAGE)
    table = _table_path(args)
    needed = math.ceil(n / RESEED_INTERVAL)
    entropy = _entropy(args)
    if isinstance(entropy, SeedFileSource) and entropy.remaining < needed:
        raise CliError(f"seed file holds {entropy.remaining} seeds, {n} bits need {needed} "
                       f"({needed * SEED_BYTES} bytes)", EXIT_SEED)
    start = time.perf_counter()
    gen = KcsPrng.boot(entropy, table, freeze=args.freeze_curves)
    out = sys.stdout.buffer if args.out == "-" else open(args.out, "wb")
    try:
        if n < 256:
            out.write(np.packbits(gen.generate(n)).tobytes())
        else:
            left = n
            while left:
                # a tail chunk under 256 bits would switch to the LSB-first mask path
                chunk = left if left < 2 * CHUNK_BITS else CHUNK_BITS
                out.write(np.packbits(gen.generate(chunk)).tobytes())
                left -= chunk
    finally:
        if out is not sys.stdout.buffer:
            out.close()
    elapsed = time.perf_counter() - start
    pad = (-n) % 8
    if pad:
        print(f"note: final byte zero-padded with {pad} bits", file=sys.stderr)
    diag = gen.diagnostics()
    rate = n / elapsed / 1e6 if elapsed > 0 else float("inf")
    print(f"bits={n} seconds={elapsed:.3f} throughput_mbps={rate:.2f} "
          f"seeds_consumed={diag['seeds_consumed']} curves={gen.curve_indices[0]},"
          f"{gen.curve_indices[1]} keyspace=2^{diag['keyspace_log2']}", file=sys.stderr)
    return EXIT_OK


def cmd_curves(args) -> int:
    if args.action == "build":
        path = Path(args.table) if args.table else None
        if path is None:
            raise CliError("curves build needs --table PATH", EXIT_USAGE)
        curvestore.build_table(args.count, args.rng_seed, path)
        print(f"wrote {args.count} curves to {path}")
        return EXIT_OK
    path = _table_path(args)
    if args.action == "verify":
        table = curvestore.load_table(path, verify=False)
        bad = []
        for rec in table:
            report = curvestore.verify_curve(rec.curve)
            for chk in report.checks:
                print(f"{rec.index}\t{chk.name}\t{chk.status}")
            if not report.passed:
                bad.append(rec.index)
        if bad:
            print(f"verification failed for record(s) {', '.join(map(str, bad))}",
                  file=sys.stderr)
            return EXIT_FAIL
        return EXIT_OK
    with curvestore.lock_for(path):
        table = curvestore.load_table(path)
        if args.action == "reset":
            curvestore.reset_statuses(table)
        for rec in table:
            print(f"{rec.index}\t{rec.used}\t{rec.curve.p:064X}")
    return EXIT_OK


def cmd_stats(args) -> int:
    try:
        stream = stats.BitStream.from_file(args.input)
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc}", EXIT_IO) from exc
    tests = [t.strip() for t in args.tests.split(",")] if args.tests else None
    lags = tuple(int(x) for x in args.lag.split(","))
    try:
        reports = stats.run_battery(stream, tests, lags)
    except stats.StreamTooShortError as exc:
        raise CliError(str(exc), EXIT_SHORT) from exc
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    for r in reports:
        print(r.line())
    extra = {}
    if tests is None:
        extra = {"entropy_per_bit": stats.entropy_per_bit(stream),
                 "serial_correlation": stats.serial_correlation(stream)}
        for k, v in extra.items():
            print(f"{k:<22} {v:.8f}")
    if args.report:
        stats.write_report(args.report, reports, extra)
    if args.plot_dir:
        from . import plotting
        plotting.plot_pvalues(reports, Path(args.plot_dir) / "pvalues.png")
        plotting.plot_autocorrelation(stream, Path(args.plot_dir) / "autocorrelation.png",
                                      max_lag=min(64, len(stream) // 2))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_restart(args) -> int:
    report = stats.restart_test(args.seed_file, _table_path(args), args.runs, args.prefix,
                                freeze=args.freeze_curves)
    print(report.grid())
    print(f"mean_hamming_fraction={report.mean_fraction:.4f} distinct={report.distinct} "
          f"mode={report.mode} result={'PASS' if report.passed else 'FAIL'}")
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.report:
        Path(args.report).write_text(json.dumps(report.__dict__, indent=2) + "\n")
    if args.plot_dir:
        from . import plotting
        plotting.plot_restart(report, Path(args.plot_dir) / "restart.png")
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcsprng", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def table_opt(p):
        p.add_argument("--table", help="curve table file (default: $KCSPRNG_TABLE)")

    def seed_opts(p, required=True):
        g = p.add_mutually_exclusive_group(required=required)
        g.add_argument("--seed-file", help="binary seed file, 72 bytes per (re)seed")
        g.add_argument("--seed-os", action="store_true", help="seed from OS randomness")

    p = sub.add_parser("gen", help="generate a raw bitstream")
    table_opt(p)
    seed_opts(p)
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--out", required=True, help="output file, '-' for stdout")
    p.add_argument("--freeze-curves", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("curves", help="manage the curve table")
    p.add_argument("action", choices=["verify", "list", "reset", "build"])
    table_opt(p)
    p.add_argument("--count", type=int, default=256, help="build: number of curves")
    p.add_argument("--rng-seed", type=int, default=0, help="build: generator seed")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("stats", help="run the statistical battery on a raw stream")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--tests", help="comma list: " + ",".join(
        list(stats.NIST_SUBSET) + ["autocorrelation"]))
    p.add_argument("--lag", default="1,2", help="autocorrelation lag(s)")
    p.add_argument("--report", help="write a JSON report here")
    p.add_argument("--plot-dir", help="write PNG figures here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("restart", help="non-reproducibility restart test")
    table_opt(p)
    p.add_argument("--seed-file", required=True)
    p.add_argument("--runs", type=int, default=6)
    p.add_argument("--prefix", type=int, default=32)
    p.add_argument("--freeze-curves", action="store_true",
                   help="testing only: do not mutate curve statuses")
    p.add_argument("--report", help="write a JSON report here")
    p.add_argument("--plot-dir", help="write PNG figures here")
    p.set_defaults(func=cmd_restart)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except curvestore.TableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TABLE
    except (EntropyExhaustedError, stats.InsufficientCurvesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEED if isinstance(exc, EntropyExhaustedError) else EXIT_TABLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
