"""Command-line front end: search, stats, synthesize, verify.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O
error.  Progress goes to stderr; machine-readable output goes to files
and stdout.  Every output file gets a ``<file>.manifest.json`` sidecar
sufficient to re-run the command.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from chainsynth import __version__, _kernels
from chainsynth.canonical import CanonicalClass
from chainsynth.hamiltonian import CouplingPair
from chainsynth.search import (
    SearchConfig,
    coverage_stats,
    read_database,
    run_search,
    verify_record,
    write_database,
    write_stats_csv,
)
from chainsynth.synthesis import (
    build_profile,
    database_digest,
    read_profile,
    simulate_profile,
    write_profile,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_IO = 3

NAMED_GATES = {
    "cnot": CanonicalClass(0.0, 0.0, math.pi / 4),
    "cz": CanonicalClass(0.0, 0.0, math.pi / 4),
    "swap": CanonicalClass(math.pi / 4, math.pi / 4, math.pi / 4),
    "iswap": CanonicalClass(math.pi / 4, math.pi / 4, 0.0),
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _sha256(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _write_manifest(out_path, command: str, config: dict,
                    duration: float, inputs: dict, outputs: dict) -> None:
    doc = {
        "command": command,
        "config": config,
        "tool_version": __version__,
        "backend": _kernels.BACKEND,
        "duration_seconds": duration,
        "inputs": {str(k): _sha256(k) for k in inputs},
        "outputs": {str(k): _sha256(k) for k in outputs},
    }
    with open(f"{out_path}.manifest.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="chainsynth", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="run the grid-seeded descent search")
    p.add_argument("--j12", type=float, default=1.0)
    p.add_argument("--j23", type=float, default=0.9)
    p.add_argument("--range", dest="range_l", type=float, default=5.0,
                   help="grid half-range L (default 5)")
    p.add_argument("--grid", dest="density_m", type=int, default=10,
                   help="grid density m; 10 is desk scale, 30 full scale")
    p.add_argument("--conv-tol", type=float, default=0.000005)
    p.add_argument("--obj-threshold", type=float, default=1.99995)
    p.add_argument("--angle-tol", type=float, default=0.0025 * math.pi)
    p.add_argument("--max-iterations", type=int, default=10000)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau-penalty", type=float, default=0.0,
                   help="subtract this weight times tau from the descent objective")
    p.add_argument("--out", required=True)

    p = sub.add_parser("stats", help="coverage statistics of a database")
    p.add_argument("--db", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bins", type=int, default=50)

    p = sub.add_parser("synthesize", help="compile a target class to a profile")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--target", help='three angles "c1,c2,c3" in radians')
    group.add_argument("--gate", help=f"named gate: {', '.join(sorted(NAMED_GATES))}")
    p.add_argument("--db", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="replay-check a database or profile")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--db")
    group.add_argument("--profile")
    return parser


def _cmd_search(args) -> int:
    config = SearchConfig(
        couplings=CouplingPair(args.j12, args.j23),
        range_l=args.range_l,
        density_m=args.density_m,
        conv_tol=args.conv_tol,
        obj_threshold=args.obj_threshold,
        angle_tol=args.angle_tol,
        max_iterations=args.max_iterations,
        workers=args.workers,
        jitter=args.jitter,
        seed=args.seed,
        tau_penalty=args.tau_penalty,
    )
    total = args.density_m ** 4
    t0 = time.monotonic()

    def progress(done, n, found):
        if done % max(1, n // 100) == 0 or done == n:
            print(f"\r{done}/{n} descents, {found} records", end="",
                  file=sys.stderr, flush=True)

    records = run_search(config, progress=progress)
    print(file=sys.stderr)
    elapsed = time.monotonic() - t0
    write_database(args.out, records, config)
    _write_manifest(args.out, "search", vars(args) | {"total_starts": total},
                    elapsed, {}, {args.out: None})
    print(f"{len(records)} records written to {args.out} in {elapsed:.1f}s")
    return EXIT_OK


def _cmd_stats(args) -> int:
    t0 = time.monotonic()
    records, _config = read_database(args.db)
    stats = coverage_stats(records, bins=args.bins)
    write_stats_csv(args.out, stats)
    _write_manifest(args.out, "stats", vars(args), time.monotonic() - t0,
                    {args.db: None}, {args.out: None})
    print(f"count={stats.count} max_gap={stats.max_gap / math.pi:.6f}pi "
          f"mean_gap={stats.mean_gap / math.pi:.6f}pi")
    return EXIT_OK


def _parse_target(args) -> CanonicalClass:
    if args.gate is not None:
        try:
            return NAMED_GATES[args.gate.lower()]
        except KeyError:
            raise _UsageError(f"unknown named gate {args.gate!r}")
    parts = args.target.split(",")
    if len(parts) != 3:
        raise _UsageError('--target must be three comma-separated angles')
    try:
        c1, c2, c3 = (float(p) for p in parts)
    except ValueError:
        raise _UsageError(f"could not parse target angles from {args.target!r}")
    return CanonicalClass(c1, c2, c3)


def _cmd_synthesize(args) -> int:
    target = _parse_target(args)
    t0 = time.monotonic()
    records, _config = read_database(args.db)
    build = build_profile(target, records)
    write_profile(args.out, build, _config.couplings,
                  db_digest=database_digest(args.db))
    _write_manifest(args.out, "synthesize", vars(args), time.monotonic() - t0,
                    {args.db: None}, {args.out: None})
    print(f"relaxations={build.relaxations} switchings={build.switchings} "
          f"predicted_angle_error={build.predicted_angle_error:.6e}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.db is not None:
        records, config = read_database(args.db)
        failures = 0
        for i, rec in enumerate(records):
            report = verify_record(rec, config)
            oracle_gap = abs(report.leakage ** 2 - (2 - rec.objective_value))
            ok = (
            rec.objective_value > config.obj_threshold
                and report.leakage < math.sqrt(2 - config.obj_threshold) + 1e-9
                and report.class_error <= config.angle_tol + 1e-6
            )
            status = "ok" if ok else "FAIL"
            print(f"record {i}: {status} leakage={report.leakage:.3e} "
                  f"class_error={report.class_error:.3e} "
                  f"conjecture_distance={report.conjecture_distance:.3e}")
            if not ok:
                failures += 1
        if failures:
            print(f"{failures} of {len(records)} records failed", file=sys.stderr)
            return EXIT_VERIFY
        print(f"all {len(records)} records pass")
        return EXIT_OK
    build, couplings = read_profile(args.profile)
    sim = simulate_profile(build.profile, couplings)
    error = sim.class_error_vs(build.target)
    bound = build.predicted_angle_error + 3 * 0.0025 * math.pi
    status = "ok" if error <= bound else "FAIL"
    print(f"profile: {status} class_error={error:.3e} bound={bound:.3e} "
          f"flagged_segments={list(sim.flagged_segments)}")
    return EXIT_OK if error <= bound else EXIT_VERIFY


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handlers = {
        "search": _cmd_search,
        "stats": _cmd_stats,
        "synthesize": _cmd_synthesize,
        "verify": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
