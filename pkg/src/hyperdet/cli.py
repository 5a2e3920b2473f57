"""Command-line front end: ``hyperdet <command> ...``.

Exit codes:
  0  success
  1  a verification or acceptance check failed
  2  usage error
  3  computation exceeds the size budget (see --allow-large)
  4  structural failure (a proven property did not hold)
  5  digest or line-count mismatch in an input file
  6  I/O error
  7  the two determinant evaluators disagree
  8  malformed input (config, certificate, mask)
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import platform
import random
import sys
import time
from pathlib import Path

from . import __version__
from . import acceptance as acc
from . import combinat as cb
from . import detfun as dt
from . import epsilon as ep
from . import relalg as ra
from . import symmetry as sy
from .errors import (
    ConfigError,
    DigestMismatch,
    InfeasibleError,
    InvalidCertificateError,
    MalformedTableError,
    NotApplicableError,
    StructuralFailure,
)
from .exactnum import random_primes

log = logging.getLogger("hyperdet")

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_STRUCTURAL, EXIT_DIGEST, EXIT_IO, EXIT_DISAGREE, EXIT_INPUT = range(9)


def cache_dir() -> Path:
    d = os.environ.get("HYPERDET_CACHE")
    return Path(d) if d else Path.home() / ".cache" / "hyperdet"


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Run:
    """Collects the manifest fields of one invocation."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.t0 = time.perf_counter()
        self.manifest: dict = {
            "command": " ".join(sys.argv[1:]) if args.argv is None else " ".join(args.argv),
            "subcommand": args.command,
            "seed": args.seed,
            "primes": [],
            "inputs": {},
            "outputs": {},
            "timings": {},
            "result": {},
            "version": __version__,
            "python": platform.python_version(),
        }

    def timing(self, key: str, start: float) -> None:
        self.manifest["timings"][key] = round(time.perf_counter() - start, 3)

    def add_file(self, kind: str, path: Path) -> None:
        self.manifest[kind][str(path)] = sha256_file(path)

    def write(self, status: int) -> None:
        self.manifest["timings"]["total"] = round(time.perf_counter() - self.t0, 3)
        self.manifest["exit_status"] = status
        path = self.args.manifest
        if path is None:
            path = cache_dir() / "manifests" / f"{self.args.command}.json"
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(self.manifest, indent=1, sort_keys=True) + "\n")
        except OSError as exc:
            log.warning("could not write manifest %s: %s", path, exc)


def load_or_solve_epsilon(path: Path | None, run: Run) -> ep.EpsilonTable:
    """Table from ``path`` (strict), else from the cache (recomputed if stale)."""
    if path is not None:
        table = ep.EpsilonTable.load(path)
        run.add_file("inputs", path)
        return table
    cached = cache_dir() / "epsilon-v1.txt"
    if cached.exists():
        try:
            table = ep.EpsilonTable.load(cached)
            run.add_file("inputs", cached)
            return table
        except DigestMismatch as exc:
            log.warning("cached table rejected (%s); recomputing", exc)
    t = time.perf_counter()
    table, rep = ep.solve_epsilon(seed=run.args.seed)
    run.timing("solve", t)
    cached.parent.mkdir(parents=True, exist_ok=True)
    table.save(cached)
    run.add_file("outputs", cached)
    return table


# dims ------------------------------------------------------------------

def cmd_dims(args, run: Run) -> int:
    primes = random_primes(args.seed)
    run.manifest["primes"] = primes
    if args.p is not None:
        t = time.perf_counter()
        d = ra.block_dimension(args.n, args.p, primes, allow_large=args.allow_large)
        run.timing("rank", t)
        print(f"n={args.n} p={args.p} dim={d}")
        run.manifest["result"] = {"n": args.n, "p": args.p, "dim": d}
        return EXIT_OK
    rep = ra.dimension(args.n, primes, samples=args.samples, seed=args.seed,
                       allow_large=args.allow_large, oracle=args.oracle)
    for b in rep.blocks:
        line = f"p={b.p:2d} dim={b.dim}"
        if args.evidence:
            line += f"  [{b.evidence}] {b.detail}"
        print(line)
    print(f"total {rep.total}")
    run.manifest["result"] = {"n": args.n, "total": rep.total, "blocks": rep.split(),
                              "evidence": [b.evidence for b in rep.blocks]}
    return EXIT_OK


# epsilon ---------------------------------------------------------------

def cmd_epsilon(args, run: Run) -> int:
    if args.action == "solve":
        out = args.out or cache_dir() / "epsilon-v1.txt"
        t = time.perf_counter()
        table, rep = ep.solve_epsilon(method=args.method, seed=args.seed)
        run.timing("solve", t)
        run.manifest["primes"] = rep.primes
        out.parent.mkdir(parents=True, exist_ok=True)
        table.save(out)
        run.add_file("outputs", out)
        print(f"wrote {out} ({len(table)} entries)")
        print(f"corank {rep.corank} via {rep.method} (rank {rep.rank})")
        print(f"histogram {table.histogram_line()}")
        run.manifest["result"] = {"corank": rep.corank, "method": rep.method,
                                  "histogram": table.histogram_line()}
        return EXIT_OK
    src = args.input or cache_dir() / "epsilon-v1.txt"
    table = ep.EpsilonTable.load(src)
    run.add_file("inputs", src)
    print(f"digest ok, {len(table)} entries")
    system = ep.build_system()
    problems = ep.check_table(table, system)
    cor = ep.verify_corank(system)
    print(f"corank {cor.corank}: {cor.evidence}")
    print(f"histogram {table.histogram_line()}")
    for p in problems:
        print(f"FAIL {p}")
    run.manifest["result"] = {"problems": problems, "corank": cor.corank, "histogram": table.histogram_line()}
    return EXIT_STRUCTURAL if problems else EXIT_OK


# orbits ----------------------------------------------------------------

def cmd_orbits(args, run: Run) -> int:
    table = load_or_solve_epsilon(args.eps, run)
    t = time.perf_counter()
    rep = sy.classify_orbits(ep.nontrivial_masks(), table)
    run.timing("classify", t)
    out = args.out or cache_dir() / "orbits-v1.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    rep.save(out)
    run.add_file("outputs", out)
    sys.stdout.write(rep.body())
    p1 = rep.find(ep.p1_mask())
    print(f"P1 {cb.mask_to_hex(ep.p1_mask(), 6)} lies in the orbit of {cb.mask_to_hex(p1.rep, 6)}: size {p1.size} eps {p1.eps}")
    run.manifest["result"] = {"orbits": len(rep.orbits), "total": rep.total_masks}
    return EXIT_OK


# det -------------------------------------------------------------------

def _fmt(x) -> str:
    return f"{x.numerator}/{x.denominator}"


def cmd_det(args, run: Run) -> int:
    cfg = dt.TensorConfig.load(args.input)
    run.add_file("inputs", args.input)
    results = {}
    if args.method in ("sum", "both"):
        results["sum"] = dt.det_sum(cfg, load_or_solve_epsilon(args.eps, run))
    if args.method in ("brackets", "both"):
        results["brackets"] = dt.det_bracket(cfg, dt.load_brackets(args.brackets))
    for k, v in results.items():
        print(f"{k}: {_fmt(v)}")
    run.manifest["result"] = {k: _fmt(v) for k, v in results.items()}
    if len(set(results.values())) > 1:
        diff = results["sum"] - results["brackets"]
        print(f"DISAGREE: sum - brackets = {_fmt(diff)}", file=sys.stderr)
        return EXIT_DISAGREE
    return EXIT_OK


# reduce ----------------------------------------------------------------

def cmd_reduce(args, run: Run) -> int:
    n = args.n
    if args.mask:
        gens = [cb.mask_from_hex(args.mask, n)]
    else:
        rng = random.Random(args.seed)
        if args.e1 is not None:
            gens = [ra.random_generator(n, args.e1, rng) for _ in range(args.samples)]
        else:
            gens = acc.reduction_samples(n, args.samples, rng)
    lengths = []
    bad = 0
    t = time.perf_counter()
    for g in gens:
        cert = ra.reduce_generator(g, n)
        ok = ra.verify_certificate(cert)
        bad += not ok
        lengths.append(len(cert))
        if args.out and len(gens) == 1:
            args.out.write_text(ra.export_certificate(cert))
            run.add_file("outputs", args.out)
    run.timing("reduce", t)
    print(f"n={n}: {len(gens) - bad}/{len(gens)} certificates verified; "
          f"steps min {min(lengths)} mean {sum(lengths) / len(lengths):.1f} max {max(lengths)}")
    run.manifest["result"] = {"n": n, "samples": len(gens), "verified": len(gens) - bad,
                              "max_steps": max(lengths)}
    return EXIT_CHECK if bad else EXIT_OK


# verify ----------------------------------------------------------------

def cmd_verify(args, run: Run) -> int:
    ctx = acc.Context(seed=args.seed)
    if args.suite == "reduction" and (args.n is not None or args.samples is not None):
        n = args.n or 7
        plan = ((n, args.samples or 200),)
        t = time.perf_counter()
        ok, detail = acc.check_reduction(ctx, plan)
        res = {"reduction": acc.Outcome(ok, detail, time.perf_counter() - t)}
        print(acc.format_line("reduction", res["reduction"]))
    else:
        names = None if args.suite == "all" else [args.suite]
        res = acc.run_all(ctx, names)
    if "solved" in ctx.__dict__:
        run.manifest["primes"] = ctx.solved[1].primes
    run.manifest["result"] = {k: {"ok": v.ok, "detail": v.detail} for k, v in res.items()}
    failed = [k for k, v in res.items() if not v.ok]
    print("all criteria pass" if not failed else f"FAILED: {', '.join(failed)}")
    return EXIT_CHECK if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperdet",
        description="Exact computations for the determinant-like map on 2-partitions of K_6^3.",
        epilog=__doc__.split("\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"hyperdet {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for primes and random checks (default 0)")
    common.add_argument("--threads", type=int, default=os.cpu_count(),
                        help="worker cap; results do not depend on it (computations here are sequential)")
    common.add_argument("--manifest", type=Path, help="manifest path (default: $HYPERDET_CACHE/manifests/<command>.json)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", parents=[common], help="graded dimensions of the quotient for n <= 6")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, help="a single block (e1 count)")
    p.add_argument("--allow-large", action="store_true", help="lift the 200000-column block budget")
    p.add_argument("--evidence", action="store_true", help="show how each block dimension was obtained")
    p.add_argument("--samples", type=int, default=1000, help="certificates per block for n = 6, p >= 12")
    p.add_argument("--oracle", action="store_true", help="cross-check ranks by dense rational elimination")

    p = sub.add_parser("epsilon", parents=[common], help="solve or verify the sign table")
    p.add_argument("action", choices=["solve", "verify"])
    p.add_argument("--out", type=Path)
    p.add_argument("--in", dest="input", type=Path)
    p.add_argument("--method", choices=["propagation", "elimination"], default="propagation")

    p = sub.add_parser("orbits", parents=[common], help="S6 x S2 orbits of the nontrivial partitions")
    p.add_argument("--eps", type=Path, help="sign table (default: cached, solved if absent)")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("det", parents=[common], help="evaluate the determinant on a config")
    p.add_argument("action", choices=["eval"])
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--method", choices=["sum", "brackets", "both"], default="both")
    p.add_argument("--eps", type=Path)
    p.add_argument("--brackets", type=Path, help="bracket-term file (default: bundled)")

    p = sub.add_parser("reduce", parents=[common], help="slice-reduction certificates")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--e1", type=int, help="e1 count of the random generators (default: C(n-1,2)+1)")
    p.add_argument("--mask", help="reduce this generator (hex) instead of random ones")
    p.add_argument("--out", type=Path, help="write the certificate (with --mask)")

    p = sub.add_parser("verify", parents=[common], help="run acceptance criteria")
    p.add_argument("suite", choices=["all", *acc.CRITERIA])
    p.add_argument("--n", type=int, help="reduction suite: vertex count")
    p.add_argument("--samples", type=int, help="reduction suite: number of certificates")
    return parser


COMMANDS = {"dims": cmd_dims, "epsilon": cmd_epsilon, "orbits": cmd_orbits, "det": cmd_det,
            "reduce": cmd_reduce, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    run = Run(args)
    try:
        status = COMMANDS[args.command](args, run)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        status = EXIT_INFEASIBLE
    except StructuralFailure as exc:
        print(f"structural failure: {exc}", file=sys.stderr)
        status = EXIT_STRUCTURAL
    except DigestMismatch as exc:
        print(f"digest mismatch: {exc}", file=sys.stderr)
        status = EXIT_DIGEST
    except (ConfigError, MalformedTableError, InvalidCertificateError, NotApplicableError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        status = EXIT_INPUT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        status = EXIT_IO
    run.write(status)
    return status


if __name__ == "__main__":
    sys.exit(main())
