"""Command-line front end: ``twoclass <command> ...``.

Exit codes: 0 success, 2 usage or domain error, 3 capacity exceeded,
4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path

from . import __version__
from .analytic import (
    SingularSeriesSpec,
    rep_count,
    singular_S,
    singular_finite,
    singular_product,
    tail_bound,
)
from .arith import Modulus, sieve_primes
from .errors import CapacityError, CheckpointError, InvariantViolation, PreconditionError
from .genus import ambiguous_classes, construct_type_2_2, hasse_check
from .quadforms import class_group_profile, enumerate_reduced, is_discriminant, is_fundamental
from .search import (
    MOD,
    PrimePairWitness,
    census,
    chain_of,
    load_checkpoint,
    run_search,
)
from .suites import SUITES

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_INVARIANT = 0, 2, 3, 4

log = logging.getLogger("twoclass")


class UsageError(Exception):
    pass


def header(command: str, config: dict) -> dict:
    return {"twoclass": __version__, "command": command, "config": config}


def _config(args) -> dict:
    skip = {"func", "command", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(obj: dict) -> None:
    json.dump(obj, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")


def cmd_classgroup(args) -> int:
    disc = args.disc
    if disc >= 0 or not is_discriminant(disc):
        raise UsageError(f"{disc} is not a negative discriminant (need disc = 0 or 1 mod 4)")
    if not is_fundamental(disc):
        raise UsageError(f"{disc} is not fundamental")
    profile = class_group_profile(disc, census=not args.no_census)
    out = header("classgroup", _config(args))
    out["profile"] = profile.to_json()
    amb = ambiguous_classes(disc)
    out["ambiguous"] = [list(f) for f in amb]
    D = -disc
    # forms with a coprime-to-D leading coefficient give the norm directly
    out["hasse"] = [
        {"form": list(f), **hasse_check(f.a, D).to_json()}
        for f in enumerate_reduced(disc) if math.gcd(f.a, 2 * D) == 1
    ]
    _emit(out)
    return EXIT_OK


def _witness_lines(path: Path) -> list[str]:
    lines = path.read_text().splitlines()
    return [ln for ln in lines[1:] if ln.strip()]


def cmd_search(args) -> int:
    if args.ell < 2:
        raise UsageError("ell = 1 is handled by the construct22 subcommand, not by search")
    if args.xmax < 1:
        raise UsageError("--xmax must be positive")
    if args.resume and args.restart:
        raise UsageError("--resume and --restart are exclusive")
    if (args.resume or args.restart) and not args.checkpoint:
        raise UsageError("--resume/--restart need --checkpoint")
    if (args.resume or args.checkpoint) and not args.out:
        raise UsageError("checkpointed runs need --out")
    ckpt = Path(args.checkpoint) if args.checkpoint else None
    out_path = Path(args.out) if args.out else None
    if ckpt is not None and ckpt.exists() and not (args.resume or args.restart):
        raise UsageError(f"checkpoint {ckpt} exists; pass --resume or --restart")
    if args.restart and ckpt.exists():
        ckpt.unlink()

    cfg = _config(args)
    for k in ("resume", "restart", "workers"):
        cfg.pop(k, None)  # they do not change the primary output
    head = json.dumps(header("search", cfg), sort_keys=True)

    if args.resume:
        state = load_checkpoint(ckpt, args.ell, args.xmax)
        if out_path is None or not out_path.exists():
            raise CheckpointError("output file for the resumed run is missing")
        lines = _witness_lines(out_path)
        keep = state["emitted_count"]
        if len(lines) < keep:
            raise CheckpointError(f"{out_path} has {len(lines)} witnesses, checkpoint says {keep}")
        lines = lines[:keep]
        ds = [PrimePairWitness.from_json(json.loads(ln)).d for ln in lines]
        if chain_of(ds) != state["chain"]:
            raise CheckpointError(f"{out_path} does not match the checkpoint hash chain")
        out_path.write_text("\n".join([head, *lines]) + "\n")
        sink = out_path.open("a")
    elif out_path is not None:
        sink = out_path.open("w")
        sink.write(head + "\n")
    else:
        sink = sys.stdout
        sink.write(head + "\n")

    try:
        for wit in run_search(args.ell, args.xmax, checkpoint=ckpt, resume=args.resume,
                              workers=args.workers):
            sink.write(json.dumps(wit.to_json(), sort_keys=True) + "\n")
            sink.flush()
    finally:
        if sink is not sys.stdout:
            sink.close()

    if args.census_out:
        if out_path is not None:
            witnesses = [PrimePairWitness.from_json(json.loads(ln)) for ln in _witness_lines(out_path)]
        else:
            witnesses = list(run_search(args.ell, args.xmax))
        grid = _grid(args.xmax)
        records = census(args.ell, grid, witnesses=witnesses)
        Path(args.census_out).write_text(_census_csv("search", cfg, records))
    return EXIT_OK


def _grid(xmax: int) -> list[int]:
    grid = []
    x = 10
    while x < xmax:
        grid.append(x)
        x *= 10
    grid.append(xmax)
    return grid


def _census_csv(command: str, cfg: dict, records) -> str:
    buf = io.StringIO()
    buf.write(f"# twoclass {__version__} {command} {json.dumps(cfg, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["X", "ell", "count", "ratio"])
    for r in records:
        w.writerow([r.X, r.ell, r.count, repr(r.ratio)])
    return buf.getvalue()


def cmd_census(args) -> int:
    if args.ell < 2:
        raise UsageError("ell = 1 is handled by the construct22 subcommand")
    grid = sorted(args.grid)
    if grid[0] < 2:
        raise UsageError("grid points must be at least 2")
    records = census(args.ell, grid)
    text = _census_csv("census", _config(args), records)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_construct22(args) -> int:
    out = header("construct22", _config(args))
    reports = [r.to_json() for r in construct_type_2_2(args.p1_bound, args.pairs)]
    out["reports"] = reports
    out["passed"] = sum(r["pass"] for r in reports)
    out["failed"] = len(reports) - out["passed"]
    _emit(out)
    return EXIT_OK


def _modulus(args) -> Modulus:
    try:
        return Modulus(args.m, args.s1, args.s2)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_singular(args) -> int:
    if args.P < 1:
        raise UsageError("--P must be at least 1")
    mod = _modulus(args)
    if args.combined and mod.m % 2:
        raise UsageError(f"--combined needs an even modulus, got m = {mod.m}")
    spec = SingularSeriesSpec(mod, args.h, args.P)
    finite = singular_finite(spec)
    product = singular_product(spec)
    bound = tail_bound(args.h, args.P) if args.h else None
    out = header("singular", _config(args))
    out.update({"finite": finite, "product": product, "gap": abs(finite - product),
                "tail_bound": bound})
    if args.combined:
        out["combined"] = singular_S(spec)
    _emit(out)
    return EXIT_OK


def cmd_repcount(args) -> int:
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    if args.n > 10**9:
        raise CapacityError("repcount is limited to n <= 10^9")
    mod = _modulus(args)
    table = sieve_primes(args.n, mod.m)
    rc = rep_count(args.n, mod, table)
    out = header("repcount", _config(args))
    out.update(rc.to_json())
    _emit(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    result = SUITES[args.suite]()
    out = header("verify", _config(args))
    out["result"] = result
    _emit(out)
    return EXIT_OK if result["passed"] else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twoclass", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"twoclass {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classgroup", help="class group profile of a negative discriminant")
    c.add_argument("--disc", type=int, required=True)
    c.add_argument("--no-census", action="store_true", help="skip the element-order census")
    c.set_defaults(func=cmd_classgroup)

    s = sub.add_parser("search", help="prime-pair witnesses for type (2, 2^ell)")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--xmax", type=int, required=True)
    s.add_argument("--out", help="witness JSONL (default stdout)")
    s.add_argument("--census-out", help="census CSV")
    s.add_argument("--checkpoint")
    s.add_argument("--resume", action="store_true")
    s.add_argument("--restart", action="store_true")
    s.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    s.set_defaults(func=cmd_search)

    k = sub.add_parser("construct22", help="fields of type (2, 2) from p1 = 3 mod 8")
    k.add_argument("--p1-bound", type=int, default=100)
    k.add_argument("--pairs", type=int, default=2)
    k.set_defaults(func=cmd_construct22)

    g = sub.add_parser("singular", help="finite and product singular series")
    for name, default in (("--m", MOD), ("--s1", 7), ("--s2", 11)):
        g.add_argument(name, type=int, default=default)
    g.add_argument("--h", type=int, required=True)
    g.add_argument("--P", type=int, default=10**4)
    g.add_argument("--combined", action="store_true", help="also report the class-summed series")
    g.set_defaults(func=cmd_singular)

    r = sub.add_parser("repcount", help="weighted prime-pair counts for n")
    r.add_argument("--n", type=int, required=True)
    for name, default in (("--m", MOD), ("--s1", 11), ("--s2", 7)):
        r.add_argument(name, type=int, default=default)
    r.set_defaults(func=cmd_repcount)

    n = sub.add_parser("census", help="certified witness counts on a grid of X")
    n.add_argument("--ell", type=int, default=2)
    n.add_argument("--grid", type=int, nargs="+", default=[10**5, 10**6, 10**7])
    n.add_argument("--out")
    n.set_defaults(func=cmd_census)

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("--suite", choices=sorted(SUITES), required=True)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, PreconditionError, CheckpointError, ValueError) as exc:
        print(f"twoclass: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"twoclass: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InvariantViolation, AssertionError) as exc:
        print(f"twoclass: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
