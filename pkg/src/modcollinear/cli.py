"""Command-line interface: ``modcollinear <command> [options]``.

Tables go to standard output; ``--out PATH`` writes the structured record.
Exit codes: 0 success, 2 parse/usage error, 3 budget exceeded, 4 theorem,
assertion or counter-mismatch failure, 5 corrupt best-known store.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import counting, formats, profile, search
from .errors import (BudgetExceeded, CapExceeded, CorruptStore, CounterMismatch, ParseError,
                     ProofAssertionFailure, SlopeOutOfRange, TheoremViolation)
from .plane import Permutation, make_modulus

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_VIOLATION = 4
EXIT_STORE = 5


def _global_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--modulus", "-n", type=int, help="prime modulus n")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=None,
                        help=f"worker processes (default ${search.WORKERS_ENV} or 1)")
    common.add_argument("--out", type=Path, help="write the structured result record here")
    common.add_argument("--budget", type=int, default=search.DEFAULT_BUDGET,
                        help="maximum number of candidates for exhaustive modes")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = argparse.ArgumentParser(prog="modcollinear", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="count collinear triples")
    p.add_argument("source", nargs="?", help="point-set file or registry name")
    p.add_argument("--perm", help="permutation literal a0,a1,...")
    how = p.add_mutually_exclusive_group()
    how.add_argument("--naive", dest="how", action="store_const", const="naive")
    how.add_argument("--fast", dest="how", action="store_const", const="fast")
    how.add_argument("--both", dest="how", action="store_const", const="both")
    p.set_defaults(how="fast")

    p = sub.add_parser("profile", parents=[common], help="slope-class and line profiles")
    p.add_argument("--perm", required=True)
    p.add_argument("--slope", type=int)

    p = sub.add_parser("trace", parents=[common], help="check the lower-bound argument step by step")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--perm")
    src.add_argument("--random", type=int, metavar="COUNT")

    p = sub.add_parser("expected", parents=[common], help="mean triple count over all permutations")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--enumerate", action="store_true")
    mode.add_argument("--sample", type=int, metavar="N")
    p.add_argument("--cap", type=int, default=profile.DEFAULT_ENUMERATE_CAP)

    p = sub.add_parser("search", parents=[common], help="minimize the triple count over permutations")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", dest="mode", action="store_const", const="exhaustive")
    mode.add_argument("--anneal", dest="mode", action="store_const", const="anneal")
    p.set_defaults(mode="exhaustive")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--t0", type=float, default=2.0, help="initial temperature")
    p.add_argument("--cooling", type=float, default=0.9995)
    p.add_argument("--witnesses", type=int, default=16, help="witness cap")
    _store_options(p)

    p = sub.add_parser("survey", parents=[common], help="minimum triple count over point sets of a size")
    p.add_argument("--size", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--full", dest="survey_mode", action="store_const", const="full")
    mode.add_argument("--sample", type=int, metavar="N")
    p.set_defaults(survey_mode="full")
    _store_options(p)

    p = sub.add_parser("examples", parents=[common], help="list or print the named examples")
    p.add_argument("name", nargs="?")
    return parser


def _store_options(p):
    p.add_argument("--store", type=Path, default=Path("best_known.jsonl"),
                   help="best-known witness log (default ./best_known.jsonl)")
    p.add_argument("--no-store", action="store_true")


def _emit(args, record: formats.ResultRecord) -> None:
    if args.out is not None:
        record.save(args.out)


def _workers(args) -> int:
    return args.workers if args.workers is not None else search.default_workers()


def _load_graph(args):
    if args.perm is not None:
        if args.source is not None:
            raise ParseError("give either a point-set source or --perm, not both")
        return formats.parse_permutation(args.perm, args.modulus)
    if args.source is None:
        raise ParseError("count needs a point-set file, a registry name, or --perm")
    if args.source in formats.REGISTRY:
        g = formats.registry_pointset(args.source)
    else:
        path = Path(args.source)
        if not path.exists():
            raise ParseError(f"{args.source!r} is neither a file nor a registry name "
                             f"({', '.join(sorted(formats.REGISTRY))})")
        try:
            g = formats.read_pointset(path)
        except ParseError as exc:
            raise ParseError(f"{path}: {exc}") from None
    if args.modulus is not None and args.modulus != g.n:
        raise ParseError(f"--modulus {args.modulus} disagrees with the input modulus {g.n}")
    return g


def _per_slope_table(tc: counting.TripleCount) -> str:
    cells = [f"{k}:{v}" for k, v in tc.items() if v]
    return " ".join(cells) if cells else "(none)"


def cmd_count(args) -> int:
    g = _load_graph(args)
    start = time.perf_counter()
    results = {}
    if args.how in ("naive", "both"):
        results["naive"] = counting.count_naive(g)
    if args.how in ("fast", "both"):
        results["fast"] = counting.count_fast(g)
    if args.how == "both" and results["naive"] != results["fast"]:
        raise CounterMismatch(f"naive {results['naive'].total} != fast {results['fast'].total}")
    tc = results.get("fast", results.get("naive"))
    kind = "permutation" if isinstance(g, Permutation) else "point set"
    print(f"{kind} mod {g.n}, {len(g)} points: psi = {tc.total}")
    print(f"per slope: {_per_slope_table(tc)}")
    if args.how == "both":
        print("naive and fast counters agree")
    inputs = {"source": args.source, "perm": args.perm, "counter": args.how}
    if isinstance(g, Permutation):
        inputs["permutation"] = list(g.image)
    else:
        inputs["points"] = [list(p) for p in g.points]
    _emit(args, formats.ResultRecord(
        "count", g.n, inputs,
        {"psi": tc.total, "per_slope": formats.jsonable(tc.per_slope)},
        elapsed=time.perf_counter() - start))
    return EXIT_OK


def cmd_profile(args) -> int:
    p = formats.parse_permutation(args.perm, args.modulus)
    sp = profile.slope_profile(p)
    if args.slope is not None:
        lps = [profile.line_profile(p, args.slope)]
    else:
        lps = profile.line_profiles(p)
    print(f"permutation {p} (mod {p.n})")
    print(f"{'k':>4} {'#S_k':>6} {'B_k':>6}")
    for k in range(1, p.n):
        print(f"{k:>4} {sp.size(k):>6} {sp.b(k):>6}")
    print(f"sum #S_k = {sum(sp.sizes)}, sum B_k = {sum(sp.excess)}")
    for lp in lps:
        spectrum = " ".join(f"m_{i}={mi}" for i, mi in enumerate(lp.m) if mi)
        print(f"slope {lp.slope}: V = {list(lp.v)}; {spectrum}; triples {lp.triples()}")
    _emit(args, formats.ResultRecord(
        "profile", p.n, {"permutation": list(p.image), "slope": args.slope},
        {"sizes": list(sp.sizes), "excess": list(sp.excess),
         "lines": [{"slope": lp.slope, "v": list(lp.v), "m": list(lp.m)} for lp in lps]}))
    return EXIT_OK


def cmd_trace(args) -> int:
    start = time.perf_counter()
    if args.perm is not None:
        p = formats.parse_permutation(args.perm, args.modulus)
        trace = profile.proof_trace(p, strict=False)
        print(profile.render_trace(trace))
        _emit(args, formats.ResultRecord("trace", p.n, {"permutation": list(p.image)},
                                         formats.jsonable(trace.to_dict()),
                                         elapsed=time.perf_counter() - start))
        return EXIT_OK if trace.passed else EXIT_VIOLATION

    if args.modulus is None:
        raise ParseError("--random needs --modulus")
    m = make_modulus(args.modulus)
    rng = np.random.Generator(np.random.PCG64(args.seed))
    failures = []
    min_psi = None
    for _ in range(args.random):
        p = Permutation.random(m, rng)
        trace = profile.proof_trace(p, strict=False)
        min_psi = trace.psi if min_psi is None else min(min_psi, trace.psi)
        if not trace.passed:
            failures.append({"permutation": list(p.image),
                             "steps": [s.label for s in trace.failures()]})
    print(f"{args.random} random permutations mod {m.n} (seed {args.seed}): "
          f"{len(failures)} failing traces; smallest psi {min_psi}, bound {search.lower_bound(m.n)}")
    for f in failures[:10]:
        print(f"  FAIL {','.join(map(str, f['permutation']))}: {'; '.join(f['steps'])}")
    _emit(args, formats.ResultRecord(
        "trace", m.n, {"random": args.random},
        {"traces": args.random, "failures": failures, "min_psi": min_psi},
        seed=args.seed, elapsed=time.perf_counter() - start))
    return EXIT_OK if not failures else EXIT_VIOLATION


def cmd_expected(args) -> int:
    if args.modulus is None:
        raise ParseError("expected needs --modulus")
    m = make_modulus(args.modulus)
    start = time.perf_counter()
    exact = profile.expected_exact(m)
    results = {"exact": str(exact)}
    if args.exact:
        print(f"{exact}")
    elif args.enumerate:
        value = profile.expected_enumerate(m, cap=args.cap)
        count = math.factorial(m.n)
        results.update(enumerated=str(value), permutations=count, matches_exact=value == exact)
        print(f"{value} ({count} permutations)")
        if value != exact:
            raise TheoremViolation(f"enumerated mean {value} differs from n(n-1)/6 = {exact}")
    else:
        est = profile.expected_sample(m, args.sample, args.seed)
        z = (est.mean - float(exact)) / est.stderr if est.stderr > 0 else 0.0
        results.update(sample=est.to_dict(), z_score=z)
        print(f"{est.mean:.4f} +/- {est.stderr:.4f} (standard error, {est.samples} samples, seed {est.seed}); "
              f"exact {exact} = {float(exact):.4f}")
    _emit(args, formats.ResultRecord("expected", m.n, {
        "mode": "exact" if args.exact else "enumerate" if args.enumerate else "sample",
        "samples": args.sample}, results, seed=args.seed, elapsed=time.perf_counter() - start))
    return EXIT_OK


def _store(args):
    return None if args.no_store else formats.BestKnownStore(args.store)


def cmd_search(args) -> int:
    if args.modulus is None:
        raise ParseError("search needs --modulus")
    cfg = search.SearchConfig(
        modulus=args.modulus, mode=args.mode, seed=args.seed, restarts=args.restarts,
        steps=args.steps, initial_temperature=args.t0, cooling=args.cooling,
        workers=_workers(args), witness_cap=args.witnesses, budget=args.budget)
    store = _store(args)
    if store is not None:
        store.load()  # fail on a corrupt store before spending time
    r = search.run_search(cfg)
    for w in r.witnesses:
        if search.recount(w) != r.min_psi:
            raise CounterMismatch(f"witness {w} recounts to {search.recount(w)}, not {r.min_psi}")
    report = search.verify_bounds(r)
    print(f"{r.mode} search mod {r.n}: min psi = {r.min_psi} over {r.evaluated} candidates "
          f"({r.elapsed:.2f}s)")
    if r.minimizers is not None:
        print(f"normalized minimizers: {r.minimizers}")
    for w in r.witnesses:
        print(f"  witness {w}")
    print(report)
    improved = False
    if store is not None and r.witnesses:
        improved = store.offer(r.n, "permutation-min", r.min_psi, list(r.witnesses[0].image))
        if improved:
            print(f"stored new best for n={r.n} in {store.path}")
    _emit(args, formats.ResultRecord(
        "search", r.n,
        {k: getattr(cfg, k) for k in ("mode", "restarts", "steps", "initial_temperature",
                                      "cooling", "workers", "witness_cap", "budget")},
        {"min_psi": r.min_psi, "witnesses": [list(w.image) for w in r.witnesses],
         "evaluated": r.evaluated, "minimizers": r.minimizers, "bounds": report.to_dict(),
         "stored": improved},
        seed=args.seed if r.mode == "anneal" else None, elapsed=r.elapsed))
    return EXIT_OK


def cmd_survey(args) -> int:
    if args.modulus is None:
        raise ParseError("survey needs --modulus")
    m = make_modulus(args.modulus)
    mode = "sample" if args.sample is not None else "full"
    store = _store(args)
    if store is not None:
        store.load()
    r = search.subset_survey(m, args.size, mode=mode, budget=args.budget, seed=args.seed,
                             samples=args.sample or 1, workers=_workers(args))
    recount = search.recount(r.witness)
    if recount != r.min_psi:
        raise CounterMismatch(f"witness recounts to {recount}, not {r.min_psi}")
    threshold = -(-(m.n + 1) // 4)
    print(f"{mode} survey mod {m.n}, {args.size}-point subsets: min psi = {r.min_psi} "
          f"over {r.evaluated} subsets ({r.elapsed:.2f}s)")
    print(f"witness: {' '.join(f'({p.x},{p.y})' for p in r.witness.points)}")
    if r.zero_count is not None:
        print(f"subsets with no collinear triple: {r.zero_count}")
    if args.size == m.n + 2:
        print(f"n+2 points: ceil((n+1)/4) = {threshold}; min psi {'>=' if r.min_psi >= threshold else '<'} bound")
    elif args.size >= m.n + 3:
        print(f"at least n+3 points: psi > 0 {'holds' if r.min_psi > 0 else 'FAILS'}")
    improved = False
    if store is not None:
        improved = store.offer(m.n, f"subset-min:{args.size}", r.min_psi,
                               [list(p) for p in r.witness.points])
    _emit(args, formats.ResultRecord(
        "survey", m.n, {"size": args.size, "mode": mode, "samples": args.sample, "budget": args.budget},
        {"min_psi": r.min_psi, "witness": [list(p) for p in r.witness.points],
         "zero_count": r.zero_count, "evaluated": r.evaluated, "stored": improved},
        seed=args.seed if mode == "sample" else None, elapsed=r.elapsed))
    if mode == "full" and args.size >= m.n + 3 and r.min_psi == 0:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_examples(args) -> int:
    if args.name is None:
        for name, (desc, pts) in formats.REGISTRY.items():
            print(f"{name}: {desc} ({len(pts)} points)")
        return EXIT_OK
    if args.name not in formats.REGISTRY:
        raise ParseError(f"unknown example {args.name!r}")
    sys.stdout.write(formats.registry_file(args.name))
    g = formats.registry_pointset(args.name)
    _emit(args, formats.ResultRecord("examples", g.n, {"name": args.name},
                                     {"points": [list(p) for p in g.points],
                                      "psi": counting.count_naive(g).total}))
    return EXIT_OK


COMMANDS = {
    "count": cmd_count,
    "profile": cmd_profile,
    "trace": cmd_trace,
    "expected": cmd_expected,
    "search": cmd_search,
    "survey": cmd_survey,
    "examples": cmd_examples,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParseError, SlopeOutOfRange, CapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET if isinstance(exc, CapExceeded) else EXIT_PARSE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ProofAssertionFailure, TheoremViolation, CounterMismatch) as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except CorruptStore as exc:
        print(f"corrupt best-known store: {exc}", file=sys.stderr)
        return EXIT_STORE


if __name__ == "__main__":
    sys.exit(main())
