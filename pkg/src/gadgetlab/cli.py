"""Command-line entry point.

Exit codes: 0 for success or a true verdict, 1 for a false verdict
(unsolvable, not equivalent), 2 for errors.  ``--json`` prints one JSON
object carrying ``"format": 1``.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

from . import catalog
from .gadget import Gadget, GadgetError, classify_complexity, hard_pair, tunnel_decomposition
from .reduction import (QBFError, QBFInstance, qbf_oracle, random_qbf, reduce_3qsat,
                        small_qbfs, substitute_gadgets)
from .simulation import SimulationClaim, verify_catalog, verify_claim
from .solver import Puzzle, dispatch, random_puzzle, solve_bfs
from .system import CapExceeded, SystemOfGadgets, default_cap

FORMAT = 1


class Report:
    def __init__(self, args, command: str):
        self.json = getattr(args, "json", False)
        self.data = {"format": FORMAT, "command": command}
        self.lines: list[str] = []

    def say(self, line: str) -> None:
        self.lines.append(line)

    def emit(self, code: int) -> int:
        self.data["exit"] = code
        if self.json:
            print(json.dumps(self.data, indent=1, sort_keys=True))
        else:
            for line in self.lines:
                print(line)
        return code


def _gadget_from(arg: str) -> Gadget:
    path = Path(arg)
    if path.exists():
        return Gadget.load(path)
    return catalog.get(arg)


def _move_text(system: SystemOfGadgets, move) -> str:
    if move[0] == "hop":
        return f"hop {system.describe_site(move[1])} -> {system.describe_site(move[2])}"
    _, i, a, b, t = move
    inst = system.instances[i]
    g = inst.gadget
    return f"{inst.id}: {g.locations[a]} -> {g.locations[b]} (state {g.states[t]})"


# -- commands -------------------------------------------------------------------

def cmd_solve(args) -> int:
    rep = Report(args, "solve")
    p = Puzzle.load(args.puzzle)
    t0 = time.perf_counter()
    sol = solve_bfs(p, args.cap) if args.algorithm == "bfs" else dispatch(p, args.cap)
    rep.data.update(solvable=sol.solvable, algorithm=sol.algorithm, explored=sol.explored,
                    seconds=round(time.perf_counter() - t0, 4))
    rep.say(f"{'solvable' if sol else 'unsolvable'} ({sol.algorithm}, "
            f"{sol.explored} configurations explored)")
    if sol and args.witness:
        rep.data["witness"] = [list(m) for m in sol.witness]
        rep.say(f"witness: {len(sol.witness)} moves")
        rep.lines += ["  " + _move_text(p.system, m) for m in sol.witness]
    return rep.emit(0 if sol else 1)


def cmd_verify(args) -> int:
    rep = Report(args, "verify")
    if args.catalog:
        reports = verify_catalog(cap=args.cap)
    elif args.claims:
        reports = sorted((verify_claim(SimulationClaim.load(c), args.cap) for c in args.claims),
                         key=lambda r: r.name)
    else:
        raise GadgetError("verify: give claim files or --catalog")
    rep.data["claims"] = [r.to_dict() for r in reports]
    for r in reports:
        status = "ok" if r.ok else "FAIL"
        extra = "" if r.planar else " nonplanar"
        extra += "".join(f" [{m}]" for m in r.mismatches)
        rep.say(f"{status:4} {r.name:22} configs={r.configs:<4} classes={r.classes:<3} "
                f"explored={r.explored:<6} {r.seconds * 1000:7.1f} ms{extra}")
    ok = all(r.ok for r in reports)
    rep.data["all_ok"] = ok
    rep.say(f"{sum(r.ok for r in reports)}/{len(reports)} claims accepted")
    return rep.emit(0 if ok else 1)


def cmd_reduce(args) -> int:
    rep = Report(args, "reduce")
    q = QBFInstance.load(args.qbf)
    out = reduce_3qsat(q, planar=not args.no_planar)
    puzzle = out.puzzle
    if args.basis != "2tl-crossover":
        puzzle = substitute_gadgets(out, args.basis)
    text = json.dumps(puzzle.to_dict(), indent=1) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        rep.say(f"wrote {args.output}")
    elif not args.json:
        sys.stdout.write(text)
    counts = {}
    for inst in puzzle.system.instances:
        counts[inst.type] = counts.get(inst.type, 0) + 1
    rep.data.update(formula=str(q), basis=args.basis, stats=out.stats,
                    gadgets=dict(sorted(counts.items())))
    if args.json and not args.output:
        rep.data["puzzle"] = puzzle.to_dict()
    if args.stats:
        rep.say(f"formula: {q}")
        for name, n in sorted(counts.items()):
            rep.say(f"  {name:18} {n}")
        rep.say(f"gadgets before crossovers: {out.stats['before_crossovers']} "
                f"({out.stats['linear_constant']} per variable or literal)")
    return rep.emit(0)


def cmd_classify(args) -> int:
    rep = Report(args, "classify")
    g = _gadget_from(args.gadget)
    verdict = classify_complexity(g)
    td = tunnel_decomposition(g)
    kinds = list(td.kinds or ()) if td else []
    pair = hard_pair(kinds) if kinds else None
    why = f"{pair[0].value.lower()}+{pair[1].value.lower()}" if pair else \
        ("one state" if g.num_states == 1 else
         "no hard pair among " + (", ".join(k.value.lower() for k in kinds) or "no tunnels"))
    rep.data.update(gadget=g.name, verdict=verdict.value,
                    tunnels=[[g.locations[x], g.locations[y]] for x, y in (td.tunnels if td else ())],
                    kinds=[k.value for k in kinds], reason=why)
    rep.say(f"{g.name}: {verdict.value} ({why})")
    return rep.emit(0)


def cmd_catalog(args) -> int:
    rep = Report(args, "catalog")
    if args.emit:
        g = catalog.get(args.emit)
        text = json.dumps(g.to_dict(), indent=1) + "\n"
        if args.output:
            Path(args.output).write_text(text)
            rep.say(f"wrote {args.output}")
        elif not args.json:
            sys.stdout.write(text)
        rep.data["gadget"] = g.to_dict()
        return rep.emit(0)
    entries = []
    for name in catalog.catalog_names():
        g = catalog.get(name)
        try:
            verdict = classify_complexity(g).value
        except GadgetError:
            verdict = "n/a"
        entries.append({"name": name, "locations": g.num_locations,
                        "states": g.num_states, "verdict": verdict})
        rep.say(f"{name:18} {g.num_locations} locations  {g.num_states} states  {verdict}")
    rep.data["gadgets"] = entries
    return rep.emit(0)


def _bench_catalog(args, rep):
    reports = verify_catalog(cap=args.cap)
    total = sum(r.seconds for r in reports)
    rep.data["claims"] = len(reports)
    rep.data["failures"] = [r.name for r in reports if not r.ok]
    rep.data["seconds"] = round(total, 4)
    rep.say(f"{len(reports)} claims verified in {total:.3f} s, "
            f"largest exploration {max(r.explored for r in reports)} configurations")
    return not rep.data["failures"]


def _bench_reduction(args, rep):
    rng = random.Random(args.seed)
    suite = list(small_qbfs(2, 2)) + [random_qbf(3, 3, rng) for _ in range(args.count)]
    t0 = time.perf_counter()
    bad = []
    for q in suite:
        if solve_bfs(reduce_3qsat(q).puzzle, args.cap).solvable != qbf_oracle(q):
            bad.append(str(q))
    secs = time.perf_counter() - t0
    rep.data.update(instances=len(suite), mismatches=bad, seconds=round(secs, 3))
    rep.say(f"{len(suite)} formulas reduced and solved in {secs:.2f} s, "
            f"{len(bad)} disagreements with the oracle")
    return not bad


def _bench_solver(args, rep):
    rng = random.Random(args.seed)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(args.count):
        p = random_puzzle(rng)
        if dispatch(p, args.cap).solvable != solve_bfs(p, args.cap).solvable:
            bad += 1
    secs = time.perf_counter() - t0
    rep.data.update(instances=args.count, mismatches=bad, seconds=round(secs, 3))
    rep.say(f"{args.count} random puzzles: dispatch and search disagree on {bad} "
            f"({secs:.2f} s)")
    return not bad


BENCHES = {"catalog": _bench_catalog, "reduction": _bench_reduction, "solver": _bench_solver}


def cmd_bench(args) -> int:
    rep = Report(args, "bench")
    rep.data["suite"] = args.suite
    ok = BENCHES[args.suite](args, rep)
    return rep.emit(0 if ok else 1)


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gadgetlab",
                                     description="Motion planning through gadgets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--json", action="store_true", help="print a JSON report")
        p.add_argument("--cap", type=int, default=None,
                       help=f"configuration cap (default {default_cap()}, env GADGET_CAP)")
        p.set_defaults(func=func)
        return p

    p = add("solve", cmd_solve, "decide whether the goal is reachable")
    p.add_argument("puzzle")
    p.add_argument("--algorithm", choices=("auto", "bfs"), default="auto")
    p.add_argument("--witness", action="store_true", help="print the move sequence")

    p = add("verify", cmd_verify, "check simulation claims")
    p.add_argument("claims", nargs="*")
    p.add_argument("--catalog", action="store_true", help="check every shipped claim")

    p = add("reduce", cmd_reduce, "compile a quantified 3-CNF formula into a puzzle")
    p.add_argument("qbf")
    p.add_argument("--basis", default="2tl-crossover",
                   help="2tl-crossover (default) or a gadget to rewrite everything into, "
                        "such as AP2T or NTL")
    p.add_argument("-o", "--output")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--no-planar", action="store_true", help="skip crossover insertion")

    p = add("classify", cmd_classify, "PSPACE-complete or polynomial")
    p.add_argument("gadget", help="gadget JSON file or catalog name")

    p = add("catalog", cmd_catalog, "list or export catalog gadgets")
    p.add_argument("--list", action="store_true")
    p.add_argument("--emit", metavar="NAME")
    p.add_argument("-o", "--output")

    p = add("bench", cmd_bench, "timed sweeps")
    p.add_argument("suite", choices=sorted(BENCHES))
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (GadgetError, QBFError, CapExceeded, OSError) as exc:
        if getattr(args, "json", False):
            print(json.dumps({"format": FORMAT, "command": args.command, "exit": 2,
                              "error": str(exc)}, indent=1))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
