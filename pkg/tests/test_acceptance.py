"""Acceptance criteria, one test each.

Every test records a PASS or FAIL line; ``conftest.py`` prints them at the end
of the run, and running this file directly prints them as it goes.
"""
import copy
import itertools
import random
import time

from gadgetlab import catalog
from gadgetlab.catalog import TWO_TUNNEL, tunnel_gadget
from gadgetlab.gadget import ComplexityClass, TunnelKind, classify_complexity
from gadgetlab.reduction import (qbf_oracle, random_qbf, reduce_3qsat, small_qbfs,
                                 substitute_gadgets)
from gadgetlab.simulation import (claim_is_planar, composed_is_deterministic_reversible,
                                  induce, shipped_claims, verify_claim)
from gadgetlab.solver import dispatch, random_puzzle, reaches_goal, solve_bfs
from gadgetlab.system import Instance, SystemOfGadgets, validate

RESULTS: dict[int, str] = {}


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    if __name__ == "__main__":
        print(line, flush=True)
    assert ok, line


def test_1_construction_catalog():
    claims = shipped_claims()
    reports = {c.name: verify_claim(c) for c in claims}
    failed = sorted(name for name, r in reports.items() if not r.ok)
    too_big = sorted(name for name, r in reports.items() if r.explored > 10**5)
    too_slow = sorted(name for name, r in reports.items() if r.seconds >= 5)
    ntl = induce(next(c for c in claims if c.name == "2t-to-ntl").construction)
    spots = {
        "crossover classes": reports["swlw-to-crossover"].classes == 1,
        "SWLW configurations": reports["nwl-to-swlw"].configs == 4,
        "NTL two per state": ntl.class_sizes() == [2, 2],
    }
    ok = len(claims) >= 17 and not (failed or too_big or too_slow) and all(spots.values())
    worst = max(reports.values(), key=lambda r: r.explored)
    report(1, ok, f"{len(claims)} claims accepted, largest {worst.explored} configurations "
                  f"({worst.name}), slowest {max(r.seconds for r in reports.values()):.3f} s; "
                  f"spot checks {sum(spots.values())}/{len(spots)}"
                  + (f"; failed {failed}" if failed else ""))


def test_2_reduction_end_to_end():
    rng = random.Random(2024)
    suite = list(small_qbfs(2, 2)) + [random_qbf(3, 3, rng) for _ in range(50)]
    t0 = time.perf_counter()
    bad = [str(q) for q in suite
           if solve_bfs(reduce_3qsat(q).puzzle).solvable != qbf_oracle(q)]
    secs = time.perf_counter() - t0
    report(2, not bad and secs < 600,
           f"{len(suite)} formulas, {len(bad)} mismatches with the oracle, {secs:.1f} s")


def test_3_substitution_preserves_verdicts():
    picked = []
    for q in small_qbfs(2, 2):
        out = reduce_3qsat(q)
        if out.stats["crossovers"] == 0 and any(x == "a" for x, _ in q.prefix):
            picked.append(out)
    picked = picked[::max(1, len(picked) // 6)][:6]
    bad = []
    truths = []
    for out in picked:
        before = solve_bfs(out.puzzle).solvable
        after = substitute_gadgets(out, "AP2T")
        types = {inst.type for inst in after.system.instances}
        if solve_bfs(after).solvable != before or types - {"AP2T", "branching-hallway"}:
            bad.append(str(out.qbf))
        truths.append(before)
    ok = len(picked) >= 5 and not bad and any(truths) and not all(truths)
    report(3, ok, f"{len(picked)} formulas rewritten to AP2T and hallways "
                  f"({sum(truths)} true, {len(truths) - sum(truths)} false), {len(bad)} changed")


KIND_NAME = {TunnelKind.TOGGLE: "toggle", TunnelKind.TRIPWIRE: "wire", TunnelKind.LOCK: "lock",
        TunnelKind.TRIVIAL_OPEN: "open", TunnelKind.TRIVIAL_CLOSED: "closed"}
HARD_KIND_PAIRS = {("Toggle", "Toggle"), ("Toggle", "Tripwire"), ("Toggle", "Lock"),
                   ("Tripwire", "Lock")}


def _synth(kinds):
    locs = [f"x{i}" for i in range(2 * len(kinds))]
    return tunnel_gadget("synth", locs, [(KIND_NAME[k], locs[2 * i], locs[2 * i + 1])
                                         for i, k in enumerate(kinds)])


def _table(kinds) -> bool:
    names = [k.value for k in kinds if not k.trivial]
    return any((a, b) in HARD_KIND_PAIRS or (b, a) in HARD_KIND_PAIRS
               for a, b in itertools.combinations(names, 2))


def test_4_dichotomy_classifier():
    T = TunnelKind
    cases = [(catalog.get(n), True) for n in TWO_TUNNEL]
    cases += [(_synth([T.LOCK, T.LOCK]), False), (_synth([T.TRIPWIRE, T.TRIPWIRE]), False),
              (catalog.get("1-toggle"), False)]
    synthesized = 0
    for k in (2, 3):
        for core in itertools.combinations_with_replacement(
                [T.TOGGLE, T.TRIPWIRE, T.LOCK], k):
            for extra in (T.TRIVIAL_OPEN, T.TRIVIAL_CLOSED):
                kinds = list(core) + [extra]
                cases.append((_synth(kinds), _table(kinds)))
                synthesized += 1
    wrong = [g.name for g, hard in cases
             if (classify_complexity(g) is ComplexityClass.PSPACE_COMPLETE) != hard]
    report(4, not wrong and synthesized >= 20,
           f"{len(cases)} gadgets ({synthesized} synthesized with trivial tunnels), "
           f"{len(wrong)} disagree with the truth table")


def test_5_solver_oracle_agreement():
    rng = random.Random(5)
    disagree = bad_witness = 0
    solvable = 0
    for _ in range(200):
        p = random_puzzle(rng, 6)
        fast, slow = dispatch(p), solve_bfs(p)
        disagree += fast.solvable != slow.solvable
        for sol in (fast, slow):
            if sol:
                bad_witness += not reaches_goal(p, sol.witness)
        solvable += slow.solvable
    report(5, not disagree and not bad_witness,
           f"200 random puzzles ({solvable} solvable), {disagree} verdict disagreements, "
           f"{bad_witness} bad witnesses")


def test_6_closure_properties():
    rng = random.Random(6)
    names = [n for n in catalog.catalog_names() if n != "branching-hallway"]
    violations = 0
    for _ in range(200):
        insts = []
        for i in range(2):
            g = catalog.get(rng.choice(names))
            insts.append(Instance(f"g{i}", g, rng.randrange(g.num_states)))
        ends = [(i, l) for i, inst in enumerate(insts)
                for l in range(inst.gadget.num_locations)]
        rng.shuffle(ends)
        k = rng.randint(1, min(3, (len(ends) - 1) // 2))
        system = SystemOfGadgets(insts, [(ends[2 * j], ends[2 * j + 1]) for j in range(k)],
                                 {f"x{j}": ep for j, ep in enumerate(ends[2 * k:])})
        violations += not composed_is_deterministic_reversible(system)
    report(6, violations == 0, f"200 random two-gadget compositions, {violations} violations")


def test_7_planarity():
    claims = shipped_claims()
    nonplanar = [c.name for c in claims if not claim_is_planar(c)]
    crossed = copy.copy(next(c for c in claims if c.name == "ap2t-to-c2t"))
    data = crossed.construction.to_dict()
    data["rotation"]["top"] = data["rotation"]["top"][::-1]
    crossed.construction = SystemOfGadgets.from_dict(data)
    crossed_rejected = validate(crossed.construction) == [] and not claim_is_planar(crossed)
    report(7, not nonplanar and crossed_rejected,
           f"{len(claims) - len(nonplanar)}/{len(claims)} constructions planar; "
           f"crossed variant {'rejected' if crossed_rejected else 'ACCEPTED'}")


if __name__ == "__main__":
    for name, func in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                func()
            except AssertionError:
                pass
