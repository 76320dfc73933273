"""Compile quantified 3-CNF formulas into gadget puzzles.

Every literal occurrence is a 2-toggle-lock whose lock sits on a clause path.  A
variable is the series of its literal gadgets: the *up* path runs through
their first toggle tunnels and makes the variable true, the *down* path runs
through their second toggle tunnels and makes it false.  Each path is only
passable forward when the variable has the opposite value.

Layout of the puzzle:

* a chain of nodes, one per variable in prefix order; an existential
  variable hangs its up path off its node as a loop, so the robot can flip
  it while standing there; a universal variable links its node to the
  previous one through a *guard* lock that is open only while it is false;
* the clauses in series after the last chain node, each a fan of lock paths;
* a binary counter over the universals, innermost bit first.  Entering a bit
  that is false takes its up path back into the chain just past that
  variable's guard; entering a bit that is true takes its down path on to
  the next bit.  The goal lies past the outermost bit.

So the robot reaches the goal only after passing the formula once for every
assignment of the universals, and each time it can re-choose exactly the
existentials inside the innermost universal that is true.

``insert_crossovers`` then draws the system on a line with every connection
as an arc above it and replaces each arc crossing by a crossover.
"""
from __future__ import annotations

import itertools
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import networkx as nx
import numpy as np

from . import catalog
from .builder import HALLWAY, SystemBuilder
from .gadget import GadgetError
from .simulation import SimulationClaim, check_equivalence, shipped_claims
from .solver import Puzzle
from .system import Instance, SystemOfGadgets, check_planarity

MAX_ORACLE_VARIABLES = 20

# 2-toggle-locks: both toggle tunnels as (from, to) in the open state "0", then the lock
TOGGLE_LOCKS = {
    "RAP2TL": (("p0", "p1"), ("p2", "p3"), ("p4", "p5")),
    "RP2TL": (("p0", "p1"), ("p3", "p2"), ("p4", "p5")),
    "SAP2TL": (("l1", "r1"), ("r2", "l2"), ("l3", "r3")),
}


@dataclass(frozen=True)
class LiteralSite:
    """How the up path, down path and lock path cross one literal gadget."""
    type: str
    state: str
    up: tuple[str, str]
    down: tuple[str, str]
    lock: tuple[str, str]


def default_site(v: int, positive: bool, key) -> LiteralSite:
    """Per-role wiring that keeps the most small puzzles free of crossings."""
    if key == "guard":
        return literal_site(positive, "SAP2TL", swap_tunnels=True, swap_lock=True)
    if positive:
        return literal_site(positive, "SAP2TL", swap_tunnels=True)
    return literal_site(positive, "RAP2TL", swap_tunnels=True, swap_lock=True)


def literal_site(positive: bool, type: str = "RAP2TL", swap_tunnels: bool = False,
                 swap_lock: bool = False) -> LiteralSite:
    """Wiring of a literal gadget that is open exactly when its literal is true.

    All variables start false, so a positive literal starts closed.  The up
    path crosses one toggle tunnel the way it points while the variable is
    false; the down path crosses the other the way it points while true.
    """
    first, second, lock = TOGGLE_LOCKS[type]
    if swap_tunnels:
        first, second = second, first
    rev = lambda t: (t[1], t[0])
    if positive:
        up, down = rev(first), second
    else:
        up, down = first, rev(second)
    return LiteralSite(type, "1" if positive else "0", up, down,
                       rev(lock) if swap_lock else lock)



class QBFError(ValueError):
    """Malformed quantified formula."""


@dataclass
class QBFInstance:
    """Prenex 3-CNF formula; variables are 1-based, literals are signed ints."""
    prefix: list[tuple[str, int]]           # ("e" | "a", variable) outermost first
    clauses: list[tuple[int, ...]]

    def __post_init__(self):
        self.prefix = [(q, int(v)) for q, v in self.prefix]
        self.clauses = [tuple(int(l) for l in c) for c in self.clauses]
        seen = set()
        for q, v in self.prefix:
            if q not in ("e", "a"):
                raise QBFError(f"unknown quantifier {q!r}")
            if v <= 0 or v in seen:
                raise QBFError(f"variable {v} is invalid or quantified twice")
            seen.add(v)
        for k, c in enumerate(self.clauses):
            if not 1 <= len(c) <= 3:
                raise QBFError(f"clause {k} has {len(c)} literals; expected 1 to 3")
            for lit in c:
                if abs(lit) not in seen:
                    raise QBFError(f"clause {k}: literal {lit} uses an unquantified variable")

    @property
    def variables(self) -> list[int]:
        return [v for _, v in self.prefix]

    def quantifier(self, v: int) -> str:
        return dict((x, q) for q, x in self.prefix)[v]

    def __str__(self) -> str:
        quant = " ".join(("E" if q == "e" else "A") + f"x{v}" for q, v in self.prefix)
        body = " & ".join("(" + " | ".join(("~" if l < 0 else "") + f"x{abs(l)}" for l in c)
                          + ")" for c in self.clauses)
        return f"{quant}. {body}"

    # -- formats -----------------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "QBFInstance":
        """Read the QDIMACS-like text form.

        ``c`` lines are comments, the optional ``p cnf`` header is ignored,
        ``q e 1 a 2`` (or the standard ``e 1 0`` / ``a 2 0`` lines) give the
        prefix, and every other line is a clause of signed literals ending
        in ``0``.
        """
        prefix, clauses = [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith(("c", "p")):
                continue
            tokens = line.split()
            try:
                if tokens[0] == "q":
                    q = None
                    for tok in tokens[1:]:
                        if tok in ("e", "a"):
                            q = tok
                        elif q is None:
                            raise QBFError(f"line {lineno}: variable before quantifier")
                        else:
                            prefix.append((q, int(tok)))
                elif tokens[0] in ("e", "a"):
                    prefix.extend((tokens[0], int(t)) for t in tokens[1:] if t != "0")
                else:
                    lits = [int(t) for t in tokens]
                    if lits[-1] != 0:
                        raise QBFError(f"line {lineno}: clause must end with 0")
                    clauses.append(tuple(lits[:-1]))
            except ValueError as exc:
                if isinstance(exc, QBFError):
                    raise
                raise QBFError(f"line {lineno}: expected integers") from None
        return cls(prefix, clauses)

    def dumps(self) -> str:
        lines = ["q " + " ".join(f"{q} {v}" for q, v in self.prefix)]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"prefix": [[q, v] for q, v in self.prefix],
                "clauses": [list(c) for c in self.clauses]}

    @classmethod
    def from_dict(cls, data: dict) -> "QBFInstance":
        try:
            return cls([tuple(p) for p in data["prefix"]], data["clauses"])
        except (KeyError, TypeError) as exc:
            raise QBFError(f"qbf: missing or malformed field ({exc})") from None

    @classmethod
    def load(cls, path) -> "QBFInstance":
        text = Path(path).read_text()
        if text.lstrip().startswith("{"):
            try:
                return cls.from_dict(json.loads(text))
            except json.JSONDecodeError as exc:
                raise QBFError(f"{path}: invalid JSON ({exc})") from None
        return cls.parse(text)


def qbf_oracle(q: QBFInstance) -> bool:
    """Truth of ``q`` by evaluating the quantifier game tree."""
    if len(q.prefix) > MAX_ORACLE_VARIABLES:
        raise QBFError(f"oracle handles at most {MAX_ORACLE_VARIABLES} variables")
    order = q.variables

    def holds(value):
        return all(any(value[abs(l)] == (l > 0) for l in c) for c in q.clauses)

    def game(k, value):
        if k == len(order):
            return holds(value)
        branches = (game(k + 1, {**value, order[k]: b}) for b in (False, True))
        return any(branches) if q.prefix[k][0] == "e" else all(branches)

    return game(0, {})


def random_qbf(n_vars: int, n_clauses: int, rng: random.Random, width: int = 3) -> QBFInstance:
    prefix = [(rng.choice("ea"), v) for v in range(1, n_vars + 1)]
    clauses = []
    for _ in range(n_clauses):
        vs = rng.sample(range(1, n_vars + 1), min(width, n_vars))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return QBFInstance(prefix, clauses)


def small_qbfs(max_vars: int = 2, max_clauses: int = 2):
    """Every formula with up to ``max_vars`` variables and ``max_clauses`` clauses.

    Clauses are nonempty sets of literals over distinct variables, taken as
    multisets; every quantifier pattern is included.
    """
    for n in range(1, max_vars + 1):
        lits = [l for v in range(1, n + 1) for l in (v, -v)]
        possible = [c for r in range(1, min(3, n) + 1)
                    for c in itertools.combinations(lits, r)
                    if len({abs(l) for l in c}) == r]
        for quants in itertools.product("ea", repeat=n):
            prefix = list(zip(quants, range(1, n + 1)))
            for m in range(1, max_clauses + 1):
                for cs in itertools.combinations_with_replacement(possible, m):
                    yield QBFInstance(prefix, list(cs))


# -- compilation ---------------------------------------------------------------

@dataclass
class ReductionOutput:
    puzzle: Puzzle
    qbf: QBFInstance
    # (variable, clause index) -> literal gadget id; (variable, "guard") for guards
    literal_index: dict[tuple[int, object], str] = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"puzzle": self.puzzle.to_dict(), "qbf": self.qbf.to_dict(),
                "literal_index": [[v, k, g] for (v, k), g in self.literal_index.items()],
                "stats": self.stats}


class _Wiring:
    """Gadgets plus named nodes; a node becomes a junction when frozen."""

    def __init__(self):
        self.b = SystemBuilder()
        self.nodes: dict[str, list] = {}
        self.alias: dict[str, str] = {}

    def _name(self, node: str) -> str:
        while node in self.alias:
            node = self.alias[node]
        return node

    def at(self, node: str, endpoint) -> None:
        self.nodes.setdefault(self._name(node), []).append(endpoint)

    def path(self, start: str, gadgets, hops, end: str) -> None:
        """Run from node ``start`` through each gadget's ``hops`` pair to ``end``."""
        prev = start
        for g, (enter, leave) in zip(gadgets, hops):
            if isinstance(prev, str):
                self.at(prev, (g, enter))
            else:
                self.b.connect(prev, (g, enter))
            prev = (g, leave)
        if not isinstance(prev, str):
            self.at(end, prev)
            return
        # an empty path merges the two nodes
        a, z = self._name(prev), self._name(end)
        if a != z:
            self.nodes.setdefault(z, []).extend(self.nodes.pop(a, []))
            self.alias[a] = z

    def freeze(self) -> SystemOfGadgets:
        for members in self.nodes.values():
            if len(members) >= 2:
                self.b.junction(*members)
        return self.b.build(planar=False)

    def embed(self) -> SystemOfGadgets | None:
        """Crossing-free realization, or ``None`` if the wiring is not planar.

        Each gadget becomes a wheel of its locations, which pins their cyclic
        order up to reflection, and each node a single vertex whose order is
        free.  The embedding then fixes every gadget's orientation and the
        order in which each node's hallways take their endpoints.
        """
        b = self.b
        graph = nx.Graph()
        for inst in b.instances:
            locs = inst.gadget.locations
            for k, loc in enumerate(locs):
                graph.add_edge(("hub", inst.id), (inst.id, loc))
                graph.add_edge((inst.id, loc), (inst.id, locs[(k + 1) % len(locs)]))
        for a, c in b.connections:
            graph.add_edge(a, c)
        members = {name: ms for name, ms in self.nodes.items() if len(ms) >= 2}
        for name, ms in members.items():
            for m in ms:
                if not isinstance(m, str):
                    graph.add_edge(("node", name), m)
        ok, emb = nx.check_planarity(graph)
        if not ok:
            return None
        for inst in b.instances:
            b.rotation[inst.id] = [loc for _, loc in emb.neighbors_cw_order(("hub", inst.id))]
        for name, ms in members.items():
            ring = [m for m in emb.neighbors_cw_order(("node", name))] if \
                ("node", name) in emb else []
            # externals have no edge; they can sit anywhere around the node
            ring += [m for m in ms if isinstance(m, str)]
            b.junction(*ring)
        return b.build(planar=True)


SITE_OPTIONS = [(t, st, sl) for t in sorted(TOGGLE_LOCKS)
                for st in (False, True) for sl in (False, True)]


def reduce_3qsat(q: QBFInstance, planar: bool = True, choose=None,
                 tries: int = 64, seed: int = 0) -> ReductionOutput:
    """Puzzle over 2-toggle-locks, branching hallways and crossovers, solvable iff ``q`` holds.

    ``choose(variable, positive, key)`` picks the ``LiteralSite`` of each
    literal gadget; ``key`` is ``"guard"`` or the clause position.  With
    ``planar`` the wiring is embedded without crossings when possible and
    otherwise laid out by ``insert_crossovers``.  Without ``choose``, up to
    ``tries`` other site assignments are tried before falling back to
    crossovers.
    """
    w, index = _wire(q, choose or default_site)
    system = w.embed() if planar else None
    if system is None and planar and choose is None:
        keys = list(index)
        rng = random.Random(seed)
        if len(SITE_OPTIONS) ** len(keys) <= tries:
            combos = itertools.product(SITE_OPTIONS, repeat=len(keys))
        else:
            combos = ([rng.choice(SITE_OPTIONS) for _ in keys] for _ in range(tries))
        for combo in combos:
            pick = dict(zip(keys, combo))
            w2, index2 = _wire(q, lambda v, pos, key: literal_site(pos, *pick[(v, key)]))
            system = w2.embed()
            if system is not None:
                w, index = w2, index2
                break
    return _finish(q, w, index, planar, system)


def _wire(q: QBFInstance, choose) -> tuple["_Wiring", dict]:
    w = _Wiring()
    b = w.b
    index: dict[tuple[int, object], str] = {}
    gadgets: dict[int, list[tuple[str, LiteralSite]]] = {v: [] for v in q.variables}
    sites: dict[str, LiteralSite] = {}

    def literal(v: int, positive: bool, key) -> str:
        site = choose(v, positive, key)
        g = b.add(site.type, site.state, id=f"x{v}_{key}")
        index[(v, key)] = g
        gadgets[v].append((g, site))
        sites[g] = site
        return g

    universals = [v for qn, v in q.prefix if qn == "a"]
    guards = {v: literal(v, False, "guard") for v in universals}
    clause_locks = []
    for k, clause in enumerate(q.clauses):
        clause_locks.append([literal(abs(l), l > 0, f"c{k}{'abcdef'[j]}")
                             for j, l in enumerate(clause)])

    def up(v):
        return [g for g, _ in gadgets[v]], [site.up for _, site in gadgets[v]]

    def down(v):
        return [g for g, _ in gadgets[v]], [site.down for _, site in gadgets[v]]

    w.at("chain0", "start")
    for k, (qn, v) in enumerate(q.prefix):
        here, prev = f"chain{k + 1}", f"chain{k}"
        if qn == "a":
            w.path(prev, [guards[v]], [sites[guards[v]].lock], here)
        else:
            w.path(prev, [], [], here)
            if gadgets[v]:
                w.path(here, *up(v), here)
    node = f"chain{len(q.prefix)}"
    for k, locks in enumerate(q.clauses):
        nxt = f"clause{k + 1}"
        for g in clause_locks[k]:
            w.path(node, [g], [sites[g].lock], nxt)
        node = nxt
    position = {v: k + 1 for k, v in enumerate(q.variables)}
    for v in reversed(universals):
        w.path(node, *up(v), f"chain{position[v]}")
        nxt = f"bit{v}"
        w.path(node, *down(v), nxt)
        node = nxt
    w.at(node, "goal")
    return w, index


def _finish(q: QBFInstance, w: "_Wiring", index: dict, planar: bool,
            system: SystemOfGadgets | None = None) -> ReductionOutput:
    if system is None:
        system = w.freeze()
    before = Counter(inst.type for inst in system.instances)
    if planar and system.rotation is None:
        system = insert_crossovers(system)
    puzzle = Puzzle(system, "start", "goal")
    counts = Counter(inst.type for inst in system.instances)
    size = len(q.prefix) + sum(len(c) for c in q.clauses)
    stats = {"gadgets": dict(sorted(counts.items())),
             "before_crossovers": sum(before.values()),
             "crossovers": counts.get("crossover", 0),
             "formula_size": size,
             "linear_constant": round(sum(before.values()) / size, 3)}
    return ReductionOutput(puzzle, q, index, stats)


# -- planarization -------------------------------------------------------------

def _crossings(p: np.ndarray, q: np.ndarray) -> int:
    """Number of interleaving pairs among arcs ``p[k] < q[k]``."""
    a = (p[:, None] < p[None, :]) & (p[None, :] < q[:, None]) & (q[:, None] < q[None, :])
    return int(a.sum())


def _layout(system: SystemOfGadgets, search: int, seed: int):
    """Instance order and per-instance boundary order with few arc crossings.

    Starts from the given instance order with every gadget clockwise, then
    tries ``search`` random moves (swap or move instances, rotate or
    reflect one), keeping any move that does not add crossings.
    """
    n = len(system.instances)
    order = list(range(n))
    rot = [list(range(inst.gadget.num_locations)) for inst in system.instances]
    ends = np.array(system.connections, dtype=np.int64).reshape(-1, 4)

    def cost():
        base, pos = 0, {}
        for i in order:
            for k, loc in enumerate(rot[i]):
                pos[(i, loc)] = base + k
            base += len(rot[i])
        a = np.array([pos[(int(x), int(y))] for x, y in ends[:, :2]])
        b = np.array([pos[(int(x), int(y))] for x, y in ends[:, 2:]])
        return _crossings(np.minimum(a, b), np.maximum(a, b))

    if not len(ends):
        return order, rot
    rng = random.Random(seed)
    best = cost()
    for _ in range(search):
        if best == 0:
            break
        kind = rng.randrange(4)
        i = rng.randrange(n)
        saved = (list(order), [list(r) for r in rot])
        if kind == 0:
            j = rng.randrange(n)
            order[i], order[j] = order[j], order[i]
        elif kind == 1:
            order.insert(rng.randrange(n), order.pop(i))
        elif kind == 2:
            r = rot[i]
            rot[i] = r[1:] + r[:1]
        else:
            rot[i].reverse()
        c = cost()
        if c <= best:
            best = c
        else:
            order, rot = saved
    return order, rot


def insert_crossovers(system: SystemOfGadgets, search: int = 300, seed: int = 0
                      ) -> SystemOfGadgets:
    """Planar copy of ``system`` with crossovers at every arc crossing.

    Instances sit side by side on a line with their locations along it in a
    clockwise (or reflected) order chosen by ``_layout``; each connection is a
    semicircle above the line.  Two semicircles cross exactly when their ends
    interleave, once, and the crossing order along an arc is the order of
    the crossing points' x coordinates.
    """
    order, rot = _layout(system, search, seed)
    pos = {}
    for i in order:
        for loc in rot[i]:
            k = len(pos)
            # a small generic offset keeps three arcs from meeting in one point
            pos[(i, loc)] = k + Fraction((k * k * k) % 1009, 10007)
    arcs = []
    for a, b in system.connections:
        arcs.append((a, b) if pos[a] < pos[b] else (b, a))
    span = [(pos[a], pos[b]) for a, b in arcs]
    on_arc: dict[int, list[tuple[Fraction, int, str, str]]] = {k: [] for k in range(len(arcs))}
    xo = catalog.get("crossover")
    instances = list(system.instances)
    for s, t in itertools.combinations(range(len(arcs)), 2):
        (p1, q1), (p2, q2) = span[s], span[t]
        if p1 > p2:
            s, t, (p1, q1), (p2, q2) = t, s, (p2, q2), (p1, q1)
        if not p1 < p2 < q1 < q2:
            continue
        x = (p2 * q2 - p1 * q1) / ((p2 + q2) - (p1 + q1))
        c = len(instances)
        instances.append(Instance(f"cross{c - len(system.instances)}", xo, 0))
        # the arc starting further left crosses into the other one's disk, which
        # puts the four ends at the crossing in clockwise order n, e, s, w as
        # left end of s, right end of t, right end of s, left end of t
        on_arc[s].append((x, c, "n", "s"))
        on_arc[t].append((x, c, "w", "e"))
    connections = []
    for k, (a, b) in enumerate(arcs):
        prev = a
        for x, c, enter, leave in sorted(on_arc[k]):
            connections.append((prev, (c, xo.location_index(enter))))
            prev = (c, xo.location_index(leave))
        connections.append((prev, b))
    xs = [x for hits in on_arc.values() for x, *_ in hits]
    if len(xs) != 2 * (len(instances) - len(system.instances)):
        raise AssertionError("crossing bookkeeping mismatch")
    for hits in on_arc.values():
        if len({x for x, *_ in hits}) != len(hits):
            raise AssertionError("three arcs meet in one point; perturb the layout")
    rotation = {i: tuple(range(inst.gadget.num_locations)) for i, inst in enumerate(instances)}
    rotation.update({i: tuple(r) for i, r in enumerate(rot)})
    return SystemOfGadgets(instances, connections, dict(system.externals), rotation, None)


# -- substitution --------------------------------------------------------------

def simulation_plan(base: str, claims: list[SimulationClaim] | None = None,
                    keep=(HALLWAY,)) -> dict[str, SimulationClaim]:
    """For each gadget type reachable from ``base``, the claim that builds it.

    A claim is usable once every gadget type in its construction is ``base``,
    a kept type, or already planned; the first usable claim in name order
    wins, so plans are deterministic.
    """
    claims = shipped_claims() if claims is None else claims
    have = {base, *keep}
    plan: dict[str, SimulationClaim] = {}
    changed = True
    while changed:
        changed = False
        for claim in sorted(claims, key=lambda c: c.name):
            name = claim.target.name
            if name in have:
                continue
            if all(inst.type in have for inst in claim.construction.instances):
                plan[name] = claim
                have.add(name)
                changed = True
    return plan


def _is_clockwise(order, n: int) -> bool:
    k = list(order).index(0)
    return list(order[k:]) + list(order[:k]) == list(range(n))


def _class_codes(claim: SimulationClaim) -> dict[str, tuple[int, ...]]:
    """A resting configuration of the construction for every target state it reaches."""
    verdict = check_equivalence(claim)
    if not verdict:
        raise GadgetError(f"claim {claim.name} does not hold")
    ind = verdict.induced
    out = {}
    for ci, code in enumerate(ind.configs):
        state = verdict.correspondence.get(ind.class_of[ci])
        if state is not None and state not in out:
            out[state] = claim.construction.decode(code)
    return out


def _mirrored_outer(claim: SimulationClaim) -> bool:
    """Whether the construction is drawn with the target's boundary reflected."""
    system = claim.construction
    if system.rotation is None:
        return False
    outer = claim.ordered_externals()
    if check_planarity(system, outer=outer, allow_reflected_outer=False):
        return False
    return check_planarity(system, outer=outer)


def substitute_gadgets(out: ReductionOutput | SystemOfGadgets, base: str = "AP2T",
                       claims: list[SimulationClaim] | None = None,
                       rounds: int | None = None) -> Puzzle | SystemOfGadgets:
    """Rewrite every gadget into ``base`` gadgets by splicing in simulating systems.

    Branching hallways are kept.  Substitution repeats until only ``base``
    and hallways remain, following the chain of claims from
    ``simulation_plan``, or until ``rounds`` passes have been made.
    """
    system = out.puzzle.system if isinstance(out, ReductionOutput) else out
    plan = simulation_plan(base, claims)
    missing = {inst.type for inst in system.instances} - set(plan) - {base, HALLWAY}
    if missing:
        raise GadgetError(f"no simulation chain from {base} to {sorted(missing)}")
    cache: dict[str, tuple] = {}
    done = 0
    while any(inst.type in plan for inst in system.instances):
        if rounds is not None and done >= rounds:
            break
        system = _substitute_once(system, plan, cache)
        done += 1
    if isinstance(out, ReductionOutput):
        return Puzzle(system, out.puzzle.start, out.puzzle.goal)
    return system


def _substitute_once(system: SystemOfGadgets, plan, cache) -> SystemOfGadgets:
    instances: list[Instance] = []
    rotation: dict[int, tuple[int, ...]] = {} if system.rotation is not None else None
    # endpoint of the old system -> endpoint in the new one
    where: dict[tuple[int, int], tuple[int, int]] = {}
    inner = []
    for i, inst in enumerate(system.instances):
        claim = plan.get(inst.type)
        if claim is None:
            where.update({(i, l): (len(instances), l) for l in range(inst.gadget.num_locations)})
            if rotation is not None:
                rotation[len(instances)] = system.rotation[i]
            instances.append(inst)
            continue
        if claim.name not in cache:
            cache[claim.name] = (_class_codes(claim), _mirrored_outer(claim))
        codes, mirrored = cache[claim.name]
        state = inst.gadget.states[inst.state]
        if state not in codes:
            raise GadgetError(f"{claim.name} never reaches state {state!r} of {inst.type}")
        sub = claim.construction
        offset = len(instances)
        flip = False
        if rotation is not None:
            flip = _is_clockwise(system.rotation[i], inst.gadget.num_locations) == mirrored
        for j, (child, s) in enumerate(zip(sub.instances, codes[state])):
            instances.append(Instance(f"{inst.id}.{child.id}", child.gadget, s))
            if rotation is not None:
                order = sub.rotation[j]
                rotation[offset + j] = tuple(reversed(order)) if flip else order
        inner += [((offset + a[0], a[1]), (offset + b[0], b[1])) for a, b in sub.connections]
        for label, loc in claim.location_map.items():
            ep = sub.externals[label]
            if ep is None:
                raise GadgetError(f"{claim.name}: external {label!r} is not on a gadget")
            where[(i, inst.gadget.location_index(loc))] = (offset + ep[0], ep[1])
    connections = [(where[a], where[b]) for a, b in system.connections] + inner
    externals = {k: (None if v is None else where[v]) for k, v in system.externals.items()}
    return SystemOfGadgets(instances, connections, externals, rotation, system.outer)
