"""Reachability for the robot: exhaustive search plus polynomial fast paths.

``solve_bfs`` searches the full configuration graph.  The other solvers
work on a *mixed graph* over sites: connections are undirected edges, gadget
traversals that never depend on state become static edges, and each lone
toggle becomes a directed edge in its initial orientation.  ``dispatch``
picks the cheapest solver whose preconditions hold.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .gadget import (GadgetError, TunnelKind, is_deterministic, is_reversible, read_json,
                     tunnel_decomposition)
from .system import CapExceeded, SystemDefinitionError, SystemOfGadgets, default_cap, validate

Move = tuple


@dataclass
class Puzzle:
    system: SystemOfGadgets
    start: str
    goal: str

    def __post_init__(self):
        for role, label in (("start", self.start), ("goal", self.goal)):
            if label not in self.system.externals:
                raise SystemDefinitionError(f"{role} {label!r} is not a declared external")

    def to_dict(self) -> dict:
        data = self.system.to_dict()
        data["start"] = self.start
        data["goal"] = self.goal
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Puzzle":
        try:
            start, goal = data["start"], data["goal"]
        except KeyError as exc:
            raise SystemDefinitionError(f"puzzle: missing field {exc.args[0]!r}") from None
        return cls(SystemOfGadgets.from_dict(data), start, goal)

    @classmethod
    def load(cls, path) -> "Puzzle":
        return read_json(path, cls.from_dict)


@dataclass
class Solution:
    solvable: bool
    witness: list[Move] | None = None
    algorithm: str = "bfs"
    explored: int = 0

    def __bool__(self):
        return self.solvable


def replay_witness(p: Puzzle, witness: Iterable[Move]) -> tuple[int, int]:
    """Run ``witness`` from the initial configuration; return the final ``(code, site)``.

    Raises ``ValueError`` at the first illegal step.
    """
    system = p.system
    code, site = system.initial_code(), system.site_of_external(p.start)
    for move in witness:
        code, site = system.apply(code, site, move)
    return code, site


def reaches_goal(p: Puzzle, witness: Iterable[Move]) -> bool:
    try:
        _, site = replay_witness(p, witness)
    except ValueError:
        return False
    return site == p.system.site_of_external(p.goal)


def solve_bfs(p: Puzzle, cap: int | None = None) -> Solution:
    """Breadth-first search over configurations; the witness is a shortest one."""
    cap = default_cap() if cap is None else cap
    system = p.system
    goal = system.site_of_external(p.goal)
    root = (system.initial_code(), system.site_of_external(p.start))
    if root[1] == goal:
        return Solution(True, [], "bfs", 1)
    parent: dict[tuple[int, int], tuple] = {root: None}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for move, c2, s2 in system.successors(*u):
            v = (c2, s2)
            if v in parent:
                continue
            if len(parent) >= cap:
                raise CapExceeded(f"more than {cap} configurations")
            parent[v] = (u, move)
            if s2 == goal:
                return Solution(True, _unwind(parent, v), "bfs", len(parent))
            queue.append(v)
    return Solution(False, None, "bfs", len(parent))


def _unwind(parent, v) -> list[Move]:
    path = []
    while parent[v] is not None:
        v, move = parent[v]
        path.append(move)
    path.reverse()
    return path


# -- mixed graph -------------------------------------------------------------

@dataclass
class MixedGraph:
    """Directed arcs between sites; undirected edges appear as two arcs."""
    arcs: dict[int, list[tuple[int, Move]]] = field(default_factory=dict)

    def add(self, u: int, v: int, move: Move) -> None:
        self.arcs.setdefault(u, []).append((v, move))

    def path(self, start: int, goal: int) -> list[Move] | None:
        parent = {start: None}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            if u == goal:
                out = []
                while parent[u] is not None:
                    u, move = parent[u]
                    out.append(move)
                return out[::-1]
            for v, move in self.arcs.get(u, ()):
                if v not in parent:
                    parent[v] = (u, move)
                    queue.append(v)
        return None


# how a gadget instance enters the mixed graph
STATIC, TRIPWIRES, ONE_TOGGLE = "static", "tripwires", "one-toggle"


def instance_role(g, state: int) -> str | None:
    """Mixed-graph treatment of a gadget, or ``None`` if it needs full search.

    One-state gadgets and gadgets without state-changing traversals are
    static.  Two-state deterministic reversible tunnel gadgets whose
    nontrivial tunnels are all tripwires become undirected edges, and those
    with a single toggle and otherwise trivial tunnels become one directed
    edge plus static edges.
    """
    if g.num_states == 1 or all(s == t for (s, _), (t, _) in g.transitions):
        return STATIC
    if g.num_states != 2 or not (is_deterministic(g) and is_reversible(g)):
        return None
    td = tunnel_decomposition(g)
    if td is None or td.kinds is None:
        return None
    nontrivial = [k for k in td.kinds if not k.trivial]
    if all(k is TunnelKind.TRIPWIRE for k in nontrivial):
        return TRIPWIRES
    if nontrivial == [TunnelKind.TOGGLE]:
        return ONE_TOGGLE
    return None


def _mixed_graph(system: SystemOfGadgets) -> MixedGraph:
    mg = MixedGraph()
    for a, b in system.connections:
        sa, sb = system.site(*a), system.site(*b)
        mg.add(sa, sb, ("hop", sa, sb))
        mg.add(sb, sa, ("hop", sb, sa))
    for i, inst in enumerate(system.instances):
        g = inst.gadget
        for (s, a), (t, b) in sorted(g.transitions):
            # read off the initial state; tripwires and trivial tunnels look
            # the same in the other state, and a lone toggle is never needed twice
            if s != inst.state:
                continue
            mg.add(system.site(i, a), system.site(i, b), ("move", i, a, b, None))
    return mg


def _solve_mixed(p: Puzzle, roles: list[str], algorithm: str) -> Solution:
    system = p.system
    start, goal = system.site_of_external(p.start), system.site_of_external(p.goal)
    path = _mixed_graph(system).path(start, goal)
    if path is None:
        return Solution(False, None, algorithm)
    return Solution(True, _concrete(system, start, path), algorithm)


def _concrete(system: SystemOfGadgets, start: int, path: list[Move]) -> list[Move]:
    """Fill in the actual state changes along a mixed-graph path."""
    code, site = system.initial_code(), start
    out = []
    for step in path:
        if step[0] == "hop":
            move = step
        else:
            _, i, a, b, _ = step
            move = next((mv for mv, _, _ in system.successors(code, site)
                         if mv[0] == "move" and mv[3] == b), None)
            if move is None:
                raise AssertionError(f"mixed-graph step {step} not legal during replay")
        code, site = system.apply(code, site, move)
        out.append(move)
    return out


def _require(p: Puzzle, ok, what: str) -> list[str]:
    roles = []
    for inst in p.system.instances:
        role = ok(inst)
        if role is None:
            raise GadgetError(f"{inst.id} ({inst.type}) is not {what}")
        roles.append(role)
    return roles


def solve_one_state(p: Puzzle) -> Solution:
    """Reachability when every gadget has a single state."""
    roles = _require(p, lambda inst: STATIC if inst.gadget.num_states == 1 else None,
                     "a one-state gadget")
    return _solve_mixed(p, roles, "one-state")


def solve_one_toggle(p: Puzzle) -> Solution:
    """Reachability with 1-toggles, hallways and one-state gadgets.

    Each 1-toggle counts as a directed edge in its initial orientation: a
    shortest path never needs to cross the same toggle twice.
    """
    def role(inst):
        g = inst.gadget
        if g.num_states == 1:
            return STATIC
        if g.num_locations == 2 and instance_role(g, inst.state) == ONE_TOGGLE:
            return ONE_TOGGLE
        return None

    return _solve_mixed(p, _require(p, role, "a 1-toggle or one-state gadget"), "one-toggle")


def dispatch(p: Puzzle, cap: int | None = None) -> Solution:
    """Solve with a polynomial method when every gadget qualifies, else by BFS."""
    if validate(p.system):
        raise SystemDefinitionError("; ".join(validate(p.system)))
    roles = [instance_role(inst.gadget, inst.state) for inst in p.system.instances]
    if any(r is None for r in roles):
        return solve_bfs(p, cap)
    if all(r == STATIC for r in roles):
        return _solve_mixed(p, roles, "one-state")
    if ONE_TOGGLE in roles:
        return _solve_mixed(p, roles, "one-toggle")
    return _solve_mixed(p, roles, "tripwire")


def random_puzzle(rng, max_instances: int = 6, names=None) -> Puzzle:
    """Random puzzle over catalog gadgets with a random matching of locations."""
    from . import catalog
    from .system import Instance

    names = names or [n for n in catalog.catalog_names() if not n.startswith("spinner")]
    k = rng.randint(1, max_instances)
    instances = []
    for i in range(k):
        g = catalog.get(rng.choice(names))
        instances.append(Instance(f"g{i}", g, rng.randrange(g.num_states)))
    ends = [(i, l) for i, inst in enumerate(instances) for l in range(inst.gadget.num_locations)]
    rng.shuffle(ends)
    start, goal = ends[0], ends[1]
    rest = ends[2:]
    n_conn = rng.randint(0, len(rest) // 2)
    connections = [(rest[2 * j], rest[2 * j + 1]) for j in range(n_conn)]
    system = SystemOfGadgets(instances, connections, {"start": start, "goal": goal})
    return Puzzle(system, "start", "goal")
