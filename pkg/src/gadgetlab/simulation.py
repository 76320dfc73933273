"""Externally observable behavior of constructions and equivalence checking.

A construction is a system whose external labels play the role of a target
gadget's locations.  ``induce`` explores every walk that enters at one
external and leaves at another, starting from each reachable outside
configuration, and quotients the result by bisimulation.  A walk that comes
back to its entry external in a bisimilar configuration is treated as the
robot staying put.
"""
from __future__ import annotations

import json
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable

from . import catalog
from .gadget import Gadget, GadgetError, read_json, is_deterministic, is_reversible
from .system import CapExceeded, SystemOfGadgets, check_planarity, default_cap, validate

CONSTRUCTIONS_DIR = Path(__file__).parent / "constructions"


@dataclass
class InducedGadget:
    externals: tuple[str, ...]
    configs: list[int]                      # reachable outside state codes
    raw_edges: list[tuple[int, int, int, int]]   # (config, entry, config', exit)
    class_of: list[int]                     # config index -> class
    num_classes: int
    internal_configurations: int            # configurations visited by all walks

    @property
    def transitions(self) -> frozenset:
        out = set()
        for c, a, d, b in self.raw_edges:
            u = (self.class_of[c], a)
            v = (self.class_of[d], b)
            if u != v:
                out.add((u, v))
        return frozenset(out)

    def to_gadget(self, name: str = "induced") -> Gadget:
        return Gadget(name, self.externals, tuple(str(k) for k in range(self.num_classes)),
                      self.transitions)

    def class_sizes(self) -> list[int]:
        sizes = [0] * self.num_classes
        for k in self.class_of:
            sizes[k] += 1
        return sizes


def _exits(system: SystemOfGadgets, code: int, site: int, ext_sites: dict[int, int],
           budget: list[int]):
    """Outside configurations reachable by one entry/exit walk from ``site``."""
    start = (code, site)
    seen = {start}
    queue = deque([start])
    found = set()
    while queue:
        c, s = queue.popleft()
        for _, c2, s2 in system.successors(c, s):
            key = (c2, s2)
            if key in seen:
                continue
            seen.add(key)
            if s2 in ext_sites:
                found.add((c2, ext_sites[s2]))
                continue
            budget[0] -= 1
            if budget[0] < 0:
                raise CapExceeded("induce: internal configuration cap exceeded")
            queue.append(key)
    return found, len(seen)


def induce(construction: SystemOfGadgets, externals: Iterable[str] | None = None,
           cap: int | None = None) -> InducedGadget:
    """Behavior of ``construction`` as seen from its external locations."""
    externals = tuple(sorted(construction.externals) if externals is None else externals)
    if not externals:
        raise ValueError("induce needs at least one external location")
    budget = [default_cap() if cap is None else cap]
    ext_sites = {construction.site_of_external(lab): k for k, lab in enumerate(externals)}
    sites = [construction.site_of_external(lab) for lab in externals]
    code0 = construction.initial_code()
    index = {code0: 0}
    configs = [code0]
    raw = []
    visited = 0
    queue = deque([code0])
    while queue:
        code = queue.popleft()
        ci = index[code]
        for a, site in enumerate(sites):
            found, n = _exits(construction, code, site, ext_sites, budget)
            visited += n
            for c2, b in sorted(found):
                if c2 == code and b == a:
                    continue
                if c2 not in index:
                    index[c2] = len(configs)
                    configs.append(c2)
                    queue.append(c2)
                raw.append((ci, a, index[c2], b))
    class_of = _bisimulation(len(configs), [(c, (a, b), d) for c, a, d, b in raw])
    return InducedGadget(externals, configs, raw, class_of, max(class_of) + 1, visited)


def _bisimulation(n: int, edges: list[tuple[int, Hashable, int]],
                  initial: list[Hashable] | None = None) -> list[int]:
    """Coarsest stable partition of a labeled transition system.

    Edges labelled ``(a, a)`` into the source's own block count as silent.
    Block numbers follow first appearance by node index.
    """
    out: list[list[tuple[Hashable, int]]] = [[] for _ in range(n)]
    for u, lab, v in edges:
        out[u].append((lab, v))
    block = [0] * n if initial is None else _renumber(list(initial))
    while True:
        sigs = []
        for u in range(n):
            sig = set()
            for lab, v in out[u]:
                if lab[0] == lab[1] and block[v] == block[u]:
                    continue
                sig.add((lab, block[v]))
            sigs.append((block[u], frozenset(sig)))
        new = _renumber(sigs)
        if max(new, default=-1) == max(block, default=-1):
            return new
        block = new


def _renumber(keys: list) -> list[int]:
    ids: dict = {}
    return [ids.setdefault(k, len(ids)) for k in keys]


# -- claims ------------------------------------------------------------------

@dataclass
class SimulationClaim:
    name: str
    construction: SystemOfGadgets
    location_map: dict[str, str]            # external label -> target location
    target: Gadget
    initial_state: str
    description: str = ""                   # one-line summary of the construction
    expect: dict = field(default_factory=dict)

    def ordered_externals(self) -> tuple[str, ...]:
        inverse = {v: k for k, v in self.location_map.items()}
        return tuple(inverse[loc] for loc in self.target.locations)

    def problems(self) -> list[str]:
        issues = validate(self.construction)
        if sorted(self.location_map) != sorted(self.construction.externals):
            issues.append("location_map keys must be exactly the construction's externals")
        if sorted(self.location_map.values()) != sorted(self.target.locations):
            issues.append("location_map must be a bijection onto the target's locations")
        if self.initial_state not in self.target.states:
            issues.append(f"target has no state {self.initial_state!r}")
        return issues

    def to_dict(self) -> dict:
        try:
            target = self.target.name if catalog.get(self.target.name) == self.target \
                else self.target.to_dict()
        except GadgetError:
            target = self.target.to_dict()
        data = {"name": self.name, "description": self.description,
                "construction": self.construction.to_dict(),
                "target": target, "location_map": dict(self.location_map),
                "initial_state": self.initial_state}
        if self.expect:
            data["expect"] = self.expect
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationClaim":
        try:
            raw_target = data["target"]
            target = catalog.get(raw_target) if isinstance(raw_target, str) \
                else Gadget.from_dict(raw_target)
            construction = SystemOfGadgets.from_dict(data["construction"])
            location_map = dict(data["location_map"])
        except KeyError as exc:
            raise GadgetError(f"claim: missing field {exc.args[0]!r}") from None
        initial = str(data.get("initial_state", target.states[0]))
        return cls(data.get("name", "claim"), construction, location_map, target, initial,
                   data.get("description", ""), data.get("expect", {}))

    @classmethod
    def load(cls, path) -> "SimulationClaim":
        claim = read_json(path, cls.from_dict)
        if claim.name == "claim":
            claim.name = Path(path).stem
        return claim

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")


@dataclass
class Verdict:
    equivalent: bool
    induced: InducedGadget
    correspondence: dict[int, str] = field(default_factory=dict)  # class -> target state
    counterexample: dict | None = None

    def __bool__(self):
        return self.equivalent


def _reachable_target(target: Gadget, initial: int) -> list[int]:
    seen = {initial}
    queue = deque([initial])
    while queue:
        s = queue.popleft()
        for loc in range(target.num_locations):
            for t, _ in target.moves(s, loc):
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
    return sorted(seen)


def check_equivalence(claim: SimulationClaim, cap: int | None = None) -> Verdict:
    """Decide whether the construction behaves exactly like the target gadget.

    Both sides become one labeled transition system (labels are pairs of
    target locations); the claim holds iff the construction's initial outside
    configuration is bisimilar to the target's claimed initial state.
    """
    issues = claim.problems()
    if issues:
        raise GadgetError("; ".join(issues))
    target = claim.target
    ind = induce(claim.construction, claim.ordered_externals(), cap=cap)
    t0 = target.state_index(claim.initial_state)
    tstates = _reachable_target(target, t0)
    n_ind = len(ind.configs)
    tnode = {s: n_ind + k for k, s in enumerate(tstates)}
    edges = [(c, (a, b), d) for c, a, d, b in ind.raw_edges]
    for s in tstates:
        for a in range(target.num_locations):
            for t, b in target.moves(s, a):
                edges.append((tnode[s], (a, b), tnode[t]))
    n = n_ind + len(tstates)
    block = _bisimulation(n, edges)
    corr = {}
    for ci, k in enumerate(ind.class_of):
        for s in tstates:
            if block[tnode[s]] == block[ci]:
                corr[k] = target.states[s]
    ok = block[0] == block[tnode[t0]]
    verdict = Verdict(ok, ind, corr if ok else {})
    if not ok:
        verdict.counterexample = _distinguish(ind, target, tstates, tnode, edges, block, t0)
    return verdict


def _distinguish(ind, target, tstates, tnode, edges, block, t0) -> dict:
    """Walk from the initial pair to a concrete behavioral mismatch."""
    out: dict[int, list] = {}
    for u, lab, v in edges:
        if lab[0] == lab[1] and block[u] == block[v]:
            continue
        out.setdefault(u, []).append((lab, v))
    locs = target.locations
    u, v = 0, tnode[t0]
    path = []
    for _ in range(len(block) + 1):
        labs_u = {lab for lab, _ in out.get(u, [])}
        labs_v = {lab for lab, _ in out.get(v, [])}
        for lab in sorted(labs_u ^ labs_v):
            inv = {n: s for s, n in tnode.items()}
            side = "construction" if lab in labs_u else "target"
            return {"path": path, "target_state": target.states[inv[v]],
                    "construction_class": ind.class_of[u],
                    "entry": locs[lab[0]], "exit": locs[lab[1]],
                    "only_in": side}
        # same labels: descend into a successor pair that is still distinguishable
        moved = False
        for lab in sorted(labs_u):
            su = [w for l, w in out[u] if l == lab]
            sv = [w for l, w in out[v] if l == lab]
            for x in su:
                if not any(block[x] == block[y] for y in sv):
                    y = sv[0]
                    path.append((locs[lab[0]], locs[lab[1]]))
                    u, v = x, y
                    moved = True
                    break
            if moved:
                break
            for y in sv:
                if not any(block[x] == block[y] for x in su):
                    path.append((locs[lab[0]], locs[lab[1]]))
                    u, v = su[0], y
                    moved = True
                    break
            if moved:
                break
        if not moved:
            break
    return {"path": path, "detail": "states differ only in successor classes"}


def composed_is_deterministic_reversible(construction: SystemOfGadgets,
                                         externals=None, cap: int | None = None) -> bool:
    """Whether the behavior induced by a hallway-free construction is deterministic and reversible."""
    for inst in construction.instances:
        if inst.type == "branching-hallway":
            raise GadgetError("construction contains a branching hallway")
    g = induce(construction, externals, cap=cap).to_gadget()
    return is_deterministic(g) and is_reversible(g)


def wrap(g: Gadget, state: str | None = None) -> SystemOfGadgets:
    """A single instance of ``g`` with every location made external."""
    from .system import Instance
    inst = Instance("g", g, g.state_index(state) if state else 0)
    return SystemOfGadgets([inst], [], {loc: (0, k) for k, loc in enumerate(g.locations)},
                           rotation={0: tuple(range(g.num_locations))},
                           outer=tuple(g.locations))


def identity_claim(g: Gadget, state: str | None = None) -> SimulationClaim:
    return SimulationClaim(f"identity-{g.name}", wrap(g, state),
                           {loc: loc for loc in g.locations}, g, state or g.states[0])


def claim_is_planar(claim: SimulationClaim) -> bool:
    """Genus-zero check with the externals in the target's clockwise order."""
    return check_planarity(claim.construction, outer=claim.ordered_externals())


@dataclass
class ClaimReport:
    name: str
    equivalent: bool
    planar: bool
    configs: int                # reachable outside configurations
    classes: int
    explored: int               # configurations visited by all walks
    seconds: float
    mismatches: list[str] = field(default_factory=list)   # failed ``expect`` entries

    @property
    def ok(self) -> bool:
        return self.equivalent and self.planar and not self.mismatches

    def to_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "equivalent": self.equivalent,
                "planar": self.planar, "configs": self.configs, "classes": self.classes,
                "explored": self.explored, "seconds": round(self.seconds, 4),
                "mismatches": self.mismatches}


def shipped_claims(directory=CONSTRUCTIONS_DIR) -> list[SimulationClaim]:
    return [SimulationClaim.load(p) for p in sorted(Path(directory).glob("*.json"))]


def verify_claim(claim: SimulationClaim, cap: int | None = None) -> ClaimReport:
    t0 = time.perf_counter()
    verdict = check_equivalence(claim, cap=cap)
    planar = claim.construction.rotation is None or claim_is_planar(claim)
    ind = verdict.induced
    report = ClaimReport(claim.name, verdict.equivalent, planar, len(ind.configs),
                         ind.num_classes, ind.internal_configurations,
                         time.perf_counter() - t0)
    observed = {"configs": report.configs, "classes": report.classes}
    for key, want in sorted(claim.expect.items()):
        if observed.get(key) != want:
            report.mismatches.append(f"{key}: expected {want}, got {observed.get(key)}")
    return report


def verify_catalog(directory=CONSTRUCTIONS_DIR, cap: int | None = None) -> list[ClaimReport]:
    """Check every shipped construction; reports come back sorted by name."""
    return sorted((verify_claim(c, cap) for c in shipped_claims(directory)),
                  key=lambda r: r.name)
