"""Systems of gadgets, their configuration graphs, and planarity checks.

The robot always sits on a *site*: a location of some gadget instance, or a
free-standing external label that is attached to no gadget.  It moves either
by hopping along a connection or by traversing the gadget whose location it
occupies.  Gadget state vectors are packed into a single mixed-radix integer
so configurations stay cheap to hash for large systems.
"""
from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

from . import catalog
from .gadget import Gadget, GadgetError, read_json

DEFAULT_CAP = 10**7


def default_cap() -> int:
    value = os.environ.get("GADGET_CAP")
    return int(value) if value else DEFAULT_CAP


class SystemDefinitionError(GadgetError):
    """Malformed system description."""


class CapExceeded(RuntimeError):
    """The configuration space grew past the configured vertex cap."""


@dataclass(frozen=True)
class Instance:
    id: str
    gadget: Gadget
    state: int

    @property
    def type(self) -> str:
        return self.gadget.name


Endpoint = tuple[int, int]          # (instance index, location index)


@dataclass
class SystemOfGadgets:
    instances: list[Instance] = field(default_factory=list)
    connections: list[tuple[Endpoint, Endpoint]] = field(default_factory=list)
    externals: dict[str, Endpoint | None] = field(default_factory=dict)
    # instance index -> clockwise location order; None means no rotation data
    rotation: dict[int, tuple[int, ...]] | None = None
    # clockwise order of external labels around the outer boundary
    outer: tuple[str, ...] | None = None

    def __post_init__(self):
        self._index()

    def _index(self):
        self._base = []
        n = 0
        for inst in self.instances:
            self._base.append(n)
            n += inst.gadget.num_locations
        self._nloc = n
        self._free = {}
        for label, ep in sorted(self.externals.items()):
            if ep is None:
                self._free[label] = n
                n += 1
        self.num_sites = n
        self._by_id = {inst.id: i for i, inst in enumerate(self.instances)}
        self.radix = [inst.gadget.num_states for inst in self.instances]
        mult, m = [], 1
        for r in self.radix:
            mult.append(m)
            m *= r
        self.mult = mult
        self.state_space_size = m

    # -- lookup helpers ----------------------------------------------------

    def instance_index(self, ident: str) -> int:
        try:
            return self._by_id[ident]
        except KeyError:
            raise SystemDefinitionError(f"unknown gadget instance {ident!r}") from None

    def site(self, instance: int, location: int) -> int:
        return self._base[instance] + location

    def site_of_external(self, label: str) -> int:
        if label not in self.externals:
            raise SystemDefinitionError(f"unknown external {label!r}")
        ep = self.externals[label]
        return self._free[label] if ep is None else self.site(*ep)

    def endpoint_of_site(self, site: int) -> Endpoint | None:
        if site >= self._nloc:
            return None
        lo, hi = 0, len(self._base) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self._base[mid] <= site:
                lo = mid
            else:
                hi = mid - 1
        return (lo, site - self._base[lo])

    def describe_site(self, site: int) -> str:
        ep = self.endpoint_of_site(site)
        if ep is None:
            for label, s in self._free.items():
                if s == site:
                    return label
            return f"#{site}"
        i, loc = ep
        inst = self.instances[i]
        return f"{inst.id}.{inst.gadget.locations[loc]}"

    def initial_code(self) -> int:
        return self.encode([inst.state for inst in self.instances])

    def encode(self, states) -> int:
        return sum(s * m for s, m in zip(states, self.mult))

    def decode(self, code: int) -> tuple[int, ...]:
        return tuple((code // m) % r for m, r in zip(self.mult, self.radix))

    def state_of(self, code: int, instance: int) -> int:
        return (code // self.mult[instance]) % self.radix[instance]

    def site_labels(self) -> dict[int, str]:
        labels = {}
        for label in self.externals:
            labels[self.site_of_external(label)] = label
        return labels

    # -- move semantics ----------------------------------------------------

    def _tables(self):
        if getattr(self, "_tab", None) is None:
            partner = [-1] * self.num_sites
            for a, b in self.connections:
                sa, sb = self.site(*a), self.site(*b)
                partner[sa] = sb
                partner[sb] = sa
            owner = [(-1, -1)] * self.num_sites
            for i, inst in enumerate(self.instances):
                for loc in range(inst.gadget.num_locations):
                    owner[self._base[i] + loc] = (i, loc)
            self._tab = (partner, owner)
        return self._tab

    def successors(self, code: int, site: int) -> Iterator[tuple[tuple, int, int]]:
        """Yield ``(move, code', site')`` for every single move."""
        partner, owner = self._tables()
        p = partner[site]
        if p >= 0:
            yield ("hop", site, p), code, p
        i, loc = owner[site]
        if i >= 0:
            g = self.instances[i].gadget
            m = self.mult[i]
            s = (code // m) % self.radix[i]
            for t, b in g.moves(s, loc):
                yield ("move", i, loc, b, t), code + (t - s) * m, self._base[i] + b

    def apply(self, code: int, site: int, move) -> tuple[int, int]:
        """Apply one move, raising ``ValueError`` if it is illegal."""
        for mv, c2, s2 in self.successors(code, site):
            if mv == tuple(move):
                return c2, s2
        raise ValueError(f"illegal move {move!r} at {self.describe_site(site)}")

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        def ep(e):
            i, loc = e
            inst = self.instances[i]
            return [inst.id, inst.gadget.locations[loc]]

        data = {
            "gadgets": [{"id": inst.id, "type": inst.type,
                         "state": inst.gadget.states[inst.state]}
                        for inst in self.instances],
            "connections": [[ep(a), ep(b)] for a, b in self.connections],
            "externals": {k: (None if v is None else ep(v))
                          for k, v in sorted(self.externals.items())},
        }
        inline = {}
        for inst in self.instances:
            try:
                known = catalog.get(inst.type) == inst.gadget
            except GadgetError:
                known = False
            if not known:
                inline[inst.type] = inst.gadget.to_dict()
        if inline:
            data["types"] = inline
        if self.rotation is not None:
            data["rotation"] = {
                self.instances[i].id: [self.instances[i].gadget.locations[l] for l in order]
                for i, order in sorted(self.rotation.items())}
        if self.outer is not None:
            data["outer"] = list(self.outer)
        return data

    @classmethod
    def from_dict(cls, data: dict, types: dict[str, Gadget] | None = None) -> "SystemOfGadgets":
        types = dict(types or {})
        for name, gdata in (data.get("types") or {}).items():
            types[name] = Gadget.from_dict(gdata)

        def resolve(name):
            if name in types:
                return types[name]
            return catalog.get(name)

        instances = []
        for k, entry in enumerate(data.get("gadgets", [])):
            try:
                ident, tname = entry["id"], entry["type"]
            except (KeyError, TypeError):
                raise SystemDefinitionError(f"gadgets[{k}]: needs 'id' and 'type'") from None
            g = resolve(tname)
            state = entry.get("state", g.states[0])
            try:
                si = g.state_index(str(state))
            except GadgetError:
                raise SystemDefinitionError(f"gadgets[{k}] ({ident}): invalid state {state!r}") from None
            instances.append(Instance(ident, g, si))
        ids = [inst.id for inst in instances]
        if len(set(ids)) != len(ids):
            raise SystemDefinitionError("duplicate gadget instance id")
        by_id = {inst.id: i for i, inst in enumerate(instances)}

        def endpoint(raw, where):
            try:
                ident, loc = raw
                i = by_id[ident]
            except (ValueError, TypeError):
                raise SystemDefinitionError(f"{where}: expected [id, location]") from None
            except KeyError:
                raise SystemDefinitionError(f"{where}: unknown gadget instance {raw[0]!r}") from None
            try:
                return (i, instances[i].gadget.location_index(loc))
            except GadgetError:
                raise SystemDefinitionError(f"{where}: {ident} has no location {loc!r}") from None

        connections = []
        for k, pair in enumerate(data.get("connections", [])):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise SystemDefinitionError(f"connections[{k}]: expected a pair of endpoints")
            connections.append((endpoint(pair[0], f"connections[{k}]"),
                                endpoint(pair[1], f"connections[{k}]")))
        externals = {}
        for label, raw in (data.get("externals") or {}).items():
            externals[label] = None if raw is None else endpoint(raw, f"externals[{label!r}]")

        rotation = None
        if "rotation" in data and data["rotation"] is not None:
            rotation = {}
            raw_rot = data["rotation"]
            for i, inst in enumerate(instances):
                spec = raw_rot.get(inst.id, "cw")
                n = inst.gadget.num_locations
                if spec == "cw":
                    order = tuple(range(n))
                elif spec == "ccw":
                    order = tuple(reversed(range(n)))
                else:
                    try:
                        order = tuple(inst.gadget.location_index(l) for l in spec)
                    except GadgetError:
                        raise SystemDefinitionError(f"rotation[{inst.id!r}]: unknown location") from None
                rotation[i] = order
            unknown = set(raw_rot) - set(by_id)
            if unknown:
                raise SystemDefinitionError(f"rotation: unknown instance {sorted(unknown)[0]!r}")
        outer = tuple(data["outer"]) if data.get("outer") is not None else None
        return cls(instances, connections, externals, rotation, outer)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def load(cls, path) -> "SystemOfGadgets":
        return read_json(path, cls.from_dict)


@dataclass(frozen=True)
class Configuration:
    states: tuple[int, ...]
    position: int

    def describe(self, system: SystemOfGadgets) -> str:
        return f"{list(self.states)} @ {system.describe_site(self.position)}"


def validate(system: SystemOfGadgets) -> list[str]:
    """List every violated structural invariant (empty when the system is valid)."""
    problems = []
    seen: dict[Endpoint, int] = {}

    def name(ep):
        i, loc = ep
        inst = system.instances[i]
        return f"{inst.id}.{inst.gadget.locations[loc]}"

    for k, (a, b) in enumerate(system.connections):
        if a == b:
            problems.append(f"connection {k} joins {name(a)} to itself")
        for ep in (a, b):
            if ep in seen:
                problems.append(f"matching violated: {name(ep)} used by connections "
                                f"{seen[ep]} and {k}")
            else:
                seen[ep] = k
    for label, ep in sorted(system.externals.items()):
        if ep is not None and ep in seen:
            problems.append(f"external/connection overlap: external {label!r} at "
                            f"{name(ep)} is also connected")
    owners: dict[Endpoint, str] = {}
    for label, ep in sorted(system.externals.items()):
        if ep is None:
            continue
        if ep in owners:
            problems.append(f"external {label!r} shares {name(ep)} with {owners[ep]!r}")
        owners[ep] = label
    for inst in system.instances:
        if not 0 <= inst.state < inst.gadget.num_states:
            problems.append(f"invalid initial state for {inst.id}")
    if system.rotation is not None:
        for i, order in system.rotation.items():
            inst = system.instances[i]
            if not _is_planar_order(inst.gadget, order):
                problems.append(f"rotation of {inst.id} is not a clockwise order of "
                                f"{inst.type} or its reflection")
    if system.outer is not None:
        if sorted(system.outer) != sorted(system.externals):
            problems.append("outer boundary must list every external exactly once")
    return problems


def _is_planar_order(g: Gadget, order) -> bool:
    n = g.num_locations
    if sorted(order) != list(range(n)):
        return False
    base = list(range(n))
    doubled = list(order) * 2
    for ref in (base, base[::-1]):
        for k in range(n):
            if doubled[k:k + n] == ref:
                return True
    return False


@dataclass
class ConfigurationGraph:
    system: SystemOfGadgets
    vertices: list[tuple[int, int]]
    edges: list[tuple[int, int, tuple]]      # (vertex id, vertex id, move)
    index: dict[tuple[int, int], int]

    def configuration(self, v: int) -> Configuration:
        code, site = self.vertices[v]
        return Configuration(self.system.decode(code), site)

    def __len__(self):
        return len(self.vertices)

    def is_symmetric(self) -> bool:
        pairs = {(u, v) for u, v, _ in self.edges}
        return all((v, u) in pairs for u, v in pairs)


def build_configuration_graph(system: SystemOfGadgets, start, cap: int | None = None
                              ) -> ConfigurationGraph:
    """All configurations reachable from the initial states with the robot at ``start``.

    ``start`` is an external label or a site index.  Raises ``CapExceeded`` if
    more than ``cap`` configurations are reachable.
    """
    cap = default_cap() if cap is None else cap
    site = system.site_of_external(start) if isinstance(start, str) else start
    root = (system.initial_code(), site)
    index = {root: 0}
    vertices = [root]
    edges = []
    queue = deque([root])
    while queue:
        code, s = queue.popleft()
        u = index[(code, s)]
        for move, c2, s2 in system.successors(code, s):
            key = (c2, s2)
            v = index.get(key)
            if v is None:
                if len(vertices) >= cap:
                    raise CapExceeded(f"more than {cap} configurations")
                v = index[key] = len(vertices)
                vertices.append(key)
                queue.append(key)
            edges.append((u, v, move))
    return ConfigurationGraph(system, vertices, edges, index)


class MissingRotation(GadgetError):
    """Planarity was requested for a system without rotation data."""


def check_planarity(system: SystemOfGadgets, outer: tuple[str, ...] | None = None,
                    allow_reflected_outer: bool = True) -> bool:
    """Genus-zero test of the rotation system by face tracing.

    Each gadget instance is a vertex whose half-edges (its connected
    locations) are ordered by the instance's rotation.  When an outer boundary
    order is given, the externals are joined to one extra vertex standing for
    the outside of the drawing; its rotation is the boundary order reversed
    (or not, when a mirrored boundary is acceptable).
    """
    if system.rotation is None:
        raise MissingRotation("system has no rotation data")
    outer = system.outer if outer is None else outer
    if outer is None:
        return _genus_zero(system, None)
    if _genus_zero(system, tuple(reversed(outer))):
        return True
    return allow_reflected_outer and _genus_zero(system, tuple(outer))


def _genus_zero(system: SystemOfGadgets, outer_rotation) -> bool:
    n = len(system.instances)
    OUTER = n
    # half-edge key: (vertex, slot); slot is a location index, or an external
    # label position for the outer vertex
    other: dict[tuple[int, int], tuple[int, int]] = {}
    for a, b in system.connections:
        other[a] = b
        other[b] = a
    if outer_rotation is not None:
        for k, label in enumerate(outer_rotation):
            ep = system.externals.get(label)
            if ep is None:
                continue
            other[ep] = (OUTER, k)
            other[(OUTER, k)] = ep
    rot: dict[int, list[int]] = {}
    for i in range(n):
        order = system.rotation.get(i, tuple(range(system.instances[i].gadget.num_locations)))
        rot[i] = [l for l in order if (i, l) in other]
    if outer_rotation is not None:
        rot[OUTER] = [k for k in range(len(outer_rotation)) if (OUTER, k) in other]
    succ = {}
    for v, slots in rot.items():
        for k, slot in enumerate(slots):
            succ[(v, slot)] = (v, slots[(k + 1) % len(slots)])

    # connected components over vertices via connections
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for h, g in other.items():
        parent[find(h[0])] = find(g[0])

    seen = set()
    faces: dict[int, int] = {}
    for h in other:
        if h in seen:
            continue
        comp = find(h[0])
        faces[comp] = faces.get(comp, 0) + 1
        cur = h
        while cur not in seen:
            seen.add(cur)
            cur = succ[other[cur]]
    verts: dict[int, int] = {}
    edges: dict[int, int] = {}
    for v in rot:
        if rot[v]:
            c = find(v)
            verts[c] = verts.get(c, 0) + 1
    for h in other:
        c = find(h[0])
        edges[c] = edges.get(c, 0) + 1
    for c in faces:
        if verts[c] - edges[c] // 2 + faces[c] != 2:
            return False
    return True
