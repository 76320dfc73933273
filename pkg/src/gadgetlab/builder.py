"""Incremental construction of gadget systems."""
from __future__ import annotations

from . import catalog
from .gadget import Gadget
from .system import Instance, SystemOfGadgets

HALLWAY = "branching-hallway"


class SystemBuilder:
    """Add instances, wire their locations, and freeze into a ``SystemOfGadgets``.

    Endpoints are ``(instance id, location label)`` pairs.  ``rotation`` is
    ``"cw"`` (the gadget's own clockwise order), ``"ccw"`` (its reflection) or
    an explicit list of location labels.
    """

    def __init__(self, types: dict[str, Gadget] | None = None):
        self.types = dict(types or {})
        self.instances: list[Instance] = []
        self.rotation: dict[str, object] = {}
        self.connections: list[tuple[tuple[str, str], tuple[str, str]]] = []
        self.externals: dict[str, tuple[str, str] | None] = {}
        self._ids: dict[str, int] = {}
        self._counter: dict[str, int] = {}

    def gadget(self, type_name: str) -> Gadget:
        return self.types[type_name] if type_name in self.types else catalog.get(type_name)

    def add(self, type_name: str, state: str | None = None, id: str | None = None,
            rotation="cw") -> str:
        g = self.gadget(type_name)
        if id is None:
            k = self._counter.get(type_name, 0)
            self._counter[type_name] = k + 1
            id = f"{type_name.lower()}{k}"
        if id in self._ids:
            raise ValueError(f"duplicate instance id {id!r}")
        self._ids[id] = len(self.instances)
        self.instances.append(Instance(id, g, g.state_index(state) if state else 0))
        self.rotation[id] = rotation
        return id

    def connect(self, a: tuple[str, str], b: tuple[str, str]) -> None:
        self.connections.append((tuple(a), tuple(b)))

    def chain(self, *endpoints) -> None:
        """Connect consecutive endpoint pairs: ``(e0, e1), (e2, e3), ...``."""
        for a, b in zip(endpoints[::2], endpoints[1::2]):
            self.connect(a, b)

    def junction(self, *endpoints, rotation="cw") -> list[str]:
        """Join several endpoints so the robot can move freely among them.

        Uses a path of branching hallways; endpoints are attached in the given
        order, which is also their clockwise order around the junction.  A
        plain string in place of an endpoint declares a new external label at
        that position.  Returns the hallway ids.
        """
        eps = list(endpoints)
        if len(eps) < 2:
            raise ValueError("junction needs at least two endpoints")
        if len(eps) == 2:
            a, b = eps
            if isinstance(a, str) and isinstance(b, str):
                raise ValueError("cannot join two externals directly")
            if isinstance(a, str):
                self.external(a, b)
            elif isinstance(b, str):
                self.external(b, a)
            else:
                self.connect(a, b)
            return []

        def attach(e, slot):
            if isinstance(e, str):
                self.external(e, slot)
            else:
                self.connect(e, slot)

        ids = []
        prev = None
        # hallway k takes endpoint k+1 on one side; the path of hallways runs
        # along the other side, which keeps the attachment order clockwise
        for k in range(len(eps) - 2):
            h = self.add(HALLWAY, rotation=rotation)
            ids.append(h)
            if k == 0:
                attach(eps[0], (h, "a"))
            else:
                self.connect((prev, "c"), (h, "a"))
            attach(eps[k + 1], (h, "b"))
            prev = h
        attach(eps[-1], (prev, "c"))
        return ids

    def external(self, label: str, endpoint=None) -> None:
        if label in self.externals:
            raise ValueError(f"duplicate external {label!r}")
        self.externals[label] = None if endpoint is None else tuple(endpoint)

    def build(self, outer=None, planar: bool = True) -> SystemOfGadgets:
        def ep(e):
            i = self._ids[e[0]]
            return (i, self.instances[i].gadget.location_index(e[1]))

        rotation = None
        if planar:
            rotation = {}
            for ident, spec in self.rotation.items():
                i = self._ids[ident]
                n = self.instances[i].gadget.num_locations
                if spec == "cw":
                    rotation[i] = tuple(range(n))
                elif spec == "ccw":
                    rotation[i] = tuple(reversed(range(n)))
                else:
                    rotation[i] = tuple(self.instances[i].gadget.location_index(l) for l in spec)
        return SystemOfGadgets(
            list(self.instances),
            [(ep(a), ep(b)) for a, b in self.connections],
            {k: (None if v is None else ep(v)) for k, v in self.externals.items()},
            rotation,
            tuple(outer) if outer is not None else None,
        )
