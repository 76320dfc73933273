"""Gadgets as explicit state spaces.

A gadget has ordered locations and ordered states.  Its behavior is a set of
directed edges ``(state, location) -> (state', location')`` on state/location
pairs: entering at ``location`` while in ``state`` the robot may leave at
``location'`` and the gadget switches to ``state'``.

The order of ``locations`` doubles as the gadget's clockwise boundary order
when it is drawn in the plane.
"""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable


class GadgetError(ValueError):
    """Raised for malformed gadget definitions or unsupported gadgets."""


def read_json(path, parse):
    """``parse`` applied to the JSON in ``path``; errors name the file."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GadgetError(f"{path}: invalid JSON ({exc})") from None
    try:
        return parse(data)
    except GadgetError as exc:
        raise type(exc)(f"{path}: {exc}") from None
    except (TypeError, AttributeError):
        raise GadgetError(f"{path}: expected a JSON object of the right shape") from None


Edge = tuple[tuple[int, int], tuple[int, int]]


@dataclass(frozen=True)
class Gadget:
    name: str
    locations: tuple[str, ...]
    states: tuple[str, ...]
    transitions: frozenset[Edge]
    _out: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "locations", tuple(self.locations))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        if not self.locations:
            raise GadgetError(f"{self.name}: gadget needs at least one location")
        if not self.states:
            raise GadgetError(f"{self.name}: gadget needs at least one state")
        if len(set(self.locations)) != len(self.locations):
            raise GadgetError(f"{self.name}: duplicate location label")
        if len(set(self.states)) != len(self.states):
            raise GadgetError(f"{self.name}: duplicate state label")
        nl, ns = len(self.locations), len(self.states)
        out: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for (s, a), (t, b) in sorted(self.transitions):
            if not (0 <= s < ns and 0 <= t < ns and 0 <= a < nl and 0 <= b < nl):
                raise GadgetError(f"{self.name}: transition index out of range")
            if (s, a) == (t, b):
                raise GadgetError(f"{self.name}: self-loop at state {self.states[s]!r}, "
                                  f"location {self.locations[a]!r}")
            out.setdefault((s, a), []).append((t, b))
        object.__setattr__(self, "_out", {k: tuple(v) for k, v in out.items()})

    @classmethod
    def from_labels(cls, name: str, locations: Iterable[str], states: Iterable[str],
                    transitions: Iterable) -> "Gadget":
        """Build a gadget from ``((state, loc), (state', loc'))`` label pairs."""
        locations = tuple(locations)
        states = tuple(states)
        li = {l: i for i, l in enumerate(locations)}
        si = {s: i for i, s in enumerate(states)}
        edges = set()
        for (s, a), (t, b) in transitions:
            try:
                edges.add(((si[s], li[a]), (si[t], li[b])))
            except KeyError as exc:
                raise GadgetError(f"{name}: unknown label {exc.args[0]!r}") from None
        return cls(name, locations, states, frozenset(edges))

    @property
    def num_locations(self) -> int:
        return len(self.locations)

    @property
    def num_states(self) -> int:
        return len(self.states)

    def location_index(self, label: str) -> int:
        try:
            return self.locations.index(label)
        except ValueError:
            raise GadgetError(f"{self.name}: no location {label!r}") from None

    def state_index(self, label: str) -> int:
        try:
            return self.states.index(label)
        except ValueError:
            raise GadgetError(f"{self.name}: no state {label!r}") from None

    def moves(self, state: int, location: int) -> tuple[tuple[int, int], ...]:
        """Traversals available when entering at ``location`` in ``state``."""
        return self._out.get((state, location), ())

    def renamed(self, name: str) -> "Gadget":
        return Gadget(name, self.locations, self.states, self.transitions)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "locations": list(self.locations),
            "states": list(self.states),
            "transitions": [
                {"from": [self.states[s], self.locations[a]],
                 "to": [self.states[t], self.locations[b]]}
                for (s, a), (t, b) in sorted(self.transitions)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Gadget":
        try:
            name = data["name"]
            locations = data["locations"]
            states = data["states"]
            raw = data["transitions"]
        except KeyError as exc:
            raise GadgetError(f"gadget: missing field {exc.args[0]!r}") from None
        except TypeError:
            raise GadgetError("gadget: expected a JSON object") from None
        edges = []
        for i, tr in enumerate(raw):
            try:
                edges.append((tuple(tr["from"]), tuple(tr["to"])))
            except (KeyError, TypeError):
                raise GadgetError(f"{name}: transitions[{i}] needs 'from' and 'to'") from None
        labelled = list(edges)
        if len(set(labelled)) != len(labelled):
            raise GadgetError(f"{name}: duplicate transition")
        return cls.from_labels(name, locations, states, labelled)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def load(cls, path) -> "Gadget":
        return read_json(path, cls.from_dict)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps() + "\n")


def is_deterministic(g: Gadget) -> bool:
    """Every state/location vertex has out-degree at most one."""
    return all(len(v) <= 1 for v in g._out.values())


def is_reversible(g: Gadget) -> bool:
    """The state space contains the reverse of every edge."""
    return all((v, u) in g.transitions for u, v in g.transitions)


class TunnelKind(enum.Enum):
    TRIVIAL_OPEN = "TrivialOpen"
    TRIVIAL_CLOSED = "TrivialClosed"
    TRIPWIRE = "Tripwire"
    LOCK = "Lock"
    TOGGLE = "Toggle"

    @property
    def trivial(self) -> bool:
        return self in (TunnelKind.TRIVIAL_OPEN, TunnelKind.TRIVIAL_CLOSED)


class ComplexityClass(enum.Enum):
    PSPACE_COMPLETE = "PSPACE-complete"
    POLYNOMIAL_TIME = "P"


@dataclass(frozen=True)
class TunnelDecomposition:
    tunnels: tuple[tuple[int, int], ...]
    kinds: tuple[TunnelKind, ...] | None = None

    def kind_of(self, location: int) -> TunnelKind | None:
        for t, k in zip(self.tunnels, self.kinds or ()):
            if location in t:
                return k
        return None


def _tunnel_kind(g: Gadget, x: int, y: int) -> TunnelKind:
    edges = [e for e in g.transitions if {e[0][1], e[1][1]} == {x, y}]
    if not edges:
        return TunnelKind.TRIVIAL_CLOSED
    flipping = [e for e in edges if e[0][0] != e[1][0]]
    steady = [e for e in edges if e[0][0] == e[1][0]]
    if flipping and steady:
        # only reachable for non-deterministic or non-reversible tunnels
        raise GadgetError(f"{g.name}: tunnel {g.locations[x]}-{g.locations[y]} mixes "
                          "state-changing and state-preserving traversals")
    if steady:
        open_in = {e[0][0] for e in steady}
        return TunnelKind.TRIVIAL_OPEN if len(open_in) == g.num_states else TunnelKind.LOCK
    entries = {(e[0][0], e[0][1]) for e in flipping}
    # tripwire: enterable from both ends in both states
    if len(entries) == 2 * g.num_states:
        return TunnelKind.TRIPWIRE
    return TunnelKind.TOGGLE


def _matchings(items: list[int]):
    """Perfect matchings of ``items`` in lexicographic order."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1:]
        for m in _matchings(remaining):
            yield ((first, partner),) + m


def tunnel_decomposition(g: Gadget) -> TunnelDecomposition | None:
    """Pair the locations into tunnels so that every traversal stays in a pair.

    Returns ``None`` if no such perfect matching exists.  Kinds are filled in
    for deterministic reversible two-state gadgets only.
    """
    if g.num_locations % 2:
        return None
    linked = {frozenset((a, b)) for (_, a), (_, b) in g.transitions}
    for m in _matchings(list(range(g.num_locations))):
        pairs = {frozenset(p) for p in m}
        if all(link in pairs for link in linked):
            kinds = None
            if g.num_states == 2 and is_deterministic(g) and is_reversible(g):
                kinds = tuple(_tunnel_kind(g, x, y) for x, y in m)
            return TunnelDecomposition(m, kinds)
    return None


# Pairs of nontrivial tunnel kinds that make motion planning PSPACE-complete.
HARD_PAIRS = frozenset({
    (TunnelKind.TOGGLE, TunnelKind.TOGGLE),
    (TunnelKind.TOGGLE, TunnelKind.TRIPWIRE),
    (TunnelKind.TOGGLE, TunnelKind.LOCK),
    (TunnelKind.TRIPWIRE, TunnelKind.LOCK),
})


def _is_hard_pair(a: TunnelKind, b: TunnelKind) -> bool:
    return (a, b) in HARD_PAIRS or (b, a) in HARD_PAIRS


def hard_pair(kinds: Iterable[TunnelKind]) -> tuple[TunnelKind, TunnelKind] | None:
    """First pair of tunnel kinds witnessing hardness, if any."""
    nontrivial = [k for k in kinds if not k.trivial]
    for a, b in itertools.combinations(nontrivial, 2):
        if _is_hard_pair(a, b):
            return (a, b)
    return None


def classify_complexity(g: Gadget) -> ComplexityClass:
    """Place a deterministic reversible gadget with at most two states.

    One-state gadgets are always polynomial.  Two-state gadgets must be
    tunnel gadgets; they are PSPACE-complete exactly when two of their
    nontrivial tunnels form a toggle/toggle, toggle/tripwire, toggle/lock or
    tripwire/lock pair.
    """
    if not is_deterministic(g):
        raise GadgetError(f"{g.name}: not deterministic")
    if not is_reversible(g):
        raise GadgetError(f"{g.name}: not reversible")
    if g.num_states > 2:
        raise GadgetError(f"{g.name}: more than two states")
    td = tunnel_decomposition(g)
    if td is None:
        raise GadgetError(f"{g.name}: not a tunnel gadget")
    if g.num_states == 1:
        return ComplexityClass.POLYNOMIAL_TIME
    if hard_pair(td.kinds) is not None:
        return ComplexityClass.PSPACE_COMPLETE
    return ComplexityClass.POLYNOMIAL_TIME
