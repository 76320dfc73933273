"""The standard gadget catalog.

Every catalog gadget is shipped as a JSON file under ``catalog/``; the builder
functions here are the source those files were generated from, and
``standard_catalog`` reads the files back.  Location order is the clockwise
boundary order used for planar systems.

Orientation conventions (state ``"0"``):

* non-crossing two-tunnel gadgets use locations ``a b c d`` clockwise with
  tunnels ``a-b`` (top) and ``c-d`` (bottom); crossing ones use tunnels
  ``a-c`` and ``b-d``;
* AP2T: ``a->b`` and ``c->d``; P2T: ``a->b`` and ``d->c``;
  C2T: ``a->c`` and ``b->d``;
* locks are open in state ``"0"``; the toggle of a toggle/lock points along
  the listed tunnel order in state ``"0"``;
* round three-tunnel gadgets use tunnels ``p0-p1``, ``p2-p3``, ``p4-p5`` around
  the boundary with the lock last; stacked ones list the right side top to
  bottom then the left side bottom to top (``r1 r2 r3 l3 l2 l1``).
"""
from __future__ import annotations

import functools
import itertools
import json
import re
from importlib import resources
from pathlib import Path

from .gadget import Gadget, GadgetError

CATALOG_DIR = Path(__file__).parent / "catalog"

TWO_TUNNEL = ("NWL", "NTL", "NWT", "P2T", "AP2T", "C2T", "CWL", "CTL", "CWT")


def tunnel_gadget(name: str, locations, tunnels) -> Gadget:
    """Two-state gadget from per-tunnel specs.

    Each spec is ``(kind, x, y)`` with kind one of ``toggle`` (``x->y`` in
    state 0), ``wire``, ``lock`` (open in state 0), ``open`` or ``closed``.
    """
    edges = []

    def both(u, v):
        edges.append((u, v))
        edges.append((v, u))

    for kind, x, y in tunnels:
        if kind == "toggle":
            both(("0", x), ("1", y))
        elif kind == "wire":
            both(("0", x), ("1", y))
            both(("0", y), ("1", x))
        elif kind == "lock":
            both(("0", x), ("0", y))
        elif kind == "open":
            both(("0", x), ("0", y))
            both(("1", x), ("1", y))
        elif kind != "closed":
            raise GadgetError(f"unknown tunnel kind {kind!r}")
    return Gadget.from_labels(name, locations, ("0", "1"), edges)


def branching_hallway() -> Gadget:
    locs = ("a", "b", "c")
    edges = [(("0", x), ("0", y)) for x, y in itertools.permutations(locs, 2)]
    return Gadget.from_labels("branching-hallway", locs, ("0",), edges)


def one_toggle() -> Gadget:
    return tunnel_gadget("1-toggle", ("a", "b"), [("toggle", "a", "b")])


def crossover() -> Gadget:
    locs = ("n", "e", "s", "w")
    edges = [(("0", x), ("0", y)) for x, y in
             [("n", "s"), ("s", "n"), ("e", "w"), ("w", "e")]]
    return Gadget.from_labels("crossover", locs, ("0",), edges)


def spinner(k: int) -> Gadget:
    """``k`` locations on a cycle; clockwise in state 0, counterclockwise in 1."""
    if k < 2:
        raise GadgetError("spinner needs k >= 2")
    locs = tuple(f"p{i}" for i in range(k))
    edges = []
    for i in range(k):
        j = (i + 1) % k
        edges.append((("0", locs[i]), ("1", locs[j])))
        edges.append((("1", locs[j]), ("0", locs[i])))
    return Gadget.from_labels(f"spinner{k}", locs, ("0", "1"), set(edges))


def fork() -> Gadget:
    # state 0: c->r and l->c; state 1 reverses both
    edges = [(("0", "c"), ("1", "r")), (("1", "r"), ("0", "c")),
             (("0", "l"), ("1", "c")), (("1", "c"), ("0", "l"))]
    return Gadget.from_labels("fork", ("l", "c", "r"), ("0", "1"), edges)


_ABCD = ("a", "b", "c", "d")
_ROUND = tuple(f"p{i}" for i in range(6))
_STACK = ("r1", "r2", "r3", "l3", "l2", "l1")

_BUILDERS = {
    "branching-hallway": branching_hallway,
    "1-toggle": one_toggle,
    "crossover": crossover,
    "fork": fork,
    "spinner4": lambda: spinner(4),
    "NWL": lambda: tunnel_gadget("NWL", _ABCD, [("wire", "a", "b"), ("lock", "c", "d")]),
    "CWL": lambda: tunnel_gadget("CWL", _ABCD, [("wire", "a", "c"), ("lock", "b", "d")]),
    "NTL": lambda: tunnel_gadget("NTL", _ABCD, [("toggle", "a", "b"), ("lock", "c", "d")]),
    "CTL": lambda: tunnel_gadget("CTL", _ABCD, [("toggle", "a", "c"), ("lock", "b", "d")]),
    "NWT": lambda: tunnel_gadget("NWT", _ABCD, [("wire", "a", "b"), ("toggle", "c", "d")]),
    "CWT": lambda: tunnel_gadget("CWT", _ABCD, [("wire", "a", "c"), ("toggle", "b", "d")]),
    "AP2T": lambda: tunnel_gadget("AP2T", _ABCD, [("toggle", "a", "b"), ("toggle", "c", "d")]),
    "P2T": lambda: tunnel_gadget("P2T", _ABCD, [("toggle", "a", "b"), ("toggle", "d", "c")]),
    "C2T": lambda: tunnel_gadget("C2T", _ABCD, [("toggle", "a", "c"), ("toggle", "b", "d")]),
    "RAP2TL": lambda: tunnel_gadget("RAP2TL", _ROUND, [
        ("toggle", "p0", "p1"), ("toggle", "p2", "p3"), ("lock", "p4", "p5")]),
    "RP2TL": lambda: tunnel_gadget("RP2TL", _ROUND, [
        ("toggle", "p0", "p1"), ("toggle", "p3", "p2"), ("lock", "p4", "p5")]),
    "SAP2TL": lambda: tunnel_gadget("SAP2TL", _STACK, [
        ("toggle", "l1", "r1"), ("toggle", "r2", "l2"), ("lock", "l3", "r3")]),
    "SWLW": lambda: tunnel_gadget("SWLW", _STACK, [
        ("wire", "l1", "r1"), ("lock", "l2", "r2"), ("wire", "l3", "r3")]),
}

_SPINNER = re.compile(r"spinner(\d+)$")


def catalog_names() -> list[str]:
    return sorted(_BUILDERS)


def build(name: str) -> Gadget:
    """Construct a catalog gadget from its builder (not from the data file)."""
    if name in _BUILDERS:
        return _BUILDERS[name]()
    m = _SPINNER.match(name)
    if m:
        return spinner(int(m.group(1)))
    raise GadgetError(f"unknown catalog gadget {name!r}")


def file_name(name: str) -> str:
    return name.lower() + ".json"


def write_catalog(directory=CATALOG_DIR) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in catalog_names():
        build(name).save(directory / file_name(name))


@functools.lru_cache(maxsize=None)
def _load(name: str) -> Gadget:
    ref = resources.files("gadgetlab") / "catalog" / file_name(name)
    return Gadget.from_dict(json.loads(ref.read_text()))


def get(name: str) -> Gadget:
    """Catalog gadget by name; ``spinnerK`` is generated for any ``K >= 2``."""
    if name in _BUILDERS:
        return _load(name)
    m = _SPINNER.match(name)
    if m:
        return spinner(int(m.group(1)))
    raise GadgetError(f"unknown catalog gadget {name!r}")


def standard_catalog() -> dict[str, Gadget]:
    return {name: get(name) for name in catalog_names()}
