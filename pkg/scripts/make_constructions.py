"""Regenerate the construction claim files under ``gadgetlab/constructions``.

Each function returns one simulation claim.  The files are the shipped data;
this script only exists so the wiring can be edited as code.

    python scripts/make_constructions.py [name ...]
"""
import sys

from gadgetlab import catalog
from gadgetlab.builder import SystemBuilder
from gadgetlab.simulation import CONSTRUCTIONS_DIR, SimulationClaim

CLAIMS = {}


def claim(name, description, expect=None):
    def deco(fn):
        CLAIMS[name] = (fn, description, expect or {})
        return fn
    return deco


def finish(name, b, target, location_map, initial="0"):
    fn, description, expect = CLAIMS[name]
    system = b.build()
    return SimulationClaim(name, system, location_map, catalog.get(target), initial,
                           description, expect)


@claim("ap2t-to-c2t", "C2T from two AP2Ts whose far ends share a junction")
def ap2t_to_c2t():
    b = SystemBuilder()
    top = b.add("AP2T", "1", "top")
    bot = b.add("AP2T", "0", "bottom")
    b.junction((top, "d"), (bot, "c"), (bot, "b"), (top, "a"))
    b.external("A", (bot, "a"))
    b.external("B", (top, "b"))
    b.external("C", (top, "c"))
    b.external("D", (bot, "d"))
    return finish("ap2t-to-c2t", b, "C2T", {"A": "a", "B": "b", "C": "c", "D": "d"})


@claim("c2t-to-p2t", "P2T from two C2Ts")
def c2t_to_p2t():
    b = SystemBuilder()
    x = b.add("C2T", "1", "left", rotation="ccw")
    y = b.add("C2T", "0", "right")
    b.connect((x, "d"), (y, "d"))
    b.connect((x, "c"), (y, "c"))
    b.external("A", (y, "b"))
    b.external("B", (x, "b"))
    b.external("C", (x, "a"))
    b.external("D", (y, "a"))
    return finish("c2t-to-p2t", b, "P2T", {"A": "a", "B": "b", "C": "c", "D": "d"})


def _uncross(name, kind, target, state, initial="0"):
    b = SystemBuilder()
    x = b.add(kind, state, "left", rotation="ccw")
    y = b.add(kind, state, "right")
    b.connect((x, "a"), (y, "c"))
    b.connect((y, "d"), (x, "b"))
    b.external("A", (y, "a"))
    b.external("B", (x, "c"))
    b.external("C", (x, "d"))
    b.external("D", (y, "b"))
    return finish(name, b, target, {"A": "a", "B": "b", "C": "c", "D": "d"}, initial)


@claim("cwt-to-nwt", "NWT from CWTs")
def cwt_to_nwt():
    return _uncross("cwt-to-nwt", "CWT", "NWT", "1")


@claim("cwl-to-nwl", "NWL from CWLs")
def cwl_to_nwl():
    return _uncross("cwl-to-nwl", "CWL", "NWL", "1", "1")


@claim("ctl-to-ntl", "NTL from CTLs")
def ctl_to_ntl():
    return _uncross("ctl-to-ntl", "CTL", "NTL", "1", "1")


@claim("nwt-to-ap2t", "AP2T from NWTs")
def nwt_to_ap2t():
    b = SystemBuilder()
    x = b.add("NWT", "0", "upper", rotation="ccw")
    y = b.add("NWT", "1", "lower")
    b.connect((x, "b"), (y, "d"))
    b.connect((y, "a"), (x, "c"))
    b.external("A", (y, "b"))
    b.external("B", (x, "d"))
    b.external("C", (x, "a"))
    b.external("D", (y, "c"))
    return finish("nwt-to-ap2t", b, "AP2T", {"A": "a", "B": "b", "C": "c", "D": "d"})


@claim("fork-to-c2t", "C2T from two forks")
def fork_to_c2t():
    b = SystemBuilder()
    x = b.add("fork", "0", "upper", rotation="ccw")
    y = b.add("fork", "0", "lower")
    b.connect((x, "c"), (y, "c"))
    b.external("A", (x, "r"))
    b.external("B", (y, "r"))
    b.external("C", (y, "l"))
    b.external("D", (x, "l"))
    return finish("fork-to-c2t", b, "C2T", {"A": "a", "B": "b", "C": "c", "D": "d"}, "1")


def _spinner_fork(k):
    name = f"spinner{k}-to-fork"
    b = SystemBuilder()
    s = b.add(f"spinner{k}", "0", "spin")
    b.external("L", (s, "p0"))
    b.external("C", (s, "p1"))
    b.external("R", (s, "p2"))
    return finish(name, b, "fork", {"L": "l", "C": "c", "R": "r"})


for _k in (4, 5, 6):
    claim(f"spinner{_k}-to-fork",
          f"fork from a {_k}-spinner with {_k - 3} dead-ended location(s)")(
        lambda k=_k: _spinner_fork(k))


@claim("ap2t-to-1toggle", "1-toggle from one tunnel of an AP2T, the other left unconnected")
def ap2t_to_1toggle():
    b = SystemBuilder()
    t = b.add("AP2T", "0", "t")
    b.external("A", (t, "a"))
    b.external("B", (t, "b"))
    return finish("ap2t-to-1toggle", b, "1-toggle", {"A": "a", "B": "b"})


@claim("sap2tl-to-nwl", "NWL from one SAP2TL with its two toggles joined at each end")
def sap2tl_to_nwl():
    b = SystemBuilder()
    g = b.add("SAP2TL", "0", "tl", rotation="ccw")
    b.junction((g, "l2"), (g, "l1"), "W1")
    b.junction((g, "r1"), (g, "r2"), "W2")
    b.external("L1", (g, "l3"))
    b.external("L2", (g, "r3"))
    return finish("sap2tl-to-nwl", b, "NWL", {"W1": "a", "W2": "b", "L2": "c", "L1": "d"})


@claim("nwl-to-swlw", "SWLW from NWLs",
       {"configs": 4, "classes": 2})
def nwl_to_swlw():
    b = SystemBuilder()
    tl = b.add("NWL", "0", "top_left")
    tr = b.add("NWL", "1", "top_right")
    bl = b.add("NWL", "1", "bottom_left", rotation="ccw")
    br = b.add("NWL", "0", "bottom_right", rotation="ccw")
    # tripwires run across the top and the bottom
    b.connect((tl, "b"), (tr, "a"))
    b.connect((bl, "b"), (br, "a"))
    # the lock tunnel splits through the two left locks, then the two right ones
    b.junction("L2", (tl, "d"), (bl, "d"))
    b.junction((tl, "c"), (tr, "d"), (br, "d"), (bl, "c"))
    b.junction((tr, "c"), "R2", (br, "c"))
    b.external("L1", (tl, "a"))
    b.external("R1", (tr, "b"))
    b.external("L3", (bl, "a"))
    b.external("R3", (br, "b"))
    return finish("nwl-to-swlw", b, "SWLW", {"L1": "l1", "R1": "r1", "L2": "l2", "R2": "r2",
                                             "L3": "l3", "R3": "r3"})


@claim("swlw-to-crossover", "crossover from SWLWs",
       {"classes": 1})
def swlw_to_crossover():
    b = SystemBuilder()
    arms = ["n", "e", "s", "w"]
    g = {x: b.add("SWLW", "0", f"swlw_{x}") for x in arms}
    ends = []
    for k, x in enumerate(arms):
        prev, nxt = arms[k - 1], arms[(k + 1) % 4]
        # outside -> previous arm's upper tripwire -> own lock -> next arm's lower tripwire
        b.external(x.upper(), (g[prev], "l1"))
        b.connect((g[prev], "r1"), (g[x], "l2"))
        b.connect((g[x], "r2"), (g[nxt], "l3"))
        ends.append((g[nxt], "r3"))
    b.junction(*ends)
    return finish("swlw-to-crossover", b, "crossover",
                  {"N": "n", "E": "e", "S": "s", "W": "w"})


def _round_2tl(name, lower_type, target, location_map, lock_state="0", initial="0"):
    b = SystemBuilder()
    up = b.add("P2T", "0", "upper")
    low = b.add(lower_type, "0", "lower")
    x = b.add("C2T", "0", "middle_c2t", rotation="ccw")
    # in state 1 the NTL's toggle runs b->a, so swap its ends to keep the path
    n = b.add("NTL", lock_state, "middle_ntl", rotation="ccw" if lock_state == "0" else "cw")
    n_in, n_out = ("a", "b") if lock_state == "0" else ("b", "a")
    b.connect((up, "b"), (x, "a"))
    # lower gadget: entry -> junction, then middle -> exit
    enter, to_mid, from_mid, leave = ("a", "b", "c", "d") if lower_type == "P2T" \
        else ("a", "c", "d", "b")
    b.junction((x, "c"), (n, n_in), (low, to_mid), rotation="ccw")
    b.junction((n, n_out), (up, "c"), (x, "b"))
    b.connect((x, "d"), (low, from_mid))
    b.external("TL", (up, "d"))
    b.external("TR", (up, "a"))
    b.external("BL", (low, enter))
    b.external("BR", (low, leave))
    b.external("K1", (n, "c"))
    b.external("K2", (n, "d"))
    return finish(name, b, target, location_map, initial)


@claim("2t-ntl-to-rap2tl", "RAP2TL from 2-toggles and an NTL")
def ntl_to_rap2tl():
    return _round_2tl("2t-ntl-to-rap2tl", "P2T", "RAP2TL", {
        "BL": "p0", "BR": "p1", "TR": "p2", "TL": "p3", "K1": "p4", "K2": "p5"})


@claim("2t-ntl-to-rp2tl", "RP2TL from 2-toggles and an NTL")
def ntl_to_rp2tl():
    return _round_2tl("2t-ntl-to-rp2tl", "C2T", "RP2TL", {
        "BL": "p1", "BR": "p0", "TL": "p3", "TR": "p2", "K1": "p5", "K2": "p4"},
        lock_state="1", initial="1")



@claim("rp2tl-to-sap2tl", "SAP2TL from an RP2TL and two C2Ts")
def rp2tl_to_sap2tl():
    # both toggle paths run through both C2Ts, which move the first toggle's
    # far end past both ends of the second toggle
    b = SystemBuilder()
    r = b.add("RP2TL", "0", "round")
    x = b.add("C2T", "0", "first_cross", rotation="ccw")
    y = b.add("C2T", "0", "second_cross")
    b.connect((r, "p1"), (x, "a"))
    b.connect((r, "p2"), (x, "b"))
    b.connect((x, "c"), (y, "a"))
    b.connect((r, "p3"), (y, "d"))
    b.external("T1", (r, "p0"))
    b.external("T2", (x, "d"))
    b.external("T3", (y, "c"))
    b.external("T4", (y, "b"))
    b.external("K1", (r, "p4"))
    b.external("K2", (r, "p5"))
    return finish("rp2tl-to-sap2tl", b, "SAP2TL",
                  {"T1": "r2", "T3": "l2", "T2": "r1", "T4": "l1", "K1": "l3", "K2": "r3"})



def _wire_toggles(b, toggles, junctions, externals):
    """Place 2-toggles by the junction each tunnel end touches.

    ``toggles`` maps an id to ``(type, rotation, {location: node})``;
    ``junctions`` lists each node's endpoints clockwise by toggle id.
    """
    at = {}
    for ident, (kind, rotation, ends) in toggles.items():
        b.add(kind, "0", ident, rotation=rotation)
        for loc, node in ends.items():
            at[(ident, node)] = (ident, loc)
    for node, members in junctions.items():
        b.junction(*(at[(m, node)] for m in members))
    for label in externals:
        owner = next(k for k, (_, _, ends) in toggles.items() if label in ends.values())
        b.external(label, at[(owner, label)])


@claim("2t-to-ntl", "NTL from six 2-toggles; the lock tunnel runs through all but "
       "the lower tunnels of the bottom pair", {"configs": 4, "classes": 2})
def toggles_to_ntl():
    # nodes: AL/AR sit inside the outer toggles, U above and C below the
    # middle C2Ts, H between their horizontal tunnels, TOP joins the outer
    # toggles' upper tunnels, M joins the two halves of the toggle tunnel
    toggles = {
        "outer_left": ("P2T", ["a", "b", "c", "d"], {"a": "L", "b": "AL", "d": "TOP", "c": "U"}),
        "outer_right": ("P2T", ["c", "b", "a", "d"], {"a": "R", "b": "AR", "d": "TOP", "c": "U"}),
        "middle_left": ("C2T", ["b", "c", "d", "a"], {"a": "U", "c": "C", "b": "AL", "d": "H"}),
        "middle_right": ("C2T", ["d", "c", "b", "a"], {"a": "C", "c": "U", "b": "H", "d": "AR"}),
        "bottom_left": ("P2T", ["b", "a", "d", "c"], {"a": "AL", "b": "C", "d": "B1", "c": "M"}),
        "bottom_right": ("AP2T", ["c", "d", "a", "b"], {"a": "AR", "b": "C", "c": "M", "d": "B2"}),
    }
    junctions = {
        "U": ["middle_left", "middle_right", "outer_right", "outer_left"],
        "C": ["middle_right", "middle_left", "bottom_left", "bottom_right"],
        "AL": ["outer_left", "bottom_left", "middle_left"],
        "AR": ["outer_right", "middle_right", "bottom_right"],
        "H": ["middle_left", "middle_right"],
        "TOP": ["outer_left", "outer_right"],
        "M": ["bottom_left", "bottom_right"],
    }
    b = SystemBuilder()
    _wire_toggles(b, toggles, junctions, ["L", "R", "B1", "B2"])
    return finish("2t-to-ntl", b, "NTL", {"B1": "a", "B2": "b", "R": "c", "L": "d"})



@claim("p2t-to-ap2t", "AP2T from six P2Ts; every traversal crosses one outer P2T twice "
       "and each inner P2T once")
def p2t_to_ap2t():
    b = SystemBuilder()
    for ident, rotation in [("right", "ccw"), ("left", "cw"), ("upper_right", "ccw"),
                            ("upper_left", "ccw"), ("lower_left", "cw"), ("lower_right", "cw")]:
        b.add("P2T", "0", ident, rotation=rotation)
    b.connect(("right", "b"), ("upper_right", "a"))
    b.connect(("left", "b"), ("upper_left", "b"))
    b.connect(("left", "c"), ("lower_left", "d"))
    b.connect(("right", "c"), ("lower_right", "c"))
    # the central loop runs through the inner P2Ts' facing tunnels
    b.connect(("upper_right", "d"), ("lower_right", "b"))
    b.connect(("upper_left", "c"), ("lower_left", "a"))
    b.junction(("upper_right", "b"), ("upper_right", "c"), ("upper_left", "d"), ("upper_left", "a"))
    b.junction(("lower_left", "b"), ("lower_right", "a"), ("lower_right", "d"), ("lower_left", "c"))
    b.external("TR", ("right", "a"))
    b.external("BR", ("right", "d"))
    b.external("TL", ("left", "a"))
    b.external("BL", ("left", "d"))
    return finish("p2t-to-ap2t", b, "AP2T", {"TR": "a", "BR": "b", "BL": "c", "TL": "d"})



@claim("ntl-to-ap2t", "AP2T from NTLs; the locks guard the two tunnels and the "
       "toggles form a one-way loop entered through NTLs used as 1-toggles")
def ntl_to_ap2t():
    b = SystemBuilder()
    # locks: top right and bottom left start open
    for ident, state, rotation in [("top_right", "0", "cw"), ("top_left", "1", "ccw"),
                                   ("bottom_left", "0", "cw"), ("bottom_right", "1", "ccw"),
                                   ("upper_gate", "0", "cw"), ("lower_gate", "0", "cw")]:
        b.add("NTL", state, ident, rotation=rotation)
    b.external("TR", ("top_right", "d"))
    b.external("TL", ("top_left", "d"))
    b.external("BL", ("bottom_left", "d"))
    b.external("BR", ("bottom_right", "d"))
    # the gates only let the robot into the loop; their locks stay unused
    b.junction(("top_right", "c"), ("top_left", "c"), ("upper_gate", "a"), rotation="ccw")
    b.junction(("bottom_left", "c"), ("bottom_right", "c"), ("lower_gate", "a"), rotation="ccw")
    # the loop: each toggle points along it in the starting state
    b.junction(("top_right", "b"), ("top_left", "b"), ("upper_gate", "b"))
    b.connect(("top_left", "a"), ("bottom_left", "a"))
    b.junction(("bottom_left", "b"), ("bottom_right", "b"), ("lower_gate", "b"))
    b.connect(("bottom_right", "a"), ("top_right", "a"))
    return finish("ntl-to-ap2t", b, "AP2T", {"TR": "a", "TL": "b", "BL": "c", "BR": "d"})



@claim("nwl-to-ap2t", "AP2T from NWLs; the locks guard the two tunnels and the "
       "tripwires form a loop entered through NWLs wired as 1-toggles")
def nwl_to_ap2t():
    b = SystemBuilder()
    for ident, state, rotation in [("top_right", "0", "cw"), ("top_left", "1", "ccw"),
                                   ("bottom_left", "0", "cw"), ("bottom_right", "1", "ccw"),
                                   ("upper_gate", "0", "cw"), ("lower_gate", "0", "cw")]:
        b.add("NWL", state, ident, rotation=rotation)
    # a gate is a 1-toggle: wire end b joined to lock end c, used from d to a
    for gate in ("upper_gate", "lower_gate"):
        b.connect((gate, "b"), (gate, "c"))
    b.external("TR", ("top_right", "d"))
    b.external("TL", ("top_left", "d"))
    b.external("BL", ("bottom_left", "d"))
    b.external("BR", ("bottom_right", "d"))
    b.junction(("top_right", "c"), ("top_left", "c"), ("upper_gate", "d"), rotation="ccw")
    b.junction(("bottom_left", "c"), ("bottom_right", "c"), ("lower_gate", "d"), rotation="ccw")
    b.junction(("top_right", "b"), ("top_left", "b"), ("upper_gate", "a"))
    b.connect(("top_left", "a"), ("bottom_left", "a"))
    b.junction(("bottom_left", "b"), ("bottom_right", "b"), ("lower_gate", "a"))
    b.connect(("bottom_right", "a"), ("top_right", "a"))
    return finish("nwl-to-ap2t", b, "AP2T", {"TR": "a", "TL": "b", "BL": "c", "BR": "d"})



@claim("toggle-nwl-to-nwt", "NWT from a 1-toggle, four NWLs and two crossovers")
def toggle_nwl_to_nwt():
    b = SystemBuilder()
    t = b.add("1-toggle", "0", "toggle")
    # straight route: left_lock, toggle, right_lock; the other route uses
    # upper_lock and lower_lock and crosses the toggle backwards
    for ident, state, rotation in [("left_lock", "0", "cw"), ("right_lock", "0", "ccw"),
                                   ("upper_lock", "1", "ccw"), ("lower_lock", "1", "cw")]:
        b.add("NWL", state, ident, rotation=rotation)
    west = b.add("crossover", None, "west_cross", rotation="ccw")
    east = b.add("crossover", None, "east_cross", rotation="ccw")
    b.external("L", (west, "w"))
    b.external("R", (east, "e"))
    # lock end d sits on the same side as wire end a
    b.junction((west, "e"), ("left_lock", "d"), ("upper_lock", "d"))
    b.junction(("left_lock", "c"), (t, "a"), ("lower_lock", "d"), rotation="ccw")
    b.junction((t, "b"), ("right_lock", "d"), ("upper_lock", "c"))
    b.junction(("right_lock", "c"), ("lower_lock", "c"), (east, "w"))
    # the tripwire path visits every wire and crosses both external leads
    b.external("W1", ("upper_lock", "a"))
    b.connect(("upper_lock", "b"), ("right_lock", "a"))
    b.connect(("right_lock", "b"), (east, "n"))
    b.connect((east, "s"), ("lower_lock", "b"))
    b.connect(("lower_lock", "a"), ("left_lock", "b"))
    b.connect(("left_lock", "a"), (west, "s"))
    b.external("W2", (west, "n"))
    return finish("toggle-nwl-to-nwt", b, "NWT", {"W1": "a", "W2": "b", "L": "c", "R": "d"})


def main(names):
    CONSTRUCTIONS_DIR.mkdir(exist_ok=True)
    for name in names or CLAIMS:
        c = CLAIMS[name][0]()
        c.save(CONSTRUCTIONS_DIR / f"{name}.json")
        print("wrote", name)


if __name__ == "__main__":
    main(sys.argv[1:])
