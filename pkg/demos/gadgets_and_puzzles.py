"""
Gadgets, tunnels and puzzles
============================

A gadget is a small finite-state device the robot walks through.  This demo
builds a few from the catalog, asks which of them make motion planning hard,
and solves a puzzle wired from 1-toggles.
"""

# %%
# A gadget is its state space: entering at one location in one state sends
# the robot out of another location, possibly changing the state.
from gadgetlab import catalog
from gadgetlab.gadget import classify_complexity, tunnel_decomposition

ap2t = catalog.get("AP2T")
print(ap2t.locations, ap2t.states)
for (s, a), (t, b) in sorted(ap2t.transitions):
    print(f"  state {ap2t.states[s]} at {ap2t.locations[a]} -> "
          f"state {ap2t.states[t]} at {ap2t.locations[b]}")

# %%
# Pairing the locations into tunnels and naming each tunnel's behavior is
# enough to decide the complexity of a two-state gadget.
for name in ["AP2T", "NWL", "NTL", "1-toggle", "crossover"]:
    g = catalog.get(name)
    td = tunnel_decomposition(g)
    kinds = [k.value for k in td.kinds] if td.kinds else "one state"
    print(f"{name:10} {kinds}  ->  {classify_complexity(g).value}")

# %%
# Puzzles are systems of gadget instances joined by connections.  Here two
# 1-toggles in series both point toward the goal, so the robot gets through.
from gadgetlab.builder import SystemBuilder
from gadgetlab.solver import Puzzle, dispatch, solve_bfs


def two_toggles(second_state):
    b = SystemBuilder()
    t0, t1 = b.add("1-toggle"), b.add("1-toggle", state=second_state)
    b.external("start", (t0, "a"))
    b.connect((t0, "b"), (t1, "a"))
    b.external("goal", (t1, "b"))
    return Puzzle(b.build(), "start", "goal")


sol = dispatch(two_toggles("0"))
print(sol.solvable, sol.algorithm, sol.witness)

# %%
# Flip the second toggle and the goal is cut off.  The fast solver treats
# each 1-toggle as a one-way edge; exhaustive search agrees.
flipped = two_toggles("1")
print(dispatch(flipped).solvable, solve_bfs(flipped).solvable)

# %%
# Anything with a hard gadget falls back to breadth-first search over
# configurations: every gadget state plus the robot's position.
b = SystemBuilder()
g = b.add("AP2T")
b.external("start", (g, "a"))
b.external("goal", (g, "c"))
sol = dispatch(Puzzle(b.build(), "start", "goal"))
print(sol.solvable, sol.algorithm, sol.explored, "configurations")
