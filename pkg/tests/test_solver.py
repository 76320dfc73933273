import random

import pytest

from gadgetlab.builder import SystemBuilder
from gadgetlab.catalog import tunnel_gadget
from gadgetlab.gadget import Gadget, GadgetError
from gadgetlab.solver import (Puzzle, dispatch, random_puzzle, reaches_goal, replay_witness,
                              solve_bfs, solve_one_state, solve_one_toggle)
from gadgetlab.system import CapExceeded, SystemDefinitionError, SystemOfGadgets


def puzzle(builder: SystemBuilder, start="start", goal="goal") -> Puzzle:
    return Puzzle(builder.build(), start, goal)


def toggle_line(directions) -> Puzzle:
    """1-toggles in series from start to goal; True means pointing toward the goal."""
    b = SystemBuilder()
    prev = "start"
    for forward in directions:
        t = b.add("1-toggle", state="0" if forward else "1")
        b.junction(prev, (t, "a"))
        prev = (t, "b")
    b.junction(prev, "goal")
    return puzzle(b)


class TestBFS:
    def test_start_is_goal(self):
        s = SystemOfGadgets([], [], {"x": None})
        sol = solve_bfs(Puzzle(s, "x", "x"))
        assert sol.solvable and sol.witness == []

    def test_one_toggle_toward_goal(self):
        sol = solve_bfs(toggle_line([True]))
        assert sol.solvable and len(sol.witness) == 1

    def test_one_toggle_away_from_goal(self):
        assert not solve_bfs(toggle_line([False]))

    def test_ap2t_tunnels_unconnected(self):
        b = SystemBuilder()
        g = b.add("AP2T")
        b.external("start", (g, "a"))
        b.external("goal", (g, "c"))
        sol = solve_bfs(puzzle(b))
        assert not sol and sol.explored <= 16

    def test_witness_is_shortest(self):
        # two routes to the goal: a direct hallway and a detour through a toggle
        b = SystemBuilder()
        t = b.add("1-toggle")
        b.junction("start", (t, "a"), "goal")
        sol = solve_bfs(puzzle(b))
        assert len(sol.witness) == 1

    def test_cap(self):
        with pytest.raises(CapExceeded):
            solve_bfs(toggle_line([True, True, True]), cap=2)

    def test_undeclared_goal(self):
        with pytest.raises(SystemDefinitionError, match="goal"):
            Puzzle(SystemOfGadgets([], [], {"x": None}), "x", "y")


class TestFastPaths:
    def test_crossover_chain(self):
        b = SystemBuilder()
        xs = [b.add("crossover") for _ in range(3)]
        b.external("start", (xs[0], "n"))
        for x, y in zip(xs, xs[1:]):
            b.connect((x, "s"), (y, "n"))
        b.external("goal", (xs[-1], "s"))
        p = puzzle(b)
        sol = solve_one_state(p)
        assert sol.solvable and solve_bfs(p).solvable
        assert reaches_goal(p, sol.witness)

    def test_one_way_tunnel_away(self):
        door = Gadget.from_labels("door", "ab", ["0"], [(("0", "b"), ("0", "a"))])
        b = SystemBuilder({"door": door})
        d = b.add("door")
        b.external("start", (d, "a"))
        b.external("goal", (d, "b"))
        assert not solve_one_state(puzzle(b))

    def test_hallway_tree(self):
        b = SystemBuilder()
        leaves = ["l0", "l1", "l2", "l3", "l4"]
        b.junction(*leaves)
        s = b.build()
        for x in leaves:
            for y in leaves:
                assert solve_one_state(Puzzle(s, x, y))

    def test_one_state_rejects_toggle(self):
        with pytest.raises(GadgetError, match="one-state"):
            solve_one_state(toggle_line([True]))

    def test_one_toggle_series(self):
        p = toggle_line([True, False])
        assert not solve_one_toggle(p)
        assert not solve_bfs(p)

    def test_one_toggle_toward_goal(self):
        p = toggle_line([True, True])
        sol = solve_one_toggle(p)
        assert sol and reaches_goal(p, sol.witness)

    def test_one_toggle_rejects_ap2t(self):
        b = SystemBuilder()
        g = b.add("AP2T")
        b.external("start", (g, "a"))
        b.external("goal", (g, "b"))
        with pytest.raises(GadgetError):
            solve_one_toggle(puzzle(b))

    def test_random_toggle_hallway_systems(self):
        rng = random.Random(7)
        for _ in range(100):
            p = random_puzzle(rng, 6, names=["1-toggle", "branching-hallway", "crossover"])
            sol = solve_one_toggle(p)
            assert sol.solvable == solve_bfs(p).solvable
            if sol:
                assert reaches_goal(p, sol.witness)


class TestDispatch:
    def test_tripwires_use_mixed_graph(self):
        wires = tunnel_gadget("WW", "abcd", [("wire", "a", "b"), ("wire", "c", "d")])
        b = SystemBuilder({"WW": wires})
        w = b.add("WW")
        b.external("start", (w, "a"))
        b.external("goal", (w, "b"))
        sol = dispatch(puzzle(b))
        assert sol.algorithm == "tripwire" and sol.solvable

    def test_lock_only(self):
        locks = tunnel_gadget("LL", "abcd", [("lock", "a", "b"), ("lock", "c", "d")])
        for state, want in (("0", True), ("1", False)):
            b = SystemBuilder({"LL": locks})
            g = b.add("LL", state=state)
            b.external("start", (g, "a"))
            b.external("goal", (g, "b"))
            sol = dispatch(puzzle(b))
            assert sol.algorithm == "one-state" and sol.solvable == want

    def test_ap2t_uses_bfs(self):
        b = SystemBuilder()
        g = b.add("AP2T")
        b.external("start", (g, "a"))
        b.external("goal", (g, "b"))
        assert dispatch(puzzle(b)).algorithm == "bfs"

    def test_toggle_with_trivial_tunnel(self):
        g = tunnel_gadget("TO", "abcd", [("toggle", "a", "b"), ("open", "c", "d")])
        rng = random.Random(5)
        for _ in range(40):
            p = random_puzzle(rng, 4, names=["1-toggle", "branching-hallway"])
            assert dispatch(p).solvable == solve_bfs(p).solvable
        b = SystemBuilder({"TO": g})
        x = b.add("TO")
        b.junction("start", (x, "c"))
        b.connect((x, "d"), (x, "a"))
        b.external("goal", (x, "b"))
        p = puzzle(b)
        sol = dispatch(p)
        assert sol.algorithm == "one-toggle" and sol.solvable and reaches_goal(p, sol.witness)

    def test_invalid_system(self):
        p = toggle_line([True, True])
        p.system.connections.append(p.system.connections[0])
        with pytest.raises(SystemDefinitionError):
            dispatch(p)

    def test_random_agreement(self):
        rng = random.Random(1)
        for _ in range(200):
            p = random_puzzle(rng, 6)
            fast, slow = dispatch(p), solve_bfs(p)
            assert fast.solvable == slow.solvable
            for sol in (fast, slow):
                if sol:
                    assert reaches_goal(p, sol.witness)


class TestWitness:
    def test_illegal_step_rejected(self):
        p = toggle_line([True])
        sol = solve_bfs(p)
        with pytest.raises(ValueError):
            replay_witness(p, sol.witness * 2)
        assert not reaches_goal(p, sol.witness * 2)

    def test_reversed_witness_returns(self):
        # in reversible systems every move can be undone
        rng = random.Random(2)
        checked = 0
        while checked < 50:
            p = random_puzzle(rng, 5)
            sol = solve_bfs(p)
            if not sol or not sol.witness:
                continue
            code, site = replay_witness(p, sol.witness)
            for move in reversed(sol.witness):
                back = [mv for mv, c2, s2 in p.system.successors(code, site)
                        if _undoes(mv, move)]
                assert back
                code, site = p.system.apply(code, site, back[0])
            assert (code, site) == (p.system.initial_code(),
                                    p.system.site_of_external(p.start))
            checked += 1


def _undoes(mv, move) -> bool:
    if move[0] == "hop":
        return mv[0] == "hop" and (mv[1], mv[2]) == (move[2], move[1])
    return mv[0] == "move" and mv[1] == move[1] and (mv[2], mv[3]) == (move[3], move[2])
