import copy
import itertools
import random

import pytest

from gadgetlab import catalog
from gadgetlab.builder import SystemBuilder
from gadgetlab.simulation import claim_is_planar, shipped_claims
from gadgetlab.solver import random_puzzle
from gadgetlab.system import (CapExceeded, Instance, MissingRotation, SystemDefinitionError,
                              SystemOfGadgets, build_configuration_graph, check_planarity,
                              default_cap, validate)


def toggles_in_series() -> SystemOfGadgets:
    b = SystemBuilder()
    t0, t1 = b.add("1-toggle"), b.add("1-toggle")
    b.connect((t0, "b"), (t1, "a"))
    b.external("in", (t0, "a"))
    b.external("out", (t1, "b"))
    return b.build()


def single(name: str, **externals) -> SystemOfGadgets:
    b = SystemBuilder()
    g = b.add(name, id="g")
    for label, loc in externals.items():
        b.external(label, (g, loc))
    return b.build()


def k5() -> SystemOfGadgets:
    # five 4-location gadgets, each joined to the other four
    insts = [Instance(f"v{i}", catalog.get("crossover"), 0) for i in range(5)]
    used = [0] * 5
    conns = []
    for i, j in itertools.combinations(range(5), 2):
        conns.append(((i, used[i]), (j, used[j])))
        used[i] += 1
        used[j] += 1
    return SystemOfGadgets(insts, conns, {}, {i: (0, 1, 2, 3) for i in range(5)})


def ap2t_to_c2t():
    return next(c for c in shipped_claims() if c.name == "ap2t-to-c2t")


class TestValidate:
    def test_well_formed(self):
        assert validate(toggles_in_series()) == []

    def test_matching_violated(self):
        s = toggles_in_series()
        s.connections.append(((0, 1), (1, 1)))
        problems = validate(s)
        assert [p for p in problems if "matching violated" in p]

    def test_external_connection_overlap(self):
        s = toggles_in_series()
        s.externals["bad"] = (0, 1)
        problems = validate(s)
        assert len([p for p in problems if "external/connection overlap" in p]) == 1

    def test_bad_rotation(self):
        s = single("AP2T")
        s.rotation = {0: (0, 2, 1, 3)}
        assert any("rotation" in p for p in validate(s))

    def test_reflected_rotation_allowed(self):
        s = single("AP2T")
        s.rotation = {0: (3, 2, 1, 0)}
        assert validate(s) == []

    def test_unknown_external(self):
        with pytest.raises(SystemDefinitionError, match="nope"):
            toggles_in_series().site_of_external("nope")


class TestConfigurationGraph:
    def test_one_toggle(self):
        # entrance in state 0, then exit in state 1; crossing back returns to the start
        cg = build_configuration_graph(single("1-toggle", s="a", t="b"), "s")
        assert len(cg) == 2
        assert {(c.states, c.position) for c in map(cg.configuration, range(len(cg)))} == \
            {((0,), 0), ((1,), 1)}

    def test_crossover_from_north(self):
        s = single("crossover", N="n", E="e", S="s", W="w")
        cg = build_configuration_graph(s, "N")
        positions = {s.describe_site(cg.configuration(v).position) for v in range(len(cg))}
        assert positions == {"g.n", "g.s"}

    def test_empty_system(self):
        s = SystemOfGadgets([], [], {"x": None})
        assert len(build_configuration_graph(s, "x")) == 1

    def test_edges_are_moves(self):
        s = toggles_in_series()
        cg = build_configuration_graph(s, "in")
        for u, v, move in cg.edges:
            code, site = cg.vertices[u]
            assert s.apply(code, site, move) == cg.vertices[v]

    def test_reversible_systems_are_symmetric(self):
        rng = random.Random(3)
        for _ in range(50):
            p = random_puzzle(rng, 4)
            cg = build_configuration_graph(p.system, p.start)
            assert cg.is_symmetric()

    def test_vertex_bound(self):
        rng = random.Random(4)
        for _ in range(30):
            p = random_puzzle(rng, 4)
            cg = build_configuration_graph(p.system, p.start)
            product = 1
            for inst in p.system.instances:
                product *= inst.gadget.num_states
            sites = sum(inst.gadget.num_locations for inst in p.system.instances)
            assert len(cg) <= product * sites

    def test_independent_of_instance_order(self):
        p = random_puzzle(random.Random(11), 5)
        s = p.system
        perm = list(reversed(range(len(s.instances))))
        where = {old: new for new, old in enumerate(perm)}
        s2 = SystemOfGadgets([s.instances[i] for i in perm],
                             [((where[a[0]], a[1]), (where[b[0]], b[1])) for a, b in s.connections],
                             {k: (where[v[0]], v[1]) for k, v in s.externals.items()})

        def canon(system):
            cg = build_configuration_graph(system, p.start)
            out = set()
            for v in range(len(cg)):
                c = cg.configuration(v)
                states = {system.instances[i].id: st for i, st in enumerate(c.states)}
                out.add((tuple(sorted(states.items())), system.describe_site(c.position)))
            return out

        assert canon(s) == canon(s2)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            build_configuration_graph(toggles_in_series(), "in", cap=1)

    def test_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv("GADGET_CAP", "1")
        assert default_cap() == 1
        with pytest.raises(CapExceeded):
            build_configuration_graph(toggles_in_series(), "in")
        monkeypatch.delenv("GADGET_CAP")
        assert default_cap() == 10**7


class TestPlanarity:
    def test_two_hallways(self):
        b = SystemBuilder()
        h0, h1 = b.add("branching-hallway"), b.add("branching-hallway")
        b.connect((h0, "c"), (h1, "a"))
        assert check_planarity(b.build())

    def test_shipped_c2t_construction(self):
        assert claim_is_planar(ap2t_to_c2t())

    def test_k5(self):
        assert not check_planarity(k5())

    def test_crossed_variant(self):
        claim = copy.copy(ap2t_to_c2t())
        data = claim.construction.to_dict()
        data["rotation"]["top"] = data["rotation"]["top"][::-1]
        claim.construction = SystemOfGadgets.from_dict(data)
        assert validate(claim.construction) == []
        assert not claim_is_planar(claim)

    def test_outer_order_matters(self):
        claim = ap2t_to_c2t()
        order = list(claim.ordered_externals())
        assert check_planarity(claim.construction, outer=tuple(order))
        order[0], order[1] = order[1], order[0]
        assert not check_planarity(claim.construction, outer=tuple(order))

    def test_missing_rotation(self):
        with pytest.raises(MissingRotation):
            check_planarity(SystemOfGadgets([], [], {}))


class TestSerialization:
    def test_round_trip(self, tmp_path):
        s = ap2t_to_c2t().construction
        path = tmp_path / "s.json"
        path.write_text(s.dumps())
        s2 = SystemOfGadgets.load(path)
        assert s2.to_dict() == s.to_dict()

    def test_inline_types(self):
        g = catalog.get("AP2T").renamed("mine")
        s = SystemOfGadgets([Instance("x", g, 1)], [], {"a": (0, 0)})
        data = s.to_dict()
        assert "mine" in data["types"]
        assert SystemOfGadgets.from_dict(data).instances[0].gadget == g

    def test_error_names_field(self):
        data = toggles_in_series().to_dict()
        data["connections"][0][1] = ["1-toggle1", "z"]
        with pytest.raises(SystemDefinitionError, match=r"connections\[0\].*'z'"):
            SystemOfGadgets.from_dict(data)

    def test_bad_state(self):
        data = toggles_in_series().to_dict()
        data["gadgets"][0]["state"] = "7"
        with pytest.raises(SystemDefinitionError, match=r"gadgets\[0\]"):
            SystemOfGadgets.from_dict(data)

    def test_load_reports_path(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(Exception, match="broken.json"):
            SystemOfGadgets.load(path)
