"""
Checking that one gadget simulates another
==========================================

A construction wires several gadgets together and exposes some locations.
Exploring every walk between those locations gives the construction's
observable behavior, which is compared against a target gadget up to
bisimulation.
"""

# %%
# The shipped constructions live in JSON files.  Two AP2Ts and a junction
# behave exactly like a crossing 2-toggle.
from gadgetlab.simulation import check_equivalence, induce, shipped_claims, verify_catalog

claims = {c.name: c for c in shipped_claims()}
claim = claims["ap2t-to-c2t"]
print(claim.description)
verdict = check_equivalence(claim)
print("equivalent:", verdict.equivalent, "states:", verdict.correspondence)

# %%
# The induced gadget lists the traversals seen from outside.
ind = induce(claim.construction, claim.ordered_externals())
g = ind.to_gadget("observed")
for (s, a), (t, b) in sorted(g.transitions):
    print(f"  class {s} at {g.locations[a]} -> class {t} at {g.locations[b]}")

# %%
# Internal states may collapse: the NTL construction has four outside
# configurations but only two behaviors.
ntl = induce(claims["2t-to-ntl"].construction)
print("configurations:", len(ntl.configs), "classes:", ntl.num_classes)

# %%
# Miswire the construction and the checker explains where it breaks.
from gadgetlab.system import SystemOfGadgets

data = claim.construction.to_dict()
data["connections"][0][0] = ["top", "c"]
data["externals"]["C"] = ["top", "d"]
claim.construction = SystemOfGadgets.from_dict(data)
bad = check_equivalence(claim)
print("equivalent:", bad.equivalent)
print("counterexample:", bad.counterexample)

# %%
# The whole catalog verifies in well under a second.
for r in verify_catalog():
    print(f"{r.name:20} ok={r.ok} classes={r.classes} explored={r.explored}")
