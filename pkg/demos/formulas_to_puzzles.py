"""
Compiling quantified formulas into puzzles
==========================================

Every quantified 3-CNF formula becomes a puzzle over 2-toggle-locks,
junctions and crossovers that is solvable exactly when the formula is true.
"""

# %%
# Formulas use a QDIMACS-like text format.
from gadgetlab.reduction import QBFInstance, qbf_oracle, reduce_3qsat, substitute_gadgets
from gadgetlab.solver import solve_bfs

q = QBFInstance.parse("q a 2 e 1\n1 2 0\n-1 -2 0\n")
print(q, "is", qbf_oracle(q))

# %%
# The puzzle walks the robot through the clauses once per assignment of the
# universal variable, re-choosing the existential each time.
out = reduce_3qsat(q)
print(out.stats)
sol = solve_bfs(out.puzzle)
print("solvable:", sol.solvable, "in", len(sol.witness), "moves")

# %%
# Swapping the quantifiers makes the formula false, and the puzzle with it.
q2 = QBFInstance.parse("q e 1 a 2\n1 2 0\n-1 -2 0\n")
print(q2, "is", qbf_oracle(q2), "/ solvable:", solve_bfs(reduce_3qsat(q2).puzzle).solvable)

# %%
# Each gadget can then be replaced by its simulation in AP2Ts.  The verdict
# stays the same while the puzzle grows by a constant factor per gadget.
small = QBFInstance.parse("q a 1\n1 0\n")
out = reduce_3qsat(small)
rewritten = substitute_gadgets(out, "AP2T")
print(small, "->", len(out.puzzle.system.instances), "gadgets ->",
      len(rewritten.system.instances), "after rewriting")
print(solve_bfs(out.puzzle).solvable, solve_bfs(rewritten).solvable)
