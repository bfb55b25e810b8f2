"""
When symmetry wins
==================

Anonymous agents that know k can gather deterministically unless their
placement repeats with a period shorter than g.
"""

from ringgather import instance_from_gaps, is_solvable, simulate
from ringgather.verifier import check_partial_gathering

# Each agent measures the gaps to its successors. All of them agree on the
# least rotation of that sequence, and on its period.
for gaps, g in [((1, 3, 1, 3), 2), ((2, 2, 2, 2), 2), ((1, 2, 5), 3), ((1, 3, 1, 3), 3)]:
    print(gaps, f"g={g}")
    print("  " + is_solvable(gaps, g).render().replace("\n", "\n  "))

# Solvable: agents walk to the nearest start whose gap sequence is the least
# rotation, so each group holds exactly one period's worth of agents.
result = simulate(instance_from_gaps((1, 3, 1, 3), 2))
print("(1,3,1,3):", check_partial_gathering(result.final, 2).group_sizes)

# Unsolvable: every agent tours once and stops where it began.
spec = instance_from_gaps((2, 2, 2, 2), 2)
result = simulate(spec)
print("(2,2,2,2):", check_partial_gathering(result.final, 2).kind,
      "after", [a.moves_made for a in result.final.agents], "moves")
