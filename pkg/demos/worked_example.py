"""
Eight agents, two leaders
=========================

Eight agents with IDs 7, 1, 8, 3, 4, 2, 6, 5 sit on consecutive nodes of
an eight-node ring and want to gather in groups of at least three.
"""

from ringgather import InstanceSpec, check_partial_gathering, simulate

spec = InstanceSpec(n=8, model="distinct", agents=list(enumerate((7, 1, 8, 3, 4, 2, 6, 5))),
                    g=3, scheduler="synchronous")
result = simulate(spec)

# Two election phases are enough for g = 3. The phase-2 marks show which
# IDs survived phase 1: each survivor campaigns with the middle ID it saw.
phase2 = [e.detail["id"] for e in result.trace.events
          if e.action == "write" and e.detail.get("phase") == 2]
print("IDs campaigning in phase 2:", sorted(phase2))

# the survivors of phase 2 are the leaders
for a in result.final.agents:
    if a.elected == "leader":
        print(f"agent {a.index} (ID {a.regs.id}) leads, campaigning as {a.regs.id1}")

# Each leader marks every third inactive node behind it; inactive agents
# walk to the nearest mark.
verdict = check_partial_gathering(result.final, spec.g, result.outcome)
print(verdict.kind, "with groups", verdict.group_sizes)
print("moves by role:", result.move_breakdown)
