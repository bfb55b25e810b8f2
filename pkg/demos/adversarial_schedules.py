"""
Fair adversaries
================

The same instance under four fair schedulers, then an exhaustive look at
a two-agent ring where the printed marking order livelocks.
"""

from ringgather import InstanceSpec, explore_bounded
from ringgather.instances import random_instance
from ringgather.scheduler import STRATEGIES, simulate
from ringgather.verifier import check_partial_gathering

# The outcome is the same under every schedule; only the step count changes.
for kind in STRATEGIES:
    spec = random_instance("distinct", 64, 16, 4, seed=1, scheduler=kind)
    result = simulate(spec, record_trace=False)
    verdict = check_partial_gathering(result.final, spec.g, result.outcome)
    print(f"{kind:>13}: {verdict.kind}, {result.final.step_count} steps, "
          f"{result.total_moves} moves, groups {verdict.group_sizes}")

# Every interleaving of two agents on four nodes, with both marking orders.
spec = InstanceSpec(n=4, model="distinct", agents=[(0, 1), (2, 2)], g=2)
for literal in (False, True):
    report = explore_bounded(spec, paper_literal_marking=literal)
    print("test-then-increment" if literal else "increment-then-test",
          f"{report.states} states:", sorted(report.labels))
    if "NonTermination" in report.labels:
        print("  witness schedule:", report.counterexamples["NonTermination"])
