"""
Breaking ties with coin flips
=============================

Anonymous agents draw random IDs each phase. Equal neighbouring IDs make
semi-leaders, which tour the ring to settle the tie. One-bit IDs force
that path often.
"""

import statistics

from ringgather.instances import random_instance
from ringgather.scheduler import STRATEGIES, simulate
from ringgather.verifier import check_partial_gathering, semi_circulations

for bits in (None, 1):
    semi, tours, moves = 0, [], []
    for seed in range(200):
        spec = random_instance("random", 64, 8, 8, seed, STRATEGIES[seed % 4], id_bits_override=bits)
        result = simulate(spec, record_trace=False)
        assert check_partial_gathering(result.final, 8, result.outcome).kind == "Gathered"
        semi += result.semi_seen
        tours.append(semi_circulations(result.final))
        moves.append(result.total_moves)
    label = "default ID length" if bits is None else f"{bits}-bit IDs"
    print(f"{label}: semi-leaders in {semi}/200 runs, up to {max(tours)} tours, "
          f"median {statistics.median(moves):g} moves")
