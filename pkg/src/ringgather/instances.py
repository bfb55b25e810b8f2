"""Seeded instance generators for sweeps, tests and demos."""

from __future__ import annotations

import random

from .algo_anon import period
from .ring_model import InstanceSpec, InvalidInstance, instance_from_gaps

ID_SPACE = 2**16


def random_instance(model: str, n: int, k: int, g: int, seed: int,
                    scheduler: str = "round_robin", **kw) -> InstanceSpec:
    """Distinct random positions (and, for ``distinct``, random distinct IDs)."""
    if not 1 <= k <= n:
        raise InvalidInstance(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = random.Random(seed)
    pos = sorted(rng.sample(range(n), k))
    if model == "distinct":
        ids = rng.sample(range(1, ID_SPACE), k)
    else:
        ids = [None] * k
    return InstanceSpec(n=n, model=model, agents=list(zip(pos, ids)), g=g, seed=seed,
                        scheduler=scheduler, **kw)


def evenly_spaced(model: str, c: int, k: int, g: int, seed: int = 0,
                  scheduler: str = "round_robin") -> InstanceSpec:
    """``k`` agents every ``c`` nodes on a ring of ``n = c*k`` nodes."""
    n = c * k
    ids = list(range(1, k + 1)) if model == "distinct" else [None] * k
    if model == "distinct":
        random.Random(seed).shuffle(ids)
    return InstanceSpec(n=n, model=model, agents=[(i * c, ids[i]) for i in range(k)], g=g,
                        seed=seed, scheduler=scheduler)


def random_gaps(k: int, n: int, rng: random.Random) -> tuple:
    """Uniform composition of ``n`` into ``k`` positive parts."""
    cuts = sorted(rng.sample(range(1, n), k - 1))
    return tuple(b - a for a, b in zip([0] + cuts, cuts + [n]))


def periodic_gaps(block: tuple, repeats: int) -> tuple:
    return tuple(block) * repeats


def random_solvable_anon(rng: random.Random, max_n: int = 256, max_k: int = 32) -> InstanceSpec:
    """Anonymous instance whose gap sequence has period at least ``g``.

    Half of the draws are built from a repeated random block so that
    multi-group outcomes are exercised, not only single-group ones.
    """
    while True:
        if rng.random() < 0.5:
            p = rng.randint(2, min(max_k, 16))
            reps = rng.randint(1, max(1, min(max_k // p, max_n // p)))
            k = p * reps
            block_n = rng.randint(p, max_n // reps)
            gaps = periodic_gaps(random_gaps(p, block_n, rng), reps)
        else:
            k = rng.randint(2, max_k)
            n = rng.randint(k, max_n)
            gaps = random_gaps(k, n, rng)
        p = period(gaps)
        if p < 2:
            continue
        g = rng.randint(2, p)
        return instance_from_gaps(gaps, g, model="anon", start=rng.randrange(sum(gaps)),
                                  seed=rng.getrandbits(32))


def random_unsolvable_anon(rng: random.Random, max_n: int = 256, max_k: int = 32) -> InstanceSpec:
    """Anonymous instance whose gap sequence has period below ``g``."""
    while True:
        p = rng.randint(1, 8)
        reps = rng.randint(2, max_k // p)
        k = p * reps
        if k < p + 1:
            continue
        block_n = rng.randint(p, max_n // reps)
        gaps = periodic_gaps(random_gaps(p, block_n, rng) if p > 1 else (block_n,), reps)
        if period(gaps) != p:
            continue
        g = rng.randint(p + 1, k)
        return instance_from_gaps(gaps, g, model="anon", start=rng.randrange(sum(gaps)),
                                  seed=rng.getrandbits(32))
