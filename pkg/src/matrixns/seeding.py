"""Deterministic, splittable random streams.

All randomness in the package flows through numpy ``SeedSequence`` objects.
The scheme is hierarchical: a child stream for item ``i`` of a parent with
spawn key ``k`` uses spawn key ``k + (i,)``. Because the key fully determines
the stream, results are reproducible regardless of execution order or worker
count. Concretely:

* benchmark replicate ``i``        -> spawn key ``(i,)``
* row model rng inside replicate   -> ``(i, 0)``
* column model rng                 -> ``(i, 1)``
* sampling rng                     -> ``(i, 2)``
* observation ``j`` of a sampler   -> sampling key + ``(j,)``
"""

from __future__ import annotations

import numpy as np

RngLike = "int | np.random.SeedSequence | np.random.Generator"


def as_seed_sequence(rng) -> np.random.SeedSequence:
    """Coerce an int or SeedSequence into a SeedSequence.

    Generators are rejected here because their entropy cannot be re-split
    by key; use :func:`as_generator` where a flat stream is acceptable.
    """
    if isinstance(rng, np.random.SeedSequence):
        return rng
    if isinstance(rng, (int, np.integer)):
        return np.random.SeedSequence(int(rng))
    raise TypeError(f"expected int or SeedSequence, got {type(rng).__name__}")


def child(seq: np.random.SeedSequence, *key: int) -> np.random.SeedSequence:
    """Child SeedSequence with `key` appended to the parent's spawn key."""
    return np.random.SeedSequence(entropy=seq.entropy, spawn_key=tuple(seq.spawn_key) + key)


def as_generator(rng) -> np.random.Generator:
    """Coerce an int, SeedSequence, or Generator into a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(as_seed_sequence(rng))
