"""The fixed test corpus of small simplicial sets.

Everything is built programmatically, so the verification suite needs no data
files.  Random quotients use fixed seeds and are reproducible.
"""
from __future__ import annotations

import random
from functools import lru_cache

from .constructors import Poset, boundary, collapse_to_point, poset_nerve, quotient, standard_simplex
from .sset import SSet, Simplex

RANDOM_SEEDS = (11, 23, 47)


def q_example() -> SSet:
    """Delta[2] with the edge 0_2 collapsed to a vertex."""
    Q, _ = collapse_to_point(standard_simplex(2), ["0_2"])
    Q.name = "Q"
    return Q


def circle() -> SSet:
    """Delta[1] with both endpoints identified."""
    S, _ = collapse_to_point(standard_simplex(1), ["0", "1"])
    S.name = "Delta[1]/dDelta[1]"
    return S


def random_quotient(seed: int) -> SSet:
    """A quotient of a small complex by one or two random same-degree identifications."""
    rng = random.Random(seed)
    bases = [standard_simplex(2), poset_nerve(Poset.grid(1, 1), "N11"), boundary(3)]
    X = bases[rng.randrange(len(bases))]
    pairs = []
    for _ in range(rng.randint(1, 2)):
        d = rng.randint(0, 1)
        cells = [c.id for c in X if c.dim == d]
        a, b = rng.sample(cells, 2)
        pairs.append((X.simplex(a), X.simplex(b)))
    Q, _ = quotient(X, pairs)
    Q.name = f"R{seed}"
    return Q


@lru_cache(maxsize=None)
def nonsingular_corpus() -> tuple:
    out = [standard_simplex(n) for n in range(4)]
    out += [boundary(2), boundary(3)]
    out += [poset_nerve(Poset.grid(1, 1), "N11"), poset_nerve(Poset.grid(2, 1), "N21")]
    return tuple(out)


@lru_cache(maxsize=None)
def quotient_corpus() -> tuple:
    return (q_example(), circle()) + tuple(random_quotient(s) for s in RANDOM_SEEDS)


def corpus() -> tuple:
    return nonsingular_corpus() + quotient_corpus()


def small(sets, max_cells: int = 12) -> list:
    return [X for X in sets if len(X) <= max_cells]


def by_name(name: str) -> SSet:
    for X in corpus():
        if X.name == name:
            return X
    raise KeyError(name)


def vertex_simplex(X: SSet, k: int) -> Simplex:
    return X.simplex(X.vertex_ids()[k])
