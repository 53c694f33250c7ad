"""Retractions and covers used to reduce general exponents to Delta[1].

Delta[n] is a retract of the cube Delta[1]^n, and every finite K receives a
degreewise surjection from a coproduct of standard simplices.  Both make the
induced restriction maps on mapping sets injective.
"""
from __future__ import annotations

from .constructors import (
    Poset,
    coproduct,
    nerve_map,
    poset_nerve,
    product,
    product_map,
    standard_simplex,
)
from .mapping import iter_maps
from .operators import Operator
from .sset import SMap, SSet, Simplex, identity_map


def cube(n: int) -> SSet:
    """Delta[1]^n as the nerve of [1]^n; vertices are named like '1.1.0'."""
    if n < 1:
        raise ValueError("cube needs n >= 1")
    return poset_nerve(Poset.grid(*[1] * n), f"Delta[1]^{n}")


def _corner(n: int, j: int) -> str:
    return ".".join(["1"] * j + ["0"] * (n - j))


def cube_inclusion(n: int) -> SMap:
    """i : Delta[n] -> Delta[1]^n, j |-> (1, .., 1, 0, .., 0) with j ones."""
    return nerve_map(standard_simplex(n), cube(n), {str(j): _corner(n, j) for j in range(n + 1)})


def cube_retraction(n: int) -> SMap:
    """r : Delta[1]^n -> Delta[n], sending a corner to the last position holding a 1."""
    C = cube(n)
    vmap = {}
    for v in C.vertex_ids():
        bits = v.split(".")
        vmap[v] = str(max((p + 1 for p, b in enumerate(bits) if b == "1"), default=0))
    return nerve_map(C, standard_simplex(n), vmap)


def retraction_holds(n: int) -> bool:
    i, r = cube_inclusion(n), cube_retraction(n)
    return i.then(r) == identity_map(i.source)


def simplex_cover(K: SSet) -> SMap:
    """s : L -> K from the coproduct of one Delta[dim g] per generator g of K.

    The generators are the cells that are not a face of another cell.
    """
    used = {f.cell for c in K for f in c.faces}
    gens = [cid for cid in K.order if cid not in used]
    parts = [standard_simplex(K.cells[g].dim) for g in gens]
    L = coproduct(parts)
    assignment = {}
    for k, g in enumerate(gens):
        d = K.cells[g].dim
        for cid in parts[k].order:
            verts = [int(v) for v in cid.split("_")]
            assignment[f"{k}:{cid}"] = K.act(K.simplex(g), Operator(verts, d))
    L.name = "L"
    return SMap(L, K, assignment)


def restriction_injective(s: SMap, X: SSet, m: int) -> bool:
    """Is s^* : (X^K)_m -> (X^L)_m injective, for s : L -> K?

    The m-simplices of X^K are the maps Delta[m] x K -> X; s^* precomposes
    with 1 x s.
    """
    dm = standard_simplex(m)
    PK, PL = product(dm, s.target), product(dm, s.source)
    along = product_map(PL, PK, identity_map(dm), s)
    seen = set()
    count = 0
    for values in iter_maps(PK, X):
        f = SMap(PK, X, values, validate=False)
        seen.add(along.then(f).values())
        count += 1
    return len(seen) == count


def level_count(K: SSet, X: SSet, m: int) -> int:
    """The number of m-simplices of X^K."""
    return sum(1 for _ in iter_maps(product(standard_simplex(m), K), X))


def vertex_simplex(X: SSet, cid: str) -> Simplex:
    return X.simplex(cid)
