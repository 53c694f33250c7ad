"""Non-singularity, the forced degeneracy factorization, and desingularization.

Desingularization repeatedly picks a cell whose vertices collide at positions
k < l and identifies it with the degeneracy of one of its faces along
sigma_k ... sigma_{l-1}.  Any map into a non-singular set is forced to make
that identification, so the loop ends at the universal non-singular quotient.
"""
from __future__ import annotations

import random
from typing import Callable, NamedTuple

from .constructors import ProductSSet, product, quotient, standard_simplex, subset_generated
from .operators import Operator, all_sections, section_of
from .sset import SMap, SSet, SSetError, Simplex, descend, identity_map, ident, is_iso


class PreconditionError(ValueError):
    """An operation was called outside its stated hypotheses."""


class InvariantError(AssertionError):
    """A check that must hold by the mathematics failed; this is a bug report."""


class Witness(NamedTuple):
    cell: str
    k: int
    l: int


class Check(NamedTuple):
    ok: bool
    witness: Witness | None = None

    def __bool__(self):
        return self.ok


def collisions(X: SSet, cid: str) -> list:
    """All pairs (k, l), k < l, of positions where the vertices of a cell agree."""
    vs = X.vertices(X.simplex(cid))
    return [(k, l) for k in range(len(vs)) for l in range(k + 1, len(vs)) if vs[k] == vs[l]]


def singular_cells(X: SSet) -> list:
    """Every witness (cell, k, l), lowest dimension first, then cell id, then (k, l)."""
    out = []
    for cid in X.order:
        for k, l in collisions(X, cid):
            out.append(Witness(cid, k, l))
    return out


def is_nonsingular(X: SSet) -> Check:
    for cid in X.order:
        pairs = collisions(X, cid)
        if pairs:
            return Check(False, Witness(cid, *pairs[0]))
    return Check(True)


def collapse_operator(n: int, k: int, l: int) -> Operator:
    """sigma_k ... sigma_{l-1} : [n] ->> [n - (l - k)], merging positions k..l."""
    if not 0 <= k < l <= n:
        raise PreconditionError(f"need 0 <= k < l <= n, got k={k}, l={l}, n={n}")
    imgs = [i if i <= k else (k if i <= l else i - (l - k)) for i in range(n + 1)]
    return Operator(imgs, n - (l - k))


_NONSINGULAR_CACHE = {}


def _ambient_nonsingular(X: SSet) -> bool:
    key = id(X)
    hit = _NONSINGULAR_CACHE.get(key)
    if hit is None or hit[0] is not X:
        hit = (X, bool(is_nonsingular(X)))
        _NONSINGULAR_CACHE[key] = hit
    return hit[1]


def factor_through_degeneracy(
    X: SSet, x: Simplex, k: int, l: int, policy: str = "minimal", check_ambient: bool = True
) -> Simplex:
    """The simplex y with ``x = y . sigma_k ... sigma_{l-1}``.

    Requires ``x.epsilon_k = x.epsilon_l`` in a non-singular X.
    """
    n = x.dim
    if not 0 <= k < l <= n:
        raise PreconditionError(f"need 0 <= k < l <= {n}, got ({k}, {l})")
    if X.act(x, (k,)) != X.act(x, (l,)):
        raise PreconditionError(f"vertices {k} and {l} of {x!r} differ")
    if check_ambient and not _ambient_nonsingular(X):
        raise PreconditionError("the ambient simplicial set is singular")
    rho = collapse_operator(n, k, l)
    y = X.act(x, section_of(rho, policy))
    if X.act(y, rho) != x:
        raise InvariantError(f"{x!r} does not recompose through sigma_{k}..sigma_{l - 1}")
    return y


def factorizations_agree(X: SSet, x: Simplex, k: int, l: int) -> bool:
    """Every section of sigma_k ... sigma_{l-1} yields the same factor."""
    rho = collapse_operator(x.dim, k, l)
    found = {X.act(x, mu) for mu in all_sections(rho)}
    return len(found) == 1 and X.act(next(iter(found)), rho) == x


# -- desingularization ---------------------------------------------------------


class DesingResult(NamedTuple):
    reflection: SSet
    unit: SMap
    steps: list

    def factor(self, h: SMap) -> SMap:
        """The map ``g : DX -> Y`` with ``g o unit = h``, for non-singular Y."""
        return descend(self.unit, h)


def _select(witnesses: list, how, rng) -> Witness:
    if callable(how):
        return how(witnesses)
    if how == "canonical":
        return witnesses[0]
    if how == "reverse":
        return witnesses[-1]
    if how == "random":
        return rng.choice(witnesses)
    raise ValueError(f"unknown witness selection {how!r}")


def desingularize(X: SSet, select: str | Callable = "canonical", seed: int = 0) -> DesingResult:
    """The reflection DX of X into non-singular simplicial sets, with its unit."""
    rng = random.Random(seed)
    current = X
    unit = identity_map(X)
    steps = []
    while True:
        witnesses = singular_cells(current)
        if not witnesses:
            break
        w = _select(witnesses, select, rng)
        x = current.simplex(w.cell)
        rho = collapse_operator(x.dim, w.k, w.l)
        target = current.act(current.act(x, section_of(rho)), rho)
        before = len(current)
        current, proj = quotient(current, [(x, target)])
        if len(current) >= before:
            raise InvariantError(f"collapsing {w} did not reduce the cell count")
        unit = unit.then(proj)
        steps.append((w.cell, w.k, w.l))
    if steps:
        current.name = f"D({X.name})" if X.name else "D(X)"
    return DesingResult(current, unit, steps)


# -- products --------------------------------------------------------------------


class Comparison(NamedTuple):
    a: SMap
    iso: bool
    surjective: bool
    source: DesingResult
    left: DesingResult
    right: DesingResult


def product_comparison(X: SSet, Y: SSet) -> Comparison:
    """The canonical map a : D(X x Y) -> DX x DY induced by the two projections."""
    XY = product(X, Y)
    dxy = desingularize(XY)
    dx, dy = desingularize(X), desingularize(Y)
    target = product(dx.reflection, dy.reflection)
    h = target.pairing(XY.projection(0).then(dx.unit), XY.projection(1).then(dy.unit))
    a = dxy.factor(h)
    composite = dxy.unit.then(a)
    if composite != h:
        raise InvariantError("a o eta differs from eta x eta")
    eta_pair = _eta_product(XY, target, dx.unit, dy.unit)
    if composite != eta_pair:
        raise InvariantError("the pairing of the units differs from eta_X x eta_Y")
    surjective = a.is_degreewise_surjective(max(target.dim, 0) + 1)
    return Comparison(a, is_iso(a), surjective, dxy, dx, dy)


def _eta_product(XY: ProductSSet, target: ProductSSet, f: SMap, g: SMap) -> SMap:
    from .constructors import product_map

    return product_map(XY, target, f, g)


# -- equalizers ----------------------------------------------------------------


def equalizer(f: SMap, g: SMap) -> tuple:
    """The largest simplicial subset of the source on which f and g agree, with inclusion."""
    src = f.source
    agree = [cid for cid in src.order if f.assignment[cid] == g.assignment[cid]]
    from .constructors import face_cells

    keep = [cid for cid in agree if face_cells(src, cid) <= set(agree)]
    return subset_generated(src, keep)


class EqualizerReport(NamedTuple):
    quotient_cells: tuple
    dq_cells: tuple
    sset_equalizer_cells: int
    d_of_equalizer_cells: int
    equalizer_of_d_cells: int
    sanity_cells: int
    passed: bool


def equalizer_counterexample() -> EqualizerReport:
    """Two distinct vertices of Delta[2]/delta_1 Delta[1] and their equalizers."""
    from .constructors import collapse_to_point

    d2 = standard_simplex(2)
    Q, _ = collapse_to_point(d2, ["0_2"])
    point = standard_simplex(0)
    verts = Q.vertex_ids()
    f = SMap(point, Q, {"0": Q.simplex(verts[0])})
    g = SMap(point, Q, {"0": Q.simplex(verts[1])})
    eq, _ = equalizer(f, g)
    d_eq = desingularize(eq).reflection
    dq = desingularize(Q)
    df, dg = f.then(dq.unit), g.then(dq.unit)
    eq_d, _ = equalizer(df, dg)
    sanity, _ = equalizer(f, f)
    passed = (
        len(eq) == 0
        and len(d_eq) == 0
        and dq.reflection.counts() == (1,)
        and df == dg
        and len(eq_d) == 1
        and len(sanity) == 1
    )
    return EqualizerReport(
        Q.counts(), dq.reflection.counts(), len(eq), len(d_eq), len(eq_d), len(sanity), passed
    )


# -- colimits ----------------------------------------------------------------------


class PushoutProductReport(NamedTuple):
    comparison: SMap
    iso: bool
    source_counts: tuple
    target_counts: tuple


def pushout_product_comparison(i: SMap, j: SMap, K: SSet) -> PushoutProductReport:
    """Compare (X x K) +_{A x K} (Y x K) with (X +_A Y) x K inside nsSet.

    Pushouts in nsSet are D of the pushouts in sSet.  The comparison is
    induced by the two maps ``inl x 1`` and ``inr x 1``; K must be non-singular.
    """
    from .constructors import copair, product_map, pushout

    if not is_nonsingular(K):
        raise PreconditionError("K must be non-singular")
    A, X, Y = i.source, i.target, j.target
    P, inl, inr = pushout(i, j)
    dP = desingularize(P)
    target = product(dP.reflection, K)
    one = identity_map(K)
    AK, XK, YK = product(A, K), product(X, K), product(Y, K)
    S, sl, sr = pushout(product_map(AK, XK, i, one), product_map(AK, YK, j, one))
    f = product_map(XK, target, inl.then(dP.unit), one)
    g = product_map(YK, target, inr.then(dP.unit), one)
    c = copair(sl, sr, f, g)
    dS = desingularize(S)
    a = dS.factor(c)
    return PushoutProductReport(a, is_iso(a), dS.reflection.counts(), target.counts())
