"""Simplicial maps, the mapping set X^K, and the rigidity of prisms.

An n-simplex of X^K is a map Delta[n] x K -> X.  Such a map is stored by its
values on the generating cells of Delta[n] x K (the cells that are not a face
of anything); every other cell is reached from a generator by an operator.
"""
from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np
from typing import Iterator, NamedTuple

from .constructors import (
    ProductSSet,
    gamma_cell,
    gamma_vertices,
    operator_simplex,
    product,
    simplex_operator,
    standard_simplex,
)
from .nonsingular import (
    InvariantError,
    PreconditionError,
    factor_through_degeneracy,
    is_nonsingular,
)
from .operators import Operator
from .sset import (
    Levels,
    SMap,
    SSet,
    SSetError,
    Simplex,
    ez_decompose,
    ident,
    presentation_from_levels,
    surjection_tuples,
)


class CapOverflow(RuntimeError):
    """A non-degenerate simplex exists one degree above the exponential's cap."""


class BudgetExceeded(RuntimeError):
    """Building an exponential needed more level elements than allowed."""


# -- enumeration -----------------------------------------------------------------


def placement_order(A: SSet) -> list:
    """Cells of A ordered so every cell follows its faces, vertex by vertex.

    Each cell is keyed by the latest of its vertices in the canonical vertex
    order, then by dimension, which interleaves low and high cells and lets
    face constraints prune the search early.
    """
    vpos = {v: k for k, v in enumerate(A.vertex_ids())}
    key = {}
    for cid in A.order:
        key[cid] = (max(vpos[v] for v in A.vertex_cells(cid)), A.cells[cid].dim, A.index[cid])
    return sorted(A.order, key=key.__getitem__)


def iter_assignments(A: SSet, X: SSet, fixed: dict | None = None) -> Iterator[tuple]:
    """Yield the value tuples (aligned with ``A.order``) of all maps A -> X.

    ``fixed`` pins the images of some cells in advance.
    """
    order = placement_order(A)
    fixed = fixed or {}
    cells = [A.cells[cid] for cid in order]
    pos = {cid: k for k, cid in enumerate(order)}
    face_refs = [[(pos[f.cell], f.deg) for f in c.faces] for c in cells]
    vertex_level = X.level(0)
    index = {}
    out_pos = [pos[cid] for cid in A.order]
    values = [None] * len(cells)
    act = X.act
    depth = len(cells)

    def candidates(k):
        c = cells[k]
        if c.dim == 0:
            pool = vertex_level
        else:
            req = []
            for p, deg in face_refs[k]:
                v = values[p]
                req.append(v if len(v.deg) == len(deg) and deg[-1] == len(deg) - 1 else act(v, deg))
            table = index.get(c.dim)
            if table is None:
                table = index[c.dim] = X.face_index(c.dim)
            pool = table.get(tuple(req), ())
        pin = fixed.get(c.id)
        if pin is not None:
            return [pin] if pin in pool else []
        return pool

    if depth == 0:
        yield ()
        return
    stack = [iter(candidates(0))]
    while stack:
        k = len(stack) - 1
        nxt = next(stack[k], None)
        if nxt is None:
            stack.pop()
            continue
        values[k] = nxt
        if k + 1 == depth:
            yield tuple(values[p] for p in out_pos)
        else:
            stack.append(iter(candidates(k + 1)))


def map_plan(A: SSet):
    """A GeneratorPlan for non-singular A, else None (use :func:`iter_assignments`)."""
    return GeneratorPlan.from_sset(A) if is_nonsingular(A) else None


def search_plan(A: SSet):
    """The generator plan for A, whether or not A is non-singular."""
    return map_plan(A) or SingularPlan(A)


def iter_maps(A: SSet, X: SSet) -> Iterator[dict]:
    """Every map A -> X as a full assignment dictionary."""
    plan = search_plan(A)
    for vals in plan.assignments(X):
        yield plan.expand(X, vals)


def enumerate_maps(A: SSet, X: SSet) -> list:
    """All simplicial maps A -> X, sorted canonically by their value tuples."""
    maps = [SMap(A, X, a, validate=False) for a in iter_maps(A, X)]
    maps.sort()
    return maps


def count_maps(A: SSet, X: SSet) -> int:
    return sum(1 for _ in search_plan(A).assignments(X))


def _injections(d: int) -> Iterator[tuple]:
    for k in range(d + 1):
        yield from combinations(range(d + 1), k + 1)


class ActCache:
    """Memoized ``X.act`` keyed by operator images, then simplex."""

    def __init__(self, X: SSet):
        self.X = X
        self.tables = {}

    def __call__(self, x: Simplex, beta: tuple) -> Simplex:
        t = self.tables.get(beta)
        if t is None:
            t = self.tables[beta] = {}
        r = t.get(x)
        if r is None:
            r = t[x] = self.X.act(x, beta)
        return r


class GeneratorPlan:
    """Search plan for maps out of a non-singular A, by their values on generators.

    The generators of A are the cells that are not a face of anything.  In a
    non-singular set every face of a cell is a cell reached by exactly one
    face operator, so a choice of generator values defines a map iff any two
    generators agree on the maximal cells of their overlap.  Generators are
    placed greedily, each next to the largest overlap with those placed.

    ``steps`` lists (generator, dimension, checks); a check (mu, j, nu) asks
    that the new value restricted along mu equals the value of generator j
    restricted along nu.
    """

    def __init__(self, dims: list, steps: list, routes: list | None = None):
        self.dims = dims
        self.steps = steps
        self.routes = routes

    @classmethod
    def from_sset(cls, A: SSet) -> "GeneratorPlan":
        used = set()
        for c in A:
            for f in c.faces:
                used.add(f.cell)
        gens = [cid for cid in A.order if cid not in used]
        routes = []
        for g in gens:
            d = A.cells[g].dim
            x = A.simplex(g)
            r = {}
            for mu in _injections(d):
                y = A.act(x, mu)
                if not y.is_nondegenerate() or y.cell in r:
                    raise PreconditionError(f"A is singular at the generator {g!r}")
                r[y.cell] = mu
            routes.append(r)
        remaining = list(range(len(gens)))
        owner = {}
        steps = []
        while remaining:
            best = max(remaining, key=lambda i: (sum(1 for c in routes[i] if c in owner), -i))
            remaining.remove(best)
            overlap = [c for c in routes[best] if c in owner]
            sets = {c: set(routes[best][c]) for c in overlap}
            maximal = [c for c in overlap if not any(sets[c] < sets[o] for o in overlap)]
            maximal.sort(key=lambda c: -len(sets[c]))
            checks = tuple((routes[best][c], owner[c], routes[owner[c]][c]) for c in maximal)
            steps.append((best, A.cells[gens[best]].dim, checks))
            for c in routes[best]:
                owner.setdefault(c, best)
        plan = cls([A.cells[g].dim for g in gens], steps, routes)
        plan.gens = gens
        return plan

    @classmethod
    def from_vertex_tuples(cls, verts: list) -> "GeneratorPlan":
        """Plan for a simplicial complex whose generators have the given vertex tuples.

        The tuples must list distinct vertices in one global order, and every
        vertex subset of a generator must name a single cell.
        """
        sets = [frozenset(v) for v in verts]
        pos = [{v: k for k, v in enumerate(vs)} for vs in verts]
        n = len(verts)
        remaining = set(range(n))
        score = [(0, 0)] * n
        placed = []
        steps = []
        while remaining:
            best = max(remaining, key=lambda i: (score[i], -i))
            remaining.remove(best)
            meets = {}
            for j in placed:
                w = sets[best] & sets[j]
                if w and w not in meets:
                    meets[w] = j
            maximal = [w for w in meets if not any(w < o for o in meets)]
            maximal.sort(key=lambda w: (-len(w), sorted(pos[best][v] for v in w)))
            checks = []
            for w in maximal:
                j = meets[w]
                mu = tuple(sorted(pos[best][v] for v in w))
                nu = tuple(sorted(pos[j][v] for v in w))
                checks.append((mu, j, nu))
            steps.append((best, len(verts[best]) - 1, tuple(checks)))
            placed.append(best)
            for i in remaining:
                k = len(sets[i] & sets[best])
                m, t = score[i]
                score[i] = (max(m, k), t + k)
        return cls([len(v) - 1 for v in verts], steps)

    def assignments(self, X: SSet, act=None) -> Iterator[tuple]:
        """Yield generator value tuples (aligned with the generators) of all maps A -> X."""
        steps = self.steps
        if not steps:
            yield ()
            return
        act = act or ActCache(X)
        groups = {}

        def grouped(d, mu):
            key = (d, mu)
            hit = groups.get(key)
            if hit is None:
                hit = {}
                for x in X.level(d):
                    hit.setdefault(act(x, mu), []).append(x)
                groups[key] = hit
            return hit

        values = [None] * len(self.dims)
        depth = len(steps)

        def candidates(k):
            g, d, checks = steps[k]
            if not checks:
                return iter(X.level(d))
            mu, j, nu = checks[0]
            pool = grouped(d, mu).get(act(values[j], nu), ())
            if len(checks) == 1:
                return iter(pool)
            rest = [(mu2, act(values[j2], nu2)) for mu2, j2, nu2 in checks[1:]]
            return (x for x in pool if all(act(x, m) == v for m, v in rest))

        stack = [candidates(0)]
        while stack:
            k = len(stack) - 1
            nxt = next(stack[k], None)
            if nxt is None:
                stack.pop()
                continue
            values[steps[k][0]] = nxt
            if k + 1 == depth:
                yield tuple(values)
            else:
                stack.append(candidates(k + 1))

    def expand(self, X: SSet, vals: tuple) -> dict:
        out = {}
        for g, r in enumerate(self.routes):
            for c, mu in r.items():
                if c not in out:
                    out[c] = X.act(vals[g], mu)
        return out


class SingularPlan:
    """Search plan for maps out of an arbitrary A, by their values on generators.

    Every cell c of A is g.mu for some generator g and face operator mu; one
    such route is fixed as the owner of c.  Generator values define a map iff
    for every generator g and face operator mu, with g.mu = c.sigma in normal
    form, the value of g along mu is the owner's value on c degenerated by
    sigma.  A check against an earlier generator implies the checks on all
    faces of mu, so those are skipped.
    """

    def __init__(self, A: SSet):
        used = {f.cell for c in A for f in c.faces}
        self.gens = [cid for cid in A.order if cid not in used]
        self.dims = [A.cells[g].dim for g in self.gens]
        faces = []
        for g, d in zip(self.gens, self.dims):
            x = A.simplex(g)
            lst = []
            for mu in _injections(d):
                y = A.act(x, mu)
                lst.append((mu, y.cell, y.deg))
            lst.sort(key=lambda t: (-len(t[0]), t[0]))
            faces.append(lst)
        cells = [{c for _, c, _ in f} for f in faces]
        owner = {}
        steps = []
        remaining = list(range(len(self.gens)))
        while remaining:
            b = max(remaining, key=lambda i: (len(cells[i] & owner.keys()), -i))
            remaining.remove(b)
            for mu, c, sig in faces[b]:
                if c not in owner:
                    sec = []
                    for t, v in enumerate(sig):
                        if len(sec) == v:
                            sec.append(t)
                    owner[c] = (b, tuple(mu[t] for t in sec))
            cross, own, covered = [], [], []
            for mu, c, sig in faces[b]:
                j, route = owner[c]
                beta = tuple(route[v] for v in sig)
                if j == b:
                    if beta != mu:
                        own.append((mu, beta))
                elif not any(set(mu) <= m for m in covered):
                    cross.append((mu, j, beta))
                    covered.append(set(mu))
            steps.append((b, self.dims[b], tuple(cross), tuple(own)))
        self.steps = steps
        self.owner = owner

    def assignments(self, X: SSet, act=None) -> Iterator[tuple]:
        """Yield generator value tuples (aligned with the generators) of all maps A -> X."""
        steps = self.steps
        if not steps:
            yield ()
            return
        act = act or ActCache(X)
        groups = {}

        def grouped(d, mu):
            hit = groups.get((d, mu))
            if hit is None:
                hit = groups[d, mu] = {}
                for x in X.level(d):
                    hit.setdefault(act(x, mu), []).append(x)
            return hit

        values = [None] * len(self.dims)
        depth = len(steps)

        def candidates(k):
            _, d, cross, own = steps[k]
            if cross:
                mu, j, beta = cross[0]
                pool = grouped(d, mu).get(act(values[j], beta), ())
                rest = [(m, act(values[j2], b2)) for m, j2, b2 in cross[1:]]
            else:
                pool, rest = X.level(d), []
            if not rest and not own:
                return iter(pool)
            return (
                x for x in pool
                if all(act(x, m) == v for m, v in rest) and all(act(x, m) == act(x, b2) for m, b2 in own)
            )

        stack = [candidates(0)]
        while stack:
            k = len(stack) - 1
            nxt = next(stack[k], None)
            if nxt is None:
                stack.pop()
                continue
            values[steps[k][0]] = nxt
            if k + 1 == depth:
                yield tuple(values)
            else:
                stack.append(candidates(k + 1))

    def expand(self, X: SSet, vals: tuple) -> dict:
        return {c: X.act(vals[j], route) for c, (j, route) in self.owner.items()}


def vertex_order(K: SSet) -> dict | None:
    """Positions of K's vertices in a linear order making K an ordered simplicial complex.

    Returns None unless K is non-singular, its cells are determined by their
    vertex tuples, and the vertex tuples of all cells increase in one order.
    """
    if not is_nonsingular(K):
        return None
    seen = set()
    after = {v: set() for v in K.vertex_ids()}
    for cid in K.order:
        vs = tuple(K.vertex_cells(cid))
        if vs in seen:
            return None
        seen.add(vs)
        for a, b in zip(vs, vs[1:]):
            after[a].add(b)
    order = []
    indeg = {v: 0 for v in after}
    for a in after:
        for b in after[a]:
            indeg[b] += 1
    ready = sorted(v for v, k in indeg.items() if k == 0)
    while ready:
        v = ready.pop(0)
        order.append(v)
        for b in sorted(after[v]):
            indeg[b] -= 1
            if indeg[b] == 0:
                ready.append(b)
    if len(order) != len(after):
        return None
    return {v: k for k, v in enumerate(order)}


def _encode(x: Simplex) -> str:
    if x.deg[-1] == len(x.deg) - 1:
        return x.cell
    return x.cell + "^" + ".".join(map(str, x.deg))


# -- prism-shaped sources ----------------------------------------------------------


class Frame:
    """Delta[n] x K described by its generators, the top cells of the product.

    A map out of Delta[n] x K is stored by its values on the generators.
    When K is an ordered simplicial complex so is the product, and every
    simplex is located inside a generator through its vertex sequence; the
    product itself is then only built on demand.  Otherwise the product is
    built and every cell gets an anchor (generator, face operator).
    """

    def __init__(self, n: int, K: SSet):
        self.n = n
        self.K = K
        self._P = None
        self._located = {}
        self.ordered = vertex_order(K) is not None
        if self.ordered:
            self._init_vertex()
        else:
            self._init_product()
        self.gen_pos = {g: k for k, g in enumerate(self.gens)}

    @property
    def P(self) -> ProductSSet:
        if self._P is None:
            self._P = product(standard_simplex(self.n), self.K)
        return self._P

    def _init_vertex(self):
        n, K = self.n, self.K
        top = "_".join(str(i) for i in range(n + 1))
        used = set()
        for c in K:
            for f in c.faces:
                used.add(f.cell)
        found = []
        for y in K.order:
            if y in used:
                continue
            q = K.cells[y].dim
            vy = K.vertex_cells(y)
            for s in surjection_tuples(n + q, n):
                cs = {i for i in range(n + q) if s[i] == s[i + 1]}
                for t in surjection_tuples(n + q, q):
                    if any(t[i] == t[i + 1] for i in cs):
                        continue
                    x, yy = Simplex(top, s), Simplex(y, t)
                    cid = f"<{_encode(x)}*{_encode(yy)}>"
                    verts = tuple((s[p], vy[t[p]]) for p in range(n + q + 1))
                    found.append((n + q, cid, x, yy, verts))
        found.sort(key=lambda r: (r[0], r[1]))
        self.gens = [r[1] for r in found]
        self.pairs = [(r[2], r[3]) for r in found]
        self.verts = [r[4] for r in found]
        self._pos = [{v: k for k, v in enumerate(vs)} for vs in self.verts]
        self.plan = GeneratorPlan.from_vertex_tuples(self.verts)

    def _init_product(self):
        P = self.P
        used = set()
        for c in P:
            for f in c.faces:
                used.add(f.cell)
        self.gens = [cid for cid in P.order if cid not in used]
        self.pairs = [P.pair_of[g] for g in self.gens]
        anchor = {g: (k, ident(P.cells[g].dim)) for k, g in enumerate(self.gens)}
        # walk down from the generators in decreasing dimension
        for cid in sorted(P.order, key=lambda c: -P.cells[c].dim):
            if cid not in anchor:
                raise SSetError(f"cell {cid!r} of the frame is not below a generator")
            g, beta = anchor[cid]
            c = P.cells[cid]
            for i, f in enumerate(c.faces):
                if f.cell in anchor:
                    continue
                d = c.dim
                delta = [j if j < i else j + 1 for j in range(d)]
                sec = []
                for t, v in enumerate(f.deg):
                    if len(sec) == v:
                        sec.append(t)
                anchor[f.cell] = (g, tuple(beta[delta[s]] for s in sec))
        self.anchor = anchor
        self.plan = map_plan(P)
        self._singular = None

    def assignments(self, X: SSet, act=None) -> Iterator[tuple]:
        """Generator value tuples of all maps Delta[n] x K -> X."""
        if self.plan is not None:
            return self.plan.assignments(X, act)
        if self._singular is None:
            self._singular = SingularPlan(self.P)
        return self._singular.assignments(X, act)

    def locate(self, seq: tuple) -> tuple:
        """(generator, operator) reaching the simplex with vertex sequence ``seq``."""
        hit = self._located.get(seq)
        if hit is None:
            for k, pos in enumerate(self._pos):
                if all(v in pos for v in seq):
                    hit = (k, tuple(pos[v] for v in seq))
                    break
            else:
                raise SSetError(f"no simplex of the frame has vertices {seq}")
            self._located[seq] = hit
        return hit

    def _route(self, x: Simplex, y: Simplex) -> tuple:
        """(generator, operator) reaching the simplex given by the pair (x, y)."""
        if self.ordered:
            xs = simplex_operator(x, self.n).images
            ys = [v.cell for v in self.K.vertices(y)]
            return self.locate(tuple(zip(xs, ys)))
        z = self.P.normalize(x, y)
        g, beta = self.anchor[z.cell]
        return g, tuple(beta[j] for j in z.deg)

    def value(self, X: SSet, vals: tuple, z: Simplex) -> Simplex:
        """The image of the simplex z of the product under the map with generator values ``vals``."""
        x, y = self.P.pair(z)
        g, beta = self._route(x, y)
        return X.act(vals[g], beta)

    def value_at(self, X: SSet, vals: tuple, x: Simplex, y: Simplex) -> Simplex:
        """The image of the pair (x, y) of equally dimensional simplices."""
        g, beta = self._route(x, y)
        return X.act(vals[g], beta)

    def full_assignment(self, X: SSet, vals: tuple) -> dict:
        return {cid: self.value(X, vals, self.P.simplex(cid)) for cid in self.P.order}

    def to_smap(self, X: SSet, vals: tuple, validate: bool = True) -> SMap:
        return SMap(self.P, X, self.full_assignment(X, vals), validate=validate)

    def from_assignment(self, f: SMap) -> tuple:
        return tuple(f.assignment[g] for g in self.gens)

    def induced(self, alpha: Operator, source: "Frame") -> list:
        """Table for precomposition with alpha x 1 : source -> self.

        Entry k gives (generator index, operator images) so that generator k of
        the source is sent to ``vals[index] . images``.
        """
        table = []
        if self.ordered:
            a = alpha.images
            for vs in source.verts:
                table.append(self.locate(tuple((a[i], v) for i, v in vs)))
            return table
        for x, y in source.pairs:
            op = simplex_operator(x, source.n)
            moved = operator_simplex(Operator([alpha.images[v] for v in op.images], self.n))
            table.append(self._route(moved, y))
        return table


_FRAMES = {}


def frame(n: int, K: SSet) -> Frame:
    key = (n, id(K))
    hit = _FRAMES.get(key)
    if hit is None or hit.K is not K:
        hit = _FRAMES[key] = Frame(n, K)
    return hit


class SimplexTables:
    """X's simplices numbered degree by degree, with operator actions as index arrays.

    Level n lists the cells in order, each followed by its degeneracies in
    sorted order, so a simplex's index is its cell's offset plus the rank of
    its degeneracy operator.  Tables are built one block of equal degeneracy
    at a time.
    """

    def __init__(self, X: SSet):
        self.X = X
        self._index = {}
        self._tables = {}
        self._lists = {}
        self._offsets = {}
        self._ranks = {}
        self._faces = {}
        self._dims = np.array([X.cells[c].dim for c in X.order], dtype=np.int64)
        self._pos = {c: k for k, c in enumerate(X.order)}
        self._by_dim = {}
        for k, d in enumerate(self._dims.tolist()):
            self._by_dim.setdefault(d, []).append(k)
        self._by_dim = {d: np.array(v, dtype=np.int64) for d, v in sorted(self._by_dim.items())}

    def level(self, d: int) -> list:
        return self.X.level(d)

    def index(self, d: int) -> dict:
        hit = self._index.get(d)
        if hit is None:
            hit = self._index[d] = {x: k for k, x in enumerate(self.X.level(d))}
        return hit

    def size(self, d: int) -> int:
        return self.X.level_size(d)

    def _offset(self, n: int) -> np.ndarray:
        hit = self._offsets.get(n)
        if hit is None:
            sizes = np.array([comb(n, d) for d in self._dims.tolist()], dtype=np.int64)
            hit = self._offsets[n] = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
        return hit

    def _rank(self, n: int, k: int) -> dict:
        hit = self._ranks.get((n, k))
        if hit is None:
            hit = self._ranks[n, k] = {s: r for r, s in enumerate(surjection_tuples(n, k))}
        return hit

    def _face(self, k: int, mu: tuple) -> tuple:
        """For the cells of dimension k: position of the cell of each face along mu,
        an index into the list of distinct degeneracies, and that list."""
        hit = self._faces.get((k, mu))
        if hit is None:
            order, cell_face = self.X.order, self.X._cell_face
            pos, degs, ids = [], [], {}
            which = []
            for c in self._by_dim[k].tolist():
                y = cell_face(order[c], mu)
                pos.append(self._pos[y.cell])
                which.append(ids.setdefault(y.deg, len(ids)))
            degs = list(ids)
            hit = self._faces[k, mu] = (np.array(pos, dtype=np.int64), np.array(which, dtype=np.int64), degs)
        return hit

    def table(self, d: int, beta: tuple) -> np.ndarray:
        """Array sending the index of x in level d to the index of x . beta."""
        key = (d, beta)
        hit = self._tables.get(key)
        if hit is None:
            e = len(beta) - 1
            hit = np.empty(self.size(d), dtype=np.int32)
            off_d, off_e = self._offset(d), self._offset(e)
            for k, cells in self._by_dim.items():
                if k > d:
                    break
                base, tgt = off_d[cells], off_e[cells]
                rank_e = self._rank(e, k) if k <= e else None
                for r, s in enumerate(surjection_tuples(d, k)):
                    comp = tuple(s[i] for i in beta)
                    if comp[-1] - comp[0] == k and len(set(comp)) == k + 1:
                        hit[base + r] = tgt + rank_e[comp]
                        continue
                    mu = tuple(sorted(set(comp)))
                    at = {v: i for i, v in enumerate(mu)}
                    rho = tuple(at[v] for v in comp)
                    fpos, which, degs = self._face(k, mu)
                    ranks = np.array([self._rank(e, fd[-1])[tuple(fd[j] for j in rho)] for fd in degs], dtype=np.int64)
                    hit[base + r] = off_e[fpos] + ranks[which]
            self._tables[key] = hit
        return hit

    def pytable(self, d: int, beta: tuple) -> list:
        key = (d, beta)
        hit = self._lists.get(key)
        if hit is None:
            hit = self._lists[key] = self.table(d, beta).tolist()
        return hit


def _last_use(plan: GeneratorPlan, prune: list) -> dict:
    """Step index after which each generator's column is no longer read."""
    last = {}
    for k, (g, d, checks) in enumerate(plan.steps):
        last.setdefault(g, k)
        for _, j, _ in checks:
            last[j] = k
    for k, conds in prune:
        for cond in conds:
            for h in (cond[0], cond[2]):
                last[h] = max(last.get(h, k), k)
    return last


def _join(T: SimplexTables, d: int, checks, read, n_rows: int):
    """Extend n_rows partial rows by one generator of dimension d.

    ``read(j, nu)`` gives, per row, the value of generator j restricted along nu.
    Returns (src, new) with src the parent row of each extended row and new
    the index of the new generator's value.
    """
    c = T.size(d)
    if not checks:
        src = np.repeat(np.arange(n_rows, dtype=np.int64), c)
        new = np.tile(np.arange(c, dtype=np.int32), n_rows)
        return src, new
    mu, j, nu = checks[0]
    key_cand = T.table(d, mu)
    order = np.argsort(key_cand, kind="stable").astype(np.int32)
    per_key = np.bincount(key_cand, minlength=T.size(len(mu) - 1))
    starts = np.cumsum(per_key) - per_key
    key_rows = read(j, nu)
    cnt = per_key[key_rows]
    total = int(cnt.sum())
    src = np.repeat(np.arange(n_rows, dtype=np.int64), cnt)
    offs = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    new = order[starts[key_rows][src] + offs]
    keep = None
    for mu2, j2, nu2 in checks[1:]:
        ok = T.table(d, mu2)[new] == read(j2, nu2)[src]
        keep = ok if keep is None else keep & ok
    if keep is not None:
        src, new = src[keep], new[keep]
    return src, new


def _group_prune(prune: list | None) -> dict:
    out = {}
    for k, conds in prune or []:
        out.setdefault(k, []).append(conds)
    return out


def _prune_mask(groups: list, read, size: int) -> np.ndarray:
    """Rows meeting every equality of at least one condition list."""
    drop = np.zeros(size, dtype=bool)
    for conds in groups:
        eq = np.ones(size, dtype=bool)
        for h, beta, h2, beta2 in conds:
            eq &= read(h, beta) == read(h2, beta2)
        drop |= eq
    return drop


def enumerate_rows(
    plan: GeneratorPlan, T: SimplexTables, budget: int | None = None, prune: list | None = None
) -> np.ndarray:
    """All generator value assignments of a plan, as an integer array.

    Row r, column g holds the index of the value of generator g in
    ``T.level(dim g)``.  The search runs breadth-first: each step joins the
    partial rows with the candidates for the next generator on the primary
    overlap check and filters by the remaining checks.  Only columns that a
    later step reads are carried along; the rest are recovered at the end
    through parent pointers.

    ``prune`` lists (step, conditions): after that step, rows satisfying
    every (h, beta, h2, beta2) equality of some condition list are dropped.
    """
    dims = plan.dims
    prune_at = _group_prune(prune)
    last = _last_use(plan, prune or [])
    cols = {}
    n_rows = 1

    def read(j, nu):
        return T.table(dims[j], nu)[cols[j]]

    parents, values, gens = [], [], []
    for k, (g, d, checks) in enumerate(plan.steps):
        src, new = _join(T, d, checks, read, n_rows)
        cols = {j: a[src] for j, a in cols.items() if last.get(j, -1) >= k}
        cols[g] = new
        if k in prune_at:
            drop = _prune_mask(prune_at[k], read, len(new))
            if drop.any():
                keep = ~drop
                src, new = src[keep], new[keep]
                cols = {j: a[keep] for j, a in cols.items()}
        cols = {j: a for j, a in cols.items() if last.get(j, -1) > k}
        n_rows = len(new)
        if budget is not None and n_rows > budget:
            raise BudgetExceeded(f"more than {budget} partial maps needed")
        parents.append(src)
        values.append(new)
        gens.append(g)
        if n_rows == 0:
            break
    out = np.zeros((n_rows, len(dims)), dtype=np.int32)
    if n_rows == 0 or not plan.steps:
        return out
    idx = np.arange(n_rows, dtype=np.int64)
    for k in range(len(parents) - 1, -1, -1):
        out[:, gens[k]] = values[k][idx]
        idx = parents[k][idx]
    return out


def count_rows(
    plan: GeneratorPlan, T: SimplexTables, budget: int | None = None, prune: list | None = None
) -> int:
    """The number of assignments of a plan, without listing them.

    Only the restrictions (generator, operator) that later steps read are
    carried, and partial rows that agree on all of them are merged with a
    multiplicity.  ``prune`` is as for :func:`enumerate_rows`.
    """
    dims = plan.dims
    prune_at = _group_prune(prune)
    last = {}
    for k, (g, d, checks) in enumerate(plan.steps):
        for _, j, nu in checks:
            last[(j, nu)] = k
    for k, groups in prune_at.items():
        for conds in groups:
            for h, beta, h2, beta2 in conds:
                for key in ((h, beta), (h2, beta2)):
                    last[key] = max(last.get(key, k), k)
    reads_of = {}
    for j, nu in last:
        reads_of.setdefault(j, []).append(nu)
    cols = {}
    weight = np.ones(1, dtype=np.int64)

    def read(j, nu):
        return cols[(j, nu)]

    for k, (g, d, checks) in enumerate(plan.steps):
        src, new = _join(T, d, checks, read, len(weight))
        weight = weight[src]
        cols = {key: a[src] for key, a in cols.items() if last[key] >= k}
        for nu in reads_of.get(g, ()):
            if last[(g, nu)] >= k:
                cols[(g, nu)] = T.table(d, nu)[new]
        if k in prune_at:
            keep = ~_prune_mask(prune_at[k], read, len(weight))
            weight = weight[keep]
            cols = {key: a[keep] for key, a in cols.items()}
        cols = {key: a for key, a in cols.items() if last[key] > k}
        if len(weight) == 0:
            return 0
        weight, cols = _merge(weight, cols, T)
        if budget is not None and len(weight) > budget:
            raise BudgetExceeded(f"more than {budget} partial map classes needed")
    return int(weight.sum())


def _merge(weight: np.ndarray, cols: dict, T: SimplexTables) -> tuple:
    """Merge rows equal on all carried columns, adding their multiplicities."""
    keys = list(cols)
    if not keys:
        return np.array([weight.sum()], dtype=np.int64), cols
    code = np.zeros(len(weight), dtype=np.int64)
    span = 1
    for key in keys:
        size = max(T.size(len(key[1]) - 1), 1)
        if span * size >= 2**62:
            break
        code = code * size + cols[key]
        span *= size
    else:
        order = np.argsort(code, kind="stable")
        code = code[order]
        starts = np.flatnonzero(np.r_[True, code[1:] != code[:-1]])
        return _sum_runs(weight, order, starts, cols)
    stacked = np.stack([cols[key] for key in keys], axis=1)
    order = np.lexsort(stacked.T[::-1])
    stacked = stacked[order]
    starts = np.flatnonzero(np.r_[True, (stacked[1:] != stacked[:-1]).any(axis=1)])
    return _sum_runs(weight, order, starts, cols)


def _sum_runs(weight, order, starts, cols) -> tuple:
    merged = np.add.reduceat(weight[order], starts)
    first = order[starts]
    return merged, {key: a[first] for key, a in cols.items()}


class MapLevels(Levels):
    """Level n of X^K: maps Delta[n] x K -> X, stored as ``(n, generator value indices)``.

    Values are indices into ``X.level(d)``; see :class:`SimplexTables`.
    """

    def __init__(self, X: SSet, K: SSet, budget: int | None = None):
        self.X, self.K = X, K
        self.budget = budget
        self.T = SimplexTables(X)
        self.seen = 0
        self._rows = {}
        self._nondeg = {}
        self._tables = {}
        self.certified = {}

    def frame(self, n: int) -> Frame:
        return frame(n, self.K)

    def _dims(self, fr: Frame) -> list:
        return [x.dim for x, _ in fr.pairs]

    def rows(self, n: int) -> np.ndarray:
        hit = self._rows.get(n)
        if hit is None:
            fr = self.frame(n)
            remaining = None if self.budget is None else self.budget - self.seen
            if fr.plan is not None:
                hit = enumerate_rows(fr.plan, self.T, remaining)
            else:
                dims = self._dims(fr)
                idx = [self.T.index(d) for d in dims]
                vals = [tuple(ix[v] for ix, v in zip(idx, e)) for e in fr.assignments(self.X)]
                vals.sort()
                hit = np.array(vals, dtype=np.int32).reshape(len(vals), len(dims))
            self._charge(hit.shape[0], n)
            self._rows[n] = hit
        return hit

    def elements(self, n):
        return [(n, tuple(r)) for r in self.rows(n).tolist()]

    def nondegenerate(self, n: int) -> list:
        """The non-degenerate n-simplices, sorted.

        Rows whose consecutive vertices all differ are non-degenerate, and
        the search prunes the others early.  The Eilenberg-Zilber count of
        degenerate n-simplices then certifies that nothing was lost; when it
        does not match, the full level is enumerated and tested exactly.
        """
        hit = self._nondeg.get(n)
        if hit is None:
            fr = self.frame(n)
            R = None
            if fr.plan is not None:
                remaining = None if self.budget is None else self.budget - self.seen
                R = enumerate_rows(fr.plan, self.T, remaining, prune=self._vertex_prune(fr, n))
                self._charge(R.shape[0], n)
                total = count_rows(fr.plan, self.T, self.budget)
                expected = sum(comb(n, k) * len(self.nondegenerate(k)) for k in range(n))
                self.certified[n] = total - R.shape[0] == expected
                if not self.certified[n]:
                    R = None
            if R is None:
                R = self._exact_nondegenerate(n)
            hit = self._nondeg[n] = [(n, r) for r in sorted(map(tuple, R.tolist()))]
        return hit

    def _charge(self, count: int, n: int):
        self.seen += count
        if self.budget is not None and self.seen > self.budget:
            raise BudgetExceeded(f"more than {self.budget} level elements needed (stopped in degree {n})")

    def _vertex_prune(self, fr: Frame, n: int, pairs=None) -> list:
        """Prune conditions 'vertex i equals vertex j', placed at the step fixing both.

        By default the pairs are the consecutive ones (i, i + 1).
        """
        f0 = self.frame(0)
        step_of = {g: k for k, (g, _, _) in enumerate(fr.plan.steps)}
        if pairs is None:
            pairs = [(i, i + 1) for i in range(n)]
        out = []
        for i, j in pairs:
            a = fr.induced(Operator([i], n), f0)
            b = fr.induced(Operator([j], n), f0)
            conds = [(ha, ba, hb, bb) for (ha, ba), (hb, bb) in zip(a, b)]
            out.append((max(step_of[h] for c in conds for h in (c[0], c[2])), conds))
        return out

    def _exact_nondegenerate(self, n: int) -> np.ndarray:
        """Rows fixed by no delta_{k+1} sigma_k, from the full level."""
        R = self.rows(n)
        fr = self.frame(n)
        dims = self._dims(fr)
        degenerate = np.zeros(R.shape[0], dtype=bool)
        for k in range(n):
            tau = Operator([i if i != k + 1 else k for i in range(n + 1)], n)
            tab = fr.induced(tau, fr)
            same = ~degenerate
            for g, (h, beta) in enumerate(tab):
                if not same.any():
                    break
                same &= self.T.table(dims[h], beta)[R[:, h]] == R[:, g]
            degenerate |= same
        del self._rows[n]
        return R[~degenerate]

    def act(self, e, images):
        n, vals = e
        m = len(images) - 1
        key = (n, images)
        tab = self._tables.get(key)
        if tab is None:
            src, tgt = self.frame(m), self.frame(n)
            dims = self._dims(tgt)
            tab = [(h, self.T.pytable(dims[h], beta)) for h, beta in tgt.induced(Operator(images, n), src)]
            self._tables[key] = tab
        return (m, tuple(t[vals[h]] for h, t in tab))

    def cell_id(self, e, n, k):
        return f"f{n}.{k}"

    def to_values(self, e) -> tuple:
        """Generator values of e as simplices of X."""
        n, vals = e
        dims = self._dims(self.frame(n))
        return tuple(self.T.level(d)[v] for d, v in zip(dims, vals))

    def from_values(self, n: int, values: tuple):
        dims = self._dims(self.frame(n))
        return (n, tuple(self.T.index(d)[x] for d, x in zip(dims, values)))


class Census(NamedTuple):
    """Degree-by-degree counts for X^K.

    ``total[n]`` counts all n-simplices, ``adjacent[n]`` those whose consecutive
    vertices differ, ``distinct[n]`` those of the latter whose first and last
    vertex differ as well.
    """

    total: tuple
    adjacent: tuple
    distinct: tuple
    nonsingular: bool
    failed_degree: int | None

    @property
    def counts(self) -> tuple:
        """Non-degenerate simplices per certified degree, without the empty probe degree."""
        n = len(self.adjacent) - 1 if self.failed_degree is None else self.failed_degree
        return tuple(self.adjacent[:n])

    @property
    def probed(self) -> int:
        return len(self.total) - 1


def census(X: SSet, K: SSet, budget: int | None = None, curried: bool = True) -> Census:
    """Decide non-singularity of X^K from counts alone.

    In every degree n the rows with consecutive distinct vertices are
    non-degenerate, every degenerate row has two equal consecutive vertices,
    and the degenerate n-simplices number sum_k C(n, k) c_k where c_k counts
    non-degenerate k-simplices.  So if total - adjacent equals that sum, the
    non-degenerate n-simplices are exactly the ``adjacent`` rows.  If such a
    row repeats a vertex at positions i < j, its face on i..j is again an
    ``adjacent`` row, now with equal first and last vertex; so with every
    degree certified, X^K is non-singular iff ``distinct`` equals ``adjacent``
    throughout.  A mismatch in either count exhibits a non-degenerate simplex
    with a repeated vertex.  Degrees are scanned until one has no
    non-degenerate simplex, never beyond the vertex count.

    For K = K1 x K2 (a :class:`ProductSSet`) and ``curried`` set, the counts are
    taken for (X^K1)^K2, which is isomorphic to X^K and far cheaper: the
    frames Delta[n] x K1 x K2 have many more generators than Delta[n] x K2.

    Requires K non-singular, so that maps out of Delta[n] x K have a generator plan.
    """
    if curried and isinstance(K, ProductSSet):
        return census(exponential(X, K.left, budget=budget), K.right, budget, curried)
    levels = MapLevels(X, K, budget)
    total, adjacent, distinct = [], [], []
    n = 0
    while True:
        fr = levels.frame(n)
        if fr.plan is None:
            raise PreconditionError("census needs a non-singular exponent")
        T = levels.T
        t = count_rows(fr.plan, T, budget)
        a = count_rows(fr.plan, T, budget, prune=levels._vertex_prune(fr, n))
        pairs = [(i, i + 1) for i in range(n)] + [(0, n)]
        d = count_rows(fr.plan, T, budget, prune=levels._vertex_prune(fr, n, pairs)) if n > 1 else a
        total.append(t)
        adjacent.append(a)
        distinct.append(d)
        expected = sum(comb(n, k) * adjacent[k] for k in range(n))
        if t - a != expected or d != a:
            return Census(tuple(total), tuple(adjacent), tuple(distinct), False, n)
        if a == 0:
            return Census(tuple(total), tuple(adjacent), tuple(distinct), True, None)
        if n >= adjacent[0]:
            raise InvariantError(f"a non-degenerate {n}-simplex with distinct vertices among {adjacent[0]} vertices")
        n += 1


class _NondegenerateView(Levels):
    def __init__(self, levels: MapLevels):
        self.levels = levels

    def elements(self, n):
        return self.levels.nondegenerate(n)

    def act(self, e, images):
        return self.levels.act(e, images)

    def cell_id(self, e, n, k):
        return f"f{n}.{k}"


class Exponential(SSet):
    """The mapping set X^K up to degree ``cap``.

    Without an explicit cap, degrees are added until one contains only
    degenerate simplices (that degree is the probe), but never beyond the
    number of vertices of X^K.  With an explicit cap and ``probe`` set, the
    degree cap + 1 is checked and :class:`CapOverflow` is raised if it has a
    non-degenerate simplex.
    """

    def __init__(self, X: SSet, K: SSet, cap: int | None = None, probe: bool = True, budget: int | None = None):
        self.base = X
        self.exponent = K
        levels = MapLevels(X, K, budget)
        if cap is None:
            limit = len(levels.nondegenerate(0))
            top = -1
            for n in range(limit + 2):
                if not levels.nondegenerate(n):
                    break
                top = n
            else:
                raise CapOverflow(f"non-degenerate simplices persist beyond the vertex count {limit}")
            cap = max(top, 0)
            self.probed = top + 1
        else:
            self.probed = None
            if probe:
                for n in range(cap + 1):
                    levels.nondegenerate(n)
                if levels.nondegenerate(cap + 1):
                    raise CapOverflow(f"X^K has a non-degenerate {cap + 1}-simplex above the cap {cap}")
                self.probed = cap + 1
        self.cap = cap
        self.levels = levels
        memo = {}
        for n in range(cap + 1):
            for e in levels.nondegenerate(n):
                memo[e] = (e, ident(n))
        pres, ids, memo = presentation_from_levels(_NondegenerateView(levels), cap, with_index=True, memo=memo)
        self._memo = memo
        self._ids = ids
        self._elements = {cid: e for e, cid in ids.items()}
        super().__init__(pres, validate=False, name=f"{X.name or 'X'}^{K.name or 'K'}")

    def element_of(self, x: Simplex) -> tuple:
        """The generator values of the map Delta[n] x K -> X that x is."""
        e = self._elements[x.cell]
        if not x.is_nondegenerate():
            e = self.levels.act(e, x.deg)
        return self.levels.to_values(e)

    def simplex_of(self, vals: tuple, n: int) -> Simplex:
        """The normal form of the n-simplex with generator values ``vals``."""
        if n > self.cap:
            raise CapOverflow(f"degree {n} is above the cap {self.cap} of this exponential")
        e = self.levels.from_values(n, vals)
        core, rho = ez_decompose(self.levels, e, n, self._memo)
        if core not in self._ids:
            raise InvariantError(f"the {n}-simplex {vals!r} has no cell")
        return Simplex(self._ids[core], rho)

    def frame(self, n: int) -> Frame:
        return frame(n, self.exponent)

    def to_smap(self, x: Simplex, validate: bool = False) -> SMap:
        """x as a map Delta[n] x K -> X."""
        return self.frame(x.dim).to_smap(self.base, self.element_of(x), validate=validate)

    def from_smap(self, f: SMap) -> Simplex:
        P = f.source
        if not isinstance(P, ProductSSet):
            raise SSetError("expected a map out of Delta[n] x K")
        n = P.left.dim
        return self.simplex_of(self.frame(n).from_assignment(f), n)


def exponential(X: SSet, K: SSet, cap: int | None = None, probe: bool = True, budget: int | None = None) -> Exponential:
    return Exponential(X, K, cap=cap, probe=probe, budget=budget)


# -- the exponential adjunction ------------------------------------------------------


def curry(f: SMap, YK: Exponential) -> SMap:
    """The adjoint X -> Y^K of a map f : X x K -> Y."""
    XK = f.source
    if not isinstance(XK, ProductSSet):
        raise SSetError("curry needs a map out of a product")
    X = XK.left
    if X.dim > YK.cap:
        raise CapOverflow(f"Y^K is only built up to degree {YK.cap}, X has dimension {X.dim}")
    assignment = {}
    for cid in X.order:
        d = X.cells[cid].dim
        fr = YK.frame(d)
        x = X.simplex(cid)
        gens = []
        for a, y in fr.pairs:
            gens.append(f(XK.normalize(X.act(x, simplex_operator(a, d)), y)))
        assignment[cid] = YK.simplex_of(tuple(gens), d)
    return SMap(X, YK, assignment, validate=False)


def uncurry(g: SMap, XK: ProductSSet) -> SMap:
    """The adjoint X x K -> Y of a map g : X -> Y^K."""
    YK = g.target
    Y = YK.base
    assignment = {}
    for cid, (x, y) in XK.pair_of.items():
        m = x.dim
        e = YK.element_of(g(x))
        top = Simplex("_".join(str(i) for i in range(m + 1)), ident(m))
        assignment[cid] = YK.frame(m).value_at(Y, e, top, y)
    return SMap(XK, Y, assignment, validate=False)


# -- prism simplices ------------------------------------------------------------------


class PrismSimplex(NamedTuple):
    """An n-simplex of X^{Delta[1]} given by its values on gamma_0 .. gamma_n."""

    n: int
    values: tuple

    @classmethod
    def from_map(cls, f: SMap) -> "PrismSimplex":
        n = f.source.left.dim
        return cls(n, tuple(f(f.source.simplex(gamma_cell(f.source, n, j))) for j in range(n + 1)))

    def gluing_ok(self, X: SSet) -> bool:
        n = self.n
        for j in range(n):
            d = tuple(t if t < j + 1 else t + 1 for t in range(n + 1))
            if X.act(self.values[j], d) != X.act(self.values[j + 1], d):
                return False
        return True

    def to_map(self, X: SSet, validate: bool = True) -> SMap:
        """Reconstruct the map Delta[n] x Delta[1] -> X from the gamma values."""
        fr = frame(self.n, _delta1())
        return fr.to_smap(X, self.generator_values(), validate=validate)

    def generator_values(self) -> tuple:
        gens = [None] * (self.n + 1)
        for j, k in enumerate(_gamma_positions(self.n)):
            gens[k] = self.values[j]
        return tuple(gens)

    def act(self, X: SSet, alpha: Operator) -> "PrismSimplex":
        """Phi . alpha, i.e. precomposition with alpha x 1."""
        if alpha.codomain != self.n:
            raise SSetError("operator does not land in the degree of the prism simplex")
        m = alpha.domain
        table = frame(self.n, _delta1()).induced(alpha, frame(m, _delta1()))
        gens = self.generator_values()
        vals = []
        for k in _gamma_positions(m):
            h, beta = table[k]
            vals.append(X.act(gens[h], beta))
        return PrismSimplex(m, tuple(vals))

    def vertex(self, X: SSet, i: int) -> Simplex:
        """Phi . epsilon_i as a vertex of X^{Delta[1]}, i.e. the 1-simplex {i} x Delta[1]."""
        return X.act(self.values[i], (i, i + 1))

    def vertices(self, X: SSet) -> list:
        return [self.vertex(X, i) for i in range(self.n + 1)]


_D1 = []


def _delta1() -> SSet:
    if not _D1:
        _D1.append(standard_simplex(1))
    return _D1[0]


_GAMMA = {}


def _gamma_positions(n: int) -> list:
    """Generator index of gamma_j in the frame Delta[n] x Delta[1], for each j."""
    hit = _GAMMA.get(n)
    if hit is None:
        fr = frame(n, _delta1())
        hit = []
        for j in range(n + 1):
            k, beta = fr.locate(tuple((i, str(e)) for i, e in gamma_vertices(n, j)))
            if beta != ident(n + 1):
                raise SSetError(f"gamma_{j} is not a generator of the prism over Delta[{n}]")
            hit.append(k)
        _GAMMA[n] = hit
    return hit


def prism_simplices(X: SSet, n: int) -> list:
    """Every n-simplex of X^{Delta[1]} as a PrismSimplex, in canonical order."""
    order = _gamma_positions(n)
    out = []
    for vals in frame(n, _delta1()).assignments(X):
        out.append(PrismSimplex(n, tuple(vals[k] for k in order)))
    out.sort()
    return out


def vertex_restriction(i: int, phi: PrismSimplex, X: SSet) -> Simplex:
    """x_i = Phi o (1 x epsilon_i): the bottom (i = 0) or top (i = 1) n-simplex of the prism."""
    n = phi.n
    if i == 0:
        return X.act(phi.values[n], tuple(range(n + 1)))
    if i == 1:
        return X.act(phi.values[0], tuple(range(1, n + 2)))
    raise PreconditionError("vertex_restriction needs i in {0, 1}")


def degenerate_prism(phi: PrismSimplex, X: SSet, k: int) -> PrismSimplex:
    """Phi . sigma_k."""
    from .operators import degeneracy

    return phi.act(X, degeneracy(phi.n, k))


def psi_from_phi(phi: PrismSimplex, X: SSet, k: int, check_ambient: bool = True) -> PrismSimplex:
    """The (n-1)-simplex Psi with Phi = Psi . sigma_k, when Phi eps_k = Phi eps_{k+1}.

    Psi sends gamma_j to Phi(gamma_j) delta_{k+1} for j <= k and to
    Phi(gamma_{j+1}) delta_{k+1} for j >= k.  The gluing relations of Psi and
    the identity Phi = Psi sigma_k are checked before returning.
    """
    n = phi.n
    if not 0 <= k < n:
        raise PreconditionError(f"need 0 <= k < n = {n}, got k = {k}")
    if phi.vertex(X, k) != phi.vertex(X, k + 1):
        raise PreconditionError(f"vertices {k} and {k + 1} of the prism simplex differ")
    if check_ambient and not is_nonsingular(X):
        raise PreconditionError("the target simplicial set is singular")
    d = tuple(t if t < k + 1 else t + 1 for t in range(n + 1))
    vals = []
    for j in range(n):
        if j < k:
            vals.append(X.act(phi.values[j], d))
        elif j == k:
            a = X.act(phi.values[k], d)
            b = X.act(phi.values[k + 1], d)
            if a != b:
                raise InvariantError(f"psi(gamma_{k}) is ambiguous")
            vals.append(a)
        else:
            vals.append(X.act(phi.values[j + 1], d))
    psi = PrismSimplex(n - 1, tuple(vals))
    if not psi.gluing_ok(X):
        raise InvariantError("psi violates the prism gluing relations")
    if degenerate_prism(psi, X, k) != phi:
        raise InvariantError(f"Phi differs from Psi sigma_{k}")
    return psi


class PropagationFailure(NamedTuple):
    j: int
    reason: str


def check_vertex_propagation(phi: PrismSimplex, X: SSet, k: int, l: int, check_ambient: bool = True):
    """Verify Phi eps_j = Phi eps_{j+1} for k <= j < l via the square argument.

    Returns True, or a PropagationFailure describing where the argument broke.
    """
    n = phi.n
    if not 0 <= k < l <= n:
        raise PreconditionError(f"need 0 <= k < l <= {n}")
    if phi.vertex(X, k) != phi.vertex(X, l):
        raise PreconditionError(f"vertices {k} and {l} of the prism simplex differ")
    if check_ambient and not is_nonsingular(X):
        raise PreconditionError("the target simplicial set is singular")
    xs = [vertex_restriction(i, phi, X) for i in (0, 1)]
    for x in xs:
        factor_through_degeneracy(X, x, k, l, check_ambient=False)
    for j in range(k, l):
        sq = phi.act(X, Operator([j, j + 1], n))
        z0, z1 = sq.values
        for i, x in enumerate(xs):
            if X.act(x, (j,)) != X.act(x, (j + 1,)):
                return PropagationFailure(j, f"x_{i} eps_{j} != x_{i} eps_{j + 1}")
        if z0.is_nondegenerate() or z1.is_nondegenerate():
            return PropagationFailure(j, "a triangle of the square is non-degenerate")
        w0 = factor_through_degeneracy(X, z0, 1, 2, check_ambient=False)
        w1 = factor_through_degeneracy(X, z1, 0, 1, check_ambient=False)
        if w0 != X.act(z0, (0, 1)) or w1 != X.act(z1, (1, 2)):
            return PropagationFailure(j, "the degenerate triangles have unexpected faces")
        diag0 = X.act(z0, (0, 2))
        diag1 = X.act(z1, (0, 2))
        if diag0 != w0 or diag1 != w1 or diag0 != diag1:
            return PropagationFailure(j, "the diagonal differs from a vertical edge")
        if phi.vertex(X, j) != phi.vertex(X, j + 1):
            return PropagationFailure(j, "vertices differ")
    return True
