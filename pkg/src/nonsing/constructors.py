"""Standard simplices, nerves, coproducts, products, prisms, subsets and quotients."""
from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

from .operators import Operator, face as face_op, degeneracy as degeneracy_op
from .sset import (
    Cell,
    Levels,
    SMap,
    SSet,
    SSetError,
    Simplex,
    ident,
    presentation_from_levels,
    surjection_tuples,
)


def _chain_id(chain) -> str:
    return "_".join(str(v) for v in chain)


def _simplicial_complex(chains: Iterable[tuple], label=str, name="") -> SSet:
    """Ordered complex whose cells are the given vertex chains, closed under faces."""
    closed = set()
    for ch in chains:
        for k in range(1, len(ch) + 1):
            closed.update(combinations(ch, k))
    ids = {ch: "_".join(label(v) for v in ch) for ch in closed}
    cells = []
    for ch in closed:
        d = len(ch) - 1
        faces = ()
        if d > 0:
            faces = tuple(Simplex(ids[ch[:i] + ch[i + 1:]], ident(d - 1)) for i in range(d + 1))
        cells.append(Cell(ids[ch], d, faces))
    return SSet(cells, name=name)


def standard_simplex(n: int) -> SSet:
    """Delta[n]; the cell for a face operator with image S is named by S joined with '_'."""
    if n < 0:
        raise ValueError("standard_simplex needs n >= 0")
    return _simplicial_complex([tuple(range(n + 1))], name=f"Delta[{n}]")


def simplex_cell(n: int, images: Sequence[int]) -> str:
    """Cell id in ``standard_simplex(n)`` of the face with the given vertices."""
    return _chain_id(images)


def operator_simplex(alpha: Operator) -> Simplex:
    """The simplex of Delta[codomain] named by an operator (Yoneda)."""
    image = sorted(set(alpha.images))
    pos = {v: k for k, v in enumerate(image)}
    return Simplex(_chain_id(image), tuple(pos[v] for v in alpha.images))


def simplex_operator(x: Simplex, n: int) -> Operator:
    """Inverse of :func:`operator_simplex` for simplices of ``standard_simplex(n)``."""
    verts = [int(v) for v in x.cell.split("_")]
    return Operator([verts[j] for j in x.deg], n)


def boundary(n: int) -> SSet:
    """The boundary of Delta[n]."""
    full = tuple(range(n + 1))
    chains = [full[:i] + full[i + 1:] for i in range(n + 1)]
    return _simplicial_complex(chains, name=f"dDelta[{n}]")


# -- posets --------------------------------------------------------------------


class Poset:
    """A finite partial order given by its elements and the relation ``le``."""

    def __init__(self, elements: Iterable, le_pairs: Iterable[tuple]):
        self.elements = sorted(set(elements), key=str)
        self.le = {(a, a) for a in self.elements}
        for a, b in le_pairs:
            if a not in self.elements or b not in self.elements:
                raise ValueError(f"relation {a} <= {b} mentions an unknown element")
            self.le.add((a, b))
        # transitive closure
        changed = True
        while changed:
            changed = False
            for a, b in list(self.le):
                for c in self.elements:
                    if (b, c) in self.le and (a, c) not in self.le:
                        self.le.add((a, c))
                        changed = True
        for a, b in self.le:
            if a != b and (b, a) in self.le:
                raise ValueError(f"relation is not antisymmetric: {a} and {b}")

    def lt(self, a, b) -> bool:
        return a != b and (a, b) in self.le

    def chains(self) -> list:
        """All non-empty strictly increasing chains."""
        out = []
        ups = {a: [b for b in self.elements if self.lt(a, b)] for a in self.elements}

        def extend(ch):
            out.append(tuple(ch))
            for b in ups[ch[-1]]:
                extend(ch + [b])

        for a in self.elements:
            extend([a])
        return out

    @classmethod
    def chain(cls, n: int) -> "Poset":
        return cls(range(n + 1), [(i, i + 1) for i in range(n)])

    @classmethod
    def grid(cls, *sizes: int) -> "Poset":
        """The product order on [n_1] x ... x [n_k]; elements are named 'i.j...'."""
        from itertools import product as iproduct

        pts = list(iproduct(*[range(s + 1) for s in sizes]))
        name = {p: ".".join(map(str, p)) for p in pts}
        pairs = []
        for p in pts:
            for axis in range(len(sizes)):
                if p[axis] < sizes[axis]:
                    q = p[:axis] + (p[axis] + 1,) + p[axis + 1:]
                    pairs.append((name[p], name[q]))
        return cls([name[p] for p in pts], pairs)


def poset_nerve(poset: Poset, name: str = "") -> SSet:
    """The nerve: one cell per strictly increasing chain."""
    return _simplicial_complex(poset.chains(), name=name or "nerve")


# -- coproducts ----------------------------------------------------------------


def coproduct(parts: Sequence[SSet]) -> SSet:
    """Disjoint union; the cells of part k are renamed ``k:id``."""
    cells = []
    for k, X in enumerate(parts):
        for c in X:
            faces = tuple(Simplex(f"{k}:{f.cell}", f.deg) for f in c.faces)
            cells.append(Cell(f"{k}:{c.id}", c.dim, faces))
    return SSet(cells, name="coproduct")


def coproduct_inclusion(parts: Sequence[SSet], k: int, total: SSet) -> SMap:
    return SMap(parts[k], total, {cid: Simplex(f"{k}:{cid}", ident(parts[k].cells[cid].dim)) for cid in parts[k].order})


# -- products ------------------------------------------------------------------


def _collapses(deg: tuple) -> frozenset:
    return frozenset(i for i in range(len(deg) - 1) if deg[i] == deg[i + 1])


def _encode(x: Simplex) -> str:
    if x.deg[-1] == len(x.deg) - 1:
        return x.cell
    return x.cell + "^" + ".".join(map(str, x.deg))


class ProductSSet(SSet):
    """X x Y, remembering which pair of simplices each cell is.

    An m-simplex of the product is a pair of m-simplices.  The pair is
    non-degenerate exactly when the two degeneracy parts share no collapsed
    position, which bounds the dimension by dim X + dim Y.
    """

    def __init__(self, X: SSet, Y: SSet, validate: bool = False):
        self.left = X
        self.right = Y
        self.pair_of = {}
        self.cell_of_pair = {}
        cells = []
        top = X.dim + Y.dim
        staged = []
        for m in range(top + 1) if X.dim >= 0 and Y.dim >= 0 else []:
            for a in X.order:
                p = X.cells[a].dim
                if p > m:
                    continue
                for b in Y.order:
                    q = Y.cells[b].dim
                    if q > m or p + q < m:
                        continue
                    for s in surjection_tuples(m, p):
                        cs = _collapses(s)
                        for t in surjection_tuples(m, q):
                            if cs.isdisjoint(_collapses(t)):
                                x, y = Simplex(a, s), Simplex(b, t)
                                cid = f"<{_encode(x)}*{_encode(y)}>"
                                self.pair_of[cid] = (x, y)
                                self.cell_of_pair[(x, y)] = cid
                                staged.append((cid, m, x, y))
        for cid, m, x, y in staged:
            faces = ()
            if m > 0:
                faces = tuple(self.normalize(X.face(x, i), Y.face(y, i)) for i in range(m + 1))
            cells.append(Cell(cid, m, faces))
        super().__init__(cells, validate=validate, name=f"({X.name or 'X'} x {Y.name or 'Y'})")

    def normalize(self, x: Simplex, y: Simplex) -> Simplex:
        """The normal form of the pair ``(x, y)`` of equally-dimensional simplices."""
        common = sorted(_collapses(x.deg) & _collapses(y.deg))
        if not common:
            return Simplex(self.cell_of_pair[(x, y)], ident(x.dim))
        m = x.dim
        rho = tuple(i - sum(1 for j in common if j < i) for i in range(m + 1))
        sec = []
        for i, v in enumerate(rho):
            if len(sec) == v:
                sec.append(i)
        sec = tuple(sec)
        xs = self.left.act(x, sec)
        ys = self.right.act(y, sec)
        return Simplex(self.cell_of_pair[(xs, ys)], rho)

    def pair(self, z: Simplex) -> tuple:
        """The pair of simplices making up the simplex ``z``."""
        x, y = self.pair_of[z.cell]
        return self.left.act(x, z.deg), self.right.act(y, z.deg)

    def projection(self, side: int) -> SMap:
        target = self.left if side == 0 else self.right
        return SMap(self, target, {cid: pr[side] for cid, pr in self.pair_of.items()}, validate=False)

    def pairing(self, f: SMap, g: SMap) -> SMap:
        """The map ``(f, g)`` into this product from a common source."""
        assignment = {}
        for cid in f.source.order:
            assignment[cid] = self.normalize(f.assignment[cid], g.assignment[cid])
        return SMap(f.source, self, assignment, validate=False)


def product(X: SSet, Y: SSet) -> ProductSSet:
    return ProductSSet(X, Y)


def product_map(P: ProductSSet, Q: ProductSSet, f: SMap, g: SMap) -> SMap:
    """``f x g : P -> Q`` for ``P = A x B`` and ``Q = C x D``."""
    assignment = {}
    for cid, (x, y) in P.pair_of.items():
        assignment[cid] = Q.normalize(f(x), g(y))
    return SMap(P, Q, assignment, validate=False)


class PairLevels(Levels):
    """All pairs of equally-dimensional simplices: the degreewise product."""

    def __init__(self, X: SSet, Y: SSet):
        self.X, self.Y = X, Y

    def elements(self, n):
        return [(x, y) for x in self.X.level(n) for y in self.Y.level(n)]

    def act(self, e, images):
        return (self.X.act(e[0], images), self.Y.act(e[1], images))

    def cell_id(self, e, n, k):
        return f"<{_encode(e[0])}*{_encode(e[1])}>"


def product_from_levels(X: SSet, Y: SSet) -> SSet:
    """The product built by brute-force Eilenberg-Zilber decomposition of all pairs."""
    return presentation_from_levels(PairLevels(X, Y), X.dim + Y.dim)


# -- prisms ----------------------------------------------------------------------


def prism(n: int) -> ProductSSet:
    """Delta[n] x Delta[1]."""
    return product(standard_simplex(n), standard_simplex(1))


def gamma_vertices(n: int, j: int) -> list:
    """Vertex sequence of gamma^{n+1}_j: (0,0)..(j,0),(j,1)..(n,1)."""
    return [(i, 0) if i <= j else (i - 1, 1) for i in range(n + 2)]


def gamma_cell(P: ProductSSet, n: int, j: int) -> str:
    """The cell of the prism ``P = Delta[n] x Delta[1]`` that is gamma^{n+1}_j."""
    verts = gamma_vertices(n, j)
    x = operator_simplex(Operator([v[0] for v in verts], n))
    y = operator_simplex(Operator([v[1] for v in verts], 1))
    z = P.normalize(x, y)
    if z.deg != ident(n + 1):
        raise SSetError(f"gamma_{j} is degenerate in the prism over Delta[{n}]")
    return z.cell


class PrismGenerators:
    """The n+1 top cells gamma_0..gamma_n of Delta[n] x Delta[1] as maps from Delta[n+1]."""

    def __init__(self, n: int):
        self.n = n
        self.prism = prism(n)
        self.cells = [gamma_cell(self.prism, n, j) for j in range(n + 1)]
        top = standard_simplex(n + 1)
        self.gamma = [representing_map(top, self.prism, self.prism.simplex(c)) for c in self.cells]
        self.check_relations()

    def check_relations(self):
        P, n = self.prism, self.n
        for j in range(n):
            d = face_op(n + 1, j + 1)
            left = P.act(P.simplex(self.cells[j]), d)
            right = P.act(P.simplex(self.cells[j + 1]), d)
            if left != right:
                raise SSetError(f"gamma_{j} delta_{j + 1} != gamma_{j + 1} delta_{j + 1}")

    def is_injective(self, j: int) -> bool:
        return self.prism.is_injective_representing_map(self.prism.simplex(self.cells[j]))


def prism_generators(n: int) -> PrismGenerators:
    return PrismGenerators(n)


def representing_map(top: SSet, X: SSet, x: Simplex) -> SMap:
    """x-bar : Delta[n] -> X for an n-simplex x, where ``top`` is Delta[n]."""
    n = x.dim
    assignment = {}
    for cid in top.order:
        verts = [int(v) for v in cid.split("_")]
        assignment[cid] = X.act(x, Operator(verts, n))
    return SMap(top, X, assignment, validate=False)


def operator_map(alpha: Operator, source: SSet | None = None, target: SSet | None = None) -> SMap:
    """alpha_* : Delta[m] -> Delta[n], postcomposition with alpha."""
    source = source or standard_simplex(alpha.domain)
    target = target or standard_simplex(alpha.codomain)
    assignment = {}
    for cid in source.order:
        verts = [int(v) for v in cid.split("_")]
        assignment[cid] = operator_simplex(Operator([alpha.images[v] for v in verts], alpha.codomain))
    return SMap(source, target, assignment, validate=False)


# -- subsets -------------------------------------------------------------------


def face_cells(X: SSet, cid: str) -> set:
    """All cells reachable from ``cid`` through iterated faces, ``cid`` included."""
    seen = {cid}
    todo = [cid]
    while todo:
        c = X.cells[todo.pop()]
        for f in c.faces:
            if f.cell not in seen:
                seen.add(f.cell)
                todo.append(f.cell)
    return seen


def subset_generated(X: SSet, cells: Iterable[str]) -> tuple:
    """The smallest simplicial subset containing ``cells``, with its inclusion."""
    keep = set()
    for cid in cells:
        if cid not in X.cells:
            raise SSetError(f"unknown cell {cid!r}")
        keep |= face_cells(X, cid)
    sub = SSet([X.cells[c] for c in X.order if c in keep], name=f"sub({X.name})")
    inc = SMap(sub, X, {c: X.simplex(c) for c in sub.order}, validate=False)
    return sub, inc


# -- quotients -----------------------------------------------------------------


class UnionFind:
    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True

    def classes(self) -> dict:
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


class _ClassLevels(Levels):
    def __init__(self, X, rep, classes_by_level, names):
        self.X = X
        self.rep = rep
        self.by_level = classes_by_level
        self.names = names

    def elements(self, n):
        return self.by_level.get(n, [])

    def act(self, e, images):
        return self.rep[self.X.act(e, images)]

    def cell_id(self, e, n, k):
        return self.names[e]


def quotient(X: SSet, pairs: Iterable[tuple]) -> tuple:
    """The quotient of X by the simplicial equivalence generated by ``pairs``.

    Returns the quotient set and the projection map.  Classes are computed
    by union-find over all simplices of degree at most dim X, closed under
    the elementary faces and degeneracies between those degrees.
    """
    top = X.dim
    pairs = list(pairs)
    for a, b in pairs:
        if a.dim != b.dim:
            raise SSetError(f"cannot identify {a!r} with {b!r}: dimensions differ")
    for a, b in pairs:
        if a.dim > top:
            raise SSetError(f"pair {a!r}, {b!r} lies above the dimension of X")
    uf = UnionFind()
    for n in range(top + 1):
        for x in X.level(n):
            uf.add(x)
    faces = {n: [tuple(j if j < i else j + 1 for j in range(n)) for i in range(n + 1)] for n in range(1, top + 1)}
    degs = {n: [tuple(j if j <= i else j - 1 for j in range(n + 2)) for i in range(n + 1)] for n in range(top)}
    todo = []
    for a, b in pairs:
        if uf.union(a, b):
            todo.append((a, b))
    while todo:
        a, b = todo.pop()
        n = a.dim
        ops = faces.get(n, []) + degs.get(n, [])
        for op in ops:
            a2, b2 = X.act(a, op), X.act(b, op)
            if uf.union(a2, b2):
                todo.append((a2, b2))
    rep = {}
    by_level = {}
    names = {}
    for root, members in uf.classes().items():
        r = min(members, key=lambda s: (X.index[s.cell], s.deg))
        for m in members:
            rep[m] = r
        by_level.setdefault(r.dim, []).append(r)
        cells = sorted(m.cell for m in members if m.is_nondegenerate())
        names[r] = cells[0] if cells else f"{r.cell}^" + ".".join(map(str, r.deg))
    for n in by_level:
        by_level[n].sort(key=lambda s: (X.index[s.cell], s.deg))
    levels = _ClassLevels(X, rep, by_level, names)
    Q, ids, memo = presentation_from_levels(levels, top, name=f"{X.name}/~", with_index=True)
    assignment = {}
    for cid in X.order:
        core, rho = memo.get(rep[X.simplex(cid)]) or (rep[X.simplex(cid)], ident(X.cells[cid].dim))
        assignment[cid] = Simplex(ids[core], rho)
    proj = SMap(X, Q, assignment, validate=False)
    return Q, proj


def coequalizer(f: SMap, g: SMap) -> tuple:
    """The coequalizer of two parallel maps, as a quotient of their target."""
    pairs = [(f(f.source.simplex(c)), g(g.source.simplex(c))) for c in f.source.order]
    return quotient(f.target, pairs)


def pushout(i: SMap, j: SMap) -> tuple:
    """Pushout of ``X <-i- A -j-> Y``; returns (P, X -> P, Y -> P)."""
    X, Y = i.target, j.target
    total = coproduct([X, Y])
    pairs = []
    for c in i.source.order:
        a, b = i(i.source.simplex(c)), j(j.source.simplex(c))
        pairs.append((Simplex(f"0:{a.cell}", a.deg), Simplex(f"1:{b.cell}", b.deg)))
    P, proj = quotient(total, pairs)
    inl = coproduct_inclusion([X, Y], 0, total).then(proj)
    inr = coproduct_inclusion([X, Y], 1, total).then(proj)
    return P, inl, inr


def collapse_to_point(X: SSet, sub_cells: Iterable[str]) -> tuple:
    """X / A for the subset generated by ``sub_cells``: A is identified to a vertex."""
    A, _ = subset_generated(X, sub_cells)
    verts = A.vertex_ids()
    if not verts:
        return quotient(X, [])
    base = Simplex(verts[0], (0,))
    pairs = []
    for cid in A.order:
        d = A.cells[cid].dim
        pairs.append((X.simplex(cid), Simplex(base.cell, (0,) * (d + 1))))
    return quotient(X, pairs)


def copair(inl: SMap, inr: SMap, f: SMap, g: SMap) -> SMap:
    """The map out of a pushout ``P`` restricting to f along inl and to g along inr."""
    P = inl.target
    assignment = {}
    for leg, h in ((inl, f), (inr, g)):
        for cid in leg.source.order:
            z = leg.assignment[cid]
            if z.is_nondegenerate() and z.cell not in assignment:
                assignment[z.cell] = h.assignment[cid]
    missing = [c for c in P.order if c not in assignment]
    if missing:
        raise SSetError(f"cells {missing} of the pushout are hit by neither leg")
    out = SMap(P, f.target, assignment)
    if inl.then(out) != f or inr.then(out) != g:
        raise SSetError("the two maps do not agree on the glued part")
    return out


# -- ordered complexes ---------------------------------------------------------


def nerve_map(source: SSet, target: SSet, vertex_map: dict) -> SMap:
    """The map between ordered complexes induced by an order-preserving vertex map.

    Cells of both sets must be named by their vertex chains joined with '_',
    as for standard simplices, boundaries and poset nerves.
    """
    assignment = {}
    for cid in source.order:
        seq = [vertex_map[v] for v in cid.split("_")]
        image = []
        deg = []
        for v in seq:
            if not image or image[-1] != v:
                image.append(v)
            deg.append(len(image) - 1)
        assignment[cid] = Simplex(_chain_id(image), tuple(deg))
    return SMap(source, target, assignment)


def sigma_gamma_holds(n: int, k: int, j: int) -> bool:
    """(sigma_k x 1) gamma^{n+1}_j is gamma^n_j sigma_{k+1} for j <= k, else gamma^n_{j-1} sigma_k."""
    if not (0 <= k < n and 0 <= j <= n):
        raise ValueError(f"need 0 <= k < n and 0 <= j <= n, got n={n}, k={k}, j={j}")
    P = _prism_cached(n - 1)
    verts = gamma_vertices(n, j)
    sk = degeneracy_op(n - 1, k)
    x = operator_simplex(Operator([sk.images[a] for a, _ in verts], n - 1))
    y = operator_simplex(Operator([b for _, b in verts], 1))
    left = P.normalize(x, y)
    if j <= k:
        right = P.act(P.simplex(gamma_cell(P, n - 1, j)), degeneracy_op(n, k + 1))
    else:
        right = P.act(P.simplex(gamma_cell(P, n - 1, j - 1)), degeneracy_op(n, k))
    return left == right


_PRISMS = {}


def _prism_cached(n: int) -> ProductSSet:
    if n not in _PRISMS:
        _PRISMS[n] = prism(n)
    return _PRISMS[n]
