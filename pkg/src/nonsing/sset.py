"""Finite simplicial sets presented by their non-degenerate simplices.

A simplex is stored in Eilenberg-Zilber normal form: a cell (a non-degenerate
simplex) together with a surjective operator onto the cell's dimension.  A
cell records, for each elementary face operator, the face as such a normal
form.  Faces of a cell may be degenerate, which is what makes singular sets
(such as a triangle with one edge collapsed) expressible.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple, Sequence

from .operators import Operator, face as face_op, degeneracy as degeneracy_op


class SSetError(ValueError):
    """Invalid presentation data, naming the offending cell."""


class Simplex(NamedTuple):
    """``cell . deg`` with ``deg`` the image list of a surjection onto ``[dim cell]``."""

    cell: str
    deg: tuple

    @property
    def dim(self) -> int:
        return len(self.deg) - 1

    @property
    def degeneracy(self) -> Operator:
        return Operator(self.deg, self.deg[-1])

    def is_nondegenerate(self) -> bool:
        return self.deg[-1] == len(self.deg) - 1

    def __repr__(self):
        return f"({self.cell}, {list(self.deg)})"


class Cell(NamedTuple):
    id: str
    dim: int
    faces: tuple = ()


def ident(n: int) -> tuple:
    return tuple(range(n + 1))


def _images(alpha) -> tuple:
    return alpha.images if isinstance(alpha, Operator) else tuple(alpha)


@lru_cache(maxsize=None)
def surjection_tuples(m: int, n: int) -> tuple:
    """Image tuples of all surjections [m] ->> [n], lexicographically sorted."""
    out = []
    for cuts in combinations(range(m), n):
        imgs = []
        v = 0
        it = iter(cuts)
        nxt = next(it, None)
        for i in range(m + 1):
            imgs.append(v)
            if i == nxt:
                v += 1
                nxt = next(it, None)
        out.append(tuple(imgs))
    out.sort()
    return tuple(out)


class SSet:
    """A finite simplicial set given by cells with Eilenberg-Zilber boundary data."""

    def __init__(self, cells: Iterable[Cell], validate: bool = True, name: str = ""):
        table = {}
        for c in cells:
            if c.id in table:
                raise SSetError(f"duplicate cell id {c.id!r}")
            table[c.id] = Cell(c.id, int(c.dim), tuple(Simplex(f.cell, tuple(f.deg)) for f in c.faces))
        order = sorted(table.values(), key=lambda c: (c.dim, c.id))
        self.cells = {c.id: c for c in order}
        self.order = [c.id for c in order]
        self.index = {cid: k for k, cid in enumerate(self.order)}
        self.dim = max((c.dim for c in order), default=-1)
        self.name = name
        self._face_memo = {}
        self._levels = {}
        self._face_index = {}
        if validate:
            self.validate()

    # -- basic views -------------------------------------------------------

    def __len__(self):
        return len(self.cells)

    def __iter__(self) -> Iterator[Cell]:
        return (self.cells[cid] for cid in self.order)

    def __contains__(self, cid):
        return cid in self.cells

    def __eq__(self, other):
        if not isinstance(other, SSet):
            return NotImplemented
        return self.cells == other.cells

    def __hash__(self):
        return hash(tuple(self.cells.values()))

    def __repr__(self):
        label = f"{self.name} " if self.name else ""
        return f"<SSet {label}cells={self.counts()}>"

    def cell(self, cid: str) -> Cell:
        return self.cells[cid]

    def cells_of_dim(self, d: int) -> list:
        return [cid for cid in self.order if self.cells[cid].dim == d]

    def counts(self) -> tuple:
        """Number of cells in each dimension 0..dim."""
        out = [0] * (self.dim + 1)
        for c in self.cells.values():
            out[c.dim] += 1
        return tuple(out)

    def simplex(self, cid: str) -> Simplex:
        return Simplex(cid, ident(self.cells[cid].dim))

    def vertex_ids(self) -> list:
        return self.cells_of_dim(0)

    # -- operator action ---------------------------------------------------

    def act(self, x: Simplex, alpha) -> Simplex:
        """The simplex ``x . alpha`` in normal form."""
        a = _images(alpha)
        deg = x.deg
        if isinstance(alpha, Operator) and alpha.codomain != len(deg) - 1:
            raise SSetError(
                f"operator into [{alpha.codomain}] cannot act on a {len(deg) - 1}-simplex"
            )
        comp = tuple(deg[i] for i in a)
        top = deg[-1]
        if comp[0] == 0 and comp[-1] == top and len(set(comp)) == top + 1:
            return Simplex(x.cell, comp)
        image = []
        rho = []
        for v in comp:
            if not image or image[-1] != v:
                image.append(v)
            rho.append(len(image) - 1)
        y = self._cell_face(x.cell, tuple(image))
        yd = y.deg
        return Simplex(y.cell, tuple(yd[j] for j in rho))

    def _cell_face(self, cid: str, mu: tuple) -> Simplex:
        key = (cid, mu)
        hit = self._face_memo.get(key)
        if hit is not None:
            return hit
        d = self.cells[cid].dim
        if len(mu) == d + 1:
            res = Simplex(cid, mu)
        else:
            i = 0
            for v in mu:
                if v != i:
                    break
                i += 1
            rest = tuple(v if v < i else v - 1 for v in mu)
            res = self.act(self.cells[cid].faces[i], rest)
        self._face_memo[key] = res
        return res

    def face(self, x: Simplex, i: int) -> Simplex:
        n = x.dim
        return self.act(x, tuple(j if j < i else j + 1 for j in range(n)))

    def degenerate(self, x: Simplex, i: int) -> Simplex:
        """``x . sigma_i``."""
        return self.act(x, degeneracy_op(x.dim, i))

    def vertices(self, x: Simplex) -> list:
        return [self.act(x, (i,)) for i in range(x.dim + 1)]

    def vertex_cells(self, cid: str) -> list:
        return [v.cell for v in self.vertices(self.simplex(cid))]

    def is_injective_representing_map(self, x: Simplex) -> bool:
        vs = self.vertices(x)
        return len(set(vs)) == len(vs)

    # -- levels --------------------------------------------------------------

    def level(self, n: int) -> list:
        """All n-simplices, degenerate ones included, in canonical order."""
        hit = self._levels.get(n)
        if hit is None:
            hit = []
            for cid in self.order:
                d = self.cells[cid].dim
                if d <= n:
                    hit.extend(Simplex(cid, s) for s in surjection_tuples(n, d))
            self._levels[n] = hit
        return hit

    def level_size(self, n: int) -> int:
        from math import comb

        return sum(comb(n, c.dim) for c in self.cells.values() if c.dim <= n)

    def faces_of(self, x: Simplex) -> tuple:
        return tuple(self.face(x, i) for i in range(x.dim + 1))

    def face_index(self, n: int) -> dict:
        """Map from face tuples to the n-simplices having exactly those faces."""
        hit = self._face_index.get(n)
        if hit is None:
            hit = {}
            for x in self.level(n):
                key = self.faces_of(x) if n > 0 else ()
                hit.setdefault(key, []).append(x)
            self._face_index[n] = hit
        return hit

    # -- validation ------------------------------------------------------------

    def validate(self):
        for c in self.cells.values():
            if c.dim < 0:
                raise SSetError(f"cell {c.id!r} has negative dimension")
            expected = c.dim + 1 if c.dim > 0 else 0
            if len(c.faces) != expected:
                raise SSetError(
                    f"cell {c.id!r} of dimension {c.dim} has {len(c.faces)} faces, expected {expected}"
                )
            for i, f in enumerate(c.faces):
                target = self.cells.get(f.cell)
                if target is None:
                    raise SSetError(f"cell {c.id!r}: face {i} references unknown cell {f.cell!r}")
                if target.dim >= c.dim:
                    raise SSetError(
                        f"cell {c.id!r}: face {i} references {f.cell!r} of dimension {target.dim}"
                    )
                deg = f.deg
                if len(deg) != c.dim:
                    raise SSetError(f"cell {c.id!r}: face {i} has dimension {len(deg) - 1}")
                if deg[0] != 0 or any(b - a not in (0, 1) for a, b in zip(deg, deg[1:])):
                    raise SSetError(f"cell {c.id!r}: face {i} degeneracy {list(deg)} is not surjective")
                if deg[-1] != target.dim:
                    raise SSetError(
                        f"cell {c.id!r}: face {i} degeneracy {list(deg)} does not land on [{target.dim}]"
                    )
        for cid in self.order:
            c = self.cells[cid]
            if c.dim < 2:
                continue
            for j in range(c.dim + 1):
                for i in range(j):
                    left = self.face(c.faces[j], i)
                    right = self.face(c.faces[i], j - 1)
                    if left != right:
                        raise SSetError(
                            f"cell {cid!r}: faces {i} and {j} are incoherent ({left!r} != {right!r})"
                        )


class SMap:
    """A simplicial map given by the image of every cell of the source."""

    def __init__(self, source: SSet, target: SSet, assignment, validate: bool = True):
        self.source = source
        self.target = target
        if not isinstance(assignment, dict):
            assignment = dict(zip(source.order, assignment))
        self.assignment = {cid: Simplex(v[0], tuple(v[1])) for cid, v in assignment.items()}
        if validate:
            self.validate()

    def __call__(self, x: Simplex) -> Simplex:
        v = self.assignment[x.cell]
        if len(x.deg) == len(v.deg) and x.deg[-1] == len(x.deg) - 1:
            return v
        return self.target.act(v, x.deg)

    apply = __call__

    def values(self) -> tuple:
        return tuple(self.assignment[cid] for cid in self.source.order)

    def __eq__(self, other):
        if not isinstance(other, SMap):
            return NotImplemented
        return self.assignment == other.assignment

    def __hash__(self):
        return hash(self.values())

    def __lt__(self, other):
        return self.values() < other.values()

    def __repr__(self):
        return f"<SMap {self.source!r} -> {self.target!r}>"

    def validate(self):
        src, tgt = self.source, self.target
        if set(self.assignment) != set(src.cells):
            missing = sorted(set(src.cells) - set(self.assignment))
            raise SSetError(f"map does not assign cells {missing}")
        for cid in src.order:
            c = src.cells[cid]
            v = self.assignment[cid]
            if v.cell not in tgt.cells:
                raise SSetError(f"cell {cid!r} is sent to unknown cell {v.cell!r}")
            if v.dim != c.dim:
                raise SSetError(f"cell {cid!r} of dimension {c.dim} is sent to a {v.dim}-simplex")
            if v.deg[-1] != tgt.cells[v.cell].dim:
                raise SSetError(f"cell {cid!r} is sent to a malformed simplex {v!r}")
            for i, f in enumerate(c.faces):
                if tgt.face(v, i) != self(f):
                    raise SSetError(f"map is not natural at cell {cid!r}, face {i}")

    def then(self, other: "SMap") -> "SMap":
        """The composite ``other o self``."""
        return SMap(self.source, other.target, {cid: other(v) for cid, v in self.assignment.items()}, validate=False)

    def image_of_level(self, n: int) -> set:
        return {self(x) for x in self.source.level(n)}

    def is_degreewise_surjective(self, up_to: int) -> bool:
        for n in range(up_to + 1):
            if self.image_of_level(n) != set(self.target.level(n)):
                return False
        return True

    def is_degreewise_injective(self, up_to: int) -> bool:
        for n in range(up_to + 1):
            lv = self.source.level(n)
            if len({self(x) for x in lv}) != len(lv):
                return False
        return True


def identity_map(X: SSet) -> SMap:
    return SMap(X, X, {cid: X.simplex(cid) for cid in X.order}, validate=False)


def is_iso(f: SMap) -> bool:
    """True iff ``f`` is a bijection on cells with an inverse that is itself simplicial."""
    src, tgt = f.source, f.target
    if len(src) != len(tgt):
        return False
    inverse = {}
    for cid, v in f.assignment.items():
        if not v.is_nondegenerate() or v.cell in inverse:
            return False
        inverse[v.cell] = src.simplex(cid)
    if set(inverse) != set(tgt.cells):
        return False
    try:
        SMap(tgt, src, inverse)
    except SSetError:
        return False
    return True


# -- degreewise data -----------------------------------------------------------


class Levels:
    """Degreewise data: finite sets of hashable elements with an operator action.

    Subclasses provide ``elements(n)`` and ``act(e, images)``, where ``images``
    is the image tuple of an operator [m] -> [n].  ``cell_id`` names the
    non-degenerate elements; by default they are numbered in canonical order.
    Elements of different degrees must be distinct, since decompositions are
    memoized by element alone.
    """

    def elements(self, n: int) -> Sequence:
        raise NotImplementedError

    def act(self, e, images: tuple):
        raise NotImplementedError

    def cell_id(self, e, n: int, k: int) -> str:
        return f"s{n}_{k}"


def ez_decompose(levels: Levels, e, n: int, memo: dict | None = None):
    """Return ``(e_sharp, e_flat)`` with ``e = e_sharp . e_flat`` and ``e_sharp`` non-degenerate.

    ``e_flat`` is returned as an image tuple of a surjection [n] ->> [dim e_sharp].
    """
    if memo is not None:
        hit = memo.get(e)
        if hit is not None:
            return hit
    res = None
    for k in range(n):
        below = levels.act(e, tuple(j if j <= k else j + 1 for j in range(n)))
        if levels.act(below, tuple(j if j <= k else j - 1 for j in range(n + 1))) == e:
            core, rho = ez_decompose(levels, below, n - 1, memo)
            sig = tuple(j if j <= k else j - 1 for j in range(n + 1))
            res = (core, tuple(rho[j] for j in sig))
            break
    if res is None:
        res = (e, ident(n))
    if memo is not None:
        memo[e] = res
    return res


def presentation_from_levels(
    levels: Levels, top: int, name: str = "", with_index: bool = False, memo: dict | None = None
):
    """Build the cell presentation of degreewise data known to be degenerate above ``top``.

    With ``with_index`` the element-to-cell-id dictionary is returned as well.
    """
    memo = {} if memo is None else memo
    ids = {}
    cells = []
    for n in range(top + 1):
        k = 0
        for e in levels.elements(n):
            core, rho = ez_decompose(levels, e, n, memo)
            if core == e:
                ids[e] = levels.cell_id(e, n, k)
                k += 1
                faces = []
                for i in range(n + 1 if n > 0 else 0):
                    f = levels.act(e, tuple(j if j < i else j + 1 for j in range(n)))
                    fc, frho = ez_decompose(levels, f, n - 1, memo)
                    if fc not in ids:
                        raise SSetError(f"face {i} of element {e!r} has no cell")
                    faces.append(Simplex(ids[fc], frho))
                cells.append(Cell(ids[e], n, tuple(faces)))
    X = SSet(cells, name=name)
    if with_index:
        return X, ids, memo
    return X


def descend(q: SMap, h: SMap) -> SMap:
    """The unique ``g`` with ``g o q = h``, for ``q`` surjective on cells.

    Raises :class:`SSetError` when ``h`` does not factor through ``q``.
    """
    if q.source is not h.source and q.source != h.source:
        raise SSetError("descend needs maps with a common source")
    Q = q.target
    chosen = {}
    for cid in q.source.order:
        v = q.assignment[cid]
        if v.is_nondegenerate() and v.cell not in chosen:
            chosen[v.cell] = h.assignment[cid]
    missing = [c for c in Q.order if c not in chosen]
    if missing:
        raise SSetError(f"cells {missing} are not hit by the quotient map")
    g = SMap(Q, h.target, chosen, validate=False)
    try:
        g.validate()
    except SSetError as exc:
        raise SSetError(f"map does not descend: {exc}") from None
    for cid in q.source.order:
        if g(q.assignment[cid]) != h.assignment[cid]:
            raise SSetError(f"map does not descend: disagreement at cell {cid!r}")
    return g
