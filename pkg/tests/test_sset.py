from itertools import combinations_with_replacement

import pytest
from hypothesis import given, strategies as st

from nonsing.constructors import PairLevels, product, quotient, standard_simplex
from nonsing.corpus import circle, corpus, q_example
from nonsing.operators import Operator, all_operators, compose, degeneracy, face, identity, vertex
from nonsing.sset import (
    Cell,
    Levels,
    SMap,
    SSet,
    SSetError,
    Simplex,
    ez_decompose,
    identity_map,
    is_iso,
    presentation_from_levels,
    surjection_tuples,
)
from strategies import random_quotients


def monotone(m, n):
    return [tuple(c) for c in combinations_with_replacement(range(n + 1), m + 1)]


class SimplexLevels(Levels):
    """Delta[n] as degreewise sets of monotone maps."""

    def __init__(self, n):
        self.n = n

    def elements(self, m):
        return monotone(m, self.n)

    def act(self, e, images):
        return tuple(e[i] for i in images)


class PointLevels(Levels):
    # one element per degree, tagged with the degree to keep levels disjoint
    def elements(self, m):
        return [m]

    def act(self, e, images):
        return len(images) - 1


def top(X):
    return X.simplex(X.order[-1])


# -- act and vertices ----------------------------------------------------------------


def test_act_identity():
    for X in corpus():
        for cid in X.order:
            x = X.simplex(cid)
            assert X.act(x, identity(x.dim)) == x


def test_act_vertex_of_standard_simplex():
    d2 = standard_simplex(2)
    assert d2.act(top(d2), vertex(2, 1)) == Simplex("1", (0,))


def test_act_on_q_lands_on_degenerate_edge():
    Q = q_example()
    z = Q.act(top(Q), face(2, 1))
    assert not z.is_nondegenerate()
    assert z.deg == (0, 0)
    assert Q.cells[z.cell].dim == 0


def test_act_rejects_shape_mismatch():
    d2 = standard_simplex(2)
    with pytest.raises(SSetError):
        d2.act(top(d2), face(3, 0))


def test_vertices_examples():
    for n in range(4):
        dn = standard_simplex(n)
        assert [v.cell for v in dn.vertices(top(dn))] == [str(i) for i in range(n + 1)]
    Q = q_example()
    vs = Q.vertices(top(Q))
    assert vs[0] == vs[2] != vs[1]
    d1 = standard_simplex(1)
    for k in range(2):
        x = d1.act(top(d1), degeneracy(1, k))
        vs = d1.vertices(x)
        assert vs[k] == vs[k + 1]


def test_injective_representing_map():
    for n in range(4):
        dn = standard_simplex(n)
        assert dn.is_injective_representing_map(top(dn))
        assert not dn.is_injective_representing_map(dn.act(top(dn), degeneracy(n, 0)))
    Q = q_example()
    assert not Q.is_injective_representing_map(top(Q))


def test_functoriality_exhaustive():
    for X in corpus():
        for n in range(min(X.dim, 4) + 1):
            for x in X.level(n):
                for m in range(5):
                    for a in all_operators(m, n):
                        xa = X.act(x, a)
                        for k in range(4):
                            for b in all_operators(k, m):
                                assert X.act(xa, b) == X.act(x, compose(b, a))


# -- EZ decomposition ----------------------------------------------------------------


def test_ez_examples():
    L = SimplexLevels(2)
    assert ez_decompose(L, (0, 1, 2), 2) == ((0, 1, 2), (0, 1, 2))
    assert ez_decompose(L, (0, 0, 2), 2) == ((0, 2), (0, 0, 1))
    assert ez_decompose(L, (1, 1, 1), 2) == ((1,), (0, 0, 0))


def test_ez_unique_in_every_level():
    for X in corpus():
        for n in range(X.dim + 3):
            seen = {}
            for cid in X.order:
                d = X.cells[cid].dim
                for s in surjection_tuples(n, d) if d <= n else ():
                    y = X.act(X.simplex(cid), s)
                    assert y == Simplex(cid, s)
                    assert y not in seen
                    seen[y] = (cid, s)
            assert len(seen) == X.level_size(n)


# -- presentations ---------------------------------------------------------------------


@pytest.mark.parametrize("n", range(5))
def test_presentation_of_standard_simplex(n):
    from math import comb

    X = presentation_from_levels(SimplexLevels(n), n)
    assert X.counts() == tuple(comb(n + 1, k + 1) for k in range(n + 1))


def test_presentation_of_point():
    X = presentation_from_levels(PointLevels(), 3)
    assert X.counts() == (1,)


def test_presentation_of_square():
    d1 = standard_simplex(1)
    X = presentation_from_levels(PairLevels(d1, d1), 2)
    assert X.counts() == (4, 5, 2)


# -- validation ------------------------------------------------------------------------


def test_empty_set():
    E = SSet([])
    assert E.dim == -1 and len(E) == 0 and E.counts() == ()


def test_rejects_dangling_face():
    with pytest.raises(SSetError, match="unknown cell"):
        SSet([Cell("e", 1, (Simplex("a", (0,)), Simplex("b", (0,)))), Cell("a", 0)])


def test_rejects_wrong_face_count():
    with pytest.raises(SSetError, match="faces"):
        SSet([Cell("a", 0), Cell("e", 1, (Simplex("a", (0,)),))])


def test_rejects_non_surjective_face():
    with pytest.raises(SSetError, match="surjective|land"):
        SSet([Cell("a", 0), Cell("e", 1, (Simplex("a", (0,)), Simplex("a", (0,)))),
              Cell("t", 2, (Simplex("e", (0, 1)), Simplex("e", (0, 1)), Simplex("a", (1, 1))))])


def test_rejects_incoherent_faces():
    cells = [Cell("a", 0), Cell("b", 0),
             Cell("e", 1, (Simplex("b", (0,)), Simplex("a", (0,)))),
             Cell("f", 1, (Simplex("a", (0,)), Simplex("b", (0,)))),
             Cell("t", 2, (Simplex("e", (0, 1)), Simplex("e", (0, 1)), Simplex("e", (0, 1))))]
    with pytest.raises(SSetError, match="incoherent"):
        SSet(cells)


def test_rejects_duplicate_ids():
    with pytest.raises(SSetError, match="duplicate"):
        SSet([Cell("a", 0), Cell("a", 0)])


# -- maps ------------------------------------------------------------------------------


def test_smap_naturality_checked():
    d1 = standard_simplex(1)
    with pytest.raises(SSetError, match="natural"):
        SMap(d1, d1, {"0": d1.simplex("1"), "1": d1.simplex("0"), "0_1": d1.simplex("0_1")})
    with pytest.raises(SSetError, match="does not assign"):
        SMap(d1, d1, {"0": d1.simplex("0")})


def test_is_iso_examples():
    for X in corpus():
        assert is_iso(identity_map(X))
    d2 = standard_simplex(2)
    _, proj = quotient(d2, [(d2.simplex("0"), d2.simplex("2"))])
    assert not is_iso(proj)


def test_maps_commute_with_all_operators():
    for X, _, proj in [(standard_simplex(2), *quotient(standard_simplex(2), [(Simplex("0", (0,)), Simplex("2", (0,)))]))]:
        for n in range(4):
            for x in X.level(n):
                for m in range(4):
                    for a in all_operators(m, n):
                        assert proj(X.act(x, a)) == proj.target.act(proj(x), a)


def test_composition_associative():
    d2 = standard_simplex(2)
    Q, p = quotient(d2, [(d2.simplex("0_1"), d2.simplex("1_2"))])
    R, q = quotient(Q, [(Q.simplex(Q.vertex_ids()[0]), Q.simplex(Q.vertex_ids()[-1]))])
    i = identity_map(R)
    assert p.then(q).then(i) == p.then(q.then(i))


@given(random_quotients(), st.integers(0, 3), st.data())
def test_quotient_maps_are_natural(triple, m, data):
    X, Q, proj = triple
    proj.validate()
    n = data.draw(st.integers(0, max(X.dim, 0)))
    x = data.draw(st.sampled_from(X.level(n)))
    a = data.draw(st.sampled_from(list(all_operators(m, n))))
    assert proj(X.act(x, a)) == Q.act(proj(x), a)


def test_circle_has_one_vertex_one_edge():
    assert circle().counts() == (1, 1)
