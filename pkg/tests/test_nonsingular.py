import pytest
from hypothesis import given

from nonsing.constructors import boundary, quotient, standard_simplex
from nonsing.corpus import circle, nonsingular_corpus, q_example, quotient_corpus
from nonsing.mapping import count_maps, enumerate_maps, iter_assignments
from nonsing.nonsingular import (
    PreconditionError,
    Witness,
    collapse_operator,
    collisions,
    desingularize,
    equalizer,
    equalizer_counterexample,
    factor_through_degeneracy,
    factorizations_agree,
    is_nonsingular,
    product_comparison,
    pushout_product_comparison,
    singular_cells,
)
from nonsing.sset import identity_map, is_iso
from nonsing.verify import product_pairs, pushout_instances
from strategies import random_quotients

TARGETS = [standard_simplex(0), standard_simplex(1), boundary(2), standard_simplex(2)]


def test_nonsingular_corpus_is_nonsingular():
    for X in nonsingular_corpus():
        assert is_nonsingular(X)
        assert singular_cells(X) == []


def test_q_witness():
    Q = q_example()
    check = is_nonsingular(Q)
    assert not check
    top = Q.cells_of_dim(2)[0]
    assert check.witness == Witness(top, 0, 2)
    assert collisions(Q, top) == [(0, 2)]


def test_circle_witness():
    S = circle()
    check = is_nonsingular(S)
    assert check.witness == Witness(S.cells_of_dim(1)[0], 0, 1)


def test_collapse_operator():
    assert collapse_operator(3, 1, 3).images == (0, 1, 1, 1)
    assert collapse_operator(2, 0, 1).images == (0, 0, 1)
    with pytest.raises(PreconditionError):
        collapse_operator(2, 1, 1)


def test_factorization_exhaustive():
    found = 0
    for X in nonsingular_corpus():
        for n in range(1, 5):
            for x in X.level(n):
                vs = X.vertices(x)
                for k in range(n + 1):
                    for l in range(k + 1, n + 1):
                        if vs[k] != vs[l]:
                            continue
                        found += 1
                        y = factor_through_degeneracy(X, x, k, l)
                        assert X.act(y, collapse_operator(n, k, l)) == x
                        assert factor_through_degeneracy(X, x, k, l, policy="maximal") == y
                        assert factorizations_agree(X, x, k, l)
    assert found > 1000


def test_factorization_preconditions():
    d2 = standard_simplex(2)
    with pytest.raises(PreconditionError, match="differ"):
        factor_through_degeneracy(d2, d2.simplex("0_1_2"), 0, 2)
    Q = q_example()
    top = Q.simplex(Q.cells_of_dim(2)[0])
    with pytest.raises(PreconditionError, match="singular"):
        factor_through_degeneracy(Q, top, 0, 2)
    # in Q the two sections of sigma_0 sigma_1 give different faces
    assert not factorizations_agree(Q, top, 0, 2)


@pytest.mark.parametrize("X", [q_example(), circle()], ids=["Q", "circle"])
def test_desingularize_to_point(X):
    res = desingularize(X)
    assert res.reflection.counts() == (1,)
    assert res.steps


def test_desingularize_nonsingular_is_identity():
    for X in nonsingular_corpus():
        res = desingularize(X)
        assert res.steps == []
        assert res.reflection is X
        assert res.unit == identity_map(X)


def test_desingularize_edge_loop_in_triangle():
    d2 = standard_simplex(2)
    Q, _ = quotient(d2, [(d2.simplex("0"), d2.simplex("1"))])
    res = desingularize(Q)
    assert is_nonsingular(res.reflection)
    assert res.reflection.counts() == (2, 1)


def _reflector_laws(X, Y=None):
    res = desingularize(X)
    D = res.reflection
    assert is_nonsingular(D)
    assert desingularize(D).steps == []
    assert res.unit.is_degreewise_surjective(max(X.dim, 0) + 1)
    for T in TARGETS if Y is None else [Y]:
        n = count_maps(X, T)
        assert count_maps(D, T) == n
        assert sum(1 for _ in iter_assignments(X, T)) == n
    return res


def test_reflector_laws_on_quotient_corpus():
    for X in quotient_corpus():
        _reflector_laws(X)


@given(random_quotients())
def test_reflector_laws_on_random_quotients(triple):
    _, Q, _ = triple
    _reflector_laws(Q, TARGETS[2])


def test_factor_through_unit():
    X = q_example()
    res = desingularize(X)
    d1 = standard_simplex(1)
    for h in enumerate_maps(X, d1):
        g = res.factor(h)
        assert res.unit.then(g) == h


@pytest.mark.parametrize("X", list(quotient_corpus()), ids=lambda X: X.name)
def test_order_independence(X):
    base = desingularize(X)
    for how, seed in [("reverse", 0), ("random", 1), ("random", 7), (lambda ws: ws[len(ws) // 2], 0)]:
        other = desingularize(X, select=how, seed=seed)
        assert other.reflection.counts() == base.reflection.counts()
        assert is_iso(base.factor(other.unit))
        assert is_iso(other.factor(base.unit))


def test_unknown_selection():
    with pytest.raises(ValueError):
        desingularize(q_example(), select="sideways")


@pytest.mark.parametrize("pair", product_pairs(), ids=lambda p: f"{p[0].name}x{p[1].name}")
def test_product_comparison(pair):
    X, Y = pair
    cmp = product_comparison(X, Y)
    assert cmp.surjective
    assert cmp.iso


def test_product_comparison_circle_squared_is_point():
    S = circle()
    cmp = product_comparison(S, S)
    assert cmp.a.target.counts() == (1,)


def test_equalizer_of_equal_maps_is_everything():
    d2 = standard_simplex(2)
    f = identity_map(d2)
    eq, inc = equalizer(f, f)
    assert eq.counts() == d2.counts()


def test_equalizer_counterexample():
    rep = equalizer_counterexample()
    assert rep.passed
    assert rep.quotient_cells == (2, 2, 1)
    assert rep.dq_cells == (1,)
    assert rep.sset_equalizer_cells == 0 and rep.d_of_equalizer_cells == 0
    assert rep.equalizer_of_d_cells == 1


@pytest.mark.parametrize("inst", pushout_instances(), ids=lambda t: t[0][:20])
def test_pushout_product(inst):
    _, i, j = inst
    rep = pushout_product_comparison(i, j, standard_simplex(1))
    assert rep.iso
    assert rep.source_counts == rep.target_counts


def test_pushout_product_needs_nonsingular_factor():
    _, i, j = pushout_instances()[0]
    with pytest.raises(PreconditionError):
        pushout_product_comparison(i, j, circle())
