"""Executable checks of the main statements on the built-in corpus.

Each suite yields report entries tagged with the statement they exercise.
Reports are deterministic apart from the wall-time field.
"""
from __future__ import annotations

import json
import time
from itertools import combinations
from typing import Callable, NamedTuple

from . import corpus as C
from .constructors import (
    Poset,
    boundary,
    coproduct,
    coproduct_inclusion,
    poset_nerve,
    prism_generators,
    product,
    sigma_gamma_holds,
    standard_simplex,
)
from .covers import cube_inclusion, cube_retraction, restriction_injective, retraction_holds, simplex_cover
from .mapping import (
    census,
    check_vertex_propagation,
    count_maps,
    degenerate_prism,
    exponential,
    prism_simplices,
    psi_from_phi,
)
from .sset import SMap, Simplex
from .nonsingular import (
    InvariantError,
    equalizer_counterexample,
    factor_through_degeneracy,
    factorizations_agree,
    is_nonsingular,
    product_comparison,
    pushout_product_comparison,
)

TAGS = (
    "Thm 1.1",
    "Prop 1.2",
    "Prop 1.3",
    "Prop 1.4",
    "Lem 2.2",
    "Lem 2.3",
    "Lem 2.4",
    "Rel 2.1",
    "Eq 2.2",
    "Eq 2.4",
    "Eq 2.5",
    "Remark-equalizer",
    "§3-retraction",
    "§3-cover",
)


class Entry(NamedTuple):
    tag: str
    instance: str
    passed: bool
    counterexample: object = None

    def as_dict(self) -> dict:
        return {
            "tag": self.tag,
            "instance": self.instance,
            "passed": self.passed,
            "counterexample": self.counterexample,
        }


class VerificationReport(NamedTuple):
    suite: str
    entries: tuple
    wall_time: float

    @property
    def passed(self) -> int:
        return sum(1 for e in self.entries if e.passed)

    @property
    def failed(self) -> int:
        return len(self.entries) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "entries": [e.as_dict() for e in self.entries],
            "totals": {"entries": len(self.entries), "passed": self.passed, "failed": self.failed},
            "wall_time": round(self.wall_time, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        lines = []
        for e in self.entries:
            mark = "PASS" if e.passed else "FAIL"
            line = f"{mark}  {e.tag:<17} {e.instance}"
            if e.counterexample is not None:
                line += f"  -- {e.counterexample}"
            lines.append(line)
        lines.append(f"{self.passed}/{len(self.entries)} passed in {self.wall_time:.1f}s")
        return "\n".join(lines)


# -- instance lists ------------------------------------------------------------------


def exponent_pairs() -> list:
    d1, d2 = standard_simplex(1), standard_simplex(2)
    Xs = [d2, boundary(3), poset_nerve(Poset.grid(1, 1), "N11"), poset_nerve(Poset.grid(2, 1), "N21")]
    Ks = [d1, d2, product(d1, d1)]
    return [(X, K) for X in Xs for K in Ks]


def product_pairs() -> list:
    Q, S = C.q_example(), C.circle()
    d1 = standard_simplex(1)
    R = C.random_quotient(C.RANDOM_SEEDS[0])
    N = poset_nerve(Poset.grid(1, 1), "N11")
    return [(d1, d1), (Q, Q), (Q, d1), (S, S), (Q, S), (R, d1), (N, Q)]


def _name(X) -> str:
    return X.name or "?"


# -- suites ----------------------------------------------------------------------------


def suite_thm_1_1(budget: int | None = None) -> list:
    out = []
    for X, K in exponent_pairs():
        inst = f"{_name(X)}^{_name(K)}"
        try:
            c = census(X, K, budget)
        except MemoryError as exc:
            out.append(Entry("Thm 1.1", inst, False, f"resources exhausted: {exc}"))
            continue
        except RuntimeError as exc:
            out.append(Entry("Thm 1.1", inst, False, f"not decided: {exc}"))
            continue
        cex = None if c.nonsingular else f"non-degenerate simplex with a repeated vertex in degree {c.failed_degree}"
        out.append(Entry("Thm 1.1", f"{inst} cells={sum(c.counts)} by degree {list(c.counts)}", c.nonsingular, cex))
    return out


def suite_prop_1_3() -> list:
    d1 = standard_simplex(1)
    out = []
    for X in C.nonsingular_corpus():
        E = exponential(X, d1)
        chk = is_nonsingular(E)
        cex = None if chk else list(chk.witness)
        out.append(Entry("Prop 1.3", f"{_name(X)}^Delta[1] cells by degree {list(E.counts())}", chk.ok, cex))
    E = exponential(d1, d1)
    counts = E.counts()
    ok = counts[:2] == (3, 3) and E.levels.rows(0).shape[0] == 3 and E.levels.rows(1).shape[0] == 6
    out.append(Entry("Prop 1.3", f"Delta[1]^Delta[1] has 3 vertices and 3 non-degenerate edges: {list(counts)}", ok))
    return out


def suite_lem_2_2(max_degree: int = 4) -> list:
    out = []
    for X in C.nonsingular_corpus():
        checked = 0
        bad = []
        for n in range(max_degree + 1):
            for x in X.level(n):
                vs = X.vertices(x)
                for k, l in combinations(range(n + 1), 2):
                    if vs[k] != vs[l]:
                        continue
                    checked += 1
                    try:
                        factor_through_degeneracy(X, x, k, l)
                        if not factorizations_agree(X, x, k, l):
                            bad.append((repr(x), k, l, "sections disagree"))
                    except (InvariantError, ValueError) as exc:
                        bad.append((repr(x), k, l, str(exc)))
        out.append(Entry("Lem 2.2", f"{_name(X)} degrees <= {max_degree}: {checked} factorizations", not bad, bad[:3] or None))
    return out


def _lemma_targets() -> list:
    return [standard_simplex(2), poset_nerve(Poset.grid(1, 1), "N11")]


def suite_lem_2_3(max_n: int = 3) -> list:
    out = []
    for X in _lemma_targets():
        checked = 0
        bad = []
        for n in range(1, max_n + 1):
            for phi in prism_simplices(X, n):
                vs = phi.vertices(X)
                for k, l in combinations(range(n + 1), 2):
                    if vs[k] != vs[l]:
                        continue
                    checked += 1
                    res = check_vertex_propagation(phi, X, k, l)
                    if res is not True:
                        bad.append((repr(phi.values), k, l, res.reason))
        out.append(Entry("Lem 2.3", f"{_name(X)}^Delta[1] degrees <= {max_n}: {checked} cases", not bad, bad[:3] or None))
    return out


def suite_lem_2_4(max_n: int = 3) -> list:
    out = []
    for X in [standard_simplex(2), boundary(3), poset_nerve(Poset.grid(1, 1), "N11")]:
        cases = 0
        bad = {"Lem 2.4": [], "Eq 2.4": [], "Eq 2.5": []}
        for n in range(1, max_n + 1):
            for phi in prism_simplices(X, n):
                vs = phi.vertices(X)
                for k in range(n):
                    if vs[k] != vs[k + 1]:
                        continue
                    cases += 1
                    try:
                        psi = psi_from_phi(phi, X, k)
                    except InvariantError as exc:
                        bad["Lem 2.4"].append((repr(phi.values), k, str(exc)))
                        continue
                    if not psi.gluing_ok(X):
                        bad["Eq 2.4"].append((repr(phi.values), k))
                    back = degenerate_prism(psi, X, k)
                    wrong = [j for j in range(n + 1) if back.values[j] != phi.values[j]]
                    if wrong:
                        bad["Eq 2.5"].append((repr(phi.values), k, wrong))
                    if back != phi:
                        bad["Lem 2.4"].append((repr(phi.values), k, "Phi != Psi sigma_k"))
        for tag in ("Lem 2.4", "Eq 2.4", "Eq 2.5"):
            out.append(Entry(tag, f"{_name(X)}^Delta[1] degrees <= {max_n}: {cases} cases", not bad[tag], bad[tag][:3] or None))
    return out


def suite_rel_2_1(max_n: int = 5) -> list:
    out = []
    for n in range(max_n + 1):
        try:
            G = prism_generators(n)
            ok = all(G.is_injective(j) for j in range(n + 1))
            out.append(Entry("Rel 2.1", f"prism over Delta[{n}]: {n} relations, {n + 1} injective generators", ok))
        except ValueError as exc:
            out.append(Entry("Rel 2.1", f"prism over Delta[{n}]", False, str(exc)))
    return out


def suite_eq_2_2(max_n: int = 5) -> list:
    out = []
    for n in range(1, max_n + 1):
        bad = [(k, j) for k in range(n) for j in range(n + 1) if not sigma_gamma_holds(n, k, j)]
        total = n * (n + 1)
        out.append(Entry("Eq 2.2", f"n={n}: {total} pairs (k, j)", not bad, bad or None))
    return out


def suite_prop_1_4() -> list:
    out = []
    for X, Y in product_pairs():
        cmp = product_comparison(X, Y)
        ok = cmp.iso and cmp.surjective
        cex = None if ok else {"iso": cmp.iso, "surjective": cmp.surjective}
        inst = f"D({_name(X)} x {_name(Y)}) -> D{_name(X)} x D{_name(Y)}, cells {list(cmp.a.source.counts())}"
        out.append(Entry("Prop 1.4", inst, ok, cex))
    return out


def pushout_instances() -> list:
    """(name, i, j): spans X <- A -> Y."""
    d0, d1, d2 = standard_simplex(0), standard_simplex(1), standard_simplex(2)
    edge = SMap(d1, d2, {"0": d2.simplex("0"), "1": d2.simplex("2"), "0_1": d2.simplex("0_2")})
    crush = SMap(d1, d0, {"0": d0.simplex("0"), "1": d0.simplex("0"), "0_1": Simplex("0", (0, 0))})
    pts = coproduct([d0, d0])
    ends = SMap(pts, d1, {"0:0": d1.simplex("0"), "1:0": d1.simplex("1")})
    return [
        ("Delta[2] +_{Delta[1]} Delta[0] (collapse of the 0_2 edge)", edge, crush),
        ("Delta[1] +_{dDelta[1]} Delta[1] (two edges glued at their ends)", ends, ends),
    ]


def adjunction_triples(max_cells: int = 12) -> list:
    sets = C.small(C.corpus(), max_cells)
    return [(X, K, Y) for X in sets for K in sets for Y in sets]


def adjunction_holds(X, K, Y) -> tuple:
    """(|maps(X x K, Y)|, |maps(X, Y^K)|) with Y^K built up to degree dim X."""
    left = count_maps(product(X, K), Y)
    E = exponential(Y, K, cap=max(X.dim, 0), probe=False)
    right = count_maps(X, E)
    return left, right


def suite_prop_1_2(adjunction: bool = True) -> list:
    d1 = standard_simplex(1)
    out = []
    for name, i, j in pushout_instances():
        rep = pushout_product_comparison(i, j, d1)
        out.append(Entry("Prop 1.2", f"{name} x Delta[1]: cells {list(rep.source_counts)}", rep.iso))
    if adjunction:
        bad = []
        triples = adjunction_triples()
        for X, K, Y in triples:
            left, right = adjunction_holds(X, K, Y)
            if left != right:
                bad.append((_name(X), _name(K), _name(Y), left, right))
        out.append(Entry("Prop 1.2", f"|maps(X x K, Y)| = |maps(X, Y^K)| over {len(triples)} corpus triples", not bad, bad[:5] or None))
    return out


def suite_remark() -> list:
    rep = equalizer_counterexample()
    inst = (
        f"Q cells {list(rep.quotient_cells)}, DQ cells {list(rep.dq_cells)}, "
        f"D(equalizer) has {rep.d_of_equalizer_cells} cells, equalizer of D-images has {rep.equalizer_of_d_cells}"
    )
    return [Entry("Remark-equalizer", inst, rep.passed)]


def suite_retraction(max_n: int = 3, max_level: int = 3) -> list:
    out = []
    d1 = standard_simplex(1)
    for n in range(1, max_n + 1):
        ok = retraction_holds(n)
        out.append(Entry("§3-retraction", f"r o i = id on Delta[{n}] -> Delta[1]^{n}", ok))
        r = cube_retraction(n)
        bad = [m for m in range(max_level + 1) if not restriction_injective(r, d1, m)]
        out.append(Entry("§3-retraction", f"r^* : Delta[1]^Delta[{n}] -> Delta[1]^(Delta[1]^{n}) injective in degrees <= {max_level}", not bad, bad or None))
    return out


def suite_cover(max_level: int = 3) -> list:
    out = []
    targets = [standard_simplex(1), boundary(2)]
    for K in C.small(C.corpus(), 12):
        s = simplex_cover(K)
        surj = s.is_degreewise_surjective(max(K.dim, 0) + 1)
        out.append(Entry("§3-cover", f"s : L -> {_name(K)} degreewise surjective ({len(s.source)} cells in L)", surj))
        bad = []
        for X in targets:
            for m in range(max_level + 1):
                if not restriction_injective(s, X, m):
                    bad.append((_name(X), m))
        out.append(Entry("§3-cover", f"s^* into X^L injective in degrees <= {max_level} for X in Delta[1], dDelta[2], K = {_name(K)}", not bad, bad or None))
    return out


SUITES: dict = {
    "thm-1.1": suite_thm_1_1,
    "prop-1.2": suite_prop_1_2,
    "prop-1.3": suite_prop_1_3,
    "prop-1.4": suite_prop_1_4,
    "lem-2.2": suite_lem_2_2,
    "lem-2.3": suite_lem_2_3,
    "lem-2.4": suite_lem_2_4,
    "rel-2.1": suite_rel_2_1,
    "eq-2.2": suite_eq_2_2,
    "remark-equalizer": suite_remark,
    "s3-retraction": suite_retraction,
    "s3-cover": suite_cover,
}


def run_suite(name: str = "all") -> VerificationReport:
    if name == "all":
        chosen = list(SUITES)
    elif name in SUITES:
        chosen = [name]
    else:
        raise KeyError(f"unknown suite {name!r}; choose 'all' or one of {', '.join(SUITES)}")
    start = time.perf_counter()
    entries = []
    for key in chosen:
        entries.extend(SUITES[key]())
    return VerificationReport(name, tuple(entries), time.perf_counter() - start)
