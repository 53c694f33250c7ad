"""Operators: monotone maps [m] -> [n], the morphisms of the simplex category.

An operator is stored as its dense image list together with its codomain.
Composition is index lookup; the epi-mono factorization and the elementary
words are derived views.
"""
from __future__ import annotations

from itertools import combinations, combinations_with_replacement
from typing import Iterator, Sequence


class OperatorError(ValueError):
    """Raised for malformed operators and shape mismatches."""


class Operator:
    __slots__ = ("images", "codomain")

    def __init__(self, images: Sequence[int], codomain: int | None = None):
        images = tuple(int(v) for v in images)
        if not images:
            raise OperatorError("an operator needs a non-empty domain")
        if codomain is None:
            codomain = images[-1]
        codomain = int(codomain)
        if images[0] < 0 or images[-1] > codomain:
            raise OperatorError(f"images {list(images)} out of range [0, {codomain}]")
        for a, b in zip(images, images[1:]):
            if a > b:
                raise OperatorError(f"images {list(images)} are not weakly increasing")
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "codomain", codomain)

    def __setattr__(self, name, value):
        raise AttributeError("Operator is immutable")

    @property
    def domain(self) -> int:
        return len(self.images) - 1

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return self.images == other.images and self.codomain == other.codomain

    def __hash__(self):
        return hash((self.images, self.codomain))

    def __lt__(self, other: "Operator"):
        return (self.domain, self.codomain, self.images) < (
            other.domain,
            other.codomain,
            other.images,
        )

    def __repr__(self):
        return f"Operator({list(self.images)}, to={self.codomain})"

    def is_injective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.codomain + 1

    def is_identity(self) -> bool:
        return self.domain == self.codomain and self.is_injective()

    def to_json(self) -> dict:
        return {"to": self.codomain, "images": list(self.images)}

    @classmethod
    def from_json(cls, data) -> "Operator":
        if isinstance(data, dict):
            return cls(data["images"], data["to"])
        return cls(data)


def identity(n: int) -> Operator:
    return Operator(range(n + 1), n)


def compose(first: Operator, second: Operator) -> Operator:
    """The composite ``second o first`` (apply ``first``, then ``second``).

    In the right-action notation ``x.alpha.beta`` this is ``compose(beta, alpha)``.
    """
    if first.codomain != second.domain:
        raise OperatorError(
            f"cannot compose [{first.domain}]->[{first.codomain}] "
            f"with [{second.domain}]->[{second.codomain}]"
        )
    imgs = second.images
    return Operator([imgs[i] for i in first.images], second.codomain)


def face(n: int, i: int) -> Operator:
    """delta^n_i : [n-1] -> [n], omitting i."""
    if n < 1 or not 0 <= i <= n:
        raise OperatorError(f"face operator delta^{n}_{i} does not exist")
    return Operator([j if j < i else j + 1 for j in range(n)], n)


def degeneracy(n: int, i: int) -> Operator:
    """sigma^n_i : [n+1] -> [n], sending i and i+1 to i."""
    if n < 0 or not 0 <= i <= n:
        raise OperatorError(f"degeneracy operator sigma^{n}_{i} does not exist")
    return Operator([j if j <= i else j - 1 for j in range(n + 2)], n)


def vertex(n: int, i: int) -> Operator:
    """epsilon^n_i : [0] -> [n], hitting i."""
    if n < 0 or not 0 <= i <= n:
        raise OperatorError(f"vertex operator epsilon^{n}_{i} does not exist")
    return Operator([i], n)


def elementary(kind: str, n: int, i: int) -> Operator:
    builders = {"face": face, "degeneracy": degeneracy, "vertex": vertex}
    try:
        return builders[kind](n, i)
    except KeyError:
        raise OperatorError(f"unknown operator kind {kind!r}") from None


def epi_mono_factorize(alpha: Operator) -> tuple[Operator, Operator]:
    """Return ``(rho, mu)`` with ``alpha = mu o rho``, rho surjective, mu injective."""
    image = sorted(set(alpha.images))
    position = {v: k for k, v in enumerate(image)}
    rho = Operator([position[v] for v in alpha.images], len(image) - 1)
    mu = Operator(image, alpha.codomain)
    return rho, mu


def section_of(rho: Operator, policy: str = "minimal") -> Operator:
    """A section ``mu`` of the surjection ``rho`` (``compose(mu, rho)`` is the identity).

    ``minimal`` picks the least preimage of each value, ``maximal`` the largest.
    """
    if not rho.is_surjective():
        raise OperatorError(f"{rho!r} is not surjective, so it has no section")
    if policy == "minimal":
        picks = {}
        for i, v in enumerate(rho.images):
            picks.setdefault(v, i)
    elif policy == "maximal":
        picks = {v: i for i, v in enumerate(rho.images)}
    else:
        raise OperatorError(f"unknown section policy {policy!r}")
    return Operator([picks[v] for v in range(rho.codomain + 1)], rho.domain)


def all_sections(rho: Operator) -> Iterator[Operator]:
    """Every section of a surjection, one preimage per value."""
    if not rho.is_surjective():
        raise OperatorError(f"{rho!r} is not surjective")
    fibres = [[] for _ in range(rho.codomain + 1)]
    for i, v in enumerate(rho.images):
        fibres[v].append(i)

    def rec(k, acc):
        if k == len(fibres):
            yield Operator(acc, rho.domain)
            return
        for i in fibres[k]:
            yield from rec(k + 1, acc + [i])

    yield from rec(0, [])


def face_word(mu: Operator) -> list[int]:
    """Indices ``[i_1, ..., i_r]`` with ``mu = delta_{i_1} o ... o delta_{i_r}``, i_1 > ... > i_r."""
    if not mu.is_injective():
        raise OperatorError(f"{mu!r} is not a face operator")
    missing = sorted(set(range(mu.codomain + 1)) - set(mu.images), reverse=True)
    return missing


def degeneracy_word(rho: Operator) -> list[int]:
    """Indices ``[j_1, ..., j_s]`` with ``rho = sigma_{j_1} o ... o sigma_{j_s}``, j_1 < ... < j_s."""
    if not rho.is_surjective():
        raise OperatorError(f"{rho!r} is not a degeneracy operator")
    return [i for i in range(rho.domain) if rho.images[i] == rho.images[i + 1]]


def from_face_word(n: int, word: Sequence[int]) -> Operator:
    """Rebuild ``delta_{i_1} o ... o delta_{i_r}`` with codomain [n]."""
    op = identity(n)
    m = n
    for i in word:
        op = compose(face(m, i), op)
        m -= 1
    return op


def from_degeneracy_word(n: int, word: Sequence[int]) -> Operator:
    """Rebuild ``sigma_{j_1} o ... o sigma_{j_s}`` with codomain [n] (j_1 < ... < j_s)."""
    word = sorted(word)
    m = n + len(word)
    return Operator([i - sum(1 for j in word if j < i) for i in range(m + 1)], n)


def all_operators(m: int, n: int) -> Iterator[Operator]:
    """All monotone maps [m] -> [n] in lexicographic order of images."""
    for imgs in combinations_with_replacement(range(n + 1), m + 1):
        yield Operator(imgs, n)


def injections(m: int, n: int) -> Iterator[Operator]:
    for imgs in combinations(range(n + 1), m + 1):
        yield Operator(imgs, n)


def surjections(m: int, n: int) -> Iterator[Operator]:
    """All surjections [m] ->> [n], i.e. choices of n cut points among m gaps."""
    if n > m:
        return
    for cuts in combinations(range(m), n):
        imgs = []
        v = 0
        cutset = set(cuts)
        for i in range(m + 1):
            imgs.append(v)
            if i in cutset:
                v += 1
        yield Operator(imgs, n)
