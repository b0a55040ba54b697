"""Homomorphisms, crossed homomorphisms and their enumeration."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence, Union

import numpy as np

from . import kernels
from .errors import BudgetExceeded, ConstraintError, SpecError
from .group import FiniteGroup, generating_sequence

if TYPE_CHECKING:
    from .actions import Action, SemidirectProduct

DEFAULT_BUDGET = 10**7


@dataclass(eq=False)
class FpGroup:
    """Finitely presented group; a word is a tuple of signed 1-based generator indices."""

    generator_count: int
    relators: tuple[tuple[int, ...], ...] = ()
    label: str = "F"

    def __post_init__(self):
        self.relators = tuple(tuple(int(s) for s in w) for w in self.relators)
        for w in self.relators:
            for s in w:
                if s == 0 or abs(s) > self.generator_count:
                    raise SpecError(f"{self.label}: relator {w} references a missing generator")

    @classmethod
    def abelian(cls, moduli: Sequence[int], label: str | None = None) -> "FpGroup":
        """Free abelian-by-torsion presentation; modulus 0 leaves a factor infinite."""
        k = len(moduli)
        rels = [(i + 1,) * n for i, n in enumerate(moduli) if n > 0]
        rels += [(-(i + 1), -(j + 1), i + 1, j + 1) for i in range(k) for j in range(i + 1, k)]
        return cls(k, tuple(rels), label or "Zhat:" + ",".join(map(str, moduli)))


Source = Union[FiniteGroup, FpGroup]


@dataclass(eq=False)
class Homomorphism:
    """``images`` is indexed by source elements (finite source) or generators (presented)."""

    source: Source
    target: FiniteGroup
    images: np.ndarray

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.int32)

    @property
    def key(self) -> bytes:
        return self.images.tobytes()

    def __call__(self, x: int) -> int:
        return int(self.images[x])

    def evaluate(self, word: Sequence[int]) -> int:
        """Image of a word in the generators (presented sources)."""
        G = self.target
        x = 0
        for s in word:
            g = int(self.images[abs(s) - 1])
            x = G.mul(x, g if s > 0 else G.inv(g))
        return x

    def is_valid(self) -> bool:
        G = self.target
        if isinstance(self.source, FpGroup):
            return all(self.evaluate(w) == 0 for w in self.source.relators)
        img = self.images.astype(np.int64)
        return bool(np.array_equal(G.table[np.ix_(img, img)], img[self.source.table]))

    def check(self) -> None:
        if not self.is_valid():
            raise AssertionError(f"not a homomorphism {self.source.label} -> {self.target.label}")

    def image_elements(self) -> np.ndarray:
        if isinstance(self.source, FpGroup):
            return kernels.generated_mask(self.target.table, self.images).nonzero()[0]
        return np.unique(self.images)

    def is_injective(self) -> bool:
        return np.unique(self.images).size == self.images.size

    def is_surjective(self) -> bool:
        return self.image_elements().size == self.target.order

    def kernel_elements(self) -> np.ndarray:
        return np.flatnonzero(self.images == 0)


@dataclass(eq=False)
class CrossedHom:
    """A map alpha: M -> H with alpha(ab) = alpha(a)^b alpha(b)."""

    action: "Action"
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int32)

    @property
    def actor(self) -> FiniteGroup:
        return self.action.actor

    @property
    def target(self) -> FiniteGroup:
        return self.action.target

    def is_valid(self) -> bool:
        M, H = self.actor, self.target
        v = self.values.astype(np.int64)
        if v[0] != 0:
            return False
        per = self.action.per_element
        lhs = v[M.table]
        # alpha(a)^b, indexed [a, b]
        twisted = per[np.arange(M.order)[None, :], v[:, None]]
        rhs = H.table[twisted, v[None, :]]
        return bool(np.array_equal(lhs, rhs))


@dataclass(eq=False)
class SectionConstraint:
    """Require pi(phi(f)) = required[f] for every source element (or generator) f.

    ``projection`` is a homomorphism from the ambient target onto a quotient;
    its kernel is the subgroup H whose cosets the images must lie in.
    """

    projection: Homomorphism
    required: np.ndarray

    def __post_init__(self):
        self.required = np.asarray(self.required, dtype=np.int64)

    @property
    def ambient(self) -> FiniteGroup:
        return self.projection.source

    @classmethod
    def sections(cls, sd: "SemidirectProduct") -> "SectionConstraint":
        """Homomorphisms M -> M x| H of the form a -> (a, h_a)."""
        return cls(sd.project_M, np.arange(sd.actor.order))

    def check_consistent(self, F: Source) -> None:
        Q = self.projection.target
        req = self.required
        if isinstance(F, FpGroup):
            probe = Homomorphism(F, Q, req)
            if req.shape != (F.generator_count,) or not probe.is_valid():
                raise ConstraintError("required quotient images do not define a homomorphism")
        else:
            if req.shape != (F.order,) or not Homomorphism(F, Q, req).is_valid():
                raise ConstraintError("required quotient images do not define a homomorphism")


def _candidates(lists: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    width = max((len(c) for c in lists), default=0)
    cand = np.zeros((len(lists), max(width, 1)), np.int64)
    ncand = np.zeros(len(lists), np.int64)
    for i, c in enumerate(lists):
        cand[i, : len(c)] = c
        ncand[i] = len(c)
    return cand, ncand


def _sorted_unique(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] <= 1:
        return rows
    return np.unique(rows, axis=0)


def hom_images(F: Source, G: FiniteGroup, constraint: SectionConstraint | None = None,
               budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Image arrays of every homomorphism F -> G, as rows sorted lexicographically."""
    if constraint is not None:
        if constraint.ambient is not G:
            raise ConstraintError("constraint refers to a different target group")
        constraint.check_consistent(F)
    if isinstance(F, FpGroup):
        return _presented_images(F, G, constraint, budget)
    gens = generating_sequence(F)
    gorders = G.orders
    lists = []
    for g in gens:
        ok = F.orders[g] % gorders == 0
        if constraint is not None:
            ok &= constraint.projection.images == constraint.required[g]
        lists.append(np.flatnonzero(ok))
    cand, ncand = _candidates(lists)
    rows, evals = kernels.hom_search(F.table, G.table, np.asarray(gens, np.int64), cand, ncand,
                                     budget)
    if evals > budget:
        raise BudgetExceeded(f"Hom({F.label}, {G.label}): more than {budget} evaluations")
    return _sorted_unique(rows)


def _presented_images(F: FpGroup, G: FiniteGroup, constraint, budget) -> np.ndarray:
    k = F.generator_count
    lists = []
    for i in range(k):
        if constraint is None:
            lists.append(np.arange(G.order))
        else:
            lists.append(np.flatnonzero(constraint.projection.images == constraint.required[i]))
    cand, ncand = _candidates(lists)
    rels = F.relators
    width = max((len(w) for w in rels), default=1)
    rel = np.zeros((len(rels), max(width, 1)), np.int64)
    rellen = np.zeros(len(rels), np.int64)
    relmax = np.full(len(rels), -1, np.int64)
    for r, w in enumerate(rels):
        rel[r, : len(w)] = w
        rellen[r] = len(w)
        if w:
            relmax[r] = max(abs(s) for s in w) - 1
    rows, evals = kernels.relator_search(G.table, G.inverses.astype(np.int64), rel, rellen,
                                         relmax, cand, ncand, budget)
    if evals > budget:
        raise BudgetExceeded(f"Hom({F.label}, {G.label}): more than {budget} evaluations")
    return _sorted_unique(rows)


def enumerate_homs(F: Source, G: FiniteGroup, constraint: SectionConstraint | None = None,
                   budget: int = DEFAULT_BUDGET) -> list[Homomorphism]:
    return [Homomorphism(F, G, row) for row in hom_images(F, G, constraint, budget)]


def count_homs(F: Source, G: FiniteGroup, constraint: SectionConstraint | None = None,
               budget: int = DEFAULT_BUDGET) -> int:
    return int(hom_images(F, G, constraint, budget).shape[0])


def crossed_values(action: "Action", budget: int = DEFAULT_BUDGET, max_order: int = 4096
                   ) -> np.ndarray:
    """Rows alpha(a) for every crossed homomorphism, via sections of M x| H."""
    from .actions import semidirect_product

    sd = semidirect_product(action, max_order=max_order)
    rows = hom_images(action.actor, sd.product, SectionConstraint.sections(sd), budget)
    return rows % action.target.order


def enumerate_crossed_homs(action: "Action", budget: int = DEFAULT_BUDGET,
                           max_order: int = 4096) -> list[CrossedHom]:
    return [CrossedHom(action, v) for v in crossed_values(action, budget, max_order)]


def count_crossed_homs(action: "Action", budget: int = DEFAULT_BUDGET,
                       max_order: int = 4096) -> int:
    return int(crossed_values(action, budget, max_order).shape[0])


def presented_crossed_values(moduli: Sequence[int], generator_perms: Sequence[Sequence[int]],
                             H: FiniteGroup, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Crossed homomorphisms from Z/n1 x ... x Z/nk (0 = infinite) into H.

    The i-th generator acts on H by ``generator_perms[i]``.  Rows hold the
    values on the generators; they are found as sections of the finite group
    A x| H, where A is the permutation group the generators act through.
    """
    from .actions import Action, semidirect_product
    from .group import _perm_table, permutation_closure

    perms = [tuple(int(x) for x in p) for p in generator_perms]
    if len(perms) != len(moduli):
        raise SpecError("one permutation per generator is required")
    elements = permutation_closure(perms or [tuple(range(H.order))], max_order=10**6)
    if any(len(p) != H.order for p in perms):
        raise SpecError("permutations must act on every element of H")
    A = _perm_table(elements, "image", max_order=10**6)
    action = Action(A, H, np.array(elements, np.int32))
    sd = semidirect_product(action, max_order=10**6)
    index = {p: i for i, p in enumerate(elements)}
    required = np.array([index[p] for p in perms], np.int64)
    F = FpGroup.abelian(moduli)
    rows = hom_images(F, sd.product, SectionConstraint(sd.project_M, required), budget)
    return rows % H.order


def count_nth_roots(G: FiniteGroup, n: int) -> int:
    """|{x in G : x^n = 1}|."""
    if n < 1:
        raise ValueError("n must be positive")
    return int((n % G.orders == 0).sum())
