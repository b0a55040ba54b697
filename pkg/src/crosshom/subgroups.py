"""Subgroups as bitsets over a parent's element indices."""
from __future__ import annotations

import math
from functools import reduce
from typing import TYPE_CHECKING, Iterable

import numpy as np

from . import kernels
from .errors import OrderBoundError

if TYPE_CHECKING:
    from .group import FiniteGroup

SUBGROUP_BOUND = 64


class Subgroup:
    """A subset of ``parent`` closed under products and inverses.

    ``mask`` is a Python int with bit i set iff element i is a member; it is
    also the hash/equality key, so two Subgroup objects over the same parent
    compare equal exactly when they have the same members.
    """

    __slots__ = ("parent", "mask", "_elements")

    def __init__(self, parent: "FiniteGroup", mask: int):
        self.parent = parent
        self.mask = mask
        self._elements = None

    @classmethod
    def from_bool(cls, parent, members: np.ndarray) -> "Subgroup":
        packed = np.packbits(np.asarray(members, bool), bitorder="little")
        return cls(parent, int.from_bytes(packed.tobytes(), "little"))

    @classmethod
    def from_elements(cls, parent, elements: Iterable[int]) -> "Subgroup":
        mask = 0
        for x in elements:
            mask |= 1 << int(x)
        return cls(parent, mask)

    @property
    def order(self) -> int:
        return self.mask.bit_count()

    def __len__(self) -> int:
        return self.order

    @property
    def elements(self) -> np.ndarray:
        if self._elements is None:
            self._elements = np.flatnonzero(self.as_bool())
        return self._elements

    def as_bool(self) -> np.ndarray:
        n = self.parent.order
        raw = self.mask.to_bytes((n + 7) // 8, "little")
        return np.unpackbits(np.frombuffer(raw, np.uint8), bitorder="little")[:n].astype(bool)

    def __contains__(self, x) -> bool:
        return bool(self.mask >> int(x) & 1)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subgroup) and self.parent is other.parent
                and self.mask == other.mask)

    def __hash__(self) -> int:
        return hash((id(self.parent), self.mask))

    def __le__(self, other: "Subgroup") -> bool:
        return self.mask & ~other.mask == 0

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order} of {self.parent.label})"

    def conjugate(self, g: int) -> "Subgroup":
        """``S^g = g^-1 S g``."""
        t = self.parent.table
        ginv = self.parent.inverses[g]
        return Subgroup.from_elements(self.parent, t[t[ginv, self.elements], g])

    def is_normal(self) -> bool:
        return all(self.conjugate(g) == self for g in range(self.parent.order))

    def is_abelian(self) -> bool:
        e = self.elements
        block = self.parent.table[np.ix_(e, e)]
        return bool(np.array_equal(block, block.T))

    def check(self) -> None:
        """Assert the subgroup invariants (identity, closure, inverses, Lagrange)."""
        G = self.parent
        e = self.elements
        assert 0 in self, "identity missing"
        products = G.table[np.ix_(e, e)]
        assert all(int(x) in self for x in np.unique(products)), "not closed"
        assert all(int(x) in self for x in G.inverses[e]), "not closed under inverse"
        assert G.order % self.order == 0, "order does not divide parent order"

    def as_group(self):
        """This subgroup as a standalone FiniteGroup plus the index embedding."""
        from .group import make_group

        e = self.elements
        local = np.full(self.parent.order, -1, np.int64)
        local[e] = np.arange(e.size)
        table = local[self.parent.table[np.ix_(e, e)]]
        labels = None
        if self.parent.element_labels is not None:
            labels = tuple(self.parent.element_labels[x] for x in e)
        sub = make_group(table, f"{self.parent.label}[{self.order}]", element_labels=labels,
                         max_order=max(self.order, 1))
        return sub, e


def trivial_subgroup(G) -> Subgroup:
    return Subgroup(G, 1)


def whole_group(G) -> Subgroup:
    return Subgroup(G, (1 << G.order) - 1)


def generated(G, gens) -> Subgroup:
    return Subgroup.from_bool(G, kernels.generated_mask(G.table, list(gens)))


def all_subgroups(G, bound: int = SUBGROUP_BOUND) -> list[Subgroup]:
    """Every subgroup of G, sorted by (order, members).

    Cyclic extension: start from the cyclic subgroups and keep joining each
    new subgroup with one more cyclic subgroup until nothing new appears.
    """
    if "subgroups" in G._cache:
        return G._cache["subgroups"]
    if G.order > bound:
        raise OrderBoundError(f"{G.label}: order {G.order} exceeds subgroup bound {bound}")
    table = G.table
    found: dict[int, tuple[Subgroup, list[int]]] = {}
    for x in range(G.order):
        S = generated(G, [x])
        if S.mask not in found:
            found[S.mask] = (S, [x] if x else [])
    cyc_gens = [(S.mask, gens) for S, gens in found.values() if gens]
    layer = list(found.values())
    while layer:
        fresh = []
        for S, gens in layer:
            for cmask, cgen in cyc_gens:
                if cmask & ~S.mask == 0:
                    continue
                T = Subgroup.from_bool(G, kernels.generated_mask(table, gens + cgen))
                if T.mask not in found:
                    found[T.mask] = (T, gens + cgen)
                    fresh.append(found[T.mask])
        layer = fresh
    result = sorted((S for S, _ in found.values()), key=lambda S: (S.order, tuple(S.elements)))
    G._cache["subgroups"] = result
    return result


def normal_subgroups(G, bound: int = SUBGROUP_BOUND) -> list[Subgroup]:
    return [S for S in all_subgroups(G, bound) if S.is_normal()]


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


def sylow_subgroup(G, p: int) -> Subgroup:
    """A Sylow p-subgroup, grown greedily by p-elements (no enumeration bound)."""
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    target = 1
    while G.order % (target * p) == 0:
        target *= p
    orders = G.orders
    p_elements = [x for x in range(G.order) if _is_p_power(int(orders[x]), p)]
    gens: list[int] = []
    P = trivial_subgroup(G)
    while P.order < target:
        for x in p_elements:
            if x in P:
                continue
            Q = generated(G, gens + [x])
            if _is_p_power(Q.order, p):
                gens.append(x)
                P = Q
                break
        else:  # pragma: no cover - Sylow's theorem guarantees progress
            raise AssertionError("no p-element extends the current p-subgroup")
    return P


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def subgroup_orders(G, bound: int = SUBGROUP_BOUND) -> tuple[int, ...]:
    if "subgroup_orders" not in G._cache:
        G._cache["subgroup_orders"] = tuple(sorted({S.order for S in all_subgroups(G, bound)}))
    return G._cache["subgroup_orders"]


def gcd_group(G, n: int, bound: int = SUBGROUP_BOUND) -> int:
    """lcm of the orders of subgroups of G whose order divides n (every order divides 0)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    orders = [d for d in subgroup_orders(G, bound) if n == 0 or n % d == 0]
    return reduce(math.lcm, orders, 1)


def centralizer(G, S: Iterable[int]) -> Subgroup:
    s = np.fromiter((int(x) for x in S), np.int64)
    if not s.size:
        return whole_group(G)
    t = G.table
    return Subgroup.from_bool(G, (t[:, s] == t[s, :].T).all(axis=1))


def normalizer(G, S: Subgroup) -> Subgroup:
    return Subgroup.from_elements(G, [g for g in range(G.order) if S.conjugate(g) == S])
