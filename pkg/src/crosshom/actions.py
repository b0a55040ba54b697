"""Automorphism groups, actions M -> Aut(H) and semidirect products M x| H."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BudgetExceeded, OrderBoundError
from .group import (DEFAULT_ORDER_BOUND, FiniteGroup, format_cycles, generating_sequence,
                    make_group)
from .homset import DEFAULT_BUDGET, Homomorphism

AUTOMORPHISM_BOUND = 32


@dataclass(eq=False)
class Automorphism:
    group: FiniteGroup
    perm: np.ndarray

    def is_valid(self) -> bool:
        p = self.perm.astype(np.int64)
        t = self.group.table
        return (p[0] == 0 and np.unique(p).size == p.size
                and bool(np.array_equal(p[t], t[np.ix_(p, p)])))

    def cycles(self) -> str:
        return format_cycles(self.perm)


@dataclass(eq=False)
class Action:
    """Right action of ``actor`` on ``target``: ``per_element[a, h] = h^a``.

    ``multiplicity`` is the number of actions this one stands for when
    actions were enumerated up to conjugation by Aut(target).
    """

    actor: FiniteGroup
    target: FiniteGroup
    per_element: np.ndarray
    multiplicity: int = 1

    def __post_init__(self):
        self.per_element = np.asarray(self.per_element, dtype=np.int32)

    @property
    def key(self) -> bytes:
        return self.per_element.tobytes()

    def act(self, h: int, a: int) -> int:
        return int(self.per_element[a, h])

    def is_trivial(self) -> bool:
        return bool((self.per_element == np.arange(self.target.order)).all())

    def is_valid(self) -> bool:
        M, H = self.actor, self.target
        per = self.per_element.astype(np.int64)
        if per.shape != (M.order, H.order):
            return False
        if not np.array_equal(per[0], np.arange(H.order)):
            return False
        if not all(Automorphism(H, row).is_valid() for row in per):
            return False
        # h^(ab) = (h^a)^b
        composed = per[np.arange(M.order)[None, :, None], per[:, None, :]]
        return bool(np.array_equal(per[M.table], composed))

    def check(self) -> None:
        if not self.is_valid():
            raise AssertionError(f"invalid action of {self.actor.label} on {self.target.label}")

    def generator_cycles(self) -> list[str]:
        """Images of the actor's generating sequence, in 1-based cycle notation."""
        return [format_cycles(self.per_element[g]) for g in generating_sequence(self.actor)]


@dataclass(eq=False)
class SemidirectProduct:
    """M x| H with (a, h) encoded as a * |H| + h and (a,h)(b,k) = (ab, h^b k)."""

    action: Action
    product: FiniteGroup
    embed_M: Homomorphism
    embed_H: Homomorphism
    project_M: Homomorphism

    @property
    def actor(self) -> FiniteGroup:
        return self.action.actor

    @property
    def target(self) -> FiniteGroup:
        return self.action.target

    def pair(self, a: int, h: int) -> int:
        return a * self.target.order + h

    def split(self, x: int) -> tuple[int, int]:
        return divmod(int(x), self.target.order)


# ---------------------------------------------------------------------------
# automorphisms


def automorphism_perms(H: FiniteGroup, bound: int = AUTOMORPHISM_BOUND,
                       budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """All automorphisms of H as rows of images, lexicographically sorted.

    Generator images range over elements of equal order; each tuple is
    extended over the Cayley graph and kept when the result is bijective.
    The identity automorphism is row 0.
    """
    if "aut" in H._cache:
        return H._cache["aut"]
    if H.order > bound:
        raise OrderBoundError(f"{H.label}: order {H.order} exceeds automorphism bound {bound}")
    gens = generating_sequence(H)
    orders = H.orders
    lists = [np.flatnonzero(orders == orders[g]) for g in gens]
    width = max((len(c) for c in lists), default=1)
    cand = np.zeros((len(lists), max(width, 1)), np.int64)
    ncand = np.array([len(c) for c in lists], np.int64)
    for i, c in enumerate(lists):
        cand[i, : len(c)] = c
    rows, evals = kernels.hom_search(H.table, H.table, np.asarray(gens, np.int64), cand, ncand,
                                     budget)
    if evals > budget:
        raise BudgetExceeded(f"Aut({H.label}): more than {budget} evaluations")
    bijective = np.array([np.unique(r).size == H.order for r in rows], bool)
    perms = rows[bijective].astype(np.int64)
    perms = perms[np.lexsort(perms.T[::-1])] if len(perms) > 1 else perms
    perms.setflags(write=False)
    H._cache["aut"] = perms
    return perms


def automorphism_group(H: FiniteGroup, bound: int = AUTOMORPHISM_BOUND) -> list[Automorphism]:
    return [Automorphism(H, p) for p in automorphism_perms(H, bound)]


def automorphism_group_table(H: FiniteGroup, bound: int = AUTOMORPHISM_BOUND,
                             max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    """Aut(H) as a Cayley table under 'first p, then q' composition."""
    perms = automorphism_perms(H, bound)
    k = len(perms)
    if k > max_order:
        raise OrderBoundError(f"|Aut({H.label})| = {k} exceeds bound {max_order}")
    lookup = {p.tobytes(): i for i, p in enumerate(perms)}
    table = np.empty((k, k), np.int64)
    for i in range(k):
        composed = perms[:, perms[i]]  # row j: q_j after p_i
        for j in range(k):
            table[i, j] = lookup[composed[j].tobytes()]
    names = tuple(format_cycles(p) for p in perms)
    return make_group(table, f"Aut({H.label})", element_labels=names, max_order=max_order)


def _perm_orders(perms: np.ndarray) -> np.ndarray:
    ident = np.arange(perms.shape[1])
    cur = perms.copy()
    orders = np.ones(len(perms), np.int64)
    done = (cur == ident).all(axis=1)
    k = 1
    while not done.all():
        k += 1
        cur = np.take_along_axis(perms, cur, axis=1)
        hit = (cur == ident).all(axis=1) & ~done
        orders[hit] = k
        done |= hit
    return orders


# ---------------------------------------------------------------------------
# actions


class _ActionSearch:
    def __init__(self, M: FiniteGroup, H: FiniteGroup, bound: int):
        self.M, self.H = M, H
        self.perms = automorphism_perms(H, bound)
        self.inv = np.argsort(self.perms, axis=1)
        self.lookup = {p.tobytes(): i for i, p in enumerate(self.perms)}
        self.gens = generating_sequence(M)
        aut_orders = _perm_orders(self.perms)
        self.cands = [np.flatnonzero(M.orders[g] % aut_orders == 0) for g in self.gens]

    def compose(self, i: int, j: int) -> int:
        # p_i then p_j
        return self.lookup[self.perms[j][self.perms[i]].tobytes()]

    def extend(self, assigned: list[int]) -> np.ndarray | None:
        M = self.M
        img = np.full(M.order, -1, np.int64)
        img[0] = 0
        queue = [0]
        for f in queue:
            for g, a in zip(self.gens, assigned):
                f2 = int(M.table[f, g])
                v = self.compose(int(img[f]), a)
                if img[f2] < 0:
                    img[f2] = v
                    queue.append(f2)
                elif img[f2] != v:
                    return None
        return img

    def conjugates(self, c: int, stab: np.ndarray) -> np.ndarray:
        """p_s^-1 p_c p_s for every s in ``stab``, as rows."""
        P = self.perms[stab]
        return np.take_along_axis(P, self.perms[c][self.inv[stab]], axis=1)

    def orbit(self, c: int, stab: np.ndarray) -> set[int]:
        return {self.lookup[row.tobytes()] for row in self.conjugates(c, stab)}

    def centralizer(self, c: int, stab: np.ndarray) -> np.ndarray:
        return stab[(self.conjugates(c, stab) == self.perms[c]).all(axis=1)]

    def run(self, dedup: bool) -> list[tuple[np.ndarray, int]]:
        k = len(self.perms)
        found: list[tuple[np.ndarray, int]] = []
        depth = len(self.gens)
        if depth == 0:
            return [(np.zeros(1, np.int64), 1)]

        def descend(d: int, assigned: list[int], stab: np.ndarray | None):
            seen: set[int] = set()
            for c in self.cands[d]:
                c = int(c)
                if dedup:
                    if c in seen:
                        continue
                    seen |= self.orbit(c, stab)
                img = self.extend(assigned + [c])
                if img is None:
                    continue
                nxt = self.centralizer(c, stab) if dedup else None
                if d + 1 == depth:
                    found.append((img, k // len(nxt) if dedup else 1))
                else:
                    descend(d + 1, assigned + [c], nxt)

        descend(0, [], np.arange(k) if dedup else None)
        return found


def enumerate_actions(M: FiniteGroup, H: FiniteGroup, dedup: bool = False,
                      bound: int = AUTOMORPHISM_BOUND) -> list[Action]:
    """Every homomorphism M -> Aut(H), materialized as an Action.

    With ``dedup`` only one action per Aut(H)-conjugacy class is returned and
    its ``multiplicity`` records the class size; crossed-homomorphism counts
    are constant on these classes.
    """
    search = _ActionSearch(M, H, bound)
    out = []
    for img, mult in search.run(dedup):
        out.append(Action(M, H, search.perms[img], multiplicity=mult))
    return out


def action_from_generators(M: FiniteGroup, H: FiniteGroup, perms) -> Action:
    """The action sending M's generating sequence to the given automorphisms of H."""
    gens = generating_sequence(M)
    if len(perms) != len(gens):
        raise ValueError(f"{M.label} has {len(gens)} generators, got {len(perms)} images")
    rows = np.array([np.asarray(p, np.int64) for p in perms]).reshape(len(perms), H.order)
    img = np.full((M.order, H.order), -1, np.int64)
    img[0] = np.arange(H.order)
    queue = [0]
    for f in queue:
        for g, p in zip(gens, rows):
            f2 = int(M.table[f, g])
            v = p[img[f]]
            if img[f2, 0] < 0:
                img[f2] = v
                queue.append(f2)
            elif not np.array_equal(img[f2], v):
                raise ValueError("generator images do not define an action")
    action = Action(M, H, img)
    action.check()
    return action


def trivial_action(M: FiniteGroup, H: FiniteGroup) -> Action:
    return Action(M, H, np.tile(np.arange(H.order), (M.order, 1)))


def semidirect_product(action: Action, max_order: int = DEFAULT_ORDER_BOUND) -> SemidirectProduct:
    M, H = action.actor, action.target
    m, n = M.order, H.order
    if m * n > max_order:
        raise OrderBoundError(f"{M.label} x| {H.label}: order {m * n} exceeds bound {max_order}")
    idx = np.arange(m * n)
    a, h = idx // n, idx % n
    per = action.per_element.astype(np.int64)
    mt = M.table.astype(np.int64)
    ht = H.table.astype(np.int64)
    # (a, h)(b, k) = (ab, h^b k)
    table = mt[np.ix_(a, a)] * n + ht[per[a[None, :], h[:, None]], h[None, :]]
    product = make_group(table, f"({M.label})x|({H.label})", max_order=max_order)
    return SemidirectProduct(
        action,
        product,
        embed_M=Homomorphism(M, product, np.arange(m) * n),
        embed_H=Homomorphism(H, product, np.arange(n)),
        project_M=Homomorphism(product, M, a),
    )
