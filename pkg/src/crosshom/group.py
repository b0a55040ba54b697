"""Finite groups as validated Cayley tables.

Elements are the dense indices ``0..order-1`` and index 0 is always the
identity.  ``table[i, j]`` is the index of the product ``g_i * g_j``.
Permutations compose left to right (``x^(gh) = (x^g)^h``), matching the
right-action convention used everywhere else in the package.
"""
from __future__ import annotations

import csv
import itertools
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .errors import GroupAxiomError, NotNormalError, OrderBoundError, SpecError
from .subgroups import Subgroup

DEFAULT_ORDER_BOUND = 200
FULL_VALIDATION_ORDER = 64
_SAMPLED_ROWS = 24


@dataclass(eq=False)
class FiniteGroup:
    table: np.ndarray
    label: str = "G"
    element_labels: tuple[str, ...] | None = None
    factors: tuple[int, ...] | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.table = np.ascontiguousarray(self.table, dtype=np.int32)
        self.table.setflags(write=False)

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self) -> int:
        return self.order

    identity = 0

    @property
    def inverses(self) -> np.ndarray:
        if "inverses" not in self._cache:
            inv = np.argmin(self.table, axis=1).astype(np.int32)
            inv.setflags(write=False)
            self._cache["inverses"] = inv
        return self._cache["inverses"]

    @property
    def orders(self) -> np.ndarray:
        if "orders" not in self._cache:
            orders = kernels.element_orders(self.table)
            orders.setflags(write=False)
            self._cache["orders"] = orders
        return self._cache["orders"]

    def mul(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def inv(self, x: int) -> int:
        return int(self.inverses[x])

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = self.inv(x), -k
        result, base = 0, x
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def powers(self, k: int) -> np.ndarray:
        """``x**k`` for every element x at once."""
        idx = np.arange(self.order)
        result = np.zeros(self.order, np.int64)
        base = idx.copy()
        k = int(k)
        if k < 0:
            base = self.inverses.astype(np.int64)
            k = -k
        while k:
            if k & 1:
                result = self.table[result, base]
            base = self.table[base, base]
            k >>= 1
        return result

    def conj(self, x: int, g: int) -> int:
        """``x^g = g^-1 x g``."""
        return int(self.table[self.table[self.inverses[g], x], g])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def name_of(self, x: int) -> str:
        if self.element_labels is not None:
            return self.element_labels[x]
        return str(x)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.label!r}, order={self.order})"


@dataclass(frozen=True)
class AbelianFactors:
    """A finitely generated abelian group Z/n1 x ... x Z/nk; 0 means Z."""

    moduli: tuple[int, ...]

    def __post_init__(self):
        if any(n < 0 for n in self.moduli):
            raise SpecError(f"negative modulus in {self.moduli}")
        object.__setattr__(self, "moduli", tuple(int(n) for n in self.moduli))

    @property
    def ord(self) -> int:
        """Product of the moduli, 0 when any factor is infinite."""
        return 0 if 0 in self.moduli else math.prod(self.moduli)

    @property
    def is_finite(self) -> bool:
        return 0 not in self.moduli

    @property
    def rank(self) -> int:
        return len(self.moduli)

    def __str__(self) -> str:
        return "x".join("Z" if n == 0 else f"Z/{n}" for n in self.moduli) or "1"


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    params: tuple = ()


# ---------------------------------------------------------------------------
# validation


def validate_table(table: np.ndarray, label: str = "", full: bool | None = None) -> None:
    """Raise GroupAxiomError unless ``table`` is a group with identity 0."""
    n = table.shape[0]
    if table.ndim != 2 or table.shape[1] != n or n == 0:
        raise GroupAxiomError("closure", (n,), label)
    bad = np.argwhere((table < 0) | (table >= n))
    if bad.size:
        raise GroupAxiomError("closure", tuple(bad[0]), label)
    idx = np.arange(n)
    bad = np.flatnonzero((table[0] != idx) | (table[:, 0] != idx))
    if bad.size:
        raise GroupAxiomError("identity", (0, int(bad[0])), label)
    has_inverse = (table == 0).any(axis=1)
    bad = np.flatnonzero(~has_inverse)
    if bad.size:
        raise GroupAxiomError("inverse", (int(bad[0]),), label)
    if full is None:
        full = n <= FULL_VALIDATION_ORDER
    if full:
        rows = idx
    else:
        rng = np.random.default_rng(n)
        rows = np.sort(rng.choice(n, size=min(n, _SAMPLED_ROWS), replace=False))
    witness = kernels.assoc_violation(table, rows)
    if witness[0] >= 0:
        raise GroupAxiomError("associativity", tuple(witness), label)


def _find_identity(table: np.ndarray) -> int:
    hits = np.flatnonzero((table == np.arange(table.shape[0])[None, :]).all(axis=1))
    if not hits.size:
        raise GroupAxiomError("identity", ())
    return int(hits[0])


def _identity_first(table: np.ndarray, e: int) -> np.ndarray:
    """Relabel so that ``e`` gets index 0, other elements keep their order."""
    n = table.shape[0]
    old_of_new = np.array([e] + [i for i in range(n) if i != e])
    new_of_old = np.argsort(old_of_new)
    return new_of_old[table[np.ix_(old_of_new, old_of_new)]]


def make_group(table, label: str = "G", *, element_labels=None, factors=None,
               max_order: int = DEFAULT_ORDER_BOUND, validate: bool = True) -> FiniteGroup:
    table = np.asarray(table, dtype=np.int64)
    n = table.shape[0]
    if n > max_order:
        raise OrderBoundError(f"{label}: order {n} exceeds bound {max_order}")
    if validate:
        if table.size and table.min() >= 0 and table.max() < n:
            e = _find_identity(table)
            if e:
                table = _identity_first(table, e)
                if element_labels is not None:
                    element_labels = (element_labels[e],) + tuple(
                        name for i, name in enumerate(element_labels) if i != e)
        validate_table(table, label)
    return FiniteGroup(table, label, element_labels, factors)


# ---------------------------------------------------------------------------
# constructors


def trivial_group() -> FiniteGroup:
    return make_group(np.zeros((1, 1), np.int64), "trivial", factors=())


def abelian(factors: AbelianFactors | Sequence[int], label: str | None = None,
            max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    """Z/n1 x ... x Z/nk with mixed-radix encoding, first factor fastest."""
    if not isinstance(factors, AbelianFactors):
        factors = AbelianFactors(tuple(factors))
    if not factors.is_finite:
        raise SpecError(f"{factors} is infinite; no Cayley table exists")
    mods = factors.moduli
    n = factors.ord
    if n > max_order:
        raise OrderBoundError(f"abelian {mods}: order {n} exceeds bound {max_order}")
    if not mods:
        return trivial_group()
    coords = abelian_coords(mods, np.arange(n))
    summed = (coords[:, None, :] + coords[None, :, :]) % np.array(mods)
    table = abelian_index(mods, summed)
    if label is None:
        label = "abelian:" + ",".join(map(str, mods)) if len(mods) != 1 else f"cyclic:{mods[0]}"
    return make_group(table, label, factors=mods, max_order=max_order)


def cyclic(n: int, max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    if n < 1:
        raise SpecError(f"cyclic order must be positive, got {n}")
    return abelian((n,), f"cyclic:{n}", max_order)


def abelian_coords(moduli: Sequence[int], idx) -> np.ndarray:
    idx = np.asarray(idx, np.int64)
    out = np.empty(idx.shape + (len(moduli),), np.int64)
    rest = idx.copy()
    for i, m in enumerate(moduli):
        out[..., i] = rest % m
        rest //= m
    return out


def abelian_index(moduli: Sequence[int], coords) -> np.ndarray:
    coords = np.asarray(coords, np.int64)
    weights = np.cumprod((1,) + tuple(moduli[:-1])) if moduli else np.ones(0, np.int64)
    return (coords * weights).sum(axis=-1)


def metacyclic(n: int, m: int, s: int, c: int, label: str | None = None,
               max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    """<x, y | x^n, y^m = x^c, y x y^-1 = x^s>; element x^i y^j has index i + n*j."""
    order = n * m
    if order > max_order:
        raise OrderBoundError(f"metacyclic order {order} exceeds bound {max_order}")
    idx = np.arange(order)
    i, j = idx % n, idx // n
    spow = np.array([pow(s % n, int(t), n) if n > 1 else 0 for t in range(m)], np.int64)
    e = i[:, None] + i[None, :] * spow[j][:, None]
    t = j[:, None] + j[None, :]
    wrap = t >= m
    e = (e + np.where(wrap, c, 0)) % n
    t = np.where(wrap, t - m, t)
    label = label or f"metacyclic:{n},{m},{s},{c}"
    return make_group(e + n * t, label, max_order=max_order)


def _two_power(order: int, least: int, family: str) -> int:
    k = order.bit_length() - 1
    if order != 1 << k or k < least:
        raise SpecError(f"{family} order must be 2^k with k >= {least}, got {order}")
    return k


def dihedral(order: int, max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    """Dihedral group of the given order 2n: rotation r = index 1, reflection s = index n."""
    if order < 2 or order % 2:
        raise SpecError(f"dihedral order must be even, got {order}")
    return metacyclic(order // 2, 2, -1, 0, f"dihedral:{order}", max_order)


def quaternion(order: int, max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    _two_power(order, 3, "generalized quaternion")
    n = order // 2
    return metacyclic(n, 2, -1, n // 2, f"quaternion:{order}", max_order)


def dicyclic(order: int, max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    if order < 8 or order % 4:
        raise SpecError(f"dicyclic order must be a multiple of 4 and >= 8, got {order}")
    n = order // 2
    return metacyclic(n, 2, -1, n // 2, f"dicyclic:{order}", max_order)


def semidihedral(order: int, max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    _two_power(order, 4, "semidihedral")
    n = order // 2
    return metacyclic(n, 2, n // 2 - 1, 0, f"semidihedral:{order}", max_order)


def modular(order: int, max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    _two_power(order, 4, "modular")
    n = order // 2
    return metacyclic(n, 2, n // 2 + 1, 0, f"modular:{order}", max_order)


def _compose(p: tuple, q: tuple) -> tuple:
    # p then q
    return tuple(q[x] for x in p)


def permutation_closure(gens: Sequence[Sequence[int]],
                        max_order: int = DEFAULT_ORDER_BOUND) -> list[tuple[int, ...]]:
    """Sorted list of all products of the 0-based permutations ``gens``."""
    gens = [tuple(int(x) for x in g) for g in gens]
    degree = max((len(g) for g in gens), default=0)
    for g in gens:
        if sorted(g) != list(range(len(g))):
            raise SpecError(f"not a permutation: {g}")
    gens = [g + tuple(range(len(g), degree)) for g in gens]
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _compose(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > max_order:
                        raise OrderBoundError(f"permutation closure exceeds bound {max_order}")
        frontier = nxt
    return sorted(seen)


def from_permutations(gens: Sequence[Sequence[int]], label: str = "perm",
                      max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    """Close 0-based permutation images under products and tabulate.

    The identity permutation sorts first, so it lands on index 0.
    """
    return _perm_table(permutation_closure(gens, max_order), label, max_order)


def _perm_table(elements: list[tuple], label: str, max_order: int) -> FiniteGroup:
    index = {p: i for i, p in enumerate(elements)}
    n = len(elements)
    table = np.empty((n, n), np.int64)
    for i, p in enumerate(elements):
        for j, q in enumerate(elements):
            table[i, j] = index[_compose(p, q)]
    names = tuple(format_cycles(p) for p in elements)
    return make_group(table, label, element_labels=names, max_order=max_order)


def symmetric(n: int, max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    if n < 1:
        raise SpecError(f"symmetric degree must be positive, got {n}")
    if math.factorial(n) > max_order:
        raise OrderBoundError(f"symmetric:{n} exceeds bound {max_order}")
    return _perm_table(list(itertools.permutations(range(n))), f"symmetric:{n}", max_order)


def _parity(p: tuple) -> int:
    seen, parity = set(), 0
    for start in range(len(p)):
        if start in seen:
            continue
        length, x = 0, start
        while x not in seen:
            seen.add(x)
            x = p[x]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def alternating(n: int, max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    if n < 1:
        raise SpecError(f"alternating degree must be positive, got {n}")
    if math.factorial(n) // (2 if n > 1 else 1) > max_order:
        raise OrderBoundError(f"alternating:{n} exceeds bound {max_order}")
    elements = [p for p in itertools.permutations(range(n)) if not _parity(p)]
    return _perm_table(elements, f"alternating:{n}", max_order)


def direct_product(g1: FiniteGroup, g2: FiniteGroup, label: str | None = None,
                   max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    """Pairs (a, b) encoded as a + |g1| * b."""
    n1, n2 = g1.order, g2.order
    if n1 * n2 > max_order:
        raise OrderBoundError(f"{g1.label} x {g2.label}: order {n1 * n2} exceeds bound {max_order}")
    idx = np.arange(n1 * n2)
    a, b = idx % n1, idx // n1
    t1 = g1.table.astype(np.int64)
    t2 = g2.table.astype(np.int64)
    table = t1[np.ix_(a, a)] + n1 * t2[np.ix_(b, b)]
    factors = None
    if g1.factors is not None and g2.factors is not None:
        factors = g1.factors + g2.factors
    return make_group(table, label or f"{g1.label}*{g2.label}", factors=factors,
                      max_order=max_order)


# ---------------------------------------------------------------------------
# cycle notation and Cayley files

_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int | None = None) -> tuple[int, ...]:
    """``"(1 2)(3 4)"`` (1-based points) to a 0-based image tuple."""
    text = text.strip()
    cycles = []
    for body in _CYCLE.findall(text):
        pts = [int(t) for t in body.replace(",", " ").split()]
        if any(p < 1 for p in pts) or len(set(pts)) != len(pts):
            raise SpecError(f"bad cycle ({body})")
        cycles.append(pts)
    if _CYCLE.sub("", text).strip():
        raise SpecError(f"unparseable cycle notation {text!r}")
    top = max((max(c) for c in cycles if c), default=0)
    degree = max(degree or 0, top)
    perm = list(range(degree))
    used = set()
    for c in cycles:
        if used & set(c):
            raise SpecError(f"cycles in {text!r} are not disjoint")
        used |= set(c)
        for a, b in zip(c, c[1:] + c[:1]):
            perm[a - 1] = b - 1
    return tuple(perm)


def format_cycles(perm: Sequence[int]) -> str:
    """0-based image tuple to 1-based cycle notation; identity is ``()``."""
    seen, parts = set(), []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            seen.add(start)
            continue
        cyc, x = [], start
        while x not in seen:
            seen.add(x)
            cyc.append(str(x + 1))
            x = perm[x]
        parts.append("(" + " ".join(cyc) + ")")
    return "".join(parts) or "()"


def read_cayley_csv(path: str | Path, label: str | None = None,
                    max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    """Header row of element labels, then one row per element.

    Rows may carry a leading row label; entries are element labels.
    """
    with open(path, newline="") as fh:
        rows = [[c.strip() for c in r] for r in csv.reader(fh) if any(c.strip() for c in r)]
    if not rows:
        raise SpecError(f"{path}: empty Cayley file")
    header = rows[0]
    if header and header[0] == "":
        header = header[1:]
    n = len(header)
    pos = {name: i for i, name in enumerate(header)}
    if len(pos) != n:
        raise SpecError(f"{path}: duplicate element labels")
    body = rows[1:]
    if len(body) != n:
        raise SpecError(f"{path}: expected {n} rows, found {len(body)}")
    table = np.empty((n, n), np.int64)
    for r, row in enumerate(body):
        if len(row) == n + 1:
            if row[0] not in pos:
                raise SpecError(f"{path}: unknown row label {row[0]!r}")
            i, row = pos[row[0]], row[1:]
        elif len(row) == n:
            i = r
        else:
            raise SpecError(f"{path}: row {r + 1} has {len(row)} entries")
        try:
            table[i] = [pos[c] for c in row]
        except KeyError as exc:
            raise SpecError(f"{path}: unknown element {exc.args[0]!r}") from None
    return make_group(table, label or f"cayley:@{path}", element_labels=tuple(header),
                      max_order=max_order)


# ---------------------------------------------------------------------------
# structure


def element_order(G: FiniteGroup, x: int) -> int:
    if not 0 <= x < G.order:
        raise IndexError(f"element {x} out of range for {G.label}")
    return int(G.orders[x])


def generated(G: FiniteGroup, gens) -> Subgroup:
    return Subgroup.from_bool(G, kernels.generated_mask(G.table, gens))


def generating_sequence(G: FiniteGroup) -> list[int]:
    """Greedy generators: repeatedly add the highest-order element not yet covered."""
    if "gens" in G._cache:
        return G._cache["gens"]
    orders = G.orders
    by_order = sorted(range(G.order), key=lambda x: (-orders[x], x))
    gens: list[int] = []
    mask = np.zeros(G.order, bool)
    mask[0] = True
    while not mask.all():
        x = next(x for x in by_order if not mask[x])
        gens.append(x)
        mask = kernels.generated_mask(G.table, gens)
    G._cache["gens"] = gens
    return gens


def center(G: FiniteGroup) -> Subgroup:
    if "center" not in G._cache:
        t = G.table
        G._cache["center"] = Subgroup.from_bool(G, (t == t.T).all(axis=1))
    return G._cache["center"]


def commutator_subgroup(G: FiniteGroup) -> Subgroup:
    if "derived" not in G._cache:
        t = G.table.astype(np.int64)
        inv = G.inverses.astype(np.int64)
        idx = np.arange(G.order)
        # [g, h] = g^-1 h^-1 g h
        comm = t[t[t[inv[:, None], inv[None, :]], idx[:, None]], idx[None, :]]
        G._cache["derived"] = generated(G, np.unique(comm))
    return G._cache["derived"]


def quotient(G: FiniteGroup, N: Subgroup):
    """Coset group G/N and the canonical projection.

    Cosets are numbered by their smallest member, so the identity coset is 0.
    """
    from .homset import Homomorphism

    if N.parent is not G:
        raise ValueError("subgroup belongs to a different group")
    if not N.is_normal():
        raise NotNormalError(f"subgroup of order {N.order} is not normal in {G.label}")
    members = N.elements
    coset_min = G.table[:, members].min(axis=1)
    reps, labels = np.unique(coset_min, return_inverse=True)
    table = labels[G.table[np.ix_(reps, reps)]]
    Q = make_group(table, f"{G.label}/N{N.order}")
    proj = Homomorphism(G, Q, labels.astype(np.int32))
    return Q, proj


def fingerprint(G: FiniteGroup) -> tuple:
    """Cheap isomorphism invariant: order statistics, |Z(G)|, |G'|."""
    values, counts = np.unique(G.orders, return_counts=True)
    stats = tuple((int(a), int(b)) for a, b in zip(values, counts))
    return (G.order, stats, center(G).order, commutator_subgroup(G).order)
