"""Tails, phi-cores, similarity classes and the central-core shift.

A quadruple (F ->> M; H <= G) fixes a degree epimorphism ``deg: F -> M``
and a subgroup H of G.  The tail of a homomorphism phi: F -> G is the pair
(phi restricted to ker deg, f -> phi(f)H).  Left cosets xH are labelled by
their smallest member.

Finite sources carry ``deg`` as an ordinary Homomorphism.  Presented
sources (FpGroup) carry the degree as one integer vector per generator
into Z/m1 x ... x Z/mr (0 = infinite), together with words generating
ker deg as a subgroup and one preimage word per basis vector of M.  Tail
data is then kept at generator level.  Only coordinate projections of
abelian presentations are exercised; other presented quadruples are an
extrapolation and the caller is responsible for the kernel words.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .actions import Action, SemidirectProduct
from .errors import HypothesisViolation, InducedActionError, SpecError
from .group import FiniteGroup, abelian, center, cyclic, direct_product
from .homset import (FpGroup, Homomorphism, crossed_values, hom_images,
                     presented_crossed_values)
from .subgroups import Subgroup


@dataclass(eq=False)
class Quadruple:
    F: FiniteGroup | FpGroup
    G: FiniteGroup
    H: Subgroup
    deg: Homomorphism | None = None
    M_moduli: tuple[int, ...] = ()
    deg_vectors: tuple[tuple[int, ...], ...] = ()
    kernel_words: tuple[tuple[int, ...], ...] = ()
    basis_words: tuple[tuple[int, ...], ...] = ()
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.H.parent is not self.G:
            raise SpecError("H must be a subgroup of G")
        if self.presented:
            k = self.F.generator_count
            if len(self.deg_vectors) != k or any(len(v) != len(self.M_moduli)
                                                 for v in self.deg_vectors):
                raise SpecError("one degree vector per generator is required")
            if len(self.basis_words) != len(self.M_moduli):
                raise SpecError("one preimage word per factor of M is required")
        else:
            if self.deg is None or self.deg.source is not self.F:
                raise SpecError("deg must be a homomorphism out of F")
            if not self.deg.is_surjective():
                raise SpecError("deg is not surjective")

    @property
    def presented(self) -> bool:
        return isinstance(self.F, FpGroup)

    @property
    def M(self) -> FiniteGroup:
        if self.presented:
            return abelian(self.M_moduli)
        return self.deg.target

    @property
    def ord_M(self) -> int:
        if self.presented:
            return 0 if 0 in self.M_moduli else int(np.prod(self.M_moduli, dtype=np.int64))
        return self.M.order

    @property
    def kernel(self) -> np.ndarray:
        """ker deg as element indices (finite sources only)."""
        return self.deg.kernel_elements()

    @property
    def coset_label(self) -> np.ndarray:
        """Smallest member of xH, for every x in G."""
        if "coset" not in self._cache:
            self._cache["coset"] = self.G.table[:, self.H.elements].min(axis=1)
        return self._cache["coset"]

    @classmethod
    def for_sections(cls, sd: SemidirectProduct) -> "Quadruple":
        """(M ->> M; H <= M x| H) with deg the identity."""
        M = sd.actor
        H = Subgroup.from_elements(sd.product, sd.embed_H.images)
        return cls(M, sd.product, H, deg=Homomorphism(M, M, np.arange(M.order)))

    @classmethod
    def coordinate_projection(cls, moduli: Sequence[int], keep: Sequence[int], G: FiniteGroup,
                              H: Subgroup) -> "Quadruple":
        """F = Z/n1 x ... x Z/nk presented, deg = projection onto the ``keep`` coordinates."""
        F = FpGroup.abelian(moduli)
        keep = list(keep)
        vectors = tuple(tuple(int(i == j) for j in keep) for i in range(len(moduli)))
        return cls(F, G, H, M_moduli=tuple(int(moduli[j]) for j in keep), deg_vectors=vectors,
                   kernel_words=tuple((i + 1,) for i in range(len(moduli)) if i not in keep),
                   basis_words=tuple((j + 1,) for j in keep))


@dataclass(eq=False)
class Tail:
    phi0: np.ndarray
    phiH: np.ndarray

    @property
    def key(self) -> bytes:
        return self.phi0.tobytes() + b"|" + self.phiH.tobytes()


@dataclass(eq=False)
class PhiCore:
    """The phi-core as a subgroup of G plus the induced action of M on it.

    ``core_group`` is the core relabelled as a standalone group and
    ``embedding[i]`` is the G-index of its element i.  For presented
    sources with infinite M, ``induced_action`` is None and the action is
    given by ``generator_perms`` on the basis of M.
    """

    core: Subgroup
    core_group: FiniteGroup
    embedding: np.ndarray
    induced_action: Action | None
    generator_perms: list[np.ndarray]
    M_moduli: tuple[int, ...] = ()

    @property
    def order(self) -> int:
        return self.core.order

    def crossed_values(self) -> np.ndarray:
        """Crossed homomorphisms M -> core.  Finite M: rows over M; infinite M: rows over the basis."""
        if self.induced_action is not None:
            return crossed_values(self.induced_action)
        return presented_crossed_values(self.M_moduli, self.generator_perms, self.core_group)

    def crossed_count(self) -> int:
        return int(self.crossed_values().shape[0])


def _check_source(phi: Homomorphism, quad: Quadruple) -> None:
    if phi.source is not quad.F or phi.target is not quad.G:
        raise SpecError("homomorphism does not match the quadruple")


def _word_images(G: FiniteGroup, images: np.ndarray, words) -> np.ndarray:
    """Values of ``words`` under the generator images (rows of ``images``)."""
    images = np.atleast_2d(images)
    inv = G.inverses
    out = np.zeros((images.shape[0], len(words)), np.int64)
    for w, word in enumerate(words):
        x = np.zeros(images.shape[0], np.int64)
        for s in word:
            g = images[:, abs(s) - 1]
            x = G.table[x, g if s > 0 else inv[g]]
        out[:, w] = x
    return out


def tail_of(phi: Homomorphism, quad: Quadruple) -> Tail:
    """The tail of phi; for presented sources both parts are generator-level."""
    _check_source(phi, quad)
    img = phi.images.astype(np.int64)
    if quad.presented:
        phi0 = _word_images(quad.G, img, quad.kernel_words)[0]
    else:
        phi0 = img[quad.kernel]
    return Tail(phi0.astype(np.int32), quad.coset_label[img].astype(np.int32))


def _diagonal_cosets_agree(quad: Quadruple, a: np.ndarray, b: np.ndarray) -> bool:
    # phi(f)H = psi(f)H for all f iff it holds on <(phi(g), psi(g))> in G x G
    G = quad.G
    if "square" not in quad._cache:
        quad._cache["square"] = direct_product(G, G, max_order=G.order ** 2)
    sq = quad._cache["square"]
    gens = np.asarray(a, np.int64) + G.order * np.asarray(b, np.int64)
    pairs = np.flatnonzero(kernels.generated_mask(sq.table, gens))
    x, y = pairs % G.order, pairs // G.order
    return bool(np.array_equal(quad.coset_label[x], quad.coset_label[y]))


def same_tail(phi: Homomorphism, psi: Homomorphism, quad: Quadruple) -> bool:
    t1, t2 = tail_of(phi, quad), tail_of(psi, quad)
    if not np.array_equal(t1.phi0, t2.phi0) or not np.array_equal(t1.phiH, t2.phiH):
        return False
    if quad.presented:
        return _diagonal_cosets_agree(quad, phi.images, psi.images)
    return True


def _tail_classes(rows: np.ndarray, quad: Quadruple) -> np.ndarray:
    """Tail-class id for every row of generator/element images."""
    G = quad.G
    if quad.presented:
        head = _word_images(G, rows, quad.kernel_words)
    else:
        head = rows[:, quad.kernel]
    keys = np.concatenate([head, quad.coset_label[rows]], axis=1)
    _, bucket = np.unique(keys, axis=0, return_inverse=True)
    bucket = bucket.ravel()
    if not quad.presented:
        return bucket
    # buckets agree on generators; split them by the diagonal coset test
    labels = np.full(len(rows), -1, np.int64)
    nxt = 0
    for b in np.unique(bucket):
        reps: list[int] = []
        for i in np.flatnonzero(bucket == b):
            for r in reps:
                if _diagonal_cosets_agree(quad, rows[r], rows[i]):
                    labels[i] = labels[r]
                    break
            else:
                reps.append(int(i))
                labels[i] = nxt
                nxt += 1
    return labels


def same_tail_set(phi: Homomorphism, Phi: Sequence[Homomorphism], quad: Quadruple
                  ) -> list[Homomorphism]:
    """Members of Phi with the same tail as phi."""
    return [psi for psi in Phi if same_tail(phi, psi, quad)]


def phi_core(phi: Homomorphism, quad: Quadruple) -> PhiCore:
    """H_phi = {h in H : h^phi(f) in H for all f, h^phi(k) = h for k in ker deg}.

    The conjugating elements range over the whole image subgroup phi(F),
    which for presented sources is generated by the generator images.
    """
    _check_source(phi, quad)
    G, H = quad.G, quad.H
    t, inv = G.table, G.inverses
    img = phi.images.astype(np.int64)
    if quad.presented:
        image = np.flatnonzero(kernels.generated_mask(t, img))
        kimg = np.unique(_word_images(G, img, quad.kernel_words))
    else:
        image = np.unique(img)
        kimg = np.unique(img[quad.kernel])
    he = H.elements
    inH = H.as_bool()
    conj = t[t[inv[image][:, None], he[None, :]], image[:, None]]
    keep = inH[conj].all(axis=0)
    keep &= (t[kimg[:, None], he[None, :]] == t[he[None, :], kimg[:, None]]).all(axis=0)
    core = Subgroup.from_elements(G, he[keep])
    K, emb = core.as_group()
    local = np.full(G.order, -1, np.int64)
    local[emb] = np.arange(len(emb))

    def conj_by(x):
        return local[t[t[inv[x], emb], x]]

    if quad.presented:
        for k in kimg:
            if not np.array_equal(conj_by(k), np.arange(len(emb))):
                raise InducedActionError("kernel image does not centralize the core")
        gimg = _word_images(G, img, quad.basis_words)[0]
        perms = [conj_by(x) for x in gimg]
        action = None
        if 0 not in quad.M_moduli:
            action = _action_from_basis(quad.M, K, perms)
        return PhiCore(core, K, emb, action, perms, quad.M_moduli)

    M = quad.M
    deg = quad.deg.images.astype(np.int64)
    per = np.full((M.order, len(emb)), -1, np.int64)
    for f in range(quad.F.order):
        row = conj_by(img[f])
        a = deg[f]
        if per[a, 0] < 0:
            per[a] = row
        elif not np.array_equal(per[a], row):
            raise InducedActionError(f"elements of degree {a} act differently on the core")
    action = Action(M, K, per)
    perms = [per[a] for a in _basis_elements(M)] if M.factors is not None else []
    return PhiCore(core, K, emb, action, perms, tuple(M.factors or ()))


def _basis_elements(M: FiniteGroup) -> list[int]:
    weights = np.cumprod((1,) + tuple(M.factors[:-1])) if M.factors else []
    return [int(w) for w in weights]


def _action_from_basis(M: FiniteGroup, K: FiniteGroup, perms) -> Action:
    """Action of the mixed-radix abelian group M given by its basis generators."""
    from .group import abelian_coords

    coords = abelian_coords(M.factors, np.arange(M.order))
    per = np.tile(np.arange(K.order), (M.order, 1))
    for i, p in enumerate(perms):
        p = np.asarray(p, np.int64)
        powers = [np.arange(K.order)]
        for _ in range(M.factors[i] - 1):
            powers.append(p[powers[-1]])
        for x in range(M.order):
            per[x] = powers[coords[x, i]][per[x]]
    action = Action(M, K, per)
    if not action.is_valid():
        raise InducedActionError("basis permutations do not define an action of M")
    return action


def lemma_tail_family(phi: Homomorphism, quad: Quadruple, core: PhiCore | None = None
                      ) -> np.ndarray:
    """Image rows of f -> phi(f) alpha(deg f) for every crossed hom alpha: M -> H_phi."""
    core = core or phi_core(phi, quad)
    t = quad.G.table
    emb = core.embedding
    img = phi.images.astype(np.int64)
    values = core.crossed_values()
    if not quad.presented:
        deg = quad.deg.images.astype(np.int64)
        return t[img[None, :], emb[values[:, deg]]]
    if core.induced_action is not None:
        values = values[:, _basis_elements(quad.M)]
    vecs = np.asarray(quad.deg_vectors, np.int64).reshape(len(img), len(quad.M_moduli))
    perms = [np.asarray(p, np.int64) for p in core.generator_perms]
    K = core.core_group
    out = np.empty((len(values), len(img)), np.int64)
    for r, basis_vals in enumerate(values):
        for g, v in enumerate(vecs):
            out[r, g] = t[img[g], emb[_crossed_at(K, perms, basis_vals, v)]]
    return out


def _crossed_at(K: FiniteGroup, perms, basis_vals, vector) -> int:
    # multiply the section images (p_j, alpha_j)^{v_j}; the H-part is alpha(v)
    x = 0
    for p, a, c in zip(perms, basis_vals, vector):
        if c < 0:
            raise SpecError("negative degree coordinates are not supported")
        for _ in range(int(c)):
            x = int(K.table[p[x], a])
    return x


# ---------------------------------------------------------------------------
# similarity


@dataclass
class SimilarityClass:
    members: list[int]
    tails: list[list[int]]
    core_order: int
    H_order: int

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def n_tails(self) -> int:
        return len(self.tails)

    @property
    def tail_sizes(self) -> list[int]:
        return [len(t) for t in self.tails]

    def orbit_ok(self) -> bool:
        return self.n_tails * self.core_order == self.H_order

    def tails_equal(self) -> bool:
        return len(set(self.tail_sizes)) == 1

    def tails_divisible(self) -> bool:
        return all(s % self.core_order == 0 for s in self.tail_sizes)

    def to_dict(self, class_id: int) -> dict:
        return {"class_id": class_id, "class_size": self.size, "tails": self.n_tails,
                "core_order": self.core_order,
                "divisible": self.size % self.H_order == 0}


def _as_rows(Phi) -> np.ndarray:
    if isinstance(Phi, np.ndarray):
        return Phi.astype(np.int64)
    if not Phi:
        return np.zeros((0, 0), np.int64)
    return np.array([p.images for p in Phi], np.int64)


def conjugation_closed(rows: np.ndarray, quad: Quadruple) -> bool:
    """Is the family invariant under phi -> h phi h^-1 for every h in H?"""
    G = quad.G
    t, inv = G.table, G.inverses
    keys = {r.tobytes() for r in rows}
    for h in quad.H.elements:
        conj = t[t[h, np.arange(G.order)], inv[h]].astype(np.int64)
        if any(r.tobytes() not in keys for r in conj[rows]):
            return False
    return True


def similarity_partition(Phi, quad: Quadruple) -> list[SimilarityClass]:
    """Classes of phi ~ psi iff their tails are conjugate by one element of H.

    ``Phi`` is a list of Homomorphisms or an array of image rows.  The family
    must be H-conjugation invariant; this is checked.  Classes are ordered
    by their smallest member and each lists its tail classes.
    """
    rows = _as_rows(Phi)
    n = len(rows)
    if not n:
        return []
    if not conjugation_closed(rows, quad):
        raise HypothesisViolation("conjugation-invariance", "Phi is not closed under H-conjugation")
    G = quad.G
    t, inv = G.table, G.inverses
    index = {r.tobytes(): i for i, r in enumerate(rows)}
    tails = _tail_classes(rows, quad)

    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        a, b = find(i), find(j)
        if a != b:
            parent[max(a, b)] = min(a, b)

    first_of_tail: dict[int, int] = {}
    for i, c in enumerate(tails):
        union(i, first_of_tail.setdefault(int(c), i))
    for h in quad.H.elements:
        conj = t[t[h, np.arange(G.order)], inv[h]].astype(np.int64)
        for i, r in enumerate(conj[rows]):
            union(i, index[r.tobytes()])

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for root in sorted(groups):
        members = groups[root]
        by_tail: dict[int, list[int]] = {}
        for i in members:
            by_tail.setdefault(int(tails[i]), []).append(i)
        rep = _homomorphism(quad, rows[members[0]])
        core = phi_core(rep, quad)
        out.append(SimilarityClass(members, sorted(by_tail.values()), core.order,
                                   quad.H.order))
    return out


def _homomorphism(quad: Quadruple, row) -> Homomorphism:
    return Homomorphism(quad.F, quad.G, row)


# ---------------------------------------------------------------------------
# central core and shifts


def central_core(action: Action) -> Subgroup:
    """Z_H: elements of H central in H and fixed by every element of M."""
    H = action.target
    fixed = (action.per_element == np.arange(H.order)).all(axis=0)
    return Subgroup.from_bool(H, fixed & center(H).as_bool())


def cyclic_factor_homs(q: int, Z: Subgroup) -> np.ndarray:
    """Rows of Hom(Z/q, Z) as H-indices over the elements 0..q-1 of Z/q."""
    K, emb = Z.as_group()
    rows = hom_images(cyclic(q), K)
    return emb[rows]


def _last_factor(M: FiniteGroup) -> tuple[int, int]:
    if not M.factors:
        raise SpecError(f"{M.label} has no abelian factor decomposition")
    stride = int(np.prod(M.factors[:-1], dtype=np.int64))
    return stride, int(M.factors[-1])


def shift_section(sd: SemidirectProduct, phi: Homomorphism, alpha: np.ndarray) -> Homomorphism:
    """(a, b) -> phi(a, b) * alpha(b), b the coordinate in the last factor of M.

    ``alpha`` lists H-indices over the elements of that cyclic factor and
    must take values in the central core.
    """
    M, H = sd.actor, sd.target
    stride, q = _last_factor(M)
    alpha = np.asarray(alpha, np.int64)
    if alpha.shape != (q,):
        raise SpecError(f"alpha needs {q} values")
    Z = central_core(sd.action)
    if not all(int(x) in Z for x in alpha):
        raise HypothesisViolation("central-image", "alpha does not land in the central core")
    b = np.arange(M.order) // stride
    shifted = sd.product.table[phi.images.astype(np.int64), sd.embed_H.images[alpha[b]]]
    return Homomorphism(M, sd.product, shifted)


def shift_orbits(sd: SemidirectProduct, sections: np.ndarray) -> list[list[int]]:
    """Orbits of Hom(last factor, Z_H) acting on section rows by shifting."""
    _, q = _last_factor(sd.actor)
    alphas = cyclic_factor_homs(q, central_core(sd.action))
    index = {r.tobytes(): i for i, r in enumerate(sections)}
    seen = np.zeros(len(sections), bool)
    orbits = []
    for i, row in enumerate(sections):
        if seen[i]:
            continue
        phi = Homomorphism(sd.actor, sd.product, row)
        orbit = sorted({index[shift_section(sd, phi, a).images.astype(sections.dtype).tobytes()]
                        for a in alphas})
        seen[orbit] = True
        orbits.append(orbit)
    return orbits

