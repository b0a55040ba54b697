import itertools

import numpy as np
import pytest

from crosshom.actions import enumerate_actions, semidirect_product, trivial_action
from crosshom.errors import HypothesisViolation, SpecError
from crosshom.group import commutator_subgroup, cyclic, quotient, symmetric
from crosshom.homset import (Homomorphism, SectionConstraint, enumerate_homs, hom_images)
from crosshom.subgroups import Subgroup, all_subgroups, trivial_subgroup, whole_group
from crosshom.tails import (Quadruple, central_core, cyclic_factor_homs, lemma_tail_family,
                            phi_core, same_tail, same_tail_set, shift_orbits, shift_section,
                            similarity_partition, tail_of)

from conftest import G
from oracles import same_tail as oracle_same_tail


def _abelianization_quad(F, Gp, H):
    _, proj = quotient(F, commutator_subgroup(F))
    return Quadruple(F, Gp, H, deg=proj)


def _sections(action):
    sd = semidirect_product(action)
    rows = hom_images(action.actor, sd.product, SectionConstraint.sections(sd))
    quad = Quadruple.for_sections(sd)
    return sd, quad, [Homomorphism(action.actor, sd.product, r) for r in rows]


def _inversion_c4():
    C4 = cyclic(4)
    return next(a for a in enumerate_actions(C4, C4) if not a.is_trivial())


def test_trivial_H_tail_is_the_map():
    F, Gp = symmetric(3), symmetric(4)
    quad = _abelianization_quad(F, Gp, trivial_subgroup(Gp))
    Phi = enumerate_homs(F, Gp)
    for phi in Phi[:10]:
        assert same_tail_set(phi, Phi, quad) == [phi]
    classes = similarity_partition(Phi, quad)
    assert all(c.size == 1 for c in classes)


def test_section_tail_shape():
    sd, quad, Phi = _sections(_inversion_c4())
    t = tail_of(Phi[0], quad)
    assert t.phi0.size == 1 and t.phi0[0] == 0  # ker deg is trivial
    assert np.array_equal(t.phiH // 4, np.arange(4))


def test_inversion_sections_form_one_tail_class():
    sd, quad, Phi = _sections(_inversion_c4())
    assert len(Phi) == 4
    for phi in Phi:
        assert len(same_tail_set(phi, Phi, quad)) == 4
    classes = similarity_partition(Phi, quad)
    assert [c.size for c in classes] == [4]
    assert classes[0].core_order == 4


def test_lemma_family_is_tail_class():
    sd, quad, Phi = _sections(_inversion_c4())
    phi = Phi[1]
    fam = lemma_tail_family(phi, quad)
    keys = {r.astype(np.int64).tobytes() for r in fam}
    for psi in Phi:
        assert (psi.images.astype(np.int64).tobytes() in keys) == same_tail(phi, psi, quad)


def test_core_examples():
    # ker deg trivial and H normal: core is H
    S3 = symmetric(3)
    A3 = commutator_subgroup(S3)
    ident = Homomorphism(S3, S3, np.arange(6))
    quad = Quadruple(S3, S3, A3, deg=ident)
    assert phi_core(ident, quad).core == A3
    # trivial action on abelian H, canonical section: core is H
    act = trivial_action(cyclic(2), G("cyclic:4"))
    sd = semidirect_product(act)
    quad = Quadruple.for_sections(sd)
    canon = Homomorphism(act.actor, sd.product, sd.embed_M.images)
    assert phi_core(canon, quad).order == 4
    # S3 target, order-2 non-normal H, surjective phi: trivial core
    two = next(H for H in all_subgroups(S3) if H.order == 2)
    quad = _abelianization_quad(S3, S3, two)
    assert phi_core(ident, quad).order == 1


@pytest.mark.parametrize("F,T", [("symmetric:3", "symmetric:4"), ("cyclic:4", "dihedral:8"),
                                 ("dihedral:8", "abelian:2,2,2"), ("klein", "symmetric:3")])
def test_tail_equality_matches_oracle(F, T):
    Fg, Tg = G(F), G(T)
    Phi = enumerate_homs(Fg, Tg)
    for H in all_subgroups(Tg)[::3]:
        quad = _abelianization_quad(Fg, Tg, H)
        Hset = set(H.elements.tolist())
        for phi, psi in itertools.islice(itertools.product(Phi, Phi), 400):
            want = oracle_same_tail(Tg.table, Hset, quad.kernel.tolist(),
                                    phi.images.tolist(), psi.images.tolist())
            assert same_tail(phi, psi, quad) == want


def test_similarity_requires_conjugation_invariance():
    F, Gp = cyclic(2), symmetric(3)
    quad = _abelianization_quad(F, Gp, whole_group(Gp))
    Phi = enumerate_homs(F, Gp)[:2]
    with pytest.raises(HypothesisViolation) as exc:
        similarity_partition(Phi, quad)
    assert exc.value.name == "conjugation-invariance"


def test_section_classes_divisible_for_order_four():
    for M in ("cyclic:4", "klein"):
        for H in ("cyclic:4", "klein"):
            for a in enumerate_actions(G(M), G(H)):
                _, quad, Phi = _sections(a)
                for c in similarity_partition(Phi, quad):
                    assert c.size % 4 == 0
                    assert c.orbit_ok() and c.tails_equal() and c.tails_divisible()


def test_central_core_examples():
    K = G("klein")
    assert central_core(trivial_action(cyclic(2), K)).order == 4
    swap = next(a for a in enumerate_actions(cyclic(2), K)
                if (a.per_element[1] == [0, 2, 1, 3]).all())
    assert central_core(swap).elements.tolist() == [0, 3]
    assert central_core(trivial_action(cyclic(2), G("quaternion:8"))).order == 2


def test_shift_examples():
    # M = Z/2 x Z/2 (|M0| = 2), H = Z/2 trivial action: Z_H of order 2, orbits of size 2
    act = trivial_action(G("klein"), cyclic(2))
    sd = semidirect_product(act)
    rows = hom_images(act.actor, sd.product, SectionConstraint.sections(sd))
    orbits = shift_orbits(sd, rows)
    assert all(len(o) == 2 for o in orbits)
    phi = Homomorphism(act.actor, sd.product, rows[0])
    assert np.array_equal(shift_section(sd, phi, np.zeros(2, np.int64)).images, phi.images)


def test_shift_is_an_action_and_commutes_with_conjugation():
    Mg, Hg = G("abelian:2,4"), G("dihedral:8")
    for a in enumerate_actions(Mg, Hg, dedup=True)[:6]:
        sd = semidirect_product(a)
        Z = central_core(a)
        alphas = cyclic_factor_homs(4, Z)
        if len(alphas) == 1:
            continue
        rows = hom_images(Mg, sd.product, SectionConstraint.sections(sd))
        P = sd.product
        for r in rows[:4]:
            phi = Homomorphism(Mg, P, r)
            for x, y in itertools.product(alphas, alphas):
                prod = Hg.table[x, y]
                twice = shift_section(sd, shift_section(sd, phi, x), y)
                assert np.array_equal(twice.images, shift_section(sd, phi, prod).images)
                shifted = shift_section(sd, phi, x).images
                assert Homomorphism(Mg, P, shifted).is_valid()
            for h in sd.embed_H.images:
                hinv = P.inverses[h]
                conj = P.table[P.table[h, r], hinv]
                for x in alphas:
                    lhs = P.table[P.table[h, shift_section(sd, phi, x).images], hinv]
                    rhs = shift_section(sd, Homomorphism(Mg, P, conj), x).images
                    assert np.array_equal(lhs, rhs)
        assert all(len(o) == len(alphas) for o in shift_orbits(sd, rows))


def test_shift_rejects_non_central_values():
    Mg, Hg = cyclic(2), symmetric(3)
    a = trivial_action(Mg, Hg)
    sd = semidirect_product(a)
    phi = Homomorphism(Mg, sd.product, sd.embed_M.images)
    with pytest.raises(HypothesisViolation):
        shift_section(sd, phi, np.array([0, 1]))


def test_presented_coordinate_projection():
    # F = Z/2 x Z, M = Z (keep the infinite coordinate), G = D8
    Dg = G("dihedral:8")
    for H in all_subgroups(Dg):
        quad = Quadruple.coordinate_projection((2, 0), [1], Dg, H)
        rows = hom_images(quad.F, Dg)
        Phi = [Homomorphism(quad.F, Dg, r) for r in rows]
        for c in similarity_partition(rows, quad):
            assert c.orbit_ok() and c.tails_equal() and c.tails_divisible()
        for phi in Phi[::5]:
            fam = lemma_tail_family(phi, quad)
            same = same_tail_set(phi, Phi, quad)
            assert len(fam) == len(same) == phi_core(phi, quad).crossed_count()
            keys = {p.images.astype(np.int64).tobytes() for p in same}
            assert {r.astype(np.int64).tobytes() for r in fam} == keys


def test_quadruple_validation():
    S3 = symmetric(3)
    with pytest.raises(SpecError):
        Quadruple(S3, S3, trivial_subgroup(symmetric(4)), deg=Homomorphism(S3, S3, np.arange(6)))
    with pytest.raises(SpecError):
        Quadruple(S3, S3, trivial_subgroup(S3), deg=Homomorphism(S3, cyclic(2), np.zeros(6)))


def test_divisibility_needs_core_hypothesis():
    # S3 ->> Z2 into S4 with |H| = 3: a core of order 3 does not divide ord M = 2,
    # only the trivial crossed hom Z2 -> Z3 exists, and that tail class has size 1
    F, G = symmetric(3), symmetric(4)
    _, proj = quotient(F, commutator_subgroup(F))
    H = next(S for S in all_subgroups(G) if S.order == 3)
    classes = similarity_partition(hom_images(F, G), Quadruple(F, G, H, deg=proj))
    odd = [c for c in classes if c.core_order == 3 and c.tail_sizes == [1]]
    assert odd and not odd[0].tails_divisible()
    assert all(c.orbit_ok() and c.tails_equal() for c in classes)
