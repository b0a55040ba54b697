import json
import math

import numpy as np
import pytest

from crosshom import checkers as ck
from crosshom.actions import enumerate_actions, semidirect_product, trivial_action
from crosshom.errors import HypothesisViolation, NotNormalError
from crosshom.group import center, cyclic, symmetric, trivial_group
from crosshom.homset import Homomorphism, SectionConstraint, enumerate_homs, hom_images
from crosshom.subgroups import all_subgroups, normal_subgroups, sylow_subgroup, trivial_subgroup
from crosshom.tails import Quadruple, same_tail_set

from conftest import G


def test_frobenius_examples():
    r = ck.check_frobenius(symmetric(3), 2)
    assert (r.measured_count, r.required_divisor, r.verdict) == (4, 2, "pass")
    assert ck.check_frobenius(G("dihedral:8"), 1).measured_count == 1
    r = ck.check_frobenius(symmetric(3), 6)
    assert (r.measured_count, r.required_divisor) == (6, 6)


def test_yoshida_examples():
    r = ck.check_yoshida(G("klein"), symmetric(3))
    assert (r.measured_count, r.required_divisor, r.verdict) == (10, 2, "pass")
    assert ck.check_yoshida(G("abelian:4,2"), trivial_group()).measured_count == 1
    with pytest.raises(HypothesisViolation):
        ck.check_yoshida(symmetric(3), cyclic(2))


def test_yoshida_cyclic_agrees_with_frobenius(catalog):
    for Gp in catalog.groups(16):
        for n in (2, 3, 4, 6, 8):
            y = ck.check_yoshida(cyclic(n), Gp)
            f = ck.check_frobenius(Gp, n)
            assert (y.measured_count, y.required_divisor) == (f.measured_count, f.required_divisor)


def test_crossed_examples():
    C4 = cyclic(4)
    r = ck.check_crossed_divisibility(trivial_action(C4, C4), "restricted")
    assert (r.measured_count, r.required_divisor, r.verdict) == (4, 4, "pass")
    K = G("klein")
    swap = next(a for a in enumerate_actions(cyclic(2), K)
                if (a.per_element[1] == [0, 2, 1, 3]).all())
    r = ck.check_crossed_divisibility(swap, "gcd")
    assert (r.measured_count, r.required_divisor, r.verdict) == (2, 2, "pass")
    r = ck.check_crossed_divisibility(swap, "restricted")
    assert r.verdict == "vacuous-pass" and "vacuous_reason" in r.inputs


def test_crossed_main_instance():
    M = G("abelian:4,2")
    for H in ("dihedral:8", "quaternion:8", "abelian:2,2,2", "abelian:4,2", "cyclic:8"):
        for a in enumerate_actions(M, G(H)):
            assert ck.check_crossed_divisibility(a, "restricted").verdict == "pass"


def test_crossed_scope_skip():
    a = trivial_action(cyclic(6), cyclic(3))
    assert ck.check_crossed_divisibility(a, "gcd", scope="skip").verdict == "vacuous-pass"
    assert ck.check_crossed_divisibility(a, "gcd").verdict == "pass"


def test_brauer_examples():
    S3 = symmetric(3)
    r = ck.check_brauer(S3, trivial_subgroup(S3))
    assert r.verdict == "pass"
    A3 = next(N for N in normal_subgroups(S3) if N.order == 3)
    r = ck.check_brauer(S3, A3)
    assert r.verdict == "pass" and r.required_divisor == 18
    D8 = G("dihedral:8")
    assert ck.check_brauer(D8, center(D8)).verdict == "pass"
    two = next(H for H in all_subgroups(S3) if H.order == 2)
    with pytest.raises(NotNormalError):
        ck.check_brauer(S3, two)


def test_elem_abelian_centers():
    assert ck.check_elem_abelian_centers(G("abelian:4,2"))
    assert ck.check_elem_abelian_centers(G("dihedral:8"))
    assert ck.check_elem_abelian_centers(G("dihedral:16"))
    # Q8 x Z2 has a non-abelian subgroup (itself) with center Z2 x Z2: still elementary
    assert ck.check_elem_abelian_centers(G("quaternion:8*cyclic:2"))
    # Z3 x S3 ... center Z3; Z4 x S3 has center Z4, which is not elementary
    assert not ck.check_elem_abelian_centers(G("symmetric:3*cyclic:4"))


def test_lemma_tail_examples():
    F, Gp = symmetric(3), symmetric(4)
    Phi = enumerate_homs(F, Gp)
    quad = ck.abelianization_quadruple(F, Gp, trivial_subgroup(Gp))
    r = ck.check_lemma_tail(quad, Phi, Phi[5])
    assert (r.measured_count, r.required_divisor, r.verdict) == (1, 1, "pass")
    C4 = cyclic(4)
    inv = next(a for a in enumerate_actions(C4, C4) if not a.is_trivial())
    sd = semidirect_product(inv)
    rows = hom_images(C4, sd.product, SectionConstraint.sections(sd))
    quad = Quadruple.for_sections(sd)
    Phi = [Homomorphism(C4, sd.product, x) for x in rows]
    r = ck.check_lemma_tail(quad, Phi, Phi[0])
    assert (r.measured_count, r.required_divisor) == (4, 4)


def test_lemma_tail_needs_closure():
    F, Gp = symmetric(3), symmetric(4)
    Phi = enumerate_homs(F, Gp)
    quad = ck.abelianization_quadruple(F, Gp, sylow_subgroup(Gp, 2))
    phi = next(p for p in Phi if len(same_tail_set(p, Phi, quad)) > 1)
    with pytest.raises(HypothesisViolation) as exc:
        ck.check_lemma_tail(quad, [phi], phi)
    assert exc.value.name == "tail-closure"


def test_hom_family_examples():
    C4 = cyclic(4)
    inv = next(a for a in enumerate_actions(C4, C4) if not a.is_trivial())
    sd = semidirect_product(inv)
    rows = hom_images(C4, sd.product, SectionConstraint.sections(sd))
    r = ck.check_hom_family(Quadruple.for_sections(sd), rows)
    assert r.verdict == "pass" and r.measured_count == 4
    # Hom(F, G) with F ->> F/F' and a Sylow subgroup: F = Z4 x Z2 (own abelianization)
    F, Gp = G("abelian:4,2"), G("dihedral:8")
    Phi = enumerate_homs(F, Gp)
    for H in (sylow_subgroup(Gp, 2), trivial_subgroup(Gp)):
        r = ck.check_hom_family(ck.abelianization_quadruple(F, Gp, H), Phi)
        assert r.verdict == "pass" and r.measured_count % H.order == 0


def test_hom_family_named_violations():
    F, Gp = symmetric(3), symmetric(4)
    Phi = enumerate_homs(F, Gp)
    quad = ck.abelianization_quadruple(F, Gp, sylow_subgroup(Gp, 2))
    with pytest.raises(HypothesisViolation) as exc:
        ck.check_hom_family(quad, Phi)
    assert exc.value.name == "order-divides"
    quad = ck.abelianization_quadruple(F, Gp, sylow_subgroup(Gp, 3))
    with pytest.raises(HypothesisViolation) as exc:
        ck.check_hom_family(quad, Phi, relaxed=True)
    assert exc.value.name == "core-hypothesis"


def test_large_center_extended_and_reduction():
    for M, H in [("abelian:2,2", "cyclic:2"), ("abelian:2,4", "abelian:4,2"),
                 ("abelian:2,2", "dihedral:8"), ("abelian:3,2", "symmetric:3")]:
        for a in enumerate_actions(G(M), G(H), dedup=True):
            assert ck.check_large_center(a).ok
            assert ck.check_extended_sections(a).verdict == "pass"
            assert ck.check_reduction(a).ok


def test_report_json_round_trip():
    r = ck.check_frobenius(symmetric(3), 2)
    line = r.to_json()
    assert list(json.loads(line)) == list(ck.REPORT_KEYS)
    assert ck.CheckReport.from_json(line).to_dict() == r.to_dict()
    with pytest.raises(Exception):
        ck.CheckReport.from_dict({"check_name": "x"})
    with pytest.raises(ValueError):
        ck.CheckReport("x", {}, 1, 1, "maybe")


def test_sweep_empty_filter(tmp_path):
    out = tmp_path / "log.jsonl"
    res = ck.run_sweep(ck.SweepSpec("frobenius", max_g=0, out=str(out)))
    assert res.summary["cells"] == 0 and res.reports == []
    assert out.read_text() == ""


def test_sweep_order_and_log(tmp_path):
    out = tmp_path / "log.jsonl"
    spec = ck.SweepSpec("restricted-ay", M=("abelian:4,2",), max_h=8, out=str(out))
    res = ck.run_sweep(spec)
    assert not res.failed and res.summary["cells"] > 0
    hs = [r.inputs["H"] for r in res.reports]
    orders = [G(h).order for h in hs]
    assert orders == sorted(orders)
    assert [r.to_dict() for r in ck.read_log(out)] == [r.to_dict() for r in res.reports]


def test_sweep_budget_marks_skipped():
    spec = ck.SweepSpec("yoshida", M=("abelian:2,2,2",), H=("symmetric:4",), budget=3)
    res = ck.run_sweep(spec)
    assert [r.verdict for r in res.reports] == ["skipped"]
    assert res.summary["skipped"] == 1 and not res.failed


def test_sweep_timing_and_slowest():
    res = ck.run_sweep(ck.SweepSpec("frobenius", max_g=6, timing=True))
    assert all(r.elapsed is not None for r in res.reports)
    assert "slowest" in res.summary
    res = ck.run_sweep(ck.SweepSpec("frobenius", max_g=6))
    assert all(r.elapsed is None for r in res.reports) and "slowest" not in res.summary


def test_sweep_workers_match_serial():
    spec = dict(theorem="main-theorem", p=2, nmk=(1, 1, 0), max_h=8)
    one = ck.run_sweep(ck.SweepSpec(**spec))
    two = ck.run_sweep(ck.SweepSpec(**spec, workers=2))
    assert [r.to_json() for r in one.reports] == [r.to_json() for r in two.reports]


def test_sweep_spec_validation():
    from crosshom.errors import SpecError
    with pytest.raises(SpecError):
        ck.SweepSpec("nonsense")
    with pytest.raises(SpecError):
        ck.SweepSpec("frobenius", workers=0)


def test_main_theorem_moduli():
    assert ck.main_theorem_moduli(2, 2, 1, 0) == (4, 2)
    assert ck.main_theorem_moduli(3, 0, 2, 1) == (3, 3, 9)
