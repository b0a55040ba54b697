"""Acceptance criteria 1-11, one test each.

Each test records a one-line detail; the terminal summary prints one
PASS/FAIL line per criterion (see conftest.py).  Running this file as a
script prints the same lines without pytest.
"""
from __future__ import annotations

import filecmp
import math
import time

import numpy as np
import pytest

from crosshom import checkers as ck
from crosshom.actions import enumerate_actions, trivial_action
from crosshom.catalog import abelian_moduli, default_catalog, group_from_label
from crosshom.group import commutator_subgroup, cyclic, quotient, symmetric
from crosshom.homset import count_crossed_homs, count_homs, enumerate_homs, hom_images
from crosshom.subgroups import all_subgroups, gcd_group, normal_subgroups
from crosshom.tails import Quadruple, phi_core, same_tail_set, similarity_partition

import oracles

# (F, G) pairs for the tail criteria: |F| <= 12, |G| <= 24
TAIL_PAIRS = [
    ("cyclic:2", "symmetric:4"), ("cyclic:3", "alternating:4"), ("cyclic:4", "dihedral:8"),
    ("klein", "symmetric:4"), ("cyclic:4", "quaternion:8"), ("cyclic:6", "dicyclic:12"),
    ("symmetric:3", "symmetric:4"), ("symmetric:3", "dihedral:12"),
    ("dihedral:8", "dihedral:16"), ("quaternion:8", "semidihedral:16"),
    ("abelian:2,2,2", "dihedral:8*cyclic:2"), ("abelian:4,2", "semidirect:cyclic:2;abelian:4,2;1"),
    ("cyclic:8", "modular:16"), ("alternating:4", "symmetric:4"),
    ("dicyclic:12", "semidirect:cyclic:3;quaternion:8;1"), ("dihedral:10", "metacyclic:5,4,2,0"),
    ("abelian:6,2", "dihedral:12*cyclic:2"), ("cyclic:12", "dicyclic:24"),
    ("dihedral:12", "symmetric:3*cyclic:4"), ("cyclic:9", "semidirect:cyclic:2;abelian:3,3;7"),
]
PHI_PER_SUBGROUP = 3


def _detail(record_property, text: str) -> None:
    record_property("detail", text)
    print(text)


def _timed_sweep(theorem: str, **kw):
    t0 = time.perf_counter()
    res = ck.run_sweep(ck.SweepSpec(theorem, **kw))
    return res, time.perf_counter() - t0


# ---------------------------------------------------------------------------


@pytest.mark.criterion(1)
def test_c01_frobenius_sweep(record_property):
    res, dt = _timed_sweep("frobenius", max_g=24)
    s = res.summary
    _detail(record_property, f"frobenius: {s['cells']} cells, {s['fails']} fails, {dt:.2f}s (< 10s)")
    assert s["cells"] == sum(G.order for G in default_catalog().groups(24))
    assert s["fails"] == 0 and s["skipped"] == 0
    assert dt < 10


@pytest.mark.criterion(2)
def test_c02_yoshida_sweep(record_property):
    res, dt = _timed_sweep("yoshida", max_g=24, max_m=16)
    s = res.summary
    _detail(record_property, f"yoshida: {s['cells']} cells, {s['fails']} fails, {dt:.1f}s (< 120s)")
    assert s["cells"] == len(abelian_moduli(16)) * len(default_catalog().groups(24))
    assert s["fails"] == 0 and s["skipped"] == 0
    assert dt < 120


@pytest.mark.criterion(3)
def test_c03_restricted_sweep(record_property):
    C4 = cyclic(4)
    spot_trivial = count_crossed_homs(trivial_action(C4, C4))
    K = group_from_label("klein")
    swap = next(a for a in enumerate_actions(cyclic(2), K)
                if (a.per_element[1] == [0, 2, 1, 3]).all())
    spot_swap = count_crossed_homs(swap)
    res, dt = _timed_sweep("restricted-ay", M=ck.RESTRICTED_M, max_h=16)
    s = res.summary
    actions = sum(r.inputs.get("multiplicity", 1) for r in res.reports)
    pairs = {(r.inputs["M"], r.inputs["H"]) for r in res.reports}
    # every (M, H) with |H| dividing |M| is present
    want = {(M, H.label) for M in ck.RESTRICTED_M for H in default_catalog().groups(16)
            if group_from_label(M).order % H.order == 0}
    _detail(record_property,
            f"restricted: {s['cells']} action classes covering {actions} actions over "
            f"{len(pairs)} (M,H) pairs, {s['fails']} fails, {dt:.0f}s (< 600s); "
            f"spots Z4 trivial={spot_trivial}, swap={spot_swap}")
    assert spot_trivial == 4 and spot_swap == 2
    assert pairs == want
    assert s["fails"] == 0 and s["skipped"] == 0 and s["vacuous"] == 0
    assert dt < 600


@pytest.mark.criterion(4)
def test_c04_elementary_abelian_centers(record_property):
    res, dt = _timed_sweep("elem-abelian-center", p=2, max_m=16)
    s = res.summary
    centers = [r for r in res.reports if r.check_name == "elem-abelian-centers"]
    crossed = [r for r in res.reports if r.check_name == "crossed"]
    Ms = {r.inputs["M"] for r in crossed}
    _detail(record_property,
            f"elem-abelian-center: {len(centers)} groups pass the center test, "
            f"{len(crossed)} action classes over {len(Ms)} actors, {s['fails']} fails, {dt:.0f}s")
    assert [ck.check_elem_abelian_centers(group_from_label(h)) for h in ck.ELEM_CENTER_H] == [True] * 4
    assert len(centers) == 4 and len(Ms) == len([m for m in abelian_moduli(16)
                                                if math.prod(m) & (math.prod(m) - 1) == 0
                                                and math.prod(m) > 1])
    assert s["fails"] == 0 and s["skipped"] == 0


# ---------------------------------------------------------------------------
# tails


def _oracle_tail_count(quad: Quadruple, phi, Phi_rows) -> int:
    Gt = quad.G.table.tolist()
    H = set(quad.H.elements.tolist())
    kernel = quad.kernel.tolist()
    p = phi.images.tolist()
    return sum(oracles.same_tail(Gt, H, kernel, p, r) for r in Phi_rows)


def _oracle_core_crossed(quad: Quadruple, phi) -> tuple[int, int]:
    """|H_phi| and #crossed homs M -> H_phi, from first principles."""
    Gt = quad.G.table
    img = phi.images.tolist()
    kernel_images = [img[k] for k in quad.kernel.tolist()]
    core = sorted(oracles.phi_core(Gt.tolist(), set(quad.H.elements.tolist()), img,
                                   kernel_images))
    local = {g: i for i, g in enumerate(core)}
    Kt = [[local[int(Gt[a][b])] for b in core] for a in core]
    inv = {x: y for x in range(len(Gt)) for y in range(len(Gt)) if Gt[x][y] == 0}
    M = quad.M
    deg = quad.deg.images.tolist()
    act = [None] * M.order
    for f, m in enumerate(deg):
        x = img[f]
        row = [local[int(Gt[Gt[inv[x]][h]][x])] for h in core]
        if act[m] is None:
            act[m] = row
        assert act[m] == row, "induced action is not well defined"
    return len(core), len(oracles.crossed_homs(M.table.tolist(), Kt, act))


def _tail_instances():
    rng = np.random.default_rng(20240611)
    for f, g in TAIL_PAIRS:
        F, Gp = group_from_label(f), group_from_label(g)
        _, proj = quotient(F, commutator_subgroup(F))
        rows = hom_images(F, Gp)
        Phi = enumerate_homs(F, Gp)
        for H in all_subgroups(Gp):
            quad = Quadruple(F, Gp, H, deg=proj)
            picks = rng.choice(len(Phi), size=min(PHI_PER_SUBGROUP, len(Phi)), replace=False)
            yield quad, Phi, rows, [Phi[i] for i in sorted(picks)]


@pytest.fixture(scope="module")
def tail_instances():
    return list(_tail_instances())


@pytest.mark.criterion(5)
def test_c05_lemma_tail_oracle(record_property, tail_instances):
    n = 0
    bad = []
    for quad, Phi, rows, phis in tail_instances:
        rows_list = rows.tolist()
        for phi in phis:
            lhs = len(same_tail_set(phi, Phi, quad))
            oracle_lhs = _oracle_tail_count(quad, phi, rows_list)
            core_order, rhs = _oracle_core_crossed(quad, phi)
            pkg = phi_core(phi, quad)
            n += 1
            if not (lhs == oracle_lhs == rhs == pkg.crossed_count()
                    and core_order == pkg.order):
                bad.append((quad.F.label, quad.G.label, quad.H.order, phi.images.tolist()))
    _detail(record_property, f"lemma tail: {n} (quad, phi) instances, {len(bad)} mismatches")
    assert n >= 500
    assert not bad, bad[:3]


@pytest.mark.criterion(6)
def test_c06_similarity_claim(record_property, tail_instances):
    classes = orbit_bad = equal_bad = div_bad = 0
    outside = outside_div_fail = in_theorem = 0
    for quad, Phi, rows, _ in tail_instances:
        ordM = quad.ord_M
        for c in similarity_partition(rows, quad):
            classes += 1
            in_theorem += ordM % c.H_order == 0
            orbit_bad += not c.orbit_ok()
            equal_bad += not c.tails_equal()
            if ordM % c.core_order == 0:
                div_bad += not c.tails_divisible()
            else:
                # outside the crossed-hom hypothesis: divisibility is not claimed
                outside += 1
                outside_div_fail += not c.tails_divisible()
    _detail(record_property,
            f"similarity claim: {classes} classes; #tails*|H_phi|=|H| fails {orbit_bad}, "
            f"unequal tails {equal_bad}, non-divisible {div_bad} "
            f"(divisibility checked where |H_phi| | ord M, {in_theorem} classes have |H| | ord M; "
            f"{outside} classes outside the |H_phi| hypothesis, "
            f"{outside_div_fail} of them non-divisible)")
    assert classes > 0
    assert orbit_bad == 0 and equal_bad == 0 and div_bad == 0


@pytest.mark.criterion(7)
def test_c07_brauer(record_property):
    pairs = cells = 0
    fails = []
    for Gp in default_catalog().groups(16):
        for N in normal_subgroups(Gp):
            r = ck.check_brauer(Gp, N)
            pairs += r.required_divisor
            cells += 1
            if r.verdict != "pass":
                fails.append((Gp.label, N.order, r.witness))
    _detail(record_property, f"brauer: {cells} (G, N) cells, {pairs} (a, h) pairs, "
                             f"{len(fails)} fails")
    assert not fails


@pytest.mark.criterion(8)
def test_c08_hom_oracle(record_property):
    groups = default_catalog().groups(24)
    pairs = maps = 0
    bad = []
    for F in groups:
        for Gp in groups:
            if Gp.order ** F.order > 10**6:
                continue
            pairs += 1
            maps += Gp.order ** F.order
            mine = [tuple(r) for r in hom_images(F, Gp).tolist()]
            if mine != oracles.naive_homs(F.table, Gp.table):
                bad.append((F.label, Gp.label))
    _detail(record_property, f"hom oracle: {pairs} (F, G) pairs, {maps} maps filtered, "
                             f"{len(bad)} disagreements")
    assert not bad


@pytest.mark.criterion(9)
def test_c09_gcd_group(record_property):
    checked = 0
    bad = []
    for Gp in default_catalog().groups(24):
        for n in range(1, 49):
            checked += 1
            if gcd_group(Gp, n) != math.gcd(Gp.order, n):
                bad.append((Gp.label, n))
    _detail(record_property, f"gcd_group: {checked} (G, n) pairs, {len(bad)} mismatches")
    assert not bad


@pytest.mark.criterion(10)
def test_c10_non_example(record_property):
    S3 = symmetric(3)
    homs = count_homs(S3, cyclic(6))
    naive = len(oracles.naive_homs(S3.table, cyclic(6).table))
    index = S3.order // commutator_subgroup(S3).order
    _detail(record_property, f"|Hom(S3, Z6)| = {homs} (naive {naive}) = |S3:S3'| = {index} < 6")
    assert homs == naive == index == 2 < 6


@pytest.mark.criterion(11)
def test_c11_determinism(record_property, tmp_path):
    configs = [("frobenius", {"max_g": 24}),
               ("yoshida", {"max_g": 12, "max_m": 8}),
               ("restricted-ay", {"M": ("abelian:4,2",), "max_h": 8}),
               ("main-theorem", {"p": 2, "nmk": (2, 1, 0), "max_h": 8}),
               ("elem-abelian-center", {"H": ("dihedral:8", "quaternion:8"), "max_m": 8})]
    same = []
    for theorem, kw in configs:
        a, b = tmp_path / f"{theorem}-a.jsonl", tmp_path / f"{theorem}-b.jsonl"
        ck.run_sweep(ck.SweepSpec(theorem, out=str(a), **kw))
        ck.run_sweep(ck.SweepSpec(theorem, out=str(b), **kw))
        same.append(a.stat().st_size > 0 and filecmp.cmp(a, b, shallow=False))
    # a process pool must not change the log either
    for theorem, kw in configs[:3]:
        a, b = tmp_path / f"{theorem}-w1.jsonl", tmp_path / f"{theorem}-w2.jsonl"
        ck.run_sweep(ck.SweepSpec(theorem, out=str(a), workers=1, **kw))
        ck.run_sweep(ck.SweepSpec(theorem, out=str(b), workers=2, **kw))
        same.append(a.stat().st_size > 0 and filecmp.cmp(a, b, shallow=False))
    _detail(record_property, f"determinism: {sum(same)}/{len(same)} logs byte-identical "
                             f"(repeat runs and workers=2 vs 1)")
    assert all(same)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
