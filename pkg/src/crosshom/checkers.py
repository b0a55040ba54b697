"""Executable divisibility and equivalence checks, and the sweep driver.

Every check returns a CheckReport.  ``inputs["relation"]`` is ``divides``
(pass iff required_divisor | measured_count) or ``equals`` (pass iff the
two counts agree).  Reports are plain data and round-trip through JSON
with a fixed key order, so sweep logs are byte-reproducible; ``elapsed``
stays null unless timing was requested.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterator, Sequence

import numpy as np

from .actions import Action, enumerate_actions, semidirect_product
from .catalog import abelian_label, abelian_moduli, default_catalog, group_from_label
from .errors import BudgetExceeded, HypothesisViolation, NotNormalError, SpecError
from .group import FiniteGroup, center, commutator_subgroup, cyclic, quotient
from .homset import (DEFAULT_BUDGET, Homomorphism, SectionConstraint, count_homs,
                     count_nth_roots, crossed_values, hom_images)
from .subgroups import Subgroup, all_subgroups, gcd_group, sylow_subgroup
from .tails import (Quadruple, central_core, lemma_tail_family, phi_core, same_tail_set,
                    shift_orbits, similarity_partition)

VERDICTS = ("pass", "fail", "vacuous-pass", "skipped")
THEOREMS = ("frobenius", "yoshida", "restricted-ay", "main-theorem", "elem-abelian-center")
REPORT_KEYS = ("check_name", "inputs", "measured_count", "required_divisor", "verdict",
               "elapsed", "witness")

# the restricted sweep's default actors
RESTRICTED_M = ("abelian:2,2", "abelian:4,2", "abelian:4,4", "abelian:8,2", "abelian:4,2,2")
ELEM_CENTER_H = ("dihedral:8", "quaternion:8", "dihedral:16", "semidihedral:16")


@dataclass
class CheckReport:
    check_name: str
    inputs: dict
    measured_count: int | None
    required_divisor: int | None
    verdict: str
    elapsed: float | None = None
    witness: Any = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @property
    def ok(self) -> bool:
        return self.verdict != "fail"

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in REPORT_KEYS}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), default=_jsonable)

    @classmethod
    def from_dict(cls, data: dict) -> "CheckReport":
        if set(data) != set(REPORT_KEYS):
            raise SpecError(f"report keys {sorted(data)} do not match the schema")
        return cls(**data)

    @classmethod
    def from_json(cls, line: str) -> "CheckReport":
        return cls.from_dict(json.loads(line))


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _report(name: str, inputs: dict, count: int, target: int, relation: str = "divides",
            witness=None) -> CheckReport:
    inputs = dict(inputs, relation=relation)
    if relation == "divides":
        ok = count % target == 0 if target else count == 0
    else:
        ok = count == target
    return CheckReport(name, inputs, int(count), int(target), "pass" if ok else "fail",
                       witness=None if ok else witness)


def _vacuous(name: str, inputs: dict, reason: str, count=None, target=None) -> CheckReport:
    return CheckReport(name, dict(inputs, relation="divides", vacuous_reason=reason),
                       count, target, "vacuous-pass")


# ---------------------------------------------------------------------------
# single checks


def check_frobenius(G: FiniteGroup, n: int) -> CheckReport:
    """#{x : x^n = 1} is divisible by gcd(|G|, n)."""
    count = count_nth_roots(G, n)
    return _report("frobenius", {"G": G.label, "n": int(n)}, count, math.gcd(G.order, n),
                   witness={"roots": count})


def check_yoshida(M: FiniteGroup, G: FiniteGroup, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """|Hom(M, G)| is divisible by gcd(|G|, |M|) for abelian M."""
    if not M.is_abelian():
        raise HypothesisViolation("abelian-M", f"{M.label} is not abelian")
    count = count_homs(M, G, budget=budget)
    return _report("yoshida", {"M": M.label, "G": G.label}, count, math.gcd(G.order, M.order))


def _action_inputs(action: Action, action_id) -> dict:
    d = {"M": action.actor.label, "H": action.target.label, "action": action_id,
         "action_generators": action.generator_cycles()}
    if action.multiplicity != 1:
        d["multiplicity"] = action.multiplicity
    return d


def check_crossed_divisibility(action: Action, mode: str = "restricted", action_id=None,
                               budget: int = DEFAULT_BUDGET, scope: str = "attempt"
                               ) -> CheckReport:
    """Crossed-hom count versus |H| (restricted) or gcd(H, |M|) (gcd mode).

    Restricted mode is vacuous when |H| does not divide |M|.  In gcd mode,
    ``scope="skip"`` marks actors outside the proven families (abelian
    p-groups Z/p^n x (Z/p)^m x (Z/p^2)^k) as vacuous instead of checking.
    """
    M, H = action.actor, action.target
    inputs = dict(_action_inputs(action, action_id), mode=mode)
    if mode == "restricted":
        if M.order % H.order:
            return _vacuous("crossed", inputs, "|H| does not divide |M|")
        divisor = H.order
    elif mode == "gcd":
        if scope == "skip" and not _in_main_family(M):
            return _vacuous("crossed", inputs, "actor outside the proven families")
        divisor = gcd_group(H, M.order)
    else:
        raise SpecError(f"unknown mode {mode!r}")
    rows = crossed_values(action, budget)
    return _report("crossed", inputs, rows.shape[0], divisor,
                   witness={"crossed_homs": rows.tolist()})


def _in_main_family(M: FiniteGroup) -> bool:
    if not M.is_abelian() or M.factors is None:
        return False
    n = M.order
    if n == 1:
        return True
    p = min(d for d in range(2, n + 1) if n % d == 0)
    if any(m == 1 for m in M.factors):
        return False
    exps = []
    for m in M.factors:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if m != 1:
            return False
        exps.append(e)
    return sum(e > 2 for e in exps) <= 1


def check_brauer(G: FiniteGroup, N: Subgroup) -> CheckReport:
    """a^|N| and (ah)^|N| are conjugate by an element of N, for all a in G, h in N."""
    if N.parent is not G:
        raise SpecError("N must be a subgroup of G")
    if not N.is_normal():
        raise NotNormalError(f"subgroup of order {N.order} is not normal in {G.label}")
    t, inv = G.table.astype(np.int64), G.inverses.astype(np.int64)
    k = N.order
    ne = N.elements
    pw = G.powers(k)
    # N-conjugacy classes: conj[n, x] = n^-1 x n
    conj = t[t[inv[ne][:, None], np.arange(G.order)[None, :]], ne[:, None]]
    a = np.repeat(np.arange(G.order), k)
    h = np.tile(ne, G.order)
    x, y = pw[a], pw[t[a, h]]
    ok = (conj[:, x] == y[None, :]).any(axis=0)
    bad = np.flatnonzero(~ok)
    witness = {"a": int(a[bad[0]]), "h": int(h[bad[0]])} if bad.size else None
    return _report("brauer", {"G": G.label, "N_order": k, "N": ne.tolist()}, int(ok.sum()),
                   ok.size, relation="equals", witness=witness)


def elem_abelian_center_failures(H: FiniteGroup) -> list[Subgroup]:
    """Non-abelian subgroups whose center is not elementary abelian."""
    bad = []
    for S in all_subgroups(H):
        if S.is_abelian():
            continue
        K, _ = S.as_group()
        zorders = {int(o) for o in K.orders[center(K).elements]} - {1}
        if len(zorders) > 1 or any(not _is_prime(o) for o in zorders):
            bad.append(S)
    return bad


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def check_elem_abelian_centers(H: FiniteGroup) -> bool:
    """True iff every non-abelian subgroup of H has an elementary abelian center."""
    return not elem_abelian_center_failures(H)


def elem_abelian_centers_report(H: FiniteGroup) -> CheckReport:
    bad = elem_abelian_center_failures(H)
    nonab = sum(not S.is_abelian() for S in all_subgroups(H))
    return _report("elem-abelian-centers", {"H": H.label}, nonab - len(bad), nonab,
                   relation="equals", witness={"subgroups": [S.elements.tolist() for S in bad]})


# ---------------------------------------------------------------------------
# tail machinery


def _rows(Phi) -> np.ndarray:
    if isinstance(Phi, np.ndarray):
        return Phi.astype(np.int64)
    return np.array([p.images for p in Phi], np.int64).reshape(len(Phi), -1)


def _tail_closed_at(phi: Homomorphism, keys: set, quad: Quadruple) -> bool:
    family = lemma_tail_family(phi, quad).astype(np.int64)
    return all(r.tobytes() in keys for r in family)


def check_lemma_tail(quad: Quadruple, Phi, phi: Homomorphism) -> CheckReport:
    """|{psi in Phi with the tail of phi}| = #crossed homs M -> H_phi."""
    rows = _rows(Phi)
    keys = {r.tobytes() for r in rows}
    if not _tail_closed_at(phi, keys, quad):
        raise HypothesisViolation("tail-closure", "Phi misses a homomorphism with phi's tail")
    Phi_list = Phi if not isinstance(Phi, np.ndarray) else [
        Homomorphism(quad.F, quad.G, r) for r in rows]
    lhs = len(same_tail_set(phi, Phi_list, quad))
    core = phi_core(phi, quad)
    rhs = core.crossed_count()
    inputs = {"F": quad.F.label, "G": quad.G.label, "H_order": quad.H.order,
              "phi": phi.images.tolist(), "core_order": core.order}
    return _report("lemma-tail", inputs, lhs, rhs, relation="equals")


def crossed_hypothesis_failures(M: FiniteGroup, H: FiniteGroup, only_dividing: bool = False,
                                budget: int = DEFAULT_BUDGET) -> list[dict]:
    """Subgroups H* of H and actions of M on H* whose crossed count |H*| does not divide."""
    bad = []
    for S in all_subgroups(H):
        if only_dividing and M.order % S.order:
            continue
        K, _ = S.as_group()
        for i, act in enumerate(enumerate_actions(M, K, dedup=True)):
            n = crossed_values(act, budget).shape[0]
            if n % K.order:
                bad.append({"subgroup": S.elements.tolist(), "action": i, "count": n})
    return bad


def check_hom_family(quad: Quadruple, Phi, relaxed: bool = False,
                     budget: int = DEFAULT_BUDGET) -> CheckReport:
    """|Phi| is divisible by |H|, with the similarity-class Claim verified per class.

    Strict mode needs |H| | ord M and the crossed-hom hypothesis for every
    subgroup of H and every action of M on it.  Relaxed mode asks instead
    that every phi-core order divides ord M and that its crossed count is
    divisible by it.  Violated hypotheses raise HypothesisViolation.
    """
    rows = _rows(Phi)
    keys = {r.tobytes() for r in rows}
    H = quad.H
    ordM = quad.ord_M
    inputs = {"F": quad.F.label, "G": quad.G.label, "H_order": H.order, "ord_M": ordM,
              "relaxed": relaxed}
    if not relaxed:
        if ordM % H.order:
            raise HypothesisViolation("order-divides", f"|H| = {H.order} does not divide {ordM}")
        if quad.presented:
            raise SpecError("strict mode needs a finite degree target; use relaxed mode")
        Hgroup, _ = H.as_group()
        bad = crossed_hypothesis_failures(quad.M, Hgroup, budget=budget)
        if bad:
            raise HypothesisViolation("crossed-hypothesis", json.dumps(bad[0]))
    classes = similarity_partition(rows, quad)
    problems = []
    for cid, cls in enumerate(classes):
        rep = Homomorphism(quad.F, quad.G, rows[cls.members[0]])
        for tail in cls.tails:
            if not _tail_closed_at(Homomorphism(quad.F, quad.G, rows[tail[0]]), keys, quad):
                raise HypothesisViolation("tail-closure", f"class {cid} is not tail-closed")
        if relaxed:
            core = phi_core(rep, quad)
            if ordM % core.order or core.crossed_count() % core.order:
                raise HypothesisViolation("core-hypothesis",
                                          f"class {cid}: core of order {core.order}")
        if not (cls.orbit_ok() and cls.tails_equal() and cls.tails_divisible()):
            problems.append(cls.to_dict(cid) | {"tail_sizes": cls.tail_sizes})
    report = _report("hom-family", dict(inputs, classes=len(classes)), len(rows), H.order)
    if problems:
        report.verdict = "fail"
        report.witness = {"classes": problems}
    return report


def abelianization_quadruple(F: FiniteGroup, G: FiniteGroup, H: Subgroup) -> Quadruple:
    """(F ->> F/F'; H <= G)."""
    _, proj = quotient(F, commutator_subgroup(F))
    return Quadruple(F, G, H, deg=proj)


def check_large_center(action: Action, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Shifting by Hom(Z/p^s, Z_H) when p^s divides |Z_H|.

    M = M0 x Z/p^s with the last factor designated.  Every shift orbit on
    sections must have length |Hom(Z/p^s, Z_H)| and the number of sections
    must be divisible by gcd(|H|, |M|).
    """
    M, H = action.actor, action.target
    inputs = _action_inputs(action, None)
    if not M.factors:
        raise SpecError(f"{M.label} has no factor decomposition")
    q = M.factors[-1]
    Z = central_core(action)
    inputs = dict(inputs, central_core_order=Z.order, last_factor=q)
    if Z.order % q:
        return _vacuous("large-center", inputs, "p^s does not divide |Z_H|")
    sd = semidirect_product(action, max_order=4096)
    sections = hom_images(M, sd.product, SectionConstraint.sections(sd), budget)
    orbits = shift_orbits(sd, sections)
    nalpha = count_homs(cyclic(q), Z.as_group()[0])
    lengths = sorted({len(o) for o in orbits})
    report = _report("large-center", dict(inputs, orbit_lengths=lengths),
                     len(sections), math.gcd(H.order, M.order))
    if lengths and lengths != [nalpha]:
        report.verdict = "fail"
        report.witness = {"orbit_lengths": lengths, "expected": nalpha}
    return report


def check_extended_sections(action: Action, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Sections of M = M0 x Z/q lifted to M^ = M0 x Z.

    Phi = {phi: M^ -> M x| H with phi(x) in pi(x)H}; Phi^ = those killing
    the q-th power of the last generator, which are exactly the sections
    of M.  Checks |Phi| divisible by |H|, the similarity Claim on the
    quadruple (M^ ->> Z; H <= M x| H), and |Phi^| = #sections.
    """
    M, H = action.actor, action.target
    if not M.factors:
        raise SpecError(f"{M.label} has no factor decomposition")
    mods = tuple(M.factors)
    hat = mods[:-1] + (0,)
    sd = semidirect_product(action, max_order=4096)
    Hsub = Subgroup.from_elements(sd.product, sd.embed_H.images)
    quad = Quadruple.coordinate_projection(hat, [len(hat) - 1], sd.product, Hsub)
    basis = [int(w) for w in np.cumprod((1,) + mods[:-1])]
    constraint = SectionConstraint(sd.project_M, np.array(basis, np.int64))
    Phi = hom_images(quad.F, sd.product, constraint, budget)
    q = mods[-1]
    last = sd.product.powers(q)[Phi[:, -1].astype(np.int64)]
    hat_count = int((last == 0).sum())
    n_sections = crossed_values(action, budget).shape[0]
    inputs = dict(_action_inputs(action, None), Phi=len(Phi), Phi_hat=hat_count,
                  sections=n_sections)
    classes = similarity_partition(Phi, quad)
    bad = [c.to_dict(i) for i, c in enumerate(classes)
           if not (c.orbit_ok() and c.tails_equal() and c.tails_divisible())]
    report = _report("extended-sections", inputs, len(Phi), H.order)
    if bad or hat_count != n_sections:
        report.verdict = "fail"
        report.witness = {"classes": bad, "Phi_hat": hat_count, "sections": n_sections}
    return report


def check_reduction(action: Action, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Per-prime hypotheses imply divisibility of the crossed count by gcd(H, |M|).

    For every prime p dividing |M|, the p-torsion M_p must satisfy the
    restricted statement on subgroups of H of order dividing |M_p|.  When
    all those hold the full count is checked; otherwise the report is vacuous.
    """
    M, H = action.actor, action.target
    inputs = _action_inputs(action, None)
    primes = [p for p in range(2, M.order + 1) if M.order % p == 0 and _is_prime(p)]
    per_prime = {}
    for p in primes:
        Mp, _ = sylow_subgroup(M, p).as_group()
        per_prime[str(p)] = len(crossed_hypothesis_failures(Mp, H, only_dividing=True,
                                                            budget=budget))
    inputs = dict(inputs, per_prime_failures=per_prime)
    if any(per_prime.values()):
        return _vacuous("reduction", inputs, "a per-prime hypothesis fails")
    count = crossed_values(action, budget).shape[0]
    return _report("reduction", inputs, count, gcd_group(H, M.order))


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepSpec:
    theorem: str
    max_g: int = 24
    max_h: int = 16
    max_m: int = 16
    p: int | None = None
    nmk: tuple[int, int, int] | None = None
    M: tuple[str, ...] = ()
    H: tuple[str, ...] = ()
    dedup: bool = True
    out: str | None = None
    workers: int = 1
    timing: bool = False
    scope: str = "attempt"
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise SpecError(f"unknown theorem {self.theorem!r}; expected one of {THEOREMS}")
        if min(self.max_g, self.max_h, self.max_m) < 0 or self.workers < 1:
            raise SpecError("bounds must be non-negative and workers positive")
        if self.scope not in ("attempt", "skip"):
            raise SpecError("scope is attempt or skip")


@dataclass
class SweepResult:
    reports: list[CheckReport] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        counts = {v: 0 for v in VERDICTS}
        for r in self.reports:
            counts[r.verdict] += 1
        out = {"cells": len(self.reports), "passes": counts["pass"],
               "vacuous": counts["vacuous-pass"], "fails": counts["fail"],
               "skipped": counts["skipped"]}
        timed = [r for r in self.reports if r.elapsed is not None]
        if timed:
            slow = max(timed, key=lambda r: r.elapsed)
            out["slowest"] = {"check": slow.check_name, "inputs": slow.inputs,
                              "elapsed": slow.elapsed}
        return out

    @property
    def failed(self) -> bool:
        return any(r.verdict == "fail" for r in self.reports)


_ACTIONS: dict = {}


def _actions(M_label: str, H_label: str, dedup: bool) -> list[Action]:
    key = (M_label, H_label, dedup)
    if key not in _ACTIONS:
        _ACTIONS[key] = enumerate_actions(group_from_label(M_label), group_from_label(H_label),
                                          dedup=dedup)
    return _ACTIONS[key]


def main_theorem_moduli(p: int, n: int, m: int, k: int) -> tuple[int, ...]:
    """Z/p^n x (Z/p)^m x (Z/p^2)^k as a moduli tuple (trivial factors dropped)."""
    mods = ((p ** n,) if n > 0 else ()) + (p,) * m + (p * p,) * k
    return mods


def _p_group_moduli(p: int, limit: int) -> list[tuple[int, ...]]:
    out = []
    for mods in abelian_moduli(limit):
        n = math.prod(mods)
        if n > 1 and _is_prime(p) and p ** round(math.log(n, p)) == n:
            out.append(mods)
    return out


def _catalog_labels(limit: int, names: Sequence[str] = ()) -> list[str]:
    cat = default_catalog()
    chosen = names or cat.names()
    labels = []
    for name in chosen:
        G = cat.get(name)
        if G.order <= limit:
            labels.append(G.label)
    return labels


def sweep_cells(spec: SweepSpec) -> list[tuple]:
    """The sweep's cells in execution order; each is picklable."""
    th = spec.theorem
    cells: list[tuple] = []
    if th == "frobenius":
        for G in _catalog_labels(spec.max_g, spec.H):
            n_g = group_from_label(G).order
            cells += [("frobenius", G, n) for n in range(1, n_g + 1)]
        return cells
    if th == "yoshida":
        Ms = list(spec.M) or [abelian_label(m) for m in abelian_moduli(spec.max_m)]
        Gs = _catalog_labels(spec.max_g, spec.H)
        return [("yoshida", M, G) for M in Ms for G in Gs]
    if th == "restricted-ay":
        if spec.M:
            Ms = list(spec.M)
        elif spec.p:
            Ms = [abelian_label(m) for m in _p_group_moduli(spec.p, spec.max_m)]
        else:
            Ms = list(RESTRICTED_M)
        Hs = _catalog_labels(spec.max_h, spec.H)
        return _action_cells("restricted", Ms, Hs, spec, dividing=True)
    if th == "main-theorem":
        if spec.M:
            Ms = list(spec.M)
        else:
            p = spec.p or 2
            n, m, k = spec.nmk or (1, 1, 0)
            Ms = [abelian_label(main_theorem_moduli(p, n, m, k))]
        Hs = _catalog_labels(spec.max_h, spec.H)
        return _action_cells("gcd", Ms, Hs, spec, dividing=False)
    # elem-abelian-center
    Hs = list(spec.H) or list(ELEM_CENTER_H)
    cells = [("elem-centers", H) for H in Hs]
    p = spec.p or 2
    Ms = list(spec.M) or [abelian_label(m) for m in _p_group_moduli(p, spec.max_m)]
    return cells + _action_cells("gcd", Ms, [group_from_label(h).label for h in Hs], spec,
                                 dividing=False)


def _action_cells(mode: str, Ms, Hs, spec: SweepSpec, dividing: bool) -> list[tuple]:
    keyed = []
    for mi, M in enumerate(Ms):
        m = group_from_label(M).order
        for hi, H in enumerate(Hs):
            h = group_from_label(H).order
            if dividing and m % h:
                continue
            count = len(_actions(M, H, spec.dedup))
            for a in range(count):
                keyed.append(((h, a, hi, mi), ("crossed", mode, M, H, a, spec.dedup, spec.scope)))
    keyed.sort(key=lambda kv: kv[0])
    return [cell for _, cell in keyed]


def run_cell(cell: tuple, budget: int = DEFAULT_BUDGET, timing: bool = False) -> CheckReport:
    t0 = time.perf_counter()
    kind = cell[0]
    try:
        if kind == "frobenius":
            report = check_frobenius(group_from_label(cell[1]), cell[2])
        elif kind == "yoshida":
            report = check_yoshida(group_from_label(cell[1]), group_from_label(cell[2]), budget)
        elif kind == "elem-centers":
            report = elem_abelian_centers_report(group_from_label(cell[1]))
        elif kind == "crossed":
            _, mode, M, H, a, dedup, scope = cell
            action = _actions(M, H, dedup)[a]
            report = check_crossed_divisibility(action, mode, a, budget, scope)
            if mode == "restricted" and report.verdict == "pass":
                # restricted pass must imply gcd-mode pass
                gcd_div = gcd_group(action.target, action.actor.order)
                report.inputs["gcd_divisor"] = gcd_div
                if report.measured_count % gcd_div:
                    report.verdict = "fail"
                    report.witness = {"gcd_divisor": gcd_div}
        else:
            raise SpecError(f"unknown cell kind {kind!r}")
    except BudgetExceeded as exc:
        report = CheckReport(kind, {"cell": list(cell)}, None, None, "skipped",
                             witness={"error": str(exc)})
    if timing:
        report.elapsed = round(time.perf_counter() - t0, 6)
    return report


def _run_cell_star(args):
    return run_cell(*args)


def iter_sweep(spec: SweepSpec) -> Iterator[CheckReport]:
    cells = sweep_cells(spec)
    args = [(c, spec.budget, spec.timing) for c in cells]
    if spec.workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(spec.workers) as pool:
            yield from pool.map(_run_cell_star, args, chunksize=8)
    else:
        for a in args:
            yield run_cell(*a)


def run_sweep(spec: SweepSpec, on_report: Callable[[CheckReport], None] | None = None
              ) -> SweepResult:
    """Run every cell; reports are appended to ``spec.out`` (JSON lines) in cell order."""
    result = SweepResult()
    log = open(spec.out, "a") if spec.out else None
    try:
        for report in iter_sweep(spec):
            result.reports.append(report)
            if log is not None:
                log.write(report.to_json() + "\n")
            if on_report is not None:
                on_report(report)
    finally:
        if log is not None:
            log.close()
    return result


def read_log(path: str | Path) -> list[CheckReport]:
    with open(path) as fh:
        return [CheckReport.from_json(line) for line in fh if line.strip()]
