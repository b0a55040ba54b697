"""Command-line front end.

    crosshom check {frobenius|yoshida|crossed|brauer|lemma-tail|hom-family} ...
    crosshom count {homs|crossed|roots} ...
    crosshom sweep {frobenius|yoshida|restricted-ay|main-theorem|elem-abelian-center} ...
    crosshom catalog list | show <label>

Defaults come from a key=value config file (``--config`` or $CROSSHOM_CONFIG);
flags override it.  Exit status: 0 all pass, 1 any fail, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field, fields
from typing import Callable, Iterable, TextIO

from . import checkers as ck
from .actions import enumerate_actions, semidirect_product
from .catalog import Catalog, default_catalog, spec_label
from .errors import BudgetExceeded, CrosshomError, HypothesisViolation
from .group import DEFAULT_ORDER_BOUND, FiniteGroup, center, fingerprint
from .homset import (DEFAULT_BUDGET, Homomorphism, SectionConstraint, count_nth_roots,
                     enumerate_homs, hom_images)
from .subgroups import all_subgroups, normal_subgroups
from .tails import Quadruple

CONFIG_ENV = "CROSSHOM_CONFIG"


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    catalogs: list[str] = field(default_factory=list)
    max_order: int = DEFAULT_ORDER_BOUND
    workers: int = 1
    log: str | None = None
    format: str = "table"
    budget: int = DEFAULT_BUDGET
    timing: bool = False
    scope: str = "attempt"

    def validate(self) -> None:
        if self.max_order < 1 or self.budget < 1:
            raise UsageError("bounds must be positive")
        if self.workers < 1:
            raise UsageError("workers must be at least 1")
        if self.format not in ("table", "json"):
            raise UsageError(f"format must be table or json, not {self.format!r}")
        if self.scope not in ("attempt", "skip"):
            raise UsageError(f"scope must be attempt or skip, not {self.scope!r}")


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def load_config(path: str) -> CliConfig:
    """Read key=value lines; '#' starts a comment.  ``catalog`` may repeat."""
    cfg = CliConfig()
    known = {f.name for f in fields(CliConfig)} | {"catalog"}
    try:
        lines = open(path).read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        try:
            if key in ("catalog", "catalogs"):
                cfg.catalogs += [v.strip() for v in value.split(",") if v.strip()]
            elif key in ("max_order", "workers", "budget"):
                setattr(cfg, key, int(value))
            elif key == "timing":
                cfg.timing = _parse_bool(value)
            else:
                setattr(cfg, key, (value or None) if key == "log" else value)
        except ValueError:
            raise UsageError(f"{path}:{n}: bad value for {key}: {value!r}") from None
    return cfg


# ---------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--json", action="store_true", default=None, help="emit JSON lines")
    g.add_argument("--config", help="key=value config file (default: $%s)" % CONFIG_ENV)
    g.add_argument("--catalog", action="append", help="extra catalog stanza file")
    g.add_argument("--max-order", type=int, help="largest group order to build")
    g.add_argument("--budget", type=int, help="enumeration budget per count")
    g.add_argument("--timing", action="store_true", default=None,
                   help="record elapsed seconds in reports")
    g.add_argument("--out", help="append reports to this JSON lines log")
    return p


def _action_arg(text: str):
    if text == "all":
        return "all"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an index or 'all'") from None


def _nmk(text: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(x) for x in text.split(","))
    except ValueError:
        parts = ()
    if len(parts) != 3 or min(parts) < 0:
        raise argparse.ArgumentTypeError("expected three non-negative integers n,m,k")
    return parts  # type: ignore[return-value]


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="crosshom", description=__doc__.split("\n")[0])
    top = parser.add_subparsers(dest="command", required=True)

    check = top.add_parser("check", help="run one check").add_subparsers(dest="what",
                                                                          required=True)
    p = check.add_parser("frobenius", parents=[common])
    p.add_argument("--group", required=True)
    p.add_argument("--n", type=int, required=True)
    p = check.add_parser("yoshida", parents=[common])
    p.add_argument("--M", required=True)
    p.add_argument("--group", required=True)
    p = check.add_parser("crossed", parents=[common])
    p.add_argument("--M", required=True)
    p.add_argument("--H", required=True)
    p.add_argument("--action", type=_action_arg, default="all")
    p.add_argument("--mode", choices=("restricted", "gcd"), default="restricted")
    p.add_argument("--no-dedup", action="store_true", help="every action, not one per class")
    p.add_argument("--scope", choices=("attempt", "skip"))
    p = check.add_parser("brauer", parents=[common])
    p.add_argument("--group", required=True)
    p.add_argument("--normal", type=_action_arg, default="all",
                   help="index into the normal subgroups, or 'all'")
    for name in ("lemma-tail", "hom-family"):
        p = check.add_parser(name, parents=[common])
        p.add_argument("--family", choices=("homs", "sections"), default="homs",
                       help="Hom(F, G) with F ->> F/F', or sections of M x| H")
        p.add_argument("--F")
        p.add_argument("--G")
        p.add_argument("--subgroup", type=_action_arg, default="all",
                       help="index into the subgroups of G (homs family)")
        p.add_argument("--M")
        p.add_argument("--H")
        p.add_argument("--action", type=_action_arg, default="all")
        if name == "lemma-tail":
            p.add_argument("--phi", type=_action_arg, default="all")
        else:
            p.add_argument("--relaxed", action="store_true")

    count = top.add_parser("count", help="count objects").add_subparsers(dest="what",
                                                                         required=True)
    p = count.add_parser("homs", parents=[common])
    p.add_argument("--F", required=True)
    p.add_argument("--G", required=True)
    p = count.add_parser("crossed", parents=[common])
    p.add_argument("--M", required=True)
    p.add_argument("--H", required=True)
    p.add_argument("--action", type=_action_arg, default="all")
    p.add_argument("--no-dedup", action="store_true")
    p = count.add_parser("roots", parents=[common])
    p.add_argument("--group", required=True)
    p.add_argument("--n", type=int, required=True)

    sweep = top.add_parser("sweep", help="run a sweep").add_subparsers(dest="what",
                                                                       required=True)
    for th in ck.THEOREMS:
        p = sweep.add_parser(th, parents=[common])
        p.add_argument("--p", type=int)
        p.add_argument("--nmk", type=_nmk)
        p.add_argument("--max-g", type=int, default=24)
        p.add_argument("--max-h", type=int, default=16)
        p.add_argument("--max-m", type=int, default=16)
        p.add_argument("--M", action="append", default=[], help="actor label (repeatable)")
        p.add_argument("--H", action="append", default=[],
                       help="group label restricting the catalog (repeatable)")
        p.add_argument("--no-dedup", action="store_true")
        p.add_argument("--workers", type=int)
        p.add_argument("--scope", choices=("attempt", "skip"))

    cat = top.add_parser("catalog", help="inspect the group catalog").add_subparsers(
        dest="what", required=True)
    p = cat.add_parser("list", parents=[common])
    p.add_argument("--max-g", type=int)
    p = cat.add_parser("show", parents=[common])
    p.add_argument("label")
    p.add_argument("--table", action="store_true", help="print the Cayley table")
    return parser


# ---------------------------------------------------------------------------
# execution


class Runner:
    def __init__(self, args, cfg: CliConfig, out: TextIO):
        self.args, self.cfg, self.out = args, cfg, out
        self.catalog = default_catalog(cfg.max_order)
        for path in cfg.catalogs:
            self.catalog.extend(Catalog.from_file(path, cfg.max_order))
        self.failed = False
        self.log_path = getattr(args, "out", None) or cfg.log

    def group(self, label: str | None, flag: str) -> FiniteGroup:
        if not label:
            raise UsageError(f"--{flag} is required")
        return self.catalog.get(label)

    def label(self, text: str) -> str:
        return spec_label(self.catalog.spec(text))

    # output

    def emit(self, reports: Iterable[ck.CheckReport]) -> None:
        log = open(self.log_path, "a") if self.log_path else None
        rows = []
        try:
            for r in reports:
                if log is not None:
                    log.write(r.to_json() + "\n")
                self.failed |= r.verdict == "fail"
                if self.cfg.format == "json":
                    print(r.to_json(), file=self.out)
                else:
                    rows.append(r)
        finally:
            if log is not None:
                log.close()
        if rows:
            print(format_table(rows), file=self.out)

    def timed(self, fn: Callable[[], ck.CheckReport]) -> ck.CheckReport:
        t0 = time.perf_counter()
        try:
            report = fn()
        except BudgetExceeded as exc:
            report = ck.CheckReport("budget", {}, None, None, "skipped",
                                    witness={"error": str(exc)})
        if self.cfg.timing:
            report.elapsed = round(time.perf_counter() - t0, 6)
        return report

    # selections

    def _actions(self, M, H, which, dedup: bool):
        acts = enumerate_actions(M, H, dedup=dedup)
        if which == "all":
            return list(enumerate(acts))
        if not 0 <= which < len(acts):
            raise UsageError(f"action index {which} out of range (0..{len(acts) - 1})")
        return [(which, acts[which])]

    @staticmethod
    def _pick(items, which, what: str):
        if which == "all":
            return list(enumerate(items))
        if not 0 <= which < len(items):
            raise UsageError(f"{what} index {which} out of range (0..{len(items) - 1})")
        return [(which, items[which])]

    def _families(self):
        """(label, quadruple, Phi rows) for lemma-tail and hom-family."""
        a = self.args
        if a.family == "homs":
            F, G = self.group(a.F, "F"), self.group(a.G, "G")
            Phi = enumerate_homs(F, G, budget=self.cfg.budget)
            for i, S in self._pick(all_subgroups(G), a.subgroup, "subgroup"):
                yield {"subgroup": i}, ck.abelianization_quadruple(F, G, S), Phi
        else:
            M, H = self.group(a.M, "M"), self.group(a.H, "H")
            for i, act in self._actions(M, H, a.action, dedup=True):
                sd = semidirect_product(act, max_order=4096)
                rows = hom_images(M, sd.product, SectionConstraint.sections(sd), self.cfg.budget)
                yield ({"action": i}, Quadruple.for_sections(sd),
                       [Homomorphism(M, sd.product, r) for r in rows])

    # commands

    def check(self) -> None:
        a, cfg = self.args, self.cfg
        w = a.what
        if w == "frobenius":
            G = self.group(a.group, "group")
            self.emit([self.timed(lambda: ck.check_frobenius(G, a.n))])
        elif w == "yoshida":
            M, G = self.group(a.M, "M"), self.group(a.group, "group")
            self.emit([self.timed(lambda: ck.check_yoshida(M, G, cfg.budget))])
        elif w == "crossed":
            M, H = self.group(a.M, "M"), self.group(a.H, "H")
            scope = a.scope or cfg.scope
            self.emit(self.timed(lambda: ck.check_crossed_divisibility(
                act, a.mode, i, cfg.budget, scope))
                for i, act in self._actions(M, H, a.action, not a.no_dedup))
        elif w == "brauer":
            G = self.group(a.group, "group")
            self.emit(self.timed(lambda: ck.check_brauer(G, N))
                      for _, N in self._pick(normal_subgroups(G), a.normal, "normal subgroup"))
        elif w == "lemma-tail":
            self.emit(self._lemma_tail())
        elif w == "hom-family":
            self.emit(self._hom_family())

    def _lemma_tail(self):
        for tag, quad, Phi in self._families():
            for j, phi in self._pick(Phi, self.args.phi, "phi"):
                report = self.timed(lambda: ck.check_lemma_tail(quad, Phi, phi))
                report.inputs.update(tag, phi_index=j)
                yield report

    def _hom_family(self):
        a = self.args
        every = (a.subgroup if a.family == "homs" else a.action) == "all"
        for tag, quad, Phi in self._families():
            try:
                report = self.timed(lambda: ck.check_hom_family(quad, Phi, self.args.relaxed,
                                                                self.cfg.budget))
            except HypothesisViolation as exc:
                if not every:
                    raise
                # over "all", quadruples outside the hypotheses are reported, not fatal
                report = ck._vacuous("hom-family", {"F": quad.F.label, "G": quad.G.label,
                                                    "H_order": quad.H.order}, str(exc))
            report.inputs.update(tag)
            yield report

    def count(self) -> None:
        a, cfg = self.args, self.cfg
        if a.what == "homs":
            F, G = self.group(a.F, "F"), self.group(a.G, "G")

            def run():
                n = hom_images(F, G, budget=cfg.budget).shape[0]
                return ck.CheckReport("count-homs", {"F": F.label, "G": G.label,
                                                     "relation": "divides"}, n, 1, "pass")
            self.emit([self.timed(run)])
        elif a.what == "roots":
            G = self.group(a.group, "group")
            n = count_nth_roots(G, a.n)
            self.emit([ck.CheckReport("count-roots",
                                      {"G": G.label, "n": a.n, "relation": "divides"},
                                      n, math.gcd(G.order, a.n),
                                      "pass" if n % math.gcd(G.order, a.n) == 0 else "fail")])
        else:
            M, H = self.group(a.M, "M"), self.group(a.H, "H")
            self.emit(self.timed(lambda: ck.check_crossed_divisibility(
                act, "gcd", i, cfg.budget, "attempt"))
                for i, act in self._actions(M, H, a.action, not a.no_dedup))

    def sweep(self) -> None:
        a, cfg = self.args, self.cfg
        spec = ck.SweepSpec(a.what, max_g=a.max_g, max_h=a.max_h, max_m=a.max_m, p=a.p,
                            nmk=a.nmk, M=tuple(self.label(x) for x in a.M),
                            H=tuple(self.label(x) for x in a.H), dedup=not a.no_dedup,
                            out=self.log_path, workers=a.workers or cfg.workers,
                            timing=cfg.timing, scope=a.scope or cfg.scope, budget=cfg.budget)
        fails = []

        def on_report(r: ck.CheckReport):
            if cfg.format == "json":
                print(r.to_json(), file=self.out)
            elif r.verdict == "fail":
                fails.append(r)

        result = ck.run_sweep(spec, on_report)
        self.failed = result.failed
        summary = dict(result.summary, sweep=a.what)
        if cfg.format == "json":
            print(json.dumps(summary, separators=(",", ":")), file=sys.stderr)
        else:
            if fails:
                print(format_table(fails), file=self.out)
            print(" ".join(f"{k}={json.dumps(v, separators=(',', ':'))}"
                           for k, v in summary.items()), file=self.out)

    def catalog_cmd(self) -> None:
        a = self.args
        if a.what == "list":
            rows = []
            for name in self.catalog.names():
                G = self.catalog.get(name)
                if a.max_g is None or G.order <= a.max_g:
                    rows.append({"name": name, "label": G.label, "order": G.order,
                                 "abelian": G.is_abelian()})
            if self.cfg.format == "json":
                for r in rows:
                    print(json.dumps(r, separators=(",", ":")), file=self.out)
            else:
                print(f"{'name':<10} {'order':>5}  {'abelian':<7}  label", file=self.out)
                for r in rows:
                    print(f"{r['name']:<10} {r['order']:>5}  {str(r['abelian']).lower():<7}  "
                          f"{r['label']}", file=self.out)
            return
        G = self.catalog.get(a.label)
        info = {"label": G.label, "order": G.order, "abelian": G.is_abelian(),
                "center_order": center(G).order, "factors": G.factors,
                "element_orders": G.orders.tolist(),
                "subgroup_orders": sorted(S.order for S in all_subgroups(G)),
                "fingerprint": repr(fingerprint(G))}
        if a.table:
            info["table"] = G.table.tolist()
        if self.cfg.format == "json":
            print(json.dumps(info, separators=(",", ":")), file=self.out)
        else:
            for k, v in info.items():
                if k == "table":
                    print("table:", file=self.out)
                    for row in v:
                        print("  " + " ".join(f"{x:>3}" for x in row), file=self.out)
                else:
                    print(f"{k}: {v}", file=self.out)


_SKIP_INPUTS = {"relation", "action_generators", "N", "phi"}


def _inputs_text(inputs: dict) -> str:
    parts = []
    for k, v in inputs.items():
        if k in _SKIP_INPUTS:
            continue
        parts.append(f"{k}={v if not isinstance(v, (list, dict)) else json.dumps(v)}")
    text = " ".join(parts)
    return text if len(text) <= 60 else text[:57] + "..."


def format_table(reports: list[ck.CheckReport]) -> str:
    head = f"{'check':<14} {'inputs':<60} {'count':>8} {'divisor':>8} {'rel':<7} verdict"
    lines = [head, "-" * len(head)]
    for r in reports:
        rel = r.inputs.get("relation", "")
        cnt = "-" if r.measured_count is None else str(r.measured_count)
        div = "-" if r.required_divisor is None else str(r.required_divisor)
        line = (f"{r.check_name:<14} {_inputs_text(r.inputs):<60} {cnt:>8} {div:>8} "
                f"{rel:<7} {r.verdict}")
        if r.elapsed is not None:
            line += f"  {r.elapsed:.3f}s"
        lines.append(line)
    return "\n".join(lines)


def resolve_config(args) -> CliConfig:
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    cfg = load_config(path) if path else CliConfig()
    if getattr(args, "catalog", None):
        cfg.catalogs += args.catalog
    for name in ("max_order", "budget"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if getattr(args, "json", None):
        cfg.format = "json"
    if getattr(args, "timing", None):
        cfg.timing = True
    if getattr(args, "workers", None) is not None:
        cfg.workers = args.workers
    cfg.validate()
    return cfg


def run_command(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        runner = Runner(args, cfg, out)
        {"check": runner.check, "count": runner.count, "sweep": runner.sweep,
         "catalog": runner.catalog_cmd}[args.command]()
    except (UsageError, CrosshomError) as exc:
        print(f"crosshom: error: {exc}", file=sys.stderr)
        return 2
    return 1 if runner.failed else 0


def main() -> None:
    sys.exit(run_command())
