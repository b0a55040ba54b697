"""Group labels, group-definition stanzas and the built-in catalog.

Labels look like ``cyclic:8``, ``abelian:4,2``, ``dihedral:16``,
``quaternion:8``, ``semidihedral:16``, ``symmetric:4``, ``perm:(1 2);(1 2 3)``,
``perm:@gens.txt``, ``cayley:@table.csv``.  ``A*B`` is a direct product and
``semidirect:M;H;i`` is M x| H for the i-th action in enumerate_actions(M, H)
order.  Parentheses group sub-labels, e.g. ``(semidirect:cyclic:4;klein;1)*cyclic:2``.

A stanza file holds one group per line::

    group s3: kind=permutations params=(1 2); (1 2 3)
    group z42: kind=abelian-factors params=4,2
    group sl23: kind=semidirect-ref params=cyclic:3; quaternion:8; 1

Compound kinds (direct-product, semidirect-ref) take ``;``-separated labels;
earlier stanza names may be used as labels.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .errors import SpecError
from .group import (DEFAULT_ORDER_BOUND, FiniteGroup, GroupSpec, abelian, alternating, cyclic,
                    dicyclic, dihedral, direct_product, from_permutations, make_group, metacyclic,
                    modular, parse_cycles, quaternion, read_cayley_csv, semidihedral, symmetric,
                    trivial_group)

KINDS = ("trivial", "cyclic", "abelian-factors", "dihedral", "generalized-quaternion", "dicyclic",
         "semidihedral", "modular", "metacyclic", "symmetric", "alternating", "permutations",
         "cayley-file", "direct-product", "semidirect-ref")

_FAMILY = {
    "cyclic": "cyclic", "abelian": "abelian-factors", "dihedral": "dihedral",
    "quaternion": "generalized-quaternion", "dicyclic": "dicyclic",
    "semidihedral": "semidihedral", "modular": "modular", "metacyclic": "metacyclic",
    "symmetric": "symmetric", "alternating": "alternating", "perm": "permutations",
    "cayley": "cayley-file", "semidirect": "semidirect-ref",
}
_PREFIX = {kind: family for family, kind in _FAMILY.items()}


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise SpecError(f"expected integers, got {text!r}") from None


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def _unwrap(text: str) -> str:
    text = text.strip()
    while text.startswith("(") and text.endswith(")"):
        depth = 0
        for i, ch in enumerate(text):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and i < len(text) - 1:
                return text
        text = text[1:-1].strip()
    return text


def parse_label(label: str, names: dict[str, GroupSpec] | None = None,
                base: Path | None = None) -> GroupSpec:
    """Turn a group label into a GroupSpec; ``names`` resolves stanza names."""
    text = _unwrap(label)
    if not text:
        raise SpecError("empty group label")
    if names and text in names:
        return names[text]
    if not text.startswith(("perm:", "semidirect:")):
        factors = _split_top(text, "*")
        if len(factors) > 1:
            return GroupSpec("direct-product",
                             tuple(parse_label(f, names, base) for f in factors))
    if text == "trivial":
        return GroupSpec("trivial")
    if text == "klein":
        return GroupSpec("abelian-factors", (2, 2))
    family, sep, rest = text.partition(":")
    if not sep or family not in _FAMILY:
        raise SpecError(f"unknown group label {label!r}")
    kind = _FAMILY[family]
    if kind == "permutations":
        return GroupSpec(kind, _perm_params(rest, base))
    if kind == "cayley-file":
        return GroupSpec(kind, (str(_file_ref(rest, base)),))
    if kind == "semidirect-ref":
        parts = _split_top(rest, ";")
        if len(parts) != 3:
            raise SpecError(f"semidirect label needs M;H;index, got {rest!r}")
        try:
            idx = int(parts[2])
        except ValueError:
            raise SpecError(f"bad action index {parts[2]!r}") from None
        return GroupSpec(kind, (parse_label(parts[0], names, base),
                                parse_label(parts[1], names, base), idx))
    return GroupSpec(kind, _ints(rest))


def _file_ref(text: str, base: Path | None) -> Path:
    if not text.startswith("@"):
        raise SpecError(f"file reference must start with @, got {text!r}")
    path = Path(text[1:])
    if base is not None and not path.is_absolute():
        path = base / path
    return path


def _perm_params(text: str, base: Path | None) -> tuple[str, ...]:
    if text.startswith("@"):
        path = _file_ref(text, base)
        try:
            text = path.read_text()
        except OSError as exc:
            raise SpecError(f"cannot read permutation file {path}: {exc}") from None
    gens = [g.strip() for g in re.split(r"[;\n]", text) if g.strip()]
    if not gens:
        raise SpecError("permutation group needs at least one generator")
    return tuple(gens)


def spec_label(spec: GroupSpec) -> str:
    """Canonical label of a spec (inverse of parse_label up to whitespace)."""
    kind, params = spec.kind, spec.params
    if kind == "trivial":
        return "trivial"
    if kind == "direct-product":
        return "*".join(_wrap(spec_label(p)) for p in params)
    if kind == "semidirect-ref":
        return f"semidirect:{_wrap(spec_label(params[0]))};{_wrap(spec_label(params[1]))};{params[2]}"
    if kind == "permutations":
        return "perm:" + ";".join(params)
    if kind == "cayley-file":
        return f"cayley:@{params[0]}"
    if kind == "abelian-factors" and len(params) == 1:
        return f"cyclic:{params[0]}"
    return f"{_PREFIX[kind]}:" + ",".join(map(str, params))


def _wrap(label: str) -> str:
    if "*" in label or label.startswith(("semidirect:", "perm:", "cayley:")):
        return f"({label})"
    return label


def _one(params, kind) -> int:
    if len(params) != 1:
        raise SpecError(f"{kind} takes one parameter, got {params}")
    return int(params[0])


def build_group(spec: GroupSpec, max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    kind, params = spec.kind, spec.params
    label = spec_label(spec)
    if kind == "trivial":
        return trivial_group()
    if kind == "cyclic":
        return cyclic(_one(params, kind), max_order)
    if kind == "abelian-factors":
        if any(n <= 0 for n in params):
            raise SpecError(f"abelian factors must be positive for a finite group: {params}")
        return abelian(params, max_order=max_order)
    simple = {"dihedral": dihedral, "generalized-quaternion": quaternion, "dicyclic": dicyclic,
              "semidihedral": semidihedral, "modular": modular, "symmetric": symmetric,
              "alternating": alternating}
    if kind in simple:
        return simple[kind](_one(params, kind), max_order)
    if kind == "metacyclic":
        if len(params) != 4:
            raise SpecError("metacyclic takes n,m,s,c")
        return metacyclic(*params, max_order=max_order)
    if kind == "permutations":
        return from_permutations([parse_cycles(g) for g in params], label, max_order)
    if kind == "cayley-file":
        return read_cayley_csv(params[0], label, max_order=max_order)
    if kind == "direct-product":
        if not params:
            raise SpecError("direct product of nothing")
        G = build_group(params[0], max_order)
        for p in params[1:]:
            G = direct_product(G, build_group(p, max_order), max_order=max_order)
        return _relabel(G, label)
    if kind == "semidirect-ref":
        from .actions import enumerate_actions, semidirect_product

        M, H, idx = build_group(params[0], max_order), build_group(params[1], max_order), params[2]
        actions = enumerate_actions(M, H)
        if not 0 <= idx < len(actions):
            raise SpecError(f"action index {idx} out of range 0..{len(actions) - 1}")
        return _relabel(semidirect_product(actions[idx], max_order).product, label)
    raise SpecError(f"unknown group kind {kind!r}")


def _relabel(G: FiniteGroup, label: str) -> FiniteGroup:
    return make_group(G.table, label, element_labels=G.element_labels, factors=G.factors,
                      max_order=G.order, validate=False)


@lru_cache(maxsize=512)
def group_from_label(label: str, max_order: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    """Build (and memoize) the group named by a label.  Groups are immutable."""
    return build_group(parse_label(label), max_order)


# ---------------------------------------------------------------------------
# stanza files

_STANZA = re.compile(r"^group\s+(?P<name>[\w.+-]+)\s*:\s*kind=(?P<kind>[\w-]+)"
                     r"(?:\s+params=(?P<params>.*))?$")


def parse_stanzas(text: str, base: Path | None = None) -> dict[str, GroupSpec]:
    """Parse stanza text into name -> GroupSpec, in file order."""
    specs: dict[str, GroupSpec] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _STANZA.match(line)
        if not m:
            raise SpecError(f"line {lineno}: malformed stanza {raw!r}")
        name, kind, params = m["name"], m["kind"], (m["params"] or "").strip()
        if kind not in KINDS:
            raise SpecError(f"line {lineno}: unknown kind {kind!r}")
        if name in specs:
            raise SpecError(f"line {lineno}: duplicate group name {name!r}")
        if kind == "permutations":
            spec = GroupSpec(kind, _perm_params(params, base))
        elif kind == "cayley-file":
            path = Path(params.lstrip("@"))
            spec = GroupSpec(kind, (str(base / path if base and not path.is_absolute() else path),))
        elif kind in ("direct-product", "semidirect-ref"):
            parts = _split_top(params, ";")
            if kind == "direct-product":
                spec = GroupSpec(kind, tuple(parse_label(p, specs, base) for p in parts))
            else:
                if len(parts) != 3:
                    raise SpecError(f"line {lineno}: semidirect-ref needs M; H; index")
                spec = GroupSpec(kind, (parse_label(parts[0], specs, base),
                                        parse_label(parts[1], specs, base), int(parts[2])))
        else:
            spec = GroupSpec(kind, _ints(params))
        specs[name] = spec
    return specs


@dataclass
class Catalog:
    """Named group specs; lookups accept either a name or a raw label."""

    specs: dict[str, GroupSpec] = field(default_factory=dict)
    max_order: int = DEFAULT_ORDER_BOUND

    @classmethod
    def from_file(cls, path: str | Path, max_order: int = DEFAULT_ORDER_BOUND) -> "Catalog":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise SpecError(f"cannot read catalog {path}: {exc}") from None
        return cls(parse_stanzas(text, path.parent), max_order)

    def extend(self, other: "Catalog") -> None:
        self.specs.update(other.specs)

    def names(self) -> list[str]:
        return list(self.specs)

    def spec(self, label: str) -> GroupSpec:
        return self.specs[label] if label in self.specs else parse_label(label, self.specs)

    def get(self, label: str) -> FiniteGroup:
        """The group for a stanza name or label, carrying its canonical label."""
        return group_from_label(spec_label(self.spec(label)), self.max_order)

    def groups(self, max_order: int | None = None) -> list[FiniteGroup]:
        out = []
        for name in self.specs:
            G = self.get(name)
            if max_order is None or G.order <= max_order:
                out.append(G)
        return out


# every group of order <= 24 up to isomorphism, one label each
DEFAULT_LABELS: tuple[tuple[str, str], ...] = (
    ("trivial", "trivial"),
    ("c2", "cyclic:2"),
    ("c3", "cyclic:3"),
    ("c4", "cyclic:4"), ("klein", "abelian:2,2"),
    ("c5", "cyclic:5"),
    ("c6", "cyclic:6"), ("s3", "symmetric:3"),
    ("c7", "cyclic:7"),
    ("c8", "cyclic:8"), ("c4xc2", "abelian:4,2"), ("c2^3", "abelian:2,2,2"),
    ("d8", "dihedral:8"), ("q8", "quaternion:8"),
    ("c9", "cyclic:9"), ("c3xc3", "abelian:3,3"),
    ("c10", "cyclic:10"), ("d10", "dihedral:10"),
    ("c11", "cyclic:11"),
    ("c12", "cyclic:12"), ("c6xc2", "abelian:6,2"), ("d12", "dihedral:12"),
    ("dic12", "dicyclic:12"), ("a4", "alternating:4"),
    ("c13", "cyclic:13"),
    ("c14", "cyclic:14"), ("d14", "dihedral:14"),
    ("c15", "cyclic:15"),
    ("c16", "cyclic:16"), ("c8xc2", "abelian:8,2"), ("c4xc4", "abelian:4,4"),
    ("c4xc2^2", "abelian:4,2,2"), ("c2^4", "abelian:2,2,2,2"),
    ("d16", "dihedral:16"), ("sd16", "semidihedral:16"), ("q16", "quaternion:16"),
    ("m16", "modular:16"), ("c4:c4", "metacyclic:4,4,-1,0"),
    ("c2^2:c4", "semidirect:cyclic:4;abelian:2,2;1"),
    ("pauli", "semidirect:cyclic:2;abelian:4,2;1"),
    ("d8xc2", "dihedral:8*cyclic:2"), ("q8xc2", "quaternion:8*cyclic:2"),
    ("c17", "cyclic:17"),
    ("c18", "cyclic:18"), ("c6xc3", "abelian:6,3"), ("d18", "dihedral:18"),
    ("s3xc3", "symmetric:3*cyclic:3"), ("gendih9", "semidirect:cyclic:2;abelian:3,3;7"),
    ("c19", "cyclic:19"),
    ("c20", "cyclic:20"), ("c10xc2", "abelian:10,2"), ("d20", "dihedral:20"),
    ("dic20", "dicyclic:20"), ("f20", "metacyclic:5,4,2,0"),
    ("c21", "cyclic:21"), ("f21", "metacyclic:7,3,2,0"),
    ("c22", "cyclic:22"), ("d22", "dihedral:22"),
    ("c23", "cyclic:23"),
    ("c24", "cyclic:24"), ("c12xc2", "abelian:12,2"), ("c6xc2^2", "abelian:6,2,2"),
    ("s4", "symmetric:4"), ("sl23", "semidirect:cyclic:3;quaternion:8;1"),
    ("dic24", "dicyclic:24"), ("d24", "dihedral:24"), ("c3:c8", "metacyclic:3,8,-1,0"),
    ("a4xc2", "alternating:4*cyclic:2"), ("d12xc2", "dihedral:12*cyclic:2"),
    ("dic12xc2", "dicyclic:12*cyclic:2"), ("s3xc4", "symmetric:3*cyclic:4"),
    ("d8xc3", "dihedral:8*cyclic:3"), ("q8xc3", "quaternion:8*cyclic:3"),
    ("c3:d8", "semidirect:dihedral:8;cyclic:3;2"),
)

# the 2-groups of order <= 16, one per isomorphism class
TWO_GROUP_NAMES = ("trivial", "c2", "c4", "klein", "c8", "c4xc2", "c2^3", "d8", "q8", "c16",
                   "c8xc2", "c4xc4", "c4xc2^2", "c2^4", "d16", "sd16", "q16", "m16", "c4:c4",
                   "c2^2:c4", "pauli", "d8xc2", "q8xc2")


def default_catalog(max_order: int = DEFAULT_ORDER_BOUND) -> Catalog:
    return Catalog({name: parse_label(label) for name, label in DEFAULT_LABELS}, max_order)


def abelian_moduli(limit: int) -> list[tuple[int, ...]]:
    """Invariant-factor moduli (largest first) of every abelian group of order <= limit."""
    out = []

    def partitions(n, bound, prefix):
        # chains of divisors d1 | d2 | ... listed largest first
        if n == 1:
            out.append(prefix)
            return
        for d in range(min(n, bound), 1, -1):
            if n % d == 0 and (not prefix or prefix[-1] % d == 0):
                partitions(n // d, d, prefix + (d,))

    for n in range(1, limit + 1):
        partitions(n, n, ())
    return out


def abelian_label(moduli: tuple[int, ...]) -> str:
    if not moduli:
        return "trivial"
    if len(moduli) == 1:
        return f"cyclic:{moduli[0]}"
    return "abelian:" + ",".join(map(str, moduli))
