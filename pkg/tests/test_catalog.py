import itertools
from collections import Counter

import pytest

from crosshom.catalog import (DEFAULT_LABELS, TWO_GROUP_NAMES, Catalog, abelian_label,
                              abelian_moduli, default_catalog, group_from_label, parse_label,
                              parse_stanzas, spec_label)
from crosshom.errors import SpecError
from crosshom.group import fingerprint

from oracles import is_isomorphic

# number of isomorphism classes of groups of each order 1..24
GROUP_COUNTS = [1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14, 1, 5, 1, 5, 2, 2, 1, 15]


def test_catalog_counts(catalog):
    orders = Counter(G.order for G in catalog.groups())
    assert [orders[n] for n in range(1, 25)] == GROUP_COUNTS


def test_catalog_pairwise_non_isomorphic(catalog):
    groups = catalog.groups()
    by_print = {}
    for G in groups:
        by_print.setdefault(fingerprint(G), []).append(G)
    for same in by_print.values():
        for A, B in itertools.combinations(same, 2):
            assert not is_isomorphic(A.table, B.table), (A.label, B.label)


def test_two_group_names(catalog):
    for name in TWO_GROUP_NAMES:
        n = catalog.get(name).order
        assert n & (n - 1) == 0 and n <= 16
    assert len(TWO_GROUP_NAMES) == 1 + 1 + 2 + 5 + 14


def test_label_round_trip():
    for _, label in DEFAULT_LABELS:
        assert spec_label(parse_label(label)) == label


def test_labels_resolve():
    assert group_from_label("klein").order == 4
    assert group_from_label("(dihedral:8)*cyclic:3").order == 24
    assert group_from_label("perm:(1 2);(1 2 3)").order == 6
    with pytest.raises(SpecError):
        group_from_label("nosuch:4")
    with pytest.raises(SpecError):
        group_from_label("semidirect:cyclic:2;cyclic:3;9")


def test_abelian_moduli():
    mods = abelian_moduli(16)
    assert len(mods) == 25
    assert (4, 2) in mods and (2, 4) not in mods
    assert abelian_label((4, 2)) == "abelian:4,2"


def test_stanzas(tmp_path):
    (tmp_path / "z3.csv").write_text(",e,a,b\ne,e,a,b\na,a,b,e\nb,b,e,a\n")
    text = """
    # comment
    group s3: kind=permutations params=(1 2); (1 2 3)
    group z42: kind=abelian-factors params=4,2
    group z3: kind=cayley-file params=@z3.csv
    group both: kind=direct-product params=s3; z3
    group sl23: kind=semidirect-ref params=cyclic:3; quaternion:8; 1
    """
    path = tmp_path / "cat.txt"
    path.write_text(text)
    cat = Catalog.from_file(path)
    assert cat.names() == ["s3", "z42", "z3", "both", "sl23"]
    assert [cat.get(n).order for n in cat.names()] == [6, 8, 3, 18, 24]
    ref = default_catalog().get("sl23")
    assert is_isomorphic(cat.get("sl23").table, ref.table)
    with pytest.raises(SpecError):
        parse_stanzas("group x: kind=bogus params=1")
    with pytest.raises(SpecError):
        parse_stanzas("group x kind=cyclic")
    with pytest.raises(SpecError):
        parse_stanzas("group x: kind=cyclic params=2\ngroup x: kind=cyclic params=3")
