import json

import pytest

from bivcob.cycles import (
    InadmissibleCycleError,
    by_grade,
    canonicalize,
    cycle,
    enum_M,
    enum_Mprime,
    enum_OB,
    enumerate_cycles,
    equivalence_mode,
    make_cycle,
    orbit,
)
from bivcob.site import bundled_path, bundled_site


@pytest.fixture(scope="module")
def P1():
    return bundled_site("p1")


@pytest.fixture(scope="module")
def PT():
    return bundled_site("point")


def carriers(cs):
    return [(c.carrier, c.bundles, c.grade) for c in cs]


def test_point_site(PT):
    assert carriers(enum_M(PT, "id_pt")) == [("id_pt", (), 0)]
    assert carriers(enum_Mprime(PT, "id_pt")) == [("id_pt", (), 0)]
    assert carriers(enum_OB(PT, "id_pt", 3)) == [("id_pt", (), 0)]


def test_m_over_p1(P1):
    assert carriers(enum_M(P1, "c")) == [("i", (), 0), ("id_P1", (), 1), ("ic", (), 1)]
    assert carriers(enum_M(P1, "id_P1")) == [("id_P1", (), 1)]
    assert enum_M(P1, "i") == []


def test_m_over_p1_literal_equivalence(P1):
    # isomorphism over the target merges the constant self-map with the identity
    with equivalence_mode("target"):
        assert carriers(enum_M(P1, "c")) == [("i", (), 0), ("id_P1", (), 1)]


def test_mprime_over_p1(P1):
    assert carriers(enum_Mprime(P1, "id_P1")) == [("c", (), 0), ("id_P1", (), 1)]
    # i o c is not smooth, so the only point class over c is the point itself
    assert carriers(enum_Mprime(P1, "c")) == [("id_pt", (), 0)]
    assert carriers(enum_Mprime(P1, "i")) == [("c", (), 0)]


def test_ob_adds_bundles(P1):
    base = carriers(enum_OB(P1, "c", 0))
    assert base == carriers(enum_M(P1, "c"))
    one = carriers(enum_OB(P1, "c", 1))
    assert set(one) - set(base) == {("id_P1", ((-1,),), 0), ("id_P1", ((1,),), 0),
                                    ("ic", ((-1,),), 0), ("ic", ((1,),), 0)}
    # r <= dim W = 1 caps the multisets whatever B is
    assert carriers(enum_OB(P1, "c", 5)) == one
    assert enum_OB(P1, "c", 1, grades=(5, 7)) == []
    assert carriers(enum_OB(P1, "c", 1, grades=(1, 1))) == [("id_P1", (), 1), ("ic", (), 1)]


def test_ob_grades_are_dim_minus_rank(P1):
    for f in P1.morphisms:
        for c in enum_OB(P1, f, 2):
            assert c.grade == P1.dim(P1.src(c.carrier)) - len(c.bundles)


def test_ob_bound_zero_is_m(P1):
    for f in P1.morphisms:
        assert carriers(enum_OB(P1, f, 0)) == carriers(enum_M(P1, f))


def test_declared_iso_merges_points(P1):
    # Z and pt are isomorphic and i_Z = i o z
    assert canonicalize(P1, make_cycle(P1, "M", "c", "i_Z")) == make_cycle(P1, "M", "c", "i")
    assert [c.carrier for c in orbit(P1, make_cycle(P1, "M", "c", "i"))] == ["i", "i_Z"]
    assert cycle(P1, "Mprime", "id_pt", "zi").carrier == "id_pt"


def test_no_partners_is_itself(P1):
    c = make_cycle(P1, "M", "id_P1", "id_P1")
    assert canonicalize(P1, c) == c


def test_bundle_order_irrelevant(P1):
    a = cycle(P1, "OB", "id_P1", "id_P1", [(1,), (-1,)])
    b = cycle(P1, "OB", "id_P1", "id_P1", [(-1,), (1,)])
    assert a == b


def test_inadmissible(P1):
    with pytest.raises(InadmissibleCycleError, match="not smooth"):
        make_cycle(P1, "M", "id_P1", "i")
    with pytest.raises(InadmissibleCycleError):
        make_cycle(P1, "M", "c", "id_P1", [(1,)])
    with pytest.raises(InadmissibleCycleError):
        make_cycle(P1, "OB", "c", "id_P1", [(1, 0)])
    with pytest.raises(InadmissibleCycleError):
        make_cycle(P1, "Mprime", "id_P1", "ic")


@pytest.mark.parametrize("name", ["point", "p1", "dp_demo"])
@pytest.mark.parametrize("kind", ["M", "Mprime", "OB"])
def test_lists_are_canonical_and_duplicate_free(name, kind):
    S = bundled_site(name)
    for f in S.morphisms:
        cs = enumerate_cycles(S, kind, f, 1)
        assert len(set(cs)) == len(cs)
        assert all(canonicalize(S, c) == c for c in cs)
        assert cs == sorted(cs, key=lambda c: c.key)


def scan_oracle(name, kind, f):
    """Count classes straight from the site document: union-find over declared isos."""
    doc = json.loads(bundled_path(name).read_text())
    mors = {m["id"]: m for m in doc["morphisms"]}
    for o in doc["objects"]:
        mors[f"id_{o['id']}"] = {"id": f"id_{o['id']}", "src": o["id"], "dst": o["id"],
                                 "proper": True, "smooth": True, "inverse": f"id_{o['id']}"}
    comp = {(g, h): gh for g, h, gh in doc.get("composition", [])}

    def compose(g, h):
        if g.startswith("id_") and mors[g]["src"] == mors[h]["dst"]:
            return h
        if h.startswith("id_"):
            return g
        return comp[(g, h)]

    fm = mors[f]
    if kind == "M":
        hs = [h for h, m in mors.items() if m["dst"] == fm["src"] and m.get("proper")
              and mors[compose(f, h)].get("smooth")]
        related = lambda h, k, g: compose(k, g) == h
        obj = lambda h: mors[h]["src"]
    else:
        hs = [h for h, m in mors.items() if m["src"] == fm["dst"] and m.get("proper")
              and mors[compose(h, f)].get("smooth")]
        related = lambda h, k, g: compose(g, h) == k
        obj = lambda h: mors[h]["dst"]
    isos = [g for g, m in mors.items() if m.get("inverse")]
    parent = {h: h for h in hs}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for h in hs:
        for k in hs:
            for g in isos:
                if mors[g]["src"] == obj(h) and mors[g]["dst"] == obj(k) and related(h, k, g):
                    parent[find(h)] = find(k)
    return len({find(h) for h in hs})


@pytest.mark.parametrize("name", ["point", "p1", "dp_demo"])
@pytest.mark.parametrize("kind", ["M", "Mprime"])
def test_class_counts_match_scan(name, kind):
    S = bundled_site(name)
    for f in S.morphisms:
        assert len(enumerate_cycles(S, kind, f)) == scan_oracle(name, kind, f), f


def test_by_grade(P1):
    g = by_grade(enum_M(P1, "c"))
    assert list(g) == [0, 1] and len(g[1]) == 2
