import json

import pytest

from bivcob.site import (
    BUNDLED,
    DanglingIdError,
    MissingCompositeError,
    MissingSquareError,
    SiteParseError,
    bundled_path,
    bundled_site,
    load_site,
    site_document,
    validate_site,
)


def raw(name):
    return json.loads(bundled_path(name).read_text())


def codes(doc):
    return {v.code for v in validate_site(load_site(doc))}


@pytest.fixture(scope="module")
def P1():
    return bundled_site("p1")


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_fixtures_are_valid(name):
    assert validate_site(bundled_site(name)) == []


@pytest.mark.parametrize("name", BUNDLED)
def test_document_round_trip(name):
    S = bundled_site(name)
    T = load_site(site_document(S))
    assert validate_site(T) == []
    assert (T.objects, T.morphisms, T.composition) == (S.objects, S.morphisms, S.composition)
    assert (T.fiber_squares, T.pushout_squares, T.picard) == (S.fiber_squares, S.pushout_squares, S.picard)


def test_digest_ignores_whitespace():
    text = bundled_path("p1").read_text()
    compact = json.dumps(json.loads(text), separators=(",", ":"))
    assert load_site(text).digest == load_site(compact).digest
    assert load_site(text).digest != bundled_site("point").digest


def test_basic_structure(P1):
    assert P1.final == "pt"
    assert P1.structure_map("P1") == "c"
    assert P1.structure_map("Z") == "z"
    assert P1.compose("c", "i") == "id_pt"
    assert P1.compose("i", "c") == "ic"
    assert P1.compose_chain("c", "i_Z", "zi") == "id_pt"
    assert P1.compose("id_P1", "ic") == "ic"
    with pytest.raises(MissingCompositeError):
        P1.compose("c", "c")
    assert P1.isos_from("Z") == ["id_Z", "z"]


def test_squares_and_identity_rules(P1):
    assert P1.fiber_square("c", "z") == ("P1", "id_P1", "zc")
    assert P1.fiber_square("z", "c") == ("P1", "zc", "id_P1")  # symmetric lookup
    assert P1.fiber_square("id_pt", "c") == ("P1", "c", "id_P1")
    assert P1.fiber_square("i", "id_P1") == ("pt", "id_pt", "i")
    with pytest.raises(MissingSquareError, match=r"\(c, c\)"):
        P1.fiber_square("c", "c")
    assert P1.pushout_square("c", "zc") == ("pt", "id_pt", "z")
    assert P1.pushout_square("zc", "c") == ("pt", "z", "id_pt")
    assert P1.pushout_square("id_P1", "c") == ("pt", "c", "id_pt")
    with pytest.raises(MissingSquareError):
        P1.pushout_square("ic", "ic")


def test_every_available_square_commutes(P1):
    for f, g in P1.square_pairs():
        P, p1, p2 = P1.fiber_square(f, g)
        assert P1.compose(f, p1) == P1.compose(g, p2)
        assert P1.src(p1) == P1.src(p2) == P


def test_pullback_bundles(P1):
    assert P1.pullback_bundle("id_P1", (2,)) == (2,)
    assert P1.pullback_bundle("ic", (1,)) == (0,)
    assert P1.pullback_bundle("i", (1,)) == ()
    assert P1.pullback_bundle("c", ()) == (0,)
    with pytest.raises(ValueError):
        P1.pullback_bundle("c", (1,))


def test_picard_functoriality(P1):
    for g in P1.morphisms:
        for f in P1.morphisms_to(P1.src(g)):
            gf = P1.compose(g, f)
            for k in range(-2, 3):
                L = (k,) * P1.pic_rank(P1.dst(g))
                assert P1.pullback_bundle(gf, L) == P1.pullback_bundle(f, P1.pullback_bundle(g, L))


def test_mprime_confined(P1):
    assert P1.mprime_confined("id_P1")
    assert all(P1.mprime_confined(f) for f in P1.morphisms)


def test_mprime_not_confined():
    # a node Y whose normalisation W -> Y -> pt is smooth, though Y -> pt is not
    S = load_site({
        "format": 1,
        "objects": [{"id": "pt", "dim": 0, "smooth": True, "final": True},
                    {"id": "W", "dim": 1, "smooth": True}, {"id": "Y", "dim": 1, "smooth": False}],
        "morphisms": [{"id": "n", "src": "W", "dst": "Y", "proper": True, "projective": True},
                      {"id": "cw", "src": "W", "dst": "pt", "proper": True, "projective": True, "smooth": True},
                      {"id": "cy", "src": "Y", "dst": "pt", "proper": True, "projective": True}],
        "composition": [["cy", "n", "cw"]],
    })
    assert validate_site(S) == []
    assert not S.mprime_confined("n")
    assert S.mprime_confined("cy")


# -- parse errors ----------------------------------------------------------


def test_json_syntax_error_has_location():
    with pytest.raises(SiteParseError, match="line 1 column"):
        load_site('{"format": 1,')


@pytest.mark.parametrize("mutate, match", [
    (lambda d: d.update(extra=1), "unknown keys"),
    (lambda d: d.update(format=2), "unsupported format"),
    (lambda d: d["objects"][1].update(dim="one"), r"objects\[1\]\.dim"),
    (lambda d: d["objects"][1].pop("dim"), "missing keys"),
    (lambda d: d["morphisms"].append({"id": "id_pt", "src": "pt", "dst": "pt"}), "reserved"),
    (lambda d: d["composition"].append(["c", "i", "id_pt"]), "duplicate composite"),
    (lambda d: d["picard"]["pullbacks"].pop("ic"), "missing pullback matrix"),
    (lambda d: d["picard"]["pullbacks"].update(ic=[[0, 1]]), "columns"),
    (lambda d: d["sections"][0].update(bundle=[1, 0]), "Picard rank"),
])
def test_parse_errors(mutate, match):
    doc = raw("p1")
    mutate(doc)
    with pytest.raises(SiteParseError, match=match):
        load_site(doc)


@pytest.mark.parametrize("mutate", [
    lambda d: d["morphisms"][0].update(dst="nowhere"),
    lambda d: d["composition"][0].__setitem__(2, "ghost"),
    lambda d: d["fiber_squares"][0].update(P="ghost"),
    lambda d: d["morphisms"][2].update(inverse="ghost"),
    lambda d: d["sections"][0].update(inclusion="ghost"),
])
def test_dangling_ids(mutate):
    doc = raw("p1")
    mutate(doc)
    with pytest.raises(DanglingIdError):
        load_site(doc)


# -- validation on mutated fixtures ------------------------------------------------


def drop_composite(d, g, f):
    d["composition"] = [t for t in d["composition"] if t[:2] != [g, f]]


@pytest.mark.parametrize("mutate, code", [
    (lambda d: d["objects"][0].update(final=False), "final-object"),
    (lambda d: d["objects"][1].update(final=True), "final-object"),
    (lambda d: d["objects"][0].update(dim=1), "final-object"),
    (lambda d: d["morphisms"].append({"id": "c2", "src": "P1", "dst": "pt"}), "final-object"),
    (lambda d: drop_composite(d, "i", "c"), "composition-missing"),
    (lambda d: d["morphisms"][1].update(projective=False), "flags"),
    (lambda d: d["morphisms"][6].update(smooth=False), "flag-composition"),
    (lambda d: d["morphisms"][2].update(inverse="i"), "inverse"),
    (lambda d: d["fiber_squares"][0].update(p2="ic"), "fiber-square"),
    (lambda d: d["fiber_squares"][5].update(p2="id_P1", P="P1"), "fiber-square"),
    (lambda d: d["pushout_squares"][1].update(qg="i_Z"), "pushout-square"),
    (lambda d: d["picard"]["pullbacks"].update(ic=[[1]]), "picard-functoriality"),
    (lambda d: d["sections"][0].update(inclusion="ic", zero_locus="P1"), "section"),
    (lambda d: d["degenerations"].append(
        {"context": "P1", "v": "c", "a": "c", "b": "c", "p": "c"}), "degeneration"),
])
def test_validation_flags_mutations(mutate, code):
    doc = raw("p1")
    mutate(doc)
    assert code in codes(doc)


def test_associativity_violation():
    doc = raw("p1")
    for t in doc["composition"]:
        if t[:2] == ["ic", "ic"]:
            t[2] = "id_P1"
    assert "associativity" in codes(doc)


def test_base_change_violation():
    doc = raw("p1")
    # zi is smooth, so its base change must be too
    for s in doc["fiber_squares"]:
        if (s["f"], s["g"]) == ("zi", "zc"):
            s.update(p1="c", p2="ic")
    assert "base-change" in codes(doc)


def test_pasting_violation():
    doc = raw("p1")
    for s in doc["fiber_squares"]:
        if (s["f"], s["g"]) == ("ic", "i_Z"):
            s.update(p1="ic", p2="zc")
    assert "pasting" in codes(doc)


def test_violations_report_ids():
    doc = raw("p1")
    drop_composite(doc, "zc", "ic")
    vs = validate_site(load_site(doc))
    assert any(v.ids == ("zc", "ic") for v in vs)
    assert all(set(v.as_dict()) == {"code", "message", "ids"} for v in vs)


def test_point_has_only_identity():
    S = bundled_site("point")
    assert list(S.morphisms) == ["id_pt"]
    assert S.fiber_square("id_pt", "id_pt") == ("pt", "id_pt", "id_pt")
