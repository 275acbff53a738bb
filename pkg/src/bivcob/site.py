"""Finite geometric sites.

A site is a finite category with flagged morphisms and everything the
cobordism constructions consume declared up front: fiber and pushout squares,
free Picard groups with pullback matrices, sections with their zero loci, and
double point degenerations. The engine never builds geometry; it trusts the
site author for it and checks the algebraic consistency conditions in
:func:`validate_site`.

Identity morphisms are implicit and named ``id_<object>``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

FORMAT_VERSION = 1
FLAGS = ("proper", "projective", "smooth", "closed_immersion")

Bundle = tuple[int, ...]


class SiteError(Exception):
    pass


class SiteParseError(SiteError):
    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class DanglingIdError(SiteParseError):
    pass


class MissingSquareError(SiteError):
    """The site does not declare a square the computation needs."""

    def __init__(self, kind: str, left: str, right: str):
        self.kind, self.pair = kind, (left, right)
        super().__init__(f"missing {kind} square for ({left}, {right}); declare it in the site")


class MissingCompositeError(SiteError):
    pass


@dataclass(frozen=True)
class SiteObject:
    id: str
    dim: int
    smooth: bool
    is_final: bool = False


@dataclass(frozen=True)
class SiteMorphism:
    id: str
    src: str
    dst: str
    proper: bool = False
    projective: bool = False
    smooth: bool = False
    closed_immersion: bool = False
    inverse: str | None = None

    def flag(self, name: str) -> bool:
        return getattr(self, name)


@dataclass(frozen=True)
class FiberSquare:
    """P = X x_Z Y for f: X -> Z and g: Y -> Z, with legs p1: P -> X, p2: P -> Y."""

    f: str
    g: str
    P: str
    p1: str
    p2: str


@dataclass(frozen=True)
class PushoutSquare:
    """Q completing h: Y -> W and g: Y -> Z, with qh: W -> Q and qg: Z -> Q."""

    h: str
    g: str
    Q: str
    qh: str
    qg: str


@dataclass(frozen=True)
class SectionEntry:
    object: str
    bundle: Bundle
    zero_locus: str
    inclusion: str


@dataclass(frozen=True)
class DegenerationEntry:
    context: str
    v: str
    a: str
    b: str
    p: str
    name: str = ""

    @property
    def maps(self) -> tuple[str, str, str, str]:
        return (self.v, self.a, self.b, self.p)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    ids: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "ids": list(self.ids)}


def identity_name(obj: str) -> str:
    return f"id_{obj}"


@dataclass
class FiniteSite:
    name: str
    objects: dict[str, SiteObject]
    morphisms: dict[str, SiteMorphism]
    composition: dict[tuple[str, str], str]
    fiber_squares: dict[tuple[str, str], FiberSquare]
    pushout_squares: dict[tuple[str, str], PushoutSquare]
    picard: dict[str, tuple[str, ...]]
    pullbacks: dict[str, tuple[tuple[int, ...], ...]]
    sections: tuple[SectionEntry, ...] = ()
    degenerations: tuple[DegenerationEntry, ...] = ()
    digest: str = ""
    _hom: dict = field(default_factory=dict, repr=False)

    # -- basic structure ---------------------------------------------------

    @property
    def final(self) -> str:
        finals = [o.id for o in self.objects.values() if o.is_final]
        if len(finals) != 1:
            raise SiteError(f"site has {len(finals)} final objects")
        return finals[0]

    def obj(self, x: str) -> SiteObject:
        return self.objects[x]

    def mor(self, f: str) -> SiteMorphism:
        return self.morphisms[f]

    def src(self, f: str) -> str:
        return self.morphisms[f].src

    def dst(self, f: str) -> str:
        return self.morphisms[f].dst

    def dim(self, x: str) -> int:
        return self.objects[x].dim

    def identity(self, x: str) -> str:
        return identity_name(x)

    def is_identity(self, f: str) -> bool:
        m = self.morphisms[f]
        return f == identity_name(m.src) and m.src == m.dst

    def compose(self, g: str, f: str) -> str:
        """g o f (first f, then g)."""
        mf, mg = self.morphisms[f], self.morphisms[g]
        if mf.dst != mg.src:
            raise MissingCompositeError(f"{g} o {f}: {f} lands in {mf.dst}, {g} starts at {mg.src}")
        if self.is_identity(f):
            return g
        if self.is_identity(g):
            return f
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise MissingCompositeError(f"composite {g} o {f} not declared") from None

    def compose_chain(self, *fs: str) -> str:
        """compose_chain(h, g, f) = h o g o f."""
        out = fs[-1]
        for g in reversed(fs[:-1]):
            out = self.compose(g, out)
        return out

    def hom(self, x: str, y: str) -> list[str]:
        if not self._hom:
            for m in self.morphisms.values():
                self._hom.setdefault((m.src, m.dst), []).append(m.id)
        return list(self._hom.get((x, y), []))

    def morphisms_from(self, x: str) -> list[str]:
        return [m.id for m in self.morphisms.values() if m.src == x]

    def morphisms_to(self, x: str) -> list[str]:
        return [m.id for m in self.morphisms.values() if m.dst == x]

    def structure_map(self, x: str) -> str:
        maps = self.hom(x, self.final)
        if len(maps) != 1:
            raise SiteError(f"{x} has {len(maps)} maps to the final object")
        return maps[0]

    def inverse(self, f: str) -> str | None:
        if self.is_identity(f):
            return f
        return self.morphisms[f].inverse

    def isos_from(self, w: str) -> list[str]:
        """Declared isomorphisms with source w, the identity first."""
        out = [self.identity(w)]
        out += [m.id for m in self.morphisms.values()
                if m.src == w and m.inverse is not None and not self.is_identity(m.id)]
        return out

    # -- squares -----------------------------------------------------------

    def fiber_square(self, f: str, g: str) -> tuple[str, str, str]:
        """(P, p1: P -> src f, p2: P -> src g) for f, g with a common target."""
        mf, mg = self.morphisms[f], self.morphisms[g]
        if mf.dst != mg.dst:
            raise SiteError(f"fiber square needs a common target: {f} -> {mf.dst}, {g} -> {mg.dst}")
        if self.is_identity(f):
            return mg.src, g, self.identity(mg.src)
        if self.is_identity(g):
            return mf.src, self.identity(mf.src), f
        sq = self.fiber_squares.get((f, g))
        if sq is not None:
            return sq.P, sq.p1, sq.p2
        sq = self.fiber_squares.get((g, f))
        if sq is not None:
            return sq.P, sq.p2, sq.p1
        raise MissingSquareError("fiber", f, g)

    def has_fiber_square(self, f: str, g: str) -> bool:
        try:
            self.fiber_square(f, g)
            return True
        except MissingSquareError:
            return False

    def pushout_square(self, h: str, g: str) -> tuple[str, str, str]:
        """(Q, qh: dst h -> Q, qg: dst g -> Q) for h, g with a common source."""
        mh, mg = self.morphisms[h], self.morphisms[g]
        if mh.src != mg.src:
            raise SiteError(f"pushout square needs a common source: {h}, {g}")
        if self.is_identity(h):
            return mg.dst, g, self.identity(mg.dst)
        if self.is_identity(g):
            return mh.dst, self.identity(mh.dst), h
        sq = self.pushout_squares.get((h, g))
        if sq is not None:
            return sq.Q, sq.qh, sq.qg
        sq = self.pushout_squares.get((g, h))
        if sq is not None:
            return sq.Q, sq.qg, sq.qh
        raise MissingSquareError("pushout", h, g)

    def square_pairs(self) -> list[tuple[str, str]]:
        """Every (f, g) with common target whose fiber square is available."""
        out = []
        for f in self.morphisms:
            for g in self.morphisms_to(self.dst(f)):
                if self.has_fiber_square(f, g):
                    out.append((f, g))
        return out

    # -- line bundles ------------------------------------------------------

    def pic_rank(self, x: str) -> int:
        return len(self.picard.get(x, ()))

    def basic_bundles(self, x: str) -> list[Bundle]:
        n = self.pic_rank(x)
        return [tuple(int(i == k) for i in range(n)) for k in range(n)]

    def trivial_bundle(self, x: str) -> Bundle:
        return (0,) * self.pic_rank(x)

    def pullback_matrix(self, f: str) -> tuple[tuple[int, ...], ...]:
        m = self.morphisms[f]
        if self.is_identity(f):
            n = self.pic_rank(m.src)
            return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        if f in self.pullbacks:
            return self.pullbacks[f]
        return tuple(() if self.pic_rank(m.dst) == 0 else (0,) * self.pic_rank(m.dst)
                     for _ in range(self.pic_rank(m.src)))

    def pullback_bundle(self, f: str, L: Sequence[int]) -> Bundle:
        m = self.morphisms[f]
        if len(L) != self.pic_rank(m.dst):
            raise ValueError(f"bundle of rank {len(L)} over {m.dst}, which has Picard rank {self.pic_rank(m.dst)}")
        M = self.pullback_matrix(f)
        return tuple(sum(a * b for a, b in zip(row, L)) for row in M)

    def bundle_name(self, x: str, L: Sequence[int]) -> str:
        names = self.picard.get(x, ())
        terms = []
        for n, c in zip(names, L):
            if c == 1:
                terms.append(n)
            elif c:
                terms.append(f"{n}^{c}")
        return "(x)".join(terms) if terms else "O"

    # -- confinement for the dual theory -------------------------------------

    def mprime_confined(self, f: str) -> bool:
        """For every g out of dst f: g o f smooth implies g smooth."""
        y = self.dst(f)
        for g in self.morphisms_from(y):
            if self.mor(self.compose(g, f)).smooth and not self.mor(g).smooth:
                return False
        return True


# ---------------------------------------------------------------------------
# loading

_TOP_KEYS = {"format", "name", "description", "objects", "morphisms", "composition",
             "fiber_squares", "pushout_squares", "picard", "sections", "degenerations"}


def _expect(cond: bool, msg: str, loc: str, cls=SiteParseError):
    if not cond:
        raise cls(msg, loc)


def _keys(d: Any, allowed: set, required: set, loc: str) -> None:
    _expect(isinstance(d, dict), "expected an object", loc)
    unknown = set(d) - allowed
    _expect(not unknown, f"unknown keys {sorted(unknown)}", loc)
    missing = required - set(d)
    _expect(not missing, f"missing keys {sorted(missing)}", loc)


def _int(x: Any, loc: str) -> int:
    _expect(type(x) is int, f"expected an integer, got {x!r}", loc)
    return x


def _bool(x: Any, loc: str) -> bool:
    _expect(type(x) is bool, f"expected a boolean, got {x!r}", loc)
    return x


def _str(x: Any, loc: str) -> str:
    _expect(isinstance(x, str) and x != "", f"expected a non-empty string, got {x!r}", loc)
    return x


def load_site(document: str | bytes | dict) -> FiniteSite:
    """Parse a site document (JSON text or an already-decoded dict)."""
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SiteParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    else:
        data = document
    _keys(data, _TOP_KEYS, {"format", "objects", "morphisms"}, "$")
    _expect(data["format"] == FORMAT_VERSION, f"unsupported format {data['format']!r}", "$.format")
    digest = hashlib.sha256(json.dumps(data, sort_keys=True, separators=(",", ":")).encode()).hexdigest()

    objects: dict[str, SiteObject] = {}
    _expect(isinstance(data["objects"], list), "expected a list", "$.objects")
    for k, o in enumerate(data["objects"]):
        loc = f"$.objects[{k}]"
        _keys(o, {"id", "dim", "smooth", "final"}, {"id", "dim"}, loc)
        oid = _str(o["id"], loc + ".id")
        _expect(oid not in objects, f"duplicate object id {oid!r}", loc)
        dim = _int(o["dim"], loc + ".dim")
        _expect(dim >= 0, "dimension must be >= 0", loc + ".dim")
        objects[oid] = SiteObject(oid, dim, _bool(o.get("smooth", False), loc + ".smooth"),
                                  _bool(o.get("final", False), loc + ".final"))

    morphisms: dict[str, SiteMorphism] = {}
    for oid in objects:
        morphisms[identity_name(oid)] = SiteMorphism(identity_name(oid), oid, oid, True, True, True, True, None)
    _expect(isinstance(data["morphisms"], list), "expected a list", "$.morphisms")
    for k, m in enumerate(data["morphisms"]):
        loc = f"$.morphisms[{k}]"
        _keys(m, {"id", "src", "dst", "inverse", *FLAGS}, {"id", "src", "dst"}, loc)
        mid = _str(m["id"], loc + ".id")
        _expect(mid not in morphisms, f"duplicate or reserved morphism id {mid!r}", loc + ".id")
        for end in ("src", "dst"):
            _expect(_str(m[end], f"{loc}.{end}") in objects, f"unknown object {m[end]!r}",
                    f"{loc}.{end}", DanglingIdError)
        inv = m.get("inverse")
        if inv is not None:
            _str(inv, loc + ".inverse")
        flags = {fl: _bool(m.get(fl, False), f"{loc}.{fl}") for fl in FLAGS}
        morphisms[mid] = SiteMorphism(mid, m["src"], m["dst"], inverse=inv, **flags)
    for k, m in enumerate(data["morphisms"]):
        inv = m.get("inverse")
        _expect(inv is None or inv in morphisms, f"unknown morphism {inv!r}",
                f"$.morphisms[{k}].inverse", DanglingIdError)

    def mref(x: Any, loc: str) -> str:
        _expect(_str(x, loc) in morphisms, f"unknown morphism {x!r}", loc, DanglingIdError)
        return x

    def oref(x: Any, loc: str) -> str:
        _expect(_str(x, loc) in objects, f"unknown object {x!r}", loc, DanglingIdError)
        return x

    composition: dict[tuple[str, str], str] = {}
    for k, t in enumerate(data.get("composition", [])):
        loc = f"$.composition[{k}]"
        _expect(isinstance(t, list) and len(t) == 3, "expected a triple [g, f, gf]", loc)
        g, f, gf = (mref(x, f"{loc}[{i}]") for i, x in enumerate(t))
        _expect((g, f) not in composition, f"duplicate composite for ({g}, {f})", loc)
        composition[(g, f)] = gf

    fibers: dict[tuple[str, str], FiberSquare] = {}
    for k, s in enumerate(data.get("fiber_squares", [])):
        loc = f"$.fiber_squares[{k}]"
        _keys(s, {"f", "g", "P", "p1", "p2"}, {"f", "g", "P", "p1", "p2"}, loc)
        sq = FiberSquare(mref(s["f"], loc + ".f"), mref(s["g"], loc + ".g"), oref(s["P"], loc + ".P"),
                         mref(s["p1"], loc + ".p1"), mref(s["p2"], loc + ".p2"))
        _expect((sq.f, sq.g) not in fibers and (sq.g, sq.f) not in fibers,
                f"duplicate fiber square for ({sq.f}, {sq.g})", loc)
        fibers[(sq.f, sq.g)] = sq

    pushouts: dict[tuple[str, str], PushoutSquare] = {}
    for k, s in enumerate(data.get("pushout_squares", [])):
        loc = f"$.pushout_squares[{k}]"
        _keys(s, {"h", "g", "Q", "qh", "qg"}, {"h", "g", "Q", "qh", "qg"}, loc)
        sq = PushoutSquare(mref(s["h"], loc + ".h"), mref(s["g"], loc + ".g"), oref(s["Q"], loc + ".Q"),
                           mref(s["qh"], loc + ".qh"), mref(s["qg"], loc + ".qg"))
        _expect((sq.h, sq.g) not in pushouts and (sq.g, sq.h) not in pushouts,
                f"duplicate pushout square for ({sq.h}, {sq.g})", loc)
        pushouts[(sq.h, sq.g)] = sq

    picard: dict[str, tuple[str, ...]] = {}
    pullbacks: dict[str, tuple[tuple[int, ...], ...]] = {}
    pic = data.get("picard", {})
    _keys(pic, {"bundles", "pullbacks"}, set(), "$.picard")
    for x, names in pic.get("bundles", {}).items():
        loc = f"$.picard.bundles.{x}"
        oref(x, loc)
        _expect(isinstance(names, list) and all(isinstance(n, str) for n in names),
                "expected a list of bundle names", loc)
        picard[x] = tuple(names)
    for f, mat in pic.get("pullbacks", {}).items():
        loc = f"$.picard.pullbacks.{f}"
        mref(f, loc)
        m = morphisms[f]
        rs, rd = len(picard.get(m.src, ())), len(picard.get(m.dst, ()))
        _expect(isinstance(mat, list) and len(mat) == rs, f"expected {rs} rows", loc)
        for i, row in enumerate(mat):
            _expect(isinstance(row, list) and len(row) == rd, f"expected {rd} columns", f"{loc}[{i}]")
            for j, x in enumerate(row):
                _int(x, f"{loc}[{i}][{j}]")
        pullbacks[f] = tuple(tuple(r) for r in mat)
    for m in morphisms.values():
        if m.id in pullbacks or m.id == identity_name(m.src):
            continue
        _expect(not (picard.get(m.src) and picard.get(m.dst)),
                f"missing pullback matrix for {m.id}", "$.picard.pullbacks")

    sections = []
    for k, s in enumerate(data.get("sections", [])):
        loc = f"$.sections[{k}]"
        _keys(s, {"object", "bundle", "zero_locus", "inclusion"}, {"object", "bundle", "zero_locus", "inclusion"}, loc)
        x = oref(s["object"], loc + ".object")
        _expect(isinstance(s["bundle"], list) and len(s["bundle"]) == len(picard.get(x, ())),
                "bundle vector length must equal the Picard rank", loc + ".bundle")
        sections.append(SectionEntry(x, tuple(_int(v, loc + ".bundle") for v in s["bundle"]),
                                     oref(s["zero_locus"], loc + ".zero_locus"),
                                     mref(s["inclusion"], loc + ".inclusion")))

    degenerations = []
    for k, d in enumerate(data.get("degenerations", [])):
        loc = f"$.degenerations[{k}]"
        _keys(d, {"name", "context", "v", "a", "b", "p"}, {"context", "v", "a", "b", "p"}, loc)
        degenerations.append(DegenerationEntry(
            oref(d["context"], loc + ".context"),
            *(mref(d[key], f"{loc}.{key}") for key in ("v", "a", "b", "p")),
            name=d.get("name", f"deg{k}")))

    return FiniteSite(
        name=data.get("name", ""), objects=objects, morphisms=morphisms, composition=composition,
        fiber_squares=fibers, pushout_squares=pushouts, picard=picard, pullbacks=pullbacks,
        sections=tuple(sections), degenerations=tuple(degenerations), digest=digest)


def load_site_file(path: str | Path) -> FiniteSite:
    return load_site(Path(path).read_text(encoding="utf-8"))


BUNDLED = ("point", "p1", "dp_demo")


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("bivcob") / "fixtures" / f"{name}.json"))


def bundled_site(name: str) -> FiniteSite:
    return load_site_file(bundled_path(name))


# ---------------------------------------------------------------------------
# validation


def _composable_pairs(S: FiniteSite) -> Iterable[tuple[str, str]]:
    for f in S.morphisms.values():
        for g in S.morphisms_from(f.dst):
            yield g, f.id


def validate_site(S: FiniteSite) -> list[Violation]:
    """Every violated site invariant, with the offending ids; empty means valid."""
    out: list[Violation] = []
    add = lambda code, msg, *ids: out.append(Violation(code, msg, tuple(ids)))

    finals = [o for o in S.objects.values() if o.is_final]
    if len(finals) != 1:
        add("final-object", f"expected exactly one final object, found {len(finals)}", *[o.id for o in finals])
        return out
    pt = finals[0]
    if pt.dim != 0 or not pt.smooth:
        add("final-object", "the final object must be smooth of dimension 0", pt.id)
    for x in S.objects:
        n = len(S.hom(x, pt.id))
        if n != 1:
            add("final-object", f"{x} has {n} morphisms to the final object", x)

    for m in S.morphisms.values():
        if m.closed_immersion and not m.projective:
            add("flags", "closed immersion not flagged projective", m.id)
        if m.projective and not m.proper:
            add("flags", "projective morphism not flagged proper", m.id)

    comp_ok = True
    for g, f in _composable_pairs(S):
        try:
            gf = S.compose(g, f)
        except MissingCompositeError:
            add("composition-missing", f"no composite declared for {g} o {f}", g, f)
            comp_ok = False
            continue
        mgf = S.mor(gf)
        if mgf.src != S.src(f) or mgf.dst != S.dst(g):
            add("composition-endpoints", f"{g} o {f} = {gf} has the wrong endpoints", g, f, gf)
            comp_ok = False
    for (g, f), gf in S.composition.items():
        if S.dst(f) != S.src(g):
            add("composition-endpoints", f"declared composite of non-composable {g}, {f}", g, f)
            comp_ok = False
        elif (S.is_identity(f) and gf != g) or (S.is_identity(g) and gf != f):
            add("composition-unit", f"identity law fails for {g} o {f} = {gf}", g, f, gf)
    if not comp_ok:
        return out

    for g, f in _composable_pairs(S):
        gf = S.compose(g, f)
        for h in S.morphisms_from(S.dst(g)):
            left = S.compose(S.compose(h, g), f)
            right = S.compose(h, gf)
            if left != right:
                add("associativity", f"({h} o {g}) o {f} = {left} but {h} o ({g} o {f}) = {right}", h, g, f)
        mg, mf, mgf = S.mor(g), S.mor(f), S.mor(gf)
        for fl in ("proper", "projective", "smooth", "closed_immersion"):
            if mg.flag(fl) and mf.flag(fl) and not mgf.flag(fl):
                add("flag-composition", f"{g} o {f} = {gf} should be {fl}", g, f, gf)

    for m in S.morphisms.values():
        if m.inverse is None or S.is_identity(m.id):
            continue
        inv = S.mor(m.inverse)
        if inv.src != m.dst or inv.dst != m.src:
            add("inverse", f"{m.inverse} cannot be inverse to {m.id}", m.id, m.inverse)
            continue
        if S.compose(m.inverse, m.id) != S.identity(m.src) or S.compose(m.id, m.inverse) != S.identity(m.dst):
            add("inverse", f"{m.inverse} is not a two-sided inverse of {m.id}", m.id, m.inverse)
        if not all(m.flag(fl) for fl in FLAGS):
            add("inverse", "isomorphisms must be proper, projective, smooth closed immersions", m.id)

    for (f, g), sq in S.fiber_squares.items():
        mf, mg = S.mor(f), S.mor(g)
        ids = (f, g, sq.P, sq.p1, sq.p2)
        if mf.dst != mg.dst:
            add("fiber-square", f"{f} and {g} have different targets", *ids)
            continue
        if S.src(sq.p1) != sq.P or S.dst(sq.p1) != mf.src or S.src(sq.p2) != sq.P or S.dst(sq.p2) != mg.src:
            add("fiber-square", "legs have the wrong endpoints", *ids)
            continue
        if S.compose(f, sq.p1) != S.compose(g, sq.p2):
            add("fiber-square", f"square does not commute: {f} o {sq.p1} != {g} o {sq.p2}", *ids)
        for fl in FLAGS:
            if mf.flag(fl) and not S.mor(sq.p2).flag(fl):
                add("base-change", f"{sq.p2} is the base change of {fl} {f} but is not {fl}", f, g, sq.p2)
            if mg.flag(fl) and not S.mor(sq.p1).flag(fl):
                add("base-change", f"{sq.p1} is the base change of {fl} {g} but is not {fl}", f, g, sq.p1)

    for (h, g), sq in S.pushout_squares.items():
        mh, mg = S.mor(h), S.mor(g)
        ids = (h, g, sq.Q, sq.qh, sq.qg)
        if mh.src != mg.src:
            add("pushout-square", f"{h} and {g} have different sources", *ids)
            continue
        if S.src(sq.qh) != mh.dst or S.src(sq.qg) != mg.dst or S.dst(sq.qh) != sq.Q or S.dst(sq.qg) != sq.Q:
            add("pushout-square", "completing arrows have the wrong endpoints", *ids)
            continue
        if S.compose(sq.qh, h) != S.compose(sq.qg, g):
            add("pushout-square", f"square does not commute: {sq.qh} o {h} != {sq.qg} o {g}", *ids)

    if not any(v.code == "fiber-square" for v in out):
        out.extend(_pasting_violations(S))

    for g, f in _composable_pairs(S):
        gf = S.compose(g, f)
        Mf, Mg, Mgf = S.pullback_matrix(f), S.pullback_matrix(g), S.pullback_matrix(gf)
        prod_ = tuple(tuple(sum(Mf[i][k] * Mg[k][j] for k in range(len(Mg)))
                            for j in range(S.pic_rank(S.dst(g))))
                      for i in range(len(Mf)))
        if prod_ != Mgf:
            add("picard-functoriality", f"pullback along {gf} is not the pullback along {g} then {f}", g, f, gf)

    for k, s in enumerate(S.sections):
        i = S.mor(s.inclusion)
        if i.src != s.zero_locus or i.dst != s.object:
            add("section", f"inclusion {s.inclusion} is not a map {s.zero_locus} -> {s.object}", s.inclusion)
        if not i.closed_immersion:
            add("section", f"{s.inclusion} is not a closed immersion", s.inclusion)

    for d in S.degenerations:
        for m in d.maps:
            if S.dst(m) != d.context:
                add("degeneration", f"{m} does not land in the context object {d.context}", d.name, m)
    return out


def same_square(S: FiniteSite, a: tuple[str, str, str], b: tuple[str, str, str]) -> bool:
    """Two completions (P, p1, p2) agree up to a declared isomorphism of the corner."""
    for phi in S.isos_from(a[0]):
        if S.dst(phi) == b[0] and S.compose(b[1], phi) == a[1] and S.compose(b[2], phi) == a[2]:
            return True
    return False


def _pasting_violations(S: FiniteSite) -> list[Violation]:
    """Pasting two available squares must give the available outer square, up to isomorphism."""
    out = []
    seen = set()
    for u, v in S.square_pairs():
        P, pu, pv = S.fiber_square(u, v)
        for w in S.morphisms_to(S.src(v)):
            if S.is_identity(w) or S.is_identity(v) and S.is_identity(u):
                continue
            if not S.has_fiber_square(pv, w):
                continue
            Q, q1, q2 = S.fiber_square(pv, w)
            expected = (Q, S.compose(pu, q1), q2)
            vw = S.compose(v, w)
            key = (u, vw, expected)
            if key in seen:
                continue
            seen.add(key)
            try:
                got = S.fiber_square(u, vw)
            except MissingSquareError:
                out.append(Violation("pasting", f"pasting ({u}, {v}) with ({pv}, {w}) needs a square for ({u}, {vw})",
                                     (u, v, w)))
                continue
            if not same_square(S, got, expected):
                out.append(Violation("pasting", f"square for ({u}, {vw}) is {got}, pasting gives {expected}",
                                     (u, v, w)))
    return out


def site_document(S: FiniteSite) -> dict:
    """Inverse of load_site (identities and identity composites omitted)."""
    doc: dict = {"format": FORMAT_VERSION}
    if S.name:
        doc["name"] = S.name
    doc["objects"] = [{"id": o.id, "dim": o.dim, "smooth": o.smooth, **({"final": True} if o.is_final else {})}
                      for o in S.objects.values()]
    doc["morphisms"] = []
    for m in S.morphisms.values():
        if S.is_identity(m.id):
            continue
        e = {"id": m.id, "src": m.src, "dst": m.dst}
        e.update({fl: True for fl in FLAGS if m.flag(fl)})
        if m.inverse:
            e["inverse"] = m.inverse
        doc["morphisms"].append(e)
    doc["composition"] = [[g, f, gf] for (g, f), gf in S.composition.items()]
    doc["fiber_squares"] = [{"f": s.f, "g": s.g, "P": s.P, "p1": s.p1, "p2": s.p2} for s in S.fiber_squares.values()]
    doc["pushout_squares"] = [{"h": s.h, "g": s.g, "Q": s.Q, "qh": s.qh, "qg": s.qg}
                              for s in S.pushout_squares.values()]
    doc["picard"] = {"bundles": {x: list(n) for x, n in S.picard.items()},
                     "pullbacks": {f: [list(r) for r in m] for f, m in S.pullbacks.items()}}
    doc["sections"] = [{"object": s.object, "bundle": list(s.bundle), "zero_locus": s.zero_locus,
                        "inclusion": s.inclusion} for s in S.sections]
    doc["degenerations"] = [{"name": d.name, "context": d.context, "v": d.v, "a": d.a, "b": d.b, "p": d.p}
                            for d in S.degenerations]
    return doc
