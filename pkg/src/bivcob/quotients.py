"""Relations and the quotient theories OB1, OB2, OB3 and OB4.

* OB1(f) = L_N (x) OB(f) modulo the closure of the Dimension and Section
  relations and the L-span of the formal group law relations.
* OB3(f) = M(f) modulo the plain span of the double point relations over f.
* OB2(f), OB4(f) are free on the distinct images of the M' classes
  [h: Y -> W] of f under I: [h] -> [id_Y] in OB1(Y -h-> W), resp. J into OB3.

Everything is computed on a finite fragment. For an arrow f with bundle bound
B (default: dim of the source) the OB1 fragment is spanned by the classes
[h: W -> X; L_1..L_r] with r <= min(dim W, B) and every L_k a sum of two
elements of {0, +-basic bundles of W}. A class with r > dim W on a smooth W is
zero (it is h_* of a Dimension relation). Relations that mention classes
outside the fragment are dropped and counted, never silently.

The closure of a relation set is computed by saturation: every relation is
pushed through Chern operators, pushforwards along confined maps, pullbacks
along declared squares and products with fragment generators on either side,
until each per-arrow lattice is stable. Products are included so that the
quotient inherits a well-defined product.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Callable, Iterable, Iterator, Mapping

from .bivariant import (
    Chain,
    NonSmoothError,
    OperationUndefined,
    add_into,
    chain,
    chern,
    is_confined,
    product,
    pullback,
    pushforward,
    split_grades,
)
from .cycles import BivariantCycle, admissible, bundle_alphabet, carrier_object, cycle, enum_M, enum_Mprime
from .exactgroups import GroupElement, Lattice, PresentedGroup
from .lazard import Monomial, build_lazard, degree, fgl_apply, monomial_str, ring_mul, universal_fgl
from .site import Bundle, FiniteSite, MissingSquareError

RELATION_KINDS = ("Dim", "Sect", "FGL", "DP")


# -- labels ---------------------------------------------------------------------


@dataclass(frozen=True)
class LLabel:
    """A generator m (x) c of L_N (x) OB: a Lazard monomial times a cycle."""

    mono: Monomial
    cycle: BivariantCycle

    @property
    def grade(self) -> int:
        return degree(self.mono) + self.cycle.grade

    @property
    def sort_key(self) -> tuple:
        return (self.grade, degree(self.mono), self.mono, self.cycle.arrow, self.cycle.key)

    def __lt__(self, other: "LLabel") -> bool:
        return self.sort_key < other.sort_key

    def __repr__(self) -> str:
        return f"{monomial_str(self.mono)}*{self.cycle!r}" if self.mono else repr(self.cycle)


@dataclass(frozen=True)
class ImageLabel:
    """The generator I([h]) of OB2 or J([h]) of OB4."""

    tag: str
    carrier: str
    grade: int

    def __lt__(self, other: "ImageLabel") -> bool:
        return (self.grade, self.carrier) < (other.grade, other.carrier)

    def __repr__(self) -> str:
        return f"{self.tag}[{self.carrier}]"


@dataclass
class RelationSet:
    """Relation generators of one kind over one arrow, with provenance."""

    kind: str
    arrow: str
    elements: list[dict] = field(default_factory=list)
    provenance: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    dropped: int = 0

    def add(self, element: Mapping, why: str) -> None:
        self.elements.append(dict(element))
        self.provenance.append(why)

    def __len__(self) -> int:
        return len(self.elements)


# -- bundles and fragments ----------------------------------------------------------


def alphabet(S: FiniteSite, W: str) -> list[Bundle]:
    """The trivial bundle and the +-basic bundles of W."""
    return sorted({S.trivial_bundle(W), *bundle_alphabet(S, W)})


def tensor_alphabet(S: FiniteSite, W: str) -> list[Bundle]:
    """Tensor products of two bundles from :func:`alphabet`."""
    A = alphabet(S, W)
    return sorted({tuple(x + y for x, y in zip(a, b)) for a in A for b in A})


def dim_zero(S: FiniteSite, c: BivariantCycle) -> bool:
    """True if c has more bundles than the dimension of its smooth carrier."""
    W = carrier_object(S, c.kind, c.carrier)
    return S.obj(W).smooth and c.rank > S.dim(W)


def fragment_cycles(S: FiniteSite, f: str, B: int, grades: tuple[int, int] | None = None) -> list[BivariantCycle]:
    """OB classes over f spanning the OB1 fragment with bundle bound B."""
    out = set()
    for h in S.morphisms_to(S.src(f)):
        if admissible(S, "OB", f, h) is not None:
            continue
        W = S.src(h)
        A = tensor_alphabet(S, W)
        for r in range(min(S.dim(W), B) + 1):
            for combo in combinations_with_replacement(A, r):
                out.add(cycle(S, "OB", f, h, combo))
    return sorted((c for c in out if grades is None or grades[0] <= c.grade <= grades[1]), key=lambda c: c.key)


# -- relation generators -----------------------------------------------------------


def fundamental_class(S: FiniteSite, f: str, kind: str = "OB") -> BivariantCycle:
    """[X -f-> Y] = [X -id-> X]_f, of grade dim X."""
    X = S.src(f)
    if not S.obj(X).smooth:
        raise NonSmoothError(f"{X} is not smooth; [{f}] has no fundamental class")
    if not S.mor(f).smooth:
        raise NonSmoothError(f"{f} is not smooth, so [id_{X}] is not a cycle over it")
    return cycle(S, kind, f, S.identity(X))


def dim_relations(S: FiniteSite, f: str, bound: int, bundles: Iterable[Bundle] | None = None) -> RelationSet:
    """c_1(L_1)...c_1(L_r)[X -f-> Y] for dim X < r <= bound, L_k from the given bundles."""
    out = RelationSet("Dim", f)
    X = S.src(f)
    if not (S.obj(X).smooth and S.mor(f).smooth):
        out.skipped.append(f"no fundamental class over {f}")
        return out
    fund = fundamental_class(S, f)
    pool = alphabet(S, X) if bundles is None else sorted(set(bundles))
    for r in range(S.dim(X) + 1, bound + 1):
        for combo in combinations_with_replacement(pool, r):
            c = cycle(S, "OB", f, fund.carrier, combo)
            out.add({c: 1}, "c1(" + ") c1(".join(S.bundle_name(X, L) for L in combo) + f") [{f}]")
    return out


def sect_relations(S: FiniteSite, f: str) -> RelationSet:
    """c_1(L)[X -f-> Y] - (i_Z)_*[Z -f i_Z-> Y] for each registered section on X."""
    out = RelationSet("Sect", f)
    X = S.src(f)
    for e in S.sections:
        if e.object != X:
            continue
        if not (S.obj(X).smooth and S.mor(f).smooth):
            out.skipped.append(f"section of {S.bundle_name(X, e.bundle)} over {f}: no fundamental class")
            continue
        why = admissible(S, "OB", f, e.inclusion)
        if why is not None:
            out.skipped.append(f"section of {S.bundle_name(X, e.bundle)} over {f}: {why}")
            continue
        lhs = chern(S, e.bundle, chain(fundamental_class(S, f)))
        rel = add_into(dict(lhs), {cycle(S, "OB", f, e.inclusion): 1}, -1)
        out.add(rel, f"c1({S.bundle_name(X, e.bundle)}) [{f}] - ({e.inclusion})_* [{e.zero_locus}]")
    return out


def dp_relations(S: FiniteSite, f: str) -> RelationSet:
    """[V -> X] - [A -> X] - [B -> X] + [P -> X] over f for each valid degeneration on X."""
    out = RelationSet("DP", f)
    X = S.src(f)
    for d in S.degenerations:
        if d.context != X:
            continue
        name = d.name or "+".join(d.maps)
        bad = [f"{m} is not projective" for m in d.maps if not S.mor(m).projective]
        bad += [f"{f} o {m} is not smooth" for m in d.maps if not S.mor(S.compose(f, m)).smooth]
        if bad:
            out.skipped.append(f"degeneration {name} over {f}: " + "; ".join(bad))
            continue
        terms = [cycle(S, "M", f, m) for m in d.maps]
        if len({c.grade for c in terms}) != 1:
            out.skipped.append(f"degeneration {name} over {f}: terms of different dimensions")
            continue
        rel: Chain = {}
        for c, k in zip(terms, (1, -1, -1, 1)):
            add_into(rel, {c: k})
        out.add(rel, f"double point {name}")
    return out


def fgl_relations(S: FiniteSite, f: str, F, cycles: Iterable[BivariantCycle]) -> RelationSet:
    """(F(c_1 L_1, c_1 L_2) - c_1(L_1 (x) L_2)) applied to each given class.

    The operators act on the carrier W of the class: L_1, L_2 range over the
    trivial and +-basic bundles of W together with the pullbacks of those of
    X. Elements are dicts over :class:`LLabel`; powers that exceed dim W are
    zero by the Dimension relation and are left out.
    """
    out = RelationSet("FGL", f)
    for c in cycles:
        W = S.src(c.carrier)
        if not S.obj(W).smooth:
            out.skipped.append(f"{c!r}: {W} is not smooth, no nilpotency bound")
            continue
        pool = set(alphabet(S, W)) | {S.pullback_bundle(c.carrier, L) for L in alphabet(S, S.src(f))}
        room = S.dim(W) - c.rank
        for L1 in sorted(pool):
            for L2 in sorted(pool):
                terms = fgl_apply(F, lambda s: (s[0] + 1, s[1]), lambda s: (s[0], s[1] + 1), (0, 0), room)
                rel: dict = {}
                for coeff, (i, j) in terms:
                    d = cycle(S, "OB", f, c.carrier, c.bundles + (L1,) * i + (L2,) * j)
                    for m, a in coeff.items():
                        add_into(rel, {LLabel(m, d): a})
                if room >= 1:
                    L12 = tuple(x + y for x, y in zip(L1, L2))
                    add_into(rel, {LLabel((), cycle(S, "OB", f, c.carrier, c.bundles + (L12,))): 1}, -1)
                if rel:
                    out.add(rel, f"FGL({S.bundle_name(W, L1)}, {S.bundle_name(W, L2)}) on {c!r}")
    return out


# -- operations -------------------------------------------------------------------

Op = Callable[[Mapping], tuple[str, Chain]]


def operations(S: FiniteSite, kind: str, f: str, gens: Callable[[str], list]) -> Iterator[tuple[str, Op]]:
    """The bivariant operations applicable to elements over f, as (name, op) pairs.

    ``op(a)`` returns the target arrow and the image; it may raise
    MissingSquareError or OperationUndefined.
    """
    X, Y = S.src(f), S.dst(f)
    if kind == "OB":
        for L in alphabet(S, X):
            yield f"c1({S.bundle_name(X, L)})", lambda a, L=L: (f, chern(S, L, a))
    for f1 in S.morphisms_from(X):
        if not is_confined(S, kind, f1):
            continue
        for g in S.morphisms_from(S.dst(f1)):
            if S.dst(g) == Y and S.compose(g, f1) == f:
                yield f"({f1})_* to {g}", lambda a, f1=f1, g=g: (g, pushforward(S, f1, g, a))
    for g in S.morphisms_to(Y):
        def pull(a, g=g):
            sq = S.fiber_square(f, g)
            return sq[2], pullback(S, g, a, sq)
        yield f"({g})^*", pull
    for b in S.morphisms_from(Y):
        for y in gens(b):
            yield f"_ . {y!r} over {b}", lambda a, b=b, y=y: (S.compose(b, f), product(S, a, {y: 1}))
    for b in S.morphisms_to(X):
        for x in gens(b):
            yield f"{x!r} over {b} . _", lambda a, b=b, x=x: (S.compose(f, b), product(S, {x: 1}, a))


def _lift(op: Op, rel: Mapping) -> tuple[str, dict]:
    """Apply a cycle operation to an L_N (x) OB element monomial by monomial."""
    parts: dict = {}
    for lab, k in rel.items():
        parts.setdefault(lab.mono, {})[lab.cycle] = k
    target, out = None, {}
    for m, a in sorted(parts.items()):
        target, img = op(a)
        for c, k in img.items():
            add_into(out, {LLabel(m, c): k})
    return target, out


# -- closure ------------------------------------------------------------------------


class Closure:
    """Saturation of per-arrow OB relation sets under the bivariant operations.

    ``depth`` caps the number of bundles carried along; classes beyond it are
    zero on every carrier of dimension <= depth. ``gens(b)`` lists the
    generators used as product partners over b.
    """

    def __init__(self, S: FiniteSite, seeds: Mapping[str, Iterable[Mapping]], gens: Callable[[str], list],
                 depth: int):
        self.S, self.gens, self.depth = S, gens, depth
        self.lattices: dict[tuple[str, int], Lattice] = {}
        self.stats: Counter = Counter()
        self._alpha: dict[str, set] = {}
        todo = [(f, dict(a)) for f in sorted(seeds) for a in seeds[f]]
        self._run(todo)

    def _alphabet(self, W: str) -> set:
        if W not in self._alpha:
            self._alpha[W] = set(tensor_alphabet(self.S, W))
        return self._alpha[W]

    def normalize(self, a: Mapping) -> Chain | None:
        """Drop classes that are zero by dimension; None if a class leaves the bundle alphabet."""
        out: Chain = {}
        for c, k in a.items():
            if c.rank > self.depth:
                continue
            if not all(L in self._alphabet(self.S.src(c.carrier)) for L in c.bundles):
                if dim_zero(self.S, c):
                    continue
                return None
            out[c] = k
        return out

    def _run(self, todo: list) -> None:
        while todo:
            f, a = todo.pop()
            a = self.normalize(a)
            if a is None:
                self.stats["dropped: bundle outside alphabet"] += 1
                continue
            for g, el in split_grades(a).items():
                vec = dict(el.coeffs)
                lat = self.lattices.setdefault((f, g), Lattice())
                if lat.contains(vec):
                    continue
                lat.add(vec)
                for name, op in operations(self.S, "OB", f, self.gens):
                    try:
                        todo.append(op(vec))
                    except MissingSquareError:
                        self.stats["skipped: missing square"] += 1
                    except OperationUndefined:
                        self.stats["skipped: undefined"] += 1

    def contains(self, f: str, a: Mapping) -> bool:
        a = self.normalize(a)
        if a is None:
            return False
        for g, el in split_grades(a).items():
            lat = self.lattices.get((f, g))
            if lat is None or not lat.contains(dict(el.coeffs)):
                return False
        return True

    def rows(self, f: str, grade: int) -> list[dict]:
        lat = self.lattices.get((f, grade))
        return lat.rows() if lat is not None else []

    def rows_within(self, f: str, grade: int, labels: set) -> list[dict]:
        """A basis of the relation lattice intersected with the span of the given labels."""
        lat = Lattice(key=lambda c: (c not in labels, c))
        for row in self.rows(f, grade):
            lat.add(row)
        return [row for row in lat.rows() if all(c in labels for c in row)]


def closure(S: FiniteSite, raw: Mapping[str, Iterable[Mapping]], gens: Callable[[str], list],
            depth: int | None = None) -> Closure:
    """The closure of per-arrow relations; depth defaults to the largest object dimension."""
    if depth is None:
        depth = max(S.dim(x) for x in S.objects)
    return Closure(S, raw, gens, depth)


# -- theories ---------------------------------------------------------------------


class QuotientTheory:
    """Groups and products of OB1-OB4 for a :class:`~bivcob.bivariant.TheoryHandle`."""

    def __init__(self, T):
        self.T, self.site, self.kind = T, T.site, T.kind
        self._fragments: dict[str, list] = {}
        self._closures: dict[str, Closure] = {}
        self._fgl: dict[str, RelationSet] = {}
        self._images: dict[str, tuple[list, list[str]]] = {}
        self.inner = None
        if self.kind in ("OB2", "OB4"):
            from .bivariant import TheoryHandle
            self.inner = TheoryHandle(T.site, "OB1" if self.kind == "OB2" else "OB3", T.N, T.B)

    # OB1 ingredients

    @cached_property
    def ring(self):
        return build_lazard(self.T.N)

    @cached_property
    def fgl(self):
        return universal_fgl(self.ring)

    @property
    def depth(self) -> int:
        return max(self.site.dim(x) for x in self.site.objects)

    def fragment(self, f: str) -> list[BivariantCycle]:
        if f not in self._fragments:
            self._fragments[f] = fragment_cycles(self.site, f, self.T.bundle_bound(f))
        return self._fragments[f]

    def seeds(self, kind: str) -> dict[str, list[dict]]:
        S, out = self.site, {}
        for f in S.morphisms:
            if kind == "Dim":
                rs = dim_relations(S, f, self.depth, tensor_alphabet(S, S.src(f)))
            else:
                rs = sect_relations(S, f)
            if rs.elements:
                out[f] = rs.elements
        return out

    def closure(self, kind: str) -> Closure:
        """The saturated Dim or Sect relations."""
        if kind not in self._closures:
            self._closures[kind] = closure(self.site, self.seeds(kind), self.fragment, self.depth)
        return self._closures[kind]

    def closed_relations(self, f: str, kind: str | None = None) -> list[dict]:
        """Basis rows of <R> over f inside the fragment, for Dim, Sect or (None) both."""
        kinds = ("Dim", "Sect") if kind is None else (kind,)
        labels = set(self.fragment(f))
        out = []
        for g in sorted({c.grade for c in labels}):
            lat = Lattice(key=lambda c: (c not in labels, c))
            for k in kinds:
                for row in self.closure(k).rows(f, g):
                    lat.add(row)
            out += [row for row in lat.rows() if all(c in labels for c in row)]
        return out

    def fgl_relations(self, f: str) -> RelationSet:
        if f not in self._fgl:
            S = self.site
            raw = fgl_relations(S, f, self.fgl, self.fragment(f))
            kept = RelationSet("FGL", f, skipped=raw.skipped)
            for rel, why in zip(raw.elements, raw.provenance):
                rel = self.restrict(f, rel)
                if rel is None:
                    kept.dropped += 1
                elif rel:
                    kept.add(rel, why)
            self._fgl[f] = kept
        return self._fgl[f]

    def restrict(self, f: str, rel: Mapping) -> dict | None:
        """Drop dimension-zero classes; None if a class lies outside the fragment."""
        frag = set(self.fragment(f))
        out = {}
        for lab, k in rel.items():
            if dim_zero(self.site, lab.cycle):
                continue
            if lab.cycle not in frag:
                return None
            out[lab] = k
        return out

    def _ob1_group(self, f: str) -> PresentedGroup:
        R, N = self.ring, self.ring.N
        cycles = self.fragment(f)
        monos = [m for d in range(N + 1) for m in R.basis[d]]
        labels: dict[int, list] = {}
        for m in monos:
            for c in cycles:
                lab = LLabel(m, c)
                labels.setdefault(lab.grade, []).append(lab)
        rels: list[dict] = []
        for d in range(N + 1):
            for r in R.relations[d]:
                for c in cycles:
                    rels.append({LLabel(m, c): a for m, a in r.items()})
        for row in self.closed_relations(f):
            for m in monos:
                rels.append({LLabel(m, c): k for c, k in row.items()})
        for beta in self.fgl_relations(f).elements:
            for m in monos:
                rels.append(_mono_times(m, beta, N))
        return _assemble(labels, rels, self.T.grades)

    # OB3

    def _ob3_group(self, f: str) -> PresentedGroup:
        labels: dict[int, list] = {}
        for c in enum_M(self.site, f):
            labels.setdefault(c.grade, []).append(c)
        return _assemble(labels, dp_relations(self.site, f).elements, self.T.grades)

    # OB2, OB4

    def images(self, f: str) -> tuple[list[tuple[ImageLabel, tuple]], list[str]]:
        """Distinct I/J images of the M' classes over f, and the classes skipped."""
        if f not in self._images:
            S = self.site
            X, Y = S.src(f), S.dst(f)
            if not S.obj(X).smooth:
                raise NonSmoothError(f"{X} is not smooth; {self.kind} is only built over smooth sources")
            tag, inner_kind = ("I", "OB") if self.kind == "OB2" else ("J", "M")
            seen: dict[tuple, ImageLabel] = {}
            skipped = []
            for c in enum_Mprime(S, f):
                h = c.carrier
                why = admissible(S, inner_kind, h, S.identity(Y))
                if why is not None:
                    skipped.append(f"{c!r}: [id_{Y}] is not a cycle over {h} ({why})")
                    continue
                fund = cycle(S, inner_kind, h, S.identity(Y))
                lab = LLabel((), fund) if self.kind == "OB2" else fund
                nf = self.inner.normal_form(h, {lab: 1})
                key = (h, tuple(sorted((repr(k), v) for k, v in nf.items())))
                seen.setdefault(key, ImageLabel(tag, h, c.grade))
            self._images[f] = (sorted(seen.items(), key=lambda t: t[1]), skipped)
        return self._images[f]

    def _image_group(self, f: str) -> PresentedGroup:
        labels: dict[int, list] = {}
        for _, lab in self.images(f)[0]:
            labels.setdefault(lab.grade, []).append(lab)
        return _assemble(labels, [], self.T.grades)

    # interface used by TheoryHandle

    def group(self, f: str) -> PresentedGroup:
        if self.kind == "OB1":
            return self._ob1_group(f)
        if self.kind == "OB3":
            return self._ob3_group(f)
        return self._image_group(f)

    def generators(self, f: str) -> list:
        G = self.T.group(f)
        return [lab for g in G.grades for lab in G.labels(g)]

    def grade_of(self, label) -> int:
        return label.grade

    def product_labels(self, x, y) -> dict:
        if self.kind == "OB3":
            return product(self.site, {x: 1}, {y: 1})
        if self.kind != "OB1":
            raise OperationUndefined(f"no product is defined on {self.kind}")
        p = ring_mul({x.mono: 1}, {y.mono: 1}, self.ring.N)
        out: dict = {}
        for c, k in product(self.site, {x.cycle: 1}, {y.cycle: 1}).items():
            if dim_zero(self.site, c):
                continue
            if c not in set(self.fragment(c.arrow)):
                raise OperationUndefined(f"{c!r} lies outside the computed fragment over {c.arrow}")
            for m, a in p.items():
                add_into(out, {LLabel(m, c): a * k})
        return out

    def relation_sets(self, f: str) -> dict[str, int]:
        """Counts of relation generators over f by kind (closure rows for Dim and Sect)."""
        if self.kind == "OB1":
            return {"Dim": len(self.closed_relations(f, "Dim")), "Sect": len(self.closed_relations(f, "Sect")),
                    "FGL": len(self.fgl_relations(f))}
        if self.kind == "OB3":
            return {"DP": len(dp_relations(self.site, f))}
        return {}

    def summary(self, f: str) -> dict:
        """Relation provenance for reports."""
        S = self.site
        out: dict = {"relations": self.relation_sets(f)}
        if self.kind == "OB1":
            out["sections_skipped"] = sect_relations(S, f).skipped
            out["fgl_dropped"] = self.fgl_relations(f).dropped
            stats = Counter()
            for k in ("Dim", "Sect"):
                stats.update(self.closure(k).stats)
            out["closure"] = dict(sorted(stats.items()))
        elif self.kind == "OB3":
            out["degenerations_skipped"] = dp_relations(S, f).skipped
        else:
            out["images_skipped"] = self.images(f)[1]
        return out


def _mono_times(m: Monomial, rel: Mapping, N: int) -> dict:
    out: dict = {}
    for lab, k in rel.items():
        for m2, a in ring_mul({m: 1}, {lab.mono: 1}, N).items():
            add_into(out, {LLabel(m2, lab.cycle): a * k})
    return out


def _assemble(labels: Mapping[int, list], rels: Iterable[Mapping], grades: tuple[int, int] | None) -> PresentedGroup:
    by: dict[int, list] = {g: [] for g in labels}
    for rel in rels:
        rel = {k: v for k, v in rel.items() if v}
        if not rel:
            continue
        g = next(iter(rel)).grade
        if g in by:
            by[g].append(rel)
    keep = [g for g in sorted(labels) if grades is None or grades[0] <= g <= grades[1]]
    return PresentedGroup({g: (sorted(labels[g]), by[g]) for g in keep})


# -- builders --------------------------------------------------------------------


def build_OB1(S: FiniteSite, N: int = 3, B: int | None = None, grades: tuple[int, int] | None = None):
    from .bivariant import TheoryHandle
    return TheoryHandle(S, "OB1", N, B, grades)


def build_OB2(S: FiniteSite, N: int = 3, B: int | None = None, grades: tuple[int, int] | None = None):
    from .bivariant import TheoryHandle
    return TheoryHandle(S, "OB2", N, B, grades)


def build_OB3(S: FiniteSite, grades: tuple[int, int] | None = None):
    from .bivariant import TheoryHandle
    return TheoryHandle(S, "OB3", grades=grades)


def build_OB4(S: FiniteSite, grades: tuple[int, int] | None = None):
    from .bivariant import TheoryHandle
    return TheoryHandle(S, "OB4", grades=grades)


# -- descent ----------------------------------------------------------------------


@dataclass
class DescentReport:
    """Images of relation generators under the operations, tested for membership."""

    theory: str
    checked: Counter = field(default_factory=Counter)
    passed: Counter = field(default_factory=Counter)
    skipped: Counter = field(default_factory=Counter)
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {"theory": self.theory, "checked": dict(sorted(self.checked.items())),
                "passed": dict(sorted(self.passed.items())), "skipped": dict(sorted(self.skipped.items())),
                "violations": self.violations}


def descent_check(T, arrows: Iterable[str] | None = None, max_violations: int = 20) -> DescentReport:
    """Check that each relation generator of OB1 or OB3 maps into the target's relations."""
    if T.kind not in ("OB1", "OB3"):
        raise ValueError("descent is checked on OB1 and OB3")
    S, Q = T.site, T._quotient
    rep = DescentReport(T.kind)
    for f in (sorted(S.morphisms) if arrows is None else arrows):
        if T.kind == "OB1":
            gens = [("Dim", {LLabel((), c): k for c, k in row.items()}) for row in Q.closed_relations(f, "Dim")]
            gens += [("Sect", {LLabel((), c): k for c, k in row.items()}) for row in Q.closed_relations(f, "Sect")]
            gens += [("FGL", rel) for rel in Q.fgl_relations(f).elements]
            kind, partners = "OB", Q.fragment
        else:
            gens = [("DP", rel) for rel in dp_relations(S, f).elements]
            kind, partners = "M", (lambda b: enum_M(S, b))
        for rk, rel in gens:
            for name, op in operations(S, kind, f, partners):
                rep.checked[rk] += 1
                why = _descends(T, Q, op, rel)
                if why is None:
                    rep.passed[rk] += 1
                elif why.startswith("violation"):
                    if len(rep.violations) < max_violations:
                        rep.violations.append({"relation": rk, "arrow": f, "operation": name, "detail": why})
                else:
                    rep.skipped[why] += 1
    return rep


def _descends(T, Q: QuotientTheory, op: Op, rel: Mapping) -> str | None:
    """None if the image is a relation; else a skip reason or a violation message."""
    try:
        if T.kind == "OB1":
            target, img = _lift(op, rel)
            if target is None:
                return None
            img = Q.restrict(target, img)
            if img is None:
                return "image outside fragment"
        else:
            target, img = op(rel)
    except MissingSquareError:
        return "missing square"
    except OperationUndefined:
        return "undefined"
    if not img:
        return None
    G = T.group(target)
    by: dict[int, dict] = {}
    for lab, k in img.items():
        by.setdefault(lab.grade, {})[lab] = k
    for g, d in by.items():
        if g not in G.grades:
            return "grade outside fragment"
        if not G.is_zero(GroupElement.make(g, d)):
            return f"violation: image over {target} is not a relation"
    return None
