"""Product, pushforward, pullback and Chern operators on M, M' and OB.

Elements are *chains*: dicts mapping canonical cycles to integer coefficients,
all over the same arrow. Chains need not be homogeneous; :func:`split_grades`
cuts one into homogeneous group elements.

Operations that need an undeclared square raise
:class:`~bivcob.site.MissingSquareError`; those whose diagram completion
yields something that is not a cycle raise :class:`OperationUndefined`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .cycles import BivariantCycle, InadmissibleCycleError, bundle_alphabet, cycle, enumerate_cycles
from .exactgroups import GroupElement
from .site import Bundle, FiniteSite, MissingSquareError

Chain = dict  # BivariantCycle -> int
Square = tuple[str, str, str]  # (P, p1, p2) completing a pair (f, g)


class OperationUndefined(ValueError):
    pass


class NotConfinedError(OperationUndefined):
    pass


class NonSmoothError(ValueError):
    pass


# -- chains -------------------------------------------------------------------


def chain(*cycles: BivariantCycle) -> Chain:
    out: Chain = {}
    for c in cycles:
        add_into(out, {c: 1})
    return out


def add_into(acc: Chain, other: Mapping, scale: int = 1) -> Chain:
    for c, k in other.items():
        v = acc.get(c, 0) + scale * k
        if v:
            acc[c] = v
        else:
            acc.pop(c, None)
    return acc


def chain_sub(a: Mapping, b: Mapping) -> Chain:
    return add_into(dict(a), b, -1)


def _linear(op: Callable[[BivariantCycle], BivariantCycle], a: Mapping) -> Chain:
    out: Chain = {}
    for c, k in a.items():
        add_into(out, {op(c): k})
    return out


def split_grades(a: Mapping) -> dict[int, GroupElement]:
    by: dict[int, dict] = {}
    for c, k in a.items():
        by.setdefault(c.grade, {})[c] = k
    return {g: GroupElement.make(g, d) for g, d in sorted(by.items())}


def chain_str(a: Mapping) -> str:
    if not a:
        return "0"
    parts = []
    for c, k in sorted(a.items(), key=lambda t: t[0].key):
        parts.append(f"{k}*{c!r}" if k != 1 else repr(c))
    return " + ".join(parts)


def _kind_of(*chains: Mapping) -> str | None:
    for a in chains:
        for c in a:
            return c.kind
    return None


def _finish(S: FiniteSite, kind: str, arrow: str, carrier: str, bundles: Iterable[Bundle] = ()) -> BivariantCycle:
    try:
        return cycle(S, kind, arrow, carrier, bundles)
    except InadmissibleCycleError as exc:
        raise OperationUndefined(str(exc)) from None


# -- the three operations ----------------------------------------------------------


def product_cycles(S: FiniteSite, x: BivariantCycle, y: BivariantCycle) -> BivariantCycle:
    f, g = x.arrow, y.arrow
    if S.dst(f) != S.src(g):
        raise ValueError(f"arrows {f} and {g} are not composable")
    gf = S.compose(g, f)
    if x.kind == "Mprime":
        h, j = x.carrier, y.carrier
        _, _, h1 = S.pushout_square(h, g)      # h1: Z -> Z'
        _, _, j1 = S.pushout_square(j, h1)     # j1: Z' -> V'
        return _finish(S, "Mprime", gf, S.compose(j1, h1))
    h, j = x.carrier, y.carrier
    _, j1, f1 = S.fiber_square(f, j)           # j1: X' -> X, f1: X' -> V
    _, j2, h1 = S.fiber_square(h, j1)          # j2: W' -> W, h1: W' -> X'
    left = [S.pullback_bundle(j2, L) for L in x.bundles]
    right = [S.pullback_bundle(S.compose(f1, h1), M) for M in y.bundles]
    return _finish(S, x.kind, gf, S.compose(h, j2), left + right)


def product(S: FiniteSite, a: Mapping, b: Mapping) -> Chain:
    out: Chain = {}
    for x, k in a.items():
        for y, l in b.items():
            add_into(out, {product_cycles(S, x, y): k * l})
    return out


def is_confined(S: FiniteSite, kind: str, f: str) -> bool:
    if kind == "Mprime":
        return S.mprime_confined(f)
    if kind == "OB":
        return S.mor(f).projective
    return S.mor(f).proper


def pushforward(S: FiniteSite, f: str, g: str, a: Mapping) -> Chain:
    """f_*: T(X -g.f-> Z) -> T(Y -g-> Z)."""
    gf = S.compose(g, f)
    kind = _kind_of(a)
    if kind is None:
        return {}
    if not is_confined(S, kind, f):
        raise NotConfinedError(f"{f} is not confined for {kind}")

    def op(c: BivariantCycle) -> BivariantCycle:
        if c.arrow != gf:
            raise ValueError(f"{c!r} lives over {c.arrow}, not {g} o {f} = {gf}")
        if kind == "Mprime":
            return _finish(S, kind, g, c.carrier)
        return _finish(S, kind, g, S.compose(f, c.carrier), c.bundles)

    return _linear(op, a)


def pullback(S: FiniteSite, g: str, a: Mapping, square: Square | None = None) -> Chain:
    """g^* along the square completing (arrow of a, g); the square may be given explicitly."""
    kind = _kind_of(a)
    if kind is None:
        return {}

    def op(c: BivariantCycle) -> BivariantCycle:
        P, p1, p2 = square if square is not None else S.fiber_square(c.arrow, g)
        if kind == "Mprime":
            return _finish(S, kind, p2, S.compose(c.carrier, g))
        _, q1, q2 = S.fiber_square(c.carrier, p1)  # q1: W -> W', q2: W -> P
        return _finish(S, kind, p2, q2, [S.pullback_bundle(q1, L) for L in c.bundles])

    return _linear(op, a)


def chern(S: FiniteSite, L: Sequence[int], a: Mapping) -> Chain:
    """First Chern class operator of a bundle over the source of the arrow (OB only)."""
    kind = _kind_of(a)
    if kind is None:
        return {}
    if kind != "OB":
        raise ValueError(f"{kind} carries no Chern class operators")
    L = tuple(L)

    def op(c: BivariantCycle) -> BivariantCycle:
        X = S.src(c.arrow)
        if len(L) != S.pic_rank(X):
            raise ValueError(f"bundle {L} has the wrong rank for {X}")
        return _finish(S, kind, c.arrow, c.carrier, c.bundles + (S.pullback_bundle(c.carrier, L),))

    return _linear(op, a)


def relative_grade(S: FiniteSite, c: BivariantCycle) -> int:
    """Grade minus the dimension of the arrow's target; additive under products."""
    return c.grade - S.dim(S.dst(c.arrow))


# -- axiom suite ------------------------------------------------------------------

AXIOMS = (
    "associativity", "product-grading",
    "pushforward-identity", "pushforward-composition",
    "pullback-identity", "pullback-composition",
    "product-pushforward", "product-pullback", "pushforward-pullback", "projection",
)
ORIENTATION_AXIOMS = ("chern-commute", "chern-pushforward", "chern-pullback",
                      "chern-product-left", "chern-product-right")


@dataclass
class AxiomTally:
    checked: int = 0
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    undefined: int = 0

    def as_dict(self) -> dict:
        return dict(vars(self))


@dataclass
class AxiomReport:
    kind: str
    bundle_bound: int
    tallies: dict[str, AxiomTally] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)
    missing_squares: dict[str, int] = field(default_factory=dict)
    undefined_reasons: dict[str, int] = field(default_factory=dict)

    @property
    def total_failures(self) -> int:
        return sum(t.failed for t in self.tallies.values())

    @property
    def total_skips(self) -> int:
        return sum(t.skipped for t in self.tallies.values())

    @property
    def ok(self) -> bool:
        return self.total_failures == 0

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "bundle_bound": self.bundle_bound,
            "axioms": {k: t.as_dict() for k, t in self.tallies.items()},
            "failures": self.failures,
            "missing_squares": dict(sorted(self.missing_squares.items())),
            "undefined": dict(sorted(self.undefined_reasons.items())),
            "totals": {"failed": self.total_failures, "skipped": self.total_skips,
                       "checked": sum(t.checked for t in self.tallies.values())},
        }


class _Suite:
    def __init__(self, S: FiniteSite, kind: str, bundle_bound: int, max_failures: int):
        self.S, self.kind, self.B = S, kind, bundle_bound
        self.max_failures = max_failures
        names = AXIOMS + (ORIENTATION_AXIOMS if kind == "OB" else ())
        self.report = AxiomReport(kind, bundle_bound, {n: AxiomTally() for n in names})
        self._gens: dict[str, list[BivariantCycle]] = {}

    def gens(self, f: str) -> list[BivariantCycle]:
        if f not in self._gens:
            self._gens[f] = enumerate_cycles(self.S, self.kind, f, self.B)
        return self._gens[f]

    def bundles(self, X: str) -> list[Bundle]:
        return [self.S.trivial_bundle(X)] + bundle_alphabet(self.S, X)

    def _not_checked(self, t: AxiomTally, exc: Exception) -> None:
        if isinstance(exc, MissingSquareError):
            t.skipped += 1
            key = f"{exc.kind}({exc.pair[0]}, {exc.pair[1]})"
            self.report.missing_squares[key] = self.report.missing_squares.get(key, 0) + 1
        else:
            t.undefined += 1
            reason = str(exc).split(": ", 1)[-1]
            self.report.undefined_reasons[reason] = self.report.undefined_reasons.get(reason, 0) + 1

    def check(self, axiom: str, lhs: Callable[[], Chain], rhs: Callable[[], Chain], witness: Callable[[], str],
              equal: Callable[[Chain, Chain], bool] | None = None) -> None:
        t = self.report.tallies[axiom]
        t.checked += 1
        try:
            left, right = lhs(), rhs()
        except (MissingSquareError, OperationUndefined) as exc:
            self._not_checked(t, exc)
            return
        if (equal or (lambda p, q: p == q))(left, right):
            t.passed += 1
            return
        t.failed += 1
        if len(self.report.failures) < self.max_failures:
            self.report.failures.append({"axiom": axiom, "witness": witness(),
                                         "lhs": chain_str(left), "rhs": chain_str(right)})

    # -- enumerations of composable data --

    def composable(self, f: str) -> list[str]:
        return self.S.morphisms_from(self.S.dst(f))

    def run(self) -> AxiomReport:
        S = self.S
        arrows = list(S.morphisms)
        for f in arrows:
            for g in self.composable(f):
                self._product_axioms(f, g)
                for k in self.composable(g):
                    self._associativity(f, g, k)
        for g in arrows:
            for a in self.gens(g):
                self.check("pushforward-identity", lambda: pushforward(S, S.identity(S.src(g)), g, {a: 1}),
                           lambda: {a: 1}, lambda: f"g={g} a={a!r}")
                self.check("pullback-identity", lambda: pullback(S, S.identity(S.dst(g)), {a: 1}),
                           lambda: {a: 1}, lambda: f"h={g} a={a!r}")
        for f1 in arrows:
            for f2 in self.composable(f1):
                if not (is_confined(S, self.kind, f1) and is_confined(S, self.kind, f2)):
                    continue
                for g in self.composable(f2):
                    for a in self.gens(S.compose_chain(g, f2, f1)):
                        self.check("pushforward-composition",
                                   lambda: pushforward(S, S.compose(f2, f1), g, {a: 1}),
                                   lambda: pushforward(S, f2, g, pushforward(S, f1, S.compose(g, f2), {a: 1})),
                                   lambda: f"f1={f1} f2={f2} g={g} a={a!r}")
        for h2 in arrows:
            for g2 in S.morphisms_to(S.dst(h2)):
                self._pullback_composition(h2, g2)
                self._pushforward_pullback(h2, g2)
        for f in arrows:
            for g in S.morphisms_to(S.dst(f)):
                self._projection(f, g)
        if self.kind == "OB":
            self._orientation()
        return self.report

    def _associativity(self, f: str, g: str, k: str) -> None:
        S = self.S
        for a in self.gens(f):
            for b in self.gens(g):
                for c in self.gens(k):
                    self.check("associativity",
                               lambda: product(S, product(S, {a: 1}, {b: 1}), {c: 1}),
                               lambda: product(S, {a: 1}, product(S, {b: 1}, {c: 1})),
                               lambda: f"f={f} g={g} h={k} a={a!r} b={b!r} c={c!r}")

    def _product_axioms(self, f: str, g: str) -> None:
        """Grading, product-pushforward (f confined, through f) and product-pullback for f: X -> Y, g: Y -> Z."""
        S = self.S
        if self.kind != "Mprime":
            for a in self.gens(f):
                for b in self.gens(g):
                    self._grading(f, g, a, b)
        # product-pushforward: phi: X0 -> X confined, a over f o phi, b over g
        for phi in S.morphisms_to(S.src(f)):
            if not is_confined(S, self.kind, phi):
                continue
            for a in self.gens(S.compose(f, phi)):
                for b in self.gens(g):
                    self.check("product-pushforward",
                               lambda: product(S, pushforward(S, phi, f, {a: 1}), {b: 1}),
                               lambda: pushforward(S, phi, S.compose(g, f), product(S, {a: 1}, {b: 1})),
                               lambda: f"phi={phi} h={f} g={g} a={a!r} b={b!r}")
        # product-pullback along k: Z' -> Z
        for k in S.morphisms_to(S.dst(g)):
            for a in self.gens(f):
                for b in self.gens(g):
                    def sides(a=a, b=b, k=k):
                        Y1, k1, g1 = S.fiber_square(g, k)
                        X1, k2, f1 = S.fiber_square(f, k1)
                        outer = (X1, k2, S.compose(g1, f1))
                        lhs = pullback(S, k, product(S, {a: 1}, {b: 1}), outer)
                        rhs = product(S, pullback(S, k1, {a: 1}, (X1, k2, f1)), pullback(S, k, {b: 1}, (Y1, k1, g1)))
                        return lhs, rhs
                    self._check_pair("product-pullback", sides, lambda: f"f={f} g={g} k={k} a={a!r} b={b!r}")

    def _grading(self, f: str, g: str, a: BivariantCycle, b: BivariantCycle) -> None:
        S = self.S
        t = self.report.tallies["product-grading"]
        t.checked += 1
        try:
            p = product(S, {a: 1}, {b: 1})
        except (MissingSquareError, OperationUndefined) as exc:
            self._not_checked(t, exc)
            return
        want = relative_grade(S, a) + relative_grade(S, b)
        got = sorted({relative_grade(S, c) for c in p})
        if got == [want]:
            t.passed += 1
            return
        t.failed += 1
        if len(self.report.failures) < self.max_failures:
            self.report.failures.append({"axiom": "product-grading", "witness": f"f={f} g={g} a={a!r} b={b!r}",
                                         "lhs": f"relative grades {got}", "rhs": f"{want}"})

    def _check_pair(self, axiom: str, sides: Callable[[], tuple[Chain, Chain]], witness: Callable[[], str]) -> None:
        memo: dict = {}

        def lhs():
            memo["v"] = sides()
            return memo["v"][0]

        self.check(axiom, lhs, lambda: memo["v"][1], witness)

    def _pullback_composition(self, h2: str, g2: str) -> None:
        """h2: X'' -> Y'', g2: Y' -> Y'', then every g1: Y -> Y'."""
        S = self.S
        for g1 in S.morphisms_to(S.src(g2)):
            for a in self.gens(h2):
                def sides(a=a, g1=g1):
                    X1, f2, h1 = S.fiber_square(h2, g2)
                    X0, f1, h0 = S.fiber_square(h1, g1)
                    outer = (X0, S.compose(f2, f1), h0)
                    lhs = pullback(S, S.compose(g2, g1), {a: 1}, outer)
                    rhs = pullback(S, g1, pullback(S, g2, {a: 1}, (X1, f2, h1)), (X0, f1, h0))
                    return lhs, rhs
                self._check_pair("pullback-composition", sides, lambda: f"h={h2} g2={g2} g1={g1} a={a!r}")

    def _pushforward_pullback(self, h1: str, f3: str) -> None:
        """h1: Y' -> Z', f3: Z -> Z', then every confined gp: X' -> Y'."""
        S = self.S
        for gp in S.morphisms_to(S.src(h1)):
            if not is_confined(S, self.kind, gp):
                continue
            for a in self.gens(S.compose(h1, gp)):
                def sides(a=a, gp=gp):
                    Y, f2, h = S.fiber_square(h1, f3)
                    X, f1, g = S.fiber_square(gp, f2)
                    if not is_confined(S, self.kind, g):
                        raise OperationUndefined(f"base change {g} of {gp} is not confined")
                    lhs = pushforward(S, g, h, pullback(S, f3, {a: 1}, (X, f1, S.compose(h, g))))
                    rhs = pullback(S, f3, pushforward(S, gp, h1, {a: 1}), (Y, f2, h))
                    return lhs, rhs
                self._check_pair("pushforward-pullback", sides, lambda: f"g'={gp} h'={h1} f3={f3} a={a!r}")

    def _projection(self, f: str, g: str) -> None:
        """a over f: X -> Y, confined g: Y' -> Y, every h: Y -> Z, b over h o g."""
        S = self.S
        if not is_confined(S, self.kind, g):
            return
        for h in self.composable(f):
            for a in self.gens(f):
                for b in self.gens(S.compose(h, g)):
                    def sides(a=a, b=b, h=h):
                        X1, g1, f1 = S.fiber_square(f, g)
                        if not is_confined(S, self.kind, g1):
                            raise OperationUndefined(f"base change {g1} of {g} is not confined")
                        lhs = pushforward(S, g1, S.compose(h, f),
                                          product(S, pullback(S, g, {a: 1}, (X1, g1, f1)), {b: 1}))
                        rhs = product(S, {a: 1}, pushforward(S, g, h, {b: 1}))
                        return lhs, rhs
                    self._check_pair("projection", sides, lambda: f"f={f} g={g} h={h} a={a!r} b={b!r}")

    def _orientation(self) -> None:
        S = self.S
        for f in S.morphisms:
            X = S.src(f)
            for a in self.gens(f):
                A = {a: 1}
                for L1 in self.bundles(X):
                    for L2 in self.bundles(X):
                        self.check("chern-commute", lambda: chern(S, L1, chern(S, L2, A)),
                                   lambda: chern(S, L2, chern(S, L1, A)), lambda: f"f={f} L1={L1} L2={L2} a={a!r}")
        for f in S.morphisms:
            if not is_confined(S, "OB", f):
                continue
            for g in self.composable(f):
                for a in self.gens(S.compose(g, f)):
                    for L in self.bundles(S.dst(f)):
                        self.check("chern-pushforward",
                                   lambda: pushforward(S, f, g, chern(S, S.pullback_bundle(f, L), {a: 1})),
                                   lambda: chern(S, L, pushforward(S, f, g, {a: 1})),
                                   lambda: f"f={f} g={g} L={L} a={a!r}")
        for h1 in S.morphisms:
            for g in S.morphisms_to(S.dst(h1)):
                for a in self.gens(h1):
                    for L in self.bundles(S.src(h1)):
                        def sides(a=a, L=L, g=g):
                            X, f, h = S.fiber_square(h1, g)
                            return (pullback(S, g, chern(S, L, {a: 1})),
                                    chern(S, S.pullback_bundle(f, L), pullback(S, g, {a: 1})))
                        self._check_pair("chern-pullback", sides, lambda: f"h'={h1} g={g} L={L} a={a!r}")
        for f in S.morphisms:
            for g in self.composable(f):
                for a in self.gens(f):
                    for b in self.gens(g):
                        for L1 in self.bundles(S.src(f)):
                            self.check("chern-product-left",
                                       lambda: chern(S, L1, product(S, {a: 1}, {b: 1})),
                                       lambda: product(S, chern(S, L1, {a: 1}), {b: 1}),
                                       lambda: f"f={f} g={g} L1={L1} a={a!r} b={b!r}")
                        for L2 in self.bundles(S.src(g)):
                            self.check("chern-product-right",
                                       lambda: product(S, {a: 1}, chern(S, L2, {b: 1})),
                                       lambda: chern(S, S.pullback_bundle(f, L2), product(S, {a: 1}, {b: 1})),
                                       lambda: f"f={f} g={g} L2={L2} a={a!r} b={b!r}")


def axiom_suite(S: FiniteSite, kind: str, bundle_bound: int = 1, max_failures: int = 20) -> AxiomReport:
    """Check every bivariant axiom on all generator instances the finite site affords."""
    if kind not in ("M", "Mprime", "OB"):
        raise ValueError(f"the axiom suite runs on M, Mprime and OB, not {kind!r}")
    return _Suite(S, kind, bundle_bound, max_failures).run()


# -- theories and extraction -----------------------------------------------------------

THEORIES = ("M", "Mprime", "OB", "OB1", "OB2", "OB3", "OB4")


class TheoryHandle:
    """A theory on a site with its truncation parameters and per-arrow group cache.

    ``N`` is the Lazard truncation (OB1, OB2), ``B`` the bundle bound (OB kinds;
    ``None`` means the dimension of the arrow's source) and ``grades`` an
    inclusive grade window.
    """

    def __init__(self, site: FiniteSite, kind: str, N: int = 3, B: int | None = None,
                 grades: tuple[int, int] | None = None):
        if kind not in THEORIES:
            raise ValueError(f"unknown theory {kind!r}; expected one of {', '.join(THEORIES)}")
        if N < 0 or (B is not None and B < 0):
            raise ValueError("truncation parameters must be >= 0")
        self.site, self.kind, self.N, self.B, self.grades = site, kind, N, B, grades
        self._groups: dict[str, object] = {}
        self._quotient = None
        if kind not in ("M", "Mprime", "OB"):
            from .quotients import QuotientTheory
            self._quotient = QuotientTheory(self)

    def bundle_bound(self, f: str) -> int:
        return self.B if self.B is not None else self.site.dim(self.site.src(f))

    def parameters(self) -> dict:
        return {"theory": self.kind, "N": self.N, "B": self.B,
                "grades": list(self.grades) if self.grades else None}

    def generators(self, f: str) -> list:
        if self._quotient is not None:
            return self._quotient.generators(f)
        return enumerate_cycles(self.site, self.kind, f, self.bundle_bound(f), self.grades)

    def group(self, f: str):
        """The presented group of the arrow, one grade per cycle grade present."""
        if f not in self._groups:
            if self._quotient is not None:
                self._groups[f] = self._quotient.group(f)
            else:
                from .exactgroups import PresentedGroup
                pieces: dict[int, list] = {}
                for c in self.generators(f):
                    pieces.setdefault(c.grade, []).append(c)
                self._groups[f] = PresentedGroup.free(pieces)
        return self._groups[f]

    def invariants(self, f: str) -> dict[int, tuple[int, list[int]]]:
        G = self.group(f)
        return {g: G.invariants(g) for g in G.grades}

    def grade_of(self, label) -> int:
        if self._quotient is not None:
            return self._quotient.grade_of(label)
        return label.grade

    def product_labels(self, x, y) -> dict:
        """Product of two generators as a label -> coefficient dict (before reduction)."""
        if self._quotient is not None:
            return self._quotient.product_labels(x, y)
        return product(self.site, {x: 1}, {y: 1})

    def normal_form(self, f: str, combo: Mapping) -> dict:
        """Reduce a label -> coefficient dict over f, grade by grade."""
        if self._quotient is None:
            return {k: v for k, v in combo.items() if v}  # free groups: already normal
        G = self.group(f)
        by: dict[int, dict] = {}
        for lab, k in combo.items():
            by.setdefault(self.grade_of(lab), {})[lab] = k
        out = {}
        for g, d in sorted(by.items()):
            if g not in G.grades:
                raise OperationUndefined(f"grade {g} of {f} lies outside the computed fragment")
            out.update(dict(G.normal_form(GroupElement.make(g, d)).coeffs))
        return out


@dataclass
class Extraction:
    theory: str
    object: str
    variance: str
    arrow: str
    invariants: dict[int, tuple[int, list[int]]]
    generators: dict[int, list[str]]
    table: list[dict] | None = None
    note: str = ""

    def as_dict(self) -> dict:
        out = {
            "theory": self.theory, "object": self.object, "variance": self.variance, "arrow": self.arrow,
            "groups": {str(g): {"rank": r, "torsion": t, "generators": self.generators.get(g, [])}
                       for g, (r, t) in sorted(self.invariants.items())},
        }
        if self.table is not None:
            out["table"] = self.table
        if self.note:
            out["note"] = self.note
        return out


def _generator_strings(T: TheoryHandle, f: str) -> dict[int, list[str]]:
    G = T.group(f)
    return {g: [repr(lab) for lab in G.labels(g)] for g in G.grades}


def covariant_part(T: TheoryHandle, X: str) -> Extraction:
    """T(X -> pt): the homology-style shadow of the theory at X."""
    f = T.site.structure_map(X)
    return Extraction(T.kind, X, "co", f, T.invariants(f), _generator_strings(T, f))


def covariant_pushforward(T: TheoryHandle, f: str, a: Mapping) -> Chain:
    """f_*: T(X -> pt) -> T(Y -> pt) for confined f: X -> Y (raw kinds)."""
    return pushforward(T.site, f, T.site.structure_map(T.site.dst(f)), a)


def contravariant_part(T: TheoryHandle, X: str) -> Extraction:
    """T(X -id-> X) with the multiplication table of its generators."""
    S = T.site
    if not S.obj(X).smooth:
        raise NonSmoothError(f"{X} is not smooth; the contravariant part is only taken at smooth objects")
    f = S.identity(X)
    G = T.group(f)
    if T.kind in ("OB2", "OB4"):
        return Extraction(T.kind, X, "contra", f, T.invariants(f), _generator_strings(T, f), None,
                          "no product is defined on this theory; group only")
    table = []
    labels = [lab for g in G.grades for lab in G.labels(g)]
    note = ""
    if T.kind == "OB1":
        labels = [lab for lab in labels if not lab.mono]
        note = "L_N acts by scalars; the table lists products of cycle generators"
    for x in labels:
        for y in labels:
            entry = {"a": repr(x), "b": repr(y)}
            try:
                nf = T.normal_form(f, T.product_labels(x, y))
                entry["product"] = {repr(k): v for k, v in sorted(nf.items(), key=lambda t: repr(t[0]))}
            except MissingSquareError as exc:
                entry["skipped"] = f"missing {exc.kind} square ({exc.pair[0]}, {exc.pair[1]})"
            except OperationUndefined as exc:
                entry["undefined"] = str(exc)
            table.append(entry)
    return Extraction(T.kind, X, "contra", f, T.invariants(f), _generator_strings(T, f), table, note)
