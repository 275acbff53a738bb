"""Generators of the cycle theories M, M' and OB over a finite site.

For an arrow f: X -> Y,

* M(f) is free on classes [h: W -> X] with h proper and f o h smooth,
* OB(f) is free on classes [h: W -> X; L_1, ..., L_r] with h projective,
  f o h smooth and L_k line bundles on W (a multiset),
* M'(f) is free on classes [h: Y -> W] with h proper and h o f smooth.

Two M/OB cycles are equivalent when a declared isomorphism g: W -> W' has
h' o g = h (an isomorphism over X) and carries the bundle multisets onto each
other; M' cycles when g o h = h'. Only declared isomorphisms are used.

The weaker relation f o h' o g = f o h (isomorphism over Y) is available via
``equivalence_mode("target")``. It makes the product depend on
representatives once bundles are present: on the P1 site the projection
formula fails for OB, see ``tests/test_bivariant.py``.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

from .site import Bundle, FiniteSite

KINDS = ("M", "Mprime", "OB")

_EQUIVALENCE: ContextVar[str] = ContextVar("equivalence", default="source")


@contextmanager
def equivalence_mode(mode: str):
    """Temporarily compare M/OB cycles over the source X ("source") or the target Y ("target")."""
    if mode not in ("source", "target"):
        raise ValueError(f"unknown equivalence mode {mode!r}")
    token = _EQUIVALENCE.set(mode)
    try:
        yield
    finally:
        _EQUIVALENCE.reset(token)


class InadmissibleCycleError(ValueError):
    pass


@dataclass(frozen=True)
class BivariantCycle:
    kind: str
    arrow: str
    carrier: str
    bundles: tuple[Bundle, ...] = ()
    grade: int = 0

    @property
    def key(self) -> tuple:
        # identity carriers first, so fundamental classes are their own representatives
        return (self.grade, not self.carrier.startswith("id_"), self.carrier, self.bundles)

    @property
    def rank(self) -> int:
        return len(self.bundles)

    def __repr__(self) -> str:
        if not self.bundles:
            return f"[{self.carrier}]"
        bs = ", ".join("(" + ",".join(str(x) for x in L) + ")" for L in self.bundles)
        return f"[{self.carrier}; {bs}]"

    def __lt__(self, other: "BivariantCycle") -> bool:
        return (self.kind, self.arrow, self.key) < (other.kind, other.arrow, other.key)


CycleClass = BivariantCycle


def carrier_object(S: FiniteSite, kind: str, h: str) -> str:
    """The object W of a cycle's carrier."""
    return S.dst(h) if kind == "Mprime" else S.src(h)


def admissible(S: FiniteSite, kind: str, f: str, h: str) -> str | None:
    """None if h carries a cycle of the given kind over f, else the reason."""
    if kind not in KINDS:
        raise ValueError(f"unknown cycle kind {kind!r}")
    mh = S.mor(h)
    if kind == "Mprime":
        if mh.src != S.dst(f):
            return f"{h} does not start at the target of {f}"
        if not mh.proper:
            return f"{h} is not proper"
        if not S.mor(S.compose(h, f)).smooth:
            return f"{h} o {f} is not smooth"
        return None
    if mh.dst != S.src(f):
        return f"{h} does not land in the source of {f}"
    if kind == "M" and not mh.proper:
        return f"{h} is not proper"
    if kind == "OB" and not mh.projective:
        return f"{h} is not projective"
    if not S.mor(S.compose(f, h)).smooth:
        return f"{f} o {h} is not smooth"
    return None


def make_cycle(S: FiniteSite, kind: str, f: str, h: str, bundles: Iterable[Sequence[int]] = ()) -> BivariantCycle:
    """A cycle with its grade (dim W, less the number of bundles for OB); not canonicalized."""
    why = admissible(S, kind, f, h)
    if why is not None:
        raise InadmissibleCycleError(f"not a {kind} cycle over {f}: {why}")
    bundles = tuple(sorted(tuple(L) for L in bundles))
    if bundles and kind != "OB":
        raise InadmissibleCycleError(f"{kind} cycles carry no line bundles")
    W = carrier_object(S, kind, h)
    for L in bundles:
        if len(L) != S.pic_rank(W):
            raise InadmissibleCycleError(f"bundle {L} does not live on {W}")
    return BivariantCycle(kind, f, h, bundles, S.dim(W) - len(bundles))


def _neighbours(S: FiniteSite, c: BivariantCycle) -> Iterable[BivariantCycle]:
    W = carrier_object(S, c.kind, c.carrier)
    for g in S.isos_from(W):
        W2 = S.dst(g)
        if c.kind == "Mprime":
            yield BivariantCycle(c.kind, c.arrow, S.compose(g, c.carrier), (), c.grade)
            continue
        ginv = S.inverse(g)
        bundles = tuple(sorted(S.pullback_bundle(ginv, L) for L in c.bundles))
        over_target = _EQUIVALENCE.get() == "target"
        for h2 in S.hom(W2, S.src(c.arrow)):
            if admissible(S, c.kind, c.arrow, h2) is not None:
                continue
            if over_target:
                same = S.compose(c.arrow, S.compose(h2, g)) == S.compose(c.arrow, c.carrier)
            else:
                same = S.compose(h2, g) == c.carrier
            if same:
                yield BivariantCycle(c.kind, c.arrow, h2, bundles, c.grade)


def orbit(S: FiniteSite, c: BivariantCycle) -> list[BivariantCycle]:
    """All cycles equivalent to c through declared isomorphisms, sorted."""
    seen = {c}
    todo = [c]
    while todo:
        for d in _neighbours(S, todo.pop()):
            if d not in seen:
                seen.add(d)
                todo.append(d)
    return sorted(seen, key=lambda d: d.key)


def canonicalize(S: FiniteSite, c: BivariantCycle) -> BivariantCycle:
    """Least member of the equivalence class under :attr:`BivariantCycle.key`."""
    why = admissible(S, c.kind, c.arrow, c.carrier)
    if why is not None:
        raise InadmissibleCycleError(f"not a {c.kind} cycle over {c.arrow}: {why}")
    return orbit(S, c)[0]


def cycle(S: FiniteSite, kind: str, f: str, h: str, bundles: Iterable[Sequence[int]] = ()) -> BivariantCycle:
    """Canonical class of the cycle (h; bundles) over f."""
    return canonicalize(S, make_cycle(S, kind, f, h, bundles))


def _in_window(grade: int, grades: tuple[int, int] | None) -> bool:
    return grades is None or grades[0] <= grade <= grades[1]


def _carriers(S: FiniteSite, kind: str, f: str) -> list[str]:
    pool = S.morphisms_from(S.dst(f)) if kind == "Mprime" else S.morphisms_to(S.src(f))
    return [h for h in pool if admissible(S, kind, f, h) is None]


def _dedupe(S: FiniteSite, cycles: Iterable[BivariantCycle]) -> list[BivariantCycle]:
    return sorted({canonicalize(S, c) for c in cycles}, key=lambda c: c.key)


def enum_M(S: FiniteSite, f: str, grades: tuple[int, int] | None = None) -> list[BivariantCycle]:
    gens = _dedupe(S, (make_cycle(S, "M", f, h) for h in _carriers(S, "M", f)))
    return [c for c in gens if _in_window(c.grade, grades)]


def enum_Mprime(S: FiniteSite, f: str, grades: tuple[int, int] | None = None) -> list[BivariantCycle]:
    gens = _dedupe(S, (make_cycle(S, "Mprime", f, h) for h in _carriers(S, "Mprime", f)))
    return [c for c in gens if _in_window(c.grade, grades)]


def bundle_alphabet(S: FiniteSite, W: str) -> list[Bundle]:
    """The basic bundles on W and their inverses."""
    out = []
    for L in S.basic_bundles(W):
        out += [L, tuple(-x for x in L)]
    return sorted(out)


def enum_OB(S: FiniteSite, f: str, bundle_bound: int,
            grades: tuple[int, int] | None = None) -> list[BivariantCycle]:
    """OB classes with bundle multisets over +-basic bundles of size <= min(dim W, B)."""
    if bundle_bound < 0:
        raise ValueError("bundle bound must be >= 0")
    raw = []
    for h in _carriers(S, "OB", f):
        W = S.src(h)
        alphabet = bundle_alphabet(S, W)
        for r in range(min(S.dim(W), bundle_bound) + 1):
            for combo in combinations_with_replacement(alphabet, r):
                raw.append(make_cycle(S, "OB", f, h, combo))
    return [c for c in _dedupe(S, raw) if _in_window(c.grade, grades)]


def enumerate_cycles(S: FiniteSite, kind: str, f: str, bundle_bound: int = 0,
                     grades: tuple[int, int] | None = None) -> list[BivariantCycle]:
    if kind == "M":
        return enum_M(S, f, grades)
    if kind == "Mprime":
        return enum_Mprime(S, f, grades)
    if kind == "OB":
        return enum_OB(S, f, bundle_bound, grades)
    raise ValueError(f"unknown cycle kind {kind!r}")


def by_grade(cycles: Iterable[BivariantCycle]) -> dict[int, list[BivariantCycle]]:
    out: dict[int, list[BivariantCycle]] = {}
    for c in cycles:
        out.setdefault(c.grade, []).append(c)
    return dict(sorted(out.items()))
