"""The Lazard ring truncated at a degree, and its universal formal group law.

The ring is presented as Z[a_ij : i <= j] modulo the ideal generated by the
coefficients of the associativity identity of

    F(u, v) = u + v + sum_{i, j >= 1} a_ij u^i v^j,

with a_ij = a_ji built into the symbol set and deg a_ij = i + j - 1. Degree d
of the quotient is computed by integer elimination, never by choosing
polynomial generators.

Ring elements are sparse dicts ``monomial -> int`` where a monomial is a sorted
tuple of symbol pairs ``(i, j)`` with ``i <= j`` (the empty tuple is 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Mapping

from .exactgroups import Lattice, PresentedGroup, _axpy

Monomial = tuple[tuple[int, int], ...]
RingElement = dict  # Monomial -> int

ONE: Monomial = ()


class DegreeOverflowError(ValueError):
    """A ring element has a component above the truncation degree."""


class NilpotencyBoundMissing(ValueError):
    pass


def symbol(i: int, j: int) -> tuple[int, int]:
    if i < 1 or j < 1:
        raise ValueError(f"a_{i}{j} is not a Lazard symbol")
    return (i, j) if i <= j else (j, i)


def symbol_degree(s: tuple[int, int]) -> int:
    return s[0] + s[1] - 1


def degree(m: Monomial) -> int:
    return sum(symbol_degree(s) for s in m)


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    return tuple(sorted(m1 + m2))


def monomial_str(m: Monomial) -> str:
    if not m:
        return "1"
    parts, seen = [], {}
    for s in m:
        seen[s] = seen.get(s, 0) + 1
    for s, e in seen.items():
        parts.append(f"a{s[0]}{s[1]}" + (f"^{e}" if e > 1 else ""))
    return "*".join(parts)


def symbols_up_to(d: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, d + 1) for j in range(i, d + 1) if i + j - 1 <= d]


def monomials_of_degree(d: int) -> list[Monomial]:
    """All monomials of exact degree d, sorted."""
    syms = symbols_up_to(d)
    out: list[Monomial] = []

    def rec(start: int, left: int, acc: list):
        if left == 0:
            out.append(tuple(acc))
            return
        for k in range(start, len(syms)):
            sd = symbol_degree(syms[k])
            if sd <= left:
                acc.append(syms[k])
                rec(k, left - sd, acc)
                acc.pop()

    rec(0, d, [])
    return sorted(out)


def ring_add(p: Mapping, q: Mapping, scale: int = 1) -> RingElement:
    out = dict(p)
    _axpy(out, scale, q)
    return out


def ring_mul(p: Mapping, q: Mapping, max_degree: int | None = None) -> RingElement:
    """Product of two polynomials in the a_ij, dropping monomials above max_degree."""
    out: dict = {}
    for m1, c1 in p.items():
        d1 = degree(m1)
        for m2, c2 in q.items():
            if max_degree is not None and d1 + degree(m2) > max_degree:
                continue
            m = mono_mul(m1, m2)
            n = out.get(m, 0) + c1 * c2
            if n:
                out[m] = n
            else:
                out.pop(m, None)
    return out


# ---------------------------------------------------------------------------
# truncated power series in a few variables with polynomial coefficients


class _Series:
    """Power series in ``nvars`` variables, truncated at total degree ``top``."""

    def __init__(self, nvars: int, top: int, terms: dict | None = None):
        self.nvars, self.top = nvars, top
        self.terms: dict[tuple[int, ...], RingElement] = terms or {}

    @classmethod
    def var(cls, nvars: int, top: int, k: int) -> "_Series":
        e = tuple(int(i == k) for i in range(nvars))
        return cls(nvars, top, {e: {ONE: 1}})

    def __add__(self, other: "_Series") -> "_Series":
        out = {e: dict(c) for e, c in self.terms.items()}
        for e, c in other.terms.items():
            r = ring_add(out.get(e, {}), c)
            if r:
                out[e] = r
            else:
                out.pop(e, None)
        return _Series(self.nvars, self.top, out)

    def scale(self, coeff: RingElement) -> "_Series":
        out = {}
        for e, c in self.terms.items():
            r = ring_mul(c, coeff)
            if r:
                out[e] = r
        return _Series(self.nvars, self.top, out)

    def __mul__(self, other: "_Series") -> "_Series":
        out: dict = {}
        for e1, c1 in self.terms.items():
            s1 = sum(e1)
            for e2, c2 in other.terms.items():
                if s1 + sum(e2) > self.top:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                r = ring_add(out.get(e, {}), ring_mul(c1, c2))
                if r:
                    out[e] = r
                else:
                    out.pop(e, None)
        return _Series(self.nvars, self.top, out)

    def powers(self, n: int) -> list["_Series"]:
        one = _Series(self.nvars, self.top, {(0,) * self.nvars: {ONE: 1}})
        out = [one]
        for _ in range(n):
            out.append(out[-1] * self)
        return out


def _generic_fgl(x: _Series, y: _Series, coeff: Callable[[int, int], RingElement]) -> _Series:
    """F(x, y) for series x, y without constant term."""
    top = x.top
    xp, yp = x.powers(top), y.powers(top)
    out = x + y
    for i in range(1, top + 1):
        for j in range(1, top + 1 - i):
            c = coeff(i, j)
            if c:
                out = out + (xp[i] * yp[j]).scale(c)
    return out


def _symbolic(i: int, j: int) -> RingElement:
    return {(symbol(i, j),): 1}


def fgl_identity_components(N: int, coeff: Callable[[int, int], RingElement] = _symbolic) -> dict:
    """Coefficients of the unit, commutativity and associativity defects of F.

    Returns ``{"unit": {...}, "commutativity": {...}, "associativity": {...}}``
    mapping exponent tuples to ring elements, series truncated at total degree
    N + 1 (so every component has Lazard degree <= N).
    """
    top = N + 1
    u, v = _Series.var(2, top, 0), _Series.var(2, top, 1)
    zero2 = _Series(2, top)
    F_uv = _generic_fgl(u, v, coeff)
    F_vu = _generic_fgl(v, u, coeff)
    F_u0 = _generic_fgl(u, zero2, coeff)
    neg = lambda s: s.scale({ONE: -1})
    unit = (F_u0 + neg(u)).terms
    comm = (F_uv + neg(F_vu)).terms

    U, V, W = (_Series.var(3, top, k) for k in range(3))
    left = _generic_fgl(_generic_fgl(U, V, coeff), W, coeff)
    right = _generic_fgl(U, _generic_fgl(V, W, coeff), coeff)
    assoc = (left + neg(right)).terms
    return {"unit": unit, "commutativity": comm, "associativity": assoc}


# ---------------------------------------------------------------------------


class TruncatedLazardRing:
    """Degrees 0..N of the Lazard ring, one presented abelian group per degree."""

    def __init__(self, N: int):
        if N < 0:
            raise ValueError("truncation degree must be >= 0")
        self.N = N
        self.basis: dict[int, list[Monomial]] = {d: monomials_of_degree(d) for d in range(N + 1)}
        self.components: dict[int, list[RingElement]] = {d: [] for d in range(N + 1)}
        for name, comps in fgl_identity_components(N).items():
            for exps in sorted(comps):
                c = comps[exps]
                d = sum(exps) - 1
                if c and 0 <= d <= N:
                    self.components[d].append(c)
        self.relations: dict[int, list[RingElement]] = {}
        for d in range(N + 1):
            rels = list(self.components[d])
            for k in range(d):
                for c in self.components[k]:
                    for m in self.basis[d - k]:
                        if m:
                            rels.append(ring_mul({m: 1}, c))
            self.relations[d] = rels
        self._lattices: dict[int, Lattice] = {}
        for d in range(N + 1):
            lat = Lattice()
            for r in self.relations[d]:
                lat.add(r)
            self._lattices[d] = lat

    @property
    def symbols(self) -> list[tuple[int, int]]:
        return symbols_up_to(self.N)

    @cached_property
    def group(self) -> PresentedGroup:
        return PresentedGroup({d: (self.basis[d], self.relations[d]) for d in range(self.N + 1)})

    def invariants(self, d: int) -> tuple[int, list[int]]:
        return self.group.invariants(d)

    def free_ranks(self) -> list[int]:
        return [self.invariants(d)[0] for d in range(self.N + 1)]

    def a(self, i: int, j: int) -> RingElement:
        s = symbol(i, j)
        if symbol_degree(s) > self.N:
            raise DegreeOverflowError(f"a_{i}{j} has degree {symbol_degree(s)} > {self.N}")
        return {(s,): 1}

    def normal_form(self, p: Mapping[Monomial, int]) -> RingElement:
        by_deg: dict[int, dict] = {}
        for m, c in p.items():
            m = tuple(sorted(symbol(*s) for s in m))
            d = degree(m)
            if d > self.N:
                raise DegreeOverflowError(f"monomial {monomial_str(m)} has degree {d} > {self.N}")
            if c:
                _axpy(by_deg.setdefault(d, {}), c, {m: 1})
        out: dict = {}
        for d, comp in sorted(by_deg.items()):
            out.update(self._lattices[d].reduce(comp))
        return out

    def mul(self, p: Mapping, q: Mapping) -> RingElement:
        return self.normal_form(ring_mul(p, q, self.N))

    def equal(self, p: Mapping, q: Mapping) -> bool:
        return self.normal_form(ring_add(p, q, -1)) == {}


def build_lazard(N: int) -> TruncatedLazardRing:
    return TruncatedLazardRing(N)


def ring_normal_form(R: TruncatedLazardRing, p: Mapping) -> RingElement:
    return R.normal_form(p)


@dataclass(frozen=True)
class FglSeries:
    """F(u, v) over a truncated Lazard ring, bidegrees up to total degree N + 1."""

    ring: TruncatedLazardRing
    coefficients: dict  # (i, j) -> RingElement, normal forms

    def coefficient(self, i: int, j: int) -> RingElement:
        return dict(self.coefficients.get((i, j), {}))

    @property
    def top(self) -> int:
        return self.ring.N + 1

    def defects(self) -> dict[str, dict]:
        """Unit/commutativity/associativity components after reduction in the ring."""
        comps = fgl_identity_components(self.ring.N, lambda i, j: self.coefficient(i, j))
        out = {}
        for name, terms in comps.items():
            reduced = {e: self.ring.normal_form(c) for e, c in terms.items()}
            out[name] = {e: c for e, c in reduced.items() if c}
        return out


def universal_fgl(R: TruncatedLazardRing) -> FglSeries:
    coeffs = {(1, 0): {ONE: 1}, (0, 1): {ONE: 1}}
    for i in range(1, R.N + 1):
        for j in range(1, R.N + 2 - i):
            coeffs[(i, j)] = R.normal_form(R.a(i, j))
    return FglSeries(R, coeffs)


def fgl_apply(F: FglSeries, phi1: Callable, phi2: Callable, x, bound: int | None,
              is_zero: Callable | None = None) -> list[tuple[RingElement, object]]:
    """Evaluate F(phi1, phi2) on x as a list of (Lazard coefficient, element) terms.

    ``phi1`` and ``phi2`` must commute and satisfy phi1^i phi2^j x = 0 whenever
    i + j > bound. Terms past the series truncation are dropped. Zero
    coefficients and terms whose element is zero (per ``is_zero``) are omitted.
    """
    if bound is None:
        raise NilpotencyBoundMissing("fgl_apply needs a nilpotency bound for the operators")
    rows = [x]
    for _ in range(min(bound, F.top)):
        rows.append(phi1(rows[-1]))
    out = []
    for i, xi in enumerate(rows):
        y = xi
        for j in range(0, min(bound, F.top) - i + 1):
            if j:
                y = phi2(y)
            if (i, j) == (0, 0):
                continue
            c = F.coefficients.get((i, j))
            if not c:
                continue
            if is_zero is not None and is_zero(y):
                continue
            out.append((dict(c), y))
    return out
