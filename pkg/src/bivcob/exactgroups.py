"""Exact integer linear algebra and finitely presented graded abelian groups.

Everything here works on Python ints; there is no floating point anywhere in
the package. Equality in a quotient group is decided by reducing against an
echelon basis of the relation lattice, and group invariants are read off the
Smith normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

Label = Hashable


class GradeMismatchError(ValueError):
    """Raised when elements of different grades are combined."""


class UnknownGradeError(KeyError):
    pass


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    """A dense integer matrix with explicit shape (so 0 x n is representable)."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")
        if any(type(x) is not int for x in self.entries):
            raise TypeError("IntMatrix entries must be int")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def tolist(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        a, b = self.tolist(), other.tolist()
        out = [[sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
               for i in range(self.rows)]
        return IntMatrix.from_rows(out, other.cols)

    def transpose(self) -> "IntMatrix":
        t = [[self[i, j] for i in range(self.rows)] for j in range(self.cols)]
        return IntMatrix.from_rows(t, self.rows)

    def diagonal(self) -> list[int]:
        return [self[i, i] for i in range(min(self.rows, self.cols))]

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
                if swap is None:
                    return 0
                m[k], m[swap] = m[swap], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def smith_normal_form(M: IntMatrix | Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(D, U, V)`` with ``U @ M @ V == D``.

    U and V are unimodular and D is diagonal with nonnegative entries
    d1 | d2 | ... . The pivot is always the entry of smallest nonzero absolute
    value in the remaining block, ties broken by lowest row then lowest column,
    so the output is a deterministic function of the input.
    """
    if not isinstance(M, IntMatrix):
        M = IntMatrix.from_rows(M)
    r, c = M.rows, M.cols
    A = M.tolist()
    U = IntMatrix.identity(r).tolist()
    V = IntMatrix.identity(c).tolist()

    t = 0
    while t < min(r, c):
        while True:
            best = None
            for i in range(t, r):
                for j in range(t, c):
                    x = A[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                break
            _, pi, pj = best
            if pi != t:
                _swap_rows(A, t, pi)
                _swap_rows(U, t, pi)
            if pj != t:
                _swap_cols(A, t, pj)
                _swap_cols(V, t, pj)
            p = A[t][t]
            clean = True
            for i in range(t + 1, r):
                if A[i][t]:
                    q = A[i][t] // p
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[t])]
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, c):
                if A[t][j]:
                    q = A[t][j] // p
                    for row in A:
                        row[j] -= q * row[t]
                    for row in V:
                        row[j] -= q * row[t]
                    clean = clean and A[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, r)
                        if any(A[i][j] % p for j in range(t + 1, c))), None)
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
            U[t] = [a + b for a, b in zip(U[t], U[bad])]
        if best is None:
            break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1

    return IntMatrix.from_rows(A, c), IntMatrix.from_rows(U, r), IntMatrix.from_rows(V, c)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


# ---------------------------------------------------------------------------
# sparse vectors and an incremental echelon lattice

Vector = dict  # label -> nonzero int


def _axpy(y: dict, a: int, x: Mapping) -> None:
    """y += a * x in place, dropping zeros."""
    if not a:
        return
    for k, v in x.items():
        n = y.get(k, 0) + a * v
        if n:
            y[k] = n
        else:
            y.pop(k, None)


def _scaled(a: int, x: Mapping) -> dict:
    return {k: a * v for k, v in x.items()} if a else {}


class Lattice:
    """A sublattice of a free abelian group on sortable labels.

    Rows are kept in echelon form: each row's smallest label (under ``key``) is
    its pivot, pivots are distinct and positive. ``reduce`` returns the unique
    representative whose pivot coordinates lie in ``[0, pivot)``, so two
    vectors are congruent iff their reductions agree, whatever order the
    generators were added in.

    Each row also remembers how it was built from the added generators
    (generator index -> coefficient), which is what ``witness`` returns.
    """

    def __init__(self, key: Callable[[Label], object] | None = None):
        self._key = key if key is not None else (lambda x: x)
        self._rows: dict[Label, tuple[dict, dict]] = {}
        self._ngens = 0

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def generator_count(self) -> int:
        return self._ngens

    def rows(self) -> list[dict]:
        return [dict(self._rows[p][0]) for p in self.pivots()]

    def pivots(self) -> list[Label]:
        return sorted(self._rows, key=self._key)

    def pivot_values(self) -> dict[Label, int]:
        return {p: row[p] for p, (row, _) in self._rows.items()}

    def add(self, v: Mapping[Label, int]) -> bool:
        """Add a generator; return True iff the lattice grew."""
        vec = {k: x for k, x in v.items() if x}
        comb = {self._ngens: 1}
        self._ngens += 1
        while vec:
            c = min(vec, key=self._key)
            if c not in self._rows:
                if vec[c] < 0:
                    vec = _scaled(-1, vec)
                    comb = _scaled(-1, comb)
                self._rows[c] = (vec, comb)
                return True
            prow, pcomb = self._rows[c]
            a, b = vec[c], prow[c]
            if a % b == 0:
                q = a // b
                _axpy(vec, -q, prow)
                _axpy(comb, -q, pcomb)
                continue
            g, s, t = xgcd(b, a)
            new_row = _scaled(s, prow)
            _axpy(new_row, t, vec)
            new_comb = _scaled(s, pcomb)
            _axpy(new_comb, t, comb)
            rest = _scaled(a // g, prow)
            _axpy(rest, -(b // g), vec)
            rest_comb = _scaled(a // g, pcomb)
            _axpy(rest_comb, -(b // g), comb)
            self._rows[c] = (new_row, new_comb)
            vec, comb = rest, rest_comb
        return False

    def reduce(self, v: Mapping[Label, int]) -> dict:
        return self._reduce(v)[0]

    def _reduce(self, v: Mapping[Label, int]) -> tuple[dict, dict]:
        vec = {k: x for k, x in v.items() if x}
        used: dict = {}
        for p in self.pivots():
            x = vec.get(p)
            if not x:
                continue
            row, comb = self._rows[p]
            q = x // row[p]
            if q:
                _axpy(vec, -q, row)
                _axpy(used, q, comb)
        return vec, used

    def contains(self, v: Mapping[Label, int]) -> bool:
        return not self.reduce(v)

    def witness(self, v: Mapping[Label, int]) -> dict | None:
        """Coefficients on the added generators reproducing v, or None."""
        rest, used = self._reduce(v)
        return None if rest else used


# ---------------------------------------------------------------------------
# graded groups


@dataclass(frozen=True)
class GroupElement:
    """A homogeneous element: integer coefficients on generator labels of one grade."""

    grade: int
    coeffs: tuple[tuple[Label, int], ...] = ()

    @classmethod
    def make(cls, grade: int, coeffs: Mapping[Label, int] | Iterable[tuple[Label, int]] = ()) -> "GroupElement":
        acc: dict = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        for k, v in items:
            n = acc.get(k, 0) + v
            if n:
                acc[k] = n
            else:
                acc.pop(k, None)
        return cls(grade, tuple(sorted(acc.items(), key=lambda kv: repr(kv[0]))))

    @property
    def vector(self) -> dict:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "GroupElement") -> None:
        if self.grade != other.grade:
            raise GradeMismatchError(f"grade {self.grade} vs grade {other.grade}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        if self.is_zero() and not other.is_zero():
            return other
        if other.is_zero():
            return self
        self._check(other)
        v = self.vector
        _axpy(v, 1, other.vector)
        return GroupElement.make(self.grade, v)

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.grade, tuple((k, -v) for k, v in self.coeffs))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __rmul__(self, n: int) -> "GroupElement":
        return GroupElement.make(self.grade, {k: n * v for k, v in self.coeffs})


def zero(grade: int) -> GroupElement:
    return GroupElement(grade, ())


class PresentedGroup:
    """A graded abelian group given by generators and relation rows per grade.

    ``pieces`` maps grade -> (generator labels, relation rows); each relation row
    is either a dense sequence aligned with the labels or a mapping label -> int.
    """

    def __init__(self, pieces: Mapping[int, tuple[Sequence[Label], Iterable]]):
        self._labels: dict[int, tuple] = {}
        self._relations: dict[int, tuple[tuple[int, ...], ...]] = {}
        self._index: dict[int, dict] = {}
        for grade in sorted(pieces):
            labels, rels = pieces[grade]
            labels = tuple(labels)
            index = {lab: i for i, lab in enumerate(labels)}
            if len(index) != len(labels):
                raise ValueError(f"duplicate generator labels in grade {grade}")
            dense = []
            for rel in rels:
                if isinstance(rel, GroupElement):
                    if rel.grade != grade:
                        raise GradeMismatchError(f"relation of grade {rel.grade} filed under grade {grade}")
                    rel = rel.vector
                if isinstance(rel, Mapping):
                    row = [0] * len(labels)
                    for k, x in rel.items():
                        if k not in index:
                            raise KeyError(f"relation mentions unknown generator {k!r} in grade {grade}")
                        row[index[k]] += x
                else:
                    row = [int(x) for x in rel]
                    if len(row) != len(labels):
                        raise ValueError(f"relation length {len(row)} != {len(labels)} generators")
                if any(row):
                    dense.append(tuple(row))
            self._labels[grade] = labels
            self._relations[grade] = tuple(dense)
            self._index[grade] = index
        self._lattices: dict[int, Lattice] = {}
        self._smith: dict[int, tuple] = {}

    @classmethod
    def free(cls, labels_by_grade: Mapping[int, Sequence[Label]]) -> "PresentedGroup":
        return cls({g: (labs, ()) for g, labs in labels_by_grade.items()})

    @property
    def grades(self) -> list[int]:
        return list(self._labels)

    def _grade(self, grade: int) -> None:
        if grade not in self._labels:
            raise UnknownGradeError(grade)

    def labels(self, grade: int) -> tuple:
        self._grade(grade)
        return self._labels[grade]

    def relations(self, grade: int) -> tuple[tuple[int, ...], ...]:
        self._grade(grade)
        return self._relations[grade]

    def relation_matrix(self, grade: int) -> IntMatrix:
        return IntMatrix.from_rows(self.relations(grade), len(self.labels(grade)))

    def element(self, grade: int, coeffs: Mapping[Label, int]) -> GroupElement:
        self._grade(grade)
        idx = self._index[grade]
        for k in coeffs:
            if k not in idx:
                raise KeyError(f"{k!r} is not a generator of grade {grade}")
        return GroupElement.make(grade, coeffs)

    def generator(self, grade: int, label: Label) -> GroupElement:
        return self.element(grade, {label: 1})

    def _lattice(self, grade: int) -> Lattice:
        if grade not in self._lattices:
            lat = Lattice()
            for row in self.relations(grade):
                lat.add({i: x for i, x in enumerate(row) if x})
            self._lattices[grade] = lat
        return self._lattices[grade]

    def _indexed(self, v: GroupElement) -> dict:
        if v.grade not in self._labels:
            raise GradeMismatchError(f"grade {v.grade} is not a grade of this group")
        idx = self._index[v.grade]
        try:
            return {idx[k]: x for k, x in v.coeffs}
        except KeyError as exc:
            raise KeyError(f"{exc.args[0]!r} is not a generator of grade {v.grade}") from None

    def normal_form(self, v: GroupElement) -> GroupElement:
        labels = self._labels.get(v.grade)
        red = self._lattice(v.grade).reduce(self._indexed(v))
        return GroupElement.make(v.grade, {labels[i]: x for i, x in red.items()})

    def is_zero(self, v: GroupElement) -> bool:
        return self.normal_form(v).is_zero()

    def equal(self, v: GroupElement, w: GroupElement) -> bool:
        return self.normal_form(v) == self.normal_form(w)

    def smith(self, grade: int) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
        """Smith data of the relation lattice of one grade (computed on its echelon basis)."""
        if grade not in self._smith:
            n = len(self.labels(grade))
            lat = self._lattice(grade)
            rows = [[row.get(i, 0) for i in range(n)] for row in lat.rows()]
            self._smith[grade] = smith_normal_form(IntMatrix.from_rows(rows, n))
        return self._smith[grade]

    def invariants(self, grade: int) -> tuple[int, list[int]]:
        D, _, _ = self.smith(grade)
        diag = [d for d in D.diagonal() if d]
        rank = len(self.labels(grade)) - len(diag)
        return rank, [d for d in diag if d != 1]

    def membership(self, v: GroupElement, span: Sequence[GroupElement]) -> tuple[bool, list[int]]:
        """Decide v in <span> + relations; the witness gives the span coefficients."""
        for s in span:
            if s.grade != v.grade:
                raise GradeMismatchError(f"span element of grade {s.grade} vs {v.grade}")
        lat = Lattice()
        for s in span:
            lat.add(self._indexed(s))
        for row in self.relations(v.grade):
            lat.add({i: x for i, x in enumerate(row) if x})
        w = lat.witness(self._indexed(v))
        if w is None:
            return False, []
        return True, [w.get(i, 0) for i in range(len(span))]

    def quotient(self, new_relations: Iterable[GroupElement]) -> "PresentedGroup":
        extra: dict[int, list] = {}
        for rel in new_relations:
            if rel.grade not in self._labels:
                raise GradeMismatchError(f"relation of grade {rel.grade} is not in any grade of the group")
            extra.setdefault(rel.grade, []).append(rel.vector)
        pieces = {}
        for g in self._labels:
            labels = self._labels[g]
            rels = [dict(zip(labels, r)) for r in self._relations[g]] + extra.get(g, [])
            pieces[g] = (labels, rels)
        return PresentedGroup(pieces)


def membership(G: PresentedGroup, v: GroupElement, span: Sequence[GroupElement]) -> tuple[bool, list[int]]:
    return G.membership(v, span)


def quotient(G: PresentedGroup, new_relations: Iterable[GroupElement]) -> PresentedGroup:
    return G.quotient(new_relations)


def invariants(G: PresentedGroup, grade: int) -> tuple[int, list[int]]:
    return G.invariants(grade)


def normal_form(G: PresentedGroup, v: GroupElement) -> GroupElement:
    return G.normal_form(v)
