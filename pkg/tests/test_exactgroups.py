import itertools
from math import gcd, prod

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf
from hypothesis import given, settings, strategies as st

from bivcob.exactgroups import (
    GradeMismatchError,
    GroupElement,
    IntMatrix,
    Lattice,
    PresentedGroup,
    UnknownGradeError,
    invariants,
    membership,
    normal_form,
    quotient,
    smith_normal_form,
)


def small_matrices(max_rows=4, max_cols=4, bound=6):
    return st.integers(0, max_rows).flatmap(
        lambda r: st.integers(0, max_cols).flatmap(
            lambda c: st.lists(
                st.lists(st.integers(-bound, bound), min_size=c, max_size=c),
                min_size=r, max_size=r,
            ).map(lambda rows: IntMatrix.from_rows(rows, c))
        )
    )


def brute_in_span(rows, v, box=4):
    """v in the Z-span of rows, by enumerating small coefficient vectors."""
    for coeffs in itertools.product(range(-box, box + 1), repeat=len(rows)):
        s = [sum(c * r[j] for c, r in zip(coeffs, rows)) for j in range(len(v))]
        if s == list(v):
            return True
    return False


# -- smith normal form ------------------------------------------------------


def test_snf_zero_matrix():
    D, U, V = smith_normal_form([[0, 0], [0, 0]])
    assert D == IntMatrix.zeros(2, 2)
    assert U == IntMatrix.identity(2) and V == IntMatrix.identity(2)


def test_snf_identity():
    D, U, V = smith_normal_form(IntMatrix.identity(3))
    assert D == IntMatrix.identity(3)


def test_snf_2468():
    M = IntMatrix.from_rows([[2, 4], [6, 8]])
    D, U, V = smith_normal_form(M)
    assert D.diagonal() == [2, 4]
    assert U @ M @ V == D
    assert abs(U.det()) == 1 and abs(V.det()) == 1


def test_snf_empty_shapes():
    for r, c in [(0, 3), (3, 0), (0, 0)]:
        M = IntMatrix.zeros(r, c)
        D, U, V = smith_normal_form(M)
        assert (D.rows, D.cols, U.rows, V.rows) == (r, c, r, c)


def test_snf_against_sympy():
    M = [[3, 6, 9], [2, 8, 14], [1, 1, 5]]
    D, U, V = smith_normal_form(M)
    ref = sympy_snf(sympy.Matrix(M), domain=sympy.ZZ)
    assert [abs(x) for x in D.diagonal()] == [abs(ref[i, i]) for i in range(3)]


@settings(max_examples=150, deadline=None)
@given(small_matrices())
def test_snf_properties(M):
    D, U, V = smith_normal_form(M)
    assert U @ M @ V == D
    assert D.is_diagonal()
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    diag = D.diagonal()
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d]
    assert diag[: len(nz)] == nz  # zeros trail
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert smith_normal_form(M) == (D, U, V)


def test_det_bareiss():
    M = IntMatrix.from_rows([[2, -1, 0], [1, 3, 4], [0, 5, -2]])
    assert M.det() == int(sympy.Matrix(M.tolist()).det())


# -- lattice ----------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(small_matrices(3, 3, 4), st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_lattice_reduce_is_canonical(M, v):
    rows = [r for r in M.tolist() if len(r) == 3]
    lat1, lat2 = Lattice(), Lattice()
    for r in rows:
        lat1.add(dict(enumerate(r)))
    for r in reversed(rows):
        lat2.add(dict(enumerate(r)))
    vec = dict(enumerate(v))
    assert lat1.reduce(vec) == lat2.reduce(vec)
    assert lat1.reduce(lat1.reduce(vec)) == lat1.reduce(vec)
    w = lat1.witness(vec)
    if w is not None:
        s = [sum(w.get(i, 0) * r[j] for i, r in enumerate(rows)) for j in range(3)]
        assert s == v


# -- presented groups -------------------------------------------------------


def G1(rels=()):
    return PresentedGroup({0: (["g1"], rels)})


def test_membership_trivial_cases():
    G = PresentedGroup.free({0: ["g1", "g2"]})
    ok, w = membership(G, GroupElement.make(0), [])
    assert ok and w == []
    g1 = G.generator(0, "g1")
    ok, w = membership(G, g1, [g1])
    assert ok and w == [1]


def test_membership_two_in_four():
    G = PresentedGroup.free({0: ["g1"]})
    v = G.element(0, {"g1": 2})
    ok, _ = membership(G, v, [G.element(0, {"g1": 4})])
    assert not ok
    assert not brute_in_span([[4]], [2], box=20)


def test_membership_grade_mismatch():
    G = PresentedGroup.free({0: ["a"], 1: ["b"]})
    with pytest.raises(GradeMismatchError):
        G.membership(G.generator(0, "a"), [G.generator(1, "b")])


def test_membership_modulo_relations():
    G = PresentedGroup({0: (["a", "b"], [{"a": 1, "b": -1}])})
    ok, w = G.membership(G.generator(0, "a"), [G.generator(0, "b")])
    assert ok and w == [1]


def test_quotient_examples():
    F = PresentedGroup.free({0: ["g1", "g2"]})
    Q = quotient(F, [F.element(0, {"g1": 1, "g2": -1})])
    assert invariants(Q, 0) == (1, [])
    assert Q.labels(0) == ("g1", "g2")
    assert quotient(F, []).relations(0) == F.relations(0)
    Z2 = quotient(PresentedGroup.free({0: ["g1"]}), [GroupElement.make(0, {"g1": 2})])
    assert invariants(Z2, 0) == (0, [2])


def test_quotient_grade_mismatch():
    F = PresentedGroup.free({0: ["g"]})
    with pytest.raises(GradeMismatchError):
        quotient(F, [GroupElement.make(3, {"x": 1})])


def test_invariants_examples():
    assert invariants(PresentedGroup.free({0: ["a", "b", "c"]}), 0) == (3, [])
    assert invariants(G1([[2]]), 0) == (0, [2])
    G = PresentedGroup({0: (["g1", "g2"], [[1, -1], [0, 3]])})
    assert invariants(G, 0) == (0, [3])
    with pytest.raises(UnknownGradeError):
        invariants(G, 5)


def test_normal_form_examples():
    Z2 = G1([[2]])
    assert normal_form(Z2, GroupElement.make(0)).is_zero()
    assert normal_form(Z2, GroupElement.make(0, {"g1": 3})) == GroupElement.make(0, {"g1": 1})
    F = PresentedGroup.free({0: ["x", "y"]})
    v = F.element(0, {"x": 5, "y": -2})
    assert normal_form(F, v) == v


def coset_count_oracle(rows, n):
    """|Z^n / L| for full-rank L by brute force over a box, membership by sympy."""
    d = abs(int(sympy.Matrix(rows).det()))
    reps = []
    A = sympy.Matrix(rows)
    for v in itertools.product(range(d), repeat=n):
        new = True
        for r in reps:
            diff = sympy.Matrix([[a - b for a, b in zip(v, r)]])
            x = diff * A.inv()
            if all(e.is_integer for e in x):
                new = False
                break
        if new:
            reps.append(v)
    return reps


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=2, max_size=2))
def test_invariants_match_coset_enumeration(rows):
    det = abs(rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0])
    if det == 0 or det > 40:
        return
    G = PresentedGroup({0: (["a", "b"], rows)})
    rank, torsion = G.invariants(0)
    reps = coset_count_oracle(rows, 2)
    assert rank == 0
    assert prod(torsion) == len(reps)
    # the number of elements killed by k pins the invariant factors
    for k in range(1, 7):
        killed = 0
        for r in reps:
            v = G.element(0, {"a": k * r[0], "b": k * r[1]})
            killed += G.is_zero(v)
        assert killed == prod(gcd(k, t) for t in torsion)


@settings(max_examples=60, deadline=None)
@given(small_matrices(3, 3, 4),
       st.lists(st.integers(-6, 6), min_size=3, max_size=3),
       st.lists(st.integers(-6, 6), min_size=3, max_size=3))
def test_normal_form_additive_and_idempotent(M, v, w):
    rows = [r for r in M.tolist() if len(r) == 3]
    G = PresentedGroup({0: (["x", "y", "z"], rows)})
    V = G.element(0, dict(zip("xyz", v)))
    W = G.element(0, dict(zip("xyz", w)))
    nf = G.normal_form
    assert nf(nf(V)) == nf(V)
    assert nf(V + W) == nf(nf(V) + nf(W))
    # nf(v) == nf(w) iff v - w is in the relation lattice
    assert (nf(V) == nf(W)) == G.membership(V - W, [])[0]
