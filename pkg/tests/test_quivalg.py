from fractions import Fraction

import pytest

from toricres.strata import build_strata
from toricres.toricdata import monomials_of_class, toric_morphism
from toricres.quivalg import (
    LengthBoundExceeded,
    TagNotEffective,
    bondal_algebra,
    constant_representation,
    exit_algebra,
    ext_dims_against_simples,
    minimal_projective_resolution,
    projective_cover,
    projective_module,
    quiver_presentation,
    resolution_homology,
    simple_module,
    translate_complex,
    translate_exit_to_bondal,
)


def test_bondal_algebra_p2(p2):
    B = bondal_algebra(p2)
    assert B.labels == [(0,), (1,), (2,)]
    assert B.hom_dim(0, 1) == 3
    assert B.hom_dim(1, 2) == 3
    assert B.hom_dim(0, 2) == 6
    assert B.hom_dim(1, 0) == 1 if False else B.hom_dim(1, 0) == 0
    assert B.hom_dim(0, 0) == 1
    assert B.check_associative()
    # commutativity relations: x_i then x_j == x_j then x_i
    for t1 in B.hom_tags(0, 1):
        for t2 in B.hom_tags(1, 2):
            p = B.compose((0, 1, t1), (1, 2, t2))
            q = B.compose((0, 1, t2), (1, 2, t1))
            assert p == q


def test_bondal_algebra_p1(p1):
    B = bondal_algebra(p1)
    assert B.labels == [(0,), (1,)]
    assert B.hom_dim(0, 1) == 2


def test_bondal_dims_are_lattice_counts(p2, p1xp1):
    for ses in (p2, p1xp1):
        B = bondal_algebra(ses)
        for i, a in enumerate(B.labels):
            for j, b in enumerate(B.labels):
                if i == j:
                    continue
                diff = tuple(y - x for x, y in zip(a, b))
                assert B.hom_dim(i, j) == len(monomials_of_class(diff, ses))


def test_exit_algebra_cubic(p2, cubic_morphism):
    V = build_strata(p2, cubic_morphism)
    E = exit_algebra(V)
    assert len(E.labels) == 5
    assert len(E.arrows()) == 5
    dims = {k: len(v) for k, v in E.hom.items()}
    # five arrows plus one composite hom space of dimension 1 each
    assert sum(dims.values()) == 6
    assert all(d == 1 for d in dims.values())
    assert E.check_associative()


def test_exit_algebra_identity(p2):
    V = build_strata(p2, toric_morphism([(1, 0), (0, 1)], target_dim=2))
    E = exit_algebra(V)
    assert len(E.labels) == 1
    assert E.dimension() == 1


def test_exit_algebra_of_full_torus_matches_bondal(p2, point_to_p2):
    V = build_strata(p2, point_to_p2)
    E = exit_algebra(V)
    B = bondal_algebra(p2)
    assert [lab[0] for lab in E.labels] == B.labels
    for key, tags in B.hom.items():
        assert E.hom.get(key) == tags


def test_constant_representation(p2, cubic_morphism):
    V = build_strata(p2, cubic_morphism)
    E = exit_algebra(V)
    K = constant_representation(E)
    assert K.dims == [1, 1, 1, 1, 1]
    assert K.validate()


def test_projective_cover_cubic(p2, cubic_morphism):
    V = build_strata(p2, cubic_morphism)
    E = exit_algebra(V)
    K = constant_representation(E)
    cov = projective_cover(K)
    covered = sorted(E.labels[v][0] for v in cov.vertices)
    assert covered == [(0,), (1,)]
    # the class-1 vertex in the cover is the compact component
    one = [E.labels[v] for v in cov.vertices if E.labels[v][0] == (1,)][0]
    comp = next(c for c in V.components if c.id == one[1])
    assert not any(
        all(sum(n * Fraction(x) for n, x in zip(normal, p)) == rhs for p in comp.closure_verts)
        for normal, rhs in comp.strict_rows
    )


def test_projective_cover_simple_and_projective(p1):
    B = bondal_algebra(p1)
    S = simple_module(B, 1)
    cov = projective_cover(S)
    assert cov.vertices == [1]
    P = projective_module(B, 0)
    assert P.validate()
    cov2 = projective_cover(P)
    assert cov2.vertices == [0]
    res = minimal_projective_resolution(P, bound=p1.n)
    assert res.length() == 0


def test_minimal_resolution_cubic_matrix(p2, cubic_morphism):
    V = build_strata(p2, cubic_morphism)
    E = exit_algebra(V)
    K = constant_representation(E)
    res = minimal_projective_resolution(K, bound=V.k)
    assert res.length() == 1
    assert [sorted(E.labels[v][0] for v in t) for t in res.terms] == [
        [(0,), (1,)],
        [(2,), (2,)],
    ]
    entries = set()
    for row in res.diffs[0]:
        for e in row:
            for tag, coeff in e.items():
                assert abs(coeff) == 1
                entries.add(tag)
    assert entries == {(0, 1, 0), (1, 0, 0), (1, 0, 1), (0, 2, 0)}
    assert res.is_minimal()
    assert all(v == 0 for v in resolution_homology(K, res).values())


def test_minimal_resolution_simple_p1(p1):
    B = bondal_algebra(p1)
    S0 = simple_module(B, 0)
    res = minimal_projective_resolution(S0, bound=p1.n)
    assert res.terms == [[0], [1, 1]]
    tags = sorted(t for row in res.diffs[0] for e in row for t in e)
    assert tags == [(0, 1), (1, 0)]


def test_resolution_respects_pdim_bound(p2, cubic_morphism, point_to_p2):
    for mor, bound in ((cubic_morphism, 1), (point_to_p2, 2)):
        V = build_strata(p2, mor)
        E = exit_algebra(V)
        K = constant_representation(E)
        res = minimal_projective_resolution(K, bound=bound)
        assert res.length() <= bound


def test_length_bound_error(p1):
    B = bondal_algebra(p1)
    S0 = simple_module(B, 0)
    with pytest.raises(LengthBoundExceeded):
        minimal_projective_resolution(S0, bound=0)


def test_uniqueness_up_to_graded_dims(p2, cubic_morphism):
    # permuting the module's internal bases must not change graded dimensions
    V = build_strata(p2, cubic_morphism)
    E = exit_algebra(V)
    K = constant_representation(E)
    K2 = constant_representation(E)
    for p in list(K2.act):
        K2.act[p] = [[Fraction(-1)]]  # conjugate by -1 at every vertex
    r1 = minimal_projective_resolution(K, bound=V.k)
    r2 = minimal_projective_resolution(K2, bound=V.k)
    assert r1.graded_dims() == r2.graded_dims()


def test_translate_exit_to_bondal(p2, cubic_morphism):
    V = build_strata(p2, cubic_morphism)
    E = exit_algebra(V)
    B = bondal_algebra(p2)
    # the class-2 -> class-1 exit arrow tagged x1 becomes the Bondal path 1 -> 2
    src = next(p for p in E.basis() if p[2] == (0, 1, 0) and E.labels[p[0]][0] == (1,))
    bu, bv, tag = translate_exit_to_bondal(src, E, B)
    assert (B.labels[bu], B.labels[bv], tag) == ((1,), (2,), (0, 1, 0))
    ident = (0, 0, (0, 0, 0))
    assert translate_exit_to_bondal(ident, E, B)[2] == (0, 0, 0)
    with pytest.raises(TagNotEffective):
        translate_exit_to_bondal((0, 1, (-1, 1, 0)), E, B)


def test_translate_complex_composite_tag(p2, cubic_morphism):
    V = build_strata(p2, cubic_morphism)
    E = exit_algebra(V)
    B = bondal_algebra(p2)
    comp = next(p for p in E.basis() if p[2] == (0, 2, 0))
    bu, bv, tag = translate_exit_to_bondal(comp, E, B)
    assert tag in B.hom_tags(bu, bv)
    K = constant_representation(E)
    res = minimal_projective_resolution(K, bound=V.k)
    tr = translate_complex(res, E, B)
    assert [sorted(B.labels[v] for v in t) for t in tr.terms] == [
        [(0,), (1,)],
        [(2,), (2,)],
    ]
    tr.check_d_squared()


def test_ext_dims_match_multiplicities_for_minimal(p2, point_to_p2):
    V = build_strata(p2, point_to_p2)
    E = exit_algebra(V)
    K = constant_representation(E)
    res = minimal_projective_resolution(K, bound=V.k)
    ext = ext_dims_against_simples(res)
    mult = {}
    for i, term in enumerate(res.terms):
        for v in term:
            mult[(i, v)] = mult.get((i, v), 0) + 1
    assert ext == mult


def test_quiver_presentation_p2(p2):
    B = bondal_algebra(p2)
    text = quiver_presentation(B)
    assert text.count("arrow ") == 6
    assert text.count("relation ") == 3
