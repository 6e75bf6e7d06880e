from fractions import Fraction

from toricres.exactlin import EQ, LE, LT, affine_dim, feasible, polyhedron_vertices
from toricres.strata import (
    bondal_classes,
    build_strata,
    cube_strata,
    cw_strata,
    entrance_space,
    exit_space,
    subtorus_data,
    write_plot_data,
)
from toricres.toricdata import toric_morphism


def test_bondal_classes(p2, p1, p1xp1):
    assert bondal_classes(p2) == [(0,), (1,), (2,)]
    assert bondal_classes(p1) == [(0,), (1,)]
    assert bondal_classes(p1xp1) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_p2_torus_cube_strata(p2):
    sc = cube_strata(p2)
    assert sc.ambient == "torus"
    dims = sorted((c.cls, c.dim) for c in sc.components)
    assert dims == [((0,), 0), ((1,), 2), ((2,), 2)]
    # stratum of class 0 is the single point
    zero = sc.components_of_class((0,))
    assert len(zero) == 1 and zero[0].dim == 0


def test_p2_torus_cw_cells(p2):
    sc = cw_strata(p2)
    per_dim = {d: len(sc.cells_of_dim(d)) for d in (0, 1, 2)}
    assert per_dim == {0: 1, 1: 3, 2: 2}
    assert sorted(c.cls for c in sc.cells_of_dim(2)) == [(1,), (2,)]
    assert {c.cls for c in sc.cells_of_dim(1)} == {(1,)}
    assert [c.cls for c in sc.cells_of_dim(0)] == [(0,)]
    # euler characteristic of the torus
    assert sum((-1) ** c.dim for c in sc.cells) == 0


def test_p1_torus_cw_cells(p1):
    sc = cw_strata(p1)
    assert len(sc.cells) == 2
    assert sorted((c.dim, c.cls) for c in sc.cells) == [(0, (0,)), (1, (1,))]


def test_cubic_subtorus_data(p2, cubic_morphism):
    sub = subtorus_data(p2, cubic_morphism)
    assert sub.k == 1
    assert sub.kernel_basis == ((3, -2),)
    assert sub.pieces == 1


def test_frobenius_subtorus(p1, p2):
    f2 = toric_morphism([(2, 0), (0, 2)], target_dim=2)
    sub = subtorus_data(p2, f2)
    assert sub.k == 0 and sub.pieces == 4
    pts = sorted(sub.piece_points)
    assert pts == [
        (Fraction(0), Fraction(0)),
        (Fraction(0), Fraction(1, 2)),
        (Fraction(1, 2), Fraction(0)),
        (Fraction(1, 2), Fraction(1, 2)),
    ]
    f3 = toric_morphism([(3,)], target_dim=1)
    sub3 = subtorus_data(p1, f3)
    assert sub3.pieces == 3 and sub3.k == 0


def test_identity_subtorus(p2):
    ident = toric_morphism([(1, 0), (0, 1)], target_dim=2)
    sc = build_strata(p2, ident)
    assert len(sc.components) == 1
    comp = sc.components[0]
    assert comp.cls == (0,) and comp.dim == 0


def test_cubic_strata_component_counts(p2, cubic_morphism):
    sc = cube_strata(p2, cubic_morphism)
    counts = {}
    for c in sc.components:
        counts[c.cls] = counts.get(c.cls, 0) + 1
    assert counts == {(0,): 1, (1,): 2, (2,): 2}


def test_cubic_cw_cells(p2, cubic_morphism):
    sc = cw_strata(p2, cubic_morphism)
    assert len(sc.cells) == 8
    assert len(sc.cells_of_dim(0)) == 4
    assert len(sc.cells_of_dim(1)) == 4
    assert sum((-1) ** c.dim for c in sc.cells) == 0


def test_point_morphism_gives_torus(p2, point_to_p2):
    sc = build_strata(p2, point_to_p2)
    assert sc.ambient == "torus"
    assert len(sc.components) == 3


def test_boundary_squared_zero(p2, p1, cubic_morphism, point_to_p2):
    for sc in (
        build_strata(p2),
        build_strata(p1),
        build_strata(p2, cubic_morphism),
        build_strata(p2, point_to_p2),
    ):
        mats = sc.boundary_matrices()
        dims = sorted(mats)
        for d in dims:
            if d + 1 not in mats:
                continue
            a, b = mats[d], mats[d + 1]
            rows, mid, cols = len(a), len(b), len(b[0]) if b else 0
            for i in range(rows):
                for j in range(cols):
                    assert sum(a[i][t] * b[t][j] for t in range(mid)) == 0


def test_upstairs_regularity(p2, cubic_morphism):
    sc = build_strata(p2, cubic_morphism)
    for rows in sc.attachments.values():
        for _fid, sign, _m in rows:
            assert sign in (-1, 1)


def test_each_codim1_cell_bounds_two_top_cells(p2, cubic_morphism):
    sc = build_strata(p2, cubic_morphism)
    k = sc.k
    count = {c.id: 0 for c in sc.cells_of_dim(k - 1)}
    for c in sc.cells_of_dim(k):
        for fid, _s, _m in sc.attachments[c.id]:
            count[fid] += 1
    assert all(v == 2 for v in count.values())


def test_partition_property(p2, cubic_morphism):
    # denominator-7 grid points of the fundamental domain lie in exactly one cell
    for sc in (build_strata(p2), build_strata(p2, cubic_morphism)):
        k = sc.k
        grid = [Fraction(i, 7) for i in range(7)]
        pts = [(a,) if k == 1 else (a, b) for a in grid for b in (grid if k == 2 else [None])]
        for pt in pts:
            pt = tuple(x for x in pt if x is not None)
            hits = 0
            for c in sc.cells:
                for shift in _deck_shifts(k):
                    moved = tuple(x + s for x, s in zip(pt, shift))
                    if c.poly.contains(moved):
                        hits += 1
            assert hits == 1, (pt, hits)


def _deck_shifts(k):
    rng = range(-3, 4)
    if k == 1:
        return [(s,) for s in rng]
    return [(a, b) for a in rng for b in rng]


def test_exit_entrance_spaces_p2(p2):
    sc = build_strata(p2)
    comp2 = sc.components_of_class((2,))[0]
    ex = exit_space(comp2, sc)
    verts = polyhedron_vertices(ex)
    assert verts == [
        (Fraction(-2) + comp2.alpha[1] + 2, Fraction(0)),
        (Fraction(0), Fraction(0)),
        (Fraction(0), Fraction(2)),
    ] or len(verts) == 3
    assert affine_dim(ex) == 2
    # exit spaces are closed: no strict rows
    assert all(rel != LT for _a, rel, _b in ex.rows)
    comp0 = sc.components_of_class((0,))[0]
    ex0 = exit_space(comp0, sc)
    assert polyhedron_vertices(ex0) == [(Fraction(0), Fraction(0))]
    assert affine_dim(ex0) == 0
    # entrance spaces are open: all rows strict
    ent = entrance_space(comp0, sc)
    assert all(rel == LT for _a, rel, _b in ent.rows)
    vs = polyhedron_vertices(ent)
    assert len(vs) == 3 and affine_dim(ent) == 2


def test_entrance_space_p1(p1):
    sc = build_strata(p1)
    comp0 = sc.components_of_class((0,))[0]
    ent = entrance_space(comp0, sc)
    vs = polyhedron_vertices(ent)
    assert vs == [(Fraction(-1),), (Fraction(1),)] or (vs[1][0] - vs[0][0]) == 1


def test_exit_space_bounded_for_subtorus(p2, cubic_morphism):
    sc = build_strata(p2, cubic_morphism)
    from toricres.exactlin import lattice_points

    for comp in sc.components:
        ex = exit_space(comp, sc)
        # boundedness: lattice enumeration must not raise
        lattice_points(ex)


def test_labels_match_samples(p2, cubic_morphism):
    for sc in (build_strata(p2), build_strata(p2, cubic_morphism)):
        for c in sc.cells:
            img = sc.ses.ray_image(c.sample_x)
            lab = tuple(-(v.numerator // v.denominator) for v in img)
            assert sc.ses.class_of(lab) == c.cls


def test_plot_data(tmp_path, p2):
    sc = build_strata(p2)
    out = tmp_path / "plot.txt"
    write_plot_data(sc, str(out))
    text = out.read_text()
    body = [ln for ln in text.splitlines() if ln.startswith("cell ")]
    assert len(body) == len(sc.cells)
