import random
from fractions import Fraction

import pytest

from toricres.exactlin import (
    EQ,
    LE,
    LT,
    HPolyhedron,
    IntMatrix,
    RatMatrix,
    UnboundedPolyhedronError,
    affine_dim,
    cokernel_projection,
    feasible,
    integer_kernel,
    integer_section,
    interior_sample,
    lattice_points,
    polyhedron_vertices,
    rational_rank,
    smith_normal_form,
)

P2_RAYS = IntMatrix([[0, 1], [1, 0], [-1, -1]])


def brute_snf_diag(entries):
    # oracle for small matrices: gcd of i-th determinantal divisors
    from itertools import combinations
    from math import gcd

    rows = len(entries)
    cols = len(entries[0]) if entries else 0

    def minors(k):
        g = 0
        for ri in combinations(range(rows), k):
            for ci in combinations(range(cols), k):
                sub = [[entries[i][j] for j in ci] for i in ri]
                g = gcd(g, abs(det(sub)))
        return g

    def det(m):
        n = len(m)
        if n == 1:
            return m[0][0]
        total = 0
        for j in range(n):
            sub = [row[:j] + row[j + 1 :] for row in m[1:]]
            total += (-1) ** j * m[0][j] * det(sub)
        return total

    diag = []
    prev = 1
    for k in range(1, min(rows, cols) + 1):
        dk = minors(k)
        if dk == 0:
            break
        diag.append(dk // prev)
        prev = dk
    diag += [0] * (min(rows, cols) - len(diag))
    return diag


def test_snf_identity():
    snf = smith_normal_form(IntMatrix.identity(2))
    assert snf.D == IntMatrix.identity(2)
    assert snf.U.mul(snf.D).mul(snf.W) == IntMatrix.identity(2)


def test_snf_p2_ray_matrix():
    snf = smith_normal_form(P2_RAYS)
    assert snf.diagonal == (1, 1)
    cok = cokernel_projection(P2_RAYS)
    assert cok.free_rank == 1
    assert cok.torsion == ()


def test_snf_diag_2_4():
    snf = smith_normal_form(IntMatrix([[2, 0], [0, 4]]))
    assert snf.diagonal == (2, 4)
    # hand oracle: determinantal divisors give the same chain
    assert list(snf.diagonal) == brute_snf_diag([[2, 0], [0, 4]])


def test_snf_random_reconstruction():
    rng = random.Random(20250809)
    for trial in range(100):
        r = rng.randint(1, 4)
        c = rng.randint(1, 4)
        A = IntMatrix([[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)])
        snf = smith_normal_form(A)
        assert snf.U.mul(snf.D).mul(snf.W) == A
        diag = snf.diagonal
        for i in range(len(diag) - 1):
            if diag[i + 1]:
                assert diag[i] != 0 and diag[i + 1] % diag[i] == 0
        if trial % 10 == 0:
            assert list(diag) == brute_snf_diag([list(row) for row in A.entries])


def test_integer_kernel_examples():
    assert integer_kernel(IntMatrix([[2, 3]])) == [(3, -2)]
    assert integer_kernel(IntMatrix.identity(3)) == []
    assert integer_kernel(IntMatrix([[2, 4]])) == [(2, -1)]


def test_integer_kernel_saturated():
    # kernel vectors must be primitive
    from math import gcd

    ker = integer_kernel(IntMatrix([[6, 10, 15]]))
    for v in ker:
        g = 0
        for x in v:
            g = gcd(g, abs(x))
        assert g == 1
        assert 6 * v[0] + 10 * v[1] + 15 * v[2] == 0


def test_cokernel_p2():
    cok = cokernel_projection(P2_RAYS)
    assert cok.free_rank == 1 and cok.torsion == ()
    assert cok.free_map.entries == ((1, 1, 1),)
    for j in range(2):
        free, tors = cok.project(P2_RAYS.column(j))
        assert free == (0,) and tors == ()


def test_cokernel_torsion():
    cok = cokernel_projection(IntMatrix([[2]]))
    assert cok.free_rank == 0
    assert cok.torsion == (2,)
    # coker(x2) = Z/2 by direct enumeration: classes of 0 and 1 differ
    assert cok.project((0,)) != cok.project((1,))
    assert cok.project((0,)) == cok.project((2,))


def test_cokernel_identity_trivial():
    cok = cokernel_projection(IntMatrix.identity(3))
    assert cok.free_rank == 0 and cok.torsion == ()


def test_integer_section():
    P = IntMatrix([[1, 1, 1]])
    S = integer_section(P)
    assert P.mul(S) == IntMatrix.identity(1)


def test_feasible_trivial():
    box = HPolyhedron(1, [((1,), LT, 1), ((-1,), LE, 0)])
    assert feasible(box)
    empty = HPolyhedron(1, [((1,), LT, 0), ((-1,), LT, 0)])
    assert not feasible(empty)


def test_feasible_p2_stratum_one():
    # stratum of class 1 in the P^2 cube picture: half-open cube at
    # a=(0,0,1) meeting the embedded plane (x2, x1, -x1-x2)
    rows = []
    normals = [(0, 1), (1, 0), (-1, -1)]
    a = (0, 0, 1)
    for r, nrm in enumerate(normals):
        rows.append((nrm, LT, 1 - a[r]))
        rows.append((tuple(-x for x in nrm), LE, a[r]))
    assert feasible(HPolyhedron(2, rows))


def test_feasible_matches_grid_oracle():
    rng = random.Random(7)
    for _ in range(60):
        dim = rng.randint(1, 3)
        rows = []
        for _ in range(rng.randint(1, 4)):
            a = tuple(rng.randint(-3, 3) for _ in range(dim))
            rel = rng.choice([LE, LT])
            rows.append((a, rel, Fraction(rng.randint(-4, 4), rng.randint(1, 3))))
        P = HPolyhedron(dim, rows)
        hit = None
        steps = [Fraction(i, 4) for i in range(-12, 13)]
        for pt in _grid(steps, dim):
            if P.contains(pt):
                hit = pt
                break
        if hit is not None:
            assert feasible(P), (rows, hit)


def _grid(steps, dim):
    if dim == 1:
        for x in steps:
            yield (x,)
    else:
        for rest in _grid(steps, dim - 1):
            for x in steps:
                yield (x,) + rest


def test_lattice_points_unit_square():
    P = HPolyhedron(
        2,
        [((1, 0), LE, 1), ((-1, 0), LE, 0), ((0, 1), LE, 1), ((0, -1), LE, 0)],
    )
    assert lattice_points(P) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_lattice_points_simplex_slices():
    def simplex(total):
        rows = [((1, 1, 1), EQ, total)]
        for j in range(3):
            a = tuple(-1 if t == j else 0 for t in range(3))
            rows.append((a, LE, 0))
        return HPolyhedron(3, rows)

    assert len(lattice_points(simplex(1))) == 3
    assert len(lattice_points(simplex(2))) == 6


def test_lattice_points_symmetric_closure():
    # constraint system symmetric under coordinate swap -> output closed under it
    P = HPolyhedron(2, [((1, 1), LE, 3), ((-1, 0), LE, 0), ((0, -1), LE, 0)])
    pts = set(lattice_points(P))
    assert pts == {(b, a) for a, b in pts}


def test_lattice_points_unbounded():
    P = HPolyhedron(2, [((-1, 0), LE, 0), ((0, -1), LE, 0)])
    with pytest.raises(UnboundedPolyhedronError):
        lattice_points(P)


def test_rational_rank():
    assert rational_rank(RatMatrix([[0, 0], [0, 0]])) == 0
    assert rational_rank(RatMatrix([[1, 1], [1, 1]])) == 1
    # vertex-edge incidence of a triangle
    B = RatMatrix([[-1, -1, 0], [1, 0, -1], [0, 1, 1]])
    assert rational_rank(B) == 2


def test_vertices_affine_dim_sample():
    tri = HPolyhedron(2, [((-1, 0), LE, 0), ((0, -1), LE, 0), ((1, 1), LE, 1)])
    assert polyhedron_vertices(tri) == [
        (Fraction(0), Fraction(0)),
        (Fraction(0), Fraction(1)),
        (Fraction(1), Fraction(0)),
    ]
    assert affine_dim(tri) == 2
    edge = tri.with_rows([((1, 1), EQ, 1)])
    assert affine_dim(edge) == 1
    pt = interior_sample(tri)
    assert tri.contains(pt)
    assert all(tri.contains(v) for v in polyhedron_vertices(tri))


def test_half_open_interior_sample():
    half = HPolyhedron(1, [((1,), LT, 1), ((-1,), LE, 0)])
    pt = interior_sample(half)
    assert Fraction(0) < pt[0] < Fraction(1)
