"""Reduced cohomology of polytopal complexes and H_c of half-open strata.

A stratum component is a convex half-open polytope X = C \\ F with C its
(compact, contractible) closure and F the closed union of faces cut out by
the strict constraint walls.  Compactly supported cohomology then reduces
to reduced cohomology of F one degree down, which is computed exactly from
a pulling triangulation.

Coefficients are rational throughout.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .exactlin import EQ, LE, LT, rat_rank
from .strata import bondal_classes


class NotClosedUnderFaces(ValueError):
    pass


class UnknownClass(ValueError):
    pass


class BoundaryCompositionNonzero(ValueError):
    pass


class BettiVector(dict):
    """Finitely supported degree -> dimension map."""

    def __missing__(self, key):
        return 0

    def trimmed(self):
        return BettiVector({d: v for d, v in sorted(self.items()) if v})

    def as_tuple(self, top):
        return tuple(self[d] for d in range(top + 1))

    def add(self, other):
        for d, v in other.items():
            self[d] = self[d] + v
        return self


# ---------------------------------------------------------------------------
# polytopal collections


def _affine_rank(points):
    if not points:
        return -1
    base = points[0]
    rows = [[Fraction(x) - Fraction(b) for x, b in zip(p, base)] for p in points[1:]]
    if not rows:
        return 0
    return rat_rank(rows, len(base))


class PolytopalCollection:
    """A finite set of polytopal cells with a shared vertex registry.

    Cells are keyed by frozensets of vertex ids; the face relation is
    recorded explicitly when cells are inserted from a polytope.
    """

    def __init__(self):
        self._vid = {}
        self.points = []
        self.cells = {}
        self.faces_of = {}

    def vertex_id(self, point):
        point = tuple(Fraction(x) for x in point)
        if point not in self._vid:
            self._vid[point] = len(self.points)
            self.points.append(point)
        return self._vid[point]

    def add_cell(self, points, faces=()):
        key = frozenset(self.vertex_id(p) for p in points)
        dim = _affine_rank([self.points[i] for i in key])
        self.cells[key] = dim
        self.faces_of.setdefault(key, set()).update(faces)
        return key

    def add_polytope(self, verts, rows):
        """Insert a closed polytope and all of its faces.

        verts: the vertex list; rows: closed H-rows (LE or EQ) cutting it.
        Returns the key of the full cell.
        """
        verts = [tuple(Fraction(x) for x in v) for v in verts]
        if not verts:
            raise ValueError("polytope with no vertices")
        face_sets = _polytope_face_sets(verts, rows)
        keys = {}
        for fs in sorted(face_sets, key=lambda s: (len(s), sorted(s))):
            pts = [verts[i] for i in sorted(fs)]
            keys[fs] = self.add_cell(pts)
        # face relation: strict subset with dimension one less
        for fs, key in keys.items():
            d = self.cells[key]
            for gs, gkey in keys.items():
                if gs < fs and self.cells[gkey] == d - 1:
                    self.faces_of[key].add(gkey)
        return keys[frozenset(range(len(verts)))]

    def subcollection(self, keys):
        sub = PolytopalCollection()
        sub._vid = self._vid
        sub.points = self.points
        sub.cells = {k: self.cells[k] for k in keys}
        sub.faces_of = {k: set(self.faces_of.get(k, ())) for k in keys}
        return sub

    def check_closed(self):
        for key in self.cells:
            for face in self.faces_of.get(key, ()):
                if face not in self.cells:
                    raise NotClosedUnderFaces("cell %r is missing a face" % (sorted(key),))

    def facets(self, key):
        d = self.cells[key]
        return [f for f in self.faces_of.get(key, ()) if self.cells.get(f) == d - 1]


def _polytope_face_sets(verts, rows):
    """All faces of a polytope as vertex index sets (tight-set closure)."""
    n = len(verts)
    full = frozenset(range(n))
    facets = set()
    for a, rel, b in rows:
        if rel == LT:
            raise ValueError("face enumeration expects closed rows")
        tight = frozenset(
            i for i, v in enumerate(verts) if sum(Fraction(x) * c for x, c in zip(v, a)) == Fraction(b)
        )
        if tight and tight != full:
            facets.add(tight)
    faces = {full} | facets
    frontier = set(facets)
    while frontier:
        new = set()
        for f in frontier:
            for g in facets:
                h = f & g
                if h and h not in faces:
                    new.add(h)
        faces |= new
        frontier = new
    return faces


def polytope_collection(verts, rows):
    col = PolytopalCollection()
    col.add_polytope(verts, rows)
    return col


def points_collection(points):
    col = PolytopalCollection()
    for p in points:
        col.add_cell([p])
    return col


# ---------------------------------------------------------------------------
# triangulation and simplicial homology


def pulling_triangulation(col):
    """Top simplices of every cell, pulled from each cell's least vertex.

    Using the global vertex order makes the triangulations of shared faces
    agree, so the union over any subcollection is a simplicial complex.
    """
    memo = {}

    def tri(key):
        if key in memo:
            return memo[key]
        d = col.cells[key]
        vs = sorted(key)
        if len(vs) == d + 1:
            memo[key] = [tuple(vs)]
            return memo[key]
        v0 = vs[0]
        out = []
        for facet in sorted(col.facets(key), key=sorted):
            if v0 in facet:
                continue
            for s in tri(facet):
                out.append(tuple(sorted((v0,) + s)))
        assert out, "cell with no pulled facets"
        memo[key] = sorted(set(out))
        return memo[key]

    simplices = set()
    for key in col.cells:
        for s in tri(key):
            for r in range(1, len(s) + 1):
                for sub in combinations(s, r):
                    simplices.add(sub)
    by_dim = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(s)
    return {d: sorted(v) for d, v in sorted(by_dim.items())}


def _simplicial_boundaries(by_dim):
    mats = {}
    for d in by_dim:
        if d == 0:
            continue
        rows = {s: i for i, s in enumerate(by_dim.get(d - 1, []))}
        mat = [[0] * len(by_dim[d]) for _ in rows]
        for j, s in enumerate(by_dim[d]):
            for t in range(len(s)):
                face = s[:t] + s[t + 1 :]
                mat[rows[face]][j] = (-1) ** t
        mats[d] = mat
    return mats


def reduced_homology_dims(col):
    """Reduced rational homology dimensions of the union of cells."""
    col.check_closed()
    if not col.cells:
        return BettiVector()
    by_dim = pulling_triangulation(col)
    mats = _simplicial_boundaries(by_dim)
    out = BettiVector()
    top = max(by_dim)
    for d in range(top + 1):
        nd = len(by_dim.get(d, []))
        if nd == 0:
            continue
        if d == 0:
            rank_d = 1  # augmentation to the ground field
        else:
            rank_d = rat_rank(mats[d], nd)
        rank_up = rat_rank(mats[d + 1], len(by_dim[d + 1])) if d + 1 in mats else 0
        out[d] = nd - rank_d - rank_up
    return out.trimmed()


def reduced_cohomology(col):
    """Reduced rational cohomology dimensions (equal to homology over Q)."""
    return reduced_homology_dims(col)


# ---------------------------------------------------------------------------
# chain complexes by hand


class CellChainComplex:
    """Bases per degree plus signed boundary matrices (degree t -> t-1)."""

    def __init__(self, bases, boundaries):
        self.bases = {d: list(b) for d, b in bases.items()}
        self.boundaries = {d: [list(r) for r in m] for d, m in boundaries.items()}
        self._check()

    def _check(self):
        for d, B in self.boundaries.items():
            A = self.boundaries.get(d - 1)
            if not A or not B or not B[0]:
                continue
            for i in range(len(A)):
                for j in range(len(B[0])):
                    s = sum(A[i][t] * B[t][j] for t in range(len(B)))
                    if s != 0:
                        raise BoundaryCompositionNonzero(
                            "d² != 0 between degrees %d and %d" % (d, d - 2)
                        )


def homology_ranks(K):
    """Exact rational homology dimensions per degree."""
    out = BettiVector()
    for d, basis in K.bases.items():
        nd = len(basis)
        if nd == 0:
            continue
        down = K.boundaries.get(d)
        up = K.boundaries.get(d + 1)
        rank_down = rat_rank(down, nd) if down else 0
        rank_up = rat_rank(up, len(up[0])) if up and up[0] else 0
        out[d] = nd - rank_down - rank_up
    return out.trimmed()


def complex_from_strata(sc):
    """CellChainComplex of a StratComplex's signed quotient incidence."""
    by_dim = {}
    for c in sc.cells:
        by_dim.setdefault(c.dim, []).append(c.id)
    mats = sc.boundary_matrices()
    return CellChainComplex(by_dim, mats)


# ---------------------------------------------------------------------------
# compactly supported cohomology


def hc_half_open(C, F):
    """H_c of C \\ F for C one compact contractible polytope, F in its boundary.

    H^0_c = 1 iff nothing is removed; H^i_c = reduced H^{i-1}(F) for i >= 1.
    """
    C.check_closed()
    F.check_closed()
    for key in F.cells:
        if key not in C.cells:
            raise ValueError("removed cells must be faces of the closure")
    out = BettiVector()
    if not F.cells:
        out[0] = 1
        return out
    red = reduced_homology_dims(F)
    for d, v in red.items():
        out[d + 1] = v
    return out.trimmed()


def component_closure_collection(comp):
    """Face collection of a component's closure, plus its removed subcomplex."""
    closure = comp.poly.closure()
    col = PolytopalCollection()
    col.add_polytope(comp.closure_verts, closure.rows)
    removed = []
    for key in col.cells:
        pts = [col.points[i] for i in key]
        for normal, rhs in comp.strict_rows:
            if all(sum(n * x for n, x in zip(normal, p)) == rhs for p in pts):
                removed.append(key)
                break
    return col, col.subcollection(removed)


def hc_component(comp):
    C, F = component_closure_collection(comp)
    return hc_half_open(C, F)


def hc_stratum(cls, V):
    """Sum of H_c over the connected components of one stratum of V."""
    cls = tuple(cls)
    comps = V.components_of_class(cls)
    if not comps:
        if cls not in bondal_classes(V.ses):
            raise UnknownClass("class %r has no stratum" % (cls,))
        return BettiVector()
    out = BettiVector()
    for comp in comps:
        out.add(hc_component(comp))
    return out.trimmed()
