"""Cube and CW stratifications of the mirror torus and of fiber subtori.

All enumeration happens in one half-open fundamental parallelepiped of the
deck lattice, in exact coordinates.  A point x of the cover is labelled by
the integer vector -floor(ray pairings of x); the stratum of a class is
the set of points whose label maps to that class.  Cells and stratum
components are stored with an explicit lift: a polytope in the coordinates
of the piece's deck lattice basis, together with the integer cell label of
that lift.

Conventions fixed here (and inherited by every pipeline):
  * deck basis = integer_kernel of the dual morphism map, lex-sorted,
    leading sign positive; top cells are oriented by it,
  * lower cells are oriented by their lexicographically smallest spanning
    coordinate subset,
  * every lift is canonicalized so the lex-smallest vertex of its closure
    lies in [0,1)^k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .exactlin import (
    EQ,
    LE,
    LT,
    HPolyhedron,
    IntMatrix,
    affine_dim,
    feasible,
    integer_kernel,
    interior_sample,
    polyhedron_vertices,
    rat_nullspace,
    rat_solve,
    smith_normal_form,
)
from .toricdata import NotInjective, check_injective, class_leq


def _floor(q):
    q = Fraction(q)
    return q.numerator // q.denominator


def _rat_det(rows):
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(rows[0][0])
    total = Fraction(0)
    for j in range(n):
        sub = [r[:j] + r[j + 1 :] for r in rows[1:]]
        total += (-1) ** j * Fraction(rows[0][j]) * _rat_det(sub)
    return total


# ---------------------------------------------------------------------------
# subtorus data


@dataclass(frozen=True)
class SubtorusData:
    """The fiber subtorus of a finite toric morphism, piece by piece.

    Each piece is one connected component: an affine translate of the
    common deck span, recorded by a rational base point.
    """

    dual: IntMatrix                 # f^T : M2 -> M1
    kernel_basis: tuple             # k primitive vectors spanning ker(dual)
    piece_reps: tuple               # coset representatives in M1
    piece_points: tuple             # rational base points, one per piece
    k: int

    @property
    def pieces(self):
        return len(self.piece_points)


def subtorus_data(ses, morphism):
    """Connected components and deck data of the zero fiber of the dual map."""
    check_injective(morphism)
    fdual = morphism.matrix.transpose()
    n1, n2 = fdual.rows, fdual.cols
    if n2 != ses.n:
        raise ValueError("morphism target dimension %d does not match the variety (%d)" % (n2, ses.n))
    basis = integer_kernel(fdual)
    k = n2 - n1
    assert len(basis) == k
    snf = smith_normal_form(fdual)
    diag = snf.diagonal
    assert all(d != 0 for d in diag), "dual map must have full row rank"
    reps = []
    points = []
    for y in product(*(range(d) for d in diag)):
        m = snf.U.apply(y)
        yy = [Fraction(y[i], diag[i]) for i in range(n1)] + [Fraction(0)] * (n2 - n1)
        p = snf.Winv.apply(yy)
        reps.append(tuple(m))
        points.append(tuple(Fraction(x) for x in p))
    return SubtorusData(
        dual=fdual,
        kernel_basis=tuple(basis),
        piece_reps=tuple(reps),
        piece_points=tuple(points),
        k=k,
    )


# ---------------------------------------------------------------------------
# cells and components


@dataclass
class Component:
    """One connected component of a cube stratum: a convex half-open slice."""

    id: int
    piece: int
    alpha: tuple        # cube label of the lift, in Z^{n+k}
    cls: tuple
    dim: int
    poly: HPolyhedron   # half-open, in deck (t-) coordinates
    closure_verts: tuple
    sample_t: tuple
    sample_x: tuple     # ambient M_R coordinates of the sample
    strict_rows: tuple  # (normal, rhs) whose equality locus is removed from the closure


@dataclass
class StratCell:
    """One relatively open cell of the CW stratification, with its lift."""

    id: int
    piece: int
    label: tuple        # integer cell label A of the lift (cube label is -A)
    free: tuple         # coordinates on which the cell is one unit wide
    cls: tuple
    dim: int
    poly: HPolyhedron
    closure_verts: tuple
    sample_t: tuple
    sample_x: tuple
    component: int = -1
    orient: tuple = ()  # ordered direction basis, columns in t-coordinates

    @property
    def alpha(self):
        return tuple(-a for a in self.label)


@dataclass
class StratComplex:
    """Cube components plus the refining CW cells of one ambient space."""

    ses: object
    subtorus: SubtorusData
    ambient: str                   # "torus" or "subtorus"
    k: int                         # dimension of the ambient space
    components: list
    cells: list
    attachments: dict              # cell id -> list of (face id, sign, monomial)
    frames: tuple                  # per piece: (offset o, matrix G)
    deck_basis: tuple              # ambient coordinates of the deck lattice basis

    def cells_of_dim(self, d):
        return [c for c in self.cells if c.dim == d]

    def components_of_class(self, cls):
        return [c for c in self.components if c.cls == tuple(cls)]

    def classes(self):
        return sorted({c.cls for c in self.components})

    def incidence(self, cell_id, face_id):
        return sum(s for f, s, _m in self.attachments.get(cell_id, ()) if f == face_id)

    def boundary_matrices(self):
        """Signed incidence matrices of the quotient complex, degree by degree."""
        by_dim = {}
        for c in self.cells:
            by_dim.setdefault(c.dim, []).append(c.id)
        mats = {}
        for d in sorted(by_dim):
            if d == 0:
                continue
            rows = by_dim.get(d - 1, [])
            cols = by_dim[d]
            idx = {cid: i for i, cid in enumerate(rows)}
            mat = [[0] * len(cols) for _ in rows]
            for j, cid in enumerate(cols):
                for fid, sign, _m in self.attachments.get(cid, ()):
                    mat[idx[fid]][j] += sign
            mats[d] = mat
        return mats


def _slice_rows(o, G, alpha, k, half_open=True):
    """Rows for {t : o + G t in prod [ -alpha_r, -alpha_r + 1 )}."""
    rows = []
    for r in range(len(o)):
        Gr = tuple(G[r])
        lo = -alpha[r] - o[r]         # G_r . t >= lo
        hi = 1 - alpha[r] - o[r]      # G_r . t <  hi
        rows.append((tuple(-x for x in Gr), LE, -lo))
        rows.append((Gr, LT if half_open else LE, hi))
    return rows


def _canonical_shift(verts):
    """Deck shift putting the lex-min vertex of a closure into [0,1)^k."""
    if not verts:
        raise ValueError("no vertices")
    v = min(verts)
    return tuple(_floor(x) for x in v)


class _Builder:
    def __init__(self, ses, morphism=None):
        self.ses = ses
        n = ses.n
        if morphism is None:
            dual = IntMatrix([], cols=n)
            fake = IntMatrix([() for _ in range(n)], cols=0)
            from .toricdata import ToricMorphism

            morphism = ToricMorphism(matrix=fake, source_fan=None)
        self.sub = subtorus_data(ses, morphism)
        self.k = self.sub.k
        self.frames = []
        for p in self.sub.piece_points:
            o = ses.ray_image(p)
            G = [
                tuple(
                    sum(ses.ray_map.entries[r][j] * self.sub.kernel_basis[s][j] for j in range(n))
                    for s in range(self.k)
                )
                for r in range(ses.nrays)
            ]
            self.frames.append((o, tuple(G)))

    # -- coordinates ---------------------------------------------------------

    def to_ambient(self, piece, t):
        p = self.sub.piece_points[piece]
        return tuple(
            p[j] + sum(Fraction(self.sub.kernel_basis[s][j]) * t[s] for s in range(self.k))
            for j in range(self.ses.n)
        )

    def label_at(self, piece, t):
        o, G = self.frames[piece]
        vals = [o[r] + sum(Fraction(G[r][s]) * t[s] for s in range(self.k)) for r in range(self.ses.nrays)]
        return tuple(-_floor(v) for v in vals)

    def value_ranges(self, piece):
        o, G = self.frames[piece]
        lo, hi = [], []
        for r in range(self.ses.nrays):
            lo.append(o[r] + sum(min(0, G[r][s]) for s in range(self.k)))
            hi.append(o[r] + sum(max(0, G[r][s]) for s in range(self.k)))
        return lo, hi

    # -- cube components -----------------------------------------------------

    def components(self):
        out = []
        seen = set()
        for piece in range(self.sub.pieces):
            o, G = self.frames[piece]
            lo, hi = self.value_ranges(piece)
            ranges = [range(_floor(l), _floor(h) + 1) for l, h in zip(lo, hi)]
            for cvals in product(*ranges):
                alpha = tuple(-c for c in cvals)
                rows = _slice_rows(o, G, alpha, self.k)
                poly = HPolyhedron(self.k, rows)
                if not feasible(poly):
                    continue
                verts = polyhedron_vertices(poly)
                shift = _canonical_shift(verts)
                Gs = tuple(sum(G[r][s] * shift[s] for s in range(self.k)) for r in range(self.ses.nrays))
                alpha_c = tuple(a + g for a, g in zip(alpha, Gs))
                key = (piece, alpha_c)
                if key in seen:
                    continue
                seen.add(key)
                rows_c = _slice_rows(o, G, alpha_c, self.k)
                poly_c = HPolyhedron(self.k, rows_c)
                verts_c = polyhedron_vertices(poly_c)
                sample = interior_sample(poly_c)
                strict = []
                for r in range(self.ses.nrays):
                    Gr = G[r]
                    if any(Gr):
                        strict.append((tuple(Fraction(x) for x in Gr), 1 - alpha_c[r] - o[r]))
                comp = Component(
                    id=-1,
                    piece=piece,
                    alpha=alpha_c,
                    cls=self.ses.class_of(alpha_c),
                    dim=affine_dim(poly_c),
                    poly=poly_c,
                    closure_verts=tuple(verts_c),
                    sample_t=sample,
                    sample_x=self.to_ambient(piece, sample),
                    strict_rows=tuple(strict),
                )
                assert self.label_at(piece, sample) == alpha_c
                out.append(comp)
        out.sort(key=lambda c: (c.cls, c.piece, c.alpha))
        for i, c in enumerate(out):
            c.id = i
        return out

    # -- CW cells ------------------------------------------------------------

    def cell_poly(self, piece, label, free, half_open_closed="open"):
        """Polyhedron of the cell with lift label A and free coordinate set."""
        o, G = self.frames[piece]
        rows = []
        for r in range(self.ses.nrays):
            Gr = tuple(G[r])
            if not any(Gr):
                continue
            if r in free:
                rows.append((tuple(-x for x in Gr), LT if half_open_closed == "open" else LE, o[r] - label[r]))
                rows.append((Gr, LT if half_open_closed == "open" else LE, label[r] + 1 - o[r]))
            else:
                rows.append((Gr, EQ, label[r] - o[r]))
        return HPolyhedron(self.k, rows)

    def correct_profile(self, piece, label, free):
        """Detect forced low/high walls and return the honest (label, free)."""
        label = list(label)
        free = set(free)
        poly = self.cell_poly(piece, label, free, "closed")
        o, G = self.frames[piece]
        for r in sorted(free):
            Gr = G[r]
            if not any(Gr):
                continue
            above_low = (tuple(-Fraction(x) for x in Gr), LT, Fraction(o[r] - label[r]))
            below_high = (tuple(Fraction(x) for x in Gr), LT, Fraction(label[r] + 1 - o[r]))
            if not feasible(poly.with_rows([above_low])):
                free.discard(r)
                poly = self.cell_poly(piece, label, free, "closed")
            elif not feasible(poly.with_rows([below_high])):
                label[r] += 1
                free.discard(r)
                poly = self.cell_poly(piece, label, free, "closed")
        return tuple(label), frozenset(free)

    def canonical_cell(self, piece, label, free):
        """Canonical deck representative of a cell profile, plus the shift used."""
        o, G = self.frames[piece]
        poly = self.cell_poly(piece, label, free, "closed")
        verts = polyhedron_vertices(poly)
        shift = _canonical_shift(verts)
        Gs = tuple(sum(G[r][s] * shift[s] for s in range(self.k)) for r in range(self.ses.nrays))
        # translating a cell by -shift moves its lift label by -G*shift
        return (piece, tuple(a - g for a, g in zip(label, Gs)), free), shift

    def profile_faces(self, piece, label, free):
        """All proper faces of the closed cell, as corrected profiles in the same frame."""
        o, G = self.frames[piece]
        active = [r for r in sorted(free) if any(G[r])]
        faces = {}
        for assignment in product((0, -1, 1), repeat=len(active)):
            if not any(assignment):
                continue
            lab = list(label)
            fr = set(free)
            for r, a in zip(active, assignment):
                if a == 0:
                    continue
                fr.discard(r)
                if a == 1:
                    lab[r] += 1
            poly = self.cell_poly(piece, tuple(lab), fr, "closed")
            if not feasible(poly):
                continue
            lab2, fr2 = self.correct_profile(piece, tuple(lab), fr)
            faces[(tuple(lab2), fr2)] = None
        return list(faces.keys())

    # -- assembly ------------------------------------------------------------

    def build(self):
        comps = self.components()
        seen = set()
        order = []
        stack = []

        def register(piece, label, free):
            key, _shift = self.canonical_cell(piece, label, free)
            if key not in seen:
                seen.add(key)
                order.append(key)
                stack.append(key)

        for comp in comps:
            if comp.dim < self.k:
                continue
            o, G = self.frames[comp.piece]
            label = tuple(-a for a in comp.alpha)
            free = frozenset(r for r in range(self.ses.nrays) if any(G[r]) or _floor(o[r]) != o[r])
            label, free = self.correct_profile(comp.piece, label, free)
            register(comp.piece, label, free)
        while stack:
            piece, lab, fr = stack.pop()
            for lab2, fr2 in self.profile_faces(piece, lab, fr):
                register(piece, lab2, fr2)

        # instantiate cells deterministically
        objs = []
        for piece, label, free in order:
            poly = self.cell_poly(piece, label, free, "open")
            cl = self.cell_poly(piece, label, free, "closed")
            verts = polyhedron_vertices(cl)
            sample = interior_sample(cl)
            objs.append(
                StratCell(
                    id=-1,
                    piece=piece,
                    label=label,
                    free=free,
                    cls=self.ses.class_of(tuple(-a for a in label)),
                    dim=affine_dim(cl),
                    poly=poly,
                    closure_verts=tuple(verts),
                    sample_t=sample,
                    sample_x=self.to_ambient(piece, sample),
                )
            )
        objs.sort(key=lambda c: (-c.dim, c.cls, c.piece, c.label, tuple(sorted(c.free))))
        index = {}
        for i, c in enumerate(objs):
            c.id = i
            index[(c.piece, c.label, c.free)] = i

        comp_index = {(c.piece, c.alpha): c.id for c in comps}
        for c in objs:
            c.component = self.component_of_cell(c, comp_index)
            c.orient = self.orientation(c)

        attachments = {}
        for c in objs:
            if c.dim == 0:
                continue
            rows = []
            for lab2, fr2 in self.profile_faces(c.piece, c.label, c.free):
                dim2 = affine_dim(self.cell_poly(c.piece, lab2, fr2, "closed"))
                if dim2 != c.dim - 1:
                    continue
                canon, _shift = self.canonical_cell(c.piece, lab2, fr2)
                fid = index[canon]
                mono = tuple(b - a for a, b in zip(c.label, lab2))
                assert all(m >= 0 for m in mono)
                sign = self.attach_sign(c, (c.piece, lab2, fr2), objs[fid])
                rows.append((fid, sign, mono))
            rows.sort(key=lambda t: (t[0], t[2]))
            attachments[c.id] = rows

        return StratComplex(
            ses=self.ses,
            subtorus=self.sub,
            ambient="torus" if self.sub.dual.rows == 0 and self.k == self.ses.n else "subtorus",
            k=self.k,
            components=comps,
            cells=objs,
            attachments=attachments,
            frames=tuple(self.frames),
            deck_basis=self.sub.kernel_basis,
        )

    def component_of_cell(self, cell, comp_index):
        o, G = self.frames[cell.piece]
        alpha = self.label_at(cell.piece, cell.sample_t)
        rows = _slice_rows(o, G, alpha, self.k)
        poly = HPolyhedron(self.k, rows)
        verts = polyhedron_vertices(poly)
        shift = _canonical_shift(verts)
        Gs = tuple(sum(G[r][s] * shift[s] for s in range(self.k)) for r in range(self.ses.nrays))
        alpha_c = tuple(a + g for a, g in zip(alpha, Gs))
        return comp_index[(cell.piece, alpha_c)]

    def orientation(self, cell):
        """Ordered direction basis: top cells use the deck basis order, lower
        cells their lex-smallest spanning coordinate subset."""
        if cell.dim == 0:
            return ()
        o, G = self.frames[cell.piece]
        tight = [G[r] for r in range(self.ses.nrays) if r not in cell.free and any(G[r])]
        null = rat_nullspace([[Fraction(x) for x in row] for row in tight], self.k)
        d = cell.dim
        assert len(null) == d
        if d == self.k:
            return tuple(tuple(Fraction(1 if i == j else 0) for i in range(self.k)) for j in range(self.k))
        from itertools import combinations

        K = [list(v) for v in null]  # rows = basis vectors
        for S in combinations(range(self.k), d):
            sub = [[K[i][s] for s in S] for i in range(d)]
            if _rat_det(sub) != 0:
                sol = []
                for j in range(d):
                    rhs = [Fraction(1 if t == j else 0) for t in range(d)]
                    coeffs = rat_solve([list(r) for r in zip(*sub)], d, rhs)
                    vec = tuple(
                        sum(coeffs[i] * K[i][t] for i in range(d)) for t in range(self.k)
                    )
                    sol.append(vec)
                return tuple(sol)
        raise AssertionError("no spanning coordinate subset found")

    def attach_sign(self, cell, face_lift, face_cell):
        """Incidence degree: outward-first determinant convention."""
        piece, lab2, fr2 = face_lift
        cl = self.cell_poly(piece, lab2, fr2, "closed")
        fsample = interior_sample(cl)
        u = tuple(a - b for a, b in zip(fsample, cell.sample_t))
        cols = [u] + [list(v) for v in face_cell.orient]
        # express [u | face basis] in the cell's basis
        B = [list(v) for v in cell.orient]  # rows = basis vectors
        M = []
        for col in cols:
            coeffs = rat_solve([list(r) for r in zip(*B)], cell.dim, list(col))
            assert coeffs is not None, "face direction not inside cell direction space"
            M.append(list(coeffs))
        det = _rat_det([list(r) for r in zip(*M)])
        assert det != 0
        return 1 if det > 0 else -1


def build_strata(ses, morphism=None):
    return _Builder(ses, morphism).build()


def cube_strata(ses, morphism=None):
    """Cube stratification: the convex stratum components, with CW refinement attached."""
    return build_strata(ses, morphism)


def cw_strata(ses, morphism=None):
    """CW stratification: relatively open cells with signed incidence."""
    return build_strata(ses, morphism)


# ---------------------------------------------------------------------------
# derived queries


def bondal_classes(ses):
    """Classes with nonempty cube stratum, sorted by poset order then lex."""
    complex_ = build_strata(ses, None)
    classes = sorted({c.cls for c in complex_.components})
    out = []
    remaining = list(classes)
    while remaining:
        minimal = [
            c
            for c in remaining
            if not any(d != c and class_leq(d, c, ses) for d in remaining)
        ]
        pick = min(minimal)
        out.append(pick)
        remaining.remove(pick)
    return out


def exit_space(item, complex_):
    """Closed exit region of the item's lift, in ambient M_R coordinates."""
    return _reachability_space(item, complex_, "exit")


def entrance_space(item, complex_):
    """Open entrance region of the item's lift, in ambient M_R coordinates."""
    return _reachability_space(item, complex_, "entrance")


def _reachability_space(item, complex_, kind):
    ses = complex_.ses
    alpha = item.alpha
    rows = []
    for r in range(ses.nrays):
        ray = ses.ray_map.entries[r]
        if kind == "exit":
            rows.append((tuple(-x for x in ray), LE, alpha[r]))
        else:
            rows.append((tuple(ray), LT, 1 - alpha[r]))
    if complex_.ambient == "subtorus":
        rep = complex_.subtorus.piece_reps[item.piece]
        for i in range(complex_.subtorus.dual.rows):
            rows.append((complex_.subtorus.dual.entries[i], EQ, rep[i]))
    return HPolyhedron(ses.n, rows)


def write_plot_data(complex_, path):
    """Line-based plot data: one `cell` line per cell with closure vertices."""
    lines = ["# toricres plot data: cell id dim class component vertices(ambient)"]
    for c in complex_.cells:
        verts = [
            ",".join(str(x) for x in _to_ambient(complex_, c.piece, v))
            for v in c.closure_verts
        ]
        lines.append(
            "cell %d dim %d class %s component %d verts %s"
            % (c.id, c.dim, ":".join(str(x) for x in c.cls), c.component, " ".join(verts))
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _to_ambient(complex_, piece, t):
    p = complex_.subtorus.piece_points[piece]
    basis = complex_.subtorus.kernel_basis
    n = complex_.ses.n
    return tuple(
        p[j] + sum(Fraction(basis[s][j]) * t[s] for s in range(len(basis))) for j in range(n)
    )
