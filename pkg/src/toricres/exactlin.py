"""Exact integer and rational linear algebra, plus polyhedral feasibility.

Everything in the engine runs on ints and Fractions; there is no floating
point and no tolerance anywhere.  Strict inequalities are first-class
citizens of the polyhedron type because the geometry downstream is built
from half-open cubes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


class UnboundedPolyhedronError(ValueError):
    """Lattice point enumeration needs a bounded polyhedron."""


# relations used in H-polyhedra, "a . x REL b"
LE = "<="
LT = "<"
EQ = "="
_RELS = (LE, LT, EQ)


# ---------------------------------------------------------------------------
# matrices


class IntMatrix:
    """Arbitrary-precision integer matrix, immutable by convention."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries, cols=None):
        entries = tuple(tuple(int(x) for x in row) for row in entries)
        if entries:
            widths = {len(row) for row in entries}
            if len(widths) != 1:
                raise ValueError("ragged matrix")
            width = widths.pop()
            if cols is not None and cols != width:
                raise ValueError("declared cols do not match row width")
            cols = width
        elif cols is None:
            cols = 0
        self.entries = entries
        self.rows = len(entries)
        self.cols = cols

    @classmethod
    def identity(cls, n):
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, rows, cols):
        return cls(tuple((0,) * cols for _ in range(rows)), cols=cols)

    def transpose(self):
        return IntMatrix(
            tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)),
            cols=self.rows,
        )

    def mul(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        oe = other.entries
        return IntMatrix(
            tuple(
                tuple(sum(self.entries[i][t] * oe[t][j] for t in range(self.cols)) for j in range(other.cols))
                for i in range(self.rows)
            ),
            cols=other.cols,
        )

    def apply(self, vec):
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(row[j] * vec[j] for j in range(self.cols)) for row in self.entries)

    def column(self, j):
        return tuple(row[j] for row in self.entries)

    def __eq__(self, other):
        return (
            isinstance(other, IntMatrix)
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.cols, self.entries))

    def __repr__(self):
        return "IntMatrix(%r)" % (list(map(list, self.entries)),)


class RatMatrix:
    """Rational matrix; entries normalized Fractions."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries, cols=None):
        entries = tuple(tuple(Fraction(x) for x in row) for row in entries)
        if entries:
            widths = {len(row) for row in entries}
            if len(widths) != 1:
                raise ValueError("ragged matrix")
            width = widths.pop()
            if cols is not None and cols != width:
                raise ValueError("declared cols do not match row width")
            cols = width
        elif cols is None:
            cols = 0
        self.entries = entries
        self.rows = len(entries)
        self.cols = cols

    def apply(self, vec):
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(row[j] * Fraction(vec[j]) for j in range(self.cols)) for row in self.entries)

    def __eq__(self, other):
        return (
            isinstance(other, RatMatrix)
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __repr__(self):
        return "RatMatrix(%r)" % (list(map(list, self.entries)),)


def _as_int_matrix(A):
    return A if isinstance(A, IntMatrix) else IntMatrix(A)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """A = U * D * W with U, W unimodular and D diagonal with a divisibility chain."""

    U: IntMatrix
    D: IntMatrix
    W: IntMatrix
    Uinv: IntMatrix
    Winv: IntMatrix

    @property
    def diagonal(self):
        n = min(self.D.rows, self.D.cols)
        return tuple(self.D.entries[i][i] for i in range(n))

    @property
    def rank(self):
        return sum(1 for d in self.diagonal if d != 0)


def _det(rows):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
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
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(A):
    """Smith normal form with all four transformation matrices.

    Deterministic: pivot is the smallest nonzero absolute value, ties
    broken row-major.
    """
    A = _as_int_matrix(A)
    r, c = A.rows, A.cols
    M = [list(row) for row in A.entries]
    U = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    Uinv = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    W = [[1 if i == j else 0 for j in range(c)] for i in range(c)]
    Winv = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    # invariant throughout: A == U * M * W

    def row_swap(i, k):
        if i == k:
            return
        M[i], M[k] = M[k], M[i]
        for a in range(r):
            U[a][i], U[a][k] = U[a][k], U[a][i]
        Uinv[i], Uinv[k] = Uinv[k], Uinv[i]

    def row_add(k, i, t):
        # row_k += t * row_i
        if t == 0:
            return
        Mk, Mi = M[k], M[i]
        for j in range(c):
            Mk[j] += t * Mi[j]
        for a in range(r):
            U[a][i] -= t * U[a][k]
        Uk, Ui = Uinv[k], Uinv[i]
        for j in range(r):
            Uk[j] += t * Ui[j]

    def row_negate(i):
        M[i] = [-x for x in M[i]]
        for a in range(r):
            U[a][i] = -U[a][i]
        Uinv[i] = [-x for x in Uinv[i]]

    def col_swap(j, k):
        if j == k:
            return
        for i in range(r):
            M[i][j], M[i][k] = M[i][k], M[i][j]
        W[j], W[k] = W[k], W[j]
        for i in range(c):
            Winv[i][j], Winv[i][k] = Winv[i][k], Winv[i][j]

    def col_add(k, j, t):
        # col_k += t * col_j
        if t == 0:
            return
        for i in range(r):
            M[i][k] += t * M[i][j]
        Wj, Wk = W[j], W[k]
        for b in range(c):
            Wj[b] -= t * Wk[b]
        for i in range(c):
            Winv[i][k] += t * Winv[i][j]

    def pivot_at(t):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                v = abs(M[i][j])
                if v and (best is None or v < best[0]):
                    best = (v, i, j)
        return best

    t = 0
    while t < min(r, c):
        best = pivot_at(t)
        if best is None:
            break
        row_swap(t, best[1])
        col_swap(t, best[2])
        while True:
            redo = False
            for i in range(t + 1, r):
                if M[i][t]:
                    q = M[i][t] // M[t][t]
                    row_add(i, t, -q)
                    if M[i][t]:
                        row_swap(t, i)
                        redo = True
                        break
            if redo:
                continue
            for j in range(t + 1, c):
                if M[t][j]:
                    q = M[t][j] // M[t][t]
                    col_add(j, t, -q)
                    if M[t][j]:
                        col_swap(t, j)
                        redo = True
                        break
            if redo:
                continue
            off = None
            for i in range(t + 1, r):
                for j in range(t + 1, c):
                    if M[i][j] % M[t][t]:
                        off = j
                        break
                if off is not None:
                    break
            if off is None:
                break
            col_add(t, off, 1)
        if M[t][t] < 0:
            row_negate(t)
        t += 1

    snf = SmithDecomposition(
        U=IntMatrix(U, cols=r),
        D=IntMatrix(M, cols=c),
        W=IntMatrix(W, cols=c),
        Uinv=IntMatrix(Uinv, cols=r),
        Winv=IntMatrix(Winv, cols=c),
    )
    assert snf.U.mul(snf.D).mul(snf.W) == A
    assert abs(_det(snf.U.entries)) == 1 and abs(_det(snf.W.entries)) == 1
    return snf


def _sign_normalize(vec):
    lead = next((x for x in vec if x != 0), 0)
    return tuple(-x for x in vec) if lead < 0 else tuple(vec)


def integer_kernel(A):
    """Saturated basis of {x in Z^m : A x = 0}, lexicographically sorted."""
    A = _as_int_matrix(A)
    snf = smith_normal_form(A)
    diag = snf.diagonal
    basis = []
    for j in range(A.cols):
        if j >= len(diag) or diag[j] == 0:
            basis.append(_sign_normalize(snf.Winv.column(j)))
    return sorted(basis)


def hermite_rows(rows, cols):
    """Row-style Hermite normal form of an integer matrix (zero rows dropped).

    Canonical: pivots positive, entries above each pivot reduced into
    [0, pivot).  The row span is unchanged.
    """
    m = [list(r) for r in rows if any(r)]
    res = []
    col = 0
    while m and col < cols:
        live = [r for r in m if r[col] != 0]
        if not live:
            col += 1
            continue
        while True:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            done = True
            for r in live[1:]:
                q = r[col] // piv[col]
                for j in range(cols):
                    r[j] -= q * piv[j]
                if r[col]:
                    done = False
            live = [piv] + [r for r in live[1:] if r[col] != 0]
            if done or len(live) == 1:
                break
        if piv[col] < 0:
            piv[:] = [-x for x in piv]
        res.append(piv)
        m = [r for r in m if r is not piv and any(r)]
        col += 1
    # reduce entries above pivots
    pivots = []
    for r in res:
        j = next(i for i, x in enumerate(r) if x)
        pivots.append(j)
    for i in range(len(res)):
        for k in range(i + 1, len(res)):
            j = pivots[k]
            if res[k][j]:
                q = res[i][j] // res[k][j]
                for t in range(cols):
                    res[i][t] -= q * res[k][t]
    return [tuple(r) for r in res]


@dataclass(frozen=True)
class CokernelProjection:
    """Surjection Z^m -> Z^free_rank (+ torsion) with kernel = column span."""

    free_rank: int
    torsion: tuple
    free_map: IntMatrix
    torsion_map: IntMatrix
    torsion_moduli: tuple

    def project(self, vec):
        free = self.free_map.apply(vec)
        tors = tuple(
            sum(row[j] * vec[j] for j in range(len(vec))) % d
            for row, d in zip(self.torsion_map.entries, self.torsion_moduli)
        )
        return free, tors


def cokernel_projection(A):
    """Cokernel of the map Z^c -> Z^r given by the columns of A."""
    A = _as_int_matrix(A)
    snf = smith_normal_form(A)
    diag = snf.diagonal
    rank = sum(1 for d in diag if d != 0)
    free_rows = [snf.Uinv.entries[i] for i in range(rank, A.rows)]
    free_rows = hermite_rows(free_rows, A.rows)
    torsion = tuple(d for d in diag if d > 1)
    torsion_rows = tuple(snf.Uinv.entries[i] for i, d in enumerate(diag) if d > 1)
    return CokernelProjection(
        free_rank=A.rows - rank,
        torsion=torsion,
        free_map=IntMatrix(free_rows, cols=A.rows),
        torsion_map=IntMatrix(torsion_rows, cols=A.rows),
        torsion_moduli=torsion,
    )


def integer_section(P):
    """Integer right inverse S of a surjective integer matrix P (P*S = I)."""
    P = _as_int_matrix(P)
    snf = smith_normal_form(P)
    if any(d != 1 for d in snf.diagonal) or snf.rank != P.rows:
        raise ValueError("matrix is not surjective over Z")
    k = P.rows
    sel = IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(P.cols)), cols=k)
    S = snf.Winv.mul(sel).mul(snf.Uinv)
    assert P.mul(S) == IntMatrix.identity(k)
    return S


# ---------------------------------------------------------------------------
# rational elimination


def rat_rref(rows, cols):
    """Reduced row echelon form over Q.  Returns (rref rows, pivot columns)."""
    m = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    rank = 0
    for col in range(cols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [x * inv for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        pivots.append(col)
        rank += 1
    return m[:rank], pivots


def rat_rank(rows, cols=None):
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    if cols is None:
        cols = len(rows[0])
    return len(rat_rref(rows, cols)[0])


def rational_rank(A):
    """Exact rank over Q."""
    if isinstance(A, (IntMatrix, RatMatrix)):
        return rat_rank(A.entries, A.cols)
    return rat_rank(A)


def rat_nullspace(rows, cols):
    """Deterministic basis of the right nullspace over Q (rref convention)."""
    rref, pivots = rat_rref(rows, cols)
    free = [j for j in range(cols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -rref[i][f]
        basis.append(tuple(v))
    return basis


def rat_solve(rows, cols, rhs):
    """One exact solution of A x = rhs, or None if inconsistent."""
    aug = [list(r) + [Fraction(b)] for r, b in zip(rows, rhs)]
    rref, pivots = rat_rref(aug, cols + 1)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for i, p in enumerate(pivots):
        x[p] = rref[i][cols]
    return tuple(x)


def rat_in_span(basis, cols, vec):
    """Is vec in the row span of basis?"""
    r0 = rat_rank(basis, cols)
    return rat_rank(list(basis) + [list(vec)], cols) == r0


# ---------------------------------------------------------------------------
# H-polyhedra, Fourier-Motzkin style


class HPolyhedron:
    """Rational polyhedron given by rows (a, rel, b) meaning a.x REL b.

    rel is one of "<=", "<", "=".  Emptiness is a query, not an invariant.
    """

    __slots__ = ("dim", "rows")

    def __init__(self, dim, rows):
        self.dim = int(dim)
        canon = []
        for a, rel, b in rows:
            if rel not in _RELS:
                raise ValueError("bad relation %r" % (rel,))
            a = tuple(Fraction(x) for x in a)
            if len(a) != self.dim:
                raise ValueError("normal has wrong dimension")
            canon.append((a, rel, Fraction(b)))
        self.rows = tuple(canon)

    def closure(self):
        return HPolyhedron(self.dim, [(a, LE if rel == LT else rel, b) for a, rel, b in self.rows])

    def with_rows(self, extra):
        return HPolyhedron(self.dim, list(self.rows) + list(extra))

    def contains(self, point, closed=False):
        for a, rel, b in self.rows:
            v = sum(ai * Fraction(x) for ai, x in zip(a, point))
            if rel == EQ and v != b:
                return False
            if rel == LE and v > b:
                return False
            if rel == LT and (v >= b if not closed else v > b):
                return False
        return True

    def __repr__(self):
        return "HPolyhedron(dim=%d, rows=%d)" % (self.dim, len(self.rows))


def _canon_ineq(a, rel, b):
    """Scale to primitive integer data; canonical row key."""
    denoms = [Fraction(x).denominator for x in a] + [Fraction(b).denominator]
    L = 1
    for d in denoms:
        L = L * d // gcd(L, d)
    ai = [int(Fraction(x) * L) for x in a]
    bi = int(Fraction(b) * L)
    g = 0
    for x in ai:
        g = gcd(g, abs(x))
    g = gcd(g, abs(bi))
    if g > 1:
        ai = [x // g for x in ai]
        bi = bi // g
    return (tuple(ai), rel, bi)


def _eliminate_equalities(rows, dim):
    """Substitute equality rows away.  Returns (ineq rows, ok) with ok False on contradiction."""
    rows = [list(_canon_ineq(*r)) for r in rows]
    changed = True
    while changed:
        changed = False
        eq_idx = next(
            (i for i, r in enumerate(rows) if r[1] == EQ and any(r[0])),
            None,
        )
        if eq_idx is None:
            break
        a, _, b = rows.pop(eq_idx)
        j = next(i for i, x in enumerate(a) if x)
        if a[j] < 0:
            a = tuple(-x for x in a)
            b = -b
        out = []
        for a2, rel2, b2 in rows:
            if a2[j] == 0:
                out.append([a2, rel2, b2])
                continue
            # a2*a[j] - a2[j]*a keeps direction since a[j] > 0
            na = tuple(x2 * a[j] - a2[j] * x for x2, x in zip(a2, a))
            nb = b2 * a[j] - a2[j] * b
            out.append(list(_canon_ineq(na, rel2, nb)))
        rows = out
        changed = True
    # check degenerate equalities 0 = b
    ineqs = []
    for a, rel, b in rows:
        if not any(a):
            if rel == EQ and b != 0:
                return [], False
            if rel == LE and b < 0:
                return [], False
            if rel == LT and b <= 0:
                return [], False
            continue
        if rel == EQ:
            ineqs.append((a, LE, b))
            ineqs.append((tuple(-x for x in a), LE, -b))
        else:
            ineqs.append((a, rel, b))
    return ineqs, True


def _fm_eliminate(rows, j):
    """Fourier-Motzkin elimination of variable j from strict/weak inequalities."""
    pos, neg, rest = [], [], []
    for a, rel, b in rows:
        if a[j] > 0:
            pos.append((a, rel, b))
        elif a[j] < 0:
            neg.append((a, rel, b))
        else:
            rest.append((a, rel, b))
    out = set()
    for a1, r1, b1 in pos:
        for a2, r2, b2 in neg:
            c1, c2 = -a2[j], a1[j]
            na = tuple(c1 * x1 + c2 * x2 for x1, x2 in zip(a1, a2))
            nb = c1 * b1 + c2 * b2
            rel = LT if (r1 == LT or r2 == LT) else LE
            if not any(na):
                if nb < 0 or (rel == LT and nb == 0):
                    return None
                continue
            out.add(_canon_ineq(na, rel, nb))
    for row in rest:
        out.add(_canon_ineq(*row))
    return sorted(out)


def feasible(P):
    """Exact nonemptiness over the reals, honoring strict rows."""
    rows, ok = _eliminate_equalities(P.rows, P.dim)
    if not ok:
        return False
    rows = sorted({_canon_ineq(*r) for r in rows})
    for j in range(P.dim):
        if not rows:
            return True
        rows = _fm_eliminate(rows, j)
        if rows is None:
            return False
    for a, rel, b in rows:
        if b < 0 or (rel == LT and b == 0):
            return False
    return True


def _coordinate_bounds(P, j):
    """Exact (lower, upper) bounds of coordinate j over P.

    Each bound is (value, strict) or None when unbounded on that side.
    Assumes P is feasible.  Equalities are kept as inequality pairs so
    that bounds carried by them survive the elimination.
    """
    rows = set()
    for a, rel, b in P.rows:
        if rel == EQ:
            rows.add(_canon_ineq(a, LE, b))
            rows.add(_canon_ineq(tuple(-x for x in a), LE, -b))
        else:
            rows.add(_canon_ineq(a, rel, b))
    rows = sorted(rows)
    for t in range(P.dim):
        if t == j:
            continue
        rows = _fm_eliminate(rows, t)
        if rows is None:
            raise ValueError("infeasible polyhedron")
    lo = hi = None
    for a, rel, b in rows:
        coef = a[j]
        if coef == 0:
            continue
        val = Fraction(b, coef)
        if coef > 0:
            if hi is None or val < hi[0] or (val == hi[0] and rel == LT):
                hi = (val, rel == LT)
        else:
            if lo is None or val > lo[0] or (val == lo[0] and rel == LT):
                lo = (val, rel == LT)
    return lo, hi


def _ceil_frac(q):
    return -((-q.numerator) // q.denominator)


def _floor_frac(q):
    return q.numerator // q.denominator


def lattice_points(P):
    """All integer points of P, sorted lexicographically.

    Raises UnboundedPolyhedronError when no bounding box can be
    established by exact elimination.
    """
    if not feasible(P):
        return []
    return sorted(_lattice_rec(P, P.dim, ()))


def _substitute_first(P, value):
    rows = []
    for a, rel, b in P.rows:
        rows.append((a[1:], rel, Fraction(b) - a[0] * value))
    return HPolyhedron(P.dim - 1, rows)


def _lattice_rec(P, dim, prefix):
    if dim == 0:
        if feasible(P):
            yield prefix
        return
    if not feasible(P):
        return
    lo, hi = _coordinate_bounds(P, 0)
    if lo is None or hi is None:
        raise UnboundedPolyhedronError("polyhedron unbounded in coordinate %d" % len(prefix))
    lo_int = _floor_frac(lo[0]) + 1 if (lo[1] and lo[0].denominator == 1) else _ceil_frac(lo[0])
    hi_int = _ceil_frac(hi[0]) - 1 if (hi[1] and hi[0].denominator == 1) else _floor_frac(hi[0])
    for v in range(lo_int, hi_int + 1):
        yield from _lattice_rec(_substitute_first(P, Fraction(v)), dim - 1, prefix + (v,))


# ---------------------------------------------------------------------------
# closed polytope helpers (vertices, dimension, interior samples)


def polyhedron_vertices(P):
    """Vertices of the closure of P.  Intended for bounded input."""
    P = P.closure()
    rows = [(a, rel, b) for a, rel, b in P.rows]
    n = P.dim
    if n == 0:
        return [()] if feasible(P) else []
    verts = set()
    import itertools

    for combo in itertools.combinations(range(len(rows)), n):
        sys_rows = [rows[i][0] for i in combo]
        rhs = [rows[i][2] for i in combo]
        if rat_rank(sys_rows, n) != n:
            continue
        x = rat_solve(sys_rows, n, rhs)
        if x is not None and P.contains(x):
            verts.add(x)
    return sorted(verts)


def affine_dim(P):
    """Dimension of the affine hull of P; -1 when empty."""
    if not feasible(P):
        return -1
    eqs = [(a, b) for a, rel, b in P.rows if rel == EQ]
    for a, rel, b in P.rows:
        if rel == EQ:
            continue
        # the face a.x = b is forced iff a.x < b is infeasible alongside P
        if not feasible(P.with_rows([(a, LT, b)])):
            eqs.append((a, b))
    if not eqs:
        return P.dim
    return P.dim - rat_rank([a for a, _ in eqs], P.dim)


def interior_sample(P):
    """A rational point in the relative interior of a nonempty bounded P."""
    verts = polyhedron_vertices(P)
    if not verts:
        raise ValueError("empty polyhedron")
    n = len(verts)
    pt = tuple(sum(v[j] for v in verts) / n for j in range(P.dim))
    assert P.contains(pt), "sample fell outside its cell"
    return pt
