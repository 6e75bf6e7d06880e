"""Finite-dimensional path algebras, right modules, and minimal resolutions.

Both algebras in the engine store a total basis, not a presentation: a
basis element is a triple (source vertex, target vertex, monomial tag) and
composition is addition of tags.  Arrows point from smaller classes to
larger ones, so that projective covers sit at poset-minimal vertices and
differentials of resolutions carry effective monomials; this is the one
global convention, and the dictionary to exit-path language is simply
arrow reversal.

A right module assigns a space to every vertex and a matrix along every
basis element, composing covariantly along tags.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exactlin import HPolyhedron, LE, lattice_points, rat_nullspace, rat_rank, rat_solve
from .strata import bondal_classes
from .toricdata import class_leq, monomials_of_class


class LengthBoundExceeded(RuntimeError):
    pass


class TagNotEffective(ValueError):
    pass


class PathAlgebra:
    """Basis-indexed algebra over an ordered vertex set.

    hom[(u, v)] is the lex-sorted tag list of basis paths u -> v; identity
    paths are implicit.  Paths compose by tag addition.
    """

    def __init__(self, labels, hom):
        self.labels = list(labels)
        self.hom = {}
        for (u, v), tags in sorted(hom.items()):
            if u == v:
                raise ValueError("loops are implicit; do not list them")
            if tags:
                self.hom[(u, v)] = sorted(tuple(t) for t in tags)
        self.nv = len(self.labels)

    def hom_tags(self, u, v):
        return self.hom.get((u, v), [])

    def hom_dim(self, u, v):
        if u == v:
            return 1
        return len(self.hom_tags(u, v))

    def basis(self):
        for (u, v), tags in sorted(self.hom.items()):
            for t in tags:
                yield (u, v, t)

    def dimension(self):
        return self.nv + sum(len(t) for t in self.hom.values())

    def compose(self, p, q):
        """p: u->v then q: v->w gives the basis path u->w with added tags."""
        u, v, t1 = p
        v2, w, t2 = q
        if v != v2:
            raise ValueError("paths are not composable")
        tag = tuple(a + b for a, b in zip(t1, t2))
        if u == w and not any(tag):
            return (u, w, tag)
        if tag not in self.hom_tags(u, w):
            raise ValueError("composite %r missing from the basis" % (tag,))
        return (u, w, tag)

    def proj_weight_basis(self, v, w):
        """Basis of the w-weight space of the projective at v."""
        out = []
        if v == w:
            out.append(None)  # the identity path
        out.extend(self.hom_tags(v, w))
        return out

    def arrows(self):
        """Degree-minimal basis paths: those admitting no 2-step factorization."""
        out = []
        for u, v, t in self.basis():
            composite = False
            for w in range(self.nv):
                if w == u or w == v:
                    continue
                for t1 in self.hom_tags(u, w):
                    rem = tuple(a - b for a, b in zip(t, t1))
                    if all(x >= 0 for x in rem) and rem in self.hom_tags(w, v):
                        composite = True
                        break
                if composite:
                    break
            if not composite:
                out.append((u, v, t))
        return out

    def check_associative(self):
        basis = list(self.basis())
        for p in basis:
            for q in basis:
                if p[1] != q[0]:
                    continue
                pq = self.compose(p, q)
                for r in basis:
                    if q[1] != r[0]:
                        continue
                    qr = self.compose(q, r)
                    assert self.compose(pq, r) == self.compose(p, qr)
        return True


def bondal_algebra(ses):
    """The endomorphism algebra of the Bondal collection.

    Vertices are the Bondal classes; hom(a -> b) is every monomial of
    class b - a, which matches the lattice count of torus paths.
    """
    classes = bondal_classes(ses)
    hom = {}
    for i, a in enumerate(classes):
        for j, b in enumerate(classes):
            if i == j:
                continue
            if not class_leq(a, b, ses):
                continue
            diff = tuple(y - x for x, y in zip(a, b))
            tags = monomials_of_class(diff, ses)
            if tags:
                hom[(i, j)] = tags
    alg = PathAlgebra(classes, hom)
    alg.ses = ses
    return alg


def exit_algebra(V):
    """Path algebra of the fiber subtorus, vertices = stratum components.

    The basis from component u up to component v enumerates deck
    translates of u's lift lying in the closed exit region of v's lift;
    the tag is the difference of cube labels, an effective monomial.
    """
    ses = V.ses
    comps = V.components
    labels = [(c.cls, c.id) for c in comps]
    hom = {}
    for cu in comps:
        val_u = ses.ray_image(cu.sample_x)
        for cv in comps:
            if cu.id == cv.id or cu.piece != cv.piece:
                continue
            o, G = V.frames[cu.piece]
            k = V.k
            rows = []
            for r in range(ses.nrays):
                Gr = tuple(-x for x in G[r])
                rows.append((Gr, LE, cv.alpha[r] + val_u[r]))
            pts = lattice_points(HPolyhedron(k, rows))
            tags = []
            for z in pts:
                tag = tuple(
                    cv.alpha[r] - cu.alpha[r] + sum(G[r][s] * z[s] for s in range(k))
                    for r in range(ses.nrays)
                )
                assert all(t >= 0 for t in tag)
                if not any(tag):
                    raise AssertionError("nontrivial loop in exit algebra")
                tags.append(tag)
            if tags:
                diff = tuple(b - a for a, b in zip(cu.cls, cv.cls))
                assert all(ses.class_of(t) == diff for t in tags)
                hom[(cu.id, cv.id)] = tags
    alg = PathAlgebra(labels, hom)
    alg.ses = ses
    return alg


# ---------------------------------------------------------------------------
# right modules


@dataclass
class RightModule:
    algebra: PathAlgebra
    dims: list
    act: dict = field(default_factory=dict)  # basis path -> matrix dims[v] x dims[u]

    def action(self, path):
        u, v, t = path
        if u == v and not any(t):
            return [[Fraction(1 if i == j else 0) for j in range(self.dims[u])] for i in range(self.dims[u])]
        return self.act[path]

    def validate(self):
        A = self.algebra
        for (u, v, t), mat in self.act.items():
            assert len(mat) == self.dims[v]
            assert all(len(row) == self.dims[u] for row in mat)
        for p in A.basis():
            for q in A.basis():
                if p[1] != q[0]:
                    continue
                pq = A.compose(p, q)
                left = _mat_mul(self.action(q), self.action(p))
                assert left == self.action(pq), "action does not respect composition"
        return True

    def total_dim(self):
        return sum(self.dims)


def _mat_mul(A, B):
    if not A or not B:
        return [[Fraction(0)] * (len(B[0]) if B else 0) for _ in A]
    assert len(A[0]) == len(B)
    return [
        [sum(A[i][t] * B[t][j] for t in range(len(B))) for j in range(len(B[0]))]
        for i in range(len(A))
    ]


def _mat_vec(A, x):
    return [sum(row[j] * x[j] for j in range(len(x))) for row in A]


def constant_representation(A):
    """Dimension 1 at every vertex, every basis path acting as 1."""
    dims = [1] * A.nv
    act = {p: [[Fraction(1)]] for p in A.basis()}
    return RightModule(A, dims, act)


def simple_module(A, v):
    dims = [1 if i == v else 0 for i in range(A.nv)]
    act = {}
    for p in A.basis():
        u, w, _ = p
        act[p] = [[Fraction(0)] * dims[u] for _ in range(dims[w])]
    return RightModule(A, dims, act)


def projective_module(A, v):
    """The projective at v as a plain right module (weight spaces = paths)."""
    bases = {w: A.proj_weight_basis(v, w) for w in range(A.nv)}
    dims = [len(bases[w]) for w in range(A.nv)]
    act = {}
    for p in A.basis():
        u, w, _t = p
        mat = [[Fraction(0)] * dims[u] for _ in range(dims[w])]
        for col, tag in enumerate(bases[u]):
            source = (v, u, tag) if tag is not None else None
            if source is None:
                target = p if v == u else None
            else:
                target = A.compose(source, p)
            if target is not None:
                ttag = target[2]
                key = None if (target[0] == target[1] and not any(ttag)) else ttag
                mat[bases[w].index(key)][col] = Fraction(1)
        act[p] = mat
    return RightModule(A, dims, act)


# ---------------------------------------------------------------------------
# covers and resolutions


def _column_space_pivots(cols, dim):
    """Greedy basis among the given columns; returns pivot indices."""
    chosen = []
    rank = 0
    for i, c in enumerate(cols):
        if rat_rank([list(x) for x in chosen] + [list(c)], dim) > rank:
            chosen.append(c)
            rank += 1
    return chosen


def module_top(M):
    """Per-vertex generators of M / M.rad, chosen among standard basis vectors."""
    A = M.algebra
    gens = []
    for w in range(A.nv):
        if M.dims[w] == 0:
            continue
        rad = []
        for p in A.basis():
            if p[1] != w:
                continue
            mat = M.action(p)
            for j in range(M.dims[p[0]]):
                col = tuple(mat[i][j] for i in range(M.dims[w]))
                if any(col):
                    rad.append(col)
        rad = _column_space_pivots(rad, M.dims[w])
        rank = len(rad)
        current = [list(c) for c in rad]
        for i in range(M.dims[w]):
            if rank == M.dims[w]:
                break
            e = [Fraction(1 if t == i else 0) for t in range(M.dims[w])]
            if rat_rank(current + [e], M.dims[w]) > rank:
                current.append(e)
                rank += 1
                gens.append((w, tuple(e)))
    return gens


@dataclass
class ProjectiveCover:
    vertices: list         # summand vertices, in order
    generators: list       # module elements hit by the summand identities

    def multiset(self):
        out = {}
        for v in self.vertices:
            out[v] = out.get(v, 0) + 1
        return out


def projective_cover(M):
    gens = module_top(M)
    return ProjectiveCover(vertices=[w for w, _ in gens], generators=[g for _, g in gens])


def _weight_basis(A, summands, w):
    out = []
    for j, v in enumerate(summands):
        for tag in A.proj_weight_basis(v, w):
            out.append((j, tag))
        # tag None = identity, present only when v == w
    return out


def _cover_matrix(A, M, cover, w):
    """Matrix of P -> M at weight w over the weight basis of P."""
    basis = _weight_basis(A, cover.vertices, w)
    cols = []
    for j, tag in basis:
        v = cover.vertices[j]
        g = cover.generators[j]
        if tag is None:
            col = list(g)
        else:
            col = _mat_vec(M.action((v, w, tag)), list(g))
        cols.append(col)
    mat = [[cols[c][i] for c in range(len(cols))] for i in range(M.dims[w])]
    return basis, mat


def _primitive(vec):
    from math import gcd

    den = 1
    for x in vec:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g:
        ints = [x // g for x in ints]
    lead = next((x for x in ints if x), 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(Fraction(x) for x in ints)


class _KernelModule:
    """Kernel of P -> M presented inside the weight spaces of P."""

    def __init__(self, A, summands, basis_by_w, vectors_by_w):
        self.A = A
        self.summands = summands
        self.basis_by_w = basis_by_w    # weight basis of P at w
        self.vectors_by_w = vectors_by_w  # kernel basis vectors, coords over basis_by_w

    def dims(self):
        return [len(self.vectors_by_w[w]) for w in range(self.A.nv)]

    def as_module(self):
        A = self.A
        dims = self.dims()
        act = {}
        for p in A.basis():
            u, w, _t = p
            mat = [[Fraction(0)] * dims[u] for _ in range(dims[w])]
            if dims[u] and dims[w]:
                target_index = {bt: i for i, bt in enumerate(self.basis_by_w[w])}
                target_basis = self.vectors_by_w[w]
                solve_rows = [
                    [target_basis[col][i] for col in range(dims[w])]
                    for i in range(len(self.basis_by_w[w]))
                ]
                for col, vec in enumerate(self.vectors_by_w[u]):
                    img = [Fraction(0)] * len(self.basis_by_w[w])
                    for idx, coeff in enumerate(vec):
                        if coeff == 0:
                            continue
                        j, tag = self.basis_by_w[u][idx]
                        v0 = self.summands[j]
                        src = (v0, u, tag) if tag is not None else None
                        tgt = A.compose(src, p) if src is not None else (p if v0 == u else None)
                        assert tgt is not None
                        ttag = None if (tgt[0] == tgt[1] and not any(tgt[2])) else tgt[2]
                        img[target_index[(j, ttag)]] += coeff
                    coords = rat_solve(solve_rows, dims[w], img)
                    assert coords is not None, "kernel is not closed under the action"
                    for i in range(dims[w]):
                        mat[i][col] = coords[i]
            act[p] = mat
        return RightModule(A, dims, act)


def _kernel_of_cover(A, M, cover):
    basis_by_w = {}
    vectors_by_w = {}
    for w in range(A.nv):
        basis, mat = _cover_matrix(A, M, cover, w)
        basis_by_w[w] = basis
        if not basis:
            vectors_by_w[w] = []
            continue
        null = rat_nullspace(mat, len(basis)) if mat else [
            tuple(Fraction(1 if i == t else 0) for t in range(len(basis))) for i in range(len(basis))
        ]
        vectors_by_w[w] = [_primitive(v) for v in null]
    return _KernelModule(A, cover.vertices, basis_by_w, vectors_by_w)


@dataclass
class ProjComplex:
    """Bounded complex of projectives with path-combination differentials."""

    algebra: PathAlgebra
    terms: list            # per homological degree, list of vertex indices
    diffs: list            # diffs[i]: matrix of {tag or None: Fraction}, C_i -> C_{i-1}
    augmentation: list = None  # generators of the resolved module, degree 0

    def length(self):
        return len(self.terms) - 1

    def is_minimal(self):
        for mat in self.diffs:
            for row in mat:
                for entry in row:
                    if entry.get(None):
                        return False
        return True

    def graded_dims(self):
        out = []
        for term in self.terms:
            counts = {}
            for v in term:
                counts[v] = counts.get(v, 0) + 1
            out.append(counts)
        return out

    def check_d_squared(self):
        for i in range(1, len(self.diffs)):
            lower, upper = self.diffs[i - 1], self.diffs[i]
            for r in range(len(lower)):
                for c in range(len(upper[0]) if upper and upper[0] else 0):
                    acc = {}
                    for t in range(len(upper)):
                        left = lower[r][t]
                        right = upper[t][c]
                        for tag1, c1 in left.items():
                            for tag2, c2 in right.items():
                                tag = _tag_add(tag1, tag2)
                                acc[tag] = acc.get(tag, Fraction(0)) + c1 * c2
                    assert all(v == 0 for v in acc.values()), "d² != 0 in the path algebra"
        return True


def _tag_add(t1, t2):
    if t1 is None:
        return t2
    if t2 is None:
        return t1
    return tuple(a + b for a, b in zip(t1, t2))


def minimal_projective_resolution(M, bound=None):
    """Iterated projective covers with exact kernels.

    bound is the ambient projective-dimension bound; exceeding it raises
    LengthBoundExceeded, which signals an internal inconsistency.
    """
    A = M.algebra
    if bound is None:
        bound = A.nv
    cover0 = projective_cover(M)
    terms = [list(cover0.vertices)]
    diffs = []
    current_target = M
    cover = cover0
    degree = 0
    while True:
        kernel = _kernel_of_cover(A, current_target, cover)
        dims = kernel.dims()
        if sum(dims) == 0:
            break
        degree += 1
        if degree > bound:
            raise LengthBoundExceeded(
                "resolution exceeded the projective dimension bound %d" % bound
            )
        K = kernel.as_module()
        next_cover = projective_cover(K)
        # differential: generators of K written over the weight basis of P
        mat = []
        for r in range(len(cover.vertices)):
            mat.append([])
        for j, (w, gen) in enumerate(zip(next_cover.vertices, next_cover.generators)):
            vec = [Fraction(0)] * len(kernel.basis_by_w[w])
            for col, coeff in enumerate(gen):
                if coeff == 0:
                    continue
                kv = kernel.vectors_by_w[w][col]
                for idx, x in enumerate(kv):
                    vec[idx] += coeff * x
            entries = [dict() for _ in cover.vertices]
            for idx, x in enumerate(vec):
                if x == 0:
                    continue
                summand, tag = kernel.basis_by_w[w][idx]
                entries[summand][tag] = entries[summand].get(tag, Fraction(0)) + x
            for r in range(len(cover.vertices)):
                mat[r].append(entries[r])
        diffs.append(mat)
        terms.append(list(next_cover.vertices))
        current_target = K
        cover = next_cover
    res = ProjComplex(algebra=A, terms=terms, diffs=diffs, augmentation=cover0.generators)
    res.check_d_squared()
    assert res.is_minimal(), "projective cover produced an identity entry"
    return res


# ---------------------------------------------------------------------------
# verification helpers


def evaluate_diff(A, terms_lo, terms_hi, mat, w):
    """Scalar matrix of a differential on weight-w spaces.

    The entry between row r and column summand j is a path combination
    from terms_lo[r] to terms_hi[j]; it acts on a weight basis element
    (j, tag) by left composition.
    """
    lo_basis = _weight_basis(A, terms_lo, w)
    hi_basis = _weight_basis(A, terms_hi, w)
    lo_index = {bt: i for i, bt in enumerate(lo_basis)}
    out = [[Fraction(0)] * len(hi_basis) for _ in lo_basis]
    for cidx, (j, tag) in enumerate(hi_basis):
        for r in range(len(terms_lo)):
            entry = mat[r][j]
            v = terms_lo[r]
            for etag, coeff in entry.items():
                if coeff == 0:
                    continue
                comp = _tag_add(etag, tag)
                key = None if (v == w and (comp is None or not any(comp))) else comp
                out[lo_index[(r, key)]][cidx] += coeff
    return out


def _safe_rank(mat):
    return rat_rank(mat) if mat and mat[0] else 0


def resolution_homology(M, C):
    """Total homology dims of ... -> C_1 -> C_0 -> M -> 0, degree by degree."""
    A = C.algebra
    out = {}
    for w in range(A.nv):
        spaces = [len(_weight_basis(A, term, w)) for term in C.terms]
        mats = []
        # degree 0 -> M
        cover = ProjectiveCover(vertices=C.terms[0], generators=C.augmentation)
        _basis, m0 = _cover_matrix(A, M, cover, w)
        mats.append(m0)
        for i, dmat in enumerate(C.diffs, start=1):
            mats.append(evaluate_diff(A, C.terms[i - 1], C.terms[i], dmat, w))
        # homology at degree i: ker(mats[i]) / im(mats[i+1])
        for i in range(len(C.terms)):
            rank_i = _safe_rank(mats[i]) if spaces[i] else 0
            rank_up = _safe_rank(mats[i + 1]) if i + 1 < len(mats) else 0
            out[i] = out.get(i, 0) + spaces[i] - rank_i - rank_up
        # cokernel of the augmentation
        out[-1] = out.get(-1, 0) + (M.dims[w] - _safe_rank(mats[0]))
    return out


def ext_dims_against_simples(C):
    """dim Ext^i(M, S_v) from the complex: Hom(-, S_v) keeps only the
    identity coefficients, so the cochain maps are tiny scalar matrices."""
    A = C.algebra
    out = {}
    for v in range(A.nv):
        spaces = [sum(1 for t in term if t == v) for term in C.terms]
        cmaps = []  # cmaps[i]: Hom(C_i, S_v) -> Hom(C_{i+1}, S_v)
        for i, dmat in enumerate(C.diffs):
            rows_idx = [r for r, t in enumerate(C.terms[i]) if t == v]
            cols_idx = [c for c, t in enumerate(C.terms[i + 1]) if t == v]
            cmaps.append(
                [[dmat[r][c].get(None, Fraction(0)) for r in rows_idx] for c in cols_idx]
            )
        for i in range(len(C.terms)):
            n = spaces[i]
            if n == 0:
                continue
            rank_in = _safe_rank(cmaps[i - 1]) if i >= 1 else 0
            rank_out = _safe_rank(cmaps[i]) if i < len(cmaps) else 0
            val = n - rank_in - rank_out
            if val:
                out[(i, v)] = val
    return out


# ---------------------------------------------------------------------------
# translation between the two algebras


def translate_exit_to_bondal(path, exit_alg, bondal_alg):
    """Exit-algebra basis path -> Bondal basis path with the same monomial."""
    u, v, tag = path
    if any(t < 0 for t in tag):
        raise TagNotEffective("negative coordinate in %r" % (tag,))
    cls_u = exit_alg.labels[u][0]
    cls_v = exit_alg.labels[v][0]
    bu = bondal_alg.labels.index(cls_u)
    bv = bondal_alg.labels.index(cls_v)
    if u == v and not any(tag):
        return (bu, bv, tag)
    if tag not in bondal_alg.hom_tags(bu, bv):
        raise TagNotEffective("monomial %r is not a path %r -> %r" % (tag, cls_u, cls_v))
    return (bu, bv, tag)


def translate_complex(C, exit_alg, bondal_alg):
    """Push a complex over the exit algebra down to the Bondal algebra."""
    terms = [
        [bondal_alg.labels.index(exit_alg.labels[v][0]) for v in term] for term in C.terms
    ]
    diffs = []
    for i, mat in enumerate(C.diffs, start=1):
        new = []
        for r, row in enumerate(mat):
            new_row = []
            for c, entry in enumerate(row):
                for tag in entry:
                    if tag is not None:
                        translate_exit_to_bondal((C.terms[i - 1][r], C.terms[i][c], tag), exit_alg, bondal_alg)
                new_row.append(dict(entry))
            new.append(new_row)
        diffs.append(new)
    return ProjComplex(algebra=bondal_alg, terms=terms, diffs=diffs, augmentation=None)


# ---------------------------------------------------------------------------
# quiver presentation export


def quiver_presentation(A):
    """Vertices, degree-minimal arrows, and commutativity-type relations."""
    arrows = A.arrows()
    names = {p: "a%d" % i for i, p in enumerate(arrows)}
    by_source = {}
    for p in arrows:
        by_source.setdefault(p[0], []).append(p)

    results = {}

    def dfs(u, v_target, tag_target, at, tag_now, word):
        if at == v_target and tag_now == tag_target:
            results.setdefault((u, v_target, tag_target), []).append(tuple(word))
            return
        for p in by_source.get(at, []):
            nt = tuple(a + b for a, b in zip(tag_now, p[2]))
            if all(x <= y for x, y in zip(nt, tag_target)):
                dfs(u, v_target, tag_target, p[1], nt, word + [p])

    for u, v, tag in A.basis():
        zero = tuple(0 for _ in tag)
        dfs(u, v, tag, u, zero, [])

    lines = ["quiver"]
    for i, lab in enumerate(A.labels):
        lines.append("vertex %d label %s" % (i, lab))
    for p in arrows:
        lines.append("arrow %s %d -> %d tag %s" % (names[p], p[0], p[1], list(p[2])))
    for key in sorted(results):
        ws = sorted(results[key])
        first = ws[0]
        for other in ws[1:]:
            lines.append(
                "relation %s - %s"
                % (".".join(names[p] for p in first), ".".join(names[p] for p in other))
            )
    return "\n".join(lines) + "\n"
