"""Toric input data: fans, the Picard lattice sequence, morphisms, classes.

The engine input is the short exact sequence 0 -> Z^n -> Z^{n+k} -> Z^k -> 0
whose middle map pairs a lattice point of M with every ray.  The standing
hypotheses (smooth, complete, strongly convex effective cone, torsion-free
class group) are validated here; everything downstream assumes them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .exactlin import (
    EQ,
    LE,
    LT,
    HPolyhedron,
    IntMatrix,
    UnboundedPolyhedronError,
    _det,
    cokernel_projection,
    feasible,
    integer_section,
    lattice_points,
    rational_rank,
    smith_normal_form,
)


class ValidationError(ValueError):
    """Base class for rejected toric input."""


class NotSmooth(ValidationError):
    pass


class NotComplete(ValidationError):
    pass


class EffectiveConeNotStronglyConvex(ValidationError):
    pass


class NotInjective(ValidationError):
    pass


class TorsionClassGroup(ValidationError):
    pass


# ---------------------------------------------------------------------------
# fans


@dataclass(frozen=True)
class Fan:
    """Complete smooth fan: primitive rays plus maximal cones as ray index sets."""

    rays: tuple
    max_cones: tuple
    name: str = ""
    product_of_projective_spaces: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))
        object.__setattr__(self, "max_cones", tuple(tuple(sorted(int(i) for i in c)) for c in self.max_cones))

    @property
    def dim(self):
        return len(self.rays[0]) if self.rays else 0


def _primitive(vec):
    g = 0
    for x in vec:
        g = gcd(g, abs(x))
    return g == 1


def validate_fan(fan):
    """Check the Fan invariants: smooth, cones meet properly, complete."""
    n = fan.dim
    if n == 0:
        if fan.rays or fan.max_cones != ((),) and fan.max_cones != ():
            raise NotComplete("zero-dimensional fan must have no rays")
        return
    for i, ray in enumerate(fan.rays):
        if len(ray) != n:
            raise ValidationError("ray %d has wrong dimension" % i)
        if not any(ray):
            raise ValidationError("ray %d is zero" % i)
        if not _primitive(ray):
            raise NotSmooth("ray %d = %r is not primitive" % (i, ray))
    for ci, cone in enumerate(fan.max_cones):
        if len(cone) != n:
            raise NotSmooth("max cone %d has %d rays, expected %d (smooth complete case)" % (ci, len(cone), n))
        sub = [fan.rays[i] for i in cone]
        if abs(_det(sub)) != 1:
            raise NotSmooth("max cone %d rays do not form a Z-basis" % ci)
    # every facet shared by exactly two maximal cones
    from collections import Counter

    facets = Counter()
    for cone in fan.max_cones:
        for drop in cone:
            facets[tuple(i for i in cone if i != drop)] += 1
    bad = [f for f, cnt in facets.items() if cnt != 2]
    if bad:
        raise NotComplete("facet %r not shared by exactly 2 maximal cones" % (bad[0],))
    # interiors pairwise disjoint
    for ai in range(len(fan.max_cones)):
        for bi in range(ai + 1, len(fan.max_cones)):
            if _cone_interiors_overlap(fan, fan.max_cones[ai], fan.max_cones[bi]):
                raise NotComplete("maximal cones %d and %d overlap" % (ai, bi))


def cone_hrep(fan, cone, dim=None):
    """H-rows of a smooth full-dimensional cone: x in cone iff all dual pairings >= 0."""
    from .exactlin import rat_solve

    dim = dim if dim is not None else fan.dim
    sub = [[Fraction(x) for x in fan.rays[i]] for i in cone]
    rows = []
    for i in range(len(sub)):
        # d_i with <d_i, ray_j> = delta_ij; exists since the cone is smooth
        d = rat_solve(sub, dim, [Fraction(1 if t == i else 0) for t in range(len(sub))])
        rows.append((tuple(-x for x in d), LE, 0))
    return rows


def _cone_interiors_overlap(fan, cone_a, cone_b):
    if set(cone_a) == set(cone_b):
        return True
    rows = []
    for cone in (cone_a, cone_b):
        for a, rel, b in cone_hrep(fan, cone):
            rows.append((a, LT, b))
    return feasible(HPolyhedron(fan.dim, rows))


# ---------------------------------------------------------------------------
# the lattice short exact sequence


@dataclass(frozen=True)
class LatticeSES:
    """0 -> Z^n -> Z^{n+k} -> Z^k -> 0 in exact integer form."""

    n: int
    k: int
    ray_map: IntMatrix        # (n+k) x n, row r pairs m with ray r
    class_map: IntMatrix      # k x (n+k), the torsion-free cokernel projection
    section: IntMatrix        # (n+k) x k integer section of class_map
    fan: Fan = None
    product_of_projective_spaces: bool = False

    @property
    def nrays(self):
        return self.n + self.k

    def ray_image(self, point):
        """Pairings of a rational point of M with every ray."""
        return tuple(
            sum(row[j] * Fraction(point[j]) for j in range(self.n))
            for row in self.ray_map.entries
        )

    def class_of(self, vec):
        return tuple(sum(row[j] * vec[j] for j in range(self.nrays)) for row in self.class_map.entries)


def build_ses(fan):
    """Validate a fan and package its Picard short exact sequence."""
    validate_fan(fan)
    n = fan.dim
    ray_map = IntMatrix(fan.rays, cols=n)
    if rational_rank(ray_map) != n:
        raise ValidationError("rays do not span M over Q")
    cok = cokernel_projection(ray_map)
    if cok.torsion:
        raise TorsionClassGroup(
            "class group has torsion %r; smooth complete input should be free" % (cok.torsion,)
        )
    k = cok.free_rank
    class_map = cok.free_map
    _check_strong_convexity(ray_map, n)
    section = integer_section(class_map) if k else IntMatrix.zero(n + k, 0)
    return LatticeSES(
        n=n,
        k=k,
        ray_map=ray_map,
        class_map=class_map,
        section=section,
        fan=fan,
        product_of_projective_spaces=fan.product_of_projective_spaces,
    )


def _check_strong_convexity(ray_map, n):
    # effective cone strongly convex <=> i_R(R^n) meets the closed positive
    # orthant only at 0 <=> no m with ray pairings >= 0 summing to 1
    nrays = ray_map.rows
    rows = []
    for r in range(nrays):
        rows.append((tuple(-x for x in ray_map.entries[r]), LE, 0))
    total = tuple(sum(ray_map.entries[r][j] for r in range(nrays)) for j in range(n))
    rows.append((total, EQ, 1))
    if feasible(HPolyhedron(n, rows)):
        raise EffectiveConeNotStronglyConvex("nonzero effective class maps to zero")


def ses_from_maps(ray_map, name="", product_of_projective_spaces=False):
    """Build a LatticeSES from a raw ray matrix (no fan, no cone checks)."""
    ray_map = IntMatrix(ray_map)
    n = ray_map.cols
    if rational_rank(ray_map) != n:
        raise ValidationError("rays do not span M over Q")
    cok = cokernel_projection(ray_map)
    if cok.torsion:
        raise TorsionClassGroup("class group has torsion %r" % (cok.torsion,))
    _check_strong_convexity(ray_map, n)
    k = cok.free_rank
    section = integer_section(cok.free_map) if k else IntMatrix.zero(n + k, 0)
    return LatticeSES(
        n=n,
        k=k,
        ray_map=ray_map,
        class_map=cok.free_map,
        section=section,
        fan=None,
        product_of_projective_spaces=product_of_projective_spaces,
    )


# ---------------------------------------------------------------------------
# classes and monomials


@dataclass(frozen=True)
class PicClass:
    """A divisor class with its canonical lift."""

    vec: tuple
    lift: tuple


@dataclass(frozen=True)
class CoxMonomial:
    """Effective exponent vector in Z^{n+k}."""

    exponents: tuple

    def __post_init__(self):
        if any(e < 0 for e in self.exponents):
            raise ValueError("negative exponent in Cox monomial")


def monomial_str(exponents, style="x"):
    if not any(exponents):
        return "1"
    parts = []
    for i, e in enumerate(exponents):
        if e == 1:
            parts.append("%s%d" % (style, i))
        elif e > 1:
            parts.append("%s%d^%d" % (style, i, e))
    return "*".join(parts)


def class_leq(a, b, ses):
    """a <= b iff b - a lies in the real effective cone pi_R(R_{>=0}^{n+k})."""
    a = _class_vec(a)
    b = _class_vec(b)
    diff = tuple(y - x for x, y in zip(a, b))
    rows = []
    nr = ses.nrays
    for j in range(nr):
        e = tuple(-1 if t == j else 0 for t in range(nr))
        rows.append((e, LE, 0))
    for i in range(ses.k):
        rows.append((ses.class_map.entries[i], EQ, diff[i]))
    return feasible(HPolyhedron(nr, rows))


def _class_vec(c):
    if isinstance(c, PicClass):
        return c.vec
    return tuple(int(x) for x in c)


def monomials_of_class(c, ses):
    """All m in Z_{>=0}^{n+k} with class m = c, sorted lexicographically."""
    c = _class_vec(c)
    nr = ses.nrays
    rows = []
    for j in range(nr):
        e = tuple(-1 if t == j else 0 for t in range(nr))
        rows.append((e, LE, 0))
    for i in range(ses.k):
        rows.append((ses.class_map.entries[i], EQ, c[i]))
    try:
        pts = lattice_points(HPolyhedron(nr, rows))
    except UnboundedPolyhedronError:
        raise EffectiveConeNotStronglyConvex("monomial fiber unbounded; effective cone not strongly convex")
    return pts


def canonical_lift(c, ses):
    """Deterministic lift of a class: lex-smallest nonnegative lift when the
    class is effective, otherwise the section lift reduced to the canonical
    residue modulo the ray lattice."""
    c = _class_vec(c)
    monos = monomials_of_class(c, ses)
    if monos:
        return monos[0]
    lift = ses.section.apply(c)
    # reduce modulo the column span of ray_map via Hermite form
    from .exactlin import hermite_rows

    cols = [ses.ray_map.column(j) for j in range(ses.n)]
    basis = hermite_rows(cols, ses.nrays)
    lift = list(lift)
    for row in basis:
        p = next(i for i, x in enumerate(row) if x)
        q = lift[p] // row[p]
        for t in range(ses.nrays):
            lift[t] -= q * row[t]
    return tuple(lift)


def pic_class(c, ses):
    c = _class_vec(c)
    return PicClass(vec=c, lift=canonical_lift(c, ses))


# ---------------------------------------------------------------------------
# toric morphisms


@dataclass(frozen=True)
class ToricMorphism:
    """Lattice map N1 -> N2, one row per N2-coordinate, one column per
    N1-coordinate.  Finite morphisms require it to be injective."""

    matrix: IntMatrix
    source_fan: Fan = None

    @property
    def source_dim(self):
        return self.matrix.cols

    @property
    def target_dim(self):
        return self.matrix.rows

    def dual(self):
        return self.matrix.transpose()


def toric_morphism(matrix, target_dim, source_fan=None):
    m = IntMatrix(matrix, cols=None) if matrix else IntMatrix([], cols=0)
    if m.rows != target_dim:
        if m.rows == 0 and target_dim > 0:
            m = IntMatrix([() for _ in range(target_dim)], cols=0)
        else:
            raise ValidationError("morphism matrix has %d rows, target dimension is %d" % (m.rows, target_dim))
    return ToricMorphism(matrix=m, source_fan=source_fan)


def dual_map(f):
    """The dual f^T : M2 -> M1."""
    return f.matrix.transpose()


def check_injective(f):
    if rational_rank(f.matrix) != f.source_dim:
        raise NotInjective("lattice map has rank %d < %d" % (rational_rank(f.matrix), f.source_dim))


@dataclass
class MorphismDiagnostics:
    ok: bool
    injective: bool
    messages: list = field(default_factory=list)
    offending: tuple = None


def check_finite_morphism(f, fan1, fan2):
    """Verify injectivity and that the preimage of fan2 equals fan1.

    The comparison is cone by cone: no maximal cone preimage may slice
    the interior of a source cone.  Findings are reported, never thrown.
    """
    diag = MorphismDiagnostics(ok=True, injective=True)
    if rational_rank(f.matrix) != f.source_dim:
        diag.injective = False
        diag.ok = False
        diag.messages.append("lattice map is not injective")
        return diag
    try:
        validate_fan(fan1)
        validate_fan(fan2)
    except ValidationError as exc:
        diag.ok = False
        diag.messages.append("fan validation failed: %s" % exc)
        return diag
    n1 = f.source_dim
    fm = f.matrix.entries
    for ti, tau in enumerate(fan2.max_cones):
        # H-rows of f^{-1}(tau) in source coordinates
        pre_rows = []
        for a, rel, b in cone_hrep(fan2, tau):
            comp = tuple(
                sum(a[r] * fm[r][j] for r in range(f.target_dim)) for j in range(n1)
            )
            pre_rows.append((comp, rel, b))
        for si, sigma in enumerate(fan1.max_cones):
            gens_inside = all(
                HPolyhedron(n1, pre_rows).contains(f2v(fan1.rays[i])) for i in sigma
            )
            if gens_inside:
                continue
            strict_rows = [(a, LT, b) for a, rel, b in cone_hrep(fan1, sigma)]
            if feasible(HPolyhedron(n1, pre_rows + strict_rows)):
                diag.ok = False
                diag.offending = (ti, si)
                diag.messages.append(
                    "preimage of maximal cone %d of the target slices source cone %d: "
                    "it is not a union of source cones" % (ti, si)
                )
                return diag
    return diag


def f2v(vec):
    return tuple(Fraction(x) for x in vec)
