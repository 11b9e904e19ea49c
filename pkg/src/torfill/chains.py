"""Integral singular chains on tori spanned by straight simplices.

A straight simplex is the projection to T^n = R^n/Z^n of the affine simplex
spanned by an ordered tuple of integer points; it is determined by its vertex
tuple up to a common integer translation.  We resolve the translation quotient
by translating the first vertex to the origin, so chains are finite integer
combinations of canonical vertex tuples.  All arithmetic is exact: vertices
are arbitrary-precision integers and the degree oracle works over Fraction.

Degenerate simplices (repeated vertices) are ordinary chain generators here —
this is singular chain calculus, not a simplicial-set quotient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd

from .errors import DimensionMismatch, NonGenericPoint

Vertex = tuple  # tuple[int, ...]


def _as_vertex(p) -> Vertex:
    return tuple(int(x) for x in p)


@dataclass(frozen=True)
class StraightSimplex:
    """Ordered tuple of integer vertices in Z^n, canonical (first vertex 0)."""

    vertices: tuple

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    @property
    def degree(self) -> int:
        return len(self.vertices) - 1

    def is_degenerate(self) -> bool:
        return len(set(self.vertices)) != len(self.vertices)

    def __repr__(self):
        return "[" + ", ".join(repr(v) for v in self.vertices) + "]"


def canonicalize(vertices) -> StraightSimplex:
    """Translate so the first vertex is the origin.

    Tuples differing by a common integer translation map to the same simplex.
    """
    verts = [_as_vertex(p) for p in vertices]
    if not verts:
        raise DimensionMismatch("a simplex needs at least one vertex")
    n = len(verts[0])
    if any(len(p) != n for p in verts):
        raise DimensionMismatch("vertices of mixed coordinate dimension")
    return _canon_fast(tuple(verts))


def _canon_fast(verts) -> StraightSimplex:
    # internal path: verts already int tuples of uniform dimension
    v0 = verts[0]
    if any(v0):
        verts = tuple(tuple(a - b for a, b in zip(p, v0)) for p in verts)
    return StraightSimplex(verts)


@dataclass(frozen=True, eq=False)
class TorusChain:
    """Finite integer combination of canonical straight simplices.

    ``terms`` maps canonical StraightSimplex to a nonzero coefficient; all
    simplices share ``degree`` and ``ambient_dim``.  Treated as immutable.
    """

    ambient_dim: int
    degree: int
    terms: dict = field(default_factory=dict)

    @staticmethod
    def zero(ambient_dim: int, degree: int) -> "TorusChain":
        return TorusChain(ambient_dim, degree, {})

    @staticmethod
    def from_pairs(ambient_dim, degree, pairs) -> "TorusChain":
        acc = {}
        for simplex, coeff in pairs:
            if simplex.degree != degree or simplex.ambient_dim != ambient_dim:
                raise DimensionMismatch("simplex/chain degree or dimension mismatch")
            c = acc.get(simplex, 0) + coeff
            if c:
                acc[simplex] = c
            elif simplex in acc:
                del acc[simplex]
        return TorusChain(ambient_dim, degree, acc)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "TorusChain") -> "TorusChain":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if (self.ambient_dim, self.degree) != (other.ambient_dim, other.degree):
            raise DimensionMismatch("cannot add chains of different type")
        acc = dict(self.terms)
        for s, c in other.terms.items():
            v = acc.get(s, 0) + c
            if v:
                acc[s] = v
            elif s in acc:
                del acc[s]
        return TorusChain(self.ambient_dim, self.degree, acc)

    def __neg__(self) -> "TorusChain":
        return TorusChain(self.ambient_dim, self.degree,
                          {s: -c for s, c in self.terms.items()})

    def __sub__(self, other: "TorusChain") -> "TorusChain":
        return self + (-other)

    def scale(self, k: int) -> "TorusChain":
        if k == 0:
            return TorusChain.zero(self.ambient_dim, self.degree)
        return TorusChain(self.ambient_dim, self.degree,
                          {s: k * c for s, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, TorusChain):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.ambient_dim == other.ambient_dim
        return (self.ambient_dim == other.ambient_dim
                and self.degree == other.degree
                and self.terms == other.terms)


def simplex_chain(vertices) -> TorusChain:
    """Chain with a single simplex of coefficient 1."""
    s = canonicalize(vertices)
    return TorusChain(s.ambient_dim, s.degree, {s: 1})


def l1_norm(c: TorusChain) -> int:
    """Sum of absolute coefficient values over the reduced form."""
    return sum(abs(v) for v in c.terms.values())


def boundary(c: TorusChain) -> TorusChain:
    """Alternating sum of vertex-deleted faces, canonicalized with cancellation.

    Degree-0 chains have zero boundary.  boundary(boundary(c)) = 0.
    """
    if c.degree == 0:
        return TorusChain.zero(c.ambient_dim, 0)
    acc = {}
    for simplex, coeff in c.terms.items():
        verts = simplex.vertices
        for i in range(len(verts)):
            face = _canon_fast(verts[:i] + verts[i + 1:])
            sgn = coeff if i % 2 == 0 else -coeff
            v = acc.get(face, 0) + sgn
            if v:
                acc[face] = v
            elif face in acc:
                del acc[face]
    return TorusChain(c.ambient_dim, c.degree - 1, acc)


@dataclass(frozen=True)
class LinearTorusMap:
    """Affine-integral map T^n -> T^m: x |-> Mx + t with integer M, t.

    Integer data makes the induced torus map well defined; altering the
    translation by any integer vector induces the same map on chains.
    """

    matrix: tuple  # m rows, each a tuple of n ints
    translation: tuple = None

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.matrix)
        object.__setattr__(self, "matrix", rows)
        t = self.translation
        if t is None:
            t = (0,) * len(rows)
        object.__setattr__(self, "translation", tuple(int(x) for x in t))
        if len(self.translation) != len(rows):
            raise DimensionMismatch("translation length != matrix rows")

    @property
    def source_dim(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    @property
    def target_dim(self) -> int:
        return len(self.matrix)

    @staticmethod
    def identity(n: int) -> "LinearTorusMap":
        return LinearTorusMap(tuple(tuple(1 if i == j else 0 for j in range(n))
                                    for i in range(n)))

    @staticmethod
    def from_columns(columns, target_dim=None) -> "LinearTorusMap":
        """Map sending the i-th basis vector of the source to columns[i]."""
        cols = [_as_vertex(c) for c in columns]
        m = len(cols[0]) if cols else target_dim
        if any(len(c) != m for c in cols):
            raise DimensionMismatch("columns of mixed dimension")
        return LinearTorusMap(tuple(tuple(c[i] for c in cols) for i in range(m)))

    def apply(self, p) -> Vertex:
        return tuple(sum(a * x for a, x in zip(row, p)) + t
                     for row, t in zip(self.matrix, self.translation))

    def compose(self, inner: "LinearTorusMap") -> "LinearTorusMap":
        """self o inner."""
        if inner.target_dim != self.source_dim:
            raise DimensionMismatch("composition dimension mismatch")
        cols = [self.apply(col) for col in zip(*inner.matrix)]
        mat = tuple(tuple(c[i] for c in cols) for i in range(self.target_dim))
        return LinearTorusMap(mat, self.translation)


def pushforward(f: LinearTorusMap, c: TorusChain) -> TorusChain:
    """Apply f vertexwise and re-canonicalize.

    Commutes with boundary and never increases the l^1 norm.
    """
    if f.source_dim != c.ambient_dim:
        raise DimensionMismatch("map source dim != chain ambient dim")
    acc = {}
    for simplex, coeff in c.terms.items():
        img = _canon_fast(tuple(f.apply(p) for p in simplex.vertices))
        v = acc.get(img, 0) + coeff
        if v:
            acc[img] = v
        elif img in acc:
            del acc[img]
    return TorusChain(f.target_dim, c.degree, acc)


def prism_v(v, c: TorusChain) -> TorusChain:
    """Prism operator of the translation homotopy x |-> x + tv.

    Closed vertex formula on a simplex [q_0,...,q_k]:

        sum_{i=0..k} (-1)^i [q_0,...,q_{k-i}, q_{k-i}+v, ..., q_k+v]

    (the i-th term duplicates vertex k-i and translates the tail by v).
    On the torus the endpoints of the homotopy are both the identity, so
    boundary(prism_v(c)) = prism_v(boundary(c)) exactly, and
    l1(prism_v(c)) <= (k+1) * l1(c).
    """
    v = _as_vertex(v)
    if len(v) != c.ambient_dim:
        raise DimensionMismatch("vector dim != chain ambient dim")
    acc = {}
    for simplex, coeff in c.terms.items():
        q = simplex.vertices
        k = len(q) - 1
        shifted = [tuple(a + b for a, b in zip(p, v)) for p in q]
        for i in range(k + 1):
            cut = k - i
            verts = q[:cut + 1] + tuple(shifted[cut:])
            s = _canon_fast(verts)
            sgn = coeff if i % 2 == 0 else -coeff
            val = acc.get(s, 0) + sgn
            if val:
                acc[s] = val
            elif s in acc:
                del acc[s]
    return TorusChain(c.ambient_dim, c.degree + 1, acc)


def parallelogram_cycle(vectors) -> TorusChain:
    """Iterated prism of the segment cycle: Q(v_1..v_k).

    Q(v_1) = [0, v_1] and Q(v_1..v_k) = prism_{v_k}(Q(v_1..v_{k-1})).
    Always a cycle, with l1 <= k!.
    """
    vecs = [_as_vertex(u) for u in vectors]
    if not vecs:
        raise DimensionMismatch("need at least one generating vector")
    n = len(vecs[0])
    if any(len(u) != n for u in vecs):
        raise DimensionMismatch("generating vectors of mixed dimension")
    c = simplex_chain([(0,) * n, vecs[0]])
    for u in vecs[1:]:
        c = prism_v(u, c)
    return c


def rectangle_cycle(sizes) -> TorusChain:
    """Q(a_1 e_1, ..., a_n e_n) in T^n."""
    sizes = [int(a) for a in sizes]
    n = len(sizes)
    vecs = [tuple(a if i == j else 0 for j in range(n))
            for i, a in enumerate(sizes)]
    return parallelogram_cycle(vecs)


def _facet_normals(verts):
    """Inward facet data for a nondegenerate n-simplex in Z^n.

    Returns (normals, offsets) with: p interior  <=>  n_i . p > c_i for all i.
    Normal i is the cofactor normal of the hyperplane through the vertices
    other than i, oriented toward vertex i.  None if the simplex is degenerate.
    """
    n = len(verts[0])
    normals, offsets = [], []
    for i in range(n + 1):
        rest = [verts[j] for j in range(n + 1) if j != i]
        base = rest[0]
        rows = [tuple(a - b for a, b in zip(p, base)) for p in rest[1:]]
        # cofactor expansion: normal_k = (-1)^k det(rows without column k)
        normal = []
        for k in range(n):
            sub = [[r[j] for j in range(n) if j != k] for r in rows]
            d = _det_small(sub)
            normal.append(d if k % 2 == 0 else -d)
        c = sum(a * b for a, b in zip(normal, base))
        s = sum(a * b for a, b in zip(normal, verts[i])) - c
        if s == 0:
            return None
        if s < 0:
            normal = [-a for a in normal]
            c = -c
        normals.append(tuple(normal))
        offsets.append(c)
    return normals, offsets


def _det_small(rows):
    """Exact determinant of a small integer matrix (expansion, n <= 3 here)."""
    m = len(rows)
    if m == 0:
        return 1
    if m == 1:
        return rows[0][0]
    if m == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = 0
    for j in range(m):
        sub = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det_small(sub)
        total += term if j % 2 == 0 else -term
    return total


def _count_interior_translates(verts, point):
    """Number of t in Z^n with point + t interior to the simplex `verts`.

    Raises NonGenericPoint when some translate meets the closed boundary.
    Exact: `point` has Fraction coordinates, inequalities are cleared to
    integers before enumeration.
    """
    n = len(point)
    facets = _facet_normals(verts)
    if facets is None:
        return 0  # degenerate: zero orientation sign, contributes nothing
    normals, offsets = facets
    d = 1
    for x in point:
        d = d * x.denominator // gcd(d, x.denominator)
    px = [int(x * d) for x in point]
    # inequality i:  d*(n_i . t) > d*c_i - n_i . (d*point)
    lhs = [tuple(d * a for a in nrm) for nrm in normals]
    rhs = [d * c - sum(a * b for a, b in zip(nrm, px))
           for nrm, c in zip(normals, offsets)]

    lo, hi = [], []
    for axis in range(n):
        cs = [p[axis] for p in verts]
        lo.append(-(-(min(cs) * d - px[axis]) // d) - 1)   # floor-ish slack
        hi.append((max(cs) * d - px[axis]) // d + 1)

    count = 0
    boundary_hit = False

    def rec(axis, t_prefix):
        nonlocal count, boundary_hit
        if axis == n - 1:
            # intersect strict half-lines in the last coordinate
            lo_open, hi_open = lo[axis], hi[axis]
            lo_closed, hi_closed = lo_open, hi_open
            for nrm, r in zip(lhs, rhs):
                a = nrm[axis]
                s = r - sum(nrm[j] * t_prefix[j] for j in range(axis))
                if a == 0:
                    if s > 0:
                        return  # violated for every t_axis
                    if s == 0:
                        boundary_hit = True
                        return
                    continue
                if a > 0:
                    # a * t > s: open bound floor(s/a)+1, closed ceil(s/a)
                    q, rem = divmod(s, a)
                    lo_open = max(lo_open, q + 1)
                    lo_closed = max(lo_closed, q if rem == 0 else q + 1)
                else:
                    q, rem = divmod(s, a)  # a < 0: t < s/a
                    hi_open = min(hi_open, q if rem else q - 1)
                    hi_closed = min(hi_closed, q)
            n_open = max(0, hi_open - lo_open + 1)
            n_closed = max(0, hi_closed - lo_closed + 1)
            if n_closed > n_open:
                boundary_hit = True
            count += n_open
            return
        for t in range(lo[axis], hi[axis] + 1):
            rec(axis + 1, t_prefix + (t,))

    if n == 0:
        return 0
    rec(0, ())
    if boundary_hit:
        raise NonGenericPoint("sample point lies on a face image")
    return count


def degree_at_point(c: TorusChain, point) -> int:
    """Local degree of a top-dimensional chain at a generic rational point.

    Sums, over the terms of c, coefficient x orientation sign x number of
    integer translates of `point` interior to the simplex.  For a cycle this
    is the multiple of the fundamental class it represents.
    """
    if c.degree != c.ambient_dim:
        raise DimensionMismatch("degree oracle needs degree == ambient dim")
    pt = tuple(Fraction(x) for x in point)
    if len(pt) != c.ambient_dim:
        raise DimensionMismatch("point dimension mismatch")
    total = 0
    for simplex, coeff in c.terms.items():
        verts = simplex.vertices
        base = verts[0]
        rows = [tuple(a - b for a, b in zip(p, base)) for p in verts[1:]]
        sgn_det = _det_small([list(r) for r in rows])
        if sgn_det == 0:
            continue
        sign = 1 if sgn_det > 0 else -1
        total += coeff * sign * _count_interior_translates(verts, pt)
    return total


def sample_degree(c: TorusChain, rng, tries: int = 32) -> int:
    """degree_at_point at fresh random rational points with odd denominators.

    Resamples with a larger denominator whenever a non-generic point is hit.
    """
    denom = 101
    for _ in range(tries):
        d = denom if denom % 2 else denom + 1
        pt = tuple(Fraction(rng.randrange(1, d), d) for _ in range(c.ambient_dim))
        try:
            return degree_at_point(c, pt)
        except NonGenericPoint:
            denom = denom * 2 + 1
    raise NonGenericPoint("no generic sample found")


@dataclass(frozen=True)
class HomologyClassVector:
    """Class of a k-parallelogram cycle in H_k(T^n) = Z^C(n,k).

    Entries are the k x k minors of the generator matrix, indexed by row
    subsets in lexicographic order (rows ascending inside each subset).
    For k = n the single entry is the determinant.
    """

    ambient_dim: int
    degree: int
    minors: tuple

    def is_zero(self) -> bool:
        return all(m == 0 for m in self.minors)

    def __add__(self, other):
        self._check(other)
        return HomologyClassVector(self.ambient_dim, self.degree,
                                   tuple(a + b for a, b in zip(self.minors, other.minors)))

    def __sub__(self, other):
        self._check(other)
        return HomologyClassVector(self.ambient_dim, self.degree,
                                   tuple(a - b for a, b in zip(self.minors, other.minors)))

    def _check(self, other):
        if (self.ambient_dim, self.degree) != (other.ambient_dim, other.degree):
            raise DimensionMismatch("class vectors of different type")


def parallelogram_class(vectors, ambient_dim=None) -> HomologyClassVector:
    """Minor vector of the n x k generator matrix (columns = vectors)."""
    vecs = [_as_vertex(u) for u in vectors]
    n = len(vecs[0]) if vecs else ambient_dim
    k = len(vecs)
    minors = []
    for rows in combinations(range(n), k):
        sub = [[vecs[j][r] for j in range(k)] for r in rows]
        minors.append(_det_small(sub))
    return HomologyClassVector(n, k, tuple(minors))
