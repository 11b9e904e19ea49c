"""Exact integer linear algebra: Smith/Hermite normal forms, Diophantine
solving, fraction-free determinants, characteristic polynomials, cokernels.

Everything is arbitrary-precision; normal-form results carry their unimodular
transforms and are re-verified by multiplication before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch, NonSquare


@dataclass(frozen=True)
class IntMatrix:
    """Immutable rectangular integer matrix."""

    data: tuple  # tuple of row tuples

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.data)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise DimensionMismatch("ragged rows")
        object.__setattr__(self, "data", rows)

    @property
    def rows(self) -> int:
        return len(self.data)

    @property
    def cols(self) -> int:
        return len(self.data[0]) if self.data else 0

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(n))
                               for i in range(n)))

    @staticmethod
    def zero(r: int, c: int) -> "IntMatrix":
        return IntMatrix(tuple((0,) * c for _ in range(r)))

    def __getitem__(self, ij):
        return self.data[ij[0]][ij[1]]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.data)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.data))) if self.data else self

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix addition shape mismatch")
        return IntMatrix(tuple(tuple(a + b for a, b in zip(r1, r2))
                               for r1, r2 in zip(self.data, other.data)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix subtraction shape mismatch")
        return IntMatrix(tuple(tuple(a - b for a, b in zip(r1, r2))
                               for r1, r2 in zip(self.data, other.data)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch("matrix product shape mismatch")
        bt = list(zip(*other.data))
        return IntMatrix(tuple(tuple(sum(a * b for a, b in zip(row, col))
                                     for col in bt)
                               for row in self.data))

    def apply(self, vec) -> tuple:
        vec = tuple(int(x) for x in vec)
        if len(vec) != self.cols:
            raise DimensionMismatch("vector length != matrix cols")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.data)

    def max_abs(self) -> int:
        return max((abs(x) for r in self.data for x in r), default=0)

    def is_square(self) -> bool:
        return self.rows == self.cols


def mat_pow(a: IntMatrix, k: int) -> IntMatrix:
    """A^k by binary powering, k >= 0."""
    if not a.is_square():
        raise NonSquare("mat_pow needs a square matrix")
    if k < 0:
        raise ValueError("negative powers not supported")
    result = IntMatrix.identity(a.rows)
    base = a
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def det_exact(a: IntMatrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    if not a.is_square():
        raise NonSquare("determinant of a non-square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = [list(r) for r in a.data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def charpoly(a: IntMatrix) -> tuple:
    """Monic characteristic polynomial, coefficients descending.

    Faddeev-LeVerrier recursion; the per-step trace divisions are exact over
    the integers, so every intermediate stays integral.
    """
    if not a.is_square():
        raise NonSquare("charpoly of a non-square matrix")
    n = a.rows
    coeffs = [1]
    m = IntMatrix.identity(n)
    for k in range(1, n + 1):
        m = a @ m
        tr = sum(m.data[i][i] for i in range(n))
        q, r = divmod(-tr, k)
        assert r == 0, "Faddeev-LeVerrier division must be exact"
        coeffs.append(q)
        if k < n:
            m = m + IntMatrix(tuple(tuple(q if i == j else 0 for j in range(n))
                                    for i in range(n)))
    return tuple(coeffs)


@dataclass(frozen=True)
class SnfResult:
    """P @ original @ Q = D with P, Q unimodular and D = diag(d_1..d_r, 0..),
    d_i > 0 and d_i | d_{i+1}."""

    p: IntMatrix
    q: IntMatrix
    d: IntMatrix
    original: IntMatrix

    def diagonal(self) -> tuple:
        return tuple(self.d.data[i][i] for i in range(min(self.d.rows, self.d.cols)))


def snf(a: IntMatrix) -> SnfResult:
    """Smith normal form with transforms, re-verified by multiplication.

    Pivoting: smallest-magnitude nonzero entry, full row/column sweeps, then a
    divisibility sweep over the remaining block.  Entry growth is accepted;
    everything is arbitrary precision.
    """
    r, c = a.rows, a.cols
    m = [list(row) for row in a.data]
    p = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    q = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        p[i], p[j] = p[j], p[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in q:
            row[i], row[j] = row[j], row[i]

    def addmul_row(dst, src, f):
        mrow, srow = m[dst], m[src]
        for j in range(c):
            mrow[j] += f * srow[j]
        prow, psrc = p[dst], p[src]
        for j in range(r):
            prow[j] += f * psrc[j]

    def addmul_col(dst, src, f):
        for row in m:
            row[dst] += f * row[src]
        for row in q:
            row[dst] += f * row[src]

    t = 0
    while t < min(r, c):
        # smallest-magnitude nonzero pivot in the trailing block
        piv = None
        best = None
        for i in range(t, r):
            for j in range(t, c):
                v = m[i][j]
                if v and (best is None or abs(v) < best):
                    best = abs(v)
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            # clear column t
            dirty = False
            for i in range(t + 1, r):
                if m[i][t]:
                    f = m[i][t] // m[t][t]
                    addmul_row(i, t, -f)
                    if m[i][t]:
                        swap_rows(t, i)
                        dirty = True
            if dirty:
                continue
            # clear row t
            for j in range(t + 1, c):
                if m[t][j]:
                    f = m[t][j] // m[t][t]
                    addmul_col(j, t, -f)
                    if m[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if dirty:
                continue
            # pivot must divide the remaining block
            witness = None
            for i in range(t + 1, r):
                for j in range(t + 1, c):
                    if m[i][j] % m[t][t]:
                        witness = i
                        break
                if witness is not None:
                    break
            if witness is None:
                break
            addmul_row(t, witness, 1)
        if m[t][t] < 0:
            for j in range(c):
                m[t][j] = -m[t][j]
            for j in range(r):
                p[t][j] = -p[t][j]
        t += 1

    result = SnfResult(IntMatrix(tuple(map(tuple, p))),
                       IntMatrix(tuple(map(tuple, q))),
                       IntMatrix(tuple(map(tuple, m))),
                       a)
    _verify_snf(result)
    return result


def _verify_snf(res: SnfResult):
    prod = (res.p @ res.original) @ res.q
    assert prod.data == res.d.data, "SNF transform check failed"
    diag = res.diagonal()
    for i in range(res.d.rows):
        for j in range(res.d.cols):
            if j != i:
                assert res.d.data[i][j] == 0, "SNF not diagonal"
    seen_zero = False
    for i, v in enumerate(diag):
        assert v >= 0, "SNF diagonal must be nonnegative"
        if v == 0:
            seen_zero = True
        else:
            assert not seen_zero, "zero before nonzero on SNF diagonal"
            if i + 1 < len(diag) and diag[i + 1]:
                assert diag[i + 1] % v == 0, "SNF divisibility chain broken"


@dataclass(frozen=True)
class HnfResult:
    """Column Hermite normal form: original @ U = H with U unimodular.

    H is a lower staircase: pivots positive and descending left to right,
    zeros to the right of each pivot in its row, entries left of a pivot
    reduced into [0, pivot).
    """

    h: IntMatrix
    u: IntMatrix
    pivots: tuple  # (row, col) per pivot


def hnf(a: IntMatrix) -> HnfResult:
    r, c = a.rows, a.cols
    m = [list(row) for row in a.data]
    u = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    def addmul_col(dst, src, f):
        for row in m:
            row[dst] += f * row[src]
        for row in u:
            row[dst] += f * row[src]

    def combine_cols(j1, j2, x, y, xx, yy):
        # col j1 <- x*col j1 + y*col j2 ; col j2 <- xx*col j1 + yy*col j2
        for row in m:
            a1, a2 = row[j1], row[j2]
            row[j1] = x * a1 + y * a2
            row[j2] = xx * a1 + yy * a2
        for row in u:
            a1, a2 = row[j1], row[j2]
            row[j1] = x * a1 + y * a2
            row[j2] = xx * a1 + yy * a2

    pivots = []
    pivot_col = 0
    for i in range(r):
        if pivot_col >= c:
            break
        j_nonzero = [j for j in range(pivot_col, c) if m[i][j]]
        if not j_nonzero:
            continue
        j0 = j_nonzero[0]
        if j0 != pivot_col:
            for row in m:
                row[pivot_col], row[j0] = row[j0], row[pivot_col]
            for row in u:
                row[pivot_col], row[j0] = row[j0], row[pivot_col]
        for j in range(pivot_col + 1, c):
            if m[i][j]:
                aa, bb = m[i][pivot_col], m[i][j]
                x, y, g = _xgcd(aa, bb)
                combine_cols(pivot_col, j, x, y, -(bb // g), aa // g)
        if m[i][pivot_col] < 0:
            for row in m:
                row[pivot_col] = -row[pivot_col]
            for row in u:
                row[pivot_col] = -row[pivot_col]
        piv = m[i][pivot_col]
        for j in range(pivot_col):
            f = m[i][j] // piv
            if f:
                addmul_col(j, pivot_col, -f)
        pivots.append((i, pivot_col))
        pivot_col += 1

    result = HnfResult(IntMatrix(tuple(map(tuple, m))),
                       IntMatrix(tuple(map(tuple, u))),
                       tuple(pivots))
    assert (a @ result.u).data == result.h.data, "HNF transform check failed"
    return result


def _xgcd(a, b):
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        qq = g // ng
        x, nx = nx, x - qq * nx
        y, ny = ny, y - qq * ny
        g, ng = ng, g - qq * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def solve_diophantine(a: IntMatrix, b):
    """One integer solution x of A x = b, or None when b is not in the
    column lattice (certified via the Hermite form).

    The returned solution is re-verified by multiplication.
    """
    b = tuple(int(x) for x in b)
    if len(b) != a.rows:
        raise DimensionMismatch("rhs length != matrix rows")
    res = hnf(a)
    h = res.h
    y = [0] * a.cols
    piv_by_row = dict(res.pivots)
    n_piv = 0
    for i in range(a.rows):
        s = b[i] - sum(h.data[i][j] * y[j] for j in range(n_piv))
        if i in piv_by_row:
            col = piv_by_row[i]
            piv = h.data[i][col]
            q, r = divmod(s, piv)
            if r:
                return None
            y[col] = q
            n_piv += 1
        elif s:
            return None
    x = res.u.apply(y)
    assert a.apply(x) == b, "Diophantine solution failed re-verification"
    return x


def lattice_rank(a: IntMatrix) -> int:
    """Rank of the column lattice."""
    return len(hnf(a).pivots)


def column_lattice_basis(a: IntMatrix) -> IntMatrix:
    """Matrix whose columns are a lattice basis of the column span of A."""
    res = hnf(a)
    cols = [res.h.column(c) for _, c in res.pivots]
    return IntMatrix(tuple(zip(*cols))) if cols else IntMatrix.zero(a.rows, 0)


@dataclass(frozen=True)
class CokernelStructure:
    """Invariant-factor description of Z^n / im(A)."""

    torsion_factors: tuple  # invariant factors > 1, each dividing the next
    free_rank: int
    torsion_order: int


def coker_structure(a: IntMatrix) -> CokernelStructure:
    """Cokernel of a square integer matrix from its Smith form."""
    res = snf(a)
    diag = res.diagonal()
    nonzero = [d for d in diag if d]
    factors = tuple(d for d in nonzero if d > 1)
    free = a.rows - len(nonzero)
    order = 1
    for d in nonzero:
        order *= d
    return CokernelStructure(factors, free, order)
