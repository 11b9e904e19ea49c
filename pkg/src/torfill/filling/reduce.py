"""Top-level reduction: a parallelogram cycle to its rectangle normal form.

Pipeline: split generators along the last coordinate and recurse the
singleton terms (paral_to_rects), fill the linearly dependent remainders
(slim_reduce), normalize each rectangle to unit heights by the four-slide
schedule (rect_to_unit), and merge the unit rectangles (combine_rects).
The assembled witness satisfies boundary(witness) = Q(columns) - R(det, 1..1)
with exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..chains import (LinearTorusMap, TorusChain, parallelogram_cycle,
                      rectangle_cycle)
from ..errors import NotDependent, UnsupportedDimension
from ..exactlinalg import IntMatrix, det_exact, hnf, mat_pow
from .certificate import FillingCertificate, Piece, require_valid
from .moves import (_add_vec, _scale_vec, _vec, move_negate, move_split,
                    move_zero_gen, primitive_decomposition, s1_piece,
                    slide_first, slide_second)


def _gens_matrix(gens) -> IntMatrix:
    n = len(gens[0])
    return IntMatrix(tuple(tuple(g[i] for g in gens) for i in range(n)))


def _dependency(gens):
    """Primitive integer relation sum c_i * gens_i = 0, or None."""
    a = _gens_matrix(gens)
    res = hnf(a)
    pivot_cols = {c for _, c in res.pivots}
    for j in range(a.cols):
        if j not in pivot_cols:
            rel = res.u.column(j)
            g = 0
            for x in rel:
                g = math.gcd(g, abs(x))
            return tuple(x // g for x in rel)
    return None


def _parallel_pair(gens):
    """(i, j, u0, alpha, beta) with gens[i] = alpha*u0, gens[j] = beta*u0."""
    for i in range(len(gens)):
        if not any(gens[i]):
            continue
        d_i, u0 = primitive_decomposition(gens[i])
        for j in range(i + 1, len(gens)):
            if not any(gens[j]):
                continue
            nz = next(t for t, x in enumerate(u0) if x)
            beta, r = divmod(gens[j][nz], u0[nz])
            if r == 0 and _scale_vec(beta, u0) == gens[j]:
                return i, j, u0, d_i, beta
    return None


def _move_to_front_sign(k, i, j):
    """Sign of the permutation sending positions i < j to the front (exact)."""
    swaps = i + (j - 1)  # bubble i to 0, then j to 1
    return -1 if swaps % 2 else 1


def slim_piece(gens, cache=None) -> Piece:
    """Piece with target Q(gens) for linearly dependent generators."""
    gens = tuple(_vec(g) for g in gens)
    k = len(gens)
    n = len(gens[0])
    zero = (0,) * n

    if zero in gens:
        return move_zero_gen(gens, cache)

    pair = _parallel_pair(gens)
    if pair is not None:
        i, j, u0, alpha, beta = pair
        inner, _ = s1_piece(alpha, beta, cache)
        piece = inner.pushforward(LinearTorusMap.from_columns([u0]))
        rest = [gens[t] for t in range(k) if t not in (i, j)]
        for v in rest:
            piece = piece.prism_lift(v)
        sign = _move_to_front_sign(k, i, j)
        piece = piece.scale(sign)
        assert piece.target == parallelogram_cycle(gens)
        return piece

    if k > 3:
        raise UnsupportedDimension("slim reduction supported up to 3 generators")

    # general integral dependence: Euclidean quotient-splitting
    rel = _dependency(gens)
    assert rel is not None and all(rel), "expected a full-support relation"
    i = max(range(k), key=lambda t: abs(rel[t]))
    j = min((t for t in range(k) if t != i), key=lambda t: abs(rel[t]))
    # split gens[j] = (gens[j] + s*gens[i]) + (-s*gens[i]); the second term
    # gives a parallel pair with gens[i], the first shrinks the relation
    s = _round_div(rel[i], rel[j])
    v1 = _add_vec(gens[j], _scale_vec(s, gens[i]))
    v2 = _scale_vec(-s, gens[i])
    piece = move_split(gens, j, v1, v2, cache)
    with_pair = gens[:j] + (v2,) + gens[j + 1:]
    remainder = gens[:j] + (v1,) + gens[j + 1:]
    piece = piece + slim_piece(with_pair, cache) + slim_piece(remainder, cache)
    assert piece.target == parallelogram_cycle(gens)
    return piece


def _round_div(a, b) -> int:
    q, r = divmod(a, b)
    if 2 * abs(r) > abs(b):
        q += 1 if b > 0 else -1
    return q


def slim_reduce(gens, cache=None) -> FillingCertificate:
    """Certificate for Q(gens) when the generators are linearly dependent."""
    gens = tuple(_vec(g) for g in gens)
    if len(hnf(_gens_matrix(gens)).pivots) == len(gens):
        raise NotDependent("generators are linearly independent")
    return slim_piece(gens, cache).certificate()


def _paral_to_rects_piece(gens, cache=None):
    """(signed rectangle sizes, piece) with
    piece.target = Q(gens) - sum_i eps_i R(sizes_i)."""
    gens = tuple(_vec(g) for g in gens)
    n = len(gens[0])
    assert len(gens) == n
    if n == 1:
        return [(1, (gens[0][0],))], Piece.zero(1, 1)
    zero = (0,) * n
    if zero in gens:
        return [], move_zero_gen(gens, cache)

    piece = Piece.zero(n, n)
    leaves = [gens]
    for pos in range(n):
        new_leaves = []
        for leaf in leaves:
            v = leaf[pos]
            v_par = tuple(0 if t < n - 1 else v[n - 1] for t in range(n))
            v_perp = tuple(x - y for x, y in zip(v, v_par))
            if not any(v_par) or not any(v_perp):
                new_leaves.append(leaf)
                continue
            piece = piece + move_split(leaf, pos, v_perp, v_par, cache)
            new_leaves.append(leaf[:pos] + (v_perp,) + leaf[pos + 1:])
            new_leaves.append(leaf[:pos] + (v_par,) + leaf[pos + 1:])
        leaves = new_leaves

    rects = []
    for leaf in leaves:
        par_positions = [t for t in range(n) if leaf[t][n - 1] != 0]
        if len(par_positions) == 1:
            p = par_positions[0]
            height = leaf[p][n - 1]
            inner_gens = tuple(leaf[t][:n - 1] for t in range(n) if t != p)
            inner_rects, inner_piece = _paral_to_rects_piece(inner_gens, cache)
            embed = LinearTorusMap(tuple(
                tuple(1 if (i == j and i < n - 1) else 0 for j in range(n - 1))
                for i in range(n)))
            lifted = inner_piece.pushforward(embed).prism_lift(
                tuple(0 if t < n - 1 else height for t in range(n)))
            sign = -1 if (n - 1 - p) % 2 else 1
            piece = piece + lifted.scale(sign)
            rects.extend((sign * eps, sizes + (height,))
                         for eps, sizes in inner_rects)
        else:
            piece = piece + slim_piece(leaf, cache)

    expected = parallelogram_cycle(gens)
    for eps, sizes in rects:
        expected = expected - rectangle_cycle(sizes).scale(eps)
    assert piece.target == expected
    return rects, piece


def paral_to_rects(gens, cache=None):
    """Decompose Q(gens) against at most n! signed rectangle cycles.

    Returns (rect descriptors, certificate); each descriptor is
    (sign, sizes) with all sizes bounded by max |gens|_inf.
    """
    rects, piece = _paral_to_rects_piece(gens, cache)
    return rects, piece.certificate()


def _rect_to_unit_piece(sizes, cache=None) -> Piece:
    """piece.target = R(sizes) - R(prod(sizes), 1, .., 1)."""
    sizes = tuple(int(a) for a in sizes)
    n = len(sizes)
    if n == 1 or all(a == 1 for a in sizes[1:]):
        return Piece.zero(n, n)
    if any(a == 0 for a in sizes):
        gens = tuple(_scale_vec(sizes[t], _unit(n, t)) for t in range(n))
        unit_gens = (_scale_vec(0, _unit(n, 0)),) + tuple(
            _unit(n, t) for t in range(1, n))
        return (move_zero_gen(gens, cache)
                - move_zero_gen(unit_gens, cache))
    if n == 2:
        return _rect_to_unit_2d(sizes, cache)
    if n > 3:
        raise UnsupportedDimension("rectangle normalization needs n <= 3")

    a1, mid, an = sizes[0], sizes[1:-1], sizes[-1]
    plane = _rect_to_unit_2d((a1, an), cache)
    embed = LinearTorusMap(tuple(
        tuple(1 if (i == 0 and j == 0) or (i == n - 1 and j == 1) else 0
              for j in range(2)) for i in range(n)))
    lifted = plane.pushforward(embed)
    for t, a in enumerate(mid):
        lifted = lifted.prism_lift(_scale_vec(a, _unit(n, 1 + t)))
    sign = -1 if (n - 2) % 2 else 1
    phase_a = lifted.scale(sign)
    assert phase_a.target == (rectangle_cycle(sizes)
                              - rectangle_cycle((a1 * an,) + mid + (1,)))

    inner = _rect_to_unit_piece((a1 * an,) + mid, cache)
    embed2 = LinearTorusMap(tuple(
        tuple(1 if i == j else 0 for j in range(n - 1)) for i in range(n)))
    phase_b = inner.pushforward(embed2).prism_lift(_unit(n, n - 1))
    piece = phase_a + phase_b
    prod = 1
    for a in sizes:
        prod *= a
    assert piece.target == (rectangle_cycle(sizes)
                            - rectangle_cycle((prod,) + (1,) * (n - 1)))
    return piece


def _unit(n, i):
    return tuple(1 if t == i else 0 for t in range(n))


def _rect_to_unit_2d(sizes, cache=None) -> Piece:
    """Four-slide schedule in the plane; the fourth slide is skipped when
    the first size is 1."""
    a, b = sizes
    if b == 1:
        return Piece.zero(2, 2)  # R(a, 1) is already in unit-height form
    e1, e2 = (1, 0), (0, 1)
    v, w = _scale_vec(a, e1), _scale_vec(b, e2)
    steps = []

    delta1 = _scale_vec(b, e1)
    steps.append(slide_second(v, w, delta1, cache))
    w = _add_vec(w, delta1)  # (b, b)

    delta2 = (-1, -1)
    steps.append(slide_first(v, w, delta2, cache))
    v = _add_vec(v, delta2)  # (a-1, -1)

    delta3 = _scale_vec(b, v)
    steps.append(slide_second(v, w, delta3, cache))
    w = _add_vec(w, delta3)  # (a*b, 0)

    if a != 1:
        delta4 = _scale_vec(1 - a, e1)
        steps.append(slide_first(v, w, delta4, cache))
        v = _add_vec(v, delta4)  # (0, -1)
    assert v == (0, -1) and w == (a * b, 0)

    total = Piece.zero(2, 2)
    for s in steps:
        total = total + s
    # total.target = Q((0,-1),(ab,0)) - R(a, b); negate the -e2 generator
    neg = move_negate((_scale_vec(a * b, e1), (0, -1)), 1, cache)
    piece = -total - neg
    assert piece.target == (rectangle_cycle(sizes)
                            - rectangle_cycle((a * b, 1)))
    return piece


def rect_to_unit(sizes, cache=None) -> FillingCertificate:
    """Certificate for R(sizes) - R(prod sizes, 1, .., 1)."""
    return _rect_to_unit_piece(sizes, cache).certificate()


def _combine_rects_piece(signed_lengths, n, cache=None):
    """piece.target = sum_i eps_i R(l_i, 1..1) - R(sum eps_i l_i, 1..1)."""
    piece = Piece.zero(n, n)
    total_chain = TorusChain.zero(n, n)
    normalized = []
    for eps, length in signed_lengths:
        total_chain = total_chain + rectangle_cycle(
            (length,) + (1,) * (n - 1)).scale(eps)
        if eps == -1:
            gens = (_scale_vec(length, _unit(n, 0)),) + tuple(
                _unit(n, t) for t in range(1, n))
            piece = piece - move_negate(gens, 0, cache)
            normalized.append(-length)
        else:
            normalized.append(length)
    if not normalized:
        gens0 = (_scale_vec(0, _unit(n, 0)),) + tuple(
            _unit(n, t) for t in range(1, n))
        return 0, piece - move_zero_gen(gens0, cache)
    running = normalized[0]
    unit_tail = tuple(_unit(n, t) for t in range(1, n))
    for length in normalized[1:]:
        gens = (_scale_vec(running + length, _unit(n, 0)),) + unit_tail
        piece = piece - move_split(gens, 0,
                                   _scale_vec(running, _unit(n, 0)),
                                   _scale_vec(length, _unit(n, 0)), cache)
        running += length
    assert piece.target == total_chain - rectangle_cycle(
        (running,) + (1,) * (n - 1))
    return running, piece


def combine_rects(signed_lengths, n, cache=None):
    """(total length, certificate) for merging signed unit rectangles."""
    total, piece = _combine_rects_piece(signed_lengths, n, cache)
    return total, piece.certificate()


@dataclass(frozen=True)
class ReductionReport:
    """Certificate and walk data for Q(columns of A) -> R(det A, 1, .., 1)."""

    matrix: IntMatrix
    certificate: FillingCertificate
    trace: tuple
    cost: int
    det: int
    log2_norm: float
    k_hat: float = None


def reduce_parallelogram(a: IntMatrix, cache=None,
                         verify: bool = True) -> ReductionReport:
    """Full reduction of the parallelogram cycle on the columns of A."""
    n = a.rows
    if n != a.cols:
        raise UnsupportedDimension("reduce_parallelogram needs a square matrix")
    if n > 3:
        raise UnsupportedDimension("desk scale supports n <= 3")
    gens = tuple(a.column(j) for j in range(n))
    rects, piece = _paral_to_rects_piece(gens, cache)
    lengths = []
    for eps, sizes in rects:
        piece = piece + _rect_to_unit_piece(sizes, cache).scale(eps)
        prod = 1
        for s in sizes:
            prod *= s
        lengths.append((eps, prod))
    total, combine_piece = _combine_rects_piece(lengths, n, cache)
    piece = piece + combine_piece

    det = det_exact(a)
    assert total == det, "class bookkeeping: combined length must equal det"
    expected = (parallelogram_cycle(gens)
                - rectangle_cycle((det,) + (1,) * (n - 1)))
    assert piece.target == expected

    witness, records = piece.assemble()
    cert = FillingCertificate.build(piece.target, witness)
    if verify:
        unit_rect_gens = tuple(
            _scale_vec(det if t == 0 else 1, _unit(n, t)) for t in range(n))
        require_valid(cert, presentation=[(1, gens), (-1, unit_rect_gens)])
    norm = a.max_abs()
    return ReductionReport(a, cert, records, cert.cost, det,
                           math.log2(norm) if norm else 0.0)


@dataclass(frozen=True)
class UpperBoundExperiment:
    """Per-power reduction costs for det-1 matrices and the fitted slope."""

    matrix: IntMatrix
    rows: tuple  # (j, cost, cost/j, log2 |A^j|_inf)
    k_hat: float  # least-squares slope of cost against log2 |A^j|_inf


def fv_upper_experiment(a: IntMatrix, j_max: int, cache=None,
                        verify: bool = True) -> UpperBoundExperiment:
    """Reduce A^j for j = 1..j_max (target is the standard fundamental
    rectangle since det A = 1) and fit cost against log2 of the power norm."""
    if det_exact(a) != 1:
        raise UnsupportedDimension("fv_upper_experiment requires det A = 1")
    rows = []
    for j in range(1, j_max + 1):
        report = reduce_parallelogram(mat_pow(a, j), cache, verify=verify)
        rows.append((j, report.cost, report.cost / j, report.log2_norm))
    xs = [r[3] for r in rows]
    ys = [r[1] for r in rows]
    k_hat = _ls_slope(xs, ys)
    return UpperBoundExperiment(a, tuple(rows), k_hat)


def _ls_slope(xs, ys) -> float:
    m = len(xs)
    if m < 2:
        return 0.0
    mean_x = sum(xs) / m
    mean_y = sum(ys) / m
    denom = sum((x - mean_x) ** 2 for x in xs)
    if denom == 0:
        return 0.0
    return sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys)) / denom
