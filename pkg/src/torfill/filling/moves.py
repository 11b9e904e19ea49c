"""Composite moves: the constant-cost steps of the reduction walk, realized
as pushforwards or prism lifts of cached base certificates.

Prism operators anticommute exactly under the adopted sign convention, so
generator permutations act on parallelogram cycles by their sign at the
chain level; rearrangements are therefore exact zero-cost moves, and the
move table below only ever solves for negation, splitting, zero-generator,
Dehn-step, and double-halve certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..chains import (LinearTorusMap, TorusChain, parallelogram_cycle,
                      pushforward, simplex_chain)
from ..errors import UnsupportedDimension
from .base import base_certificate
from .certificate import FillingCertificate, Piece

Vec = tuple


def _vec(v) -> Vec:
    return tuple(int(x) for x in v)


def _scale_vec(k, v) -> Vec:
    return tuple(k * x for x in v)


def _add_vec(u, v) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def _content(v) -> int:
    g = 0
    for x in v:
        g = math.gcd(g, abs(x))
    return g


def primitive_decomposition(v):
    """v = d * u0 with d > 0 and u0 primitive (same direction as v)."""
    v = _vec(v)
    d = _content(v)
    if d == 0:
        raise ValueError("zero vector has no primitive direction")
    return d, tuple(x // d for x in v)


def _base_piece(key, kind, params, columns, cycles, cache=None) -> Piece:
    """Pushforward of a base certificate along the map E_i -> columns[i]."""
    cert = base_certificate(key, cache)
    f = LinearTorusMap.from_columns(columns)
    target = pushforward(f, cert.target)
    witness = pushforward(f, cert.witness)
    return Piece.move(kind, params, target, witness, cycles)


def move_negate(gens, pos, cache=None) -> Piece:
    """Target Q(gens) + Q(gens with -v at pos)."""
    gens = tuple(_vec(g) for g in gens)
    k = len(gens)
    if k < 2 or k > 3:
        raise UnsupportedDimension("negation supported for 2 or 3 generators")
    if pos == 0:
        neg = (_scale_vec(-1, gens[0]),) + gens[1:]
        if k == 2:
            piece = _base_piece(("NEGATE", 2), "NEGATE", (0, gens),
                                [gens[0], gens[1]],
                                [(1, gens), (1, neg)], cache)
        else:
            inner = move_negate(gens[:2], 0, cache)
            piece = inner.prism_lift(gens[2])
        assert piece.target == parallelogram_cycle(gens) + parallelogram_cycle(neg)
        return piece
    # conjugate by an exact transposition: Q(..a,b..) = -Q(..b,a..)
    swapped = list(gens)
    swapped[pos - 1], swapped[pos] = swapped[pos], swapped[pos - 1]
    return -move_negate(tuple(swapped), pos - 1, cache)


def move_split(gens, pos, v1, v2, cache=None) -> Piece:
    """Target Q(gens) - Q(gens[pos -> v1]) - Q(gens[pos -> v2]);
    requires gens[pos] = v1 + v2."""
    gens = tuple(_vec(g) for g in gens)
    v1, v2 = _vec(v1), _vec(v2)
    assert _add_vec(v1, v2) == gens[pos], "split parts must sum to the generator"
    k = len(gens)
    if k == 2 and pos == 1:
        piece = _base_piece(
            ("SPLIT", 2), "SPLIT", (pos, gens, v1, v2),
            [gens[0], v1, v2],
            [(1, gens), (-1, (gens[0], v1)), (-1, (gens[0], v2))], cache)
    elif k == 2 and pos == 0:
        piece = -move_split((gens[1], gens[0]), 1, v1, v2, cache)
    elif k == 3 and pos < 2:
        piece = move_split(gens[:2], pos, v1, v2, cache).prism_lift(gens[2])
    elif k == 3 and pos == 2:
        swapped = (gens[0], gens[2], gens[1])
        piece = -move_split(swapped, 1, v1, v2, cache)
    else:
        raise UnsupportedDimension("split supported for 2 or 3 generators")
    expected = parallelogram_cycle(gens)
    for part in (v1, v2):
        sub = gens[:pos] + (part,) + gens[pos + 1:]
        expected = expected - parallelogram_cycle(sub)
    assert piece.target == expected
    return piece


def move_zero_gen(gens, cache=None) -> Piece:
    """Target Q(gens), where some generator is the zero vector."""
    gens = tuple(_vec(g) for g in gens)
    k = len(gens)
    n = len(gens[0])
    zero = (0,) * n
    pos = gens.index(zero)
    if k == 1:
        # Q(0) = [0,0] bounds the constant 2-simplex [0,0,0] exactly
        witness = simplex_chain([zero, zero, zero])
        return Piece.move("ZERO_GEN", (0, gens), parallelogram_cycle(gens),
                          witness, [(1, gens)])
    if k - 1 not in (1, 2):
        raise UnsupportedDimension("zero-generator fill needs k <= 3")
    moved = gens[:pos] + gens[pos + 1:] + (zero,)
    sign = -1 if (k - 1 - pos) % 2 else 1
    piece = _base_piece(("ZERO", k - 1), "ZERO_GEN", (pos, gens),
                        list(moved[:-1]), [(1, moved)], cache).scale(sign)
    assert piece.target == parallelogram_cycle(gens)
    return piece


def move_dehn(x, y, kappa, cache=None) -> Piece:
    """Target Q(x, y) - Q(x, y - kappa*x) on the circle, kappa in 0..3."""
    if kappa == 0:
        return Piece.zero(1, 2)
    piece = _base_piece(
        ("DEHN", kappa), "DEHN", (kappa, x, y), [(x,), (y,)],
        [(1, ((x,), (y,))), (-1, ((x,), (y - kappa * x,)))], cache)
    assert piece.target == (parallelogram_cycle([(x,), (y,)])
                            - parallelogram_cycle([(x,), (y - kappa * x,)]))
    return piece


def move_double_halve(x, y, cache=None) -> Piece:
    """Target Q(x, y) - Q(2x, y/2) on the circle; y must be even."""
    assert y % 2 == 0
    piece = _base_piece(
        ("DOUBLE_HALVE",), "DOUBLE_HALVE", (x, y), [(x,), (y // 2,)],
        [(1, ((x,), (y,))), (-1, ((2 * x,), (y // 2,)))], cache)
    assert piece.target == (parallelogram_cycle([(x,), (y,)])
                            - parallelogram_cycle([(2 * x,), (y // 2,)]))
    return piece


# ---------------------------------------------------------------------------
# the S^1 slim algorithm
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class S1Trace:
    """Execution trace of the two-phase circle reduction of Q(a, l).

    phase1: (x_i, y_i, k_i) rows of the doubling recursion on Q(1, .);
    phase2: the halving sequence a_i of |a| with its odd/even index sets.
    Invariants: x_i = 2^i, 2^i | y_i, y_M = 0, M <= 1 + log2(phase1_input)/2,
    a_i <= |a| / 2^i, L = l * (2^N + sum_{i in I_o} 2^i) = |a| * |l|.
    """

    a: int
    l: int
    phase1: tuple  # (x_i, y_i, k_i)
    phase2: tuple  # a_0, .., a_N
    odd_indices: tuple
    even_indices: tuple
    n_steps: int  # N
    m_steps: int  # M = len(phase1)
    total: int  # L
    phase1_input: int
    move_count: int


def s1_moves(a: int, l: int):
    """Move schedule filling Q(a, l) in T^1, shared by the certificate
    builder and the sweep counter.

    Returns (moves, trace); each move is (sign, kind, args) with the
    invariant  Q(a, l) = sum_i sign_i * target_i  exactly.
    """
    a, l = int(a), int(l)
    moves = []
    sign = 1
    x, y = a, l

    if y == 0:
        trace = S1Trace(a, l, (), (), (), (), 0, 0, 0, 0, 1)
        moves.append((sign, "ZERO", (x,)))
        return moves, trace
    if x == 0:
        # Q(0, y) = -Q(y, 0) exactly
        trace = S1Trace(a, l, (), (), (), (), 0, 0, 0, 0, 1)
        moves.append((-sign, "ZERO", (y,)))
        return moves, trace

    if x < 0:
        moves.append((sign, "NEG1", (x, y)))
        sign, x = -sign, -x
    if y < 0:
        moves.append((sign, "NEG2", (x, y)))
        sign, y = -sign, -y

    # phase 2: halve the first generator, doubling the second
    phase2 = [x]
    odd, even = [], []
    pending = []  # second components of the split-off Q(1, .) remainders
    i = 0
    while x > 1:
        second = (1 << i) * y
        if x % 2 == 0:
            even.append(i)
        else:
            odd.append(i)
            moves.append((sign, "SPLIT1", (x, second, x - 1, 1)))
            pending.append(second)
            x -= 1
        moves.append((-sign, "DH", (x // 2, 2 * second)))
        x //= 2
        i += 1
        phase2.append(x)
    n_steps = i

    big_l = (1 << n_steps) * y
    for extra in reversed(pending):
        moves.append((-sign, "SPLIT2", (1, big_l + extra, big_l, extra)))
        big_l += extra

    # phase 1 on Q(1, big_l)
    phase1 = []
    x1, y1 = 1, big_l
    while y1 >= x1:
        i = x1.bit_length() - 1
        k = (y1 // x1) % 4
        phase1.append((x1, y1, k))
        if k:
            moves.append((sign, "DEHN", (x1, y1, k)))
            y1 -= k * x1
        moves.append((sign, "DH", (x1, y1)))
        x1, y1 = 2 * x1, y1 // 2
    assert y1 == 0, "phase 1 must land on a zero second generator"
    moves.append((sign, "ZERO", (x1,)))

    trace = S1Trace(a, l, tuple(phase1), tuple(phase2), tuple(odd),
                    tuple(even), n_steps, len(phase1), big_l, big_l,
                    len(moves))
    return moves, trace


def _s1_move_piece(sign, kind, args, cache=None) -> Piece:
    if kind == "NEG1":
        x, y = args
        piece = move_negate(((x,), (y,)), 0, cache)
    elif kind == "NEG2":
        x, y = args
        piece = move_negate(((x,), (y,)), 1, cache)
    elif kind == "DEHN":
        x, y, k = args
        piece = move_dehn(x, y, k, cache)
    elif kind == "DH":
        x, y = args
        piece = move_double_halve(x, y, cache)
    elif kind == "SPLIT1":
        x, y, p1, p2 = args
        piece = move_split(((x,), (y,)), 0, (p1,), (p2,), cache)
    elif kind == "SPLIT2":
        x, y, p1, p2 = args
        piece = move_split(((x,), (y,)), 1, (p1,), (p2,), cache)
    elif kind == "ZERO":
        piece = move_zero_gen(((args[0],), (0,)), cache)
    else:
        raise ValueError("unknown S1 move kind %r" % kind)
    return piece.scale(sign)


def s1_piece(a: int, l: int, cache=None):
    """Piece with target Q(a, l) in T^1, plus its trace."""
    moves, trace = s1_moves(a, l)
    acc = Piece.zero(1, 2)
    for sign, kind, args in moves:
        acc = acc + _s1_move_piece(sign, kind, args, cache)
    assert acc.target == parallelogram_cycle([(a,), (l,)])
    return acc, trace


def s1_reduce(a: int, l: int, cache=None):
    """Certificate for the 2-parallelogram Q(a, l) in the circle, with the
    trace of the doubling/halving schedule.  Move count is O(log|al|)."""
    piece, trace = s1_piece(a, l, cache)
    return piece.certificate(), trace


def slide(u0, d, m, w, cache=None) -> Piece:
    """Target Q(d*u0, w + m*u0) - Q(d*u0, w): one split plus the circle
    certificate for Q(d, m) pushed along t -> t*u0."""
    u0, w = _vec(u0), _vec(w)
    n = len(u0)
    if m == 0:
        return Piece.zero(n, 2)
    v = _scale_vec(d, u0)
    shifted = _add_vec(w, _scale_vec(m, u0))
    piece = move_split((v, shifted), 1, w, _scale_vec(m, u0), cache)
    inner, _ = s1_piece(d, m, cache)
    piece = piece + inner.pushforward(LinearTorusMap.from_columns([u0]))
    marker = Piece.move("SLIDE", (tuple(u0), d, m, tuple(w)),
                        TorusChain.zero(n, 2), TorusChain.zero(n, 3), ())
    piece = piece + marker
    assert piece.target == (parallelogram_cycle([v, shifted])
                            - parallelogram_cycle([v, w]))
    return piece


def slide_second(v, w, delta, cache=None) -> Piece:
    """Target Q(v, w + delta) - Q(v, w) for delta parallel to v."""
    d, u0 = primitive_decomposition(v)
    delta = _vec(delta)
    nz = next(i for i, x in enumerate(u0) if x)
    m, r = divmod(delta[nz], u0[nz])
    assert r == 0 and _scale_vec(m, u0) == delta, "delta must be a u0 multiple"
    return slide(u0, d, m, w, cache)


def slide_first(v, w, delta, cache=None) -> Piece:
    """Target Q(v + delta, w) - Q(v, w) for delta parallel to w."""
    return -slide_second(w, v, delta, cache)


def apply_move(kind, params, cache=None) -> FillingCertificate:
    """Certificate for a single move's defining cycle at full scale."""
    if kind == "REARRANGE":
        gens, perm = params
        gens = tuple(_vec(g) for g in gens)
        permuted = tuple(gens[i] for i in perm)
        sign = _perm_sign(perm)
        piece = Piece.zero(len(gens[0]), len(gens))
        target = (parallelogram_cycle(gens)
                  - parallelogram_cycle(permuted).scale(sign))
        assert target.is_zero(), "permutations act by their sign exactly"
        return piece.certificate()
    if kind == "NEGATE":
        gens, pos = params
        return move_negate(gens, pos, cache).certificate()
    if kind == "SPLIT":
        gens, pos, v1, v2 = params
        return move_split(gens, pos, v1, v2, cache).certificate()
    if kind == "ZERO_GEN":
        (gens,) = params
        return move_zero_gen(gens, cache).certificate()
    if kind == "DEHN":
        x, y, kappa = params
        return move_dehn(x, y, kappa, cache).certificate()
    if kind == "DOUBLE_HALVE":
        x, y = params
        return move_double_halve(x, y, cache).certificate()
    if kind == "SLIDE":
        u0, d, m, w = params
        return slide(u0, d, m, w, cache).certificate()
    if kind == "S1_BASE":
        a, l = params
        return s1_reduce(a, l, cache)[0]
    if kind == "PRISM_LIFT":
        v, cert = params
        from ..chains import prism_v
        lifted = FillingCertificate.build(prism_v(v, cert.target),
                                          prism_v(v, cert.witness))
        from .certificate import require_valid
        return require_valid(lifted)
    raise ValueError("unknown move kind %r" % kind)


def _perm_sign(perm) -> int:
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign
