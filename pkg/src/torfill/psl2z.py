"""Word decomposition in PSL(2,Z) = Z/2 * Z/3.

The order-2 factor is generated by (the image of) S and the order-3 factor
by U, with the standard lifts

    S = [[0, -1], [1, 0]]        U = [[0, -1], [1, -1]]

(so S^2 = -I and U^3 = I in SL(2,Z)).  Words are stored in alternating
normal form over the letters S, U, U2 with a sign recording the lift.

Decomposition runs a continued-fraction descent on the first column using
T = [[1,1],[0,1]] = U^2 S and S, then rewrites T-letters and reduces in the
free product; the number of rewriting steps is linear in the bit size.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotUnimodular
from .exactlinalg import IntMatrix

S_MAT = IntMatrix(((0, -1), (1, 0)))
U_MAT = IntMatrix(((0, -1), (1, -1)))
U2_MAT = U_MAT @ U_MAT
T_MAT = IntMatrix(((1, 1), (0, 1)))

_LETTER_MATS = {"S": S_MAT, "U": U_MAT, "U2": U2_MAT}


def _factor(letter: str) -> int:
    return 2 if letter == "S" else 3


def _merge(a: str, b: str):
    """Product of two letters from the same factor; None means cancellation."""
    if a == "S":
        return None  # S * S
    power = (1 if a == "U" else 2) + (1 if b == "U" else 2)
    power %= 3
    return None if power == 0 else ("U" if power == 1 else "U2")


def _reduce(letters):
    """Free-product reduction to alternating normal form (stack scan)."""
    stack = []
    for letter in letters:
        while stack and _factor(stack[-1]) == _factor(letter):
            prev = stack.pop()
            merged = _merge(prev, letter)
            if merged is None:
                letter = None
                break
            letter = merged
        if letter is not None:
            stack.append(letter)
    return tuple(stack)


@dataclass(frozen=True)
class Psl2Word:
    """Alternating word over {S, U, U2} plus the sign of its SL(2,Z) lift."""

    letters: tuple
    sign: int = 1

    def __post_init__(self):
        assert self.sign in (1, -1)
        for a, b in zip(self.letters, self.letters[1:]):
            assert _factor(a) != _factor(b), "word is not alternating"

    def __str__(self):
        body = "·".join(self.letters) if self.letters else "e"
        return ("-" if self.sign < 0 else "") + body


def reconstruct(word: Psl2Word) -> IntMatrix:
    """Exact matrix product sign * L_1 ... L_m."""
    m = IntMatrix.identity(2)
    for letter in word.letters:
        m = m @ _LETTER_MATS[letter]
    if word.sign < 0:
        m = IntMatrix(tuple(tuple(-x for x in row) for row in m.data))
    return m


def decompose(a: IntMatrix) -> Psl2Word:
    """Alternating word w with reconstruct(w) = A (sign resolves the lift)."""
    if a.rows != 2 or a.cols != 2:
        raise NotUnimodular("decompose needs a 2x2 matrix")
    det = a.data[0][0] * a.data[1][1] - a.data[0][1] * a.data[1][0]
    if det != 1:
        raise NotUnimodular("decompose needs det = 1")

    # peel letters from the left: A = T^{q_1} S T^{q_2} S ... (+/- T^{q_last})
    m = [list(a.data[0]), list(a.data[1])]
    ts_blocks = []  # ("T", q) and ("S",) tokens
    while m[1][0] != 0:
        q = m[0][0] // m[1][0]
        # T^{-q} then S^{-1} on the left; S^{-1} = [[0,1],[-1,0]]
        row0 = [m[0][0] - q * m[1][0], m[0][1] - q * m[1][1]]
        m = [m[1], [-row0[0], -row0[1]]]
        ts_blocks.append(("T", q))
        ts_blocks.append(("S",))
    # now m = +/- T^b
    assert abs(m[0][0]) == 1 and m[0][0] == m[1][1]
    if m[0][0] == 1:
        b = m[0][1]
    else:
        b = -m[0][1]
    if b:
        ts_blocks.append(("T", b))

    letters = []
    for block in ts_blocks:
        if block[0] == "S":
            letters.append("S")
        else:
            q = block[1]
            if q > 0:
                letters.extend(["U2", "S"] * q)   # T = U^2 S in PSL
            elif q < 0:
                letters.extend(["S", "U"] * (-q))  # T^{-1} = S U in PSL
    reduced = _reduce(letters)

    word = Psl2Word(reduced, 1)
    got = reconstruct(word)
    if got.data == a.data:
        return word
    neg = tuple(tuple(-x for x in row) for row in got.data)
    assert neg == a.data, "decomposition failed to reproduce +/- A"
    return Psl2Word(reduced, -1)


def free_reduce(word: Psl2Word) -> Psl2Word:
    """Re-reduce (words built by hand may not be alternating)."""
    reduced = _reduce(word.letters)
    return Psl2Word(reduced, word.sign)


def cyclically_reduced_length(word: Psl2Word) -> int:
    """Letters remaining after free and cyclic reduction."""
    letters = list(_reduce(word.letters))
    while len(letters) >= 2 and _factor(letters[0]) == _factor(letters[-1]):
        first = letters[0]
        last = letters.pop()
        merged = _merge(last, first)
        if merged is None:
            letters = letters[1:]
        else:
            letters[0] = merged
        letters = list(_reduce(letters))
    return len(letters)


def word_concat(w1: Psl2Word, w2: Psl2Word) -> Psl2Word:
    """Concatenate and reduce; cancellations like S*S = -I flip the lift
    sign, so the sign is recomputed from the exact matrix product."""
    target = reconstruct(w1) @ reconstruct(w2)
    reduced = _reduce(w1.letters + w2.letters)
    prod = reconstruct(Psl2Word(reduced, 1))
    if prod.data == target.data:
        return Psl2Word(reduced, 1)
    neg = tuple(tuple(-x for x in row) for row in prod.data)
    assert neg == target.data
    return Psl2Word(reduced, -1)


def word_power(w: Psl2Word, j: int) -> Psl2Word:
    out = Psl2Word((), 1)
    for _ in range(j):
        out = word_concat(out, w)
    return out


def family_matrix(i: int) -> IntMatrix:
    """A_i = [[i+1, i], [1, 1]]; spectral radius (i+2+sqrt(i^2+4i))/2,
    which lies strictly between i and i+2."""
    if i < 1:
        raise ValueError("family index i >= 1 required")
    return IntMatrix(((i + 1, i), (1, 1)))


@dataclass(frozen=True)
class DeltaBounds:
    """Bracket for the minimal triangulation size of the associated bundle.

    lower = kappa * lower_coeff with kappa a universal (non-explicit)
    constant; upper is available for the family words A_i^j only.
    """

    lower_coeff: int
    upper: int = None

    def lower_str(self) -> str:
        return "%d*kappa" % self.lower_coeff


def delta_bounds(word: Psl2Word, family: tuple = None) -> DeltaBounds:
    """Bounds from the cyclically reduced length; pass family=(i, j) when the
    word is a power of a family matrix word to get the j(i+1)+6 upper bound."""
    length = cyclically_reduced_length(word)
    if family is None:
        return DeltaBounds(length)
    i, j = family
    return DeltaBounds(length, j * (i + 1) + 6)
