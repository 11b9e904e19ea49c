"""Free-product word decomposition and length tests."""

import random

import pytest

from torfill.errors import NotUnimodular
from torfill.exactlinalg import IntMatrix
from torfill.psl2z import (Psl2Word, S_MAT, U_MAT, U2_MAT,
                           cyclically_reduced_length, decompose, delta_bounds,
                           family_matrix, reconstruct, word_power)


def random_sl2(rng, length=40):
    gens = [IntMatrix(((1, 1), (0, 1))), IntMatrix(((1, -1), (0, 1))),
            IntMatrix(((1, 0), (1, 1))), IntMatrix(((1, 0), (-1, 1)))]
    a = IntMatrix.identity(2)
    for _ in range(rng.randint(1, length)):
        a = a @ rng.choice(gens)
    return a


def test_generator_orders():
    minus_i = IntMatrix(((-1, 0), (0, -1)))
    assert (S_MAT @ S_MAT).data == minus_i.data
    assert (U_MAT @ U2_MAT).data == IntMatrix.identity(2).data
    assert (U_MAT @ U_MAT).data == U2_MAT.data


def test_decompose_examples():
    w = decompose(S_MAT)
    assert w.letters == ("S",) and w.sign == 1
    assert reconstruct(w).data == S_MAT.data

    w = decompose(IntMatrix.identity(2))
    assert w.letters == ()

    a1 = IntMatrix(((2, 1), (1, 1)))
    w = decompose(a1)
    assert reconstruct(w).data == a1.data or \
        reconstruct(Psl2Word(w.letters, -w.sign)).data == a1.data
    # family identity: A_1 reduces to (U^-1 S) U S = U2 S U S
    assert w.letters == ("U2", "S", "U", "S")


def test_decompose_not_unimodular():
    with pytest.raises(NotUnimodular):
        decompose(IntMatrix(((2, 0), (0, 1))))


def test_reconstruct_examples():
    assert reconstruct(Psl2Word(("S",))).data == ((0, -1), (1, 0))
    u_cubed = U_MAT @ U_MAT @ U_MAT
    assert u_cubed.data == IntMatrix.identity(2).data
    s_squared = S_MAT @ S_MAT
    assert s_squared.data == ((-1, 0), (0, -1))


def test_reconstruct_decompose_roundtrip():
    rng = random.Random(89)
    for _ in range(500):
        a = random_sl2(rng)
        w = decompose(a)
        got = reconstruct(w)
        neg = tuple(tuple(-x for x in row) for row in got.data)
        assert got.data == a.data or neg == a.data
        # the stored sign must make the lift exact
        assert got.data == a.data


def test_decompose_step_count_linear_in_bits():
    rng = random.Random(97)
    for _ in range(60):
        a = random_sl2(rng, length=60)
        bits = max(abs(x) for row in a.data for x in row).bit_length()
        w = decompose(a)
        assert len(w.letters) <= 12 * bits + 12


def test_family_lengths():
    for i in range(1, 11):
        wi = decompose(family_matrix(i))
        for j in range(1, 11):
            assert cyclically_reduced_length(word_power(wi, j)) == j * (2 * i + 2)


def test_cyclic_length_examples():
    w1 = decompose(family_matrix(1))
    assert cyclically_reduced_length(w1) == 4
    assert cyclically_reduced_length(Psl2Word(())) == 0
    w2 = decompose(family_matrix(2))
    assert cyclically_reduced_length(word_power(w2, 3)) == 18


def test_cyclic_length_subadditive_under_squaring():
    rng = random.Random(101)
    for _ in range(60):
        w = decompose(random_sl2(rng, length=24))
        l1 = cyclically_reduced_length(w)
        l2 = cyclically_reduced_length(word_power(w, 2))
        assert l2 <= 2 * l1
        # equality needs alternating ends; a lone torsion letter (e.g. U)
        # collapses when squared, so length >= 2 is the honest scope
        if len(w.letters) >= 2 and _is_cyclically_reduced(w):
            assert l2 == 2 * l1


def _is_cyclically_reduced(w):
    first, last = w.letters[0], w.letters[-1]
    two = {"S"}
    return (first in two) != (last in two)


def test_delta_bounds():
    w1 = decompose(family_matrix(1))
    b = delta_bounds(w1, family=(1, 1))
    assert b.lower_coeff == 4 and b.upper == 8
    assert b.lower_str() == "4*kappa"
    assert delta_bounds(Psl2Word(())).lower_coeff == 0
    assert delta_bounds(Psl2Word(())).upper is None
