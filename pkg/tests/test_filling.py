"""Filling engine: solver, base table, moves, and the reduction pipeline."""

import math
import random

import pytest

from torfill.chains import (TorusChain, boundary, parallelogram_class,
                            parallelogram_cycle, pushforward, rectangle_cycle)
from torfill.errors import NotDependent, Unfillable, UnsupportedDimension
from torfill.exactlinalg import IntMatrix
from torfill.filling import (BASE_KEYS, CertificateCache, FillingCertificate,
                             apply_move, base_certificate, combine_rects,
                             fill_by_solve, fv_upper_experiment,
                             paral_to_rects, rect_to_unit,
                             reduce_parallelogram, s1_moves, s1_reduce, slide,
                             slim_reduce, universal_cycle, verify_certificate)
from torfill.filling.base import set_default_cache
from torfill.filling.moves import (move_dehn, move_double_halve, move_negate,
                                   move_split, move_zero_gen)

E1, E2 = (1, 0), (0, 1)


@pytest.fixture(scope="module", autouse=True)
def _cache(tmp_path_factory):
    cache = CertificateCache(tmp_path_factory.mktemp("certs"))
    set_default_cache(cache)
    return cache


# --- solver -------------------------------------------------------------------

def test_fill_by_solve_zero_cycle():
    cert = fill_by_solve(TorusChain.zero(2, 1))
    assert cert.cost == 0 and cert.witness.is_zero()


def test_fill_by_solve_zero_generator_cycle():
    z = parallelogram_cycle([(1,), (0,)])  # degenerate 2-cycle on the circle
    cert = fill_by_solve(z)
    ok, _ = verify_certificate(cert)
    assert ok and cert.cost >= 1


def test_fill_by_solve_swap_cycle_is_trivial():
    z = parallelogram_cycle([E1, E2]) + parallelogram_cycle([E2, E1])
    assert z.is_zero()
    cert = fill_by_solve(z)
    assert cert.cost == 0


def test_fill_by_solve_requires_cycle():
    from torfill.chains import simplex_chain
    with pytest.raises(Unfillable):
        fill_by_solve(simplex_chain([(0, 0), (1, 0), (1, 1)]))


def test_fill_by_solve_rejects_fundamental_class():
    z = parallelogram_cycle([E1, E2])  # class 1: not null-homologous
    with pytest.raises(Unfillable):
        fill_by_solve(z, box=1, max_expand=2)


# --- base table ---------------------------------------------------------------

def test_base_table_bootstraps_and_verifies(_cache):
    costs = _cache.bootstrap_all()
    assert set(costs) == set(BASE_KEYS)
    for key in BASE_KEYS:
        cert = base_certificate(key, _cache)
        ok, diag = verify_certificate(cert)
        assert ok, (key, diag)
        assert cert.target == universal_cycle(key)
    assert costs[("REARR", 2)] == 0
    assert costs[("REARR", 3)] == 0  # permutations act by sign exactly
    assert costs[("DEHN", 0)] == 0
    assert costs[("NEGATE", 2)] > 0
    assert costs[("SPLIT", 2)] > 0


def test_universal_cycles_have_zero_class():
    for key in BASE_KEYS:
        z = universal_cycle(key)
        assert boundary(z).is_zero()
    split = universal_cycle(("SPLIT", 2))
    cls = (parallelogram_class([(1, 0, 0), (0, 1, 1)])
           - parallelogram_class([(1, 0, 0), (0, 1, 0)])
           - parallelogram_class([(1, 0, 0), (0, 0, 1)]))
    assert cls.is_zero()
    assert not split.is_zero()


def test_cache_round_trip_bit_exact(tmp_path):
    cache = CertificateCache(tmp_path)
    first = cache.get(("DOUBLE_HALVE",))
    fresh = CertificateCache(tmp_path)  # cold memory, reads from disk
    second = fresh.get(("DOUBLE_HALVE",))
    assert first.target == second.target
    assert first.witness == second.witness
    assert first.cost == second.cost


# --- verify_certificate ---------------------------------------------------------

def test_verify_catches_perturbations():
    cert = base_certificate(("DOUBLE_HALVE",))
    ok, _ = verify_certificate(cert)
    assert ok
    simplex, coeff = next(iter(cert.witness.terms.items()))
    bad_terms = dict(cert.witness.terms)
    bad_terms[simplex] = coeff + 1
    bad = FillingCertificate(cert.target,
                             TorusChain(2, 3, bad_terms), cert.cost + 1)
    ok, diag = verify_certificate(bad)
    assert not ok and any("boundary" in d for d in diag)
    inflated = FillingCertificate(cert.target, cert.witness, cert.cost + 1)
    ok, diag = verify_certificate(inflated)
    assert not ok and any("cost" in d for d in diag)


# --- moves ----------------------------------------------------------------------

def test_move_certificates_verify():
    moves = [
        move_negate(((3, 1), (1, 2)), 0),
        move_negate(((3, 1), (1, 2)), 1),
        move_negate(((1, 0, 2), (0, 1, 1), (2, 0, 1)), 2),
        move_split(((2, 1), (5, 3)), 1, (2, 2), (3, 1)),
        move_split(((2, 1), (5, 3)), 0, (1, 1), (1, 0)),
        move_split(((1, 0, 0), (0, 2, 1), (3, 1, 1)), 2, (1, 1, 0), (2, 0, 1)),
        move_zero_gen(((4, 1), (0, 0))),
        move_zero_gen(((0, 0, 0), (1, 2, 0), (0, 1, 1))),
        move_dehn(3, 7, 2),
        move_double_halve(5, 8),
    ]
    for piece in moves:
        cert = piece.certificate()
        ok, diag = verify_certificate(cert)
        assert ok, diag


def test_pushforward_never_raises_cost():
    from torfill.chains import LinearTorusMap
    base = base_certificate(("SPLIT", 2))
    rng = random.Random(7)
    for _ in range(20):
        cols = [tuple(rng.randint(-9, 9) for _ in range(2)) for _ in range(3)]
        f = LinearTorusMap.from_columns(cols)
        pushed = FillingCertificate.build(pushforward(f, base.target),
                                          pushforward(f, base.witness))
        ok, _ = verify_certificate(pushed)
        assert ok
        assert pushed.cost <= base.cost


def test_apply_move_dispatcher():
    cert = apply_move("REARRANGE", (((2, 1), (1, 1)), (1, 0)))
    assert cert.cost == 0
    cert = apply_move("SPLIT", (((1, 0), (2, 0)), 1, (1, 0), (1, 0)))
    assert verify_certificate(cert)[0]
    cert = apply_move("DEHN", (2, 5, 3))
    assert verify_certificate(cert)[0]
    base = apply_move("DOUBLE_HALVE", (3, 4))
    lifted = apply_move("PRISM_LIFT", ((1,), base))
    assert verify_certificate(lifted)[0]
    assert lifted.cost <= 4 * base.cost  # degree 2 target: factor <= k+2


def test_split_move_matches_spec_example():
    # splitting (2,0) = (1,0)+(1,0) against partner (0,1)
    piece = move_split(((2, 0), (0, 1)), 0, (1, 0), (1, 0))
    want = (parallelogram_cycle([(2, 0), (0, 1)])
            - parallelogram_cycle([(1, 0), (0, 1)]).scale(2))
    assert piece.target == want
    assert verify_certificate(piece.certificate())[0]


# --- s1 -------------------------------------------------------------------------

def test_s1_trace_examples():
    _, tr = s1_moves(1, 12)
    assert [(x, y, k) for x, y, k in tr.phase1] == [(1, 12, 0), (2, 6, 3)]
    assert tr.m_steps == 2 and tr.m_steps <= 1 + math.log2(12) / 2

    _, tr = s1_moves(1, 1)
    assert [(x, y, k) for x, y, k in tr.phase1] == [(1, 1, 1)]
    assert tr.m_steps == 1

    _, tr = s1_moves(5, 3)
    assert tr.phase2 == (5, 2, 1)
    assert tr.odd_indices == (0,) and tr.even_indices == (1,)
    assert tr.n_steps == 2 and tr.total == 15 == 5 * 3


def test_s1_certificates_and_move_counts():
    rng = random.Random(11)
    worst = 0.0
    for _ in range(25):
        a = rng.choice([-1, 1]) * rng.randint(1, 200)
        l = rng.choice([-1, 1]) * rng.randint(1, 200)
        cert, tr = s1_reduce(a, l)
        ok, diag = verify_certificate(cert)
        assert ok, diag
        assert cert.target == parallelogram_cycle([(a,), (l,)])
        worst = max(worst, tr.move_count / (math.log2(abs(a * l)) + 1))
    assert worst <= 8.0


def test_s1_zero_routes():
    cert, _ = s1_reduce(4, 0)
    assert verify_certificate(cert)[0]
    cert, _ = s1_reduce(0, 9)
    assert verify_certificate(cert)[0]


# --- slide ----------------------------------------------------------------------

def test_slide_examples():
    # schedule step 1 shape: u0 = e1, d = a1, m = a2, w = a2*e2
    piece = slide(E1, 3, 4, (0, 4))
    want = (parallelogram_cycle([(3, 0), (4, 4)])
            - parallelogram_cycle([(3, 0), (0, 4)]))
    assert piece.target == want
    assert verify_certificate(piece.certificate())[0]

    assert slide(E1, 5, 0, (0, 2)).target.is_zero()

    # schedule step 4 shape: u0 = e1, d = a1*a2, m = 1-a1
    piece = slide(E1, 12, -3, (3, -1))
    assert verify_certificate(piece.certificate())[0]


# --- slim -----------------------------------------------------------------------

def test_slim_examples():
    cert = slim_reduce(((1, 0), (0, 0)))
    assert verify_certificate(cert)[0]

    cert = slim_reduce(((2, 0), (3, 0)))
    assert verify_certificate(cert)[0]
    assert cert.target == parallelogram_cycle([(2, 0), (3, 0)])

    cert = slim_reduce(((2, 1), (1, 1), (3, 2)))
    assert verify_certificate(cert)[0]

    with pytest.raises(NotDependent):
        slim_reduce(((1, 0), (0, 1)))


def test_slim_random_dependent():
    rng = random.Random(13)
    for _ in range(25):
        n = rng.randint(1, 3)
        k = n + rng.randint(0, 1) if n < 3 else 3
        while True:
            vecs = [tuple(rng.randint(-6, 6) for _ in range(n)) for _ in range(k)]
            from torfill.filling.reduce import _gens_matrix
            from torfill.exactlinalg import lattice_rank
            if lattice_rank(_gens_matrix(tuple(vecs))) < k:
                break
        cert = slim_reduce(tuple(vecs))
        assert verify_certificate(cert)[0]
        assert cert.target == parallelogram_cycle(vecs)


# --- rectangles ------------------------------------------------------------------

def test_paral_to_rects_examples():
    rects, cert = paral_to_rects(((2, 1), (1, 1)))
    assert len(rects) <= 2
    assert all(max(abs(s) for s in sizes) <= 2 for _, sizes in rects)
    assert verify_certificate(cert)[0]

    rects, cert = paral_to_rects((E1, E2))
    assert rects == [(1, (1, 1))] and cert.cost == 0

    rects, cert = paral_to_rects(((1, 0), (1, 1)))
    assert verify_certificate(cert)[0]
    assert (1, (1, 1)) in rects


def test_paral_to_rects_random():
    rng = random.Random(17)
    for _ in range(20):
        n = rng.randint(1, 3)
        vecs = tuple(tuple(rng.randint(-5, 5) for _ in range(n))
                     for _ in range(n))
        rects, cert = paral_to_rects(vecs)
        assert verify_certificate(cert)[0]
        bound = max(max(abs(x) for x in v) for v in vecs)
        factorial = math.factorial(n)
        assert len(rects) <= factorial
        for _, sizes in rects:
            assert max(abs(s) for s in sizes) <= bound
        # class bookkeeping: sum of eps*prod(sizes) = det
        det = parallelogram_class(vecs).minors[0]
        acc = 0
        for eps, sizes in rects:
            prod = 1
            for s in sizes:
                prod *= s
            acc += eps * prod
        assert acc == det


def test_rect_to_unit_examples():
    cert = rect_to_unit((2, 3))
    assert cert.target == rectangle_cycle((2, 3)) - rectangle_cycle((6, 1))
    assert verify_certificate(cert)[0]
    assert rect_to_unit((1, 1)).cost == 0
    assert rect_to_unit((7, 1)).cost == 0
    cert = rect_to_unit((2, 0))
    assert verify_certificate(cert)[0]
    cert = rect_to_unit((-3, 2))
    assert cert.target == rectangle_cycle((-3, 2)) - rectangle_cycle((-6, 1))
    assert verify_certificate(cert)[0]
    cert = rect_to_unit((2, 3, 2))
    assert cert.target == rectangle_cycle((2, 3, 2)) - rectangle_cycle((12, 1, 1))
    assert verify_certificate(cert)[0]


def test_combine_rects_examples():
    total, cert = combine_rects([(1, 2), (1, 3)], 2)
    assert total == 5
    assert cert.target == (rectangle_cycle((2, 1)) + rectangle_cycle((3, 1))
                           - rectangle_cycle((5, 1)))
    assert verify_certificate(cert)[0]

    total, cert = combine_rects([(1, 4)], 2)
    assert total == 4 and cert.cost == 0

    total, cert = combine_rects([(1, 2), (-1, 2)], 2)
    assert total == 0
    assert verify_certificate(cert)[0]


# --- the full reduction ------------------------------------------------------------

def test_reduce_identity():
    rep = reduce_parallelogram(IntMatrix.identity(2))
    assert rep.cost == 0 and rep.det == 1
    ok, _ = verify_certificate(rep.certificate)
    assert ok


def test_reduce_anosov_and_dehn():
    rep = reduce_parallelogram(IntMatrix(((2, 1), (1, 1))))
    assert rep.det == 1
    assert rep.certificate.target == (
        parallelogram_cycle([(2, 1), (1, 1)]) - rectangle_cycle((1, 1)))
    assert verify_certificate(rep.certificate)[0]
    assert rep.cost == sum(r.cost for r in rep.trace)

    rep = reduce_parallelogram(IntMatrix(((1, 1), (0, 1))))
    assert rep.cost <= 60  # Dehn twist reduces at bounded cost


def test_reduce_non_unit_determinant():
    a = IntMatrix(((2, 0), (0, 3)))
    rep = reduce_parallelogram(a)
    assert rep.det == 6
    assert rep.certificate.target == (
        parallelogram_cycle([(2, 0), (0, 3)]) - rectangle_cycle((6, 1)))

    flip = IntMatrix(((0, 1), (1, 0)))
    rep = reduce_parallelogram(flip)
    assert rep.det == -1
    assert verify_certificate(rep.certificate)[0]


def test_reduce_dimension_three():
    a = IntMatrix(((1, 1, 0), (0, 1, 1), (1, 0, 1)))
    rep = reduce_parallelogram(a)
    assert rep.det == 2
    assert verify_certificate(rep.certificate)[0]
    assert rep.cost == sum(r.cost for r in rep.trace)
    with pytest.raises(UnsupportedDimension):
        reduce_parallelogram(IntMatrix.identity(4))


def test_reduce_class_records_are_zero():
    rep = reduce_parallelogram(IntMatrix(((3, 2), (1, 1))))
    for record in rep.trace:
        assert not any(record.class_delta)


def test_fv_upper_experiment_identity_and_anosov():
    exp = fv_upper_experiment(IntMatrix.identity(2), 4)
    assert all(cost == 0 for _, cost, _, _ in exp.rows)

    exp = fv_upper_experiment(IntMatrix(((2, 1), (1, 1))), 5)
    assert len(exp.rows) == 5
    assert exp.k_hat > 0

    with pytest.raises(UnsupportedDimension):
        fv_upper_experiment(IntMatrix(((2, 0), (0, 3))), 2)


def test_fv_upper_dehn_twist_bounded():
    exp = fv_upper_experiment(IntMatrix(((1, 1), (0, 1))), 8, verify=False)
    per_j = [cost / j for j, cost, _, _ in exp.rows]
    assert max(per_j) <= 12 * max(per_j[0], 1.0)


def test_reduce_random_sl2_exactness():
    rng = random.Random(19)
    gens = [IntMatrix(((1, 1), (0, 1))), IntMatrix(((1, -1), (0, 1))),
            IntMatrix(((1, 0), (1, 1))), IntMatrix(((1, 0), (-1, 1)))]
    for _ in range(15):
        a = IntMatrix.identity(2)
        for _ in range(rng.randint(1, 14)):
            a = a @ rng.choice(gens)
        rep = reduce_parallelogram(a)
        assert rep.det == 1
        assert verify_certificate(rep.certificate)[0]
        assert rep.cost == sum(r.cost for r in rep.trace)


def test_cache_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("TORFILL_CERT_CACHE", str(tmp_path / "envcache"))
    cache = CertificateCache()
    assert str(cache.directory).endswith("envcache")
    cert = cache.get(("ZERO", 1))
    assert (tmp_path / "envcache" / "zero_1.json").exists()
    assert verify_certificate(cert)[0]


def test_candidate_cap():
    from torfill.errors import CandidateSetTooLarge
    from torfill.filling.solver import enumerate_candidates
    with pytest.raises(CandidateSetTooLarge):
        enumerate_candidates(3, 4, 3, True, tuple_cap=10 ** 5)
