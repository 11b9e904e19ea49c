"""Invariant suites behind `torfill selftest` and the acceptance tests.

Each criterion function returns a SuiteResult with a pass flag and a short
detail string; `run_all` executes every criterion at the requested level
("quick" trims sample counts, "full" runs the documented sizes).
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass

from .chains import (boundary, l1_norm, parallelogram_class,
                     parallelogram_cycle, prism_v, sample_degree)
from .exactlinalg import IntMatrix
from .filling import BASE_KEYS, base_certificate, verify_certificate
from .filling.base import CertificateCache, default_cache
from .filling.moves import s1_moves, s1_reduce
from .filling.reduce import fv_upper_experiment, reduce_parallelogram
from .psl2z import (cyclically_reduced_length, decompose, family_matrix,
                    reconstruct, word_power)
from .spectral import analyze, basic_inequalities, fv_lower_bound


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str
    elapsed: float


def _result(name, passed, detail, t0):
    return SuiteResult(name, bool(passed), detail, time.time() - t0)


def random_sl2_word(rng, max_len=40, cap=10 ** 6) -> IntMatrix:
    """Alternating elementary blocks (continued-fraction style), trimmed to
    keep the entry norm at most `cap`."""
    a = IntMatrix.identity(2)
    upper = rng.random() < 0.5
    used = 0
    while used < max_len:
        e = min(rng.randint(1, 3), max_len - used)
        sgn = rng.choice([1, -1])
        if upper:
            block = IntMatrix(((1, sgn * e), (0, 1)))
        else:
            block = IntMatrix(((1, 0), (sgn * e, 1)))
        nxt = a @ block
        if nxt.max_abs() > cap:
            break
        a = nxt
        used += e
        upper = not upper
    return a


def random_sl_matrix(rng, n, length) -> IntMatrix:
    a = IntMatrix.identity(n)
    for _ in range(length):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        e = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        e[i][j] = rng.choice([-1, 1])
        a = a @ IntMatrix(tuple(map(tuple, e)))
    return a


def affine_fit_min_max_relative(xs, ys):
    """Affine fit minimizing the maximum |residual| / |fitted|.

    Least-squares start, then three rounds of grid refinement; adequate for
    the monotone, roughly linear data the cost experiments produce.
    """
    m = len(xs)
    mean_x = sum(xs) / m
    mean_y = sum(ys) / m
    denom = sum((x - mean_x) ** 2 for x in xs) or 1.0
    slope = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys)) / denom
    inter = mean_y - slope * mean_x

    def max_rel(s, b):
        worst = 0.0
        for x, y in zip(xs, ys):
            fit = s * x + b
            if fit <= 0:
                return float("inf")
            worst = max(worst, abs(y - fit) / fit)
        return worst

    best = (max_rel(slope, inter), slope, inter)
    span_s = abs(slope) * 0.4 + 1.0
    span_b = abs(inter) * 0.8 + abs(mean_y) * 0.4 + 1.0
    for _ in range(3):
        s0, b0 = best[1], best[2]
        for ds in range(-12, 13):
            for db in range(-12, 13):
                s = s0 + span_s * ds / 12
                b = b0 + span_b * db / 12
                r = max_rel(s, b)
                if r < best[0]:
                    best = (r, s, b)
        span_s /= 6
        span_b /= 6
    return best  # (max relative residual, slope, intercept)


# --- criteria -------------------------------------------------------------------

def criterion_reduction_exactness(level="full", cache=None, seed=12001):
    """Exact reduction certificates for random SL(2,Z) words; collects the
    (log2 norm, cost) data reused by the scaling criterion."""
    t0 = time.time()
    rng = random.Random(seed)
    n_samples = 100 if level == "full" else 20
    (cache or default_cache()).bootstrap_all()  # warm: bootstrap timed separately
    data = []
    worst_dt = 0.0
    for _ in range(n_samples):
        a = random_sl2_word(rng)
        t = time.time()
        report = reduce_parallelogram(a, cache)
        dt = time.time() - t
        worst_dt = max(worst_dt, dt)
        ok, diag = verify_certificate(report.certificate)
        if not ok or report.det != 1 or dt >= 5.0:
            return _result("reduction_exactness", False,
                           "failure: %s dt=%.2f" % (diag, dt), t0), data
        if report.cost != sum(r.cost for r in report.trace):
            return _result("reduction_exactness", False,
                           "cost additivity violated", t0), data
        data.append((report.log2_norm, report.cost))
    detail = "%d matrices exact; worst per-matrix %.2fs" % (n_samples, worst_dt)
    return _result("reduction_exactness", True, detail, t0), data


def criterion_cost_scaling(data, level="full", cache=None):
    """Affine fit of cost against log2 norm within 20% relative residuals,
    plus boundedness of cost_j / j for the standard Anosov matrix."""
    t0 = time.time()
    xs = [d[0] for d in data]
    ys = [d[1] for d in data]
    resid, slope, inter = affine_fit_min_max_relative(xs, ys)
    fit_ok = resid <= 0.20

    a = IntMatrix(((2, 1), (1, 1)))
    j_max = 8 if level == "full" else 4
    exp = fv_upper_experiment(a, j_max, cache)
    log2_rho = math.log2(analyze(a).rho)
    ratios = [cost / j / log2_rho for j, cost, _, _ in exp.rows]
    k_hat_obs = max(ratios)
    med = sorted(ratios)[len(ratios) // 2]
    bounded = k_hat_obs <= 3.0 * med
    detail = ("fit slope=%.1f icept=%.1f max_rel=%.3f; "
              "K_hat(ls)=%.1f K_hat(max)=%.1f bounded=%s"
              % (slope, inter, resid, exp.k_hat, k_hat_obs, bounded))
    return _result("cost_scaling", fit_ok and bounded, detail, t0)


def criterion_s1_invariants(level="full", cache=None):
    t0 = time.time()
    limit = 200 if level == "full" else 60
    worst_c = 0.0
    for a in range(1, limit + 1):
        for l in range(1, limit + 1):
            moves, tr = s1_moves(a, l)
            for i, (x, y, k) in enumerate(tr.phase1):
                if x != 2 ** i or y % (2 ** i) or not 0 <= k <= 3:
                    return _result("s1_invariants", False,
                                   "phase1 invariant broken at (%d,%d)" % (a, l), t0)
            if moves[-1][1] != "ZERO" or moves[-1][2][0] != 2 ** tr.m_steps:
                return _result("s1_invariants", False,
                               "y_M != 0 (no terminal ZERO) at (%d,%d)" % (a, l), t0)
            if tr.m_steps > 1 + math.log2(tr.phase1_input) / 2:
                return _result("s1_invariants", False,
                               "M bound broken at (%d,%d)" % (a, l), t0)
            if any(ai > a / 2 ** i for i, ai in enumerate(tr.phase2)):
                return _result("s1_invariants", False,
                               "a_i bound broken at (%d,%d)" % (a, l), t0)
            if tr.total != a * l or tr.total > 2 * a * l:
                return _result("s1_invariants", False,
                               "L identity broken at (%d,%d)" % (a, l), t0)
            worst_c = max(worst_c, tr.move_count / (math.log2(a * l) + 1))
    # deterministic certificate subsample, full verification
    for a in range(1, limit + 1, 29):
        for l in range(1, limit + 1, 31):
            cert, tr2 = s1_reduce(a, l, cache)
            ok, _ = verify_certificate(cert)
            moves, tr = s1_moves(a, l)
            if not ok or tr2.move_count != tr.move_count:
                return _result("s1_invariants", False,
                               "certificate mismatch at (%d,%d)" % (a, l), t0)
    ok = worst_c <= 8.0
    return _result("s1_invariants", ok,
                   "sweep %dx%d, fitted C=%.2f" % (limit, limit, worst_c), t0)


def criterion_torsion_growth(level="full", cache=None):
    t0 = time.time()
    from .spectral import torsion_growth_table
    rows = torsion_growth_table(IntMatrix(((2, 1), (1, 1))), 40)
    ok = (rows[0].torsion_order == 1 and rows[1].torsion_order == 5)
    last = rows[-1]
    rel = abs(last.log_tors_over_k - last.target) / last.target
    ok = ok and rel < 0.05
    return _result("torsion_growth", ok,
                   "orders k=1,2: %d,%d; |log tors/k - target|/target = %.4f at k=40"
                   % (rows[0].torsion_order, rows[1].torsion_order, rel), t0)


def criterion_degree_oracle(level="full", seed=12005):
    t0 = time.time()
    rng = random.Random(seed)
    n_samples = 200 if level == "full" else 50
    for _ in range(n_samples):
        n = rng.randint(1, 3)
        vecs = [tuple(rng.randint(-10, 10) for _ in range(n)) for _ in range(n)]
        det = parallelogram_class(vecs).minors[0]
        if sample_degree(parallelogram_cycle(vecs), rng) != det:
            return _result("degree_oracle", False, "mismatch on %r" % (vecs,), t0)
    return _result("degree_oracle", True,
                   "%d random generator matrices, zero mismatches" % n_samples, t0)


def criterion_chain_invariants(level="full", seed=12006):
    t0 = time.time()
    rng = random.Random(seed)
    n_chains = 60 if level == "full" else 20
    from .chains import TorusChain, canonicalize
    for _ in range(n_chains):
        n = rng.randint(1, 3)
        k = rng.randint(1, 4)
        pairs = []
        for _ in range(rng.randint(1, 4)):
            span = 10 ** 6 if rng.random() < 0.3 else 4
            verts = [tuple(rng.randint(-span, span) for _ in range(n))
                     for _ in range(k + 1)]
            pairs.append((canonicalize(verts), rng.choice([-2, -1, 1, 2])))
        c = TorusChain.from_pairs(n, k, pairs)
        if not boundary(boundary(c)).is_zero():
            return _result("chain_invariants", False, "dd != 0", t0)
        v = tuple(rng.randint(-10 ** 6, 10 ** 6) for _ in range(n))
        pc = prism_v(v, c)
        if boundary(pc) != prism_v(v, boundary(c)):
            return _result("chain_invariants", False, "prism chain map", t0)
        if l1_norm(pc) > (k + 1) * l1_norm(c):
            return _result("chain_invariants", False, "prism norm bound", t0)
    for _ in range(n_chains):
        n = rng.randint(1, 3)
        kk = rng.randint(1, 3)
        vecs = [tuple(rng.randint(-10 ** 6, 10 ** 6) for _ in range(n))
                for _ in range(kk)]
        q = parallelogram_cycle(vecs)
        if not boundary(q).is_zero() or l1_norm(q) > math.factorial(kk):
            return _result("chain_invariants", False, "Q cycle bound", t0)
    return _result("chain_invariants", True,
                   "dd=0, prism commutation/norm, cycle bounds on %d chains"
                   % (2 * n_chains), t0)


def criterion_spectral(level="full", seed=12007):
    t0 = time.time()
    rng = random.Random(seed)
    n_samples = 500 if level == "full" else 80
    checked = 0
    while checked < n_samples:
        n = rng.randint(1, 4)
        a = IntMatrix(tuple(tuple(rng.randint(-5, 5) for _ in range(n))
                            for _ in range(n)))
        lo, ent, hi = basic_inequalities(a)
        if math.isfinite(lo) and not (lo <= ent + 1e-9 <= hi + 2e-9):
            return _result("spectral", False, "basic inequality broke", t0)
        checked += 1
    from .spectral import gelfand_sequence
    found = 0
    while found < (20 if level == "full" else 6):
        n = rng.choice([2, 3])
        a = random_sl_matrix(rng, n, rng.randint(6, 14))
        s = analyze(a)
        if s.unit_root_flag or s.rho < 1.2:
            continue
        if any(not r.on_unit_circle and abs(abs(r.value) - 1) <= 10 * r.radius
               for r in s.roots):
            continue
        tail = gelfand_sequence(a, 64)[-1]
        if abs(tail - s.rho) / s.rho >= 0.1:
            return _result("spectral", False, "Gelfand tail off", t0)
        found += 1
    for i in range(1, 51):
        expected = (i + 2 + math.sqrt(i * i + 4 * i)) / 2
        if abs(analyze(family_matrix(i)).rho - expected) > 1e-9:
            return _result("spectral", False, "family radius off at i=%d" % i, t0)
    return _result("spectral", True,
                   "%d inequality samples; Gelfand tails; family radii to 1e-9"
                   % n_samples, t0)


def criterion_base_bootstrap(level="full", cache=None):
    """Cold bootstrap into a fresh directory: every key found by
    fill_by_solve, exactly verified, and round-tripped bit-exactly."""
    t0 = time.time()
    import tempfile
    fresh_dir = tempfile.mkdtemp(prefix="torfill-bootstrap-")
    fresh = CertificateCache(fresh_dir)
    costs = {}
    for key in BASE_KEYS:
        cert = base_certificate(key, fresh)
        ok, diag = verify_certificate(cert)
        if not ok:
            return _result("base_bootstrap", False, "%r: %s" % (key, diag), t0)
        costs[key] = cert.cost
    # bit-exact round trip through the on-disk representation
    reload_cache = CertificateCache(fresh_dir)
    for key in BASE_KEYS:
        again = reload_cache.get(key)
        first = fresh.get(key)
        if again.witness != first.witness or again.cost != first.cost:
            return _result("base_bootstrap", False,
                           "cache round-trip changed %r" % (key,), t0)
    elapsed = time.time() - t0
    ok = elapsed < 120.0
    return _result("base_bootstrap", ok,
                   "all %d keys solved cold in %.1fs; costs %s" %
                   (len(BASE_KEYS), elapsed,
                    {"/".join(map(str, k)): v for k, v in costs.items()}), t0)


def criterion_psl2z(level="full", seed=12009):
    t0 = time.time()
    rng = random.Random(seed)
    n_samples = 500 if level == "full" else 100
    gens = [IntMatrix(((1, 1), (0, 1))), IntMatrix(((1, -1), (0, 1))),
            IntMatrix(((1, 0), (1, 1))), IntMatrix(((1, 0), (-1, 1)))]
    for _ in range(n_samples):
        a = IntMatrix.identity(2)
        for _ in range(rng.randint(1, 40)):
            a = a @ rng.choice(gens)
        if reconstruct(decompose(a)).data != a.data:
            return _result("psl2z", False, "roundtrip failed on %r" % (a.data,), t0)
    for i in range(1, 11):
        w = decompose(family_matrix(i))
        for j in range(1, 11):
            if cyclically_reduced_length(word_power(w, j)) != j * (2 * i + 2):
                return _result("psl2z", False,
                               "family length off at i=%d j=%d" % (i, j), t0)
    return _result("psl2z", True,
                   "%d roundtrips; family lengths j(2i+2) for i,j <= 10"
                   % n_samples, t0)


def criterion_bounds_consistency(level="full", cache=None, seed=12010):
    """Lower bounds stay below the empirical upper-bound slope; certified
    unit-circle spectra give exactly zero."""
    t0 = time.time()
    rng = random.Random(seed)
    a0 = IntMatrix(((2, 1), (1, 1)))
    exp = fv_upper_experiment(a0, 6 if level == "full" else 3, cache)
    log2_rho0 = math.log2(analyze(a0).rho)
    k_hat = max(cost / j / log2_rho0 for j, cost, _, _ in exp.rows)
    rows = []
    found = 0
    while found < (12 if level == "full" else 4):
        a = random_sl2_word(rng, max_len=14, cap=10 ** 3)
        s = analyze(a)
        if s.unit_root_flag or s.rho <= 1.0:
            continue
        lower = fv_lower_bound(a)
        upper_proxy = 2 * k_hat * math.log2(s.rho) + 64.0
        rows.append((a.data, lower, upper_proxy))
        if lower > upper_proxy:
            return _result("bounds_consistency", False,
                           "lower %.3f above proxy %.3f for %r"
                           % (lower, upper_proxy, a.data), t0)
        found += 1
    for mat in (IntMatrix.identity(2), IntMatrix(((0, -1), (1, 0))),
                IntMatrix(((0, -1), (1, -1)))):
        if fv_lower_bound(mat) != 0.0:
            return _result("bounds_consistency", False,
                           "unit-circle spectrum must give exactly 0", t0)
    margin = min(u - l for _, l, u in rows)
    detail = ("K_hat=%.1f; %d Anosov rows consistent (max lower %.3f, "
              "min upper-proxy margin %.1f); unit-circle rows exactly 0"
              % (k_hat, len(rows), max(l for _, l, _ in rows), margin))
    return _result("bounds_consistency", True, detail, t0)


def run_all(level="quick", cache=None):
    """All criteria in order; returns a list of SuiteResult."""
    results = []
    r1, data = criterion_reduction_exactness(level, cache)
    results.append(r1)
    results.append(criterion_cost_scaling(data, level, cache))
    results.append(criterion_s1_invariants(level, cache))
    results.append(criterion_torsion_growth(level, cache))
    results.append(criterion_degree_oracle(level))
    results.append(criterion_chain_invariants(level))
    results.append(criterion_spectral(level))
    results.append(criterion_base_bootstrap(level, cache))
    results.append(criterion_psl2z(level))
    results.append(criterion_bounds_consistency(level, cache))
    return results
