"""Acceptance criteria, one test per criterion, at the pinned tolerances.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass/fail
line per criterion including its runtime.
"""

import itertools
import math
import time

import numpy as np

from loclab.capacity import (
    blahut_arimoto,
    c_sub_symmetric,
    channel_training_rate,
    decomposition_check,
    ect_bounds,
    find_T1,
    full_rank_capacity,
    g_table,
    rho_min,
    rho_n,
    subspace_lower_bound,
    transition_matrix,
)
from loclab.channel import ChannelModel, RankPmf, random_alpha_input, symmetry_check
from loclab.counting import GFCounts
from loclab.fields import GF
from loclab.linear_codes import (
    failure_bound,
    failure_rate_mc,
    make_generator,
    rateless_session,
    rateless_success_bound,
)
from loclab.matrix import Mat, Subspace, all_matrices, enumerate_subspaces, sample_matrix
from loclab.rank_codes import (
    GabidulinCode,
    decode_known_H,
    min_rank_distance_exhaustive,
    simulate_rm,
)
from loclab.rng import make_rng

from _reference import all_subspaces as ref_subspaces
from _reference import count_rank as ref_count_rank

F2 = GF(2)


def _report(num, name, ok, started, detail=""):
    elapsed = time.perf_counter() - started
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:02d} {name}: {status} ({elapsed:.2f}s) {detail}".rstrip())
    assert ok, f"criterion {num} ({name}) failed: {detail}"


def test_criterion_01_table_one():
    t0 = time.perf_counter()
    want = {1: 0.408, 2: 0.408, 3: 0.460, 4: 0.526, 5: 0.649, 6: 1.000}
    got = {c: rho_min(c, 6).value for c in range(1, 7)}
    ok = all(abs(got[c] - want[c]) <= 0.001 for c in want)
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 1.0
    _report(1, "table-one rho_min(c,6)", ok, t0,
            " ".join(f"{got[c]:.3f}" for c in range(1, 7)))


def test_criterion_02_rho_min_curve():
    t0 = time.perf_counter()
    curve = [rho_min(3, ns).value for ns in range(3, 201)]
    endpoint = curve[-1]
    monotone = all(a >= b - 1e-9 for a, b in zip(curve, curve[1:]))
    elapsed = time.perf_counter() - t0
    ok = endpoint < 0.2 and monotone and elapsed < 30.0
    _report(2, "rho_min(3,200) below one-fifth", ok, t0,
            f"endpoint={endpoint:.4f} monotone={monotone}")


def test_criterion_03_counting_oracle_equivalence():
    t0 = time.perf_counter()
    ok = True
    for q, dmax in ((2, 4), (3, 3)):
        ctx = GFCounts(q)
        for m in range(1, dmax + 1):
            for r in range(m + 1):
                want = ref_count_rank(q, m, r, r) if r else 1
                ok &= ctx.chi(m, r) == want
            for n in range(1, dmax + 1):
                total = 0
                for r in range(min(m, n) + 1):
                    cnt = ctx.rank_count(m, n, r)
                    ok &= cnt == ref_count_rank(q, m, n, r)
                    total += cnt
                ok &= total == q ** (m * n)
            for r in range(m + 1):
                ok &= ctx.gaussian_binomial(m, r) == len(ref_subspaces(q, m, r))
            for s in range(m + 1):
                v = next(iter(ref_subspaces(q, m, s)))
                for r in range(s, m + 1):
                    got = sum(1 for u in ref_subspaces(q, m, r) if v <= u)
                    ok &= ctx.extension_count(m, r, s) == got
    # |A(m, U)| = chi(m, dim U): group the 3 x 2 matrices by column span
    groups = {}
    for x in all_matrices(F2, 3, 2):
        key = Subspace.from_col_span(x).key()
        groups[key] = groups.get(key, 0) + 1
    ctx2 = GFCounts(2)
    for d in range(3):
        for u in enumerate_subspaces(F2, 3, d):
            if d <= 2:
                ok &= groups[u.key()] == ctx2.chi(2, d)
    elapsed = time.perf_counter() - t0
    ok = bool(ok) and elapsed < 60.0
    _report(3, "counting equals exhaustive enumeration", ok, t0)


def test_criterion_04_analytic_constants():
    t0 = time.perf_counter()
    xi = GFCounts(2).xi(1)
    ok = abs(xi - 0.28879) <= 1e-4
    worst = max(
        -GFCounts(2).log2_chi_tilde(m, r)
        for m in range(1, 65)
        for r in range(m + 1)
    )
    ok = ok and worst < 1.8
    _report(4, "xi constant and 1.8 bound", ok, t0,
            f"xi={xi:.6f} worst=-log2 chi_tilde={worst:.4f}")


def test_criterion_05_symmetry():
    t0 = time.perf_counter()
    models = [
        ChannelModel(F2, 3, 2, 2, "purely_random"),
        ChannelModel(F2, 3, 2, 2, "rank_uniform",
                     rank_pmf=RankPmf((0.25, 0.5, 0.25))),
    ]
    bs = [b for b in all_matrices(F2, 3, 2) if b.rank() == 2]
    pairs = list(itertools.product(all_matrices(F2, 2, 2), repeat=1))
    ds = [p[0] for p in pairs]
    worst = 0.0
    for model in models:
        for b in bs:
            for d in ds:
                for e in ds:
                    lhs, rhs, _ = symmetry_check(model, b, d, e)
                    worst = max(worst, abs(lhs - rhs))
    ok = worst <= 1e-12
    rng = make_rng(70)
    model = models[0]
    worst_phi = 0.0
    for _ in range(5):
        phi = sample_matrix(F2, 3, 3, rng, kind="full_rank")
        for x in all_matrices(F2, 3, 2):
            for y in all_matrices(F2, 3, 2):
                worst_phi = max(worst_phi, abs(
                    model.exact_transition(phi @ x, phi @ y)
                    - model.exact_transition(x, y)
                ))
    ok = ok and worst_phi <= 1e-12
    _report(5, "transition symmetry on the full grid", ok, t0,
            f"max|lhs-rhs|={worst:.2e} phi={worst_phi:.2e}")


def test_criterion_06_decomposition():
    t0 = time.perf_counter()
    model = ChannelModel(F2, 2, 2, 2, "purely_random")
    rng = make_rng(71)
    worst = 0.0
    for _ in range(50):
        a = random_alpha_input(F2, 2, 2, rng)
        lhs, rhs = decomposition_check(model, a)
        worst = max(worst, abs(lhs - rhs))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 10.0
    _report(6, "subspace MI decomposition", ok, t0, f"max gap={worst:.2e}")


def test_criterion_07_chain_inequalities():
    t0 = time.perf_counter()
    rng = make_rng(72)
    q, M, T = 2, 5, 20
    cap = 1.8 / (T * math.log2(q))
    ok = True
    for _ in range(100):
        pmf = RankPmf(tuple(rng.dirichlet(np.ones(M + 1))))
        ct = channel_training_rate(pmf, T, M)
        rate, eps = subspace_lower_bound(pmf, T, M, q)
        b = ect_bounds(pmf, T, M, q)
        ok &= 0 < eps < cap
        ok &= ct < rate <= pmf.mean + 1e-12
        ok &= abs(rate - (ct + eps)) <= 1e-12
        ok &= b.lower >= ct - 1e-12
        ok &= b.upper >= b.lower - 1e-12
    _report(7, "rate chain with epsilon window", bool(ok), t0)


def test_criterion_08_optimal_input_rank():
    t0 = time.perf_counter()
    ok = True
    details = []
    for q, M in ((3, 2), (3, 3)):
        model = ChannelModel(GF(q), 2 * M, M, M, "full_rank")
        gt = g_table(model.kernel_table(), 2 * M, q, M, M)
        ok &= gt.r_star == M
        details.append(f"q{q}M{M}T{2*M}:r*={gt.r_star}")
    for M in (2, 3):
        model = ChannelModel(F2, 2 * M + 1, M, M, "full_rank")
        gt = g_table(model.kernel_table(), 2 * M + 1, 2, M, M)
        ok &= gt.r_star == M
        details.append(f"q2M{M}T{2*M+1}:r*={gt.r_star}")
    tiny = ChannelModel(F2, 2, 1, 1, "full_rank")
    _, _, P = transition_matrix(tiny)
    c_ba, _ = blahut_arimoto(P)
    closed = full_rank_capacity(2, 1, 2)
    ok &= abs(c_ba - closed) <= 1e-6
    details.append(f"BA={c_ba:.8f} closed={closed:.8f}")
    _report(8, "optimal input rank and closed-form capacity", bool(ok), t0,
            " ".join(details))


def test_criterion_09_rank_M_optimal():
    t0 = time.perf_counter()
    pmf = RankPmf((0.1, 0.2, 0.3, 0.4))
    model = ChannelModel(F2, 4, 3, 3, "rank_uniform", rank_pmf=pmf)
    T1 = find_T1(pmf, 3, 2)
    res = c_sub_symmetric(model.kernel_table(), T1, 2, 3, 3)
    ok = res.R[3] >= 1 - 1e-6 and res.kkt.verdict and res.kkt.max_violation <= 1e-7
    _report(9, "rank-M input optimal on regular channel", ok, t0,
            f"T1={T1} R(M)={res.R[3]:.9f} kkt_violation={res.kkt.max_violation:.2e}")


def test_criterion_10_rank_metric_codes():
    t0 = time.perf_counter()
    ok = True
    details = []
    model = ChannelModel(F2, 6, 3, 3, "purely_random")
    rng = make_rng(73)
    total_trials = 0
    for k in (1, 2, 3):
        code = GabidulinCode(F2, 3, 3, k)
        dist = min_rank_distance_exhaustive(code)
        ok &= dist == 3 - k + 1
        details.append(f"k{k}:D={dist}")
        # guarantee iff rank >= k over every H (basis-rank argument covers
        # all codewords at once by linearity)
        basis = code.message_basis()
        witness = False
        for h in all_matrices(F2, 3, 3):
            rows = Mat(F2, np.array(
                [(e @ h).a.reshape(-1) for _, e in basis], dtype=np.int64
            ))
            unique = rows.rank() == 3 * k
            if h.rank() >= k:
                ok &= unique
            elif h.rank() == k - 1 and not unique:
                witness = True
        ok &= witness
        trials = 3400 if k < 3 else 3200
        rep = simulate_rm(code, model, 1, trials, rng)
        total_trials += trials
        ok &= rep["decode_errors"] == 0
        ok &= rep["decoded_when_guaranteed"] == rep["guaranteed"]
    ok &= total_trials >= 10**4
    _report(10, "Gabidulin distance and decoder guarantee", bool(ok), t0,
            " ".join(details) + f" mc_trials={total_trials}")


def test_criterion_11_throughput_identity():
    t0 = time.perf_counter()
    from loclab.rank_codes import best_throughput_rm

    pmf = RankPmf((0.0, 0.0, 0.5, 0.5))
    T, M, q = 12, 3, 2
    best, best_k = best_throughput_rm(pmf, T, M, 1, q)
    rho1 = rho_n(pmf, 1, 3)
    want = rho1.rho * channel_training_rate(pmf, T, M)
    ok = abs(best - want) <= 1e-12
    hit = next((n for n in range(1, 201) if rho_n(pmf, n, 3).rho >= 0.95), None)
    ok = ok and hit is not None
    _report(11, "throughput equals rho * training rate", ok, t0,
            f"TP={best:.6f} rho*CT={want:.6f} rho>=0.95 at n={hit}")


def test_criterion_12_linear_matrix_codes():
    t0 = time.perf_counter()
    q, T, M, s, eps = 2, 4, 2, 0.75, 0.25
    model = ChannelModel(F2, T, M, 2, "rank_uniform",
                         rank_pmf=RankPmf((0.0, 0.5, 0.5)))
    pmf = model.rank_pmf()
    ns = (8, 16, 32, 64)
    bounds = {n: failure_bound(pmf, n, s, eps, q).half_of_matrices for n in ns}
    seeds_ok = 0
    per_n_rates = {n: [] for n in ns}
    for seed in range(20):
        rng = make_rng(10_000 + seed)
        all_within = True
        for n in ns:
            code = make_generator(F2, T, M, n, s, seed=seed)
            rate = failure_rate_mc(model, code, 10**4, rng)
            per_n_rates[n].append(rate)
            if rate > bounds[n]:
                all_within = False
        seeds_ok += int(all_within)
    means = [sum(per_n_rates[n]) / 20 for n in ns]
    decreasing = all(a >= b - 1e-9 for a, b in zip(means, means[1:]))
    elapsed = time.perf_counter() - t0
    ok = seeds_ok >= 10 and decreasing and elapsed < 300.0
    _report(12, "linear matrix code failure bounds", ok, t0,
            f"seeds_within={seeds_ok}/20 mean_failures={['%.4f' % m for m in means]}")


def test_criterion_13_rateless():
    t0 = time.perf_counter()
    model = ChannelModel(F2, 4, 2, 2, "rank_uniform",
                         rank_pmf=RankPmf((0.0, 0.5, 0.5)))
    R, horizon = 6, 16
    bound = rateless_success_bound(model.rank_pmf(), R, horizon, 2)
    rng = make_rng(74)
    sessions = 1000
    successes = 0
    consistency = True
    for i in range(sessions):
        res = rateless_session(model, R, 20_000 + i, horizon, rng,
                               check_incremental=True)
        consistency &= res.consistency_ok
        successes += int(res.success)
    rate = successes / sessions
    ok = rate >= bound and consistency
    _report(13, "rateless success meets the bound", ok, t0,
            f"success={rate:.4f} bound={bound:.4f} incremental_ok={consistency}")
