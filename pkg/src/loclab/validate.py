"""Brute-force validation suites behind `loclab validate`.

Each suite replays the enumeration oracles against the closed forms and
returns a machine-readable summary; the CLI exits nonzero on failure.
"""

from __future__ import annotations

import numpy as np

from .capacity import decomposition_check
from .channel import ChannelModel, RankPmf, random_alpha_input, symmetry_check
from .counting import GFCounts
from .errors import UsageError
from .fields import GF
from .matrix import (
    Mat,
    Subspace,
    all_matrices,
    enumerate_subspaces,
    sample_matrix,
)
from .rank_codes import GabidulinCode, decode_known_H, min_rank_distance_exhaustive
from .rng import make_rng

SUITES = ("counting", "symmetry", "decomposition", "codes")


def run_suite(name: str, q: int = 2, max_dim: int = 4, seed: int = 0) -> dict:
    if name == "counting":
        checks = _counting_checks(q, max_dim)
    elif name == "symmetry":
        checks = _symmetry_checks(seed)
    elif name == "decomposition":
        checks = _decomposition_checks(seed)
    elif name == "codes":
        checks = _code_checks(seed)
    else:
        raise UsageError(
            f"unknown suite {name!r}; choose from {', '.join(SUITES)}"
        )
    return {
        "suite": name,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


def _check(name, passed, detail=""):
    return {"name": name, "passed": bool(passed), "detail": detail}


def _counting_checks(q, max_dim):
    field = GF(q)
    ctx = GFCounts(q)
    checks = []

    rank_hist = {}
    for m in range(1, max_dim + 1):
        for n in range(1, max_dim + 1):
            hist = {}
            for mat in all_matrices(field, m, n):
                r = mat.rank()
                hist[r] = hist.get(r, 0) + 1
            rank_hist[(m, n)] = hist

    ok = all(
        ctx.chi(m, r) == rank_hist[(m, r)].get(r, 0)
        for m in range(1, max_dim + 1)
        for r in range(1, min(m, max_dim) + 1)
    )
    checks.append(_check("chi equals full-rank enumeration", ok))

    ok = all(
        ctx.rank_count(m, n, r) == rank_hist[(m, n)].get(r, 0)
        for m in range(1, max_dim + 1)
        for n in range(1, max_dim + 1)
        for r in range(min(m, n) + 1)
    )
    checks.append(_check("rank_count equals enumeration", ok))

    ok = all(
        sum(ctx.rank_count(m, n, r) for r in range(min(m, n) + 1)) == q ** (m * n)
        for m in range(1, max_dim + 1)
        for n in range(1, max_dim + 1)
    )
    checks.append(_check("rank_count sums to q^(m n)", ok))

    ok = True
    for t in range(1, max_dim + 1):
        for d in range(t + 1):
            subs = list(enumerate_subspaces(field, t, d))
            if len(subs) != ctx.gaussian_binomial(t, d):
                ok = False
    checks.append(_check("gaussian binomial counts subspaces", ok))

    ok = True
    m = min(3, max_dim)
    for s in range(m + 1):
        v = next(iter(enumerate_subspaces(field, m, s)))
        for r in range(s, m + 1):
            got = sum(
                1 for u in enumerate_subspaces(field, m, r) if u.contains(v)
            )
            if got != ctx.extension_count(m, r, s):
                ok = False
    checks.append(_check("extension_count equals enumeration", ok))

    t, mm = 3, 2
    groups = {}
    for x in all_matrices(field, t, mm):
        key = Subspace.from_col_span(x).key()
        groups[key] = groups.get(key, 0) + 1
    ok = all(
        groups[u.key()] == ctx.chi(mm, d)
        for d in range(mm + 1)
        for u in enumerate_subspaces(field, t, d)
    )
    checks.append(_check("|A(m, U)| = chi(m, dim U)", ok))

    checks.append(_check(
        "xi(1) near 0.28879 for q=2",
        abs(GFCounts(2).xi(1) - 0.28879) < 1e-4,
        f"value {GFCounts(2).xi(1):.6f}",
    ))
    worst = max(
        -GFCounts(2).log2_chi_tilde(m, r)
        for m in range(1, 65)
        for r in range(m + 1)
    )
    checks.append(_check("-log2 chi_tilde < 1.8 on the grid", worst < 1.8,
                         f"worst {worst:.4f}"))
    checks.append(_check(
        "projective-space size bound",
        all(GFCounts(2).pj_bound_check(m) for m in range(1, 13)),
    ))
    return checks


def _symmetry_checks(seed):
    f2 = GF(2)
    checks = []
    models = [
        ChannelModel(f2, 3, 2, 2, "purely_random"),
        ChannelModel(f2, 3, 2, 2, "rank_uniform",
                     rank_pmf=RankPmf((0.25, 0.5, 0.25))),
    ]
    bs = [b for b in all_matrices(f2, 3, 2) if b.rank() == 2]
    ds = list(all_matrices(f2, 2, 2))
    for model in models:
        worst = 0.0
        for b in bs:
            for d in ds:
                for e in ds:
                    lhs, rhs, _ = symmetry_check(model, b, d, e)
                    worst = max(worst, abs(lhs - rhs))
        checks.append(_check(
            f"left-factor invariance ({model.kind})", worst <= 1e-12,
            f"max deviation {worst:.2e}",
        ))
    model = models[0]
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(5):
        phi = sample_matrix(f2, 3, 3, rng, kind="full_rank")
        for x in all_matrices(f2, 3, 2):
            for y in all_matrices(f2, 3, 2):
                worst = max(worst, abs(
                    model.exact_transition(phi @ x, phi @ y)
                    - model.exact_transition(x, y)
                ))
    checks.append(_check("invertible relabeling invariance", worst <= 1e-12,
                         f"max deviation {worst:.2e}"))
    return checks


def _decomposition_checks(seed):
    f2 = GF(2)
    model = ChannelModel(f2, 2, 2, 2, "purely_random")
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(50):
        a = random_alpha_input(f2, 2, 2, rng)
        lhs, rhs = decomposition_check(model, a)
        worst = max(worst, abs(lhs - rhs))
    return [_check(
        "subspace MI = rank MI + packing term", worst <= 1e-9,
        f"max deviation {worst:.2e}",
    )]


def _code_checks(seed):
    f2 = GF(2)
    checks = []
    rng = make_rng(seed)
    for k in (1, 2, 3):
        code = GabidulinCode(f2, 3, 3, k)
        dist = min_rank_distance_exhaustive(code)
        checks.append(_check(
            f"Singleton equality (k={k})", dist == 3 - k + 1,
            f"distance {dist}",
        ))
        ok = True
        witness = False
        basis = code.message_basis()
        for h in all_matrices(f2, 3, 3):
            rows = Mat(f2, np.array(
                [(e @ h).a.reshape(-1) for _, e in basis], dtype=np.int64
            ))
            unique = rows.rank() == 3 * k
            if h.rank() >= k and not unique:
                ok = False
            if h.rank() == k - 1 and not unique:
                witness = True
        checks.append(_check(f"decoder guarantee iff rank (k={k})",
                             ok and (witness or k == 0)))
        errors = 0
        trials = 600
        model = ChannelModel(f2, 6, 3, 3, "purely_random")
        from .rank_codes import extract_channel, lift, split_blocks

        for _ in range(trials):
            msg = code.message_from_indices(
                [int(v) for v in rng.integers(0, code.ext.q, size=k)]
            )
            lifted = lift(split_blocks(code.encode(msg), 1))
            ys = [model.transmit(b, rng) for b in lifted.blocks]
            hs, yts = extract_channel(ys, 3)
            res = decode_known_H(code, yts, hs)
            if res.guaranteed and (res.status != "decoded" or res.message != msg):
                errors += 1
        checks.append(_check(
            f"no decode errors when guaranteed (k={k})", errors == 0,
            f"{errors} errors in {trials} trials",
        ))
    return checks
