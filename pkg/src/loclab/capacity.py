"""Achievable rates and optimizations for linear operator channels.

Coherent and channel-training rates, extended-channel-training bounds,
the subspace-coding lower bound with its epsilon defect, the g-table and
optimal constant input rank, threshold inaction periods T0/T1, a
Blahut-Arimoto style optimizer for the rank law with KKT verification,
and the throughput ratios rho and rho_min.

All bound formulas run in the log2 domain so T in the thousands works.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .channel import ChannelModel, KernelTable, RankPmf, exact_mutual_information, mutual_information_from_joint
from .counting import GFCounts
from .errors import DomainError, RequiresRegular, TooLarge
from .matrix import Subspace, all_matrices
from .simplex import solve_lp

LOG2E = math.log2(math.e)


def _pad(pmf: RankPmf, m: int):
    probs = list(pmf.probs) + [0.0] * max(0, m + 1 - len(pmf.probs))
    return probs


# -- elementary rates ---------------------------------------------------------


def coherent_capacity(rank_pmf: RankPmf, T: int, q: int) -> float:
    """Bits per channel use with channel knowledge at the receiver."""
    return rank_pmf.mean * T * math.log2(q)


def channel_training_rate(rank_pmf: RankPmf, T: int, M: int) -> float:
    """Normalized rate of identity-prefix training, (1 - M/T) E[rank]."""
    if T < M:
        raise DomainError(f"channel training needs T >= M, got T={T}, M={M}")
    return (1.0 - M / T) * rank_pmf.mean


@dataclass(frozen=True)
class EctBounds:
    lower: float
    upper: float
    lower_r: int
    upper_r: int


def ect_bounds(rank_pmf: RankPmf, T: int, M: int, q: int) -> EctBounds:
    """Lower and upper bounds on the extended-channel-training rate,
    with the maximizing mixing rank for each (smallest index on ties)."""
    if T < 1:
        raise DomainError("T must be >= 1")
    counts = GFCounts(q)
    p = _pad(rank_pmf, M)
    best_lower, lower_r = 0.0, 0
    for r in range(M):
        inner = sum(p[k] * k * counts.chi_tilde(r, k) for k in range(r))
        inner += r * sum(p[k] * counts.chi_tilde(k, r) for k in range(r, M + 1))
        val = (1.0 - r / T) * inner
        if val > best_lower + 1e-15:
            best_lower, lower_r = val, r
    if T >= M:
        ct = channel_training_rate(rank_pmf, T, M)
        if ct > best_lower + 1e-15:
            best_lower, lower_r = ct, M
    best_upper, upper_r = 0.0, 0
    for r in range(M + 1):
        a_r = sum(min(s, r) * p[s] for s in range(M + 1))
        val = (1.0 - r / T) * a_r
        if val > best_upper + 1e-15:
            best_upper, upper_r = val, r
    return EctBounds(best_lower, best_upper, lower_r, upper_r)


def subspace_lower_bound(rank_pmf: RankPmf, T: int, M: int, q: int):
    """(normalized achievable rate of subspace coding with the rank-M
    input, its epsilon excess over channel training)."""
    if T < M:
        raise DomainError(f"needs T >= M, got T={T}, M={M}")
    counts = GFCounts(q)
    denom = T * counts.log2_q
    eps = sum(
        pr * (counts.log2_chi_tilde(T, s) - counts.log2_chi_tilde(M, s))
        for s, pr in enumerate(rank_pmf.probs)
        if pr > 0
    ) / denom
    rate = channel_training_rate(rank_pmf, T, M) + eps
    return rate, eps


@dataclass(frozen=True)
class BoundsReport:
    T: int
    M: int
    N: int
    q: int
    e_rank: float
    c_coherent_norm: float
    c_ct_norm: Optional[float]
    ect_lower_norm: float
    ect_upper_norm: float
    ect_lower_r: int
    ect_upper_r: int
    subspace_lower_norm: Optional[float]
    epsilon_T_q: Optional[float]
    upper_norm: float


def bounds_report(rank_pmf: RankPmf, T: int, M: int, N: int, q: int) -> BoundsReport:
    e = rank_pmf.mean
    ect = ect_bounds(rank_pmf, T, M, q)
    if T >= M:
        ct = channel_training_rate(rank_pmf, T, M)
        low, eps = subspace_lower_bound(rank_pmf, T, M, q)
    else:
        ct = low = eps = None
    return BoundsReport(
        T=T, M=M, N=N, q=q, e_rank=e, c_coherent_norm=e, c_ct_norm=ct,
        ect_lower_norm=ect.lower, ect_upper_norm=ect.upper,
        ect_lower_r=ect.lower_r, ect_upper_r=ect.upper_r,
        subspace_lower_norm=low, epsilon_T_q=eps, upper_norm=e,
    )


# -- the subspace mutual-information decomposition ------------------------------


def decomposition_J(joint: np.ndarray, T: int, q: int) -> float:
    """J = sum_{r,s} p(r, s) log2(chi(T, s) / chi(r, s)) in bits."""
    counts = GFCounts(q)
    joint = np.asarray(joint, dtype=float)
    out = 0.0
    for r in range(joint.shape[0]):
        for s in range(joint.shape[1]):
            p = joint[r, s]
            if p > 0:
                out += p * (counts.log2_chi(T, s) - counts.log2_chi(r, s))
    return out


def rank_joint(model: ChannelModel, alpha_input) -> np.ndarray:
    """Joint pmf of (rank X, rank Y) under an alpha-type input, exact."""
    rmax = min(model.T, model.M)
    smax = min(rmax, model.N)
    joint = np.zeros((rmax + 1, smax + 1))
    for x, px in alpha_input.support():
        for hm, ph in model.h_support():
            joint[x.rank(), (x @ hm).rank()] += px * ph
    return joint


def decomposition_check(model: ChannelModel, alpha_input):
    """Exact I(<X>;<Y>) versus I(rank X; rank Y) + J; returns both sides."""
    lhs = exact_mutual_information(model, alpha_input, lens="subspace")
    joint = rank_joint(model, alpha_input)
    flat = {
        (r, s): joint[r, s]
        for r in range(joint.shape[0])
        for s in range(joint.shape[1])
        if joint[r, s] > 0
    }
    rhs = mutual_information_from_joint(flat) + decomposition_J(joint, model.T, model.field.q)
    return lhs, rhs


# -- g table and the optimal constant input rank ------------------------------------


@dataclass(frozen=True)
class GTable:
    T: int
    q: int
    M: int
    N: int
    gbar: np.ndarray  # gbar[r] in bits, r = 0..rmax
    r_star: int
    c_csub_norm: float
    gap_guarantee_norm: float  # C_sub - C_csub never exceeds this
    provenance: str


def g_table(kernel: KernelTable, T: int, q: int, M: int, N: int) -> GTable:
    counts = GFCounts(q)
    rmax = kernel.rmax
    gbar = np.zeros(rmax + 1)
    for r in range(rmax + 1):
        for s in range(min(r, kernel.P.shape[1] - 1) + 1):
            p = kernel.P[r, s]
            if p > 0:
                gbar[r] += p * (counts.log2_chi(T, s) - counts.log2_chi(r, s))
    r_star = int(np.argmax(np.round(gbar, 12)))
    return GTable(
        T=T, q=q, M=M, N=N, gbar=gbar, r_star=r_star,
        c_csub_norm=gbar[r_star] / (T * counts.log2_q),
        gap_guarantee_norm=math.log2(min(M, N)) / (T * counts.log2_q),
        provenance=kernel.provenance,
    )


def g_of_subspace(model: ChannelModel, u: Subspace, T: int) -> float:
    """g for one input row space, for channels without dimension symmetry."""
    counts = GFCounts(model.field.q)
    row = model.rank_kernel_subspace(u)
    return sum(
        row[s] * (counts.log2_chi(T, s) - counts.log2_chi(u.dim, s))
        for s in range(len(row))
        if row[s] > 0
    )


def optimal_input_rank(gt: GTable):
    return gt.r_star, gt.c_csub_norm


def full_rank_capacity(T: int, M: int, q: int) -> float:
    """Capacity in bits of the invertible/full-rank channel:
    log2 of the number of subspaces of F^T with dimension <= min(T, M)."""
    counts = GFCounts(q)
    return math.log2(counts.pj_size(min(T, M), T))


# -- Theta and the threshold inaction periods -----------------------------------------


def theta(T: int, r: int, rank_pmf: RankPmf, M: int, q: int) -> float:
    """Linear-in-T lower bound on g(F^M) - g(V) for dim V = r < rank*."""
    counts = GFCounts(q)
    rstar = rank_pmf.rank_star
    p_star = rank_pmf.probs[rstar]
    return (
        (T - M) * (rstar - r) * p_star
        - r * (M - r)
        + counts.log2_chi_tilde(r, r) / counts.log2_q
    )


def find_T0(rank_pmf: RankPmf, M: int, q: int, t_cap: int = 10**7) -> int:
    """Least T with Theta(T, r) > 0 for every r below the top rank, from
    which the optimal input rank is at least rank*."""
    rstar = rank_pmf.rank_star
    for T in range(M, t_cap):
        if all(theta(T, r, rank_pmf, M, q) > 0.0 for r in range(rstar)):
            return T
    raise DomainError("no T0 below the search cap")  # pragma: no cover


def find_T1(rank_pmf: RankPmf, M: int, q: int, t_cap: int = 10**7) -> int:
    """Least T making the rank-M input provably optimal on a regular
    channel: Theta(T, r) >= -log2 min_{s<M} p(s) for all r < M."""
    if not rank_pmf.is_regular(M):
        raise RequiresRegular("find_T1 needs positive mass on every rank 0..M")
    slack = -math.log2(min(rank_pmf.probs[s] for s in range(M)))
    for T in range(M, t_cap):
        if all(theta(T, r, rank_pmf, M, q) >= slack for r in range(M)):
            return T
    raise DomainError("no T1 below the search cap")  # pragma: no cover


@dataclass(frozen=True)
class ThetaReport:
    M: int
    q: int
    T0: int
    T1: Optional[int]  # None when the channel is not regular


def theta_report(rank_pmf: RankPmf, M: int, q: int) -> ThetaReport:
    try:
        t1 = find_T1(rank_pmf, M, q)
    except RequiresRegular:
        t1 = None
    return ThetaReport(M=M, q=q, T0=find_T0(rank_pmf, M, q), T1=t1)


# -- rank-law optimizer with KKT certificate -------------------------------------------


@dataclass(frozen=True)
class KKTReport:
    lambda_bar: float
    lambda_diag: float  # the paper-style multiplier diagnostic, value - log2 e
    multipliers: np.ndarray  # per-letter D_r + gbar_r
    max_violation: float
    verdict: bool


@dataclass(frozen=True)
class CSubSymmetric:
    value_bits: float
    value_norm: float
    R: np.ndarray
    kkt: KKTReport
    iterations: int
    converged: bool


def _letter_scores(R, P, gbar):
    """D_r + gbar_r where D_r = KL(P(.|r) || output marginal), in bits."""
    py = R @ P
    scores = np.zeros(len(R))
    for r in range(len(R)):
        d = 0.0
        for s in range(P.shape[1]):
            if P[r, s] > 0:
                d += P[r, s] * math.log2(P[r, s] / py[s])
        scores[r] = d + gbar[r]
    return scores


def c_sub_symmetric(
    kernel: KernelTable,
    T: int,
    q: int,
    M: int,
    N: int,
    tolerance: float = 1e-9,
    max_iter: int = 10**5,
    kkt_tolerance: float = 1e-7,
) -> CSubSymmetric:
    """Maximize I(rank X; rank Y) + sum_r R(r) gbar[r] over the rank law
    by multiplicative updates; valid when the subspace kernel depends on
    the input row space only through its dimension."""
    gt = g_table(kernel, T, q, M, N)
    P = kernel.P
    n = P.shape[0]
    R = np.full(n, 1.0 / n)
    value = 0.0
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        scores = _letter_scores(R, P, gbar=gt.gbar)
        value = float(R @ scores)
        if scores.max() - value < tolerance:
            converged = True
            break
        w = np.exp2(scores - scores.max())
        R = R * w
        R = R / R.sum()
    scores = _letter_scores(R, P, gt.gbar)
    value = float(R @ scores)
    active = R > 1e-7
    violation = 0.0
    lam = value
    for r in range(n):
        if active[r]:
            violation = max(violation, abs(scores[r] - lam))
        else:
            violation = max(violation, max(0.0, scores[r] - lam))
    kkt = KKTReport(
        lambda_bar=lam - LOG2E,
        lambda_diag=lam - LOG2E,
        multipliers=scores,
        max_violation=violation,
        verdict=bool(violation <= kkt_tolerance),
    )
    counts = GFCounts(q)
    return CSubSymmetric(
        value_bits=value,
        value_norm=value / (T * counts.log2_q),
        R=R,
        kkt=kkt,
        iterations=iterations,
        converged=converged,
    )


def blahut_arimoto(P: np.ndarray, tolerance: float = 1e-9, max_iter: int = 10**5):
    """Capacity of a DMC from its transition matrix, in bits."""
    n = P.shape[0]
    R = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        scores = _letter_scores(R, P, np.zeros(n))
        value = float(R @ scores)
        if scores.max() - value < tolerance:
            return value, R
        w = np.exp2(scores - scores.max())
        R = R * w / (R * w).sum()
    return float(R @ _letter_scores(R, P, np.zeros(n))), R


def transition_matrix(model: ChannelModel):
    """(inputs, output keys, P) over the full T x M input space; exact."""
    q = model.field.q
    if q ** (model.T * model.M) > 1 << 16:
        raise TooLarge("input space exceeds the enumeration guard")
    inputs = list(all_matrices(model.field, model.T, model.M))
    out_index: dict = {}
    rows = []
    for x in inputs:
        row: dict = {}
        for hm, ph in model.h_support():
            k = (x @ hm).key()
            row[k] = row.get(k, 0.0) + ph
            out_index.setdefault(k, len(out_index))
        rows.append(row)
    P = np.zeros((len(inputs), len(out_index)))
    for i, row in enumerate(rows):
        for k, pr in row.items():
            P[i, out_index[k]] = pr
    return inputs, list(out_index), P


# -- throughput ratios ------------------------------------------------------------------


@dataclass(frozen=True)
class RhoReport:
    n: int
    rho: float
    best_r: int


def rho_n(rank_pmf: RankPmf, n: int, N_star: int) -> RhoReport:
    """rho(n) = max_{r <= n N*} r Pr{rank(H_blocks) >= r} / (n E[rank])."""
    if n < 1:
        raise DomainError("n must be >= 1")
    pmf_n = rank_pmf.n_fold(n)
    mean = n * rank_pmf.mean
    best, best_r = 0.0, 0
    for r in range(1, min(n * N_star, pmf_n.max_rank) + 1):
        val = r * pmf_n.tail(r)
        if val > best * (1 + 1e-15) and val > best + 1e-15 * mean:
            best, best_r = val, r
    return RhoReport(n=n, rho=best / mean if mean > 0 else 1.0, best_r=best_r)


@dataclass(frozen=True)
class RhoMinReport:
    c: float
    N_star: int
    value: float
    pmf: RankPmf
    exact: bool
    max_residual: float


def rho_min(c, N_star: int, exact: Optional[bool] = None) -> RhoMinReport:
    """Worst-case rho(1) over rank laws on {0..N*} with mean exactly c:

        min t  s.t.  r * sum_{s>=r} p_s <= t c  for r = 1..N*,
                     sum p_s = 1,  sum s p_s = c,  p >= 0.

    Solved by the dense simplex; exact rational pivoting by default for
    modest N*, float for the long sweeps.
    """
    cf = Fraction(c).limit_denominator(10**12) if not isinstance(c, Fraction) else c
    if not 0 < cf <= N_star:
        raise DomainError(f"mean rank must satisfy 0 < c <= N*, got {c}")
    if exact is None:
        exact = N_star <= 24
    nv = N_star + 2  # p_0..p_{N*}, then t
    obj = [0] * (nv - 1) + [1]
    A_ub, b_ub = [], []
    for r in range(1, N_star + 1):
        row = [0] * nv
        for s in range(r, N_star + 1):
            row[s] = r
        row[-1] = -cf if exact else -float(cf)
        A_ub.append(row)
        b_ub.append(0)
    A_eq = [
        [1] * (N_star + 1) + [0],
        list(range(N_star + 1)) + [0],
    ]
    b_eq = [1, cf if exact else float(cf)]
    res = solve_lp(obj, A_ub, b_ub, A_eq, b_eq, exact=exact)
    if res.status != "optimal":
        raise DomainError(f"rho_min LP did not solve: {res.status}")
    probs = np.array([float(v) for v in res.x[: N_star + 1]])
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    t = float(res.value)
    # feasibility residuals of the reported solution
    resid = abs(probs.sum() - 1.0)
    resid = max(resid, abs(float(np.arange(N_star + 1) @ probs) - float(cf)))
    for r in range(1, N_star + 1):
        resid = max(resid, r * probs[r:].sum() - t * float(cf))
    return RhoMinReport(
        c=float(cf), N_star=N_star, value=t, pmf=RankPmf(tuple(probs)),
        exact=exact, max_residual=float(resid),
    )
