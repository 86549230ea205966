"""Channel models: sampling, exact kernels, symmetry, alpha-type inputs."""

import itertools
import math

import numpy as np
import pytest

from loclab.channel import (
    AlphaInput,
    ChannelModel,
    RankPmf,
    exact_mutual_information,
    random_alpha_input,
    mixing_rank_kernel,
    symmetry_check,
    z_channel_capacity,
    z_channel_optimal_p0,
)
from loclab.counting import GFCounts
from loclab.errors import DomainError, NotFullRank, ShapeError
from loclab.fields import GF
from loclab.matrix import Mat, Subspace, all_matrices, enumerate_subspaces, sample_matrix
from loclab.rng import make_rng

F2 = GF(2)


def pure_channel(T=2, M=2, N=2, q=2):
    return ChannelModel(GF(q) if q in (2, 3, 5) else GF(2, 2), T, M, N, "purely_random")


# -- RankPmf ---------------------------------------------------------------


def test_rank_pmf_validation():
    with pytest.raises(DomainError):
        RankPmf((0.5, 0.6))
    with pytest.raises(DomainError):
        RankPmf((-0.1, 1.1))
    pmf = RankPmf((0.25, 0.5, 0.25))
    assert pmf.mean == pytest.approx(1.0)
    assert pmf.rank_star == 2
    assert pmf.tail(1) == pytest.approx(0.75)


def test_rank_pmf_convolution():
    pmf = RankPmf((0.5, 0.5))
    two = pmf.n_fold(2)
    assert two.probs == pytest.approx((0.25, 0.5, 0.25))
    assert two.mean == pytest.approx(2 * pmf.mean)


# -- model construction / configs ----------------------------------------------


def test_kind_validation():
    with pytest.raises(DomainError):
        ChannelModel(F2, 2, 2, 2, "z", p=0.5)
    with pytest.raises(DomainError):
        ChannelModel(GF(3), 1, 1, 1, "z", p=0.5)
    with pytest.raises(DomainError):
        ChannelModel(F2, 2, 3, 2, "network")
    with pytest.raises(DomainError):
        ChannelModel(F2, 2, 2, 2, "rank_uniform")
    with pytest.raises(DomainError):
        ChannelModel(F2, 2, 2, 2, "rank_uniform",
                     rank_pmf=RankPmf((0, 0, 0, 1.0)))


def test_config_roundtrip():
    cfg = {
        "field": {"p": 2, "k": 1},
        "T": 4, "M": 2, "N": 2,
        "kind": "rank_uniform",
        "rank_pmf": [0.0, 0.5, 0.5],
        "seed": 11,
    }
    m = ChannelModel.from_config(cfg)
    assert m.T == 4 and m.kind == "rank_uniform" and m.seed == 11
    assert m.rank_pmf().probs == pytest.approx((0.0, 0.5, 0.5))


# -- rank pmfs -------------------------------------------------------------------


def test_rank_pmf_purely_random_matches_enumeration():
    model = pure_channel(M=2, N=3)
    pmf = model.rank_pmf()
    hist = np.zeros(3)
    for hm, ph in model.h_support():
        hist[hm.rank()] += ph
    assert pmf.probs == pytest.approx(tuple(hist))


def test_rank_pmf_network_enumeration():
    model = ChannelModel(GF(3), 2, 2, 2, "network")
    pmf = model.rank_pmf()
    assert abs(sum(pmf.probs) - 1) < 1e-12
    # H = [[a1, a2 b1], [0, b2]]: rank 0 iff all of a1, b2, a2 b1 are zero
    q = 3.0
    p_rank0 = (1 / q) ** 2 * (1 - (1 - 1 / q) ** 2)
    assert pmf.probs[0] == pytest.approx(p_rank0)


# -- transmission ------------------------------------------------------------------


def test_transmit_fixed_identity():
    model = ChannelModel(F2, 3, 2, 2, "fixed", H=Mat.identity(F2, 2))
    rng = make_rng(0)
    x = sample_matrix(F2, 3, 2, rng)
    assert model.transmit(x, rng) == x


def test_transmit_z_sure_flip():
    model = ChannelModel(F2, 1, 1, 1, "z", p=1.0)
    rng = make_rng(1)
    for _ in range(10):
        assert model.transmit(Mat(F2, [[1]]), rng).is_zero()


def test_transmit_purely_random_scalar_frequency():
    model = ChannelModel(F2, 1, 1, 1, "purely_random")
    rng = make_rng(2)
    n = 10**5
    hs = model.sample_H_batch(rng, n)
    zeros = int((hs[:, 0, 0] == 0).sum())
    sigma = math.sqrt(n * 0.25)
    assert abs(zeros - n / 2) < 3 * sigma


def test_sample_batch_matches_rank_pmf():
    pmf = RankPmf((0.2, 0.5, 0.3))
    model = ChannelModel(F2, 2, 2, 2, "rank_uniform", rank_pmf=pmf)
    rng = make_rng(3)
    n = 10**5
    hs = model.sample_H_batch(rng, n)
    ranks = [Mat(F2, h).rank() for h in hs[:2000]]
    freqs = np.bincount(ranks, minlength=3) / 2000
    for r in range(3):
        sigma = math.sqrt(pmf.probs[r] * (1 - pmf.probs[r]) / 2000) or 1e-3
        assert abs(freqs[r] - pmf.probs[r]) < 4 * sigma + 1e-9


def test_sample_H_uniform_within_rank_class():
    pmf = RankPmf((0.0, 1.0))
    model = ChannelModel(F2, 1, 2, 2, "rank_uniform", rank_pmf=pmf)
    rng = make_rng(4)
    n = 9 * 4000
    counts = {}
    for h in model.sample_H_batch(rng, n):
        counts[h.tobytes()] = counts.get(h.tobytes(), 0) + 1
    assert len(counts) == 9
    expected = n / 9
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 26.12  # 8 dof at 1e-3


# -- exact transitions ----------------------------------------------------------------


def enumeration_transition(model, x, y):
    return sum(ph for hm, ph in model.h_support() if (x @ hm) == y)


@pytest.mark.parametrize(
    "model",
    [
        pure_channel(T=2, M=2, N=2),
        ChannelModel(F2, 2, 2, 2, "full_rank"),
        ChannelModel(F2, 2, 2, 2, "rank_uniform", rank_pmf=RankPmf((0.3, 0.3, 0.4))),
        ChannelModel(F2, 2, 2, 2, "network"),
        ChannelModel(F2, 2, 2, 2, "fixed", H=Mat(F2, [[1, 1], [0, 1]])),
        ChannelModel(GF(3), 1, 2, 2, "purely_random"),
        ChannelModel(GF(3), 1, 2, 2, "full_rank"),
    ],
    ids=lambda m: f"{m.field!r}-{m.kind}",
)
def test_exact_transition_matches_enumeration(model):
    f = model.field
    rng = make_rng(5)
    for _ in range(40):
        x = sample_matrix(f, model.T, model.M, rng)
        y = sample_matrix(f, model.T, model.N, rng)
        assert model.exact_transition(x, y) == pytest.approx(
            enumeration_transition(model, x, y), abs=1e-12
        )
    # and on actually-reachable outputs
    for _ in range(40):
        x = sample_matrix(f, model.T, model.M, rng)
        y = x @ model.sample_H(rng)
        assert model.exact_transition(x, y) == pytest.approx(
            enumeration_transition(model, x, y), abs=1e-12
        )


def test_transition_rows_sum_to_one():
    for model in (
        pure_channel(T=2, M=2, N=2),
        ChannelModel(F2, 2, 2, 2, "full_rank"),
        ChannelModel(F2, 2, 2, 2, "rank_uniform", rank_pmf=RankPmf((0.5, 0.25, 0.25))),
        ChannelModel(F2, 2, 2, 2, "network"),
        ChannelModel(F2, 2, 2, 2, "fixed", H=Mat(F2, [[1, 1], [0, 1]])),
        ChannelModel(F2, 1, 1, 1, "z", p=0.3),
    ):
        for x in all_matrices(model.field, model.T, model.M):
            total = sum(
                model.exact_transition(x, y)
                for y in all_matrices(model.field, model.T, model.N)
            )
            assert total == pytest.approx(1.0, abs=1e-9)


def test_transition_zero_outside_span():
    model = pure_channel(T=2, M=2, N=2)
    x = Mat(F2, [[1, 0], [0, 0]])
    y = Mat(F2, [[0, 0], [1, 0]])  # column space not inside <x>
    assert model.exact_transition(x, y) == 0.0


def test_transition_purely_random_value():
    # q = 2, N = 1, rank(X) = 1 gives probability 1/2 on valid outputs
    model = ChannelModel(F2, 2, 2, 1, "purely_random")
    x = Mat(F2, [[1, 0], [1, 0]])
    y = Mat(F2, [[1], [1]])
    assert model.exact_transition(x, y) == pytest.approx(0.5)


def test_transition_full_rank_scalar():
    model = ChannelModel(F2, 1, 1, 1, "full_rank")
    assert model.exact_transition(Mat(F2, [[1]]), Mat(F2, [[1]])) == 1.0


def test_transition_z_channel():
    model = ChannelModel(F2, 1, 1, 1, "z", p=0.3)
    one = Mat(F2, [[1]])
    zero = Mat(F2, [[0]])
    assert model.exact_transition(one, zero) == pytest.approx(0.3)
    assert model.exact_transition(one, one) == pytest.approx(0.7)
    assert model.exact_transition(zero, zero) == 1.0


def test_monte_carlo_matches_exact():
    # every kind with an exact kernel: empirical output frequencies agree
    models = [
        ChannelModel(F2, 2, 2, 2, "rank_uniform",
                     rank_pmf=RankPmf((0.2, 0.3, 0.5))),
        pure_channel(T=2, M=2, N=2),
        ChannelModel(F2, 2, 2, 2, "full_rank"),
        ChannelModel(F2, 2, 2, 2, "network"),
        ChannelModel(F2, 2, 2, 2, "fixed", H=Mat(F2, [[1, 0], [1, 1]])),
    ]
    x = Mat(F2, [[1, 0], [0, 1]])
    for idx, model in enumerate(models):
        rng = make_rng(600 + idx)
        n = 10**5 if model.kind == "rank_uniform" else 2 * 10**4
        counts: dict = {}
        hs = model.sample_H_batch(rng, n)
        for h in hs:
            y = x @ Mat(F2, h)
            counts[y.key()] = counts.get(y.key(), 0) + 1
        for y in all_matrices(F2, 2, 2):
            pr = model.exact_transition(x, y)
            observed = counts.get(y.key(), 0)
            sigma = math.sqrt(n * pr * (1 - pr)) if 0 < pr < 1 else 0.0
            assert abs(observed - n * pr) <= 4 * sigma + 5, (model.kind, pr)


# -- symmetry -----------------------------------------------------------------------


def test_symmetry_identity_B():
    model = pure_channel(T=2, M=2, N=2)
    rng = make_rng(7)
    d = sample_matrix(F2, 2, 2, rng)
    e = sample_matrix(F2, 2, 2, rng)
    lhs, rhs, ok = symmetry_check(model, Mat.identity(F2, 2), d, e)
    assert ok and lhs == rhs


def test_symmetry_full_grid_3x2():
    # every full-column-rank 3x2 B, all (D, E) pairs, on two channel kinds
    models = [
        pure_channel(T=3, M=2, N=2),
        ChannelModel(F2, 3, 2, 2, "rank_uniform",
                     rank_pmf=RankPmf((0.25, 0.5, 0.25))),
    ]
    bs = [b for b in all_matrices(F2, 3, 2) if b.rank() == 2]
    ds = list(all_matrices(F2, 2, 2))
    es = list(all_matrices(F2, 2, 2))
    for model in models:
        for b in bs:
            for d, e in itertools.product(ds, es):
                lhs, rhs, ok = symmetry_check(model, b, d, e)
                assert ok, (b, d, e, lhs, rhs)


def test_symmetry_requires_full_rank():
    model = pure_channel(T=2)
    with pytest.raises(NotFullRank):
        symmetry_check(model, Mat.zeros(F2, 2, 2), Mat.zeros(F2, 2, 2),
                       Mat.zeros(F2, 2, 2))


def test_phi_invariance():
    model = pure_channel(T=3, M=2, N=2)
    rng = make_rng(8)
    for _ in range(5):
        phi = sample_matrix(F2, 3, 3, rng, kind="full_rank")
        for _ in range(40):
            x = sample_matrix(F2, 3, 2, rng)
            y = sample_matrix(F2, 3, 2, rng)
            assert model.exact_transition(phi @ x, phi @ y) == pytest.approx(
                model.exact_transition(x, y), abs=1e-12
            )


# -- rank kernels ---------------------------------------------------------------------


def test_rank_kernel_rank_zero():
    model = pure_channel()
    row, prov = model.rank_kernel_row(0)
    assert row == pytest.approx([1.0])


def test_rank_kernel_scalar_purely_random():
    model = ChannelModel(F2, 1, 1, 1, "purely_random")
    row, prov = model.rank_kernel_row(1)
    assert prov == "closed_form"
    assert row == pytest.approx([0.5, 0.5])


def test_subspace_intersection_count_vs_enumeration():
    # dim(V cap K) = dim V + dim K - dim(V + K), with V + K from stacking
    from loclab.channel import subspace_intersection_count

    for q in (2, 3):
        f = GF(q)
        counts = GFCounts(q)
        m = 3
        for kappa in range(m + 1):
            K = next(iter(enumerate_subspaces(f, m, kappa)))
            for k in range(m + 1):
                for j in range(k + 1):
                    got = subspace_intersection_count(counts, m, kappa, k, j)
                    want = sum(
                        1
                        for v in enumerate_subspaces(f, m, k)
                        if v.dim + K.dim - v.basis.vstack(K.basis).rank() == j
                    )
                    assert got == want, (q, kappa, k, j)


def test_rank_class_kernel_vs_enumeration():
    # Pr{rank(D H) = s} with D fixed full rank, H uniform on a rank class
    from loclab.channel import rank_class_kernel

    counts = GFCounts(2)
    for m, n in ((2, 2), (3, 2)):
        for r in range(1, m + 1):
            d = Mat(F2, [[1 if i == j else 0 for j in range(m)] for i in range(r)])
            for k in range(min(m, n) + 1):
                model = ChannelModel(F2, r, m, n, "rank_uniform",
                                     rank_pmf=RankPmf.point(k, min(m, n)))
                want = np.zeros(r + 1)
                for hm, ph in model.h_support():
                    want[(d @ hm).rank()] += ph
                got = np.array(
                    [rank_class_kernel(counts, m, r, k, s) for s in range(r + 1)]
                )
                assert got == pytest.approx(want, abs=1e-12), (m, n, r, k)


def test_mixing_rank_kernel_vs_enumeration():
    # Pr{rank(G H) = s} with G purely random, H fixed of rank k
    counts = GFCounts(2)
    m, n = 2, 2
    for r in (1, 2):
        for k in range(3):
            hm = Mat(F2, [[1 if i == j and i < k else 0 for j in range(n)]
                          for i in range(m)])
            want = np.zeros(r + 1)
            for g in all_matrices(F2, r, m):
                want[(g @ hm).rank()] += 1.0 / 2 ** (r * m)
            got = np.array(
                [mixing_rank_kernel(counts, r, k, s) for s in range(r + 1)]
            )
            assert got == pytest.approx(want, abs=1e-12)
    # the value the extended-training bound uses: q=2, k=r=s=1 -> 1/2
    assert mixing_rank_kernel(counts, 1, 1, 1) == pytest.approx(0.5)


def test_purely_random_kernel_equals_class_mixture():
    # the purely random channel is the rank-class mixture with its own pmf
    model = pure_channel(T=2, M=2, N=2)
    mixture = ChannelModel(F2, 2, 2, 2, "rank_uniform",
                           rank_pmf=model.rank_pmf())
    for r in (0, 1, 2):
        a, _ = model.rank_kernel_row(r)
        b, _ = mixture.rank_kernel_row(r)
        assert a == pytest.approx(b, abs=1e-12)


def test_rank_kernel_invariant_to_D_choice():
    # same row space -> same kernel, over every full-rank D (tiny instance)
    model = ChannelModel(F2, 2, 2, 2, "network")
    for u in enumerate_subspaces(F2, 2, 1):
        base = model.rank_kernel_subspace(u)
        for d in all_matrices(F2, 1, 2):
            if d.rank() != 1 or Subspace.from_row_span(d) != u:
                continue
            got = np.zeros(2)
            for hm, ph in model.h_support():
                got[(d @ hm).rank()] += ph
            assert got == pytest.approx(base, abs=1e-12)


def test_rank_kernel_row_mixture_vs_enumerated_average():
    model = ChannelModel(F2, 2, 2, 2, "rank_uniform",
                         rank_pmf=RankPmf((0.2, 0.5, 0.3)))
    for r in (1, 2):
        closed, prov = model.rank_kernel_row(r)
        assert prov == "closed_form"
        subs = list(enumerate_subspaces(F2, 2, r))
        avg = np.zeros(r + 1)
        for u in subs:
            avg += model.rank_kernel_subspace(u)
        assert closed == pytest.approx(avg / len(subs), abs=1e-12)


def test_rank_kernel_monte_carlo():
    model = pure_channel(T=2, M=2, N=2)
    row_mc, prov = model.rank_kernel_row_mc(2, make_rng(9), n_samples=20000)
    row, _ = model.rank_kernel_row(2)
    assert prov == "monte_carlo"
    assert row_mc == pytest.approx(row, abs=0.02)


def test_kernel_table_rows():
    model = pure_channel(T=3, M=2, N=2)
    table = model.kernel_table()
    assert table.P.shape == (3, 3)
    assert table.provenance == "closed_form"
    for r in range(3):
        assert table.P[r].sum() == pytest.approx(1.0)
        assert all(table.P[r, s] == 0 for s in range(r + 1, 3))


# -- alpha inputs -----------------------------------------------------------------------


def test_alpha_point_mass_at_zero():
    a = AlphaInput(F2, 2, 2, RankPmf((1.0, 0.0, 0.0)))
    rng = make_rng(10)
    assert a.sample(rng).is_zero()
    assert a.pmf(Mat.zeros(F2, 2, 2)) == pytest.approx(1.0)


def test_alpha_full_rank_uniform():
    # R(M) = 1 with uniform Q: every full-rank X has pmf 1/chi(T, M)
    counts = GFCounts(2)
    a = AlphaInput(F2, 3, 2, RankPmf((0.0, 0.0, 1.0)))
    want = 1.0 / counts.chi(3, 2)
    for x in all_matrices(F2, 3, 2):
        if x.rank() == 2:
            assert a.pmf(x) == pytest.approx(want)
        else:
            assert a.pmf(x) == 0.0


def test_alpha_pmf_sums_to_one():
    rng = make_rng(11)
    for explicit in (False, True):
        a = random_alpha_input(F2, 2, 2, rng, explicit_q=explicit)
        total = sum(a.pmf(x) for x in all_matrices(F2, 2, 2))
        assert total == pytest.approx(1.0, abs=1e-9)


def test_alpha_pmf_constant_on_row_space_classes():
    rng = make_rng(12)
    a = random_alpha_input(F2, 2, 2, rng, explicit_q=True)
    groups: dict = {}
    for x in all_matrices(F2, 2, 2):
        groups.setdefault(Subspace.from_row_span(x).key(), set()).add(
            round(a.pmf(x), 14)
        )
    for vals in groups.values():
        assert len(vals) == 1


def test_alpha_sampling_vector_frequencies():
    # T=2, M=1, R(1) = 1: the three nonzero columns appear uniformly
    a = AlphaInput(F2, 2, 1, RankPmf((0.0, 1.0)))
    rng = make_rng(13)
    n = 10**5
    counts: dict = {}
    for _ in range(n):
        x = a.sample(rng)
        counts[x.key()] = counts.get(x.key(), 0) + 1
    assert len(counts) == 3
    expected = n / 3
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 13.82  # 2 dof at 1e-3


def test_alpha_sampler_matches_pmf():
    rng = make_rng(14)
    a = random_alpha_input(F2, 2, 2, rng)
    n = 4 * 10**4
    counts: dict = {}
    for _ in range(n):
        key = a.sample(rng).key()
        counts[key] = counts.get(key, 0) + 1
    # compare a few heavy atoms at 4 sigma
    for x in all_matrices(F2, 2, 2):
        p = a.pmf(x)
        if p > 0.02:
            got = counts.get(x.key(), 0) / n
            assert abs(got - p) < 4 * math.sqrt(p * (1 - p) / n)


# -- mutual information ------------------------------------------------------------------


def test_mi_fixed_zero_H():
    model = ChannelModel(F2, 2, 2, 2, "fixed", H=Mat.zeros(F2, 2, 2))
    a = AlphaInput(F2, 2, 2, RankPmf((0.25, 0.5, 0.25)))
    assert exact_mutual_information(model, a) == pytest.approx(0.0, abs=1e-12)


def test_mi_z_channel_capacity():
    for p in (0.25, 0.5, 0.8):
        model = ChannelModel(F2, 1, 1, 1, "z", p=p)
        p0 = z_channel_optimal_p0(p)
        support = [(Mat(F2, [[0]]), p0), (Mat(F2, [[1]]), 1 - p0)]
        mi = exact_mutual_information(model, support)
        assert mi == pytest.approx(z_channel_capacity(p), abs=1e-9)


def test_mi_matrix_lens_dominates_subspace_lens():
    rng = make_rng(15)
    models = [
        pure_channel(T=2, M=2, N=2),
        ChannelModel(F2, 2, 2, 2, "network"),
        ChannelModel(F2, 2, 2, 2, "rank_uniform", rank_pmf=RankPmf((0.1, 0.4, 0.5))),
    ]
    done = 0
    while done < 100:
        model = models[done % len(models)]
        support = [
            (x, p)
            for x, p in zip(
                all_matrices(F2, 2, 2), rng.dirichlet(np.ones(16))
            )
        ]
        mi_mat = exact_mutual_information(model, support)
        mi_sub = exact_mutual_information(model, support, lens="subspace")
        assert mi_mat >= mi_sub - 1e-9
        done += 1


def test_uniform_loc_equality_under_alpha_inputs():
    # purely-random and full-rank channels: I(X;Y) = I(<X>;<Y>) for
    # alpha-type inputs
    rng = make_rng(16)
    for kind in ("purely_random", "full_rank"):
        model = ChannelModel(F2, 2, 2, 2, kind)
        for _ in range(5):
            a = random_alpha_input(F2, 2, 2, rng)
            mi_mat = exact_mutual_information(model, a)
            mi_sub = exact_mutual_information(model, a, lens="subspace")
            assert mi_mat == pytest.approx(mi_sub, abs=1e-9)


def test_phi_shift_invariance_of_mi():
    # relabeling inputs by an invertible phi preserves I(X;Y)
    model = pure_channel(T=2, M=2, N=2)
    rng = make_rng(17)
    xs = list(all_matrices(F2, 2, 2))
    w = rng.dirichlet(np.ones(len(xs)))
    base = exact_mutual_information(model, list(zip(xs, w)))
    for _ in range(5):
        phi = sample_matrix(F2, 2, 2, rng, kind="full_rank")
        shifted = [(phi @ x, p) for x, p in zip(xs, w)]
        assert exact_mutual_information(model, shifted) == pytest.approx(
            base, abs=1e-9
        )


def test_mi_guard():
    from loclab.errors import TooLarge

    model = ChannelModel(F2, 9, 2, 2, "purely_random")
    a = AlphaInput(F2, 9, 2, RankPmf((1.0,)))
    with pytest.raises(TooLarge):
        exact_mutual_information(model, a)
