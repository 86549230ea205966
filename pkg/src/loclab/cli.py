"""The loclab command line: reproducible experiments and validation.

Subcommands: counting, bounds, rho-min, rho-curve, optimal-rank,
capacity-exact, simulate {rm,lmc,rateless}, validate.  Sweeps emit CSV,
single reports JSON; every file starts with a provenance record (config
hash, seed, RNG id) so identical invocations reproduce identical results.

Exit codes: 0 success, 2 configuration error, 3 validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, backend
from .capacity import (
    blahut_arimoto,
    bounds_report,
    c_sub_symmetric,
    g_table,
    rho_min,
    transition_matrix,
)
from .config import (
    config_digest,
    load_json,
    parse_channel_config,
    parse_code_config,
    parse_int_range,
)
from .errors import ConfigError, LoclabError, UsageError
from .linear_codes import (
    LinearMatrixCode,
    failure_bound,
    failure_rate_mc,
    rateless_session,
    rateless_success_bound,
)
from .rank_codes import GabidulinCode, simulate_rm
from .rng import RNG_ALGORITHM, make_rng, spawn_rngs
from .validate import SUITES, run_suite

_CHUNK = 1000  # Monte Carlo chunk size: results never depend on --threads


def _provenance(args, cfg=None, extra=None) -> dict:
    out = {
        "tool": f"loclab {__version__}",
        "backend": backend.backend_name(),
        "rng": RNG_ALGORITHM,
        "seed": getattr(args, "seed", None),
    }
    if cfg is not None:
        out["config_sha256"] = config_digest(cfg)
    if extra:
        out.update(extra)
    return out


def _emit_csv(args, columns, rows, provenance):
    lines = [
        f"# loclab {__version__} {provenance.get('command', '')}".rstrip(),
        "# " + " ".join(
            f"{k}={v}" for k, v in provenance.items()
            if k not in ("tool", "command") and v is not None
        ),
        ",".join(columns),
    ]
    for row in rows:
        lines.append(",".join("" if v is None else str(v) for v in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_table(args, columns, rows, provenance):
    if getattr(args, "format", "csv") == "json":
        payload = {
            "provenance": provenance,
            "results": [dict(zip(columns, row)) for row in rows],
        }
        _emit_json(args, payload)
    else:
        _emit_csv(args, columns, rows, provenance)


def _fmt(v, digits=12):
    if v is None:
        return None
    return f"{v:.{digits}g}"


# -- subcommand implementations ----------------------------------------------------


def cmd_counting(args) -> int:
    report = run_suite("counting", q=args.q, max_dim=args.max_dim)
    for chk in report["checks"]:
        status = "pass" if chk["passed"] else "FAIL"
        print(f"[{status}] {chk['name']}" + (f" ({chk['detail']})" if chk["detail"] else ""))
    if args.out:
        _emit_json(args, {"provenance": _provenance(args), "results": report})
    return 0 if report["passed"] else 3


def cmd_bounds(args) -> int:
    cfg = load_json(args.config, "channel")
    model = parse_channel_config(cfg)
    lo, hi = parse_int_range(args.t_range, "t-range")
    if lo < 1:
        raise ConfigError("t-range", "T must be >= 1")
    pmf = model.rank_pmf()
    rows = []
    for T in range(lo, hi + 1):
        rep = bounds_report(pmf, T, model.M, model.N, model.field.q)
        rows.append((
            T,
            _fmt(rep.c_ct_norm),
            _fmt(rep.ect_lower_norm),
            _fmt(rep.ect_upper_norm),
            _fmt(rep.subspace_lower_norm),
            _fmt(rep.upper_norm),
        ))
    prov = _provenance(args, cfg, {"command": "bounds", "t_range": args.t_range})
    _emit_table(args, ["T", "c_ct", "ect_lower", "ect_upper", "subspace_lower", "upper"], rows, prov)
    return 0


def cmd_rho_min(args) -> int:
    lo, hi = parse_int_range(args.c, "c")
    if not 0 < lo <= hi <= args.nstar:
        raise ConfigError("c", f"need 0 < c <= nstar={args.nstar}")
    rows = []
    printed = []
    for c in range(lo, hi + 1):
        rep = rho_min(c, args.nstar)
        rows.append((c, args.nstar, _fmt(rep.value)))
        printed.append(f"{rep.value:.3f}")
    print(f"rho_min(c, {args.nstar}) for c = {lo}..{hi}: " + " ".join(printed))
    prov = _provenance(args, {"nstar": args.nstar, "c": args.c},
                       {"command": "rho-min"})
    _emit_table(args, ["c", "nstar", "rho_min"], rows, prov)
    return 0


def cmd_rho_curve(args) -> int:
    lo, hi = parse_int_range(args.nstar, "nstar")
    if lo < 1 or args.c <= 0:
        raise ConfigError("nstar", "need nstar >= 1 and c > 0")
    rows = []
    for nstar in range(lo, hi + 1):
        if args.c > nstar:
            continue
        rep = rho_min(args.c, nstar)
        rows.append((args.c, nstar, _fmt(rep.value)))
    prov = _provenance(args, {"nstar": args.nstar, "c": args.c},
                       {"command": "rho-curve"})
    _emit_table(args, ["c", "nstar", "rho_min"], rows, prov)
    return 0


def cmd_optimal_rank(args) -> int:
    cfg = load_json(args.config, "channel")
    model = parse_channel_config(cfg)
    t0 = time.perf_counter()
    kt = model.kernel_table()
    gt = g_table(kt, model.T, model.field.q, model.M, model.N)
    res = c_sub_symmetric(kt, model.T, model.field.q, model.M, model.N)
    wall = time.perf_counter() - t0
    payload = {
        "provenance": _provenance(args, cfg, {
            "command": "optimal-rank", "wall_time_s": round(wall, 6),
        }),
        "results": {
            "r_star": gt.r_star,
            "c_csub_norm": gt.c_csub_norm,
            "gbar_bits": [float(v) for v in gt.gbar],
            "gap_guarantee_norm": gt.gap_guarantee_norm,
            "kernel_provenance": gt.provenance,
            "c_sub_symmetric_bits": res.value_bits,
            "c_sub_symmetric_norm": res.value_norm,
            "optimizer_rank_law": [float(v) for v in res.R],
            "kkt_verdict": res.kkt.verdict,
            "kkt_max_violation": res.kkt.max_violation,
        },
    }
    _emit_json(args, payload)
    return 0


def cmd_capacity_exact(args) -> int:
    cfg = load_json(args.config, "channel")
    model = parse_channel_config(cfg)
    t0 = time.perf_counter()
    _, _, P = transition_matrix(model)
    cap, dist = blahut_arimoto(P, tolerance=args.tolerance)
    wall = time.perf_counter() - t0
    denom = model.T * np.log2(model.field.q)
    payload = {
        "provenance": _provenance(args, cfg, {
            "command": "capacity-exact", "wall_time_s": round(wall, 6),
        }),
        "results": {
            "capacity_bits": cap,
            "capacity_norm": cap / float(denom),
            "input_letters": int(P.shape[0]),
            "output_letters": int(P.shape[1]),
        },
    }
    _emit_json(args, payload)
    return 0


def cmd_simulate_rm(args) -> int:
    ch_cfg = load_json(args.channel, "channel")
    model = parse_channel_config(ch_cfg)
    code_cfg = parse_code_config(load_json(args.code, "code"))
    n = code_cfg["n"]
    t = model.T - model.M
    code = GabidulinCode(
        model.field, t, n * model.M, code_cfg["k"],
        eval_points=code_cfg.get("basis"),
    )
    t0 = time.perf_counter()
    rep = simulate_rm(code, model, n, args.trials, make_rng(args.seed))
    wall = time.perf_counter() - t0
    payload = {
        "provenance": _provenance(args, {"channel": ch_cfg, "code": code_cfg}, {
            "command": "simulate-rm", "wall_time_s": round(wall, 6),
        }),
        "results": {
            **rep,
            "guarantee_frequency": rep["guaranteed"] / rep["trials"],
        },
    }
    _emit_json(args, payload)
    return 0


def _lmc_chunk(packed):
    ch_cfg, n, s, gen_seed, (entropy, spawn_key), trials = packed
    model = parse_channel_config(ch_cfg)
    code = LinearMatrixCode(model.field, model.T, model.M, n, s, gen_seed)
    ss = np.random.SeedSequence(entropy=entropy, spawn_key=tuple(spawn_key))
    rng = np.random.Generator(np.random.Philox(ss))
    return int(round(failure_rate_mc(model, code, trials, rng) * trials))


def cmd_simulate_lmc(args) -> int:
    ch_cfg = load_json(args.channel, "channel")
    model = parse_channel_config(ch_cfg)
    code = LinearMatrixCode(model.field, model.T, model.M, args.n, args.s,
                            args.gen_seed if args.gen_seed is not None else args.seed)
    pmf = model.rank_pmf()
    bound = failure_bound(pmf, args.n, args.s, args.eps, model.field.q)
    t0 = time.perf_counter()
    n_chunks = (args.trials + _CHUNK - 1) // _CHUNK
    seeds = np.random.SeedSequence(args.seed).spawn(n_chunks)
    jobs = []
    done = 0
    for i in range(n_chunks):
        size = min(_CHUNK, args.trials - done)
        done += size
        jobs.append((
            ch_cfg, args.n, args.s, code.seed,
            (seeds[i].entropy, seeds[i].spawn_key), size,
        ))
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            fails = sum(pool.map(_lmc_chunk, jobs))
    else:
        fails = sum(_lmc_chunk(j) for j in jobs)
    wall = time.perf_counter() - t0
    payload = {
        "provenance": _provenance(args, ch_cfg, {
            "command": "simulate-lmc", "generator_seed": code.seed,
            "wall_time_s": round(wall, 6),
        }),
        "results": {
            "trials": args.trials,
            "failures": fails,
            "empirical_failure": fails / args.trials,
            "bound_average_generator": bound.average,
            "bound_half_of_matrices": bound.half_of_matrices,
            "eps": bound.eps,
            "chernoff_g": bound.g,
            "rate": code.rate,
        },
    }
    _emit_json(args, payload)
    return 0


def cmd_simulate_rateless(args) -> int:
    ch_cfg = load_json(args.channel, "channel")
    model = parse_channel_config(ch_cfg)
    rngs = spawn_rngs(args.seed, args.sessions)
    t0 = time.perf_counter()
    used, ok = [], 0
    for i in range(args.sessions):
        res = rateless_session(model, args.R, args.seed + i, args.max_blocks,
                               rngs[i])
        used.append(res.blocks_used)
        ok += int(res.success)
    wall = time.perf_counter() - t0
    try:
        bound = rateless_success_bound(
            model.rank_pmf(), args.R, args.max_blocks, model.field.q
        )
    except LoclabError:
        bound = None
    payload = {
        "provenance": _provenance(args, ch_cfg, {
            "command": "simulate-rateless", "wall_time_s": round(wall, 6),
        }),
        "results": {
            "sessions": args.sessions,
            "success_rate": ok / args.sessions,
            "mean_blocks_used": sum(used) / len(used),
            "max_blocks": args.max_blocks,
            "success_bound_at_max_blocks": bound,
        },
    }
    _emit_json(args, payload)
    return 0


def cmd_validate(args) -> int:
    report = run_suite(args.suite, q=args.q, max_dim=args.max_dim, seed=args.seed)
    for chk in report["checks"]:
        status = "pass" if chk["passed"] else "FAIL"
        print(f"[{status}] {chk['name']}" + (f" ({chk['detail']})" if chk["detail"] else ""))
    if args.out:
        _emit_json(args, {"provenance": _provenance(args), "results": report})
    return 0 if report["passed"] else 3


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loclab",
        description="linear operator channels over finite fields",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=0):
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("counting", help="brute-force counting verification")
    csub = p.add_subparsers(dest="action", required=True)
    pv = csub.add_parser("verify")
    pv.add_argument("--q", type=int, default=2)
    pv.add_argument("--max-dim", type=int, default=4)
    common(pv)
    pv.set_defaults(func=cmd_counting)

    p = sub.add_parser("bounds", help="rate bounds over an inaction-period range")
    p.add_argument("--config", required=True)
    p.add_argument("--t-range", required=True)
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("rho-min", help="worst-case unit-block throughput ratio")
    p.add_argument("--nstar", type=int, required=True)
    p.add_argument("--c", required=True, help="mean rank value or range lo:hi")
    common(p)
    p.set_defaults(func=cmd_rho_min)

    p = sub.add_parser("rho-curve", help="rho_min over a range of N*")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--nstar", required=True, help="range lo:hi")
    common(p)
    p.set_defaults(func=cmd_rho_curve)

    p = sub.add_parser("optimal-rank", help="g table and optimal input rank")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_optimal_rank)

    p = sub.add_parser("capacity-exact", help="exact capacity of a tiny channel")
    p.add_argument("--config", required=True)
    p.add_argument("--tolerance", type=float, default=1e-9)
    common(p)
    p.set_defaults(func=cmd_capacity_exact)

    p = sub.add_parser("simulate", help="Monte Carlo code simulations")
    ssub = p.add_subparsers(dest="scheme", required=True)

    pr = ssub.add_parser("rm", help="lifted rank-metric codes")
    pr.add_argument("--channel", required=True)
    pr.add_argument("--code", required=True)
    pr.add_argument("--trials", type=int, default=10000)
    common(pr, seed_default=7)
    pr.set_defaults(func=cmd_simulate_rm)

    pl = ssub.add_parser("lmc", help="lifted linear matrix codes")
    pl.add_argument("--channel", required=True)
    pl.add_argument("--n", type=int, required=True)
    pl.add_argument("--s", type=float, required=True)
    pl.add_argument("--trials", type=int, default=10000)
    pl.add_argument("--eps", type=float, default=None)
    pl.add_argument("--gen-seed", type=int, default=None)
    common(pl, seed_default=7)
    pl.set_defaults(func=cmd_simulate_lmc)

    ps = ssub.add_parser("rateless", help="rateless lifted linear matrix codes")
    ps.add_argument("--channel", required=True)
    ps.add_argument("--R", type=int, required=True)
    ps.add_argument("--max-blocks", type=int, default=64)
    ps.add_argument("--sessions", type=int, default=1000)
    common(ps, seed_default=7)
    ps.set_defaults(func=cmd_simulate_rateless)

    p = sub.add_parser("validate", help="run a validation suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--max-dim", type=int, default=4)
    common(p)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except LoclabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
