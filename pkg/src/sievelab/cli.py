"""Command line entry point: ``sievelab <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import math
import sys
import time
import warnings
from pathlib import Path

from .assumptions import check_a1, check_a2_asymptotic, check_a2_direct, check_a3, geometric_checkpoints
from .density import DensityError, load_table_csv, make_density, sieve_sums
from .reports import (NOT_APPLICABLE, OK, VERIFIED, VIOLATED, CorollaryError, RunReport,
                      corollary_run, emit_report, prop51_run)
from .selberg import (DIRECT_BUDGET, BudgetExceeded, PreconditionError, lemma_bound, lower_weights,
                      normalization, upper_bound, w_diag, w_direct, weights_to_csv)
from .sequences import (ApproximationModel, RemainderTable, SiftingSequence, exceptional_sequence,
                        sift_exact, s_minus_direct)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--q", type=int, help="modulus of the real character")
    p.add_argument("--a", type=int, default=1, help="residue class mod q")
    p.add_argument("--x", type=int, help="length of the sequence")
    p.add_argument("--w", type=int, help="lower sifting threshold")
    p.add_argument("--z", type=int, help="sifting level")
    p.add_argument("--delta", type=int, help="weight support level Delta")
    p.add_argument("--u", type=int, help="upper end for K(u)")
    p.add_argument("--beta", type=float, help="hypothesized real zero, 0 < beta < 1")
    p.add_argument("--mode", choices=("exact", "float"), default="float")
    p.add_argument("--density", choices=("power", "exceptional", "table"),
                   help="default: exceptional when --q is given, else power")
    p.add_argument("--kappa", type=float, default=1.0, help="power density g(p) = kappa/p")
    p.add_argument("--table", type=Path, help="CSV of p,g_num,g_den or p,g_float")
    p.add_argument("--out", type=Path, help="write the JSON report here (default: stdout)")
    p.add_argument("--csv", type=Path, help="directory for CSV side files")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sievelab", description="Selberg lower-bound sieve toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    parent = _common()
    helps = {
        "sums": "density sums H, J, K, G, delta, V",
        "weights": "construct and export the lower-bound weights",
        "lower": "quadratic form W, its lower bound and the J W >= nu certificate",
        "upper": "Selberg upper bound against the exact sifting count",
        "assume": "verdicts for the three hypotheses",
        "prop51": "lower bound for sum of a_p over the lambda sequence",
        "corollary": "gates and bound for the least prime in a progression",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[parent], help=text, description=text)
    return parser


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ValueError("missing required flag(s): " + ", ".join("--" + n for n in missing))


def _density(args, p_max: int):
    kind = args.density or ("exceptional" if args.q else "power")
    if kind == "table":
        _need(args, "table")
        d = load_table_csv(args.table, p_max)
        return d.with_mode(args.mode) if d.mode != args.mode else d
    if kind == "exceptional":
        _need(args, "q")
    return make_density(kind, max(p_max, 2), args.mode, kappa=args.kappa, q=args.q)


def _config(args, **extra) -> dict:
    keys = ("q", "a", "x", "w", "z", "delta", "beta", "mode")
    cfg = {k: getattr(args, k) for k in keys}
    cfg["Delta"] = cfg.pop("delta")
    cfg["density"] = args.density or ("exceptional" if args.q else "power")
    cfg.update(extra)
    return cfg


def _csv_dir(args) -> Path | None:
    if args.csv is None:
        return None
    args.csv.mkdir(parents=True, exist_ok=True)
    return args.csv


def cmd_sums(args):
    _need(args, "delta", "w", "z")
    top = max(args.delta, args.w, args.z, args.u or 0)
    dens = _density(args, top)
    s = sieve_sums(dens, args.delta, args.w, args.z, args.u)
    rep = RunReport(config=_config(args), sums=s.as_dict(), conclusion={"status": OK})
    if s.exact:
        rep.sums["exact"] = {k: str(v) for k, v in s.exact.items()}
    return rep, {}


def cmd_weights(args):
    _need(args, "delta")
    dens = _density(args, args.delta)
    ws = lower_weights(dens, args.delta)
    norm = normalization(dens, ws)
    rep = RunReport(
        config=_config(args),
        weights_diag={"H": ws.H_float(), "max_abs_rho": ws.max_abs_rho(),
                      "rho_1": float(ws.rho[0]), "normalization": float(norm),
                      "support_size": len(ws.support)},
        conclusion={"status": OK},
    )
    files = {}
    out = _csv_dir(args)
    if out is not None:
        files[out / "weights.csv"] = lambda p: weights_to_csv(ws, p)
    return rep, files


def cmd_lower(args):
    _need(args, "w", "z")
    Delta = args.delta or args.w**3
    dens = _density(args, max(Delta, args.z))
    a1 = check_a1(dens, args.w)
    a2 = check_a2_direct(dens, args.w, Delta)
    lem = lemma_bound(dens, args.w, args.z, Delta, a1.passed, a2.passed)
    ws = lower_weights(dens, Delta)
    Wd = float(w_diag(dens, ws, args.z))
    W = {"diag": Wd, "H2W": lem.H**2 * Wd, "lemma_rhs": lem.lower_bound_H2W,
         "lemma_holds": lem.H**2 * Wd >= lem.lower_bound_H2W - 1e-9 * max(1.0, abs(lem.H**2 * Wd)),
         "JW": lem.J_full * Wd}
    if Delta <= DIRECT_BUDGET:
        W["direct"] = float(w_direct(dens, ws, args.z))
    rep = RunReport(
        config=_config(args, Delta=Delta),
        sums=lem.as_dict(),
        weights_diag={"H": ws.H_float(), "max_abs_rho": ws.max_abs_rho()},
        assumptions={"A1": a1.as_dict(), "A2_direct": a2.as_dict()},
        W=W,
        nu={"value": float(lem.nu), "alpha": lem.alpha, "delta": lem.delta_wz},
    )
    if lem.jw_bound is None:
        rep.conclusion = {"status": NOT_APPLICABLE, "applicable": False}
    else:
        ok = W["JW"] >= lem.jw_bound - 1e-9
        rep.conclusion = {"status": VERIFIED if ok else VIOLATED, "applicable": True, "holds": ok}
    if not W["lemma_holds"]:
        rep.conclusion["status"] = VIOLATED
    return rep, {}


def _sequence(args, d_max: int):
    if args.q:
        es = exceptional_sequence(args.q, args.a, args.x, mode=args.mode,
                                  p_max=max(args.x, d_max), d_max=min(1000, args.x))
        return es.seq, es.model, es
    dens = _density(args, max(args.x, d_max))
    return SiftingSequence.unit(args.x), ApproximationModel(args.x, dens, dens.p_max), None


def cmd_upper(args):
    _need(args, "x", "z", "delta")
    seq, model, _ = _sequence(args, args.delta**2)
    R = RemainderTable(seq, model).R(args.delta**2)
    ub = upper_bound(model.density, args.delta, args.z, float(model.X), R)
    S = sift_exact(seq, args.z)
    ok = S <= ub.bound * (1 + 1e-12)
    rep = RunReport(
        config=_config(args),
        main_term={"X": float(model.X), "J": ub.J, "X_over_J": ub.X_over_J, "XV": ub.XV, "V": ub.V},
        remainder={"R_Delta2": R, "bound": ub.bound},
        exact_counts={"sift": S},
        conclusion={"status": VERIFIED if ok else VIOLATED, "applicable": True, "holds": ok},
    )
    if args.delta <= 2000:
        ws = lower_weights(model.density, args.delta)
        rep.exact_counts["s_minus"] = s_minus_direct(seq, ws, args.z)
    return rep, {}


def cmd_assume(args):
    _need(args, "w")
    Delta = args.delta or args.w**3
    top = max(Delta, math.isqrt(args.x) if args.x else 0)
    dens = _density(args, top)
    verdicts = [check_a1(dens, args.w), check_a2_direct(dens, args.w, Delta),
                check_a2_asymptotic(dens, args.w, Delta, geometric_checkpoints(Delta), q=args.q)]
    if args.x:
        verdicts.append(check_a3(dens, args.w, args.x))
    rep = RunReport(config=_config(args, Delta=Delta),
                    assumptions={v.which: v.as_dict() for v in verdicts},
                    conclusion={"status": OK, "all_pass": all(v.passed for v in verdicts)})
    return rep, {}


def cmd_prop51(args):
    _need(args, "q", "x")
    w = args.w or args.q**3
    Delta = args.delta or w**3
    es = exceptional_sequence(args.q, args.a, args.x, mode=args.mode,
                              p_max=max(args.x, Delta), d_max=min(1000, args.x))
    rep = prop51_run(es.model.density, es.seq, es.model, w, args.x, Delta)
    rep.config.update(q=args.q, a=args.a, L1=es.L1, chi_a=es.chi(args.a),
                      rd_profile_max=es.profile.max_ratio, rd_profile_argmax=es.profile.argmax)
    files = {}
    out = _csv_dir(args)
    if out is not None:
        files[out / "rd_profile.csv"] = es.profile.to_csv
    return rep, files


def cmd_corollary(args):
    _need(args, "q", "x", "beta")
    return corollary_run(args.q, args.a, args.x, args.beta), {}


COMMANDS = {
    "sums": cmd_sums, "weights": cmd_weights, "lower": cmd_lower, "upper": cmd_upper,
    "assume": cmd_assume, "prop51": cmd_prop51, "corollary": cmd_corollary,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep, files = COMMANDS[args.command](args)
    except (ValueError, DensityError, PreconditionError, BudgetExceeded, CorollaryError,
            OSError) as exc:
        print(f"sievelab {args.command}: {exc}", file=sys.stderr)
        return 1
    if not rep.timing_ms:
        rep.timing_ms = (time.perf_counter() - t0) * 1e3
    code = emit_report(rep, args.out, files)
    if code == 1 and rep.exit_code != 1:
        print(f"sievelab {args.command}: could not write report", file=sys.stderr)
        return 1
    if args.out is None:
        print(rep.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
