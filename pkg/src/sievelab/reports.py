"""
End-to-end runs: the exceptional-density lower bound for sum a_p, the
least-prime corollary gates, and the JSON report they produce.

Exit codes: 0 applicable and verified, 2 not applicable / hypothetical,
1 error (including a verified-applicable inequality that fails).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from . import arith
from .assumptions import check_a1, check_a2_direct, check_a3
from .density import Density, V_of, sieve_sums
from .selberg import exact_alpha, lower_weights, nu_value, w_diag
from .sequences import (
    EXACT_SCRIPT_R_BUDGET,
    ApproximationModel,
    RemainderTable,
    SiftingSequence,
    s_minus_decomposed,
    s_minus_direct,
    sift_exact,
)

REMAINDER_BUDGET = 10**7
COUNT_LIMIT = 10**8
V_PRODUCT_LIMIT = 10**8

VERIFIED = "verified"
OK = "ok"
NOT_APPLICABLE = "not_applicable"
NOT_EVALUABLE = "not_evaluable"
RANGE_VIOLATION = "range_violation"
NOT_EXCEPTIONAL = "not_exceptional"
HYPOTHETICAL = "hypothetical"
VIOLATED = "violated"

_EXIT = {VERIFIED: 0, OK: 0, NOT_APPLICABLE: 2, NOT_EVALUABLE: 2, RANGE_VIOLATION: 2,
         NOT_EXCEPTIONAL: 2, HYPOTHETICAL: 2, VIOLATED: 1}


class CorollaryError(ValueError):
    pass


@dataclass
class RunReport:
    config: Dict[str, Any] = field(default_factory=dict)
    sums: Dict[str, Any] = field(default_factory=dict)
    weights_diag: Dict[str, Any] = field(default_factory=dict)
    assumptions: Dict[str, Any] = field(default_factory=dict)
    W: Dict[str, Any] = field(default_factory=dict)
    nu: Dict[str, Any] = field(default_factory=dict)
    main_term: Dict[str, Any] = field(default_factory=dict)
    remainder: Dict[str, Any] = field(default_factory=dict)
    exact_counts: Dict[str, Any] = field(default_factory=dict)
    gates: Dict[str, Any] = field(default_factory=dict)
    conclusion: Dict[str, Any] = field(default_factory=dict)
    timing_ms: float = 0.0

    @property
    def status(self) -> str:
        return self.conclusion.get("status", OK)

    @property
    def exit_code(self) -> int:
        return _EXIT.get(self.status, 1)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        names = [f.name for f in fields(cls)]
        return cls(**{k: d[k] for k in names if k in d})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)

    def check_finite(self) -> None:
        def walk(v, path):
            if isinstance(v, float) and not math.isfinite(v):
                raise ValueError(f"non-finite value at {path}")
            if isinstance(v, dict):
                for k, x in v.items():
                    walk(x, f"{path}.{k}")
            elif isinstance(v, list):
                for i, x in enumerate(v):
                    walk(x, f"{path}[{i}]")
        walk(self.to_dict(), "report")


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if hasattr(v, "evaluate"):
        return float(v)
    return v


def parse_report(text: str) -> RunReport:
    return RunReport.from_dict(json.loads(text))


def emit_report(report: RunReport, path=None, csv_files: Optional[Dict[str, Any]] = None) -> int:
    """Write the report JSON (and optional CSV side files); return the exit code.

    csv_files maps a file path to a callable taking that path.
    """
    try:
        report.check_finite()
        text = report.to_json()
        if path is not None:
            Path(path).write_text(text + "\n")
        for target, writer in (csv_files or {}).items():
            writer(target)
    except (OSError, ValueError, TypeError):
        return 1
    return report.exit_code


# ---------------------------------------------------------------------------
# the exceptional-density lower bound


def _verdicts(*vs):
    return {v.which: v.as_dict() for v in vs}


def prop51_run(density: Density, seq: SiftingSequence, model: ApproximationModel,
               w: int, x: int, Delta: Optional[int] = None,
               remainder_budget: int = REMAINDER_BUDGET) -> RunReport:
    """sum_{sqrt x < p <= x} a_p >= X V / 4 - R log x, with Delta = w^3, z = sqrt x,
    V = prod_{p < w^3} (1 - g(p)) and R = sum over squarefree d < sqrt(x) w^6
    of tau_3(d) |r_d|."""
    t0 = time.perf_counter()
    Delta = w**3 if Delta is None else Delta
    z = math.isqrt(x)
    rep = RunReport(config={"w": w, "x": x, "z": z, "Delta": Delta, "mode": density.mode,
                            "density": density.label, "X": float(model.X)})
    if not z > w:
        rep.conclusion = {"status": NOT_APPLICABLE, "reason": f"z={z} must exceed w={w}"}
        rep.timing_ms = (time.perf_counter() - t0) * 1e3
        return rep

    a1 = check_a1(density, w)
    a2 = check_a2_direct(density, w, Delta)
    a3 = check_a3(density, w, x)
    rep.assumptions = _verdicts(a1, a2, a3)

    s = sieve_sums(density, Delta, w, z)
    rep.sums = s.as_dict()
    weights = lower_weights(density, Delta)
    rep.weights_diag = {"H": float(weights.H), "max_abs_rho": weights.max_abs_rho(),
                        "rho_1": float(weights.rho[0]), "support_size": len(weights.support)}
    W = float(w_diag(density, weights, z))
    a_exact = exact_alpha(w, Delta)
    nu = nu_value(s.delta, s.alpha)
    rep.W = {"diag": W, "JW": s.J_full * W, "H2W": float(weights.H) ** 2 * W}
    rep.nu = {"value": nu, "alpha": s.alpha, "alpha_exact": str(a_exact) if a_exact else None,
              "delta": s.delta, "theorem_JW_ge_nu": s.J_full * W >= nu - 1e-9}

    V = float(V_of(density, Delta))
    X = float(model.X)
    rep.main_term = {"X": X, "V": V, "quarter_XV": X * V / 4}

    limit = math.sqrt(x) * w**6
    top = math.ceil(limit) - 1
    R = None
    if top <= min(remainder_budget, model.d_max, density.p_max):
        R = RemainderTable(seq, model).R(limit)
        rep.remainder = {"status": "exact", "limit": limit, "R": R, "R_log_x": R * math.log(x)}
    else:
        rep.remainder = {"status": "over_budget", "limit": limit, "R": None, "R_log_x": None}

    if z * Delta * Delta <= min(EXACT_SCRIPT_R_BUDGET, model.d_max):
        dec = s_minus_decomposed(seq, model, weights, z)
        rep.remainder.update(script_R=dec.script_R, bound_script_R=dec.bound_script_R,
                             script_R_bound_holds=dec.bound_holds)

    counts = {}
    if seq.n_max <= COUNT_LIMIT:
        ps = arith.primes_up_to(min(x, seq.n_max))
        ps = ps[(ps > z) & (ps >= seq.n_min)]
        lhs = seq._sum(seq.a[ps - seq.n_min]) if len(ps) else 0
        counts = {"sum_a_p": lhs, "sift": sift_exact(seq, z),
                  "s_minus": s_minus_direct(seq, weights, z)}
    rep.exact_counts = counts

    applicable = a1.passed and a2.passed and a3.passed and nu >= 0.25 - 1e-12
    rhs = None if R is None else X * V / 4 - R * math.log(x)
    rep.conclusion = {"applicable": applicable, "rhs": rhs, "lhs": counts.get("sum_a_p")}
    if not applicable:
        failed = [v.which for v in (a1, a2, a3) if not v.passed]
        if nu < 0.25:
            failed.append("nu>=1/4")
        rep.conclusion.update(status=NOT_APPLICABLE, failed=failed)
    elif rhs is None or not counts:
        rep.conclusion.update(status=NOT_EVALUABLE)
    else:
        ok = counts["sum_a_p"] >= rhs
        rep.conclusion.update(status=VERIFIED if ok else VIOLATED, holds=ok)
    rep.timing_ms = (time.perf_counter() - t0) * 1e3
    return rep


# ---------------------------------------------------------------------------
# the corollary


def V_q(chi: arith.RealCharacter) -> float:
    """prod over p < q^2 of (1 - 1/p)(1 - chi(p)/p)."""
    q = chi.q
    out = 1.0
    for p in map(int, arith.primes_below(q * q)):
        out *= (1 - 1 / p) * (1 - chi(p) / p)
    return out


def _log_V_product(chi: arith.RealCharacter, top: int) -> float:
    """sum over p < top, p not dividing q, of log((1 - 1/p)(1 - chi(p)/p))."""
    total = []
    period = np.array(chi.values, dtype=np.float64)
    for block in arith.segmented_primes(2, top - 1):
        block = block[block % chi.q != 0]
        c = period[block % chi.q]
        pf = block.astype(np.float64)
        total.append(float(np.sum(np.log1p(-1 / pf) + np.log1p(-c / pf))))
    return math.fsum(total)


def v_relation(q: int, limit: int = V_PRODUCT_LIMIT) -> dict:
    """V = prod_{p < q^9, p not dividing q} (1-1/p)(1-chi(p)/p) against V(q) q / (21 phi(q)).

    Above `limit` the product is cut at `limit` and the rest of the 1 - 1/p
    factors is replaced by the Mertens ratio log(limit)/log(q^9).
    """
    chi = arith.RealCharacter.from_modulus(q)
    top = q**9
    Vq = V_q(chi)
    target = Vq * q / (21 * arith.euler_phi(q))
    if top <= limit:
        V = math.exp(_log_V_product(chi, top))
        how = "exact"
    else:
        V = math.exp(_log_V_product(chi, limit)) * math.log(limit) / math.log(top)
        how = "estimated"
    return {"q": q, "V": V, "V_q": Vq, "target": target, "ratio": V / target, "method": how}


def corollary_run(q: int, a: int, x: int, beta: float, count_limit: int = COUNT_LIMIT,
                  with_v_relation: bool = True) -> RunReport:
    """Gates and the lower bound pi(x; q, a) >= L(1, chi) V(q) x / (168 phi(q))."""
    t0 = time.perf_counter()
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    chi = arith.RealCharacter.from_modulus(q)
    if chi(a) != 1:
        raise CorollaryError(f"chi({a}) = {chi(a)}: the corollary needs chi(a) = 1")
    one_minus_beta = 1 - beta
    lq = math.log(q)
    lx = math.log(x)
    upper_log = 1 / (4 * one_minus_beta)
    gates = {
        "beta_1_24": {"lhs": one_minus_beta * lq, "rhs": 1 / 24,
                      "pass": one_minus_beta * lq <= 1 / 24},
        "beta_1_172": {"lhs": one_minus_beta * lq, "rhs": 1 / 172,
                       "pass": one_minus_beta * lq <= 1 / 172},
        "x_ge_q43": {"lhs_log": 43 * lq, "rhs_log": lx, "pass": q**43 <= x},
        "x_le_exp": {"lhs_log": lx, "rhs_log": upper_log, "pass": lx <= upper_log},
    }
    L1 = arith.l_one(chi)
    phi = arith.euler_phi(q)
    Vq = V_q(chi)
    rhs = L1 * Vq / phi * x / 168
    rep = RunReport(
        config={"q": q, "a": a, "x": x, "beta": beta, "w": q**3, "Delta": q**9,
                "mode": "float", "x_ge_q6": q**6 <= x},
        gates=gates,
        main_term={"L1": L1, "phi_q": phi, "V_q": Vq, "X": 2 * L1 * x / q,
                   "rhs_pi_bound": rhs, "constant": 168},
    )
    if with_v_relation:
        rep.main_term["v_relation"] = v_relation(q)
    if x <= count_limit:
        rep.exact_counts = {"pi_x_q_a": arith.count_primes_in_progression(x, q, a)}
    rep.config["assumed"] = [
        "sum over q^3 < p <= sqrt(x) of lambda(p)/p < (1 - beta) log x + O(q^(-3/4)) for x >= q^6",
        "1 - beta >> q^(-1/2) (log q)^(-2)",
    ]
    all_pass = gates["beta_1_172"]["pass"] and gates["x_ge_q43"]["pass"] and gates["x_le_exp"]["pass"]
    failed = [k for k, g in gates.items() if not g["pass"]]
    concl = {"applicable": all_pass, "rhs": rhs, "failed": failed}
    if not all_pass:
        range_bad = not (gates["x_ge_q43"]["pass"] and gates["x_le_exp"]["pass"])
        concl["status"] = RANGE_VIOLATION if range_bad else NOT_EXCEPTIONAL
        concl["hypothetical"] = True
    elif "pi_x_q_a" in rep.exact_counts:
        ok = rep.exact_counts["pi_x_q_a"] >= rhs
        concl.update(status=VERIFIED if ok else VIOLATED, holds=ok)
    else:
        concl.update(status=HYPOTHETICAL, hypothetical=True)
    rep.conclusion = concl
    rep.timing_ms = (time.perf_counter() - t0) * 1e3
    return rep
