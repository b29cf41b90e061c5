"""
Verdicts for the three hypotheses the lower-bound theorem runs on.

  A1             G(w) <= (3/2) (log w)^2
  A2_direct      J(w, Delta) (log Delta)^2 <= 3 K(w^2, Delta), by summation
  A2_asymptotic  partial-sum law sum_{d<=x} h(d) d ~ c x and the main-term
                 ratio it implies, 3K(w^2,Delta) / (J(w,Delta) log^2 Delta)
                 -> (1 - 2a)^3 / (1 - a), a = log w / log Delta
  A3             delta(w, sqrt x) <= 1/4

"Sufficiently large" qualifiers are never assumed: each verdict carries
its margin and the caller decides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Sequence

import numpy as np

from . import arith
from .density import Density, G_of_w, delta_wz, sieve_sums
from .selberg import PreconditionError, exact_alpha


@dataclass
class AssumptionVerdict:
    which: str
    passed: bool
    lhs: float
    rhs: float
    params: Dict[str, float]
    extra: Dict[str, object] = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        if self.passed != (self.lhs <= self.rhs):
            raise AssertionError(f"{self.which}: pass flag disagrees with lhs <= rhs")

    def as_dict(self) -> dict:
        return {"which": self.which, "pass": self.passed, "lhs": self.lhs, "rhs": self.rhs,
                "margin": self.margin, "params": dict(self.params), "extra": dict(self.extra)}

    @classmethod
    def from_dict(cls, d: dict) -> "AssumptionVerdict":
        return cls(d["which"], d["pass"], d["lhs"], d["rhs"], d["params"], d.get("extra", {}))


def _verdict(which, lhs, rhs, params, **extra) -> AssumptionVerdict:
    lhs, rhs = float(lhs), float(rhs)
    return AssumptionVerdict(which, lhs <= rhs, lhs, rhs, params, extra)


def check_a1(density: Density, w: int) -> AssumptionVerdict:
    if w < 2:
        raise PreconditionError("need w >= 2")
    G = G_of_w(density, w)
    return _verdict("A1", G, 1.5 * math.log(w) ** 2, {"w": w})


def check_a2_direct(density: Density, w: int, Delta: int) -> AssumptionVerdict:
    if Delta < w**3:
        raise PreconditionError(f"need Delta >= w^3, got Delta={Delta}, w={w}")
    s = sieve_sums(density, Delta, w, w + 1)
    lhs = s.J_range * math.log(Delta) ** 2
    rhs = 3 * s.K_window
    a = exact_alpha(w, Delta)
    return _verdict(
        "A2_direct", lhs, rhs, {"w": w, "Delta": Delta, "alpha": s.alpha},
        alpha_exact=str(a) if a is not None else None,
        ratio=rhs / lhs if lhs else None,
        J_range=s.J_range, K_window=s.K_window,
    )


def ratio_test(alpha: Fraction):
    """((1 - 8 a^3) / (1 - a), 1 + a/6) in exact rationals.

    This is the comparison usually quoted for A2. It is a true inequality on
    (0, 1/3], but the left side is not the asymptotic ratio of the two sides
    of A2; see `main_term_ratio`.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    return (1 - 8 * alpha**3) / (1 - alpha), 1 + alpha / 6


def main_term_ratio(alpha: Fraction) -> Fraction:
    """Limit of 3 K(w^2, Delta) / (J(w, Delta) log^2 Delta) under sum h(d) d ~ c x.

    J(w, Delta) ~ c (1 - a) log Delta and
    K(w^2, Delta) ~ c/3 * log^3(Delta / w^2) = c/3 (1 - 2a)^3 log^3 Delta.
    """
    alpha = Fraction(alpha)
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    return (1 - 2 * alpha) ** 3 / (1 - alpha)


def partial_sums_hd(density: Density, checkpoints: Sequence[int]) -> np.ndarray:
    """sum over squarefree d <= x of h(d) d, for each checkpoint x."""
    top = max(checkpoints)
    h = density.h_table(top)
    cum = np.cumsum(h * np.arange(top + 1))
    return cum[np.asarray(checkpoints, dtype=np.int64)]


def fit_c(checkpoints: Sequence[int], sums: Sequence[float]) -> float:
    """c minimizing sum (S_i - c x_i)^2 / x_i^(3/2)."""
    x = np.asarray(checkpoints, dtype=np.float64)
    S = np.asarray(sums, dtype=np.float64)
    return float(np.sum(S * x**-0.5) / np.sum(x**0.5))


def geometric_checkpoints(top: int, count: int = 8) -> list:
    return sorted({max(2, top >> k) for k in range(count)})


def check_a2_asymptotic(density: Density, w: int, Delta: int,
                        checkpoints: Sequence[int],
                        q: Optional[int] = None) -> AssumptionVerdict:
    """Partial-sum law and the main-term ratio for A2.

    The verdict compares 1 (left side, normalized) with the main-term ratio
    (1 - 2a)^3/(1 - a) of the right side; the O(1/log Delta) correction is
    reported, not folded in. The quoted comparison (1 - 8a^3)/(1 - a) vs
    1 + a/6 is evaluated exactly and reported alongside.
    """
    checkpoints = sorted(int(c) for c in checkpoints)
    if len(checkpoints) < 3:
        raise ValueError("need at least 3 checkpoints")
    sums = partial_sums_hd(density, checkpoints)
    c = fit_c(checkpoints, sums)
    a = exact_alpha(w, Delta)
    alpha = a if a is not None else Fraction(math.log(w) / math.log(Delta))
    quoted, lower = ratio_test(alpha)
    ratio = main_term_ratio(alpha)
    chi = getattr(density, "character", None)
    if q is None and chi is not None:
        q = chi.q
    extra = {
        "c_fit": c,
        "checkpoints": checkpoints,
        "partial_sums": [float(s) for s in sums],
        "main_ratio_exact": str(ratio),
        "quoted_ratio_exact": str(quoted),
        "quoted_lower_exact": str(lower),
        "quoted_ratio_ge_lower": quoted >= lower,
        "error_scale": 1 / math.log(Delta),
        "J_pred": c * math.log(Delta / w),
        "K_window_pred": c / 3 * max(math.log(Delta / w**2), 0.0) ** 3,
    }
    if chi is not None:
        L1 = arith.l_one(chi)
        c_th = L1 * arith.euler_phi(chi.q) / chi.q
        extra.update(c_theory=c_th, c_rel_error=abs(c - c_th) / c_th)
    if q is not None and c > 0:
        extra["w_over_q_cinv4"] = w * c**4 / q
    rhs = float(ratio) if c > 0 else 0.0
    return AssumptionVerdict(
        "A2_asymptotic", 1.0 <= rhs, 1.0, rhs,
        {"w": w, "Delta": Delta, "alpha": float(alpha)}, extra,
    )


def check_a3(density: Density, w: int, x: int) -> AssumptionVerdict:
    if x < 1:
        raise PreconditionError("need x >= 1")
    z = math.isqrt(x)
    d = delta_wz(density, w, z)
    return _verdict("A3", d, 0.25, {"w": w, "x": x, "z": z})
