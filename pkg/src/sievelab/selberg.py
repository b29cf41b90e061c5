"""
Selberg lower-bound sieve: weights, the quadratic form W, the lemma and
theorem certificates, and the classical upper bound.

Weights use y_d = log(Delta/d) / H on all squarefree d <= Delta and

    rho_l = mu(l) * prod_{p|l} (1 - g(p))^{-1} * sum_{(m,l)=1} h(m) y_{lm},

the inverse of y_d = mu(d)/h(d) * sum_{d|m} g(m) rho_m. It stays defined
when some g(p) vanish, and gives rho_1 = 1 from sum h(d) y_d = 1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from . import arith
from .density import Density, DensityError, sieve_sums
from .logpoly import LogFraction, LogPoly, lsum

NAIVE_DIRECT_MAX = 200
DIRECT_BUDGET = 2000


class BudgetExceeded(RuntimeError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass
class WeightSet:
    """Lower-bound sieve weights on the squarefree d <= Delta.

    In float mode y and rho are float64 arrays aligned with `support`; in
    exact mode they are lists of LogFraction and H is a LogPoly.
    """

    Delta: int
    H: Union[float, LogPoly]
    support: np.ndarray
    y: Sequence
    rho: Sequence
    mode: str = "float"
    Hrho: Optional[List[LogPoly]] = field(default=None, repr=False)

    @property
    def rho_map(self) -> Dict[int, object]:
        return {int(d): (r if self.mode == "exact" else float(r)) for d, r in zip(self.support, self.rho)}

    @property
    def y_map(self) -> Dict[int, object]:
        return {int(d): (v if self.mode == "exact" else float(v)) for d, v in zip(self.support, self.y)}

    def max_abs_rho(self) -> float:
        if self.mode == "exact":
            return max(abs(float(r)) for r in self.rho)
        return float(np.max(np.abs(self.rho)))

    def H_float(self) -> float:
        return float(self.H)


def lower_weights(density: Density, Delta: int) -> WeightSet:
    if Delta < 2:
        raise PreconditionError("Delta must be >= 2")
    if Delta > density.p_max:
        raise DensityError(f"weights to {Delta} need primes above p_max={density.p_max}")
    sq = arith.squarefree_up_to(Delta)
    mu = arith.mobius_table(Delta)
    if density.mode == "exact":
        return _lower_weights_exact(density, Delta, sq, mu)

    h = density.h_table(Delta)[sq]
    unit = density.unit_table(Delta)
    L = np.log(Delta / sq.astype(np.float64))
    H = math.fsum(h * L)
    if H <= 0:
        raise PreconditionError("H vanishes for this density")
    y = L / H
    rho = np.empty(len(sq))
    for i, l in enumerate(sq):
        l = int(l)
        k = int(np.searchsorted(sq, Delta // l, side="right"))
        ms = sq[:k]
        ok = np.gcd(ms, l) == 1
        s = math.fsum(h[:k][ok] * (L[:k][ok] - math.log(l)))
        rho[i] = mu[l] * unit[l] * s / H
    return WeightSet(Delta, H, sq, y, rho, "float")


def _lower_weights_exact(density, Delta, sq, mu) -> WeightSet:
    sq_list = [int(d) for d in sq]
    hs = {d: density.exact_h(d) for d in sq_list}
    logs = {d: LogPoly.log(Delta, d) for d in sq_list}
    H = lsum(logs[d] * hs[d] for d in sq_list if hs[d])
    if not H:
        raise PreconditionError("H vanishes for this density")
    Hrho: List[LogPoly] = []
    for l in sq_list:
        unit = Fraction(1)
        for p in arith.prime_factors(l):
            unit /= 1 - density.g_prime(p)
        acc = lsum(
            logs[l * m] * hs[m]
            for m in sq_list
            if m <= Delta // l and hs[m] and math.gcd(m, l) == 1
        )
        Hrho.append(acc * (int(mu[l]) * unit))
    y = [LogFraction(logs[d], H) for d in sq_list]
    rho = [LogFraction(r, H) for r in Hrho]
    return WeightSet(Delta, H, sq, y, rho, "exact", Hrho=Hrho)


def y_from_rho(density: Density, weights: WeightSet) -> list:
    """y_d = mu(d)/h(d) * sum_{m <= Delta, d | m} g(m) rho_m (needs h(d) != 0).

    Exact mode returns H * y_d as LogPoly values, float mode returns floats.
    """
    sq = [int(d) for d in weights.support]
    out = []
    if weights.mode == "exact":
        Hrho = dict(zip(sq, weights.Hrho))
        for d in sq:
            h = density.exact_h(d)
            if not h:
                raise PreconditionError(f"h({d}) = 0, forward transform undefined")
            acc = lsum(Hrho[m] * density.exact_g(m) for m in sq if m % d == 0)
            out.append(acc * (Fraction(arith.mobius(d)) / h))
        return out
    rho = dict(zip(sq, weights.rho))
    for d in sq:
        _, h = density.gh(d)
        if h == 0:
            raise PreconditionError(f"h({d}) = 0, forward transform undefined")
        acc = math.fsum(density.g_of(m) * rho[m] for m in sq if m % d == 0)
        out.append(arith.mobius(d) * acc / h)
    return out


def normalization(density: Density, weights: WeightSet):
    """sum_d h(d) y_d; equals 1."""
    if weights.mode == "exact":
        return LogFraction(
            lsum(weights.y[i].num * density.exact_h(int(d)) for i, d in enumerate(weights.support)),
            weights.H,
        )
    h = density.h_table(weights.Delta)[weights.support]
    return math.fsum(h * weights.y)


# ---------------------------------------------------------------------------
# the quadratic form W


def _check_cover(density: Density, Delta: int, z: int):
    top = max(z - 1, Delta)
    if top > density.p_max:
        raise DensityError(f"W needs primes up to {top}, density stops at {density.p_max}")


def w_diag(density: Density, weights: WeightSet, z: int):
    """W in diagonal form: sum h y_d^2 - sum_{p<z} g(p) sum_{(d,p)=1} h(d)(y_d - y_pd)^2,
    with y_d - y_pd = min(log p, log(Delta/d)) / H.

    Float in float mode, LogFraction in exact mode.
    """
    Delta = weights.Delta
    _check_cover(density, Delta, z)
    sq = weights.support
    ps = arith.primes_below(z)
    if weights.mode == "exact":
        return LogFraction(h2w_diag_exact(density, Delta, z), weights.H * weights.H)
    h = density.h_table(Delta)[sq]
    L = np.log(Delta / sq.astype(np.float64))
    H = weights.H
    first = math.fsum(h * (L / H) ** 2)
    parts = []
    for p in ps:
        p = int(p)
        gp = density.g_prime(p)
        if gp == 0:
            continue
        ok = sq % p != 0
        diff = np.minimum(math.log(p), L[ok]) / H
        parts.append(gp * math.fsum(h[ok] * diff * diff))
    return first - math.fsum(parts)


def h2w_diag_exact(density: Density, Delta: int, z: int) -> LogPoly:
    """H^2 W from the diagonal form, exactly."""
    sq = [int(d) for d in arith.squarefree_up_to(Delta)]
    hs = {d: density.exact_h(d) for d in sq}
    terms = []
    for d in sq:
        if hs[d]:
            L = LogPoly.log(Delta, d)
            terms.append((L * L) * hs[d])
    for p in map(int, arith.primes_below(z)):
        gp = density.g_prime(p)
        if not gp:
            continue
        lp = LogPoly.log(p)
        for d in sq:
            if d % p == 0 or not hs[d]:
                continue
            m = lp if p * d <= Delta else LogPoly.log(Delta, d)
            terms.append((m * m) * (-gp * hs[d]))
    return lsum(terms)


class _GMemo:
    def __init__(self, density: Density):
        self.density = density
        self.cache: Dict[int, object] = {1: Fraction(1) if density.mode == "exact" else 1.0}

    def __call__(self, m: int):
        v = self.cache.get(m)
        if v is None:
            v = self.density.g_of(m)
            self.cache[m] = v
        return v


def w_direct(density: Density, weights: WeightSet, z: int):
    """W from its definition as a double sum over rho_{d1} rho_{d2}.

    Oracle only: naive triple loop up to Delta = 200, grouped by lcm up to
    Delta = 2000, refused above.
    """
    Delta = weights.Delta
    if Delta > DIRECT_BUDGET:
        raise BudgetExceeded(f"w_direct refuses Delta={Delta} > {DIRECT_BUDGET}")
    _check_cover(density, Delta, z)
    g = _GMemo(density)
    ps = [int(p) for p in arith.primes_below(z)]
    sq = [int(d) for d in weights.support]

    def coeff(m):
        c = g(m)
        for p in ps:
            c = c - g(math.lcm(p, m))
        return c

    if weights.mode == "exact":
        Hrho = weights.Hrho
        acc = []
        for i, d1 in enumerate(sq):
            inner = lsum(Hrho[j] * coeff(math.lcm(d1, d2)) for j, d2 in enumerate(sq))
            acc.append(Hrho[i] * inner)
        return LogFraction(lsum(acc), weights.H * weights.H)

    rho = [float(r) for r in weights.rho]
    if Delta <= NAIVE_DIRECT_MAX:
        terms = []
        for i, d1 in enumerate(sq):
            for j, d2 in enumerate(sq):
                m = math.lcm(d1, d2)
                c = g(m)
                for p in ps:
                    c -= g(math.lcm(p, m))
                terms.append(rho[i] * rho[j] * c)
        return math.fsum(terms)
    grouped: Dict[int, List[float]] = {}
    for i, d1 in enumerate(sq):
        if rho[i] == 0:
            continue
        for j, d2 in enumerate(sq):
            grouped.setdefault(math.lcm(d1, d2), []).append(rho[i] * rho[j])
    return math.fsum(math.fsum(v) * coeff(m) for m, v in grouped.items())


# ---------------------------------------------------------------------------
# certificates


def nu_value(delta, alpha):
    """1 - delta - (9/2) alpha^2; exact for Fraction inputs."""
    if isinstance(delta, Fraction) and isinstance(alpha, Fraction):
        return 1 - delta - Fraction(9, 2) * alpha * alpha
    return 1.0 - float(delta) - 4.5 * float(alpha) ** 2


def exact_alpha(w: int, Delta: int) -> Optional[Fraction]:
    """log w / log Delta as a Fraction when Delta = w^k, k integer, or w = Delta^(1/k)."""
    if w < 2 or Delta < 2:
        return None
    k, t = 0, 1
    while t < Delta:
        t *= w
        k += 1
    if t == Delta:
        return Fraction(1, k)
    return None


@dataclass
class LemmaBound:
    K: float
    K_w2: float
    J_range: float
    G_w: float
    alpha: float
    delta_wz: float
    lower_bound_H2W: float
    nu: float
    jw_bound: Optional[float]
    H: float
    J_full: float
    params: Dict[str, int]
    assumptions_pass: Optional[bool] = None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def lemma_bound(density: Density, w: int, z: int, Delta: int,
            a1_pass: Optional[bool] = None, a2_pass: Optional[bool] = None) -> LemmaBound:
    """Lower bound for H^2 W, nu, and (given the assumption verdicts) the J W >= nu bound."""
    if not (z > w >= 2):
        raise PreconditionError(f"need z > w >= 2, got w={w}, z={z}")
    if Delta < w**3:
        raise PreconditionError(f"need Delta >= w^3, got Delta={Delta}, w^3={w**3}")
    s = sieve_sums(density, Delta, w, z)
    alpha = s.alpha
    rhs = (1.0 - s.delta) * s.K - 4.5 * alpha**2 * s.K_w2 - s.J_range * s.G_of_w
    nu = nu_value(s.delta, alpha)
    both = None if a1_pass is None or a2_pass is None else bool(a1_pass and a2_pass)
    bound = nu if (both and nu > 0) else None
    return LemmaBound(
        K=s.K, K_w2=s.K_w2, J_range=s.J_range, G_w=s.G_of_w, alpha=alpha,
        delta_wz=s.delta, lower_bound_H2W=rhs, nu=nu, jw_bound=bound,
        H=s.H, J_full=s.J_full, params={"w": w, "z": z, "Delta": Delta},
        assumptions_pass=both,
    )


@dataclass
class UpperBound:
    bound: float
    J: float
    X_over_J: float
    XV: float
    V: float


def upper_bound(density: Density, Delta: int, z: int, X: float, R_Delta2: float) -> UpperBound:
    """S(A, z) <= X / J + R(Delta^2), J summed over d <= Delta, d | P(z)."""
    s = sieve_sums(density, max(Delta, 2), 2, z)
    J = s.J_Pz
    if J <= 0:
        raise PreconditionError("J vanishes")
    return UpperBound(bound=X / J + R_Delta2, J=J, X_over_J=X / J,
                      XV=X * s.V_of_z, V=s.V_of_z)


def weights_to_csv(weights: WeightSet, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["d", "y_d", "rho_d"])
        for d, y, r in zip(weights.support, weights.y, weights.rho):
            out.writerow([int(d), repr(float(y)), repr(float(r))])
