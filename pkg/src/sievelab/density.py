"""
Multiplicative densities g, their companion h = g / (1 - g), and the
scalar sieve sums built from them (H, J, K, G, delta, V).

A Density fixes g(p) for every prime p <= p_max and extends to squarefree
d multiplicatively. Two arithmetic modes:

  float  -- numpy float64 tables, compensated summation (math.fsum)
  exact  -- g(p), h(d) as Fractions; log-weighted sums as LogPoly values,
            evaluated to floats at 113 bits only for display
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple, Union

import numpy as np

from . import arith
from .logpoly import LogPoly, lsum

Number = Union[float, Fraction]

_BELOW_ONE = math.nextafter(1.0, 0.0)


class DensityError(ValueError):
    pass


class Density:
    """g(p) for primes p <= p_max, extended multiplicatively to squarefree d."""

    def __init__(
        self,
        values: Dict[int, Number],
        p_max: int,
        mode: str = "float",
        label: str = "table",
    ):
        if mode not in ("float", "exact"):
            raise DensityError(f"unknown mode {mode!r}")
        self.p_max = int(p_max)
        self.mode = mode
        self.label = label
        self.primes = arith.primes_up_to(self.p_max)
        gp = np.zeros(len(self.primes), dtype=np.float64)
        exact: Dict[int, Fraction] = {}
        index = {int(p): i for i, p in enumerate(self.primes)} if values else {}
        for p, v in values.items():
            p = int(p)
            if p not in index:
                raise DensityError(f"{p} is not a prime <= p_max={self.p_max}")
            if not 0 <= v < 1:
                raise DensityError(f"g({p}) = {v} outside [0, 1)")
            if mode == "exact":
                exact[p] = Fraction(v)
            gp[index[p]] = float(v)
        self._gp = gp
        self._exact = exact
        self._index = None
        self._cache: dict = {}

    def __repr__(self):
        return f"Density({self.label}, p_max={self.p_max}, mode={self.mode})"

    def with_mode(self, mode: str) -> "Density":
        vals = self._exact if self.mode == "exact" else {
            int(p): float(v) for p, v in zip(self.primes, self._gp) if v
        }
        if mode == "exact" and self.mode == "float":
            vals = {p: Fraction(v) for p, v in vals.items()}
        return Density(vals, self.p_max, mode, self.label)

    # -- prime level -------------------------------------------------------

    def _idx(self, p: int) -> int:
        i = int(np.searchsorted(self.primes, p))
        if i >= len(self.primes) or self.primes[i] != p:
            if p > self.p_max:
                raise DensityError(f"prime {p} above p_max={self.p_max}")
            raise DensityError(f"{p} is not prime")
        return i

    def g_prime(self, p: int) -> Number:
        """g(p), exact Fraction in exact mode."""
        i = self._idx(p)
        if self.mode == "exact":
            return self._exact.get(int(p), Fraction(0))
        return float(self._gp[i])

    def h_prime(self, p: int) -> Number:
        g = self.g_prime(p)
        return g / (1 - g)

    def prime_values(self, lo: float, hi: float, *, lo_open=True, hi_open=False):
        """(primes, g float array) for primes in the given range."""
        top = math.floor(hi) if not hi_open else math.ceil(hi) - 1
        if top > self.p_max:
            raise DensityError(f"range up to {top} exceeds p_max={self.p_max}")
        a = np.searchsorted(self.primes, lo, side="right" if lo_open else "left")
        b = np.searchsorted(self.primes, top, side="right")
        return self.primes[a:b], self._gp[a:b]

    def exact_values(self, primes: Iterable[int]):
        return [self.g_prime(int(p)) for p in primes]

    # -- squarefree level --------------------------------------------------

    def gh(self, d: int) -> Tuple[Number, Number]:
        """(g(d), h(d)) for squarefree d whose prime factors are <= p_max."""
        f = arith.factorize(d)
        if not f.is_squarefree:
            raise DensityError(f"{d} is not squarefree")
        one = Fraction(1) if self.mode == "exact" else 1.0
        g, h = one, one
        for p in f.primes:
            gp = self.g_prime(p)
            g *= gp
            h *= gp / (1 - gp)
        return g, h

    def g_of(self, d: int) -> Number:
        return self.gh(d)[0]

    def h_of(self, d: int) -> Number:
        return self.gh(d)[1]

    def _mult_table(self, n: int, kind: str) -> np.ndarray:
        key = (kind, n)
        if key in self._cache:
            return self._cache[key]
        if n > self.p_max:
            raise DensityError(f"table to {n} needs primes above p_max={self.p_max}")
        out = np.ones(n + 1, dtype=np.float64)
        out[0] = 0.0
        ps, gs = self.prime_values(1, n)
        if kind == "g":
            vals = gs
        elif kind == "h":
            vals = gs / (1.0 - gs)
        else:  # "u": 1 / (1 - g)
            vals = 1.0 / (1.0 - gs)
        for p, v in zip(ps, vals):
            if v != 1.0:
                out[int(p) :: int(p)] *= v
        out *= arith.mobius_table(n) != 0
        self._cache[key] = out
        return out

    def g_table(self, n: int) -> np.ndarray:
        """g(k) for k = 0..n, zero at non-squarefree k."""
        return self._mult_table(n, "g")

    def h_table(self, n: int) -> np.ndarray:
        """h(k) for k = 0..n, zero at non-squarefree k."""
        return self._mult_table(n, "h")

    def unit_table(self, n: int) -> np.ndarray:
        """prod_{p | k} 1/(1 - g(p)) for k = 0..n, zero at non-squarefree k."""
        return self._mult_table(n, "u")

    def exact_h(self, d: int) -> Fraction:
        key = ("hx", d)
        v = self._cache.get(key)
        if v is None:
            v = self.h_of(d)
            self._cache[key] = v
        return v

    def exact_g(self, d: int) -> Fraction:
        key = ("gx", d)
        v = self._cache.get(key)
        if v is None:
            v = self.g_of(d)
            self._cache[key] = v
        return v


# ---------------------------------------------------------------------------
# constructors


def power_density(kappa: Number, p_max: int, mode: str = "float") -> Density:
    """g(p) = min(kappa/p, 1 - ulp)."""
    vals = {}
    for p in arith.primes_up_to(p_max):
        p = int(p)
        if mode == "exact":
            v = Fraction(kappa) / p
            vals[p] = min(v, Fraction(_BELOW_ONE))
        else:
            vals[p] = min(float(kappa) / p, _BELOW_ONE)
    return Density(vals, p_max, mode, label=f"power({kappa})")


def exceptional_density(q: int, p_max: int, mode: str = "float",
                        chi: Optional[arith.RealCharacter] = None) -> Density:
    """g(p) p = 1 + chi(p)(1 - 1/p) for p not dividing q, g(p) = 0 for p | q."""
    if chi is None:
        chi = arith.RealCharacter.from_modulus(q)
    vals = {}
    for p in arith.primes_up_to(p_max):
        p = int(p)
        c = chi(p)
        if c == 0:
            continue
        v = (1 + c * (1 - Fraction(1, p))) / p
        vals[p] = v if mode == "exact" else float(v)
    d = Density(vals, p_max, mode, label=f"exceptional({q})")
    d.character = chi
    return d


def table_density(rows: Iterable[Tuple[int, Number]], p_max: Optional[int] = None,
                  mode: str = "exact") -> Density:
    rows = [(int(p), v) for p, v in rows]
    top = p_max if p_max is not None else max((p for p, _ in rows), default=2)
    return Density(dict(rows), top, mode, label="table")


def load_table_csv(path, p_max: Optional[int] = None) -> Density:
    """Rows `p,g_num,g_den` (exact) or `p,g_float` (float); a header row is skipped."""
    rows = []
    exact = True
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or not rec[0].strip().lstrip("-").isdigit():
                continue
            if len(rec) >= 3:
                rows.append((int(rec[0]), Fraction(int(rec[1]), int(rec[2]))))
            else:
                exact = False
                rows.append((int(rec[0]), float(rec[1])))
    mode = "exact" if exact else "float"
    if not exact:
        rows = [(p, float(v)) for p, v in rows]
    return table_density(rows, p_max, mode)


def make_density(kind: str, p_max: int, mode: str = "float", *, kappa: Number = 1,
                 q: Optional[int] = None, table=None) -> Density:
    if kind == "power":
        return power_density(kappa, p_max, mode)
    if kind == "exceptional":
        if q is None:
            raise DensityError("exceptional density needs q")
        return exceptional_density(q, p_max, mode)
    if kind == "table":
        if isinstance(table, (str, bytes)) or hasattr(table, "__fspath__"):
            d = load_table_csv(table, p_max)
            return d if d.mode == mode else d.with_mode(mode)
        return table_density(table or [], p_max, mode)
    raise DensityError(f"unknown density kind {kind!r}")


def gh(density: Density, d: int):
    return density.gh(d)


# ---------------------------------------------------------------------------
# sieve sums


@dataclass
class SieveSums:
    """Scalar sums for one density and parameter set (float values).

    K_of_u is K(u) = sum_{d<=u} h(d) log^2(Delta/d); K is K(Delta); K_w2 is
    K(w^2) and K_window the complementary sum over w^2 < d <= Delta.
    J_full sums h over squarefree d <= Delta; J_Pz keeps only d | P(z).
    """

    H: float
    J_full: float
    J_Pz: float
    J_range: float
    K: float
    K_of_u: float
    K_w2: float
    K_window: float
    G_of_w: float
    delta: float
    V_of_z: float
    alpha: float
    params: Dict[str, int]
    exact: Optional[dict] = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "H", "J_full", "J_Pz", "J_range", "K", "K_of_u", "K_w2", "K_window",
            "G_of_w", "delta", "V_of_z", "alpha")}


def _check_range(density: Density, top: int):
    if top > density.p_max:
        raise DensityError(f"sums need primes up to {top}, density stops at {density.p_max}")


def delta_wz(density: Density, w: float, z: float) -> Number:
    """sum of g(p) over primes w < p <= z."""
    if z <= w:
        return Fraction(0) if density.mode == "exact" else 0.0
    ps, gs = density.prime_values(w, z)
    if density.mode == "exact":
        return sum(density.exact_values(ps), Fraction(0))
    return math.fsum(gs)


def G_of_w(density: Density, w: float):
    """sum of g(p) (log p)^2 over p <= w; LogPoly in exact mode."""
    ps, gs = density.prime_values(1, w)
    if density.mode == "exact":
        return lsum(LogPoly({(int(p), int(p)): density.g_prime(int(p))}) for p in ps)
    return math.fsum(gs * np.log(ps.astype(np.float64)) ** 2)


def V_of(density: Density, z: float) -> Number:
    """prod over p < z of (1 - g(p))."""
    ps, gs = density.prime_values(1, z, hi_open=True)
    if density.mode == "exact":
        out = Fraction(1)
        for v in density.exact_values(ps):
            out *= 1 - v
        return out
    return float(np.prod(1.0 - gs))


def sieve_sums(density: Density, Delta: int, w: int, z: int, u: Optional[int] = None) -> SieveSums:
    """Direct summation of every scalar sum over squarefree d <= Delta."""
    if Delta < 2:
        raise DensityError("Delta must be >= 2")
    if u is None:
        u = Delta
    if u > Delta:
        raise DensityError(f"u={u} exceeds Delta={Delta}")
    _check_range(density, max(Delta, w, z))
    w2 = min(w * w, Delta)
    params = {"Delta": Delta, "w": w, "z": z, "u": u}
    sq = arith.squarefree_up_to(Delta)
    lpf = arith.largest_prime_factor_table(Delta)
    alpha = math.log(w) / math.log(Delta)
    if density.mode == "exact":
        return _sieve_sums_exact(density, Delta, w, z, u, w2, sq, lpf, alpha, params)

    h = density.h_table(Delta)[sq]
    L = np.log(Delta / sq.astype(np.float64))
    L2 = h * L * L
    fs = math.fsum
    return SieveSums(
        H=fs(h * L),
        J_full=fs(h),
        J_Pz=fs(h[lpf[sq] < z]),
        J_range=fs(h[sq > w]),
        K=fs(L2),
        K_of_u=fs(L2[sq <= u]),
        K_w2=fs(L2[sq <= w2]),
        K_window=fs(L2[sq > w2]),
        G_of_w=G_of_w(density, w),
        delta=delta_wz(density, w, z),
        V_of_z=V_of(density, z),
        alpha=alpha,
        params=params,
    )


def _sieve_sums_exact(density, Delta, w, z, u, w2, sq, lpf, alpha, params) -> SieveSums:
    H = LogPoly()
    J_full = J_Pz = J_range = Fraction(0)
    K = K_u = K_w2 = K_win = LogPoly()
    for d in map(int, sq):
        h = density.exact_h(d)
        if not h:
            continue
        L = LogPoly.log(Delta, d)
        H += L * h
        J_full += h
        if lpf[d] < z:
            J_Pz += h
        if d > w:
            J_range += h
        t = (L * L) * h
        K += t
        if d <= u:
            K_u += t
        if d <= w2:
            K_w2 += t
        else:
            K_win += t
    G = G_of_w(density, w)
    delta = delta_wz(density, w, z)
    V = V_of(density, z)
    exact = dict(H=H, J_full=J_full, J_Pz=J_Pz, J_range=J_range, K=K, K_of_u=K_u,
                 K_w2=K_w2, K_window=K_win, G_of_w=G, delta=delta, V_of_z=V)
    return SieveSums(
        **{k: float(v) for k, v in exact.items()},
        alpha=alpha,
        params=params,
        exact=exact,
    )
