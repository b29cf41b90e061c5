"""
Sifting sequences: congruence sums A_d, remainders r_d = A_d - g(d) X,
the sifting function S(A, z), and both evaluations of the lower-bound
sum S^-(A, z).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import arith
from .density import Density, exceptional_density
from .selberg import WeightSet, w_diag

EXACT_SCRIPT_R_BUDGET = 10**7


@dataclass
class SiftingSequence:
    """Nonnegative weights a_n for n_min <= n <= n_max (a[i] is a_{n_min + i})."""

    n_min: int
    n_max: int
    a: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a)
        if len(self.a) != self.n_max - self.n_min + 1:
            raise ValueError("weights do not match support bounds")
        if self.n_min < 1:
            raise ValueError("support must start at n >= 1")
        if np.any(self.a < 0):
            raise ValueError("weights must be nonnegative")

    @classmethod
    def unit(cls, n_max: int, n_min: int = 1) -> "SiftingSequence":
        return cls(n_min, n_max, np.ones(n_max - n_min + 1, dtype=np.int64))

    @classmethod
    def from_mapping(cls, weights: Dict[int, float]) -> "SiftingSequence":
        lo, hi = min(weights), max(weights)
        exact = all(float(v).is_integer() for v in weights.values())
        a = np.zeros(hi - lo + 1, dtype=np.int64 if exact else np.float64)
        for n, v in weights.items():
            a[n - lo] = v
        return cls(lo, hi, a)

    @classmethod
    def from_csv(cls, path) -> "SiftingSequence":
        rows = {}
        with open(path, newline="") as fh:
            for rec in csv.reader(fh):
                if rec and rec[0].strip().isdigit():
                    rows[int(rec[0])] = float(rec[1])
        return cls.from_mapping(rows)

    @property
    def is_integral(self) -> bool:
        return np.issubdtype(self.a.dtype, np.integer)

    def _sum(self, arr):
        return int(arr.sum()) if self.is_integral else math.fsum(arr)

    def multiples(self, d: int) -> np.ndarray:
        start = -(-self.n_min // d) * d
        return self.a[start - self.n_min :: d]

    def total(self):
        return self._sum(self.a)

    def numbers(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1, dtype=np.int64)


def congruence_sum(seq: SiftingSequence, d: int):
    """A_d = sum of a_n over multiples n of d."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d > seq.n_max:
        return 0
    return seq._sum(seq.multiples(d))


@dataclass
class ApproximationModel:
    X: float
    density: Density
    d_max: int


class RemainderTable:
    """Memoized r_d = A_d - g(d) X; exact Fractions when the density is exact
    and the sequence integral."""

    def __init__(self, seq: SiftingSequence, model: ApproximationModel):
        self.seq = seq
        self.model = model
        self.exact = model.density.mode == "exact" and seq.is_integral
        self.X = Fraction(model.X) if self.exact else float(model.X)
        self._r: Dict[int, object] = {}

    def g(self, d: int):
        return self.model.density.g_of(d)

    def __call__(self, d: int):
        r = self._r.get(d)
        if r is None:
            A = congruence_sum(self.seq, d)
            r = (Fraction(A) if self.exact else float(A)) - self.g(d) * self.X
            self._r[d] = r
        return r

    def R(self, y: float) -> float:
        """sum over squarefree d < y of tau_3(d) |r_d|."""
        top = math.ceil(y) - 1
        if top < 1:
            return 0.0
        sq = arith.squarefree_up_to(top)
        if self.exact:
            t3 = arith.tau3_table(top)
            return float(sum(int(t3[d]) * abs(self(int(d))) for d in sq))
        dens = self.model.density
        g = dens.g_table(top)[sq]
        A = np.zeros(len(sq))
        inside = sq <= self.seq.n_max
        A[inside] = [congruence_sum(self.seq, int(d)) for d in sq[inside]]
        r = A - g * self.X
        return math.fsum(arith.tau3_table(top)[sq] * np.abs(r))


@dataclass
class Remainders:
    r: Dict[int, object]
    R: float


def remainders(seq: SiftingSequence, model: ApproximationModel, y: float) -> Remainders:
    """r_d for squarefree d < y and R(y) = sum tau_3(d) |r_d|."""
    if y > model.d_max:
        raise ValueError(f"y={y} exceeds model d_max={model.d_max}")
    tab = RemainderTable(seq, model)
    top = math.ceil(y) - 1
    r = {int(d): tab(int(d)) for d in arith.squarefree_up_to(top)} if top >= 1 else {}
    t3 = {d: arith.tau3(d) for d in r}
    R = float(sum(t3[d] * abs(v) for d, v in r.items())) if tab.exact else math.fsum(
        t3[d] * abs(v) for d, v in r.items())
    return Remainders(r, R)


def sift_exact(seq: SiftingSequence, z: int):
    """S(A, z): sum of a_n over n with no prime factor below z."""
    keep = np.ones(len(seq.a), dtype=bool)
    n = seq.numbers()
    for p in arith.primes_below(z):
        keep &= n % p != 0
    return seq._sum(seq.a[keep])


def _rho_sums(seq: SiftingSequence, weights: WeightSet) -> np.ndarray:
    out = np.zeros(len(seq.a))
    for d, r in zip(weights.support, weights.rho):
        r = float(r)
        if r:
            start = -(-seq.n_min // int(d)) * int(d)
            out[start - seq.n_min :: int(d)] += r
    return out


def s_minus_direct(seq: SiftingSequence, weights: WeightSet, z: int) -> float:
    """S^-(A, z) = sum a_n (1 - #{p | n, p < z}) (sum_{d | n} rho_d)^2."""
    omega = np.zeros(len(seq.a), dtype=np.int64)
    for p in arith.primes_below(z):
        p = int(p)
        start = -(-seq.n_min // p) * p
        omega[start - seq.n_min :: p] += 1
    lam = _rho_sums(seq, weights)
    return math.fsum(seq.a * (1 - omega) * lam * lam)


@dataclass
class Decomposition:
    s_minus: float
    XW: float
    script_R: float
    bound_script_R: Optional[float]
    R_Delta2: Optional[float]
    R_zDelta2: Optional[float]
    degraded: bool

    @property
    def bound_holds(self) -> Optional[bool]:
        if self.bound_script_R is None:
            return None
        return abs(self.script_R) <= self.bound_script_R * (1 + 1e-12)

    @property
    def identity_gap(self) -> float:
        return abs(self.s_minus - (self.XW + self.script_R))


def script_R_exact(table: RemainderTable, weights: WeightSet, z: int) -> float:
    """sum rho_{d1} rho_{d2} (r_[d1,d2] - sum_{p<z} r_[p,d1,d2]), grouped by lcm."""
    sq = [int(d) for d in weights.support]
    rho = [float(r) for r in weights.rho]
    grouped: Dict[int, List[float]] = {}
    for i, d1 in enumerate(sq):
        if not rho[i]:
            continue
        for j, d2 in enumerate(sq):
            if rho[j]:
                grouped.setdefault(math.lcm(d1, d2), []).append(rho[i] * rho[j])
    ps = [int(p) for p in arith.primes_below(z)]
    out = []
    for m, prods in grouped.items():
        T = float(table(m)) - math.fsum(float(table(math.lcm(p, m))) for p in ps)
        out.append(math.fsum(prods) * T)
    return math.fsum(out)


def s_minus_decomposed(seq: SiftingSequence, model: ApproximationModel,
                       weights: WeightSet, z: int) -> Decomposition:
    """S^- split as X W + script R, with the remainder bound
    R(Delta^2) + 2 log(Delta) R(z Delta^2)."""
    Delta = weights.Delta
    table = RemainderTable(seq, model)
    s_minus = s_minus_direct(seq, weights, z)
    XW = float(model.X) * float(w_diag(model.density, weights, z))
    top = z * Delta * Delta
    degraded = top > EXACT_SCRIPT_R_BUDGET or top > model.d_max
    if degraded:
        script_R = s_minus - XW
        R1 = R2 = bound = None
        if Delta * Delta <= model.d_max:
            R1 = table.R(Delta * Delta)
    else:
        script_R = script_R_exact(table, weights, z)
        R1 = table.R(Delta * Delta)
        R2 = table.R(top)
        bound = R1 + 2 * math.log(Delta) * R2
    return Decomposition(s_minus, XW, script_R, bound, R1, R2, degraded)


# ---------------------------------------------------------------------------
# the lambda = 1 * chi sequence


def lambda_values(chi: arith.RealCharacter, x: int) -> np.ndarray:
    """lambda(n) = sum_{d | n} chi(d) for n = 0..x (lambda(0) = 0).

    Pairs each divisor d <= sqrt(n) with n/d, so the loop runs to sqrt(x).
    """
    ct = chi.table(x).astype(np.int64)
    lam = np.zeros(x + 1, dtype=np.int64)
    for d in range(1, math.isqrt(x) + 1):
        ks = np.arange(d, x // d + 1)
        lam[d * ks] += ct[d] + ct[ks]
        lam[d * d] -= ct[d]
    return lam


@dataclass
class RdProfile:
    max_ratio: float
    argmax: int
    rows: List[Tuple[int, float, float, float, int, float]] = field(repr=False)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["d", "A_d", "gX", "r_d", "tau3", "ratio"])
            for row in self.rows:
                out.writerow([row[0], *(repr(float(v)) for v in row[1:4]), row[4], repr(row[5])])


def rd_profile(seq: SiftingSequence, model: ApproximationModel, x: int, d_max: int) -> RdProfile:
    """max over squarefree d <= d_max of |r_d| / (tau_3(d) sqrt(x/d))."""
    table = RemainderTable(seq, model)
    rows = []
    best, arg = -1.0, 1
    for d in map(int, arith.squarefree_up_to(d_max)):
        A = congruence_sum(seq, d)
        gX = float(model.density.g_of(d)) * float(model.X)
        r = float(table(d))
        t3 = arith.tau3(d)
        ratio = abs(r) / (t3 * math.sqrt(x / d))
        rows.append((d, float(A), gX, r, t3, ratio))
        if ratio > best:
            best, arg = ratio, d
    return RdProfile(best, arg, rows)


@dataclass
class ExceptionalSequence:
    seq: SiftingSequence
    model: ApproximationModel
    profile: RdProfile
    chi: arith.RealCharacter
    L1: float
    chi_a_warning: bool


def exceptional_sequence(q: int, a: int, x: int, d_max: int = 1000,
                         p_max: Optional[int] = None, mode: str = "float",
                         model_d_max: Optional[int] = None) -> ExceptionalSequence:
    """a_n = lambda(n) for n = a (mod q), 1 <= n <= x, with X = 2 L(1, chi) x / q."""
    chi = arith.RealCharacter.from_modulus(q)
    if math.gcd(a, q) != 1:
        raise ValueError(f"gcd(a, q) = {math.gcd(a, q)} != 1")
    if x < q:
        raise ValueError("need x >= q")
    warn = chi(a) != 1
    if warn:
        warnings.warn(f"chi({a}) = {chi(a)}; the prime-count conclusion needs chi(a) = 1")
    lam = lambda_values(chi, x)
    n = np.arange(x + 1)
    lam[n % q != a % q] = 0
    seq = SiftingSequence(1, x, lam[1:])
    L1 = arith.l_one(chi)
    density = exceptional_density(q, p_max or x, mode, chi=chi)
    X = 2 * L1 * x / q
    model = ApproximationModel(X, density, model_d_max or density.p_max)
    profile = rd_profile(seq, model, x, d_max)
    return ExceptionalSequence(seq, model, profile, chi, L1, warn)
