import csv
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_density
from sievelab import arith
from sievelab.density import DensityError, power_density, sieve_sums, table_density
from sievelab.selberg import (BudgetExceeded, PreconditionError, exact_alpha, lemma_bound, lower_weights,
                              normalization, nu_value, upper_bound, w_diag, w_direct, weights_to_csv,
                              y_from_rho)


def rho_oracle(dens, Delta):
    """rho_l = mu(l) prod_{p|l} (1-g(p))^-1 sum_{(m,l)=1, m <= Delta/l} h(m) log(Delta/(lm)) / H."""
    sq = [d for d in range(1, Delta + 1) if arith.is_squarefree(d)]
    h = {d: math.prod(dens.g_prime(p) / (1 - dens.g_prime(p)) for p in arith.prime_factors(d)) for d in sq}
    H = sum(h[d] * math.log(Delta / d) for d in sq)
    out = {}
    for l in sq:
        unit = math.prod(1 / (1 - dens.g_prime(p)) for p in arith.prime_factors(l))
        s = sum(h[m] * math.log(Delta / (l * m)) for m in sq if m <= Delta // l and math.gcd(m, l) == 1)
        out[l] = arith.mobius(l) * unit * s / H
    return out


def w_oracle(dens, rho, z):
    def g(n):
        return math.prod(dens.g_prime(p) for p in arith.prime_factors(n))
    ps = [p for p in range(2, z) if arith.factorize(p).primes == (p,)]
    total = 0.0
    for d1, r1 in rho.items():
        for d2, r2 in rho.items():
            m = math.lcm(d1, d2)
            total += r1 * r2 * (g(m) - sum(g(math.lcm(p, m)) for p in ps))
    return total


def test_rho_small_case():
    dens = power_density(1, 100)
    ws = lower_weights(dens, 6)
    assert ws.rho_map == pytest.approx({1: 1.0, 2: -0.669370, 3: -0.316744, 5: -0.069429, 6: 0.0}, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 70), st.integers(2, 40))
def test_rho_and_w_against_oracles(seed, Delta, z):
    dens = random_density(random.Random(seed), 70)
    ws = lower_weights(dens, Delta)
    ref = rho_oracle(dens, Delta)
    assert ws.rho_map == pytest.approx(ref, rel=1e-10, abs=1e-12)
    W = w_oracle(dens, ref, z)
    assert w_diag(dens, ws, z) == pytest.approx(W, rel=1e-9, abs=1e-12)
    assert w_direct(dens, ws, z) == pytest.approx(W, rel=1e-9, abs=1e-12)


def test_grouped_direct_matches_diag():
    dens = random_density(random.Random(4), 600)
    ws = lower_weights(dens, 500)
    assert w_direct(dens, ws, 40) == pytest.approx(w_diag(dens, ws, 40), rel=1e-10)


def test_direct_budget():
    dens = power_density(1, 3000)
    with pytest.raises(BudgetExceeded):
        w_direct(dens, lower_weights(dens, 2500), 10)


def test_exact_weights():
    dens = power_density(1, 100, "exact")
    ws = lower_weights(dens, 30)
    assert normalization(dens, ws) == 1
    assert all(b == y.num for b, y in zip(y_from_rho(dens, ws), ws.y))
    assert ws.rho[0] == 1
    assert w_direct(dens, ws, 15) == w_diag(dens, ws, 15)
    fl = lower_weights(dens.with_mode("float"), 30)
    assert [float(r) for r in ws.rho] == pytest.approx(list(fl.rho), rel=1e-12, abs=1e-15)


def test_forward_transform_needs_positive_h():
    dens = table_density([(2, Fraction(1, 3))], 10)
    ws = lower_weights(dens, 6)
    with pytest.raises(PreconditionError):
        y_from_rho(dens, ws)


def test_weight_preconditions():
    with pytest.raises(PreconditionError):
        lower_weights(power_density(1, 10), 1)
    with pytest.raises(DensityError):
        lower_weights(power_density(1, 10), 20)
    # g = 0 leaves only h(1) = 1, so rho_l = mu(l) log(Delta/l) / log(Delta)
    ws = lower_weights(table_density([], 10, "float"), 8)
    ref = [arith.mobius(int(l)) * math.log(8 / l) / math.log(8) for l in ws.support]
    assert list(ws.rho) == pytest.approx(ref)


def test_exact_alpha_and_nu():
    assert exact_alpha(2, 8) == Fraction(1, 3)
    assert exact_alpha(27, 27**3) == Fraction(1, 3)
    assert exact_alpha(2, 10) is None
    assert nu_value(Fraction(0), Fraction(1, 3)) == Fraction(1, 2)
    assert nu_value(0.25, 1 / 3) == pytest.approx(0.25)


def test_lemma_toy_and_preconditions():
    rep = lemma_bound(power_density(1, 100), 2, 6, 8)
    assert rep.lower_bound_H2W == pytest.approx(-0.518081, abs=1e-6)
    with pytest.raises(PreconditionError):
        lemma_bound(power_density(1, 100), 3, 6, 8)
    with pytest.raises(PreconditionError):
        lemma_bound(power_density(1, 100), 2, 2, 8)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([8, 16, 64, 100]), st.integers(110, 300))
def test_theorem_bound_when_assumptions_hold(seed, Delta, z):
    """g supported on {2} and on primes above Delta: J(2, Delta) = 0, so A2 holds."""
    rng = random.Random(seed)
    rows = [(2, Fraction(rng.randint(1, 9), 10))]
    rows += [(p, Fraction(rng.randint(0, 3), 100 * p)) for p in map(int, arith.primes_up_to(z)) if p > Delta]
    dens = table_density(rows, max(Delta, z), "float")
    rep = lemma_bound(dens, 2, z, Delta, a1_pass=True, a2_pass=True)
    W = w_diag(dens, lower_weights(dens, Delta), z)
    assert rep.H**2 * W >= rep.lower_bound_H2W - 1e-12
    if rep.jw_bound is not None:
        assert rep.J_full * W >= rep.jw_bound - 1e-12


def test_upper_bound_uses_sifting_range():
    dens = power_density(1, 200)
    ub = upper_bound(dens, 100, 10, 1000.0, 3.0)
    s = sieve_sums(dens, 100, 2, 10)
    assert ub.J == pytest.approx(s.J_Pz) and ub.bound == pytest.approx(1000 / s.J_Pz + 3)
    assert s.J_Pz < s.J_full


def test_weights_csv(tmp_path):
    dens = power_density(1, 100)
    ws = lower_weights(dens, 30)
    f = tmp_path / "w.csv"
    weights_to_csv(ws, f)
    rows = list(csv.DictReader(open(f)))
    assert [int(r["d"]) for r in rows] == ws.support.tolist()
    assert [float(r["rho_d"]) for r in rows] == list(ws.rho)
