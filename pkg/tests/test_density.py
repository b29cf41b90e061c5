import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_density
from sievelab import arith
from sievelab.density import (DensityError, G_of_w, V_of, delta_wz, exceptional_density,
                              load_table_csv, make_density, power_density, sieve_sums, table_density)


def brute_sums(gp, Delta, w, z, u):
    """Every scalar sum from its definition, over squarefree d <= Delta."""
    def gh(d):
        g = h = Fraction(1)
        for p in arith.prime_factors(d):
            g *= gp[p]
            h *= gp[p] / (1 - gp[p])
        return g, h
    out = dict(H=0.0, J_full=0.0, J_Pz=0.0, J_range=0.0, K=0.0, K_of_u=0.0, K_w2=0.0, K_window=0.0)
    for d in range(1, Delta + 1):
        if not arith.is_squarefree(d):
            continue
        h = float(gh(d)[1])
        L = math.log(Delta / d)
        out["H"] += h * L
        out["J_full"] += h
        if all(p < z for p in arith.prime_factors(d)):
            out["J_Pz"] += h
        if d > w:
            out["J_range"] += h
        out["K"] += h * L * L
        if d <= u:
            out["K_of_u"] += h * L * L
        if d <= w * w:
            out["K_w2"] += h * L * L
        else:
            out["K_window"] += h * L * L
    out["G_of_w"] = sum(float(gp[p]) * math.log(p) ** 2 for p in gp if p <= w)
    out["delta"] = sum(float(gp[p]) for p in gp if w < p <= z)
    out["V_of_z"] = math.prod(1 - float(gp[p]) for p in gp if p < z)
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(4, 120), st.integers(2, 10), st.integers(2, 60))
def test_float_sums_match_definitions(seed, Delta, w, z):
    dens = random_density(random.Random(seed), 120)
    gp = {p: dens.g_prime(p) for p in map(int, arith.primes_up_to(120))}
    gp = {p: Fraction(v) for p, v in gp.items()}
    u = max(1, Delta // 2)
    s = sieve_sums(dens, Delta, w, z, u)
    ref = brute_sums(gp, Delta, w, z, u)
    for k, v in ref.items():
        assert getattr(s, k) == pytest.approx(v, rel=1e-12, abs=1e-12), k


def test_exact_matches_float():
    dens = random_density(random.Random(5), 60, mode="exact")
    se = sieve_sums(dens, 60, 3, 20, 30)
    sf = sieve_sums(dens.with_mode("float"), 60, 3, 20, 30)
    for k, v in sf.as_dict().items():
        assert getattr(se, k) == pytest.approx(v, rel=1e-12, abs=1e-14), k
    ex = se.exact
    assert ex["K_w2"] + ex["K_window"] == ex["K"]


def test_known_values():
    dens = power_density(1, 100, "exact")
    s = sieve_sums(dens, 6, 2, 6)
    assert s.J_full == pytest.approx(3.25)
    assert s.H == pytest.approx(math.log(6) + math.log(3) + 0.5 * math.log(2) + 0.25 * math.log(6 / 5), rel=1e-12)
    assert V_of(dens, 10) == Fraction(8, 35)
    assert delta_wz(dens, 10, 100) == sum(Fraction(1, int(p)) for p in arith.primes_up_to(100) if p > 10)


def test_exceptional_values():
    d = exceptional_density(3, 100, "exact")
    assert d.g_prime(3) == 0
    assert d.g_prime(7) == Fraction(13, 49)
    assert d.gh(2) == (Fraction(1, 4), Fraction(1, 3))
    assert d.g_prime(5) == Fraction(1, 25)
    assert delta_wz(d, 2, 10) == Fraction(374, 1225)
    assert d.character.q == 3
    # g(p) p stays in [1/p, 2 - 1/p]
    for p in map(int, arith.primes_up_to(100)):
        if p != 3:
            assert Fraction(1, p) <= d.g_prime(p) * p <= 2


def test_density_rejects_g_at_least_one():
    with pytest.raises(DensityError):
        table_density([(2, Fraction(1))], 10)
    with pytest.raises(DensityError):
        table_density([(3, Fraction(-1, 5))], 10)


def test_coverage_and_parameter_errors():
    dens = power_density(1, 50)
    with pytest.raises(DensityError):
        sieve_sums(dens, 100, 2, 10)
    with pytest.raises(DensityError):
        sieve_sums(dens, 30, 2, 10, u=40)
    with pytest.raises(DensityError):
        make_density("bogus", 10)


def test_mult_tables_are_multiplicative():
    dens = random_density(random.Random(9), 200)
    g = dens.g_table(200)
    h = dens.h_table(200)
    for d in map(int, arith.squarefree_up_to(200)):
        ps = arith.prime_factors(d)
        assert g[d] == pytest.approx(math.prod(dens.g_prime(p) for p in ps))
        assert h[d] == pytest.approx(math.prod(dens.g_prime(p) / (1 - dens.g_prime(p)) for p in ps))


def test_table_csv_roundtrip(tmp_path):
    f = tmp_path / "g.csv"
    f.write_text("p,g_num,g_den\n2,1,3\n5,2,7\n")
    d = load_table_csv(f, 10)
    assert d.mode == "exact" and d.g_prime(5) == Fraction(2, 7) and d.g_prime(3) == 0
    f2 = tmp_path / "gf.csv"
    f2.write_text("p,g\n2,0.25\n")
    assert load_table_csv(f2, 10).mode == "float"
    assert float(G_of_w(d, 2)) == pytest.approx(math.log(2) ** 2 / 3)
