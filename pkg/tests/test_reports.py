import json
import math
from fractions import Fraction

import pytest

from conftest import rigged_instance
from sievelab import arith
from sievelab.density import power_density
from sievelab.reports import (CorollaryError, RunReport, V_q, corollary_run, emit_report, parse_report,
                              prop51_run, v_relation)
from sievelab.sequences import ApproximationModel, SiftingSequence

FIELDS = ["config", "sums", "weights_diag", "assumptions", "W", "nu", "main_term", "remainder",
          "exact_counts", "gates", "conclusion", "timing_ms"]


@pytest.fixture(scope="module")
def rigged_report():
    return prop51_run(*rigged_instance(), 2, 10**4)


def test_field_names_and_order(rigged_report):
    assert list(rigged_report.to_dict()) == FIELDS


def test_roundtrip(rigged_report, tmp_path):
    cor = corollary_run(5, 1, 10**5, 0.99)
    for rep in (rigged_report, cor):
        f = tmp_path / "r.json"
        emit_report(rep, f)
        back = parse_report(f.read_text())
        assert back.to_dict() == rep.to_dict()
        assert parse_report(back.to_json()).to_json() == rep.to_json()


def test_exit_codes(rigged_report, tmp_path):
    assert emit_report(rigged_report, tmp_path / "ok.json") == 0
    hyp = corollary_run(3, 1, 10**6, 0.9)
    assert emit_report(hyp, tmp_path / "hyp.json") == 2
    assert emit_report(RunReport(conclusion={"status": "hypothetical"}), None) == 2
    assert emit_report(rigged_report, tmp_path / "missing" / "dir" / "r.json") == 1
    bad = RunReport(W={"diag": math.nan})
    assert emit_report(bad, tmp_path / "nan.json") == 1


def test_rigged_conclusion(rigged_report):
    r = rigged_report
    assert r.conclusion["status"] == "verified"
    assert r.nu["value"] == pytest.approx(0.5)
    assert r.main_term["quarter_XV"] == 1.0 and r.remainder["R"] == 0
    assert all(v["pass"] for v in r.assumptions.values())


def test_prop51_not_applicable_when_assumption_fails():
    x = 10**4
    dens = power_density(1, x)
    rep = prop51_run(dens, SiftingSequence.unit(x), ApproximationModel(x, dens, x), 2, x)
    assert rep.conclusion["status"] == "not_applicable" and rep.exit_code == 2
    assert "A3" in rep.conclusion["failed"]


def test_prop51_lambda_smoke():
    """Pipeline run on the lambda sequence for q = 3, x = 10^6, w = 27."""
    from sievelab.sequences import exceptional_sequence
    es = exceptional_sequence(3, 1, 10**6, d_max=10)
    rep = prop51_run(es.model.density, es.seq, es.model, 27, 10**6)
    assert rep.remainder["status"] == "over_budget"
    assert not rep.assumptions["A3"]["pass"]
    assert rep.conclusion["applicable"] is False and rep.exit_code == 2
    assert rep.exact_counts["sum_a_p"] == 78302
    assert rep.main_term["quarter_XV"] == pytest.approx(14176.683, rel=1e-6)
    rep.check_finite()


def test_corollary_gates_arithmetic():
    rep = corollary_run(3, 1, 10**6, 0.9)
    g = rep.gates
    assert g["beta_1_24"]["lhs"] == pytest.approx(0.1 * math.log(3))
    assert not g["x_ge_q43"]["pass"] and rep.conclusion["status"] == "range_violation"
    assert rep.exact_counts["pi_x_q_a"] == arith.count_primes_in_progression(10**6, 3, 1)
    near = corollary_run(3, 1, 3**43, 1 - 1e-6, count_limit=0, with_v_relation=False)
    assert all(v["pass"] for v in near.gates.values())
    assert near.conclusion["status"] == "hypothetical" and near.exit_code == 2
    beta_only = corollary_run(3, 1, 3**43, 0.9, count_limit=0, with_v_relation=False)
    assert beta_only.conclusion["status"] == "range_violation"


def test_corollary_errors():
    with pytest.raises(CorollaryError):
        corollary_run(3, 2, 1000, 0.9)
    with pytest.raises(ValueError):
        corollary_run(3, 1, 1000, 1.0)
    with pytest.raises(ValueError):
        corollary_run(3, 1, 1000, 0.0)


def test_v_q_direct_product():
    chi = arith.RealCharacter.from_modulus(5)
    ref = Fraction(1)
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23):
        ref *= (1 - Fraction(1, p)) * (1 - Fraction(chi(p), p))
    assert V_q(chi) == pytest.approx(float(ref), rel=1e-14)
    assert 0 < V_q(chi) < 1


def test_v_relation_recorded():
    for q in (3, 5):
        rel = v_relation(q)
        assert rel["method"] == "exact" and rel["V"] > 0 and math.isfinite(rel["ratio"])
    assert v_relation(11, limit=10**6)["method"] == "estimated"
