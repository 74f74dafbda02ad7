import pytest

from mulab.arith import EllipticCurveModel, ap, quadratic_field
from mulab.verify import (admissible_primes, consistency_triangle, curve_packet,
                          greenberg_mu_prediction, level_lowering_all_orders,
                          verify_level_lowering, verify_mu_main_conjecture)

E11 = EllipticCurveModel(0, -1, 1, -10, -20)
E46 = EllipticCurveModel(1, -1, 0, -10, -12)
E174 = EllipticCurveModel(1, 1, 0, -56, -192)


def test_mu_identity_level_11():
    r = verify_mu_main_conjecture(E11, quadratic_field(-3), 7)
    assert r.verdict == "pass" and r.lhs == r.rhs == 0
    assert r.details["ord_eta_N"] == r.details["ord_xi"]
    assert set(r.to_json()) == {"statement", "anchors", "inputs", "hypotheses", "lhs", "rhs",
                                "verdict", "details"}


def test_cr_failure_is_skipped():
    r = verify_mu_main_conjecture(E11, quadratic_field(-3), 5)
    assert r.verdict == "skipped" and r.lhs is None
    cr = [h for h in r.hypotheses if h.name.startswith("CR")]
    assert cr and cr[0].verdict == "fails" and "division polynomial" in cr[0].evidence


def test_even_parity_is_skipped():
    r = verify_mu_main_conjecture(E46, quadratic_field(-3), 5)
    assert r.verdict == "skipped"
    assert any("indefinite" in h.evidence for h in r.hypotheses)


def test_positive_tamagawa_triple():
    r = verify_mu_main_conjecture(E46, quadratic_field(-11), 5)
    assert r.verdict == "pass" and r.rhs == 1
    g = greenberg_mu_prediction(E46, quadratic_field(-11), 5)
    assert (g.mu_minimal, g.mu_greenberg) == (0, r.rhs)


def test_greenberg_gates():
    assert greenberg_mu_prediction(E11, quadratic_field(-3), 5).verdict == "skipped"
    g = greenberg_mu_prediction(E11, quadratic_field(-3), 7)
    assert (g.mu_minimal, g.mu_greenberg) == (0, 0)
    # +/- mode needs a_p = 0
    assert greenberg_mu_prediction(E11, quadratic_field(-3), 7, mode="pm").verdict == "skipped"


def test_level_lowering_with_positive_t():
    reps = level_lowering_all_orders(E174, [2, 3, 29], 13)
    assert len(reps) == 6 and all(r.verdict == "pass" for r in reps)
    assert {r.lhs for r in reps} == {1}
    steps = reps[0].details["steps"]
    assert sum(s["t"] for s in steps) == 1


def test_level_lowering_needs_two_ramified_primes():
    r = verify_level_lowering(E46, [2], 5)
    assert r.verdict == "skipped"


def test_admissible_primes():
    K = quadratic_field(-3)
    n1 = admissible_primes(E11, K, 7, 1, 100)
    n2 = admissible_primes(E11, K, 7, 2, 400)
    assert n1
    for x in n1:
        l = x.ell
        assert l % 7 not in (1, 6)
        assert K.splitting(l) == "inert" and (11 * 7 * 3) % l
        assert (l + 1 - x.eps * ap(E11, l)) % 7 == 0
    assert {x.ell for x in n2 if x.ell <= 100} <= {x.ell for x in n1}
    # brute-force oracle
    brute = [l for l in range(2, 101) if all(l % d for d in range(2, l)) and l not in (3, 7, 11)
             and l % 3 == 2 and (l * l - 1) % 7 and ((l + 1 - ap(E11, l)) % 7 == 0
                                                   or (l + 1 + ap(E11, l)) % 7 == 0)]
    assert [x.ell for x in n1] == brute


def test_consistency_triangle():
    r = consistency_triangle(E11, quadratic_field(-3), 7)
    assert r.verdict == "pass" and r.details["unit_pairing"]


def test_curve_packet_mismatch():
    f = curve_packet(E11)
    assert f.level == 11
