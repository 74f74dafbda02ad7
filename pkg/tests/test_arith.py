import pytest
from hypothesis import given
from hypothesis import strategies as st

from mulab.arith import (EllipticCurveModel, NotOrdinary, NotSemistable, ap, check_cr,
                         conductor, division_polynomial, minimal_discriminant, minimal_model,
                         quadratic_field, split_level, tamagawa_exponent,
                         trivial_character_prediction, unit_root)
from mulab.numtheory import primes_up_to

E11 = EllipticCurveModel(0, -1, 1, -10, -20)
E37 = EllipticCurveModel(0, 0, 1, -1, 0)


def test_curve_11a():
    assert minimal_discriminant(E11) == -161051
    assert conductor(E11) == 11
    assert [ap(E11, l) for l in (2, 3, 5, 7, 11, 13)] == [-2, -1, 1, -2, 1, 4]


def test_minimal_model_of_scaled_equation():
    # 11a with x -> 4x, y -> 8y: a_i scaled by 2^i after completing the square
    E = EllipticCurveModel(0, -4, 8, -160, -1280)
    M = minimal_model(E)
    assert M.discriminant == -161051
    assert conductor(E) == 11


def test_additive_reduction_rejected():
    with pytest.raises(NotSemistable):
        conductor(EllipticCurveModel(0, 0, 0, -1, 0))    # conductor 32


@pytest.mark.parametrize("l", primes_up_to(50))
def test_hasse_bound(l):
    for E in (E11, E37):
        assert ap(E, l) ** 2 <= 4 * l


def test_tamagawa_exponents():
    assert tamagawa_exponent(E11, 11, 5).t == 1
    assert tamagawa_exponent(E11, 11, 7).t == 0
    assert tamagawa_exponent(E11, 13, 7).t == 0


def test_split_level_examples():
    K = quadratic_field(-3)
    s = split_level(14, K)
    assert (s.Nplus, s.Nminus, s.parity) == (7, 2, "odd")
    s = split_level(55, K)
    assert s.Nminus == 55 and not s.definite and "indefinite" in s.note


def test_split_level_rejects_shared_prime():
    with pytest.raises(ValueError):
        split_level(21, quadratic_field(-3))


def test_cr_examples():
    r5 = check_cr(E11, 11, 5)
    assert r5.verdict == "fails" and r5.surjective == "not surjective"
    r7 = check_cr(E11, 11, 7)
    assert r7.verdict == "holds" and r7.surjective == "surjective"
    assert check_cr(E37, 37, 5).holds


def test_division_polynomial_degree():
    f5 = division_polynomial(E37.ainvs, 5)
    assert f5.degree() == 12
    assert division_polynomial(E37.ainvs, 7).degree() == 24


@given(st.sampled_from([5, 7, 11, 13]), st.integers(-20, 20), st.integers(1, 6))
def test_unit_root_is_root(p, a, m):
    if a % p == 0:
        with pytest.raises(NotOrdinary):
            unit_root(a, p, m)
        return
    x = unit_root(a, p, m)
    pm = p ** m
    assert (x * x - a * x + p) % pm == 0 and (x - a) % p == 0


def test_unit_root_example():
    assert unit_root(-2, 7, 3) == 222


def test_trivial_character_prediction():
    K = quadratic_field(-3)
    mn, gr = trivial_character_prediction(E11, K, 7, 1)
    # p = 7 splits in Q(sqrt -3), |E(F_7)| = 10: no 7-torsion; t(11) = 0
    assert (mn, gr) == (0, 0)
    with pytest.raises(ValueError):
        trivial_character_prediction(E11, K, 7, 0)
