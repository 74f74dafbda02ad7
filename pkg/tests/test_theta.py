from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mulab.arith import EllipticCurveModel, ap, quadratic_field, split_level, unit_root
from mulab.brandt import _unit_count, definite_eigenvector, ideal_class_module
from mulab.forms import compose
from mulab.kernels import quad_values, short_vectors
from mulab.numtheory import kronecker, prime_divisors
from mulab.theta import (HeegnerViolation, InvariantPair, ThetaElement, _coprime_rep, _down,
                         corestriction, group_ring_mul, gross_points, lambda_p, mu_lambda,
                         mu_lambda_poly, norm_relation_check, omega_factors, project,
                         ring_class_group, theta_element, theta_elements, to_power_series, xi)
from mulab.verify import curve_packet

E11 = EllipticCurveModel(0, -1, 1, -10, -20)


def setup(E, D):
    K = quadratic_field(D)
    f = curve_packet(E)
    s = split_level(f.level, K)
    M = ideal_class_module(s.Nplus, s.Nminus)
    return K, M, definite_eigenvector(M, f)


# ring class groups -----------------------------------------------------------

@pytest.mark.parametrize("D,p", [(-3, 5), (-3, 7), (-19, 5), (-11, 7), (-8, 5), (-43, 11)])
def test_ring_class_numbers_and_labels(D, p):
    K = quadratic_field(D)
    for m in range(4):
        G = ring_class_group(K, p, m)
        if m:
            assert G.order == K.h * p ** (m - 1) * (p - kronecker(D, p)) // K.u
        q = G.quotient_order
        # the labels form a surjective homomorphism onto Z/q
        assert sorted(set(G.labels.values())) == list(range(q))
        fs = G.forms[:6]
        for f in fs:
            for g in fs:
                assert G.labels[compose(f, g)] == (G.labels[f] + G.labels[g]) % q


@pytest.mark.parametrize("D,p", [(-3, 7), (-19, 5)])
def test_labels_compatible_down_the_tower(D, p):
    K = quadratic_field(D)
    for m in (2, 3):
        hi, lo = ring_class_group(K, p, m), ring_class_group(K, p, m - 1)
        for f in hi.forms:
            g = _down(_coprime_rep(f, p), p)
            assert lo.labels[g] == hi.labels[f] % lo.quotient_order


# Gross points ------------------------------------------------------------------

def test_layer_zero_level_11():
    K, M, g = setup(E11, -3)
    G = gross_points(M, K, 7, 0)
    assert len(G) == 1 and G.labels == (0,)
    th = theta_element(G, g)
    assert th.layer == 0 and len(th.coeffs) == 1
    assert th.coeffs[0] ** 2 > 0


@pytest.mark.parametrize("N,ai,D", [(11, (0, -1, 1, -10, -20), -3), (14, (1, 0, 1, -1, 0), -19),
                                    (46, (1, -1, 0, -10, -12), -11), (62, (1, -1, 1, -1, 1), -3)])
def test_embedding_count_oracle(N, ai, D):
    # sum_i |Emb(O_K, O_i)| |O_K^x| / |O_i^x| = h_K 2^omega(N) under the Heegner hypothesis
    K, M, _ = setup(EllipticCurveModel(*ai), D)
    t, n = (0, -D // 4) if D % 4 == 0 else (1, (1 - D) // 4)
    total = Fraction(0)
    for I in M.ideals:
        O = I.left_order()
        Gm = np.array(O.scaled_gram(1), dtype=np.int64)
        X = short_vectors(Gm, n)
        c = sum(1 for r in X[quad_values(Gm, X) == n] if 2 * O.element([int(v) for v in r])[0] == t)
        total += Fraction(c * {-3: 6, -4: 4}.get(D, 2), _unit_count(O))
    assert total == K.h * 2 ** len(prime_divisors(N))
    # and the Gross point of conductor 1 sits on a class with an embedding
    assert len(gross_points(M, K, 5 if N != 46 else 7, 0)) == K.h


def test_gross_points_are_free_orbits():
    K, M, _ = setup(E11, -3)
    for m in (1, 2, 3):
        G = gross_points(M, K, 7, m)
        assert len(G) == ring_class_group(K, 7, m).order
        assert len(set(G.forms)) == len(G)


def test_heegner_violation():
    K = quadratic_field(-7)           # 11 splits in Q(sqrt -7)
    M = ideal_class_module(1, 11)
    with pytest.raises(HeegnerViolation):
        gross_points(M, K, 5, 1)
    with pytest.raises(HeegnerViolation):
        gross_points(M, quadratic_field(-3), 11, 1)


# theta elements ----------------------------------------------------------------

def test_involution():
    K, M, g = setup(E11, -3)
    th = theta_elements(M, K, 7, g)[2]
    inv = th.involution()
    assert inv.involution() == th
    q = th.order
    assert all(inv.coeffs[k] == th.coeffs[(-k) % q] for k in range(q))
    assert sorted(inv.coeffs) == sorted(th.coeffs)
    assert mu_lambda(inv, 3).mu == mu_lambda(th, 3).mu


SUPERSINGULAR = [((1, 0, 1, -1, 0), 5, -19), ((0, 1, 1, -3, 1), 5, -19), ((1, -1, 1, -1, 1), 7, -3)]


@pytest.mark.parametrize("ai,p,D", SUPERSINGULAR)
def test_supersingular_norm_relation(ai, p, D):
    E = EllipticCurveModel(*ai)
    assert ap(E, p) == 0
    K, M, g = setup(E, D)
    th = theta_elements(M, K, p, g)
    assert norm_relation_check((th[2], th[0]), "supersingular")
    # the relation fails if theta_0 is replaced by something else
    bad = ThetaElement(0, p, (th[0].coeffs[0] + 1,), th[0].packet, 1)
    assert not norm_relation_check((th[2], bad), "supersingular")
    # theta_2 is divisible by xi_1 = omega_2^-
    pm = mu_lambda(th[2], 3, pm=True)
    assert pm.mu == 0


def test_supersingular_identity_by_construction():
    # replacing pi(theta_2) by -xi_1 * lift(theta_0) satisfies the relation trivially
    p = 5
    th0 = ThetaElement(0, p, (3,), "x", 1)
    lift = corestriction(th0.coeffs, p ** 2)
    th2 = ThetaElement(2, p, tuple(-c if k < p else 0 for k, c in enumerate(lift)), "x", 3)
    assert project(th2.coeffs, p) == tuple(-c for c in corestriction(th0.coeffs, p))
    assert norm_relation_check((th2, th0), "supersingular")


@pytest.mark.parametrize("ai,p,D", [((0, -1, 1, -10, -20), 7, -3), ((0, -1, 1, -10, -20), 13, -3),
                                    ((1, 0, 1, -1, 0), 13, -19)])
def test_ordinary_compatibility(ai, p, D):
    E = EllipticCurveModel(*ai)
    K, M, g = setup(E, D)
    th = theta_elements(M, K, p, g)
    alpha = unit_root(ap(E, p), p, 2)
    assert norm_relation_check((th[2], th[1], th[0]), "ordinary", alpha, 2)
    wrong = (alpha + p) % p ** 2
    assert not norm_relation_check((th[2], th[1], th[0]), "ordinary", wrong, 2)


def test_incompatible_layers_rejected():
    K, M, g = setup(E11, -3)
    th = theta_elements(M, K, 7, g)
    with pytest.raises(ValueError):
        norm_relation_check((th[2], th[1]), "supersingular")


# omega factors and mu/lambda -----------------------------------------------------

def test_omega_factors():
    p = 5
    plus, minus = omega_factors(p, 2)
    assert plus == xi(p, 2, 2) and minus == xi(p, 1, 2)
    plus, minus = omega_factors(p, 1)
    assert plus == (1,) + (0,) * 4 and minus == xi(p, 1, 1)
    for k in (1, 2):
        assert sum(xi(p, k, 2)) == p


@pytest.mark.parametrize("p,k", [(5, 1), (5, 2), (7, 1), (7, 2)])
def test_xi_is_cyclotomic(p, k):
    import flint
    f = to_power_series(xi(p, k, 2))
    x = flint.fmpz_poly([1, 1])    # 1 + T
    phi = sum((x ** (j * p ** (k - 1)) for j in range(p)), flint.fmpz_poly(0))
    assert f == phi


def test_mu_lambda_examples():
    assert mu_lambda_poly([5, 5, 1, 25], 5, 3).mu == 0
    r = mu_lambda_poly([5, 10, 15], 5, 1)
    assert not r.mu_exact and r.describe()["mu"] == ">= 1"
    r = mu_lambda_poly([5, 5, 0, 1], 5, 4)
    assert (r.mu, r.lam) == (0, 3)
    assert mu_lambda_poly([25, 50], 5, 4) == InvariantPair(2, True, 0, 4)


@given(st.lists(st.integers(-30, 30), min_size=25, max_size=25), st.sampled_from([0, 1]))
def test_mu_of_omega_times_x(c, which):
    p = 5
    if all(v % p == 0 for v in c):
        c[0] += 1
    w = omega_factors(p, 2)[which]
    y = group_ring_mul(w, tuple(c))
    th = ThetaElement(2, p, y, "x", 3)
    assert mu_lambda(th, 4).mu == mu_lambda(ThetaElement(2, p, tuple(c), "x", 3), 4).mu == 0


@given(st.lists(st.integers(-30, 30), min_size=7, max_size=7), st.integers(0, 2))
def test_lambda_p_doubles_mu(c, e):
    p = 7
    if all(v % p == 0 for v in c):
        c[0] += 1
    th = ThetaElement(1, p, tuple(p ** e * v for v in c), "x", 2)
    sq = lambda_p(th)
    assert mu_lambda_poly([int(x) for x in to_power_series(sq).coeffs()], p, 8).mu == 2 * e


def test_lambda_stability_rule():
    th1 = ThetaElement(1, 5, (1, 0, 0, 0, 0), "x", 2)       # 1 + 0T: lambda 0
    th2 = ThetaElement(2, 5, tuple([5] + [0] * 24), "x", 3)
    r = mu_lambda(th2, 3, previous=th1)
    assert r.lam is None
