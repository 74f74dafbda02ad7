from hypothesis import given
from hypothesis import strategies as st
import math

from mulab.numtheory import (crt, divisors, euler_phi, factor, is_fundamental_discriminant,
                             is_prime, is_squarefree, kronecker, primes_up_to, sqrt_mod_prime)


@given(st.integers(1, 10**6))
def test_factor_roundtrip(n):
    f = factor(n)
    assert math.prod(p ** e for p, e in f.items()) == n
    assert all(is_prime(p) for p in f)


def test_primes_up_to():
    assert primes_up_to(30) == (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


@given(st.integers(1, 2000))
def test_phi_and_divisors(n):
    assert sum(euler_phi(d) for d in divisors(n)) == n


@given(st.sampled_from(primes_up_to(200)[1:]), st.integers(0, 10**4))
def test_kronecker_is_legendre(p, a):
    e = pow(a, (p - 1) // 2, p)
    assert kronecker(a, p) == (0 if a % p == 0 else (1 if e == 1 else -1))


@given(st.sampled_from(primes_up_to(500)[1:]), st.integers(1, 10**4))
def test_sqrt_mod_prime(p, a):
    r = sqrt_mod_prime(a, p)
    if kronecker(a, p) == -1:
        assert r is None
    else:
        assert (r * r - a) % p == 0


def test_fundamental_discriminants():
    assert [d for d in range(-45, 0) if is_fundamental_discriminant(d)] == \
        [-43, -40, -39, -35, -31, -24, -23, -20, -19, -15, -11, -8, -7, -4, -3]


def test_crt_and_squarefree():
    assert crt([2, 3], [5, 7]) == 17
    assert is_squarefree(210) and not is_squarefree(12)
