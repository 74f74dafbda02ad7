from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mulab.numtheory import prime_divisors, primes_up_to
from mulab.quaternion import (Lattice, eichler_order, hilbert_symbol, maximal_order,
                              quaternion_algebra, ramified_primes)

nonzero = st.integers(-60, 60).filter(bool)


@given(nonzero, nonzero)
def test_hilbert_product_formula(a, b):
    places = [-1] + list(primes_up_to(200))
    prod = 1
    for v in places:
        prod *= hilbert_symbol(a, b, v)
    # every prime dividing 2ab is below 200 here
    assert prod == 1


@given(nonzero, nonzero)
def test_hilbert_symmetry_and_square(a, b):
    for v in (-1, 2, 3, 5, 7):
        assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)
        assert hilbert_symbol(a, -a, v) == 1


@pytest.mark.parametrize("D", [2, 3, 5, 7, 11, 13, 17, 41, 30, 42, 66, 105])
def test_maximal_order_discriminant(D):
    alg = quaternion_algebra(D)
    assert prime_divisors(D) == ramified_primes(alg.a, alg.b)
    O = maximal_order(alg)
    assert O.is_order() and O.discriminant() == D


@pytest.mark.parametrize("Nminus,Nplus", [(11, 3), (11, 15), (2, 11), (3, 7)])
def test_eichler_order_discriminant(Nminus, Nplus):
    E = eichler_order(quaternion_algebra(Nminus), Nplus)
    assert E.is_order() and E.discriminant() == Nminus * Nplus


@given(st.lists(st.integers(-5, 5), min_size=12, max_size=12))
def test_nrd_is_multiplicative(c):
    alg = quaternion_algebra(7)
    x, y, z = (tuple(Fraction(v) for v in c[i:i + 4]) for i in (0, 4, 8))
    assert alg.nrd(alg.mul(x, y)) == alg.nrd(x) * alg.nrd(y)
    assert alg.mul(alg.mul(x, y), z) == alg.mul(x, alg.mul(y, z))
    assert alg.mul(x, alg.conj(x))[0] == alg.nrd(x)


def test_right_ideal_norm_and_orders():
    alg = quaternion_algebra(11)
    O = maximal_order(alg)
    I = O.scale(3)
    assert I.norm() == 9      # nrd(3)
    assert I.left_order() == O and I.right_order() == O


def test_indefinite_algebra_rejected():
    with pytest.raises(ValueError):
        quaternion_algebra(6)      # two ramified primes: indefinite
