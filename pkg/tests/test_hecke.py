import pytest

from mulab.hecke import (congruence_exponent, congruence_modulus, congruent_classes_mod_p,
                         hecke_algebra)
from mulab.modsym import new_subspace, newform_packets, plus_space
from mulab.numtheory import prime_divisors


@pytest.mark.parametrize("N1,N2", [(11, 1), (37, 1), (1, 37), (30, 1), (15, 2), (1, 30)])
def test_rank_equals_dimension(N1, N2):
    T = hecke_algebra(N1, N2)
    assert T.rank == new_subspace(plus_space(N1 * N2), N2).cols
    assert T.contains_identity()


@pytest.mark.parametrize("N,expected", [(11, [1]), (37, [2, 2]), (91, [4, 4]), (143, [4])])
def test_congruence_moduli(N, expected):
    fs = newform_packets(plus_space(N), N)
    assert sorted(congruence_modulus(f, N, 1) for f in fs) == expected


@pytest.mark.parametrize("N,p", [(37, 2), (91, 2), (143, 2), (210, 2), (46, 5), (106, 5),
                                 (141, 7), (11, 5), (11, 7)])
def test_exponent_matches_mod_p_oracle(N, p):
    for f in newform_packets(plus_space(N), N):
        e = congruence_exponent(f, N, 1, p).exponent
        assert (e > 0) == (congruent_classes_mod_p(f, N, 1, p) > 0)


def test_exponent_independent_of_basis_order():
    (f, *_) = newform_packets(plus_space(66), 66)
    T = hecke_algebra(66, 1)
    r = T.rank
    base = congruence_exponent(f, 66, 1, 2).exponent
    for order in (tuple(reversed(range(r))), tuple(range(1, r)) + (0,)):
        assert congruence_exponent(f, 66, 1, 2, order=order).exponent == base


def test_structure_constants_are_integral():
    T = hecke_algebra(37, 1)
    c = T.structure_constants()
    assert all(isinstance(x, int) for a in c for b in a for x in b)


def test_level_mismatch_rejected():
    (f,) = newform_packets(plus_space(11), 11)
    with pytest.raises(ValueError):
        congruence_exponent(f, 11, 2, 5)
