from fractions import Fraction

import pytest

from mulab.brandt import (brandt_matrix, class_index, definite_eigenvector, eichler_mass,
                          freeness_check, ideal_class_module, jacquet_langlands_check,
                          unit_pairing_check, xi_exponent)
from mulab.linalg import IntMatrix
from mulab.modsym import newform_packets, plus_space

CASES = [(1, 2), (1, 11), (1, 37), (3, 11), (1, 30), (2, 13), (5, 7), (7, 2)]


@pytest.mark.parametrize("Np,Nm", CASES)
def test_mass_formula(Np, Nm):
    M = ideal_class_module(Np, Nm)
    assert sum(Fraction(1, w) for w in M.weights) == eichler_mass(Np, Nm)


@pytest.mark.parametrize("Np,Nm", CASES)
def test_brandt_columns_and_symmetry(Np, Nm):
    M = ideal_class_module(Np, Nm)
    h = M.class_number
    for l in (3, 5, 11, 13):
        if (Np * Nm) % l == 0:
            continue
        B = brandt_matrix(M, l)
        assert all(sum(B.column(j)) == l + 1 for j in range(h))
        W = IntMatrix.from_rows([[M.weights[i] if i == j else 0 for j in range(h)]
                                 for i in range(h)])
        assert W @ B == (W @ B).T


@pytest.mark.parametrize("Np,Nm", [(1, 37), (3, 11), (1, 30)])
def test_brandt_matrices_commute(Np, Nm):
    M = ideal_class_module(Np, Nm)
    ls = [l for l in (2, 3, 5, 7, 11) if (Np * Nm) % l]
    Bs = [brandt_matrix(M, l) for l in ls]
    for A in Bs:
        for B in Bs:
            assert A @ B == B @ A


def test_level_11_example():
    M = ideal_class_module(1, 11)
    assert M.class_number == 2 and sorted(M.weights) == [2, 3]
    assert brandt_matrix(M, 2).tolist() == [[1, 3], [2, 0]]
    (f,) = newform_packets(plus_space(11), 11)
    g = definite_eigenvector(M, f)
    assert g.vector == (1, -1)
    assert xi_exponent(g, 5) == 1 and xi_exponent(g, 7) == 0
    assert unit_pairing_check(M, g, 7)
    assert freeness_check(M, f, 7)


def test_eisenstein_vector():
    M = ideal_class_module(1, 37)
    e = M.eisenstein_vector()
    B = brandt_matrix(M, 2)
    assert [sum(B[i, j] * e[j] for j in range(M.class_number)) for i in range(M.class_number)] \
        == [3 * x for x in e]


def test_class_index_recovers_listed_ideals():
    M = ideal_class_module(3, 11)
    for t, (I, n) in enumerate(zip(M.ideals, M.norms)):
        assert class_index(M, I.scale(5), n * 25) == t


@pytest.mark.parametrize("Np,Nm", [(1, 11), (1, 37), (2, 7), (3, 5), (1, 42), (5, 13)])
def test_jacquet_langlands_small(Np, Nm):
    assert jacquet_langlands_check(Np, Nm)


def test_non_squarefree_rejected():
    with pytest.raises(ValueError):
        ideal_class_module(4, 3)
