"""Integral Hecke algebras on N2-new cusp forms and congruence exponents."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import flint

from .kernels import rank_mod_p
from .linalg import IntMatrix, hnf_rows, kernel_saturated, padic_valuation
from .modsym import (EigenformPacket, decompose, hecke_operator, new_subspace,
                     plus_space, sturm_bound)
from .numtheory import is_squarefree, primes_up_to

__all__ = ["HeckeAlgebra", "CongruenceExponent", "hecke_algebra",
           "congruence_exponent", "congruence_modulus", "PacketNotFound",
           "congruent_classes_mod_p"]


class PacketNotFound(LookupError):
    pass


@dataclass(frozen=True, eq=False)
class HeckeAlgebra:
    """Z-algebra generated by T_n (n <= Sturm bound) on S_2(N1, N2).

    Elements are stored as flattened k x k integer matrices acting on a
    saturated basis of the N2-new part of the plus-quotient cuspidal
    lattice; ``basis`` is a Z-basis of the algebra.
    """

    N1: int
    N2: int
    dim: int                          # dimension of the N2-new cusp forms
    basis: tuple[IntMatrix, ...]
    generators: dict

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coordinates(self, M: IntMatrix) -> list[int]:
        return _coords(self.basis, M)

    def structure_constants(self) -> list[list[list[int]]]:
        """``c[i][j]`` = coordinates of basis[i] @ basis[j]."""
        return [[self.coordinates(a @ b) for b in self.basis] for a in self.basis]

    def contains_identity(self) -> bool:
        try:
            self.coordinates(IntMatrix.identity(self.dim))
            return True
        except ArithmeticError:
            return False


def _flat(M: IntMatrix) -> list[int]:
    return list(M.entries)


def _coords(basis, M: IntMatrix) -> list[int]:
    r = len(basis)
    if r == 0:
        if M.is_zero():
            return []
        raise ArithmeticError("not in the algebra")
    A = flint.fmpq_mat(len(M.entries), r, [b.entries[i] for i in range(len(M.entries)) for b in basis])
    y = flint.fmpq_mat(len(M.entries), 1, list(M.entries))
    # least-squares free: pick independent rows
    R = flint.fmpq_mat(A.transpose()).rref()[0]
    rows = []
    for i in range(R.nrows()):
        for j in range(R.ncols()):
            if R[i, j] != 0:
                rows.append(j)
                break
    As = flint.fmpq_mat(r, r, [A[i, j] for i in rows for j in range(r)])
    ys = flint.fmpq_mat(r, 1, [y[i, 0] for i in rows])
    x = As.solve(ys)
    out = []
    for i in range(r):
        v = x[i, 0]
        if v.q != 1:
            raise ArithmeticError("not in the algebra")
        out.append(int(v.p))
    check = IntMatrix.zeros(M.rows, M.cols)
    for c, b in zip(out, basis):
        if c:
            check = check + b.scale(c)
    if check != M:
        raise ArithmeticError("not in the algebra")
    return out


def _lattice_basis(mats: list[IntMatrix], k: int) -> list[IntMatrix]:
    rows = hnf_rows([_flat(m) for m in mats], k * k)
    return [IntMatrix(k, k, tuple(r)) for r in rows]


@lru_cache(maxsize=128)
def hecke_algebra(N1: int, N2: int) -> HeckeAlgebra:
    N = N1 * N2
    if N < 1 or not is_squarefree(N):
        raise ValueError(f"N1*N2 = {N} must be squarefree")
    S = plus_space(N)
    W = new_subspace(S, N2)
    k = W.cols
    B = sturm_bound(N).bound
    gens = {n: hecke_operator(S, n, W) for n in range(1, B + 1)}
    basis = _lattice_basis(list(gens.values()), k) if k else []
    # close under multiplication by the prime generators
    primes = [l for l in primes_up_to(max(B, 2)) if l <= B]
    while True:
        prods = [gens[l] @ b for l in primes for b in basis]
        new = _lattice_basis(basis + prods, k) if k else []
        if [b.entries for b in new] == [b.entries for b in basis]:
            break
        basis = new
    return HeckeAlgebra(N1, N2, k, tuple(basis), gens)


def _packet_vector(f: EigenformPacket, N1: int, N2: int):
    S = plus_space(N1 * N2)
    dec = decompose(S, N2)
    want = f.eigenvalues
    for pk, v in zip(dec.packets, dec.vectors):
        mine = pk.eigenvalues
        if all(mine[l] == a for l, a in want.items() if l in mine):
            return pk, v
    raise PacketNotFound("packet not in space")


def _apply(M: IntMatrix, v) -> list[int]:
    return [sum(M[i, j] * v[j] for j in range(M.cols)) for i in range(M.rows)]


def _eigenvalue(M: IntMatrix, v) -> int:
    w = _apply(M, v)
    i0 = next(i for i, x in enumerate(v) if x)
    lam = w[i0] // v[i0]
    if any(w[i] != lam * v[i] for i in range(len(v))):
        raise ArithmeticError("vector is not an eigenvector")
    return lam


@lru_cache(maxsize=512)
def _congruence_generator(f: EigenformPacket, N1: int, N2: int, order: tuple | None = None) -> int:
    T = hecke_algebra(N1, N2)
    _, v = _packet_vector(f, N1, N2)
    basis = list(T.basis)
    if order is not None:
        basis = [basis[i] for i in order]
    r, k = len(basis), T.dim
    lam = [_eigenvalue(b, v) for b in basis]
    if r == 1:
        return abs(lam[0])
    ker = kernel_saturated(IntMatrix.from_rows([lam]))
    # W' = span of the images of ker(pi_f): the complement of the f-line
    vecs = []
    for j in range(ker.cols):
        K = IntMatrix.zeros(k, k)
        for i in range(r):
            if ker[i, j]:
                K = K + basis[i].scale(ker[i, j])
        vecs.extend(list(K.column(c)) for c in range(k))
    comp = hnf_rows(vecs, k)
    # t = sum c_i b_i annihilates W'  <=>  t w = 0 for w in comp
    rows = []
    for w in comp:
        imgs = [_apply(b, w) for b in basis]
        rows.extend([imgs[i][c] for i in range(r)] for c in range(k))
    ann = kernel_saturated(IntMatrix.from_rows(rows))
    if ann.cols != 1:
        raise ArithmeticError(f"annihilator of ker(pi_f) has rank {ann.cols}, expected 1")
    return abs(sum(ann[i, 0] * lam[i] for i in range(r)))


@dataclass(frozen=True)
class CongruenceExponent:
    packet: str
    N1: int
    N2: int
    p: int
    exponent: int


def congruence_modulus(f: EigenformPacket, N1: int, N2: int) -> int:
    """Positive generator of pi_f(Ann(ker pi_f)) for a rational packet."""
    return _congruence_generator(f, N1, N2)


def congruence_exponent(f: EigenformPacket, N1: int, N2: int, p: int,
                        order: tuple | None = None) -> CongruenceExponent:
    """ord_p of the congruence number of ``f`` inside S_2(N1, N2).

    ``order`` permutes the Hecke basis before the computation (the result
    must not depend on it).
    """
    if N1 * N2 != f.level:
        raise ValueError("N1*N2 must equal the level of the packet")
    eta = _congruence_generator(f, N1, N2, order)
    return CongruenceExponent(f.label, N1, N2, p, int(padic_valuation(eta, p)))


def congruent_classes_mod_p(f: EigenformPacket, N1: int, N2: int, p: int) -> int:
    """Count eigen-pieces other than f that share f's system mod p.

    Independent oracle for ``congruence_exponent(...) > 0``: decompose the
    N2-new lattice into Q-irreducible Hecke pieces and, for each piece,
    test whether the simultaneous kernel of (T_n - a_n(f)) mod p is nonzero.
    """
    S = plus_space(N1 * N2)
    W = new_subspace(S, N2)
    k = W.cols
    B = sturm_bound(N1 * N2).bound
    mats = [hecke_operator(S, n, W) for n in range(1, B + 1)]
    _, v = _packet_vector(f, N1, N2)
    a = [_eigenvalue(M, v) for M in mats]
    # generic element splitting the space into rational-irreducible pieces
    A = IntMatrix.zeros(k, k)
    for i, M in enumerate(mats):
        A = A + M.scale((7 * i * i + 3 * i + 1) % 11 - 5)
    fac = A.to_flint().charpoly().factor()[1]
    count = 0
    a_f = _eigenvalue(A, v)
    for poly, m in fac:
        # piece = kernel of poly(A)^m
        P = _poly_at(poly, A, k)
        Pm = P
        for _ in range(m - 1):
            Pm = Pm @ P
        piece = kernel_saturated(Pm)
        if piece.cols == 1 and poly.degree() == 1 and int(poly(a_f)) == 0:
            continue  # the f-line itself
        stack = []
        for M, an in zip(mats, a):
            D = M - IntMatrix.identity(k).scale(an)
            stack.extend((D @ piece).tolist())
        # kernel on piece/p: dim = piece.cols - rank of stacked map mod p
        # (piece is saturated, so reduction mod p is injective on it)
        big = [list(row) for row in stack]
        rk = rank_mod_p(_coords_in_piece(big, piece), p)
        if piece.cols - rk > 0:
            count += 1
    return count


def _poly_at(poly, A: IntMatrix, k: int) -> IntMatrix:
    out = IntMatrix.zeros(k, k)
    for c in reversed([int(x) for x in poly.coeffs()]):
        out = (out @ A) + IntMatrix.identity(k).scale(c)
    return out


def _coords_in_piece(rows, piece: IntMatrix):
    """Rewrite columns D@piece (vectors in W) in the basis of ``piece``.

    Each column of D@piece lies in the T-stable piece; the coordinates are
    integral because the piece is saturated.
    """
    k, c = piece.rows, piece.cols
    M = IntMatrix.from_rows(rows) if rows else IntMatrix(0, c, ())
    blocks = []
    nb = M.rows // k
    sel = None
    R = flint.fmpq_mat(piece.T.to_flint()).rref()[0]
    sel = []
    for i in range(R.nrows()):
        for j in range(R.ncols()):
            if R[i, j] != 0:
                sel.append(j)
                break
    Ps = flint.fmpq_mat(c, c, [piece[i, j] for i in sel for j in range(c)]).inv()
    out = []
    for b in range(nb):
        Y = flint.fmpq_mat(c, c, [M[b * k + i, j] for i in sel for j in range(c)])
        X = Ps * Y
        for i in range(c):
            out.append([int(X[i, j]) for j in range(c)])
    # rows of `out`: for each block, coordinates; rank of the map is the
    # rank of the horizontally stacked coordinate matrices
    cols = []
    for b in range(nb):
        blk = out[b * c:(b + 1) * c]
        cols.append(blk)
    if not cols:
        return [[0] * c]
    return [sum((blk[i] for blk in cols), []) for i in range(c)]
