"""Right-ideal classes of Eichler orders, Brandt matrices and the pairing.

The classes are found by walking the l-neighbour graph from the order
itself and stop as soon as the Eichler mass is reached exactly, which
certifies that nothing is missing.  Brandt matrices come from theta
series of the lattices I_j * conj(I_i):

    B(n)[i][j] = #{b in I_j conj(I_i) : nrd(b) = n N(I_i) N(I_j)} / (2 w_i)

so each column of B(l) sums to l + 1 for l prime to the level, and
diag(w) B(n) is symmetric.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .kernels import quad_values, rank_mod_p, short_vectors, theta_counts
from .linalg import IntMatrix, kernel_saturated, padic_valuation, primitive
from .modsym import (EigenformPacket, common_eigenspaces, hecke_operator,
                     new_subspace, plus_space, sturm_bound)
from .numtheory import factor, is_squarefree, prime_divisors, primes_up_to
from .quaternion import (Lattice, QuaternionAlgebra, eichler_order,
                         quaternion_algebra)

__all__ = ["BrandtModule", "DefiniteEigenvector", "ideal_class_module",
           "brandt_matrix", "definite_eigenvector", "xi_exponent",
           "unit_pairing_check", "freeness_check", "eichler_mass",
           "ClassSetIncomplete", "JLTransferFailed", "good_eigenspaces",
           "modular_good_eigenspaces", "jacquet_langlands_check", "class_index"]

_FINGERPRINT_BOUND = 4


class ClassSetIncomplete(RuntimeError):
    pass


class JLTransferFailed(LookupError):
    pass


def eichler_mass(Nplus: int, Nminus: int) -> Fraction:
    m = Fraction(1, 12)
    for q in prime_divisors(Nminus):
        m *= q - 1
    for q in prime_divisors(Nplus):
        m *= q + 1
    return m


@dataclass(frozen=True, eq=False)
class BrandtModule:
    Nplus: int
    Nminus: int
    alg: QuaternionAlgebra
    order: Lattice
    ideals: tuple[Lattice, ...]
    norms: tuple[int, ...]
    weights: tuple[int, ...]
    _theta: dict = field(default_factory=dict, repr=False)

    @property
    def level(self) -> int:
        return self.Nplus * self.Nminus

    @property
    def class_number(self) -> int:
        return len(self.ideals)

    @property
    def mass(self) -> Fraction:
        return sum((Fraction(1, w) for w in self.weights), Fraction(0))

    def pairing_matrix(self) -> IntMatrix:
        h = self.class_number
        return IntMatrix(h, h, tuple(self.weights[i] if i == j else 0
                                     for i in range(h) for j in range(h)))

    def pairing(self, x, y) -> int:
        return sum(w * a * b for w, a, b in zip(self.weights, x, y))

    def eisenstein_vector(self) -> list[int]:
        """Primitive integral multiple of (1/w_i): eigenvalue l+1 for all B(l)."""
        L = math.lcm(*self.weights)
        return primitive([L // w for w in self.weights])

    def _pair_counts(self, bound: int) -> np.ndarray:
        have = self._theta.get("bound", -1)
        if have < bound:
            b = max(bound, 2 * have, 8)
            h = self.class_number
            C = np.zeros((h, h, b + 1), dtype=np.int64)
            for i in range(h):
                for j in range(i, h):
                    L = self.ideals[j] * self.ideals[i].conj()
                    G = np.array(L.scaled_gram(self.norms[i] * self.norms[j]), dtype=np.int64)
                    C[i, j] = C[j, i] = theta_counts(G, b)
            self._theta["bound"] = b
            self._theta["C"] = C
        return self._theta["C"]

    def brandt_matrix(self, n: int) -> IntMatrix:
        return brandt_matrix(self, n)


def _norm_gram(I: Lattice, nrm: int) -> np.ndarray:
    return np.array(I.scaled_gram(nrm), dtype=np.int64)


def _ideal_norm(I: Lattice, order: Lattice) -> int:
    r = I.covolume() / order.covolume()
    n = math.isqrt(r.numerator)
    if r.denominator != 1 or n * n != r.numerator:
        raise ArithmeticError("ideal index is not a square")
    return n


def _unit_count(O: Lattice) -> int:
    G = np.array(O.scaled_gram(1), dtype=np.int64)
    X = short_vectors(G, 1)
    return int(np.count_nonzero(quad_values(G, X) == 1))


def _fingerprint(I: Lattice, nrm: int) -> tuple:
    return tuple(int(c) for c in theta_counts(_norm_gram(I, nrm), _FINGERPRINT_BOUND))


def _equivalent(I: Lattice, nI: int, J: Lattice, nJ: int) -> bool:
    L = J * I.conj()
    G = np.array(L.scaled_gram(nI * nJ), dtype=np.int64)
    X = short_vectors(G, 1)
    return bool(np.any(quad_values(G, X) == 1))


def _neighbours(I: Lattice, nI: int, order: Lattice, ell: int) -> list[Lattice]:
    """All l+1 right ideals J in I with [I : J] = l^2."""
    alg = I.alg
    G = _norm_gram(I, nI) % (2 * ell)
    X = np.array(list(itertools.product(range(ell), repeat=4))[1:], dtype=np.int64)
    iso = X[quad_values(G, X) % ell == 0]
    lam = order.vectors()
    lI = [tuple(ell * t for t in v) for v in I.vectors()]
    out = []
    alive = np.ones(len(iso), dtype=bool)
    Binv = I.basis.inv()
    while alive.any():
        k = int(np.argmax(alive))
        x = I.element(iso[k])
        J = Lattice.from_gens(alg, [alg.mul(x, m) for m in lam] + lI)
        out.append(J)
        C = J.basis * Binv   # J in I-coordinates, integral, det l^2
        det = int(C.det().p)
        adj = np.array([[int((C.inv()[r, c] * det).p) for c in range(4)] for r in range(4)],
                       dtype=np.int64)
        alive &= np.any((iso @ adj) % abs(det) != 0, axis=1)
    if len(out) != ell + 1:
        raise ArithmeticError(f"found {len(out)} neighbours, expected {ell + 1}")
    return out


def class_index(M: BrandtModule, J: Lattice, nJ: int) -> int:
    """Index of the class of the right ideal J (of norm nJ) in M.ideals."""
    prints = M._theta.get("prints")
    if prints is None:
        prints = M._theta["prints"] = [_fingerprint(I, n) for I, n in zip(M.ideals, M.norms)]
    fp = _fingerprint(J, nJ)
    for t, (I, n) in enumerate(zip(M.ideals, M.norms)):
        if fp == prints[t] and _equivalent(I, n, J, nJ):
            return t
    raise ArithmeticError("ideal is not equivalent to any listed class")


_MODULES: dict = {}


def ideal_class_module(Nplus: int, Nminus: int, alg: QuaternionAlgebra | None = None,
                       max_classes: int = 2000) -> BrandtModule:
    """Complete set of right-ideal classes of an Eichler order of level N+.

    Raises :class:`ClassSetIncomplete` if the neighbour walk ends before
    the mass formula is met.
    """
    if not is_squarefree(Nplus * Nminus):
        raise ValueError("N+ N- must be squarefree")
    key = (Nplus, Nminus, None if alg is None else (alg.a, alg.b))
    if key in _MODULES:
        return _MODULES[key]
    alg = alg or quaternion_algebra(Nminus)
    if alg.discriminant != Nminus:
        raise ValueError("algebra has the wrong discriminant")
    order = eichler_order(alg, Nplus)
    target = eichler_mass(Nplus, Nminus)
    N = Nplus * Nminus
    ell = next(p for p in primes_up_to(100) if N % p)

    ideals, norms, weights, prints = [order], [1], [_unit_count(order) // 2], [_fingerprint(order, 1)]
    mass = Fraction(1, weights[0])
    queue = [0]
    while mass < target and queue:
        i = queue.pop(0)
        for J in _neighbours(ideals[i], norms[i], order, ell):
            nJ = norms[i] * ell
            fp = _fingerprint(J, nJ)
            if any(fp == prints[t] and _equivalent(ideals[t], norms[t], J, nJ)
                   for t in range(len(ideals))):
                continue
            w = _unit_count(J.left_order()) // 2
            ideals.append(J)
            norms.append(nJ)
            weights.append(w)
            prints.append(fp)
            queue.append(len(ideals) - 1)
            mass += Fraction(1, w)
            if mass >= target or len(ideals) > max_classes:
                break
    if mass != target:
        raise ClassSetIncomplete(f"class set incomplete: mass {mass} vs {target}")
    M = BrandtModule(Nplus, Nminus, alg, order, tuple(ideals), tuple(norms), tuple(weights))
    _MODULES[key] = M
    return M


def brandt_matrix(M: BrandtModule, n: int) -> IntMatrix:
    if n < 1:
        raise ValueError("n must be positive")
    C = M._pair_counts(n)
    h = M.class_number
    out = []
    for i in range(h):
        for j in range(h):
            c = int(C[i, j, n])
            q, r = divmod(c, 2 * M.weights[i])
            if r:
                raise ArithmeticError("Brandt entry not integral")
            out.append(q)
    return IntMatrix(h, h, tuple(out))


@dataclass(frozen=True)
class DefiniteEigenvector:
    packet: str
    vector: tuple[int, ...]
    weights: tuple[int, ...]
    certificate: tuple[tuple[int, int], ...]   # (l, a_l) checked


def definite_eigenvector(M: BrandtModule, f: EigenformPacket) -> DefiniteEigenvector:
    N = M.level
    if f.level != N:
        raise JLTransferFailed("JL transfer failed: packet has the wrong level")
    h = M.class_number
    I = IntMatrix.identity(h)
    ev = f.eigenvalues
    B = sturm_bound(N).bound
    blocks, cert = [], []
    for l in primes_up_to(max(B, 2)):
        if l not in ev:
            continue
        a = ev[l]   # B(q) acts on the new part as U_q for q | N
        blocks.extend((brandt_matrix(M, l) - I.scale(a)).tolist())
        cert.append((l, ev[l]))
    K = kernel_saturated(IntMatrix.from_rows(blocks))
    if K.cols != 1:
        raise JLTransferFailed(f"JL transfer failed: eigenspace has dimension {K.cols}")
    g = primitive([K[i, 0] for i in range(h)])
    if g == primitive(M.eisenstein_vector()):
        raise JLTransferFailed("JL transfer failed: Eisenstein line")
    return DefiniteEigenvector(f.label, tuple(g), M.weights, tuple(cert))


def good_eigenspaces(M: BrandtModule, bound: int | None = None) -> list[tuple[dict, int]]:
    """Rational cuspidal eigensystems of B(l), l prime to N, with multiplicity."""
    N = M.level
    B = max(sturm_bound(N).bound, bound or 0)
    mats = {l: brandt_matrix(M, l) for l in primes_up_to(max(B, 2)) if N % l}
    eis = M.eisenstein_vector()
    out = []
    for sysm, K in common_eigenspaces(mats):
        dim = K.cols
        if all(a == l + 1 for l, a in sysm.items()):
            # the Eisenstein line sits inside this space
            dim -= 1
            if dim == 0:
                continue
        out.append((sysm, dim))
    return out


def modular_good_eigenspaces(N: int, Nminus: int, bound: int | None = None) -> list[tuple[dict, int]]:
    """Same data on the N- -new plus-quotient of modular symbols of level N."""
    S = plus_space(N)
    W = new_subspace(S, Nminus)
    B = max(sturm_bound(N).bound, bound or 0)
    mats = {l: hecke_operator(S, l, W) for l in primes_up_to(max(B, 2)) if N % l}
    return [(sysm, K.cols) for sysm, K in common_eigenspaces(mats)]


def jacquet_langlands_check(Nplus: int, Nminus: int) -> bool:
    """Rational good-prime eigensystems (with multiplicity) agree on both sides."""
    M = ideal_class_module(Nplus, Nminus)
    key = lambda t: (sorted(t[0].items()), t[1])
    left = sorted(good_eigenspaces(M), key=key)
    right = sorted(modular_good_eigenspaces(M.level, Nminus), key=key)
    return [key(t) for t in left] == [key(t) for t in right]


def xi_exponent(g: DefiniteEigenvector, p: int) -> int:
    xi = sum(w * x * x for w, x in zip(g.weights, g.vector))
    return int(padic_valuation(xi, p))


def unit_pairing_check(M: BrandtModule, g: DefiniteEigenvector, p: int) -> bool:
    return any((w * x) % p for w, x in zip(M.weights, g.vector))


def freeness_check(M: BrandtModule, f: EigenformPacket, p: int) -> bool:
    """dim_{F_p} M / m_f M == 1, with m_f = (p, T_l - a_l, U_q - a_q)."""
    N = M.level
    h = M.class_number
    I = IntMatrix.identity(h)
    ev = f.eigenvalues
    rows = []
    for l in primes_up_to(max(sturm_bound(N).bound, 2)):
        if l not in ev:
            continue
        a = ev[l]
        rows.extend((brandt_matrix(M, l) - I.scale(a)).T.tolist())
    # M/m_f M is the cokernel of the stacked maps; its dimension is
    # h - rank of their combined image mod p
    img = np.array(rows, dtype=object).T
    return h - rank_mod_p(img, p) == 1
