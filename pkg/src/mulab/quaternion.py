"""Definite quaternion algebras over Q, lattices, maximal and Eichler orders.

Elements are 4-vectors of rationals in the basis 1, i, j, k with
i^2 = a, j^2 = b, k = ij = -ji.  Lattices keep an exact rational basis
(rows) as a FLINT ``fmpq_mat`` in Hermite form.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import flint

from .numtheory import factor, is_squarefree, kronecker, prime_divisors

__all__ = ["hilbert_symbol", "QuaternionAlgebra", "quaternion_algebra",
           "Lattice", "maximal_order", "eichler_order", "ramified_primes"]


def _split_p(x: int, p: int) -> tuple[int, int]:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """Hilbert symbol (a, b)_p for nonzero integers; ``p = -1`` is the real place."""
    if p == -1:
        return -1 if a < 0 and b < 0 else 1
    al, u = _split_p(a, p)
    be, v = _split_p(b, p)
    if p == 2:
        eps = lambda x: ((x - 1) // 2) % 2
        omg = lambda x: ((x * x - 1) // 8) % 2
        e = eps(u) * eps(v) + al * omg(v) + be * omg(u)
        return -1 if e % 2 else 1
    s = (-1) ** (al * be * ((p - 1) // 2) % 2)
    return s * kronecker(u, p) ** be * kronecker(v, p) ** al


def ramified_primes(a: int, b: int) -> list[int]:
    cands = set(prime_divisors(2 * a * b))
    return sorted(p for p in cands if hilbert_symbol(a, b, p) == -1)


@dataclass(frozen=True)
class QuaternionAlgebra:
    a: int
    b: int
    discriminant: int

    def __post_init__(self):
        if hilbert_symbol(self.a, self.b, -1) != -1:
            raise ValueError("algebra is not definite")
        if ramified_primes(self.a, self.b) != prime_divisors(self.discriminant):
            raise ValueError(f"({self.a},{self.b}) is not ramified exactly at {self.discriminant}")

    def mul(self, x, y):
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        return (x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
                x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
                x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
                x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1)

    @staticmethod
    def conj(x):
        return (x[0], -x[1], -x[2], -x[3])

    def nrd(self, x):
        return x[0] ** 2 - self.a * x[1] ** 2 - self.b * x[2] ** 2 + self.a * self.b * x[3] ** 2

    @staticmethod
    def trd(x):
        return 2 * x[0]

    def bilinear(self, x, y):
        """trd(x * conj(y)), so that bilinear(x, x) = 2 nrd(x)."""
        return 2 * (x[0] * y[0] - self.a * x[1] * y[1] - self.b * x[2] * y[2]
                    + self.a * self.b * x[3] * y[3])


def quaternion_algebra(Nminus: int, a: int | None = None, b: int | None = None) -> QuaternionAlgebra:
    """Definite algebra ramified exactly at the primes of ``Nminus``.

    Explicit ``(a, b)`` may be passed to get another presentation; either
    way the ramification is certified by Hilbert symbols.
    """
    if not is_squarefree(Nminus) or len(factor(Nminus)) % 2 == 0:
        raise ValueError("N- must be a squarefree product of an odd number of primes")
    if a is not None:
        return QuaternionAlgebra(a, b, Nminus)
    want = prime_divisors(Nminus)
    if Nminus == 2:
        return QuaternionAlgebra(-1, -1, 2)
    if len(want) == 1:
        q = Nminus
        if q % 4 == 3:
            return QuaternionAlgebra(-1, -q, q)
        if q % 8 == 5:
            return QuaternionAlgebra(-2, -q, q)
    for s in range(1, 400):
        for aa in (-1, -2, -3, -5, -6, -7, -10, -11, -13, -14, -15, -17, -19, -21, -23):
            bb = -Nminus * s
            if not is_squarefree(abs(bb)):
                continue
            if ramified_primes(aa, bb) == want:
                return QuaternionAlgebra(aa, bb, Nminus)
    raise RuntimeError(f"no presentation found for discriminant {Nminus}")


# ---------------------------------------------------------------------------
# lattices


def _to_q(M) -> flint.fmpq_mat:
    return M if isinstance(M, flint.fmpq_mat) else flint.fmpq_mat(M)


def _hnf_rational(vectors, dim: int = 4) -> flint.fmpq_mat:
    """Hermite basis (rows) of the Z-span of rational vectors."""
    den = 1
    for v in vectors:
        for x in v:
            den = math.lcm(den, Fraction(x).denominator)
    rows = [[int(Fraction(x) * den) for x in v] for v in vectors]
    H = flint.fmpz_mat(rows).hnf()
    out = []
    for i in range(H.nrows()):
        r = [int(H[i, j]) for j in range(dim)]
        if any(r):
            out.append([Fraction(x, den) for x in r])
    if len(out) != dim:
        raise ValueError("vectors do not span a full lattice")
    return flint.fmpq_mat(dim, dim, [flint.fmpq(x.numerator, x.denominator) for r in out for x in r])


def _frac(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


@dataclass(frozen=True, eq=False)
class Lattice:
    """Full Z-lattice in the algebra, rows of ``basis`` in Hermite form."""

    alg: QuaternionAlgebra
    basis: flint.fmpq_mat
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_gens(cls, alg, gens) -> "Lattice":
        return cls(alg, _hnf_rational(list(gens)))

    @property
    def key(self) -> tuple:
        return tuple(str(x) for x in self.basis.entries())

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def vectors(self) -> list[tuple[Fraction, ...]]:
        return [tuple(_frac(self.basis[i, j]) for j in range(4)) for i in range(4)]

    def element(self, coords) -> tuple[Fraction, ...]:
        vs = self.vectors()
        return tuple(sum(int(c) * v[m] for c, v in zip(coords, vs)) for m in range(4))

    def covolume(self) -> Fraction:
        return abs(_frac(self.basis.det()))

    def coordinates(self, v) -> list[Fraction]:
        x = flint.fmpq_mat(1, 4, [flint.fmpq(Fraction(t).numerator, Fraction(t).denominator) for t in v])
        c = x * self.basis.inv()
        return [_frac(c[0, j]) for j in range(4)]

    def contains(self, v) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(v))

    def contains_lattice(self, other: "Lattice") -> bool:
        C = other.basis * self.basis.inv()
        return all(_frac(x).denominator == 1 for x in C.entries())

    def gram(self) -> list[list[Fraction]]:
        """trd(x conj(y)) on the basis; Q(x) = x^T G x / 2 = nrd."""
        vs = self.vectors()
        return [[self.alg.bilinear(u, v) for v in vs] for u in vs]

    def scaled_gram(self, s) -> list[list[int]]:
        G = self.gram()
        out = [[x / s for x in r] for r in G]
        if any(x.denominator != 1 for r in out for x in r) or any(out[i][i] % 2 for i in range(4)):
            raise ArithmeticError("norm form is not integral after scaling")
        return [[int(x) for x in r] for r in out]

    def __mul__(self, other: "Lattice") -> "Lattice":
        A, B = self.vectors(), other.vectors()
        return Lattice.from_gens(self.alg, [self.alg.mul(x, y) for x in A for y in B])

    def conj(self) -> "Lattice":
        return Lattice.from_gens(self.alg, [QuaternionAlgebra.conj(v) for v in self.vectors()])

    def scale(self, s) -> "Lattice":
        s = Fraction(s)
        return Lattice.from_gens(self.alg, [tuple(s * x for x in v) for v in self.vectors()])

    def left_mult(self, x) -> "Lattice":
        return Lattice.from_gens(self.alg, [self.alg.mul(x, v) for v in self.vectors()])

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice.from_gens(self.alg, self.vectors() + other.vectors())

    def dual(self) -> "Lattice":
        """Dual for the standard dot product of coordinates."""
        return Lattice(self.alg, _hnf_rational(_rows(self.basis.inv().transpose())))

    def intersect(self, other: "Lattice") -> "Lattice":
        return (self.dual() + other.dual()).dual()

    def _multiplier(self, side: str) -> "Lattice":
        e = [tuple(Fraction(int(i == j)) for j in range(4)) for i in range(4)]
        vs = self.vectors()
        inv = self.basis.inv()
        cols = []
        for v in vs:
            prods = [self.alg.mul(x, v) if side == "left" else self.alg.mul(v, x) for x in e]
            P = flint.fmpq_mat(4, 4, [flint.fmpq(t.numerator, t.denominator) for p in prods for t in p])
            C = P * inv   # row m = coordinates of e_m * v in this lattice
            for n in range(4):
                cols.append([_frac(C[m, n]) for m in range(4)])
        col_lat = _hnf_rational(cols)
        return Lattice(self.alg, _hnf_rational(_rows(col_lat.inv().transpose())))

    def left_order(self) -> "Lattice":
        if "OL" not in self._memo:
            self._memo["OL"] = self._multiplier("left")
        return self._memo["OL"]

    def right_order(self) -> "Lattice":
        if "OR" not in self._memo:
            self._memo["OR"] = self._multiplier("right")
        return self._memo["OR"]

    def norm(self) -> Fraction:
        """Reduced norm relative to the right order: [O_R : I]^(1/2)."""
        r = self.covolume() / self.right_order().covolume()
        n = Fraction(math.isqrt(r.numerator), math.isqrt(r.denominator))
        if n * n != r:
            raise ArithmeticError("index is not a square")
        return n

    def discriminant(self) -> int:
        """Reduced discriminant of an order: sqrt|det trd(e_m e_n)|."""
        vs = self.vectors()
        M = flint.fmpq_mat(4, 4, [_q(self.alg.trd(self.alg.mul(u, v))) for u in vs for v in vs])
        d = abs(_frac(M.det()))
        r = math.isqrt(d.numerator)
        if d.denominator != 1 or r * r != d.numerator:
            raise ArithmeticError("not an order")
        return r

    def is_order(self) -> bool:
        one = (1, 0, 0, 0)
        if not self.contains(one):
            return False
        vs = self.vectors()
        return all(self.contains(self.alg.mul(u, v)) for u in vs for v in vs)


def _q(x) -> flint.fmpq:
    x = Fraction(x)
    return flint.fmpq(x.numerator, x.denominator)


def _rows(M) -> list[list[Fraction]]:
    return [[_frac(M[i, j]) for j in range(M.ncols())] for i in range(M.nrows())]


# ---------------------------------------------------------------------------
# orders


def _closure(alg, gens, max_den: int) -> Lattice | None:
    L = Lattice.from_gens(alg, gens)
    for _ in range(12):
        vs = L.vectors()
        if any(Fraction(x).denominator > max_den for v in vs for x in v):
            return None
        M = Lattice.from_gens(alg, vs + [alg.mul(u, v) for u in vs for v in vs])
        if M == L:
            return L
        L = M
    return None


def _integral(alg, x) -> bool:
    return Fraction(alg.trd(x)).denominator == 1 and Fraction(alg.nrd(x)).denominator == 1


@lru_cache(maxsize=64)
def maximal_order(alg: QuaternionAlgebra) -> Lattice:
    """Maximal order, grown from Z<1,i,j,k> one prime at a time."""
    e = [tuple(Fraction(int(i == j)) for j in range(4)) for i in range(4)]
    O = Lattice.from_gens(alg, e)
    while True:
        d = O.discriminant()
        if d == alg.discriminant:
            return O
        extra = d // alg.discriminant
        p = prime_divisors(extra)[0]
        vs = O.vectors()
        found = None
        for c in _residues(p):
            x = tuple(sum(Fraction(ci, p) * v[m] for ci, v in zip(c, vs)) for m in range(4))
            if not _integral(alg, x):
                continue
            den = max(Fraction(t).denominator for v in vs for t in v) * p
            O2 = _closure(alg, vs + [x], den)
            if O2 is not None and O2.is_order() and O2.discriminant() < d:
                found = O2
                break
        if found is None:
            raise RuntimeError(f"could not enlarge order at {p}")
        O = found


def _residues(p: int):
    for n in range(1, p ** 4):
        yield [(n // p ** t) % p for t in range(4)]


def eichler_order(alg: QuaternionAlgebra, Nplus: int, seed: int = 0) -> Lattice:
    """Eichler order of level ``Nplus`` inside the maximal order.

    At each q | N+ pick a nonzero eps in O/qO with nrd(eps) = 0 mod q
    (a rank-one matrix under O/qO = M_2(F_q)); the elements of O preserving
    the right ideal eps*O + qO are exactly the upper-triangular ones mod q.
    """
    O = maximal_order(alg)
    if Nplus == 1:
        return O
    rng = random.Random(seed)
    L = O
    vs = O.vectors()
    for q in prime_divisors(Nplus):
        if alg.discriminant % q == 0:
            raise ValueError("N+ and N- must be coprime")
        while True:
            c = [rng.randrange(q) for _ in range(4)]
            if not any(c):
                continue
            eps = tuple(sum(ci * v[m] for ci, v in zip(c, vs)) for m in range(4))
            if alg.nrd(eps) % q == 0:
                break
        I = O.left_mult(eps) + O.scale(q)
        L = L.intersect(I.left_order())
    if L.discriminant() != alg.discriminant * Nplus:
        raise ArithmeticError("Eichler order has the wrong discriminant")
    return L
