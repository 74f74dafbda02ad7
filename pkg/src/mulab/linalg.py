"""Exact integer matrix algebra.

Everything here works over arbitrary-precision Python integers.  Small
matrices go through the hand-written Smith reduction below; large
Hermite reductions, determinants and LLL are delegated to FLINT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import flint

INFINITE_VALUATION = math.inf


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"entry count {len(self.entries)} != {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(0, ncols or 0, ())
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), n, tuple(int(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls(m, n, (0,) * (m * n))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def from_flint(cls, M) -> "IntMatrix":
        return cls(M.nrows(), M.ncols(), tuple(int(x) for x in M.entries()))

    def to_flint(self):
        return flint.fmpz_mat(self.rows, self.cols, list(self.entries))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple[int, ...]:
        return self.entries[j::self.cols]

    def tolist(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(self.entries[i * self.cols + j]
                               for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        if self.rows * self.cols * other.cols > 4000:
            return IntMatrix.from_flint(self.to_flint() * other.to_flint())
        cols = [other.column(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            out.extend(sum(a * b for a, b in zip(r, c)) for c in cols)
        return IntMatrix(self.rows, other.cols, tuple(out))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols,
                         tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + other.scale(-1)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(c * x for x in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        if self.rows == 0:
            return 1
        return int(self.to_flint().det())

    def __repr__(self):
        return f"IntMatrix({self.tolist()})"


@dataclass(frozen=True)
class SmithForm:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def divisors(self) -> tuple[int, ...]:
        k = min(self.D.rows, self.D.cols)
        return tuple(self.D[i, i] for i in range(k))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.divisors if d != 0)


def _as_matrix(A) -> IntMatrix:
    if isinstance(A, IntMatrix):
        return A
    return IntMatrix.from_rows(A)


def smith_normal_form(A) -> SmithForm:
    """Smith form with unimodular transforms, ``U @ A @ V == D``.

    Pivots are chosen as the smallest nonzero entry (in absolute value)
    of the active block, which keeps intermediate entries from blowing up
    on the sparse small-entry matrices that occur for Hecke operators.
    """
    A = _as_matrix(A)
    m, n = A.rows, A.cols
    D = A.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for r in D:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = D[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, i0, j0 = best
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    if D[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    if D[t][j]:
                        clean = False
            if not clean:
                # move the smallest leftover of row/column t onto the diagonal
                cand = [(abs(D[i][t]), i, t) for i in range(t + 1, m) if D[i][t]]
                cand += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
                _, i1, j1 = min(cand)
                if i1 != t:
                    swap_rows(t, i1)
                else:
                    swap_cols(t, j1)
                continue
            piv = D[t][t]
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]

    return SmithForm(IntMatrix.from_rows(U, m), IntMatrix.from_rows(D, n),
                     IntMatrix.from_rows(V, n))


def elementary_divisors(A) -> tuple[int, ...]:
    A = _as_matrix(A)
    if A.rows == 0 or A.cols == 0:
        return ()
    S = A.to_flint().snf()
    k = min(A.rows, A.cols)
    return tuple(abs(int(S[i, i])) for i in range(k))


def hnf_rows(gens: Iterable[Sequence[int]], ncols: int) -> list[list[int]]:
    """Row-style Hermite basis of the Z-span of ``gens`` (zero rows dropped)."""
    gens = [list(map(int, g)) for g in gens]
    if not gens:
        return []
    H = flint.fmpz_mat(gens).hnf()
    out = []
    for i in range(H.nrows()):
        r = [int(H[i, j]) for j in range(ncols)]
        if any(r):
            out.append(r)
    return out


def _lll_rows(rows: list[list[int]]) -> list[list[int]]:
    if len(rows) <= 1:
        return rows
    M = flint.fmpz_mat(rows).lll()
    return [[int(M[i, j]) for j in range(M.ncols())] for i in range(M.nrows())]


def kernel_saturated(A, reduce: bool = True) -> IntMatrix:
    """Basis (as columns) of ``{x in Z^n : A x = 0}``.

    The basis comes out of a unimodular Hermite transform, so the lattice
    it spans is saturated: ``Z^n / ker`` is torsion-free.
    """
    A = _as_matrix(A)
    m, n = A.rows, A.cols
    if n == 0:
        return IntMatrix(0, 0, ())
    if m == 0 or A.is_zero():
        return IntMatrix.identity(n)
    aug = [list(A.column(j)) + [int(i == j) for i in range(n)] for j in range(n)]
    H = flint.fmpz_mat(aug).hnf()
    basis = []
    for i in range(H.nrows()):
        left = [int(H[i, j]) for j in range(m)]
        right = [int(H[i, j]) for j in range(m, m + n)]
        if not any(left) and any(right):
            basis.append(right)
    if not basis:
        return IntMatrix(n, 0, ())
    if reduce:
        basis = _lll_rows(basis)
    return IntMatrix.from_rows(basis).T


def saturate(B) -> IntMatrix:
    """Saturation of the column span of ``B`` inside Z^n (columns out)."""
    B = _as_matrix(B)
    perp = kernel_saturated(B.T)
    if perp.cols == 0:
        return IntMatrix.identity(B.rows)
    return kernel_saturated(perp.T)


def rank(A) -> int:
    A = _as_matrix(A)
    if A.rows == 0 or A.cols == 0:
        return 0
    return int(A.to_flint().rank())


def padic_valuation(x, p: int):
    """Exponent of ``p`` in a nonzero rational ``x``; ``inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return INFINITE_VALUATION
    v = 0
    num, den = abs(x.numerator), x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def content(xs: Iterable[int]) -> int:
    g = 0
    for x in xs:
        g = math.gcd(g, int(x))
    return g


def primitive(xs: Sequence[int]) -> list[int]:
    """Divide out the content and make the first nonzero entry positive."""
    g = content(xs)
    if g == 0:
        return list(xs)
    out = [int(x) // g for x in xs]
    first = next(x for x in out if x)
    return [-x for x in out] if first < 0 else out


def rational_nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Kernel of a rational matrix, returned as integral primitive vectors."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    den = 1
    for r in rows:
        for x in r:
            den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    A = IntMatrix.from_rows([[int(Fraction(x) * den) for x in r] for r in rows])
    K = kernel_saturated(A)
    return [[Fraction(K[i, j]) for i in range(K.rows)] for j in range(K.cols)]
