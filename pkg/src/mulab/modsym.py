"""Weight-2 modular symbols for Gamma_0(N), N squarefree.

Spaces are built from Manin symbols ``(c:d)`` in P^1(Z/N) modulo the
two-term relations ``x + xS = 0`` (and ``x = x*`` for the plus quotient)
and the three-term relations ``x + xt + xt^2 = 0``.  Coordinates are taken
with respect to the lattice spanned by the images of integral Manin
symbols, so every Hecke matrix is an integer matrix.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache

import flint
import numpy as np

from . import kernels
from .linalg import IntMatrix, kernel_saturated, primitive
from .numtheory import (divisors, euler_phi, factor, is_prime, is_squarefree,
                        kronecker, prime_divisors, primes_up_to)

__all__ = [
    "ModSymSpace", "EigenformPacket", "SkippedClass", "SturmBound",
    "build_space", "hecke_operator", "newform_packets", "sturm_bound",
    "genus_x0", "new_subspace",
]


# ---------------------------------------------------------------------------
# classical formulas


@dataclass(frozen=True)
class SturmBound:
    level: int
    weight: int
    bound: int


def sturm_bound(N: int) -> SturmBound:
    index = N
    for q in prime_divisors(N):
        index = index // q * (q + 1)
    # ceil(2 * index / 12)
    return SturmBound(N, 2, max(1, -(-index // 6)))


def genus_x0(N: int) -> int:
    """Genus of X_0(N) from the Riemann-Hurwitz count (any N >= 1)."""
    mu = N
    for q in factor(N):
        mu = mu // q * (q + 1)
    fac = factor(N)
    nu2 = 0 if N % 4 == 0 else math.prod(1 + kronecker(-4, q) for q in fac)
    nu3 = 0 if N % 9 == 0 else math.prod(1 + kronecker(-3, q) for q in fac)
    cusps = sum(euler_phi(math.gcd(d, N // d)) for d in divisors(N))
    twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps
    return twelve_g // 12


# ---------------------------------------------------------------------------
# P^1(Z/N)


@dataclass(frozen=True)
class P1List:
    N: int
    cs: np.ndarray
    ds: np.ndarray
    table: np.ndarray  # table[c, d] -> index or -1

    def __len__(self):
        return len(self.cs)

    def index(self, c: int, d: int) -> int:
        return int(self.table[c % self.N, d % self.N])


@lru_cache(maxsize=32)
def p1_list(N: int) -> P1List:
    if N == 1:
        return P1List(1, np.zeros(1, np.int64), np.zeros(1, np.int64),
                      np.zeros((1, 1), np.int64))
    c, d = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    c, d = c.ravel(), d.ravel()
    valid = np.gcd(np.gcd(c, d), N) == 1
    units = np.array([u for u in range(1, N) if math.gcd(u, N) == 1])
    codes = ((units[:, None] * c[None, :]) % N) * N + (units[:, None] * d[None, :]) % N
    canon = codes.min(axis=0)
    reps = np.unique(canon[valid])
    pos = {int(r): i for i, r in enumerate(reps)}
    table = -np.ones((N, N), dtype=np.int64)
    for cc, dd, code, ok in zip(c, d, canon, valid):
        if ok:
            table[cc, dd] = pos[int(code)]
    return P1List(N, (reps // N).astype(np.int64), (reps % N).astype(np.int64), table)


@lru_cache(maxsize=256)
def merel_matrices(n: int) -> np.ndarray:
    """Merel's set {[[a,b],[c,d]] : ad - bc = n, a > b >= 0, d > c >= 0}."""
    out = []
    for a in range(1, n + 1):
        for d in range(1, n + 2 - a):
            r = a * d - n
            if r < 0:
                continue
            if r == 0:
                out.extend((a, 0, c, d) for c in range(d))
                out.extend((a, b, 0, d) for b in range(1, a))
                continue
            for b in range(1, a):
                if r % b == 0 and r // b < d:
                    out.append((a, b, r // b, d))
    return np.array(out, dtype=np.int64).reshape(-1, 4)


# ---------------------------------------------------------------------------
# the space


@dataclass(frozen=True, eq=False)
class ModSymSpace:
    """Modular symbols of weight 2 on Gamma_0(N) (full space or plus quotient).

    ``proj`` maps free generators to lattice coordinates; ``cuspidal`` is a
    saturated basis (columns) of the cuspidal sublattice.
    """

    level: int
    sign: int
    p1: P1List
    gen_of: np.ndarray        # symbol -> generator index (-1: symbol is zero)
    gen_sign: np.ndarray      # symbol -> +-1
    gen_rep: np.ndarray       # generator -> representative symbol
    proj: IntMatrix           # dim x ngens, integral and surjective
    section: list[int]        # generators whose proj columns are invertible
    cuspidal: IntMatrix       # dim x cusp_dim
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return self.proj.rows

    @property
    def cuspidal_dimension(self) -> int:
        return self.cuspidal.cols

    def hecke(self, n: int) -> IntMatrix:
        return hecke_operator(self, n)


def _two_term_classes(p1: P1List, sign: int):
    """Union-find with signs for x = -xS and x = sign * x*."""
    n = len(p1)
    parent = list(range(n))
    rel = [1] * n          # x_i = rel[i] * x_parent
    zero = [False] * n

    def find(i):
        path = []
        s = 1
        while parent[i] != i:
            path.append(i)
            s *= rel[i]
            i = parent[i]
        root = i
        # path compression
        acc = s
        for j in path:
            old = rel[j]
            rel[j] = acc
            parent[j] = root
            acc *= old
        return root, s

    def union(i, j, s):  # x_i = s * x_j
        ri, si = find(i)
        rj, sj = find(j)
        if ri == rj:
            if si != s * sj:
                zero[ri] = True
            return
        parent[ri] = rj
        rel[ri] = si * s * sj
        if zero[ri]:
            zero[rj] = True

    N = p1.N
    for i in range(n):
        c, d = int(p1.cs[i]), int(p1.ds[i])
        union(i, p1.index(d, -c), -1)
        if sign:
            union(i, p1.index(-c, d), sign)
    roots = {}
    gen_of = np.full(n, -1, dtype=np.int64)
    gen_sign = np.zeros(n, dtype=np.int64)
    reps = []
    for i in range(n):
        r, s = find(i)
        if zero[r]:
            continue
        if r not in roots:
            roots[r] = len(reps)
            reps.append(r)
        gen_of[i] = roots[r]
        gen_sign[i] = s
    return gen_of, gen_sign, np.array(reps, dtype=np.int64)


def _as_fmpz(rows, ncols):
    return flint.fmpz_mat(len(rows), ncols, [int(x) for r in rows for x in r])


def build_space(N: int, sign: int = 0) -> ModSymSpace:
    """Weight-2 modular symbols of level ``N`` (squarefree), sign 0 or +1."""
    if N < 1 or not is_squarefree(N):
        raise ValueError(f"level {N} is not a squarefree positive integer")
    if sign not in (0, 1):
        raise ValueError("sign must be 0 or +1")
    p1 = p1_list(N)
    gen_of, gen_sign, reps = _two_term_classes(p1, sign)
    r = len(reps)
    # three-term relations on generators
    rels = set()
    for i in range(len(p1)):
        c, d = int(p1.cs[i]), int(p1.ds[i])
        row = [0] * r
        for cc, dd in ((c, d), (d, -c - d), (-c - d, c)):
            j = p1.index(cc, dd)
            if gen_of[j] >= 0:
                row[gen_of[j]] += int(gen_sign[j])
        if any(row):
            rels.add(tuple(primitive(row)))
    rels = sorted(rels)
    if rels and r:
        R = flint.fmpq_mat(_as_fmpz(rels, r)).rref()[0]
        pivots = []
        for i in range(R.nrows()):
            for j in range(r):
                if R[i, j] != 0:
                    pivots.append(j)
                    break
    else:
        R, pivots = None, []
    free = [j for j in range(r) if j not in set(pivots)]
    d = len(free)
    # rational images of generators in the basis of free generators
    images = [[flint.fmpq(0)] * d for _ in range(r)]
    for k, j in enumerate(free):
        images[j][k] = flint.fmpq(1)
    for i, pj in enumerate(pivots):
        images[pj] = [-R[i, j] for j in free]
    den = 1
    for row in images:
        for x in row:
            den = math.lcm(den, int(x.q))
    scaled = [[int(x * den) for x in row] for row in images]
    if d:
        H = _as_fmpz(scaled, d).hnf()
        basis = [[int(H[i, j]) for j in range(d)] for i in range(H.nrows())]
        basis = [b for b in basis if any(b)]
        Bm = flint.fmpq_mat(_as_fmpz(basis, d))
        P = flint.fmpq_mat(_as_fmpz(scaled, d)) * Bm.inv()
        proj = IntMatrix(d, r, tuple(int(P[j, i]) for i in range(d) for j in range(r)))
    else:
        proj = IntMatrix(0, r, ())
    # boundary map: cusp classes of squarefree level are the divisors of N
    cusp_ids = {q: i for i, q in enumerate(divisors(N))}
    bd = [[0] * r for _ in cusp_ids]
    for j, s in enumerate(reps):
        c, dd = int(p1.cs[s]), int(p1.ds[s])
        bd[cusp_ids[math.gcd(c, N)]][j] += 1
        bd[cusp_ids[math.gcd(dd, N)]][j] -= 1
    if d:
        bd_l = _solve_on_section(bd, proj, free)
        cusp = kernel_saturated(bd_l)
    else:
        cusp = IntMatrix(0, 0, ())
    return ModSymSpace(N, sign, p1, gen_of, gen_sign, reps, proj, free, cusp)


def _solve_on_section(rows, proj: IntMatrix, section: list[int]) -> IntMatrix:
    """Return X with X @ proj == rows (rows vanish on ker proj)."""
    d = proj.rows
    Ps = flint.fmpq_mat(d, d, [proj[i, j] for i in range(d) for j in section])
    Y = flint.fmpq_mat(len(rows), d, [row[j] for row in rows for j in section])
    X = Y * Ps.inv()
    vals = []
    for i in range(X.nrows()):
        for j in range(X.ncols()):
            x = X[i, j]
            if x.q != 1:
                raise ArithmeticError("non-integral map on the symbol lattice")
            vals.append(int(x.p))
    return IntMatrix(len(rows), d, tuple(vals))


def _hecke_prime_full(S: ModSymSpace, p: int) -> IntMatrix:
    """T_p (U_p if p | N) on the whole symbol lattice, via Merel's matrices."""
    key = ("full", p)
    if key in S._cache:
        return S._cache[key]
    d = S.dimension
    sec = S.section
    reps = S.gen_rep[sec]
    idx = kernels.p1_images(S.p1.cs[reps], S.p1.ds[reps], merel_matrices(p), S.level, S.p1.table)
    r = len(S.gen_rep)
    counts = np.zeros((r, len(sec)), dtype=np.int64)
    for col in range(len(sec)):
        ids = idx[col]
        ids = ids[ids >= 0]
        g = S.gen_of[ids]
        ok = g >= 0
        np.add.at(counts[:, col], g[ok], S.gen_sign[ids][ok])
    # image of section generators in lattice coordinates
    img = S.proj.to_flint() * flint.fmpz_mat(counts.tolist())
    Ps = flint.fmpq_mat(d, d, [S.proj[i, j] for i in range(d) for j in sec])
    X = flint.fmpq_mat(img) * Ps.inv()
    vals = []
    for i in range(d):
        for j in range(d):
            x = X[i, j]
            if x.q != 1:
                raise ArithmeticError("Hecke operator not integral on symbol lattice")
            vals.append(int(x.p))
    T = IntMatrix(d, d, tuple(vals))
    S._cache[key] = T
    return T


def _restrict(T: IntMatrix, B: IntMatrix) -> IntMatrix:
    """Matrix of T on the T-stable saturated sublattice with basis columns B."""
    k = B.cols
    if k == 0:
        return IntMatrix(0, 0, ())
    TB = T @ B
    Bf = flint.fmpq_mat(B.to_flint())
    X = Bf.solve(flint.fmpq_mat(TB.to_flint())) if B.rows == k else None
    if X is None:
        # least-squares-free solve: use k independent rows
        rows = _independent_rows(B)
        Bs = flint.fmpq_mat(k, k, [B[i, j] for i in rows for j in range(k)])
        Ys = flint.fmpq_mat(k, k, [TB[i, j] for i in rows for j in range(k)])
        X = Bs.inv() * Ys
    vals = []
    for i in range(k):
        for j in range(k):
            x = X[i, j]
            if x.q != 1:
                raise ArithmeticError("sublattice is not stable")
            vals.append(int(x.p))
    return IntMatrix(k, k, tuple(vals))


def _independent_rows(B: IntMatrix) -> list[int]:
    R = flint.fmpq_mat(B.T.to_flint()).rref()[0]
    rows = []
    for i in range(R.nrows()):
        for j in range(R.ncols()):
            if R[i, j] != 0:
                rows.append(j)
                break
    return rows


def hecke_operator(S: ModSymSpace, n: int, subspace: IntMatrix | None = None) -> IntMatrix:
    """Matrix of T_n on the cuspidal lattice (or a stable sublattice of it).

    ``subspace`` is a saturated basis in cuspidal coordinates; defaults to
    the whole cuspidal space.
    """
    if n < 1:
        raise ValueError("n must be positive")
    key = ("cusp", n)
    if key not in S._cache:
        S._cache[key] = _hecke_composite(S, n)
    T = S._cache[key]
    if subspace is None:
        return T
    return _restrict(T, subspace)


def _hecke_composite(S: ModSymSpace, n: int) -> IntMatrix:
    k = S.cuspidal_dimension
    if n == 1:
        return IntMatrix.identity(k)
    fac = factor(n)
    if len(fac) > 1:
        out = IntMatrix.identity(k)
        for q, e in fac.items():
            out = out @ hecke_operator(S, q ** e)
        return out
    (q, e), = fac.items()
    if e == 1:
        return _restrict(_hecke_prime_full(S, q), S.cuspidal)
    Tq = hecke_operator(S, q)
    prev = hecke_operator(S, q ** (e - 1))
    if S.level % q == 0:
        return Tq @ prev
    return Tq @ prev - hecke_operator(S, q ** (e - 2)).scale(q)


def new_subspace(S: ModSymSpace, N2: int) -> IntMatrix:
    """Saturated basis (cuspidal coordinates) of the part new at every q | N2.

    For squarefree level the q-new part is exactly the kernel of U_q^2 - 1:
    U_q is an involution there, while on q-old forms its eigenvalues have
    absolute value sqrt(q).
    """
    if S.level % N2:
        raise ValueError(f"N2={N2} does not divide the level {S.level}")
    key = ("new", N2)
    if key in S._cache:
        return S._cache[key]
    k = S.cuspidal_dimension
    B = IntMatrix.identity(k)
    for q in prime_divisors(N2):
        U = hecke_operator(S, q)
        A = (U @ U) - IntMatrix.identity(k)
        K = kernel_saturated(A @ B)
        B = B @ K if K.cols else IntMatrix(k, 0, ())
    S._cache[key] = B
    return B


# ---------------------------------------------------------------------------
# eigenform packets


@dataclass(frozen=True)
class EigenformPacket:
    """A rational Hecke eigensystem: ``ap[q]`` for primes (U_q when q | N)."""

    level: int
    ap: tuple[tuple[int, int], ...]
    label: str = ""
    degree: int = 1

    @property
    def eigenvalues(self) -> dict[int, int]:
        return dict(self.ap)

    def a(self, ell: int) -> int:
        return self.eigenvalues[ell]

    def good_eigenvalues(self) -> dict[int, int]:
        return {l: a for l, a in self.ap if self.level % l}

    def bad_eigenvalues(self) -> dict[int, int]:
        return {l: a for l, a in self.ap if self.level % l == 0}

    def agrees_with(self, other: dict[int, int]) -> bool:
        mine = self.eigenvalues
        return all(mine[l] == a for l, a in other.items() if l in mine)


@dataclass(frozen=True)
class SkippedClass:
    reason: str
    charpoly: tuple[int, ...]   # coefficients, constant term first
    dimension: int


@dataclass(frozen=True)
class Decomposition:
    packets: tuple[EigenformPacket, ...]
    vectors: tuple[tuple[int, ...], ...]     # eigenvectors in subspace coords
    skipped: tuple[SkippedClass, ...]


def _eig_on(T: IntMatrix, v) -> int:
    w = [sum(T[i, j] * v[j] for j in range(T.cols)) for i in range(T.rows)]
    i0 = next(i for i, x in enumerate(v) if x)
    lam, rem = divmod(w[i0], v[i0])
    if rem or any(w[i] != lam * v[i] for i in range(len(v))):
        raise ArithmeticError("not an eigenvector")
    return lam


def decompose(S: ModSymSpace, N2: int, bound: int | None = None, seed: int = 0) -> Decomposition:
    """Split the N2-new cuspidal space into rational eigenlines and the rest."""
    key = ("decomp", N2, bound, seed)
    if key in S._cache:
        return S._cache[key]
    W = new_subspace(S, N2)
    B = max(sturm_bound(S.level).bound, bound or 0)
    primes = list(primes_up_to(max(B, 2)))
    mats = {l: hecke_operator(S, l, W) for l in primes}
    k = W.cols
    rng = random.Random(seed)
    for attempt in range(12):
        coeffs = {l: rng.randint(-5, 5) for l in primes}
        if attempt == 0:
            coeffs = {l: (1 if i == 0 else rng.randint(-3, 3)) for i, l in enumerate(primes)}
        if k == 0:
            res = Decomposition((), (), ())
            S._cache[key] = res
            return res
        A = IntMatrix.zeros(k, k)
        for l, c in coeffs.items():
            if c:
                A = A + mats[l].scale(c)
        cp = A.to_flint().charpoly()
        fac = cp.factor()[1]
        packets, vecs, skipped, ok = [], [], [], True
        for f, m in fac:
            coeffs_f = [int(x) for x in f.coeffs()]
            if f.degree() == 1:
                root = -coeffs_f[0] // coeffs_f[1]
                K = kernel_saturated(A - IntMatrix.identity(k).scale(root))
                if K.cols != m:
                    ok = False
                    break
                if K.cols > 1:
                    # repeated eigenvalue of the combination: test simultaneity
                    if any(not _is_scalar_on(mats[l], K) for l in primes):
                        ok = False
                        break
                    skipped.append(SkippedClass("multiplicity > 1 rational class",
                                                tuple(coeffs_f), K.cols))
                    continue
                v = [K[i, 0] for i in range(k)]
                try:
                    ap = tuple((l, _eig_on(mats[l], v)) for l in primes)
                except ArithmeticError:
                    ok = False
                    break
                packets.append(EigenformPacket(S.level, ap))
                vecs.append(tuple(v))
            else:
                skipped.append(SkippedClass("skipped: coefficient degree > scope",
                                            tuple(coeffs_f), f.degree() * m))
        if ok:
            order = sorted(range(len(packets)), key=lambda i: packets[i].ap)
            packets = [packets[i] for i in order]
            vecs = [vecs[i] for i in order]
            labelled = tuple(EigenformPacket(p.level, p.ap, f"{S.level}.{chr(97 + i)}")
                             for i, p in enumerate(packets))
            res = Decomposition(labelled, tuple(vecs), tuple(skipped))
            S._cache[key] = res
            return res
    raise ArithmeticError(f"could not separate eigenspaces at level {S.level}")


def _is_scalar_on(T: IntMatrix, K: IntMatrix) -> bool:
    X = _restrict(T, K)
    d = X[0, 0]
    return X == IntMatrix.identity(K.cols).scale(d)


def newform_packets(S: ModSymSpace, N2: int, bound: int | None = None) -> list[EigenformPacket]:
    """Rational eigensystems of the N2-new cuspidal space.

    Classes of coefficient degree > 1 are listed in ``decompose(...).skipped``.
    """
    return list(decompose(S, N2, bound).packets)


@lru_cache(maxsize=64)
def plus_space(N: int) -> ModSymSpace:
    return build_space(N, sign=1)


def common_eigenspaces(mats: dict, seed: int = 0) -> list[tuple[dict, IntMatrix]]:
    """Rational simultaneous eigenspaces of commuting semisimple operators.

    Returns ``(eigenvalues, basis)`` pairs for every eigenspace on which all
    of ``mats`` act by rational scalars; the remaining (irrational) part is
    ignored.  Used with good-prime operators only, where multiplicities
    record old-form copies.
    """
    keys = sorted(mats)
    if not keys:
        return []
    k = mats[keys[0]].rows
    if k == 0:
        return []
    rng = random.Random(seed)
    for _ in range(16):
        A = IntMatrix.zeros(k, k)
        for l in keys:
            A = A + mats[l].scale(rng.randint(-6, 6))
        out, ok = [], True
        for f, m in A.to_flint().charpoly().factor()[1]:
            if f.degree() != 1:
                continue
            c = [int(x) for x in f.coeffs()]
            K = kernel_saturated(A - IntMatrix.identity(k).scale(-c[0] // c[1]))
            if K.cols != m or any(not _is_scalar_on(mats[l], K) for l in keys):
                ok = False
                break
            out.append(({l: _restrict(mats[l], K)[0, 0] for l in keys}, K))
        if ok:
            return sorted(out, key=lambda t: sorted(t[0].items()))
    raise ArithmeticError("could not separate simultaneous eigenspaces")
