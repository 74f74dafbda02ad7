"""Hot inner loops, each with a numba kernel and a vectorised numpy twin.

The public wrappers dispatch on :data:`mulab._accel.USE_NUMBA`.  Both
paths return identical arrays; ``tests/test_kernels.py`` checks this and
``benchmarks/bench_kernels.py`` times them against each other.
"""

from __future__ import annotations

import flint
import numpy as np

from . import _accel
from ._accel import njit

# ---------------------------------------------------------------------------
# P^1(Z/N) action of integer matrices (Manin symbols)


@njit
def _p1_images_nb(cs, ds, mats, N, table):
    out = np.empty((cs.shape[0], mats.shape[0]), dtype=np.int64)
    for s in range(cs.shape[0]):
        c = cs[s]
        d = ds[s]
        for k in range(mats.shape[0]):
            a = mats[k, 0]
            b = mats[k, 1]
            cc = mats[k, 2]
            dd = mats[k, 3]
            u = (c * a + d * cc) % N
            v = (c * b + d * dd) % N
            out[s, k] = table[u, v]
    return out


def _p1_images_np(cs, ds, mats, N, table):
    a, b, c2, d2 = (mats[:, i][None, :] for i in range(4))
    u = (cs[:, None] * a + ds[:, None] * c2) % N
    v = (cs[:, None] * b + ds[:, None] * d2) % N
    return table[u, v]


def p1_images(cs, ds, mats, N, table):
    """Index of ``(c:d) * g`` in P^1(Z/N) for each symbol and matrix.

    ``table[u, v]`` holds the normalised index of ``(u:v)`` or -1 when
    ``gcd(u, v, N) != 1``.
    """
    cs = np.ascontiguousarray(cs, dtype=np.int64)
    ds = np.ascontiguousarray(ds, dtype=np.int64)
    mats = np.ascontiguousarray(mats, dtype=np.int64).reshape(-1, 4)
    if _accel.USE_NUMBA:
        return _p1_images_nb(cs, ds, mats, np.int64(N), table)
    return _p1_images_np(cs, ds, mats, N, table)


# ---------------------------------------------------------------------------
# Short vectors of positive definite integral quadratic forms
#
# Forms are given by an even Gram matrix G (G_ii even) with Q(x) = x^T G x / 2.


def _cholesky_coeffs(G):
    Gf = np.asarray(G, dtype=np.float64) / 2.0
    n = Gf.shape[0]
    q = Gf.copy()
    for i in range(n):
        for j in range(i + 1, n):
            q[j, i] = q[i, j]
            q[i, j] = q[i, j] / q[i, i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k, l] -= q[k, i] * q[i, l]
    return q


@njit
def _fincke_pohst_nb(G, q, bound, maxcount):
    n = G.shape[0]
    eps = 1e-7
    out = np.zeros((maxcount, n), dtype=np.int64)
    cnt = 0
    x = np.zeros(n, dtype=np.int64)
    T = np.zeros(n)
    U = np.zeros(n)
    L = np.zeros(n, dtype=np.int64)
    i = n - 1
    T[i] = bound
    U[i] = 0.0
    overflow = False
    # initialise level i
    z = np.sqrt(max(T[i], 0.0) / q[i, i] + eps)
    L[i] = int(np.floor(z - U[i]))
    x[i] = int(np.ceil(-z - U[i])) - 1
    while True:
        x[i] += 1
        if x[i] > L[i]:
            i += 1
            if i >= n:
                break
            continue
        if i > 0:
            t = x[i] + U[i]
            T[i - 1] = T[i] - q[i, i] * t * t
            i -= 1
            s = 0.0
            for j in range(i + 1, n):
                s += q[i, j] * x[j]
            U[i] = s
            z = np.sqrt(max(T[i], 0.0) / q[i, i] + eps)
            L[i] = int(np.floor(z - U[i]))
            x[i] = int(np.ceil(-z - U[i])) - 1
        else:
            val = 0
            for a in range(n):
                for b in range(n):
                    val += G[a, b] * x[a] * x[b]
            val //= 2
            if val <= bound:
                if cnt < maxcount:
                    for a in range(n):
                        out[cnt, a] = x[a]
                else:
                    overflow = True
                cnt += 1
    return out, cnt, overflow


def _box_bounds(G, bound):
    Gf = np.asarray(G, dtype=np.float64) / 2.0
    inv = np.linalg.inv(Gf)
    return np.floor(np.sqrt(np.maximum(bound * np.diag(inv), 0.0)) + 1e-7).astype(np.int64)


def _fincke_pohst_np(G, bound, chunk=1 << 18):
    n = G.shape[0]
    r = _box_bounds(G, bound)
    axes = [np.arange(-ri, ri + 1, dtype=np.int64) for ri in r]
    # enumerate the box in slabs over the first coordinate
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, n - 1) \
        if n > 1 else np.zeros((1, 0), dtype=np.int64)
    found = []
    for x0 in axes[0]:
        for start in range(0, rest.shape[0], chunk):
            blk = rest[start:start + chunk]
            X = np.concatenate([np.full((blk.shape[0], 1), x0, dtype=np.int64), blk], axis=1)
            vals = np.einsum("ij,jk,ik->i", X, G, X) // 2
            found.append(X[vals <= bound])
    if not found:
        return np.zeros((0, n), dtype=np.int64)
    return np.concatenate(found, axis=0)


def short_vectors(G, bound: int, maxcount: int = 2_000_000) -> np.ndarray:
    """All integer vectors with ``x^T G x / 2 <= bound`` (both signs, incl. 0).

    Rows are sorted lexicographically so both backends agree exactly.
    """
    G = np.ascontiguousarray(np.asarray(G, dtype=np.int64))
    # enumerate in an LLL-reduced basis; floating point Cholesky data of a
    # skewed Gram matrix is too inaccurate otherwise
    Gr, T = _lll_gram(G)
    X = _enumerate(Gr, bound, maxcount)
    if T is not None:
        X = X @ T
    order = np.lexsort(X.T[::-1])
    return X[order]


def _lll_gram(G):
    if G.shape[0] < 2:
        return G, None
    R, T = flint.fmpz_mat(G.tolist()).lll(transform=True, rep="gram", gram="exact")
    to_np = lambda M: np.array([[int(M[i, j]) for j in range(M.ncols())]
                                for i in range(M.nrows())], dtype=np.int64)
    return np.ascontiguousarray(to_np(R)), to_np(T)


def _enumerate(G, bound, maxcount):
    if _accel.USE_NUMBA:
        q = _cholesky_coeffs(G)
        cap = 4096
        while True:
            out, cnt, overflow = _fincke_pohst_nb(G, q, float(bound), cap)
            if not overflow:
                X = out[:cnt]
                break
            if cnt > maxcount:
                raise OverflowError(f"more than {maxcount} vectors below {bound}")
            cap = cnt + 1
    else:
        X = _fincke_pohst_np(G, bound)
        if X.shape[0] > maxcount:
            raise OverflowError(f"more than {maxcount} vectors below {bound}")
    return X


def quad_values(G, X) -> np.ndarray:
    G = np.asarray(G, dtype=np.int64)
    return np.einsum("ij,jk,ik->i", X, G, X) // 2


def theta_counts(G, bound: int) -> np.ndarray:
    """``c[n] = #{x : Q(x) = n}`` for ``0 <= n <= bound``."""
    X = short_vectors(G, bound)
    return np.bincount(quad_values(G, X), minlength=bound + 1)[:bound + 1]


# ---------------------------------------------------------------------------
# Gaussian elimination over F_p


@njit
def _rank_mod_p_nb(A, p):
    A = A.copy() % p
    m, n = A.shape
    r = 0
    for c in range(n):
        piv = -1
        for i in range(r, m):
            if A[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(n):
                tmp = A[r, j]
                A[r, j] = A[piv, j]
                A[piv, j] = tmp
        inv = 1
        e = p - 2
        b = A[r, c]
        while e > 0:
            if e & 1:
                inv = inv * b % p
            b = b * b % p
            e >>= 1
        for j in range(n):
            A[r, j] = A[r, j] * inv % p
        for i in range(m):
            if i != r and A[i, c] != 0:
                f = A[i, c]
                for j in range(n):
                    A[i, j] = (A[i, j] - f * A[r, j]) % p
        r += 1
        if r == m:
            break
    return r


def _rank_mod_p_np(A, p):
    A = A.copy() % p
    m, n = A.shape
    r = 0
    for c in range(n):
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * pow(int(A[r, c]), p - 2, p) % p
        f = A[:, c].copy()
        f[r] = 0
        A = (A - np.outer(f, A[r])) % p
        r += 1
        if r == m:
            break
    return r


def rank_mod_p(A, p: int) -> int:
    """Rank over F_p of an integer matrix (``p`` below 2^31)."""
    A = np.asarray(A, dtype=object)
    if A.size == 0:
        return 0
    A = np.ascontiguousarray((A % p).astype(np.int64))
    if _accel.USE_NUMBA:
        return int(_rank_mod_p_nb(A, np.int64(p)))
    return int(_rank_mod_p_np(A, p))
