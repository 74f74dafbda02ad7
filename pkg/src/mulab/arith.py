"""Local arithmetic of semistable elliptic curves and the level splitting.

Tamagawa exponents use the Tate parameter: at a prime l of multiplicative
reduction E is a twist by an unramified character of G_m / q^Z with
ord_l(q) = ord_l(Delta_min).  For odd p the twist does not change the
ramification of p-power torsion, and E[p^t] is unramified at l exactly
when p^t divides ord_l(q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import flint
import numpy as np

from .forms import class_number
from .linalg import padic_valuation
from .numtheory import (factor, is_fundamental_discriminant, is_prime,
                        kronecker, prime_divisors, primes_up_to)

__all__ = ["QuadraticField", "quadratic_field", "LevelSplitting", "split_level",
           "EllipticCurveModel", "minimal_model", "minimal_discriminant",
           "conductor", "ap", "TamagawaRecord", "tamagawa_exponent",
           "CRReport", "check_cr", "unit_root", "NotOrdinary",
           "trivial_character_prediction", "division_polynomial",
           "NotSemistable"]


# ---------------------------------------------------------------------------
# imaginary quadratic fields and level splitting


@dataclass(frozen=True)
class QuadraticField:
    D: int
    h: int
    u: int

    def splitting(self, q: int) -> str:
        k = kronecker(self.D, q)
        return {1: "split", -1: "inert", 0: "ramified"}[k]


@lru_cache(maxsize=256)
def quadratic_field(D: int) -> QuadraticField:
    if D >= 0 or not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a negative fundamental discriminant")
    u = {-3: 3, -4: 2}.get(D, 1)
    return QuadraticField(D, class_number(D), u)


@dataclass(frozen=True)
class LevelSplitting:
    N: int
    Nplus: int
    Nminus: int
    parity: str          # "odd" or "even" number of primes in N-

    @property
    def definite(self) -> bool:
        return self.parity == "odd"

    @property
    def note(self) -> str:
        return "" if self.definite else "indefinite case, out of scope"


def split_level(N: int, K: QuadraticField) -> LevelSplitting:
    if math.gcd(N, K.D) != 1:
        raise ValueError(f"gcd(N, D) = {math.gcd(N, K.D)} != 1")
    Np = Nm = 1
    count = 0
    for q, e in factor(N).items():
        if K.splitting(q) == "split":
            Np *= q ** e
        else:
            Nm *= q ** e
            count += 1
    return LevelSplitting(N, Np, Nm, "odd" if count % 2 else "even")


# ---------------------------------------------------------------------------
# Weierstrass models


class NotSemistable(ValueError):
    pass


@dataclass(frozen=True)
class EllipticCurveModel:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    @property
    def ainvs(self) -> tuple[int, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b_invariants(self) -> tuple[int, int, int, int]:
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def c4(self) -> int:
        b2, b4, _, _ = self.b_invariants
        return b2 * b2 - 24 * b4

    @property
    def c6(self) -> int:
        b2, b4, b6, _ = self.b_invariants
        return -b2 ** 3 + 36 * b2 * b4 - 216 * b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def __str__(self):
        return " ".join(map(str, self.ainvs))


def _model_from_c(c4: int, c6: int) -> EllipticCurveModel | None:
    """Integral reduced model with the given invariants, if one exists."""
    b2 = (-c6) % 12
    if b2 > 6:
        b2 -= 12
    num4 = b2 * b2 - c4
    if num4 % 24:
        return None
    b4 = num4 // 24
    num6 = -b2 ** 3 + 36 * b2 * b4 - c6
    if num6 % 216:
        return None
    b6 = num6 // 216
    a1 = b2 % 2
    a3 = b6 % 2
    if (b2 - a1) % 4 or (b4 - a1 * a3) % 2 or (b6 - a3) % 4:
        return None
    E = EllipticCurveModel(a1, (b2 - a1) // 4, a3, (b4 - a1 * a3) // 2, (b6 - a3) // 4)
    return E if (E.c4, E.c6) == (c4, c6) else None


@lru_cache(maxsize=4096)
def minimal_model(E: EllipticCurveModel) -> EllipticCurveModel:
    """Global minimal reduced model (Laska-Kraus-Connell)."""
    c4, c6, D = E.c4, E.c6, E.discriminant
    if D == 0:
        raise ValueError("singular Weierstrass model")
    u = 1
    for p in prime_divisors(math.gcd(c4, c6) if c4 else c6):
        d = 0
        while (c4 % p ** (4 * (d + 1)) == 0 and c6 % p ** (6 * (d + 1)) == 0
               and D % p ** (12 * (d + 1)) == 0):
            d += 1
        u *= p ** d
    # 2 and 3 may need a smaller scaling; try divisors of u, largest first
    for p in (2, 3):
        while u % p == 0:
            if any(_model_from_c(c4 // u ** 4, s * c6 // u ** 6) for s in (1, -1)):
                break
            u //= p
    for s in (1, -1):
        M = _model_from_c(c4 // u ** 4, s * c6 // u ** 6)
        if M is not None:
            return M
    raise ArithmeticError("no integral model found")


def minimal_discriminant(E: EllipticCurveModel) -> int:
    return minimal_model(E).discriminant


def conductor(E: EllipticCurveModel) -> int:
    """Conductor of a semistable curve; raises NotSemistable otherwise."""
    M = minimal_model(E)
    N = 1
    for l in prime_divisors(M.discriminant):
        if M.c4 % l == 0:
            raise NotSemistable(f"additive reduction at {l}")
        N *= l
    return N


def _count_points(E: EllipticCurveModel, l: int) -> int:
    """#E(F_l) for the (possibly singular) reduction, projective."""
    a1, a2, a3, a4, a6 = (x % l for x in E.ainvs)
    if l == 2:
        cnt = 1
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % 2 == 0:
                    cnt += 1
        return cnt
    b2, b4, b6, _ = E.b_invariants
    x = np.arange(l, dtype=np.int64)
    rhs = (((4 * x + b2 % l) * x % l + 2 * b4 % l) * x + b6 % l) % l
    sq = np.zeros(l, dtype=np.int64)
    sq[(x * x) % l] = 1
    # number of y with (2y + a1 x + a3)^2 = rhs: 1 + legendre(rhs)
    nsol = np.where(rhs == 0, 1, 2 * sq[rhs])
    return 1 + int(nsol.sum())


def ap(E: EllipticCurveModel, l: int) -> int:
    """Trace of Frobenius at ``l`` on the minimal model (+-1 or 0 if bad)."""
    M = minimal_model(E)
    if M.discriminant % l == 0 and M.c4 % l == 0:
        return 0
    return l + 1 - _count_points(M, l)


# ---------------------------------------------------------------------------
# Tamagawa exponents


@dataclass(frozen=True)
class TamagawaRecord:
    ell: int
    p: int
    t: int
    ord_delta: int


def tamagawa_exponent(E: EllipticCurveModel, ell: int, p: int) -> TamagawaRecord:
    if p == 2 or p == ell:
        raise ValueError("need an odd p different from l")
    M = minimal_model(E)
    v = int(padic_valuation(M.discriminant, ell))
    if v == 0:
        return TamagawaRecord(ell, p, 0, 0)
    if M.c4 % ell == 0:
        raise ValueError(f"l^2 | N at l = {ell}: outside the squarefree scope")
    return TamagawaRecord(ell, p, int(padic_valuation(v, p)), v)


# ---------------------------------------------------------------------------
# hypothesis CR


@lru_cache(maxsize=256)
def division_polynomial(ainvs: tuple[int, ...], n: int):
    """f_n in Z[x]: psi_n for odd n, psi_n / psi_2 for even n."""
    E = EllipticCurveModel(*ainvs)
    b2, b4, b6, b8 = E.b_invariants
    P = flint.fmpz_poly
    F = P([b6, 2 * b4, b2, 4])
    f = {0: P([0]), 1: P([1]), 2: P([1]),
         3: P([b8, 3 * b6, 3 * b4, b2, 3]),
         4: P([b4 * b8 - b6 * b6, b2 * b8 - b4 * b6, 10 * b8, 10 * b6, 5 * b4, b2, 2])}

    def get(k):
        if k in f:
            return f[k]
        m = k // 2
        if k % 2:
            if m % 2 == 0:
                r = F * F * get(m + 2) * get(m) ** 3 - get(m - 1) * get(m + 1) ** 3
            else:
                r = get(m + 2) * get(m) ** 3 - F * F * get(m - 1) * get(m + 1) ** 3
        else:
            r = get(m) * (get(m + 2) * get(m - 1) ** 2 - get(m - 2) * get(m + 1) ** 2)
        f[k] = r
        return r

    for k in range(5, n + 1):
        get(k)
    return get(n)


@dataclass(frozen=True)
class CRReport:
    p: int
    surjective: str                 # "surjective", "not surjective", "unknown"
    evidence: tuple[str, ...]
    primes: tuple[tuple[int, int, bool], ...]   # (q, q mod p, ramified at q)
    clause2: bool

    @property
    def holds(self) -> bool:
        return self.surjective == "surjective" and self.clause2

    @property
    def verdict(self) -> str:
        if self.surjective == "unknown":
            return "unknown"
        return "holds" if self.holds else "fails"


def _surjectivity(E: EllipticCurveModel, N: int, p: int, bound: int) -> tuple[str, list[str]]:
    """Certificate for p >= 5 that the mod-p image contains SL_2(F_p).

    Three Frobenius elements with the shapes of the classical criterion:
    tr^2 - 4 det a nonzero square, a non-square, and u = tr^2/det outside
    {0, 1, 2, 4} with u^2 - 3u + 1 != 0.  Together with det = cyclotomic
    character this gives the whole of GL_2(F_p).
    """
    found: dict[str, int] = {}
    for l in primes_up_to(bound):
        if N % l == 0 or l == p:
            continue
        a = ap(E, l) % p
        d = l % p
        disc = (a * a - 4 * d) % p
        if disc and "square" not in found and kronecker(disc, p) == 1:
            found["square"] = l
        if disc and "nonsquare" not in found and kronecker(disc, p) == -1:
            found["nonsquare"] = l
        if "u" not in found:
            uu = a * a * pow(d, -1, p) % p
            if uu not in (0, 1, 2, 4) and (uu * uu - 3 * uu + 1) % p:
                found["u"] = l
        if len(found) == 3:
            return "surjective", [f"Frob_{found[k]} ({k})" for k in ("square", "nonsquare", "u")]
    ev = [f"criterion incomplete up to {bound}: {sorted(found.items())}"]
    fp = division_polynomial(E.ainvs, p)
    degs = sorted(g.degree() for g, _ in fp.factor()[1])
    if len(degs) > 1:
        ev.append(f"division polynomial f_{p} factors with degrees {degs}")
        return "not surjective", ev
    return "unknown", ev


def check_cr(E: EllipticCurveModel, Nminus: int, p: int, bound: int = 1000) -> CRReport:
    if p < 5 or not is_prime(p):
        raise ValueError("CR is checked for primes p >= 5")
    M = minimal_model(E)
    N = conductor(M)
    if N % Nminus:
        raise ValueError("N- must divide the conductor")
    surj, ev = _surjectivity(M, N, p, bound)
    per = []
    ok = True
    for q in prime_divisors(Nminus):
        ram = int(padic_valuation(M.discriminant, q)) % p != 0
        per.append((q, q % p, ram))
        if q % p in (1, p - 1) and not ram:
            ok = False
    return CRReport(p, surj, tuple(ev), tuple(per), ok)


# ---------------------------------------------------------------------------
# unit roots and trivial-character predictions


class NotOrdinary(ValueError):
    pass


def unit_root(a_p: int, p: int, m: int) -> int:
    """alpha mod p^m with alpha^2 - a_p alpha + p = 0 and alpha = a_p mod p."""
    if a_p % p == 0:
        raise NotOrdinary("not ordinary; use ± theory")
    x = a_p % p
    pk = p
    for _ in range(m.bit_length() + 1):
        pk = min(pk * pk, p ** m)
        fx = x * x - a_p * x + p
        dfx = 2 * x - a_p
        x = (x - fx * pow(dfx, -1, pk)) % pk
    return x % p ** m


def trivial_character_prediction(E: EllipticCurveModel, K: QuadraticField, p: int,
                                 selmer_order: int) -> tuple[int, int]:
    """Predicted ord_p at the trivial character for the minimal and Greenberg
    Selmer groups, from the Selmer order, the p-parts of E(k_v) for v | p
    and the Tamagawa exponents at the places of K over N+ (resp. N).
    """
    M = minimal_model(E)
    N = conductor(M)
    if K.D % p == 0 or N % p == 0:
        raise ValueError("need p prime to N D")
    a = ap(M, p)
    if K.splitting(p) == "split":
        local = 2 * int(padic_valuation(p + 1 - a, p))      # two places, k_v = F_p
    else:
        local = int(padic_valuation(p * p + 1 - (a * a - 2 * p), p))
    if selmer_order < 1:
        raise ValueError("the Selmer order is a positive integer")
    base = int(padic_valuation(selmer_order, p)) + 2 * local
    split = split_level(N, K)
    tplus = sum(tamagawa_exponent(M, l, p).t for l in prime_divisors(split.Nplus))
    tminus = sum(tamagawa_exponent(M, l, p).t for l in prime_divisors(split.Nminus))
    minimal = base + 2 * tplus               # two places of K above each split l
    greenberg = minimal + tminus             # one place above each inert l
    return minimal, greenberg
