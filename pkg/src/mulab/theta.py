"""Gross points and anticyclotomic theta elements.

Conventions.  ``O_m`` is the order of conductor p^m in K.  Gross points of
conductor p^m are the right ideals phi(a) J_m, a running over invertible
O_m-ideals, where J_0 > J_1 > ... is a chain of p-neighbours whose left
orders contain phi(O_m) optimally.  The theta element of layer n is built
from conductor p^(n+1): the p-Sylow subgroup of Pic(O_{p^(n+1)}) is cyclic
of order p^n (p prime to h_K and p >= 5), and this is G_n = Z/p^n.

Group-ring elements of Z[Z/p^n] are coefficient tuples indexed by the
exponent of a fixed generator gamma; the labels at different layers are
compatible under the norm maps.  The Iwasawa variable is T = gamma - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import flint
import numpy as np

from .arith import QuadraticField, split_level
from .brandt import BrandtModule, DefiniteEigenvector, _neighbours, class_index
from .forms import Form, compose, identity_form, power, reduce_form, reduced_forms
from .kernels import quad_values, short_vectors
from .linalg import padic_valuation
from .numtheory import kronecker
from .quaternion import Lattice

__all__ = ["RingClassGroup", "GrossPointSet", "ThetaElement", "InvariantPair",
           "ring_class_group", "gross_points", "theta_element", "theta_elements",
           "norm_relation_check", "regularize", "omega_factors", "xi",
           "group_ring_mul", "corestriction", "project", "mu_lambda",
           "mu_lambda_poly", "to_power_series", "lambda_p", "HeegnerViolation",
           "LAYER_CAP"]

LAYER_CAP = 2


class HeegnerViolation(ValueError):
    pass


# ---------------------------------------------------------------------------
# ring class groups


def _coprime_rep(f: Form, p: int) -> Form:
    """An equivalent form whose first coefficient is prime to p."""
    if f.a % p:
        return f
    if f.c % p:
        return Form(f.c, -f.b, f.a)
    # f(1, 1) = a + b + c is prime to p when p | a and p | c
    # (p cannot divide b too, the form being primitive)
    return Form(f.a + f.b + f.c, f.b + 2 * f.c, f.c)


def _down(f: Form, p: int) -> Form:
    """Image of the class of f under Pic(O_{m}) -> Pic(O_{m-1}); p must not divide f.a."""
    D = f.disc // (p * p)
    a = f.a
    pinv = pow(p, -1, 4 * a)
    B = (f.b * pinv) % (2 * a)
    if (B * B - D) % (4 * a):
        raise ArithmeticError("form does not descend")
    return reduce_form(Form(a, B, (B * B - D) // (4 * a)))


@dataclass(frozen=True)
class RingClassGroup:
    """Pic(O_{p^m}) for K of discriminant D, as reduced forms of disc D p^(2m).

    ``labels`` maps each reduced form to its image in Z/p^(m-1), the p-Sylow
    quotient, through a generator chosen compatibly along the tower.
    """

    D: int
    p: int
    m: int
    forms: tuple[Form, ...]
    labels: dict

    @property
    def conductor(self) -> int:
        return self.p ** self.m

    @property
    def disc(self) -> int:
        return self.D * self.p ** (2 * self.m)

    @property
    def order(self) -> int:
        return len(self.forms)

    @property
    def quotient_order(self) -> int:
        return self.p ** max(self.m - 1, 0)


@lru_cache(maxsize=64)
def _tower(D: int, p: int, top: int) -> tuple[RingClassGroup, ...]:
    groups: list[RingClassGroup] = []
    gen = None
    for m in range(top, -1, -1):
        disc = D * p ** (2 * m)
        forms = reduced_forms(disc)
        h = len(forms)
        q = p ** max(m - 1, 0)
        labels: dict = {}
        if q == 1:
            labels = {f: 0 for f in forms}
        else:
            e = h // q
            if h % q or math.gcd(e, p) != 1:
                raise ArithmeticError(f"p-part of Pic(O_{p}^{m}) is not cyclic of order {q}")
            if gen is None:
                for f in forms:
                    g = power(f, e)
                    if power(g, q // p) != identity_form(disc):
                        gen = g
                        break
                else:
                    raise ArithmeticError("no generator of the p-Sylow subgroup")
            table = {}
            x = identity_form(disc)
            for k in range(q):
                table[x] = k
                x = compose(x, gen)
            if len(table) != q:
                raise ArithmeticError("generator has the wrong order")
            labels = {f: table[power(f, e)] for f in forms}
        groups.append(RingClassGroup(D, p, m, forms, labels))
        if gen is not None and m >= 2:
            gen = _down(_coprime_rep(gen, p), p)
        else:
            gen = None
    return tuple(reversed(groups))


def ring_class_group(K: QuadraticField, p: int, m: int, top: int | None = None) -> RingClassGroup:
    """Pic of the order of conductor p^m, labelled compatibly up to conductor p^top."""
    if K.D % p == 0 or K.h % p == 0 or p < 5:
        raise ValueError("need p >= 5 prime to D h_K")
    top = max(m, LAYER_CAP + 1) if top is None else top
    G = _tower(K.D, p, top)[m]
    if m >= 1:
        expect = K.h * p ** (m - 1) * (p - kronecker(K.D, p)) // K.u
        if G.order != expect:
            raise ArithmeticError(f"class number {G.order} differs from {expect}")
    return G


# ---------------------------------------------------------------------------
# Gross points


@dataclass(frozen=True)
class GrossPointSet:
    """Gross points of conductor p^m, one for each class of Pic(O_{p^m})."""

    Nplus: int
    Nminus: int
    D: int
    p: int
    m: int
    embedding: tuple        # phi(omega) in the algebra basis 1, i, j, k
    forms: tuple[Form, ...]
    classes: tuple[int, ...]   # ideal class index of each point
    labels: tuple[int, ...]    # image in Z/p^(m-1)

    @property
    def layer(self) -> int:
        return max(self.m - 1, 0)

    def __len__(self) -> int:
        return len(self.forms)


def _omega(D: int) -> tuple[int, int]:
    """(trace, norm) of the generator omega of O_K."""
    if D % 4 == 0:
        return 0, -D // 4
    return 1, (1 - D) // 4


def _embedding(M: BrandtModule, D: int) -> tuple[int, tuple]:
    """A class i and phi(omega) in O_L(I_i), found among short vectors."""
    t, n = _omega(D)
    for i, I in enumerate(M.ideals):
        O = I.left_order()
        G = np.array(O.scaled_gram(1), dtype=np.int64)
        X = short_vectors(G, n)
        for row in X[quad_values(G, X) == n]:
            x = O.element([int(c) for c in row])
            if 2 * x[0] == t:
                return i, x
    raise HeegnerViolation("no optimal embedding of O_K into any left order")


def _scal(c, x):
    return tuple(c * v for v in x)


def _add(x, y):
    return tuple(a + b for a, b in zip(x, y))


@lru_cache(maxsize=64)
def _chain(M: BrandtModule, D: int, p: int, top: int):
    """J_0 > J_1 > ... > J_top with O_L(J_m) meeting phi(K) in phi(O_{p^m})."""
    i0, x = _embedding(M, D)
    J, nJ = M.ideals[i0], M.norms[i0]
    chain = [(J, nJ)]
    for m in range(1, top + 1):
        found = None
        for Jp in _neighbours(J, nJ, M.order, p):
            L = Jp.left_order()
            if L.contains(_scal(p ** m, x)) and not L.contains(_scal(p ** (m - 1), x)):
                found = Jp
                break
        if found is None:
            raise ArithmeticError("no optimal p-neighbour")
        J, nJ = found, nJ * p
        chain.append((J, nJ))
    return x, tuple(chain)


def _check_heegner(M: BrandtModule, K: QuadraticField, p: int) -> None:
    N = M.level
    if math.gcd(K.D * p, N) != 1:
        raise HeegnerViolation("need gcd(D p, N) = 1")
    s = split_level(N, K)
    if (s.Nplus, s.Nminus) != (M.Nplus, M.Nminus):
        raise HeegnerViolation(f"K = Q(sqrt {K.D}) splits N as ({s.Nplus}, {s.Nminus}), "
                               f"module has ({M.Nplus}, {M.Nminus})")


def gross_points(M: BrandtModule, K: QuadraticField, p: int, m: int,
                 top: int | None = None) -> GrossPointSet:
    """Gross points of conductor p^m on the ideal classes of M.

    The point attached to the class of the form (a, b, c) (with p prime to a)
    is phi(a) J_m for the ideal a = [a, (-b + sqrt(D p^(2m)))/2].
    """
    _check_heegner(M, K, p)
    top = max(m, LAYER_CAP + 1) if top is None else top
    G = ring_class_group(K, p, m, top)
    x, chain = _chain(M, K.D, p, top)
    J, nJ = chain[m]
    t, _ = _omega(K.D)
    delta = _add(_scal(2, x), (-t, 0, 0, 0))          # phi(sqrt D)
    root = _scal(p ** m, delta)
    Jv = J.vectors()
    alg = M.alg
    classes, forms, labels = [], [], []
    for f in G.forms:
        r = _coprime_rep(f, p)
        gens = [(r.a, 0, 0, 0), _scal(Fraction(1, 2), _add((-r.b, 0, 0, 0), root))]
        L = Lattice.from_gens(alg, [alg.mul(g, v) for g in gens for v in Jv])
        classes.append(class_index(M, L, nJ * r.a))
        forms.append(f)
        labels.append(G.labels[f])
    return GrossPointSet(M.Nplus, M.Nminus, K.D, p, m, tuple(x), tuple(forms),
                         tuple(classes), tuple(labels))


# ---------------------------------------------------------------------------
# theta elements


@dataclass(frozen=True)
class ThetaElement:
    layer: int
    p: int
    coeffs: tuple[int, ...]      # coefficient of gamma^k, k in Z/p^layer
    packet: str
    conductor_exponent: int
    tag: str = "Gross-period side: psi(P) = w_i g_i"

    @property
    def order(self) -> int:
        return self.p ** self.layer

    def involution(self) -> "ThetaElement":
        q = self.order
        c = tuple(self.coeffs[(-k) % q] for k in range(q))
        return ThetaElement(self.layer, self.p, c, self.packet, self.conductor_exponent, self.tag)


def theta_element(G: GrossPointSet, g: DefiniteEigenvector) -> ThetaElement:
    q = G.p ** G.layer
    c = [0] * q
    for i, s in zip(G.classes, G.labels):
        c[s % q] += g.weights[i] * g.vector[i]
    return ThetaElement(G.layer, G.p, tuple(c), g.packet, G.m)


def theta_elements(M: BrandtModule, K: QuadraticField, p: int, g: DefiniteEigenvector,
                   layers: Sequence[int] = (0, 1, 2)) -> dict[int, ThetaElement]:
    """theta_n for the given layers, from conductors p^(n+1) on one tower."""
    top = max(max(layers) + 1, LAYER_CAP + 1)
    return {n: theta_element(gross_points(M, K, p, n + 1, top), g) for n in layers}


# ---------------------------------------------------------------------------
# group ring of Z/p^n


def group_ring_mul(x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    q = len(x)
    if len(y) != q:
        raise ValueError("elements of different group rings")
    out = [0] * q
    for i, a in enumerate(x):
        if a:
            for j, b in enumerate(y):
                out[(i + j) % q] += a * b
    return tuple(out)


def project(x: Sequence[int], q: int) -> tuple[int, ...]:
    """Image under Z[Z/len(x)] -> Z[Z/q]."""
    if len(x) % q:
        raise ValueError("incompatible layers")
    out = [0] * q
    for k, a in enumerate(x):
        out[k % q] += a
    return tuple(out)


def corestriction(x: Sequence[int], q: int) -> tuple[int, ...]:
    """Z[Z/len(x)] -> Z[Z/q]: each coefficient spread over its preimages."""
    r = len(x)
    if q % r:
        raise ValueError("incompatible layers")
    return tuple(x[k % r] for k in range(q))


def xi(p: int, k: int, n: int) -> tuple[int, ...]:
    """xi_k = sum_{j < p} gamma^(j p^(k-1)) in Z[Z/p^n]."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    q = p ** n
    out = [0] * q
    for j in range(p):
        out[(j * p ** (k - 1)) % q] += 1
    return tuple(out)


def omega_factors(p: int, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(omega_n^+, omega_n^-): products of xi_k over even, resp. odd, k <= n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    one = tuple([1] + [0] * (p ** n - 1))
    plus, minus = one, one
    for k in range(1, n + 1):
        if k % 2 == 0:
            plus = group_ring_mul(plus, xi(p, k, n))
        else:
            minus = group_ring_mul(minus, xi(p, k, n))
    return plus, minus


def to_power_series(x: Sequence[int]) -> flint.fmpz_poly:
    """sum c_k gamma^k as a polynomial in T = gamma - 1 (degree < len(x))."""
    g = flint.fmpz_poly([1, 1])
    out = flint.fmpz_poly(0)
    for c in reversed(x):      # Horner in gamma
        out = out * g + c
    return out


def lambda_p(theta: ThetaElement) -> tuple[int, ...]:
    """theta * theta^iota, the finite-level square."""
    return group_ring_mul(theta.coeffs, theta.involution().coeffs)


# ---------------------------------------------------------------------------
# norm relations


def regularize(upper: ThetaElement, lower: ThetaElement, alpha: int, k: int) -> tuple[int, ...]:
    """alpha^(-n) (theta_n - alpha^(-1) nu(theta_(n-1))) mod p^k."""
    n = upper.layer
    if lower.layer != n - 1:
        raise ValueError("incompatible layers")
    pk = upper.p ** k
    ai = pow(alpha, -1, pk)
    nu = corestriction(lower.coeffs, upper.order)
    s = pow(ai, n, pk)
    return tuple(s * (a - ai * b) % pk for a, b in zip(upper.coeffs, nu))


def norm_relation_check(thetas: Sequence[ThetaElement], mode: str,
                        alpha: int | None = None, precision: int = 2) -> bool:
    """Compatibility of theta elements under the norm maps.

    supersingular: thetas = (theta_n, theta_(n-2)) and
        pi(theta_n) = -xi_(n-1) theta_(n-2) exactly in Z[G_(n-1)].
    ordinary: thetas = (theta_n, theta_(n-1), theta_(n-2)) and the
        alpha-regularized elements agree mod p^precision.
    """
    if mode == "supersingular":
        hi, lo = thetas
        if hi.layer - lo.layer != 2 or lo.conductor_exponent < 1:
            raise ValueError("incompatible layers")
        q = hi.order // hi.p
        lhs = project(hi.coeffs, q)
        rhs = tuple(-c for c in corestriction(lo.coeffs, q))
        return lhs == rhs
    if mode == "ordinary":
        hi, mid, lo = thetas
        if not (hi.layer == mid.layer + 1 == lo.layer + 2) or lo.conductor_exponent < 1:
            raise ValueError("incompatible layers")
        if alpha is None:
            raise ValueError("ordinary mode needs the unit root")
        pk = hi.p ** precision
        Ln = regularize(hi, mid, alpha, precision)
        Lm = regularize(mid, lo, alpha, precision)
        return tuple(c % pk for c in project(Ln, mid.order)) == Lm
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# mu and lambda


@dataclass(frozen=True)
class InvariantPair:
    mu: int                  # exact when mu_exact, else a lower bound (= precision)
    mu_exact: bool
    lam: int | None          # None: undetermined at this precision
    precision: int

    def describe(self) -> dict:
        return {"mu": self.mu if self.mu_exact else f">= {self.precision}",
                "lambda": self.lam if self.lam is not None else "undetermined",
                "precision": self.precision}


def mu_lambda_poly(coeffs: Sequence[int], p: int, precision: int) -> InvariantPair:
    """mu and lambda of sum c_i T^i, read modulo p^precision."""
    pk = p ** precision
    red = [int(c) % pk for c in coeffs]
    nz = [c for c in red if c]
    if not nz:
        return InvariantPair(precision, False, None, precision)
    mu = min(int(padic_valuation(c, p)) for c in nz)
    pm = p ** (mu + 1)
    lam = next(i for i, c in enumerate(red) if c % pm)
    return InvariantPair(mu, True, lam, precision)


def _divide_omega(theta: ThetaElement) -> flint.fmpz_poly:
    p, n = theta.p, theta.layer
    plus, minus = omega_factors(p, n)
    w = to_power_series(minus if n % 2 == 0 else plus)
    f = to_power_series(theta.coeffs)
    q, r = divmod(f, w)
    if r != 0:
        raise ArithmeticError("theta is not divisible by the expected omega factor")
    other = to_power_series(plus if n % 2 == 0 else minus) * flint.fmpz_poly([0, 1])
    return q % other


def mu_lambda(theta: ThetaElement, precision: int, pm: bool = False,
              previous: ThetaElement | None = None) -> InvariantPair:
    """mu and lambda of theta_n in the variable T.

    With ``pm`` the factor omega_n^- (n even) or omega_n^+ (n odd) is divided
    out first.  When ``previous`` is given, lambda is reported only if the
    two layers agree.
    """
    if theta.layer < 1:
        raise ValueError("need a layer n >= 1")
    f = _divide_omega(theta) if pm else to_power_series(theta.coeffs)
    coeffs = [int(c) for c in f.coeffs()] or [0]
    out = mu_lambda_poly(coeffs, theta.p, precision)
    if previous is not None and out.lam is not None and previous.layer >= 1:
        prev = mu_lambda(previous, precision, pm)
        if prev.lam != out.lam or prev.mu != out.mu:
            out = InvariantPair(out.mu, out.mu_exact, None, precision)
    return out
