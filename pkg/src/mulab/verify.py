"""Checks of the exact exponent identities, with hypothesis bookkeeping.

A report never says "fail" because a hypothesis is missing: that is
"skipped", with the evidence attached.  "fail" means both sides were
computed and differ.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Sequence

from .arith import (EllipticCurveModel, QuadraticField, ap, check_cr, conductor,
                    minimal_model, split_level, tamagawa_exponent)
from .brandt import (definite_eigenvector, freeness_check, ideal_class_module,
                     unit_pairing_check, xi_exponent)
from .hecke import congruence_exponent
from .modsym import EigenformPacket, newform_packets, plus_space
from .numtheory import is_prime, prime_divisors, primes_up_to

__all__ = ["Hypothesis", "VerificationReport", "AdmissiblePrime", "MuPrediction",
           "curve_packet", "verify_mu_main_conjecture", "verify_level_lowering",
           "level_lowering_all_orders", "greenberg_mu_prediction", "admissible_primes",
           "consistency_triangle", "ramified_primes_mod_p"]


@dataclass(frozen=True)
class Hypothesis:
    name: str
    verdict: str          # "holds", "fails" or "unknown"
    evidence: str


@dataclass(frozen=True)
class VerificationReport:
    statement: str
    anchors: tuple[str, ...]
    inputs: dict
    hypotheses: tuple[Hypothesis, ...]
    lhs: object
    rhs: object
    verdict: str          # "pass", "fail" or "skipped"
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = asdict(self)
        d["anchors"] = list(self.anchors)
        d["hypotheses"] = [asdict(h) for h in self.hypotheses]
        return d


def _skipped(statement, anchors, inputs, hyps, details=None) -> VerificationReport:
    return VerificationReport(statement, anchors, inputs, tuple(hyps), None, None,
                              "skipped", details or {})


@lru_cache(maxsize=256)
def curve_packet(E: EllipticCurveModel) -> EigenformPacket:
    """The rational newform packet of level N(E) with a_l(f) = a_l(E)."""
    M = minimal_model(E)
    N = conductor(M)
    for f in newform_packets(plus_space(N), N):
        if all(a == ap(M, l) for l, a in f.eigenvalues.items()):
            return f
    raise LookupError(f"no newform packet of level {N} matches the curve")


def _curve_inputs(E: EllipticCurveModel) -> dict:
    M = minimal_model(E)
    return {"curve": list(M.ainvs), "N": conductor(M)}


def ramified_primes_mod_p(E: EllipticCurveModel, p: int) -> list[int]:
    """Primes l | N at which the mod-p representation is ramified (p does not divide ord_l Delta)."""
    M = minimal_model(E)
    N = conductor(M)
    return [l for l in prime_divisors(N) if tamagawa_exponent(M, l, p).t == 0]


def _cr_hypothesis(E, S: int, p: int) -> Hypothesis:
    r = check_cr(E, S, p)
    ev = "; ".join(r.evidence)
    ev += f"; primes (q, q mod p, ramified) = {[list(t) for t in r.primes]}"
    return Hypothesis(f"CR(rho_bar, {S})", r.verdict, ev)


def _base_hypotheses(E, K: QuadraticField, p: int) -> tuple[list[Hypothesis], object]:
    M = minimal_model(E)
    N = conductor(M)
    hyps = [Hypothesis("p >= 5 prime", "holds" if p >= 5 and is_prime(p) else "fails", f"p = {p}"),
            Hypothesis("gcd(p, N D) = 1", "holds" if (N * K.D) % p else "fails",
                       f"N = {N}, D = {K.D}")]
    try:
        s = split_level(N, K)
    except ValueError as e:
        hyps.append(Hypothesis("gcd(N, D) = 1", "fails", str(e)))
        return hyps, None
    hyps.append(Hypothesis("odd parity", "holds" if s.definite else "fails",
                           f"N+ = {s.Nplus}, N- = {s.Nminus}, {s.parity}"
                           + (f" ({s.note})" if s.note else "")))
    return hyps, s


def verify_mu_main_conjecture(E: EllipticCurveModel, K: QuadraticField, p: int) -> VerificationReport:
    """ord_p eta_f(N) - ord_p xi_f(N+, N-) against the sum of t_f(q), q | N-."""
    statement = "ord_p(eta_f(N) / xi_f(N+,N-)) = sum_{q | N-} t_f(q)"
    anchors = ("congruence number of f in S_2(N)", "self-pairing of g_f", "Tamagawa exponents")
    inputs = {**_curve_inputs(E), "D": K.D, "p": p}
    hyps, s = _base_hypotheses(E, K, p)
    if any(h.verdict != "holds" for h in hyps):
        return _skipped(statement, anchors, inputs, hyps)
    hyps.append(_cr_hypothesis(E, s.Nminus, p))
    if hyps[-1].verdict != "holds":
        return _skipped(statement, anchors, inputs, hyps)
    f = curve_packet(E)
    M = ideal_class_module(s.Nplus, s.Nminus)
    g = definite_eigenvector(M, f)
    eta = congruence_exponent(f, s.N, 1, p).exponent
    xi = xi_exponent(g, p)
    ts = {q: tamagawa_exponent(E, q, p).t for q in prime_divisors(s.Nminus)}
    lhs, rhs = eta - xi, sum(ts.values())
    details = {"ord_eta_N": eta, "ord_xi": xi, "t": {str(q): t for q, t in ts.items()},
               "Nplus": s.Nplus, "Nminus": s.Nminus}
    return VerificationReport(statement, anchors, inputs, tuple(hyps), lhs, rhs,
                              "pass" if lhs == rhs else "fail", details)


def verify_level_lowering(E: EllipticCurveModel, chain: Sequence[int], p: int) -> VerificationReport:
    """Move the primes of ``chain`` one at a time from N1 to N2.

    Step (a q, b) -> (a, q b) must satisfy
    ord_p eta_f(aq, b) = t_f(q) + ord_p eta_f(a, qb), and the steps telescope to
    ord_p eta_f(N, 1) = sum t_f(q) + ord_p eta_f(N / c, c), c = prod(chain).
    """
    statement = "ord_p eta_f(aq, b) = t_f(q) + ord_p eta_f(a, qb)"
    anchors = ("quantitative level lowering", "telescoping over the chain")
    M = minimal_model(E)
    N = conductor(M)
    inputs = {**_curve_inputs(E), "p": p, "chain": list(chain)}
    hyps = [Hypothesis("p >= 5 prime, p prime to N",
                       "holds" if p >= 5 and is_prime(p) and N % p else "fails", f"p = {p}")]
    c = 1
    for q in chain:
        c *= q
    if len(set(chain)) != len(chain) or N % c:
        raise ValueError("chain must consist of distinct primes dividing N")
    if hyps[0].verdict != "holds":
        return _skipped(statement, anchors, inputs, hyps)
    ram = ramified_primes_mod_p(M, p)
    hyps.append(Hypothesis("rho_bar ramified at >= 2 primes", "holds" if len(ram) >= 2 else "fails",
                           f"ramified at {ram}"))
    if any(h.verdict != "holds" for h in hyps):
        return _skipped(statement, anchors, inputs, hyps)
    hyps.append(_cr_hypothesis(M, c, p))
    if hyps[-1].verdict != "holds":
        return _skipped(statement, anchors, inputs, hyps)
    f = curve_packet(M)
    steps = []
    ok = True
    N1, N2 = N, 1
    first = congruence_exponent(f, N1, N2, p).exponent
    prev = first
    total_t = 0
    for q in chain:
        t = tamagawa_exponent(M, q, p).t
        nxt = congruence_exponent(f, N1 // q, N2 * q, p).exponent
        good = prev == t + nxt
        ok &= good
        steps.append({"q": q, "N1": N1, "N2": N2, "ord_eta_before": prev, "t": t,
                      "ord_eta_after": nxt, "holds": good})
        total_t += t
        N1, N2, prev = N1 // q, N2 * q, nxt
    lhs, rhs = first, total_t + prev
    return VerificationReport(statement, anchors, inputs, tuple(hyps), lhs, rhs,
                              "pass" if ok and lhs == rhs else "fail", {"steps": steps})


def level_lowering_all_orders(E: EllipticCurveModel, primes: Sequence[int], p: int) -> list[VerificationReport]:
    return [verify_level_lowering(E, list(order), p) for order in itertools.permutations(sorted(primes))]


@dataclass(frozen=True)
class MuPrediction:
    mu_minimal: int | None
    mu_greenberg: int | None
    mode: str
    hypotheses: tuple[Hypothesis, ...]
    verdict: str            # "predicted" or "skipped"
    bookkeeping: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = asdict(self)
        d["hypotheses"] = [asdict(h) for h in self.hypotheses]
        return d


def greenberg_mu_prediction(E: EllipticCurveModel, K: QuadraticField, p: int,
                            mode: str = "ordinary") -> MuPrediction:
    """Predicted (mu of the minimal Selmer group, mu of Greenberg's Selmer group)."""
    if mode not in ("ordinary", "pm"):
        raise ValueError("mode is 'ordinary' or 'pm'")
    hyps, s = _base_hypotheses(E, K, p)
    M = minimal_model(E)
    if s is not None and all(h.verdict == "holds" for h in hyps):
        hyps.append(_cr_hypothesis(M, s.Nminus, p))
        a = ap(M, p)
        if mode == "ordinary":
            hyps.append(Hypothesis("ordinary at p", "holds" if a % p else "fails", f"a_p = {a}"))
        else:
            hyps.append(Hypothesis("a_p = 0", "holds" if a == 0 else "fails", f"a_p = {a}"))
            hyps.append(Hypothesis("p split in K", "holds" if K.splitting(p) == "split" else "fails",
                                   K.splitting(p)))
            hyps.append(Hypothesis("p prime to h_K", "holds" if K.h % p else "fails", f"h_K = {K.h}"))
    if s is None or any(h.verdict != "holds" for h in hyps):
        return MuPrediction(None, None, mode, tuple(hyps), "skipped")
    tsum = sum(tamagawa_exponent(M, q, p).t for q in prime_divisors(s.Nminus))
    book = {"mu_greenberg_minus_mu_minimal": tsum, "lambda_greenberg_equals_lambda_minimal": True}
    return MuPrediction(0, tsum, mode, tuple(hyps), "predicted", book)


@dataclass(frozen=True)
class AdmissiblePrime:
    ell: int
    n: int
    eps: int


def admissible_primes(E: EllipticCurveModel, K: QuadraticField, p: int, n: int,
                      bound: int) -> list[AdmissiblePrime]:
    """Inert l <= bound, prime to N p D, with p not dividing l^2 - 1 and
    l + 1 - eps a_l = 0 mod p^n.
    """
    M = minimal_model(E)
    N = conductor(M)
    pn = p ** n
    out = []
    for l in primes_up_to(bound):
        if (N * p * K.D) % l == 0 or K.splitting(l) != "inert" or (l * l - 1) % p == 0:
            continue
        a = ap(M, l)
        for eps in (1, -1):
            if (l + 1 - eps * a) % pn == 0:
                out.append(AdmissiblePrime(l, n, eps))
                break
    return out


def consistency_triangle(E: EllipticCurveModel, K: QuadraticField, p: int) -> VerificationReport:
    """Under freeness and CR, ord_p xi_f = ord_p eta_f(N+, N-)."""
    statement = "freeness and CR imply ord_p xi_f(N+,N-) = ord_p eta_f(N+,N-)"
    anchors = ("self-pairing of g_f", "congruence number on the N- -new space")
    inputs = {**_curve_inputs(E), "D": K.D, "p": p}
    hyps, s = _base_hypotheses(E, K, p)
    if any(h.verdict != "holds" for h in hyps):
        return _skipped(statement, anchors, inputs, hyps)
    hyps.append(_cr_hypothesis(E, s.Nminus, p))
    f = curve_packet(E)
    M = ideal_class_module(s.Nplus, s.Nminus)
    free = freeness_check(M, f, p)
    hyps.append(Hypothesis("multiplicity one (freeness)", "holds" if free else "fails",
                           f"h = {M.class_number}"))
    if any(h.verdict != "holds" for h in hyps):
        return _skipped(statement, anchors, inputs, hyps)
    g = definite_eigenvector(M, f)
    lhs = xi_exponent(g, p)
    rhs = congruence_exponent(f, s.Nplus, s.Nminus, p).exponent
    details = {"unit_pairing": unit_pairing_check(M, g, p)}
    return VerificationReport(statement, anchors, inputs, tuple(hyps), lhs, rhs,
                              "pass" if lhs == rhs else "fail", details)
