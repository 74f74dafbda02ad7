"""Curve corpus: scanning small Weierstrass equations, file I/O and triple selection.

File format: one curve per line, ``N : a1 a2 a3 a4 a6``; ``#`` starts a comment.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .arith import (EllipticCurveModel, NotSemistable, QuadraticField, ap, check_cr,
                    conductor, minimal_discriminant, minimal_model, quadratic_field,
                    split_level, tamagawa_exponent)
from .numtheory import prime_divisors, primes_up_to

__all__ = ["CorpusCurve", "Triple", "parse_curve", "read_curves", "write_curves",
           "default_curves", "scan_curves", "corpus_triples", "acceptance_triples", "DISCRIMINANTS", "PRIMES"]

DISCRIMINANTS = (-3, -7, -8, -11, -19, -43)
PRIMES = (5, 7, 11, 13)


@dataclass(frozen=True)
class CorpusCurve:
    N: int
    E: EllipticCurveModel

    def line(self) -> str:
        return f"{self.N} : " + " ".join(str(a) for a in self.E.ainvs)


@dataclass(frozen=True)
class Triple:
    curve: CorpusCurve
    K: QuadraticField
    p: int
    tsum: int

    @property
    def key(self) -> tuple:
        return (self.curve.N, self.curve.E.ainvs, self.K.D, self.p)


def parse_curve(text: str) -> CorpusCurve:
    """``"N : a1 a2 a3 a4 a6"`` (or ``"N:a1 ..."``); the conductor is checked."""
    head, _, tail = text.partition(":")
    if not tail:
        raise ValueError(f"bad curve line {text!r}")
    a = [int(x) for x in tail.split()]
    if len(a) != 5:
        raise ValueError(f"need five coefficients in {text!r}")
    E = minimal_model(EllipticCurveModel(*a))
    N = conductor(E)
    if int(head) != N:
        raise ValueError(f"stated conductor {head.strip()} but the curve has conductor {N}")
    return CorpusCurve(N, E)


def read_curves(path: str | Path) -> list[CorpusCurve]:
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse_curve(line))
    return out


def default_curves() -> list[CorpusCurve]:
    with resources.as_file(resources.files("mulab") / "data" / "curves.txt") as p:
        return read_curves(p)


def write_curves(curves: Iterable[CorpusCurve], path: str | Path, header: str = "") -> None:
    lines = [f"# {h}" for h in header.splitlines()] + [c.line() for c in curves]
    Path(path).write_text("\n".join(lines) + "\n")


def scan_curves(max_conductor: int = 200, a4_bound: int = 60, a6_bound: int = 200,
                ap_bound: int = 60) -> list[CorpusCurve]:
    """Semistable curves of conductor <= max_conductor among small equations.

    One curve per isogeny class (same conductor and a_l for l <= ap_bound),
    the one with the smallest minimal discriminant.
    """
    P = primes_up_to(max_conductor)
    A4 = np.arange(-a4_bound, a4_bound + 1, dtype=np.int64)
    A6 = np.arange(-a6_bound, a6_bound + 1, dtype=np.int64)
    a4, a6 = (x.ravel() for x in np.meshgrid(A4, A6, indexing="ij"))
    classes: dict = {}
    for a1, a2, a3 in itertools.product((0, 1), (-1, 0, 1), (0, 1)):
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        c4 = b2 * b2 - 24 * b4
        ok = disc != 0
        rem, rad = np.abs(disc), np.ones_like(disc)
        # cheap filter: smooth discriminant, multiplicative-looking reduction
        for q in P:
            hit = ok & (rem % q == 0)
            ok &= ~(hit & (c4 % q == 0))
            rad = np.where(hit, rad * q, rad)
            while True:
                h = (rem > 0) & (rem % q == 0)
                if not h.any():
                    break
                rem = np.where(h, rem // q, rem)
        ok &= (rem == 1) & (rad <= max_conductor)
        for i in np.nonzero(ok)[0]:
            E = EllipticCurveModel(a1, a2, a3, int(a4[i]), int(a6[i]))
            try:
                N = conductor(E)
            except NotSemistable:
                continue
            M = minimal_model(E)
            key = (N, tuple(ap(M, l) for l in primes_up_to(ap_bound)))
            rank = (abs(minimal_discriminant(M)), M.ainvs)
            if key not in classes or rank < classes[key][0]:
                classes[key] = (rank, M)
    out = [CorpusCurve(key[0], M) for key, (_, M) in classes.items()]
    return sorted(out, key=lambda c: (c.N, c.E.ainvs))


def corpus_triples(curves: Iterable[CorpusCurve], primes=PRIMES,
                   discs=DISCRIMINANTS) -> Iterator[Triple]:
    """(E, K, p) with gcd(pD, N) = 1, an odd number of primes of N inert in K, and CR."""
    for c in curves:
        for p in primes:
            if c.N % p == 0:
                continue
            for D in discs:
                if math.gcd(D * p, c.N) != 1 or D % p == 0:
                    continue
                K = quadratic_field(D)
                s = split_level(c.N, K)
                if not s.definite or not check_cr(c.E, s.Nminus, p).holds:
                    continue
                t = sum(tamagawa_exponent(c.E, q, p).t for q in prime_divisors(s.Nminus))
                yield Triple(c, K, p, t)


def acceptance_triples(curves: Iterable[CorpusCurve] | None = None, per_prime: int = 3) -> list[Triple]:
    """Every triple with a positive Tamagawa sum, plus for each p the first
    ``per_prime`` triples with sum zero on distinct conductors.
    """
    curves = default_curves() if curves is None else list(curves)
    chosen, seen = [], {p: set() for p in PRIMES}
    for t in corpus_triples(curves):
        if t.tsum > 0:
            chosen.append(t)
        elif len(seen[t.p]) < per_prime and t.curve.N not in seen[t.p]:
            seen[t.p].add(t.curve.N)
            chosen.append(t)
    return sorted(chosen, key=lambda t: (t.curve.N, t.p, t.K.D))
