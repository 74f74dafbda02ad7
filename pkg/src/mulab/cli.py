"""Command-line interface: ``mulab <command> [options]``.

Every command prints one JSON object (sorted keys) on stdout.  Exit code 0
on success or a hypothesis skip, 1 with an error object, 2 on bad usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Callable

from . import __version__
from .arith import (ap, check_cr, quadratic_field, split_level, tamagawa_exponent,
                    unit_root)
from .brandt import (brandt_matrix, definite_eigenvector, ideal_class_module,
                     unit_pairing_check, xi_exponent)
from .cache import SCHEMA_VERSION, JobSpec, cache_lookup_store
from .corpus import corpus_triples, parse_curve, read_curves, scan_curves, write_curves
from .hecke import congruence_exponent
from .theta import mu_lambda, theta_elements
from .verify import (admissible_primes, curve_packet, level_lowering_all_orders,
                     verify_level_lowering, verify_mu_main_conjecture)

__all__ = ["main", "run_command", "COMMANDS"]


def _curve(s: str):
    return parse_curve(s)


def _module_for(c, D):
    K = quadratic_field(D)
    s = split_level(c.N, K)
    if not s.definite:
        return K, s, None
    return K, s, ideal_class_module(s.Nplus, s.Nminus)


def cmd_split_level(a) -> dict:
    s = split_level(a.N, quadratic_field(a.disc))
    return {"Nplus": s.Nplus, "Nminus": s.Nminus, "parity": s.parity}


def cmd_eta(a) -> dict:
    c = _curve(a.curve)
    if c.N != a.N or a.N % a.N2:
        raise ValueError("need N = conductor of the curve and N2 | N")
    f = curve_packet(c.E)
    return {"N1": a.N // a.N2, "N2": a.N2, "p": a.p,
            "exponent": congruence_exponent(f, a.N // a.N2, a.N2, a.p).exponent}


def cmd_xi(a) -> dict:
    c = _curve(a.curve)
    K, s, M = _module_for(c, a.disc)
    if M is None:
        return {"verdict": "skipped", "reason": "indefinite case, out of scope"}
    g = definite_eigenvector(M, curve_packet(c.E))
    return {"Nplus": s.Nplus, "Nminus": s.Nminus, "exponent": xi_exponent(g, a.p),
            "vector": list(g.vector), "weights": list(g.weights),
            "unit_pairing": unit_pairing_check(M, g, a.p)}


def cmd_brandt(a) -> dict:
    M = ideal_class_module(a.Nplus, a.Nminus)
    out = {"class_number": M.class_number, "weights": list(M.weights),
           "mass": str(M.mass)}
    if a.n:
        out["matrix"] = brandt_matrix(M, a.n).tolist()
    return out


def cmd_tamagawa(a) -> dict:
    c = _curve(a.curve)
    r = tamagawa_exponent(c.E, a.ell, a.p)
    return {"ell": r.ell, "p": r.p, "t": r.t, "ord_delta": r.ord_delta}


def cmd_check_cr(a) -> dict:
    c = _curve(a.curve)
    Nminus = a.Nminus if a.Nminus else split_level(c.N, quadratic_field(a.disc)).Nminus
    r = check_cr(c.E, Nminus, a.p)
    return {"Nminus": Nminus, "p": a.p, "verdict": r.verdict, "surjectivity": r.surjective,
            "evidence": list(r.evidence), "primes": [list(t) for t in r.primes]}


def _thetas(a):
    c = _curve(a.curve)
    K, s, M = _module_for(c, a.disc)
    if M is None:
        return None, None
    g = definite_eigenvector(M, curve_packet(c.E))
    return c, theta_elements(M, K, a.p, g, layers=tuple(range(a.layer + 1)))


def cmd_theta(a) -> dict:
    c, th = _thetas(a)
    if th is None:
        return {"verdict": "skipped", "reason": "indefinite case, out of scope"}
    t = th[a.layer]
    return {"layer": t.layer, "conductor_exponent": t.conductor_exponent, "p": t.p,
            "coefficients": list(t.coeffs), "normalization": t.tag}


def cmd_mu_lambda(a) -> dict:
    if a.layer < 1:
        raise ValueError("mu-lambda needs --layer >= 1")
    c, th = _thetas(a)
    if th is None:
        return {"verdict": "skipped", "reason": "indefinite case, out of scope"}
    pm = ap(c.E, a.p) % a.p == 0
    prev = th[a.layer - 1] if a.layer >= 2 else None
    inv = mu_lambda(th[a.layer], a.precision, pm=pm, previous=prev)
    return {"mode": "pm" if pm else "ordinary", **inv.describe()}


def cmd_admissible(a) -> dict:
    c = _curve(a.curve)
    out = admissible_primes(c.E, quadratic_field(a.disc), a.p, a.n, a.bound)
    return {"primes": [{"ell": x.ell, "n": x.n, "eps": x.eps} for x in out]}


def cmd_verify_mu(a) -> dict:
    c = _curve(a.curve)
    return verify_mu_main_conjecture(c.E, quadratic_field(a.disc), a.p).to_json()


def cmd_verify_levellower(a) -> dict:
    c = _curve(a.curve)
    chain = [int(x) for x in a.chain.split(",")]
    if a.all_orders:
        reps = level_lowering_all_orders(c.E, chain, a.p)
        verdicts = sorted({r.verdict for r in reps})
        return {"reports": [r.to_json() for r in reps],
                "verdict": verdicts[0] if len(verdicts) == 1 else "fail"}
    return verify_level_lowering(c.E, chain, a.p).to_json()


def cmd_corpus_scan(a) -> dict:
    curves = read_curves(a.input) if a.input else scan_curves(a.max_conductor)
    if a.out:
        write_curves(curves, a.out, f"corpus scan, conductor <= {a.max_conductor}\n"
                                    "Format: N : a1 a2 a3 a4 a6")
    triples = [t for t in corpus_triples(curves) if t.curve.N <= a.max_conductor]
    return {"curves": len(curves), "triples": len(triples),
            "triples_with_positive_t": [
                {"curve": t.curve.line(), "D": t.K.D, "p": t.p, "tsum": t.tsum}
                for t in triples if t.tsum > 0]}


COMMANDS: dict[str, Callable] = {
    "split-level": cmd_split_level, "eta": cmd_eta, "xi": cmd_xi, "brandt": cmd_brandt,
    "tamagawa": cmd_tamagawa, "check-cr": cmd_check_cr, "theta": cmd_theta,
    "mu-lambda": cmd_mu_lambda, "admissible": cmd_admissible, "verify-mu": cmd_verify_mu,
    "verify-levellower": cmd_verify_levellower, "corpus-scan": cmd_corpus_scan,
}

# commands whose output depends on files; not cached
_UNCACHED = {"corpus-scan"}


def _parser() -> argparse.ArgumentParser:
    ap_ = argparse.ArgumentParser(prog="mulab", description=__doc__.splitlines()[0])
    ap_.add_argument("--version", action="version", version=__version__)
    sub = ap_.add_subparsers(dest="command", required=True)

    def add(name, *opts):
        sp = sub.add_parser(name)
        sp.add_argument("--no-cache", action="store_true", help="bypass the disk cache")
        sp.add_argument("-v", "--verbose", action="store_true")
        for flag, kw in opts:
            sp.add_argument(flag, **kw)
        return sp

    curve = ("--curve", dict(required=True, help='"N : a1 a2 a3 a4 a6"'))
    disc = ("--disc", dict(type=int, required=True))
    p = ("--p", dict(type=int, required=True))
    add("split-level", ("--N", dict(type=int, required=True)), disc)
    add("eta", ("--N", dict(type=int, required=True)), ("--N2", dict(type=int, default=1)), p, curve)
    add("xi", curve, disc, p)
    add("brandt", ("--Nplus", dict(type=int, default=1)), ("--Nminus", dict(type=int, required=True)),
        ("--n", dict(type=int, default=0)))
    add("tamagawa", curve, ("--ell", dict(type=int, required=True)), p)
    add("check-cr", curve, p, ("--Nminus", dict(type=int, default=0)), ("--disc", dict(type=int, default=-3)))
    add("theta", curve, disc, p, ("--layer", dict(type=int, default=1)))
    add("mu-lambda", curve, disc, p, ("--layer", dict(type=int, default=1)),
        ("--precision", dict(type=int, default=2)))
    add("admissible", curve, disc, p, ("--n", dict(type=int, default=1)),
        ("--bound", dict(type=int, default=100)))
    add("verify-mu", curve, disc, p)
    add("verify-levellower", curve, p, ("--chain", dict(required=True, help="comma-separated primes")),
        ("--all-orders", dict(action="store_true")))
    add("corpus-scan", ("--max-conductor", dict(type=int, default=200)),
        ("--input", dict(default=None)), ("--out", dict(default=None)))
    return ap_


def run_command(argv: list[str]) -> tuple[int, str]:
    """Parse and run; returns (exit code, JSON text).  Usage errors raise SystemExit(2)."""
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("command", "no_cache", "verbose")}
    fn = COMMANDS[args.command]
    try:
        result = cache_lookup_store(JobSpec(args.command, params), lambda: fn(args),
                                    enabled=not args.no_cache and args.command not in _UNCACHED)
        code = 0
    except Exception as e:      # reported as structured JSON
        result = {"error": str(e), "type": type(e).__name__}
        code = 1
    result = {**result, "command": args.command, "schema": SCHEMA_VERSION}
    return code, json.dumps(result, sort_keys=True)


def main(argv: list[str] | None = None) -> int:
    code, text = run_command(sys.argv[1:] if argv is None else argv)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
