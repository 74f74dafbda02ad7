"""Positive definite binary quadratic forms and ring class groups."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = ["Form", "reduce_form", "reduced_forms", "class_number",
           "compose", "identity_form", "ClassGroup", "class_group"]


@dataclass(frozen=True, order=True)
class Form:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def inverse(self) -> "Form":
        return reduce_form(Form(self.a, -self.b, self.c))

    def is_primitive(self) -> bool:
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1

    def evaluate(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y


def reduce_form(f: Form) -> Form:
    a, b, c = f.a, f.b, f.c
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError("form is not positive definite")
    while True:
        if c < a:
            a, b, c = c, -b, a
        elif b > a or b <= -a:
            # translate b into (-a, a]
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * a * k
        else:
            break
    if a == c and b < 0:
        b = -b
    return Form(a, b, c)


def identity_form(D: int) -> Form:
    if D % 4 == 0:
        return Form(1, 0, -D // 4)
    return Form(1, 1, (1 - D) // 4)


@lru_cache(maxsize=256)
def reduced_forms(D: int) -> tuple[Form, ...]:
    """All primitive reduced forms of discriminant ``D < 0``."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError("need a negative discriminant D = 0, 1 mod 4")
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            f = Form(a, b, c)
            if f.is_primitive():
                out.append(f)
        a += 1
    return tuple(sorted(out))


def class_number(D: int) -> int:
    return len(reduced_forms(D))


def compose(f: Form, g: Form) -> Form:
    """Dirichlet composition of primitive forms of the same discriminant."""
    D = f.disc
    if g.disc != D:
        raise ValueError("discriminants differ")
    a1, b1 = f.a, f.b
    a2, b2 = g.a, g.b
    h = (b1 + b2) // 2
    # e = gcd(a1, a2, h) = p a1 + q a2 + r h
    g1, x, y = _xgcd(a1, a2)
    e, s1, r = _xgcd(g1, h)
    p, q = s1 * x, s1 * y
    A = a1 * a2 // (e * e)
    B = (p * a1 * b2 + q * a2 * b1 + r * (b1 * b2 + D) // 2) // e
    B %= 2 * A
    return reduce_form(Form(A, B, (B * B - D) // (4 * A)))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def power(f: Form, n: int) -> Form:
    D = f.disc
    result = identity_form(D)
    base = f if n >= 0 else f.inverse()
    n = abs(n)
    while n:
        if n & 1:
            result = compose(result, base)
        base = compose(base, base)
        n >>= 1
    return result


@dataclass(frozen=True)
class ClassGroup:
    """Pic of the order of discriminant D, as reduced forms."""

    D: int
    forms: tuple[Form, ...]

    @property
    def order(self) -> int:
        return len(self.forms)

    def identity(self) -> Form:
        return identity_form(self.D)

    def mul(self, f: Form, g: Form) -> Form:
        return compose(f, g)

    def element_order(self, f: Form) -> int:
        e, g, one = 1, f, self.identity()
        while g != one:
            g = compose(g, f)
            e += 1
        return e


@lru_cache(maxsize=256)
def class_group(D: int) -> ClassGroup:
    return ClassGroup(D, reduced_forms(D))
