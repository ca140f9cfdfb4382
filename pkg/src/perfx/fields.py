"""Exact coefficient fields: the rationals and prime fields GF(p).

Elements are plain Python objects (Fraction for QQ, int in [0, p) for
GF(p)); the Field object carries the arithmetic.  Everything is exact,
division by a nonzero element always succeeds.
"""

from __future__ import annotations

from fractions import Fraction


class Field:
    """Common interface; use the QQ singleton or GF(p)."""

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def from_int(self, n):
        raise NotImplementedError

    def parse(self, text):
        raise NotImplementedError

    def random(self, rng, height=5):
        raise NotImplementedError


class RationalField(Field):
    name = "QQ"
    char = 0
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in QQ")
        return 1 / a

    def from_int(self, n):
        return Fraction(n)

    def parse(self, text):
        return Fraction(text)

    def random(self, rng, height=5):
        num = rng.randint(-height, height)
        den = rng.randint(1, height)
        return Fraction(num, den)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


class PrimeField(Field):
    """GF(p) with machine-word arithmetic; p must be an odd prime < 2**31."""

    char = None

    def __init__(self, p):
        if p < 2 or p >= 2**31:
            raise ValueError(f"prime out of range: {p}")
        if any(p % q == 0 for q in range(2, min(p, 1 + int(p**0.5) + 1)) if q < p):
            raise ValueError(f"not a prime: {p}")
        self.p = p
        self.char = p
        self.name = f"GF({p})"
        self.zero = 0
        self.one = 1 % p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"inverse of 0 in GF({self.p})")
        return pow(a, self.p - 2, self.p)

    def from_int(self, n):
        return n % self.p

    def parse(self, text):
        if "/" in text:
            num, den = text.split("/")
            return self.div(self.from_int(int(num)), self.from_int(int(den)))
        return self.from_int(int(text))

    def random(self, rng, height=None):
        return rng.randrange(self.p)

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = RationalField()

_gf_cache = {}


def GF(p):
    if p not in _gf_cache:
        _gf_cache[p] = PrimeField(p)
    return _gf_cache[p]
