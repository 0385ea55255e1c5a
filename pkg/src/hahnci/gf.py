"""Finite fields F_q, q = p^k, with elements encoded as ints in [0, q).

For k > 1 an element is the base-p digit vector of its coefficients in
F_p[z]/(m(z)), m the first primitive polynomial of degree k in lexicographic order.
Arithmetic goes through precomputed log/antilog tables, so q is capped.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

MAX_Q = 1 << 12


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int):
    """Return (p, k) with q = p^k, or None."""
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                return None
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            return (p, k) if r == 1 else None
    return None


def _polymulmod(a, b, mod, p):
    # a, b: coefficient lists low->high of length k; mod monic of degree k
    k = len(mod) - 1
    res = [0] * (2 * k - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                res[i + j] = (res[i + j] + x * y) % p
    for d in range(len(res) - 1, k - 1, -1):
        c = res[d]
        if c:
            for i in range(k + 1):
                res[d - k + i] = (res[d - k + i] - c * mod[i]) % p
    return res[:k]


def _primitive_modulus(p, k):
    for tail in itertools.product(range(p), repeat=k):
        mod = list(tail) + [1]
        if mod[0] == 0:
            continue
        # primitive (z has order p^k - 1) implies irreducible; log tables need it
        x = [0, 1] + [0] * (k - 2)
        one = [1] + [0] * (k - 1)
        cur = one
        order = None
        for n in range(1, p ** k):
            cur = _polymulmod(cur, x, mod, p)
            if cur == one:
                order = n
                break
        if order == p ** k - 1:
            return mod
    raise ValueError(f"no primitive polynomial found for {p}^{k}")


class GF:
    """The field with q elements."""

    __slots__ = ("p", "k", "q", "_exp", "_log", "_add", "_neg")

    def __init__(self, q: int):
        pk = prime_power(q)
        if pk is None:
            raise ValueError(f"q={q} is not a prime power")
        if q > MAX_Q:
            raise ValueError(f"q={q} exceeds supported size {MAX_Q}")
        self.p, self.k = pk
        self.q = q
        if self.k == 1:
            self._exp = self._log = self._add = self._neg = None
            return
        p, k = self.p, self.k
        mod = _primitive_modulus(p, k)
        digits = lambda a: [(a // p ** i) % p for i in range(k)]
        encode = lambda ds: sum(d * p ** i for i, d in enumerate(ds))
        x = [0, 1] + [0] * (k - 2)
        cur = [1] + [0] * (k - 1)
        self._exp = [0] * (2 * q)
        self._log = [0] * q
        for n in range(q - 1):
            a = encode(cur)
            self._exp[n] = a
            self._log[a] = n
            cur = _polymulmod(cur, x, mod, p)
        for n in range(q - 1, 2 * q):
            self._exp[n] = self._exp[n - (q - 1)]
        self._add = [[encode([(u + v) % p for u, v in zip(digits(a), digits(b))]) for b in range(q)] for a in range(q)]
        self._neg = [encode([(-u) % p for u in digits(a)]) for a in range(q)]

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, GF) and other.q == self.q

    def __hash__(self):
        return hash(("GF", self.q))

    def add(self, a: int, b: int) -> int:
        if self._add is None:
            return (a + b) % self.q
        return self._add[a][b]

    def neg(self, a: int) -> int:
        if self._neg is None:
            return (-a) % self.q
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self._exp is None:
            return a * b % self.q
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF")
        if self._exp is None:
            return pow(a, -1, self.q)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_p -> F_q."""
        return n % self.p

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if self._exp is None:
            return pow(a, n, self.q)
        if a == 0:
            return 0 if n else 1
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def elements(self):
        return range(self.q)


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)
