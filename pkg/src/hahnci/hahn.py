"""Truncated Hahn series over F_q with exponents in Q^n (lexicographic).

A :class:`Series` is a finite sorted map exponent -> nonzero coefficient
together with a precision cap ``prec``: the true element agrees with the
stored terms on every exponent below ``prec``, and nothing is known at or
above it.  ``prec = INF`` marks an exact element.  Every arithmetic
operation computes the precision it can guarantee for its result.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .gf import GF, field, is_prime, prime_power
from .ordered import INF, GroupElement, ge, zero, value_from_json

__all__ = [
    "FieldConfig", "Series", "ValResult", "Certainty", "val",
    "invert", "divide", "is_in_valuation_ring", "is_unit",
    "HahnError", "ConfigMismatch", "NotInvertible", "PrecisionTooLow", "SupportExplosion",
]

MAX_INVERT_TERMS = 20000


class HahnError(ValueError):
    pass


class ConfigMismatch(HahnError):
    pass


class NotInvertible(HahnError):
    pass


class PrecisionTooLow(HahnError):
    """A check needs more precision than the inputs carry."""

    def __init__(self, msg, required=None):
        super().__init__(msg)
        self.required = required


class SupportExplosion(HahnError):
    """Truncation would need more terms than the budget allows."""


@dataclass(frozen=True)
class FieldConfig:
    """Coefficient field F_q (characteristic p) and the rank of Q^rank."""

    p: int
    q: int
    rank: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        pk = prime_power(self.q)
        if pk is None or pk[0] != self.p:
            raise ValueError(f"q={self.q} is not a power of p={self.p}")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")

    @property
    def gf(self) -> GF:
        return field(self.q)

    def exp(self, e) -> GroupElement:
        g = e if isinstance(e, GroupElement) else ge(e)
        if g.rank != self.rank:
            raise ConfigMismatch(f"exponent {g} has rank {g.rank}, field rank is {self.rank}")
        return g

    def zero_exp(self) -> GroupElement:
        return zero(self.rank)

    # constructors
    def series(self, terms=(), prec=INF) -> "Series":
        return Series(self, terms, prec)

    def one(self) -> "Series":
        return Series(self, {self.zero_exp(): 1})

    def zero(self) -> "Series":
        return Series(self, {})

    def const(self, c: int) -> "Series":
        return Series(self, {self.zero_exp(): self.gf.from_int(c)})

    def monomial(self, e, c: int = 1) -> "Series":
        return Series(self, {self.exp(e): c})

    def to_json(self):
        return {"p": self.p, "q": self.q, "rank": self.rank}


class Certainty(enum.Enum):
    EXACT = "exact"
    BELOW_PREC_ONLY = "below_prec_only"


@dataclass(frozen=True)
class ValResult:
    value: object
    certainty: Certainty

    @property
    def exact(self) -> bool:
        return self.certainty is Certainty.EXACT


class Series:
    """Immutable truncated Hahn series."""

    __slots__ = ("cfg", "terms", "prec")

    def __init__(self, cfg: FieldConfig, terms=(), prec=INF, _trusted=False):
        self.cfg = cfg
        if prec is not INF:
            prec = cfg.exp(prec)
        self.prec = prec
        if _trusted:
            self.terms = terms
            return
        items = terms.items() if isinstance(terms, dict) else terms
        F = cfg.gf
        acc = {}
        for e, c in items:
            e = cfg.exp(e)
            if not 0 <= c < cfg.q:
                raise ValueError(f"coefficient {c} outside F_{cfg.q}")
            acc[e] = F.add(acc.get(e, 0), c)
        self.terms = {e: acc[e] for e in sorted(acc) if acc[e] and e < prec}

    # ---------------------------------------------------------------- basics
    @property
    def v(self):
        """Valuation as a bare value: min support, else prec (INF for exact 0)."""
        for e in self.terms:
            return e
        return self.prec

    def val(self) -> ValResult:
        if self.terms:
            return ValResult(next(iter(self.terms)), Certainty.EXACT)
        if self.prec is INF:
            return ValResult(INF, Certainty.EXACT)
        return ValResult(self.prec, Certainty.BELOW_PREC_ONLY)

    @property
    def is_exact(self) -> bool:
        return self.prec is INF

    def is_exact_zero(self) -> bool:
        return not self.terms and self.prec is INF

    def is_zero_to_prec(self) -> bool:
        """No nonzero term below the precision cap (includes exact zero)."""
        return not self.terms

    def lead(self):
        for e, c in self.terms.items():
            return e, c
        raise PrecisionTooLow("no known leading term")

    def support(self):
        return list(self.terms)

    def coeff(self, e) -> int:
        return self.terms.get(self.cfg.exp(e), 0)

    def _same(self, other):
        if not isinstance(other, Series):
            raise TypeError(f"expected Series, got {type(other).__name__}")
        if other.cfg != self.cfg:
            raise ConfigMismatch(f"{self.cfg} vs {other.cfg}")

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.cfg == other.cfg and self.prec == other.prec and self.terms == other.terms

    def __hash__(self):
        return hash((self.cfg, self.prec, tuple(self.terms.items())))

    def agrees(self, other: "Series", up_to=None) -> bool:
        """True if self and other have the same terms below ``up_to``
        (default: the smaller of the two precisions)."""
        self._same(other)
        cap = min_value(self.prec, other.prec) if up_to is None else up_to
        a = {e: c for e, c in self.terms.items() if e < cap}
        b = {e: c for e, c in other.terms.items() if e < cap}
        return a == b

    def truncate(self, prec) -> "Series":
        prec = min_value(self.prec, prec if prec is INF else self.cfg.exp(prec))
        return Series(self.cfg, {e: c for e, c in self.terms.items() if e < prec}, prec, _trusted=True)

    def with_prec(self, prec) -> "Series":
        """Same terms, declared precision ``prec`` (must not exceed the current)."""
        return self.truncate(prec)

    # ------------------------------------------------------------ arithmetic
    def __neg__(self):
        F = self.cfg.gf
        return Series(self.cfg, {e: F.neg(c) for e, c in self.terms.items()}, self.prec, _trusted=True)

    def __add__(self, other):
        if isinstance(other, int):
            other = self.cfg.const(other)
        if not isinstance(other, Series):
            return NotImplemented
        self._same(other)
        prec = min_value(self.prec, other.prec)
        F = self.cfg.gf
        acc = dict(self.terms)
        for e, c in other.terms.items():
            s = F.add(acc.get(e, 0), c)
            if s:
                acc[e] = s
            else:
                acc.pop(e, None)
        return Series(self.cfg, {e: acc[e] for e in sorted(acc) if e < prec}, prec, _trusted=True)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.cfg.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, Series):
            return NotImplemented
        self._same(other)
        prec = min_value(self.v + other.prec, other.v + self.prec)
        F = self.cfg.gf
        acc = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if not e < prec:
                    # other's terms are sorted, later ones only grow
                    break
                s = F.add(acc.get(e, 0), F.mul(c1, c2))
                if s:
                    acc[e] = s
                else:
                    acc.pop(e, None)
        return Series(self.cfg, {e: acc[e] for e in sorted(acc)}, prec, _trusted=True)

    __rmul__ = __mul__

    def scale(self, n: int) -> "Series":
        """Multiply by the image of the integer n in F_p."""
        F = self.cfg.gf
        c = F.from_int(n)
        return self.scale_gf(c)

    def scale_gf(self, c: int) -> "Series":
        """Multiply by an element c of F_q."""
        F = self.cfg.gf
        if c == 0:
            return Series(self.cfg, {}, self.prec, _trusted=True)
        return Series(self.cfg, {e: F.mul(c, x) for e, x in self.terms.items()}, self.prec, _trusted=True)

    def shift(self, e) -> "Series":
        """Multiply by the monomial t^e."""
        e = self.cfg.exp(e)
        return Series(self.cfg, {k + e: c for k, c in self.terms.items()}, self.prec + e, _trusted=True)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers need invert()")
        result = self.cfg.one()
        base = self
        # p-th powers go through Frobenius, which keeps p times the precision
        while n and n % self.cfg.p == 0:
            base = base.frobenius()
            n //= self.cfg.p
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def frobenius(self) -> "Series":
        """x -> x^p computed termwise (exact in characteristic p)."""
        F, p = self.cfg.gf, self.cfg.p
        return Series(self.cfg, {e * p: F.pow(c, p) for e, c in self.terms.items()},
                      self.prec if self.prec is INF else self.prec * p, _trusted=True)

    # ------------------------------------------------------------------ misc
    def __repr__(self):
        return f"Series({self.pretty()})"

    def pretty(self) -> str:
        parts = []
        for e, c in self.terms.items():
            ex = str(e[0]) if len(e) == 1 else repr(e)
            parts.append(f"{c}*t^{ex}")
        s = " + ".join(parts) if parts else "0"
        if self.prec is not INF:
            pe = str(self.prec[0]) if len(self.prec) == 1 else repr(self.prec)
            s += f" + O(t^{pe})"
        return s

    def to_json(self):
        return {
            "terms": [[e.to_json(), c] for e, c in self.terms.items()],
            "prec": self.prec.to_json(),
        }

    @classmethod
    def from_json(cls, cfg: FieldConfig, obj) -> "Series":
        if isinstance(obj, list):
            obj = {"terms": obj}
        prec = value_from_json(obj.get("prec", "inf"), cfg.rank)
        return cls(cfg, [(cfg.exp(e), int(c)) for e, c in obj["terms"]], prec)


def min_value(a, b):
    if a is INF:
        return b
    if b is INF:
        return a
    return a if a <= b else b


# ------------------------------------------------------------------ functions

def val(x: Series) -> ValResult:
    return x.val()


def invert(x: Series, out_prec) -> Series:
    """Inverse of x, correct on every exponent below ``out_prec``.

    Computed by leading-term peeling.  When x itself is only known to
    precision P, the result precision is capped at P - 2 val(x).
    """
    if x.is_exact_zero():
        raise NotInvertible("exact zero has no inverse")
    if not x.terms:
        raise PrecisionTooLow(f"value of x is only bounded below by {x.prec}", required=x.prec)
    cfg = x.cfg
    F = cfg.gf
    if out_prec is not INF:
        out_prec = cfg.exp(out_prec)
    v, c = x.lead()
    if x.prec is INF and len(x.terms) == 1:
        return Series(cfg, {-v: F.inv(c)}, INF, _trusted=True)
    R = out_prec if x.prec is INF else min_value(out_prec, x.prec - v - v)
    if R is INF:
        if len(x.terms) > 1:
            raise PrecisionTooLow("an exact inverse of a non-monomial needs a finite out_prec")
        return Series(cfg, {-v: F.inv(c)}, INF, _trusted=True)
    cinv = F.inv(c)
    xs = list(x.terms.items())
    cap = R + v
    rem = {cfg.zero_exp(): 1}
    out = {}
    steps = 0
    while rem:
        e = min(rem)
        if not e - v < R:
            break
        a = F.mul(rem[e], cinv)
        shift = e - v
        out[shift] = a
        for xe, xc in xs:
            k = xe + shift
            if not k < cap:
                break
            s = F.sub(rem.get(k, 0), F.mul(a, xc))
            if s:
                rem[k] = s
            else:
                rem.pop(k, None)
        steps += 1
        if steps > MAX_INVERT_TERMS:
            raise SupportExplosion(f"inverse needs more than {MAX_INVERT_TERMS} terms below {R}")
    return Series(cfg, {e: out[e] for e in sorted(out)}, R, _trusted=True)


def divide(num: Series, den: Series, out_prec) -> Series:
    """num / den, aiming for precision ``out_prec`` on the quotient."""
    if den.is_exact_zero():
        raise NotInvertible("division by exact zero")
    if not den.terms:
        raise PrecisionTooLow("denominator value unknown", required=den.prec)
    if num.is_exact_zero():
        return num.cfg.zero()
    target = out_prec if out_prec is INF else num.cfg.exp(out_prec)
    # product precision is at least val(num) + prec(inverse)
    inv = invert(den, INF if target is INF else target - num.v)
    return (num * inv).truncate(target)


def is_in_valuation_ring(x: Series) -> bool:
    r = x.val()
    if not r.exact:
        if r.value >= zero(x.cfg.rank):
            return True
        raise PrecisionTooLow("membership undecided below precision", required=zero(x.cfg.rank))
    return r.value >= zero(x.cfg.rank)


def is_unit(x: Series) -> bool:
    r = x.val()
    if not r.exact:
        if r.value > zero(x.cfg.rank):
            return False
        raise PrecisionTooLow("unit test undecided below precision", required=zero(x.cfg.rank))
    return r.value == zero(x.cfg.rank)
