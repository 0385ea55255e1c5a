"""Polynomials with truncated Hahn series coefficients.

Besides ring arithmetic this module carries the characteristic-free
calculus the constructions rely on: Hasse-Schmidt derivatives
(``D^(n) X^m = binom(m, n) X^(m-n)``), Taylor expansion around a series,
pseudo-division by a non-monic divisor, and the reduction of a polynomial
in ``X0`` modulo a tower ``X_{i+1} = h_i(X_i)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .hahn import FieldConfig, HahnError, Series, invert
from .ordered import INF

__all__ = [
    "MultiPoly", "TowerSpec", "hasse_derivative", "hasse_multi", "taylor_expand",
    "pseudo_divide", "reduce_mod_tower", "ideal_membership_witness",
    "TowerTooShort", "PolyError", "tower_var",
]


class PolyError(HahnError):
    pass


class TowerTooShort(PolyError):
    def __init__(self, msg, required_length):
        super().__init__(msg)
        self.required_length = required_length


def tower_var(i: int) -> str:
    return f"X{i}"


class MultiPoly:
    """Sparse polynomial: exponent tuple (aligned with ``vars``) -> Series."""

    __slots__ = ("cfg", "vars", "terms")

    def __init__(self, cfg: FieldConfig, vars: Sequence[str], terms=None):
        self.cfg = cfg
        self.vars = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise PolyError(f"repeated variable in {self.vars}")
        out = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(m) for m in mono)
            if len(mono) != len(self.vars) or any(m < 0 for m in mono):
                raise PolyError(f"bad exponent {mono} for variables {self.vars}")
            if c.cfg != cfg:
                raise PolyError("coefficient field mismatch")
            if mono in out:
                c = out[mono] + c
            out[mono] = c
        self.terms = {m: c for m, c in out.items() if not c.is_exact_zero()}

    # ------------------------------------------------------------ builders
    @classmethod
    def zero(cls, cfg, vars=()):
        return cls(cfg, vars, {})

    @classmethod
    def const(cls, cfg, c, vars=()):
        if isinstance(c, int):
            c = cfg.const(c)
        return cls(cfg, vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, cfg, name, vars=None):
        vars = tuple(vars) if vars is not None else (name,)
        mono = tuple(1 if v == name else 0 for v in vars)
        if sum(mono) != 1:
            raise PolyError(f"{name} not among {vars}")
        return cls(cfg, vars, {mono: cfg.one()})

    @classmethod
    def univariate(cls, cfg, coeffs, name="X"):
        """From a low-to-high list of Series (or ints)."""
        terms = {}
        for k, c in enumerate(coeffs):
            if isinstance(c, int):
                c = cfg.const(c)
            terms[(k,)] = c
        return cls(cfg, (name,), terms)

    # ------------------------------------------------------------- helpers
    def with_vars(self, vars) -> "MultiPoly":
        """Re-express over a variable list containing all used variables."""
        vars = tuple(vars)
        pos = {v: i for i, v in enumerate(vars)}
        terms = {}
        for mono, c in self.terms.items():
            new = [0] * len(vars)
            for v, m in zip(self.vars, mono):
                if m:
                    if v not in pos:
                        raise PolyError(f"variable {v} in use, missing from {vars}")
                    new[pos[v]] = m
            terms[tuple(new)] = c
        return MultiPoly(self.cfg, vars, terms)

    def rename(self, mapping: Dict[str, str]) -> "MultiPoly":
        return MultiPoly(self.cfg, [mapping.get(v, v) for v in self.vars], self.terms)

    def used_vars(self):
        return tuple(v for i, v in enumerate(self.vars) if any(m[i] for m in self.terms))

    def _align(self, other):
        if other.cfg != self.cfg:
            raise PolyError("coefficient field mismatch")
        if other.vars == self.vars:
            return self, other
        vars = list(self.vars) + [v for v in other.vars if v not in self.vars]
        return self.with_vars(vars), other.with_vars(vars)

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, int):
            other = self.cfg.const(other)
        if isinstance(other, Series):
            return MultiPoly.const(self.cfg, other, self.vars)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def is_zero(self) -> bool:
        return not self.terms

    def is_zero_to_prec(self) -> bool:
        return all(c.is_zero_to_prec() for c in self.terms.values())

    def index(self, var) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise PolyError(f"{var} not among {self.vars}") from None

    def deg(self, var=None) -> int:
        """Degree in ``var`` (total degree if None); -1 for the zero polynomial.
        Coefficients that vanish to their precision do not count."""
        live = [m for m, c in self.terms.items() if c.terms]
        if not live:
            return -1
        if var is None:
            return max(sum(m) for m in live)
        i = self.index(var) if var in self.vars else None
        if i is None:
            return 0
        return max(m[i] for m in live)

    def coeffs_in(self, var) -> Dict[int, "MultiPoly"]:
        """Split as sum_k C_k var^k; C_k keep the full variable list."""
        i = self.index(var)
        out: Dict[int, dict] = {}
        for mono, c in self.terms.items():
            k = mono[i]
            m = list(mono)
            m[i] = 0
            out.setdefault(k, {})[tuple(m)] = c
        return {k: MultiPoly(self.cfg, self.vars, t) for k, t in out.items()}

    def lc(self, var) -> "MultiPoly":
        d = self.deg(var)
        return self.coeffs_in(var).get(d, MultiPoly.zero(self.cfg, self.vars))

    def constant_term(self) -> Series:
        return self.terms.get((0,) * len(self.vars), self.cfg.zero())

    def coefficient(self, mono) -> Series:
        return self.terms.get(tuple(mono), self.cfg.zero())

    # ---------------------------------------------------------- arithmetic
    def __add__(self, other):
        a, b = self._align(self._coerce(other))
        terms = dict(a.terms)
        for m, c in b.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return MultiPoly(a.cfg, a.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.cfg, self.vars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Series)):
            if isinstance(other, int):
                return MultiPoly(self.cfg, self.vars, {m: c.scale(other) for m, c in self.terms.items()})
            return MultiPoly(self.cfg, self.vars, {m: c * other for m, c in self.terms.items()})
        a, b = self._align(other)
        terms: Dict[tuple, Series] = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                p = c1 * c2
                terms[m] = terms[m] + p if m in terms else p
        return MultiPoly(a.cfg, a.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(self.cfg, self.cfg.one(), self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def same_as(self, other: "MultiPoly") -> bool:
        """Exact structural equality after aligning variables."""
        d = self - other
        return d.is_zero()

    def agrees(self, other: "MultiPoly") -> bool:
        """Equal up to the precision of every coefficient."""
        return (self - other).is_zero_to_prec()

    # ---------------------------------------------------------- evaluation
    def evaluate(self, point: Dict[str, Series]) -> Series:
        """Full evaluation at series values for all used variables."""
        missing = [v for v in self.used_vars() if v not in point]
        if missing:
            raise PolyError(f"no value for {missing}")
        powers: Dict[Tuple[str, int], Series] = {}

        def pw(v, k):
            key = (v, k)
            if key not in powers:
                powers[key] = point[v] ** k
            return powers[key]

        acc = self.cfg.zero()
        for mono, c in self.terms.items():
            term = c
            for v, k in zip(self.vars, mono):
                if k:
                    term = term * pw(v, k)
            acc = acc + term
        return acc

    def partial_evaluate(self, point: Dict[str, Series]) -> "MultiPoly":
        out = MultiPoly.zero(self.cfg, [v for v in self.vars if v not in point])
        keep = [i for i, v in enumerate(self.vars) if v not in point]
        terms: Dict[tuple, Series] = {}
        for mono, c in self.terms.items():
            term = c
            for v, k in zip(self.vars, mono):
                if k and v in point:
                    term = term * point[v] ** k
            m = tuple(mono[i] for i in keep)
            terms[m] = terms[m] + term if m in terms else term
        return MultiPoly(self.cfg, out.vars, terms)

    def substitute(self, var, value: "MultiPoly") -> "MultiPoly":
        """Replace ``var`` by the polynomial ``value`` (Horner in ``var``)."""
        if var not in self.vars:
            return self
        rest = [v for v in self.vars if v != var]
        vars = rest + [v for v in value.vars if v not in rest]
        parts = self.coeffs_in(var)
        value = value.with_vars(vars)
        acc = MultiPoly.zero(self.cfg, vars)
        for k in range(max(parts), -1, -1):
            acc = acc * value
            if k in parts:
                acc = acc + parts[k].drop_var(var).with_vars(vars)
        return acc

    def drop_var(self, var) -> "MultiPoly":
        i = self.index(var)
        if any(m[i] for m in self.terms):
            raise PolyError(f"{var} still occurs")
        return MultiPoly(self.cfg, self.vars[:i] + self.vars[i + 1:],
                         {m[:i] + m[i + 1:]: c for m, c in self.terms.items()})

    # ------------------------------------------------------------- display
    def __repr__(self):
        return f"MultiPoly({self.pretty()})"

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, reverse=True):
            mon = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(self.vars, mono) if k)
            parts.append(f"({self.terms[mono].pretty()})" + (f"*{mon}" if mon else ""))
        return " + ".join(parts)

    def to_json(self):
        return {
            "vars": list(self.vars),
            "terms": [[list(m), self.terms[m].to_json()] for m in sorted(self.terms)],
        }

    @classmethod
    def from_json(cls, cfg, obj) -> "MultiPoly":
        return cls(cfg, obj["vars"], {tuple(m): Series.from_json(cfg, c) for m, c in obj["terms"]})


# ----------------------------------------------------------------------------
# Hasse-Schmidt calculus
# ----------------------------------------------------------------------------

def hasse_derivative(f: MultiPoly, var, n: int) -> MultiPoly:
    """D^(n) with respect to ``var``: X^m -> binom(m, n) X^(m-n) over F_p."""
    if n < 0:
        raise ValueError("order must be nonnegative")
    i = f.index(var)
    if n == 0:
        return f
    terms = {}
    for mono, c in f.terms.items():
        m = mono[i]
        if m < n:
            continue
        b = comb(m, n) % f.cfg.p
        if b == 0:
            continue
        new = list(mono)
        new[i] = m - n
        terms[tuple(new)] = c.scale(b)
    return MultiPoly(f.cfg, f.vars, terms)


def hasse_multi(f: MultiPoly, orders: Dict[str, int]) -> MultiPoly:
    for v, n in orders.items():
        if n:
            f = hasse_derivative(f, v, n)
    return f


def taylor_expand(f: MultiPoly, var, center: Series):
    """[(n, (D^(n) f)(center))] for n = 0..deg f; other variables stay symbolic
    only if f is univariate in ``var``."""
    others = [v for v in f.used_vars() if v != var]
    if others:
        raise PolyError(f"taylor_expand needs a polynomial in {var} only, found {others}")
    if not center.terms and not center.is_exact_zero():
        raise HahnError("center has no known leading term")
    d = f.deg(var)
    return [(n, hasse_derivative(f, var, n).evaluate({var: center})) for n in range(max(d, 0) + 1)]


# ----------------------------------------------------------------------------
# division
# ----------------------------------------------------------------------------

def pseudo_divide(f: MultiPoly, h: MultiPoly, var=None):
    """Return (c, g1, g0) with c f = g1 h + g0 and deg_var g0 < deg_var h.

    ``c = lc(h)^(deg f - deg h + 1)`` (1 if deg f < deg h).  The leading
    coefficient of h in ``var`` must be a constant.
    """
    if var is None:
        used = set(h.used_vars()) | set(f.used_vars())
        if len(used) > 1:
            raise PolyError("name the division variable for multivariate input")
        var = (h.used_vars() or f.used_vars() or h.vars)[0]
    f, h = f._align(h)
    dh = h.deg(var)
    if dh < 1:
        raise PolyError("divisor must have degree >= 1")
    lc_poly = h.lc(var)
    if lc_poly.used_vars():
        raise PolyError("leading coefficient of the divisor must be constant")
    lc = lc_poly.constant_term()
    one = f.cfg.one()
    df = f.deg(var)
    if df < dh:
        return one, MultiPoly.zero(f.cfg, f.vars), f
    i = f.index(var)
    e = df - dh + 1
    q = MultiPoly.zero(f.cfg, f.vars)
    r = f
    while r.deg(var) >= dh:
        dr = r.deg(var)
        lead = r.lc(var)
        mono = tuple(dr - dh if j == i else 0 for j in range(len(f.vars)))
        s = lead * MultiPoly(f.cfg, f.vars, {mono: one})
        q = q * lc + s
        r = r * lc - s * h
        e -= 1
    fix = lc ** e
    return lc ** (df - dh + 1), q * fix, r * fix


@dataclass(frozen=True)
class TowerSpec:
    """Univariate h_0, ..., h_{n-1} (any variable name), each of degree > 1."""

    levels: tuple

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        for i, h in enumerate(self.levels):
            used = h.used_vars()
            if len(used) > 1:
                raise PolyError(f"h_{i} must be univariate")
            if h.deg() <= 1:
                raise PolyError(f"h_{i} must have degree > 1")
            lc = h.lc(used[0]).constant_term()
            if not lc.terms:
                raise PolyError(f"h_{i} leading coefficient has no exact value")

    def __len__(self):
        return len(self.levels)

    def level(self, i: int) -> MultiPoly:
        """h_i as a polynomial in X_i."""
        h = self.levels[i]
        src = h.used_vars()[0]
        return h.drop_unused().rename({src: tower_var(i)})

    def degrees(self):
        return [h.deg() for h in self.levels]


def _drop_unused(self: MultiPoly) -> MultiPoly:
    used = self.used_vars()
    return self.with_vars(used) if used else MultiPoly(self.cfg, (), {(): c for c in self.terms.values()})


MultiPoly.drop_unused = _drop_unused


def _required_length(deg_f, degrees):
    """Levels needed until the top variable degree drops below its level's
    degree; unknown levels are assumed to have the least possible degree 2."""
    d, i = deg_f, 0
    while True:
        di = degrees[i] if i < len(degrees) else 2
        if d < di:
            return i + 1
        d //= di
        i += 1


def reduce_mod_tower(f: MultiPoly, tower: TowerSpec, strict: bool = False):
    """Return (c, F) with c f = F(X0, h_0(X0), h_1(h_0(X0)), ...).

    Divides fully by h_0, then by h_1 in the new variable, and so on, stopping
    at the first level i where deg_{X_i} F < deg h_i.  With ``strict`` the
    last variable must also satisfy its bound, which needs a level for it.
    """
    if len(tower) == 0:
        raise PolyError("tower must be nonempty")
    x0 = tower_var(0)
    if set(f.used_vars()) - {x0}:
        raise PolyError(f"f must be a polynomial in {x0}")
    cfg = f.cfg
    c = cfg.one()
    F = f.with_vars((x0,))
    i = 0
    while True:
        xi = tower_var(i)
        if i == len(tower):
            if strict and F.deg(xi) > 0:
                need = _required_length(f.deg(x0), tower.degrees())
                raise TowerTooShort(
                    f"variable {xi} has degree {F.deg(xi)} and no level bounds it; "
                    f"need at least {need} levels", need)
            return c, F
        h = tower.level(i)
        if F.deg(xi) < h.deg(xi):
            return c, F
        ci, F = _expand_in_level(F, h, xi, tower_var(i + 1))
        c = c * ci
        i += 1


def _expand_in_level(F, h, xi, xnext):
    """c F = G(.., xi, h(xi)) with deg_xi G < deg h, G linear combination of
    powers of the fresh variable ``xnext``."""
    cfg = F.cfg
    vars = tuple(F.vars) + (xnext,)
    F = F.with_vars(vars)
    h = h.with_vars(vars)
    digits = []
    cs = []
    cur = F
    while cur.deg(xi) >= h.deg(xi):
        ci, q, r = pseudo_divide(cur, h, xi)
        digits.append(r)
        cs.append(ci)
        cur = q
    digits.append(cur)
    cs.append(cfg.one())
    # c_0 F = q_0 h + r_0, c_1 q_0 = q_1 h + r_1, ...
    # (c_0 ... c_k) F = sum_j (prod_{l > j} c_l) r_j h^j
    total = cfg.one()
    for ci in cs:
        total = total * ci
    xn = MultiPoly.var(cfg, xnext, vars)
    G = MultiPoly.zero(cfg, vars)
    for j, r in enumerate(digits):
        mult = cfg.one()
        for l in range(j + 1, len(cs)):
            mult = mult * cs[l]
        G = G + (r * mult) * xn ** j
    return total, G


def ideal_membership_witness(P: MultiPoly, tower: TowerSpec) -> MultiPoly:
    """Residue of P under X_{i+1} <- h_i(X_i), top variable first.

    The result is a polynomial in X0 that vanishes iff P lies in the ideal
    (X_1 - h_0(X_0), ..., X_n - h_{n-1}(X_{n-1})).
    """
    top = -1
    for v in P.used_vars():
        if not (v.startswith("X") and v[1:].isdigit()):
            raise PolyError(f"unexpected variable {v}")
        top = max(top, int(v[1:]))
    if top > len(tower):
        raise PolyError(f"P uses X{top} but the tower has {len(tower)} levels")
    cur = P
    for i in range(top, 0, -1):
        cur = cur.substitute(tower_var(i), tower.level(i - 1))
    return cur.with_vars((tower_var(0),))


def content_normalize(f: MultiPoly, rel_prec=None):
    """Return (c, f / c) with c the value-minimal coefficient (first in
    monomial order among ties), so that f / c has a coefficient equal to 1
    and all coefficients in the valuation ring.

    1 / c is exact when c is a monomial; otherwise ``rel_prec`` bounds its
    precision relative to val(1 / c).
    """
    live = [(c.v, m) for m, c in f.terms.items() if c.terms]
    if not live:
        raise PolyError("no coefficient with a known value")
    _, mono = min(live)
    c = f.terms[mono]
    if rel_prec is None:
        out_prec = INF
    else:
        out_prec = f.cfg.exp(rel_prec) - c.v
    inv = invert(c, out_prec)
    terms = {m: (x * inv if m != mono else f.cfg.one()) for m, x in f.terms.items()}
    return c, MultiPoly(f.cfg, f.vars, terms)
