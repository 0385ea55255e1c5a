"""Complete-intersection presentations over a tower of pseudo limits.

Level n of a tower carries a limit x_n, a window a_{n,0..N} converging to it
and (except possibly at the top) a polynomial h_n with x_{n+1} = h_n(x_n).
For an index j the fraction variable is

    x_{n,j} = (x_n - a_{n,j}) / (a_{n,j+1} - a_{n,j}),

a unit, and q_{n,j}(X) = a_{n,j} + (a_{n,j+1} - a_{n,j}) X recovers x_n from it.
The relation g_{j,j'} = h_n(q_{n,j}(X_{n,j})) - q_{n+1,j'}(X_{n+1,j'}) is affine
in its newest variable, which gives a triangular system.
"""
from __future__ import annotations

import functools
import operator
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .hahn import HahnError, PrecisionTooLow, Series, divide, min_value
from .ordered import INF, zero
from .poly import MultiPoly, TowerSpec, pseudo_divide, reduce_mod_tower, tower_var
from .pseudo import (PseudoSequence, check_pseudo_convergent, default_b, is_pseudo_limit,
                     scale_and_factor_multivar)

__all__ = [
    "TowerLevel", "TransitionMap", "Morphism", "CIPresentation", "ReductionReport",
    "fraction_var", "q_poly", "relation_poly", "transition", "build_presentation",
    "element_reduction_report", "levels_from_planted", "frac_name",
    "CIError", "NotAUnit", "IndexOutOfWindow",
]


class CIError(HahnError):
    pass


class NotAUnit(CIError):
    pass


class IndexOutOfWindow(CIError):
    pass


def frac_name(n: int, j: int) -> str:
    return f"X{n}_{j}"


@dataclass(frozen=True)
class TowerLevel:
    x: Series
    seq: PseudoSequence
    h: Optional[MultiPoly] = None

    def __post_init__(self):
        if self.h is not None:
            used = self.h.used_vars()
            if len(used) != 1 or self.h.deg(used[0]) <= 1:
                raise CIError("h must be univariate of degree > 1")
        if len(self.seq) < 3:
            raise CIError("window needs at least 3 terms")

    def validate(self, nxt: Optional["TowerLevel"] = None):
        """Check the level invariants; raises on failure."""
        chk = check_pseudo_convergent(self.seq)
        if not chk:
            raise CIError(f"window not pseudo-convergent, violation at {chk.violation}")
        if not is_pseudo_limit(self.x, self.seq):
            raise CIError("x is not a pseudo limit of the window")
        if nxt is not None:
            if self.h is None:
                raise CIError("inner level needs h")
            img = self.h.evaluate({self.h.used_vars()[0]: self.x})
            if not img.agrees(nxt.x):
                raise CIError("next limit differs from h(x) below precision")
        return True

    def delta(self, j: int) -> Series:
        if not 0 <= j < len(self.seq) - 1:
            raise IndexOutOfWindow(f"index {j} needs a successor inside a window of {len(self.seq)}")
        return self.seq[j + 1] - self.seq[j]


def levels_from_planted(pt) -> List[TowerLevel]:
    return [TowerLevel(x, s, h) for x, s, h in zip(pt.limits, pt.seqs, pt.tower.levels)]


# ---------------------------------------------------------------------------
# fraction variables and transitions
# ---------------------------------------------------------------------------

def fraction_var(level: TowerLevel, j: int) -> Series:
    """x_{n,j}; checks it is a unit."""
    den = level.delta(j)
    dv = den.val()
    if not dv.exact:
        raise PrecisionTooLow(f"a_{{j+1}} - a_j has no exact value", required=dv.value)
    num = level.x - level.seq[j]
    nv = num.val()
    if not nv.exact:
        if nv.value > dv.value:
            raise NotAUnit(f"val(x - a_{j}) >= {nv.value} exceeds val of the step {dv.value}")
        raise PrecisionTooLow(f"x known only to {level.x.prec}", required=dv.value)
    if nv.value != dv.value:
        raise NotAUnit(f"val(x - a_{j}) = {nv.value} differs from {dv.value}")
    out = divide(num, den, num.prec - dv.value if num.prec is not INF else INF)
    return out


def q_poly(level: TowerLevel, j: int, var: str) -> MultiPoly:
    cfg = level.x.cfg
    return MultiPoly.const(cfg, level.seq[j], (var,)) + MultiPoly.var(cfg, var) * level.delta(j)


@dataclass(frozen=True)
class TransitionMap:
    alpha: Series
    beta: Series
    j: int
    j2: int

    def compose(self, other: "TransitionMap") -> "TransitionMap":
        """self: x_j = a + b x_j2, other: x_j2 = a' + b' x_j3."""
        if other.j != self.j2:
            raise CIError("maps do not chain")
        return TransitionMap(self.alpha + self.beta * other.alpha, self.beta * other.beta,
                             self.j, other.j2)

    def apply(self, poly: MultiPoly, src: str, dst: str) -> MultiPoly:
        """Substitute src -> alpha + beta dst."""
        cfg = self.alpha.cfg
        img = MultiPoly.const(cfg, self.alpha, (dst,)) + MultiPoly.var(cfg, dst) * self.beta
        return poly.substitute(src, img)

    def to_json(self):
        return {"from": self.j, "to": self.j2, "alpha": self.alpha.to_json(), "beta": self.beta.to_json()}


def transition(level: TowerLevel, j: int, j2: int, out_prec=None) -> TransitionMap:
    """x_j = alpha + beta x_j2 for j < j2, alpha a unit and beta in the maximal ideal."""
    if not j < j2:
        raise CIError(f"transition needs j < j', got {j}, {j2}")
    d = level.delta(j)
    d2 = level.delta(j2)
    if out_prec is None:
        out_prec = level.x.prec - d.v if level.x.prec is not INF else INF
        if out_prec is INF and (len(d.terms) > 1):
            out_prec = d2.v - d.v + d2.v
    alpha = divide(level.seq[j2] - level.seq[j], d, out_prec)
    beta = divide(d2, d, out_prec)
    z = zero(level.x.cfg.rank)
    ra, rb = alpha.val(), beta.val()
    if not ra.exact or ra.value != z:
        raise NotAUnit(f"alpha has value {ra.value}")
    if not rb.exact or not rb.value > z:
        raise CIError(f"beta has value {rb.value}, expected positive")
    tm = TransitionMap(alpha, beta, j, j2)
    xj, xj2 = fraction_var(level, j), fraction_var(level, j2)
    if not (alpha + beta * xj2).agrees(xj):
        raise CIError("x_j != alpha + beta x_j' to precision")
    return tm


# ---------------------------------------------------------------------------
# relations and presentations
# ---------------------------------------------------------------------------

def relation_poly(levels: Sequence[TowerLevel], n: int, j: int, j2: int, check: bool = True) -> MultiPoly:
    """g_{j,j'} = h_n(q_{n,j}) - q_{n+1,j'} in X{n}_{j}, X{n+1}_{j2}."""
    lo, hi = levels[n], levels[n + 1]
    if lo.h is None:
        raise CIError(f"level {n} has no h")
    a, b = frac_name(n, j), frac_name(n + 1, j2)
    src = lo.h.used_vars()[0]
    hq = lo.h.substitute(src, q_poly(lo, j, a)).with_vars((a, b))
    g = hq - q_poly(hi, j2, b).with_vars((a, b))
    if check:
        at = g.evaluate({a: fraction_var(lo, j), b: fraction_var(hi, j2)})
        need = hi.delta(j2).v
        if at.terms:
            raise CIError(f"relation does not vanish at the witness: value {at.v}")
        if not at.prec > need:
            raise PrecisionTooLow(f"witness check only good to {at.prec}", required=need)
    return g


@dataclass(frozen=True)
class Morphism:
    source: tuple
    target: tuple
    maps: tuple                 # TransitionMap or None (identity) per level
    relations_ok: tuple

    @property
    def ok(self) -> bool:
        return all(self.relations_ok)

    def to_json(self):
        return {"source": list(self.source), "target": list(self.target),
                "maps": [m.to_json() if m is not None else None for m in self.maps],
                "relations_ok": list(self.relations_ok)}


@dataclass(frozen=True)
class CIPresentation:
    indices: tuple
    vars: tuple
    relations: tuple
    witness: tuple
    morphisms: tuple = ()

    def is_triangular(self) -> bool:
        """Relation e uses only vars e-1 and e and is affine in var e with an
        exact nonzero constant coefficient."""
        for e, g in enumerate(self.relations, start=1):
            allowed = {self.vars[e - 1], self.vars[e]}
            if not set(g.used_vars()) <= allowed:
                return False
            parts = g.coeffs_in(self.vars[e]) if self.vars[e] in g.vars else {}
            if g.deg(self.vars[e]) != 1:
                return False
            lead = parts[1]
            if lead.used_vars():
                return False
            c = lead.constant_term()
            if not c.terms or c.val().value is INF or not c.val().exact:
                return False
        return True

    def witness_vanishes(self) -> bool:
        point = dict(zip(self.vars, self.witness))
        return all(g.evaluate(point).is_zero_to_prec() for g in self.relations)

    def to_json(self):
        return {
            "indices": list(self.indices),
            "vars": list(self.vars),
            "relations": [g.to_json() for g in self.relations],
            "witness": [w.to_json() for w in self.witness],
            "morphisms": [m.to_json() for m in self.morphisms],
        }


def _check_morphism(levels, src: tuple, dst: tuple, rels_dst) -> Morphism:
    maps = []
    for e, (j, j2) in enumerate(zip(src, dst)):
        maps.append(None if j == j2 else transition(levels[e], j, j2))
    oks = []
    for e in range(len(src) - 1):
        g = relation_poly(levels, e, src[e], src[e + 1], check=False)
        img = g
        for lvl in (e, e + 1):
            a, b = frac_name(lvl, src[lvl]), frac_name(lvl, dst[lvl])
            if maps[lvl] is not None:
                img = maps[lvl].apply(img, a, b)
        gt = rels_dst[e]
        newest = frac_name(e + 1, dst[e + 1])
        # membership in (g_target): the target relation is affine in the newest
        # variable with a constant leading coefficient
        img, gt2 = img._align(gt)
        c, quo, rem = pseudo_divide(img, gt2, newest)
        oks.append(rem.is_zero_to_prec() and not quo.used_vars())
    return Morphism(tuple(src), tuple(dst), tuple(maps), tuple(oks))


def build_presentation(levels: Sequence[TowerLevel], indices: Sequence[int],
                       targets: Optional[Sequence[Sequence[int]]] = None) -> CIPresentation:
    """C_J = V[X_{0,j_0}, ..., X_{n,j_n}] / (g_{j_0,j_1}, ..., g_{j_{n-1},j_n}).

    ``targets`` are componentwise larger index tuples to record morphism data
    for; by default the tuple shifted by one when it fits in every window.
    """
    J = tuple(indices)
    n = len(J) - 1
    if n < 0 or n > len(levels) - 1:
        raise CIError("need one index per level")
    vars = tuple(frac_name(e, j) for e, j in enumerate(J))
    witness = tuple(fraction_var(levels[e], j) for e, j in enumerate(J))
    rels = tuple(relation_poly(levels, e, J[e], J[e + 1]) for e in range(n))
    if targets is None:
        shifted = tuple(j + 1 for j in J)
        targets = [shifted] if all(j < len(levels[e].seq) - 1 for e, j in enumerate(shifted)) else []
    morphs = []
    for T in targets:
        T = tuple(T)
        if len(T) != len(J) or any(b < a for a, b in zip(J, T)):
            raise CIError(f"target {T} is not componentwise >= {J}")
        rels_t = tuple(relation_poly(levels, e, T[e], T[e + 1], check=False) for e in range(n))
        morphs.append(_check_morphism(levels, J, T, rels_t))
    pres = CIPresentation(J, vars, rels, witness, tuple(morphs))
    if not pres.is_triangular():
        raise CIError("relations are not triangular")
    return pres


# ---------------------------------------------------------------------------
# element reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionReport:
    c: Series
    F: MultiPoly
    d: Series
    u: Series
    d_prime: Series
    indices: tuple
    nus: tuple
    q_constant_value: object
    q_unit_ok: bool
    nonzero: bool

    @property
    def ok(self) -> bool:
        z = zero(self.u.cfg.rank)
        r = self.u.val()
        return r.exact and r.value == z and self.q_unit_ok and self.nonzero

    def to_json(self):
        return {
            "c": self.c.to_json(),
            "F": self.F.to_json(),
            "d": self.d.to_json(),
            "u": self.u.to_json(),
            "val_u": self.u.val().value.to_json(),
            "d_prime": self.d_prime.to_json(),
            "indices": list(self.indices),
            "nus": list(self.nus),
            "q_constant_value": self.q_constant_value.to_json(),
            "q_unit_ok": self.q_unit_ok,
            "nonzero": self.nonzero,
        }


def element_reduction_report(f: MultiPoly, levels: Sequence[TowerLevel], bs=(),
                             indices: Optional[Sequence[int]] = None) -> ReductionReport:
    """c f = F(X_0, h_0(X_0), ...), then f(x_0) = (d / c) u with val(u) = 0.

    Also substitutes X_e = q_{e,j_e}(X_{e,j_e}) into F and checks that the
    constant term carries the smallest value, i.e. F(q) = d U with U = 1
    modulo the maximal ideal.  The index tuple defaults to the one chosen by
    the factorization.
    """
    cfg = f.cfg
    x0 = tower_var(0)
    src = f.used_vars()
    if len(src) > 1:
        raise CIError("f must be univariate")
    f0 = f.rename({src[0]: x0}).with_vars((x0,)) if src else MultiPoly.const(cfg, f.constant_term(), (x0,))
    hs = [lv.h for lv in levels if lv.h is not None]
    if len(hs) < len(levels) - 1:
        raise CIError("inner levels need h")
    tower = TowerSpec(tuple(hs))
    if not src:
        k = f.constant_term()
        return ReductionReport(cfg.one(), f0, k, cfg.one(), k, (0,), (), k.v, True, not k.is_zero_to_prec())
    c, F = reduce_mod_tower(f0, tower, strict=True)
    used = [int(v[1:]) for v in F.used_vars()]
    r = max(used) if used else 0
    names = tuple(tower_var(e) for e in range(r + 1))
    F = F.with_vars(names)
    sub = TowerSpec(tuple(hs[: r + 1]))
    xs, seqs = [lv.x for lv in levels[: r + 1]], [lv.seq for lv in levels[: r + 1]]
    if r and not bs:
        bs = [default_b(seqs[: s + 1]) for s in range(r)]
    hdeg = sub.degrees()
    # the factorization is of F at the rescaled limits, so hand it
    # F* = B F(Y_0, Y_1 / s_1, ...) with F*(y~) = B F(y)
    scales = [cfg.one()] + [bs[e - 1] ** (2 * max(hdeg[:e]) - 2) for e in range(1, r + 1)]
    degs = [F.deg(v) for v in names]
    B = cfg.one()
    for e in range(1, r + 1):
        B = B * scales[e] ** degs[e]
    Fs = MultiPoly(cfg, names, {m: functools.reduce(operator.mul, (scales[e] ** (degs[e] - a) for e, a in enumerate(m) if e), co)
                                for m, co in F.terms.items()})
    # F*(y~) = B c f(x_0) exactly; the right side is usually known further
    fx = f0.evaluate({x0: levels[0].x})
    mf = scale_and_factor_multivar(Fs, xs, seqs, sub, bs, target=B * c * fx)
    fac = mf.factorization
    d, u = fac.d, fac.u
    cB = c * B
    d_prime = divide(d, cB, INF if len(cB.terms) == 1 else fac.target.prec - cB.v)
    J = tuple(indices) if indices is not None else tuple(fac.indices)
    if len(J) != r + 1:
        raise CIError(f"need {r + 1} indices")
    P = F
    for e, j in enumerate(J):
        P = P.substitute(names[e], q_poly(levels[e], j, frac_name(e, j)))
    const = P.constant_term()
    point = {names[e]: levels[e].seq[j] for e, j in enumerate(J)}
    Fa = F.evaluate(point)
    const_val = const.v
    q_ok = const.val().exact and Fa.val().exact and const_val == Fa.v and all(
        co.v > const_val for m, co in P.terms.items() if any(m))
    if not (fx * cB).agrees(d * u):
        raise CIError("c f(x_0) and d u disagree to precision")
    return ReductionReport(c, F, d, u, d_prime, J, tuple(mf.nus), const_val, q_ok, not fx.is_zero_to_prec())
