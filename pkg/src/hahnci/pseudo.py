"""Pseudo-convergent sequences, pseudo limits, witnesses and unit factorizations.

A :class:`PseudoSequence` is a finite window v_0..v_N of exact series
standing for an ordinal-indexed sequence.  Every statement of the form "for
large enough i" is checked on the window only; results carry the indices
they were checked at.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from .hahn import FieldConfig, HahnError, PrecisionTooLow, Series, divide, invert, min_value
from .ordered import (INF, HorizonExhausted, Mode, MonotoneSequence, ThresholdProblem,
                      certify_grid, ge, zero)
from .poly import MultiPoly, TowerSpec, hasse_derivative, hasse_multi

__all__ = [
    "PseudoSequence", "ConvergenceCheck", "Classification", "UnitFactorization",
    "ImageResult", "LocalRepresentation", "MultivarFactorization",
    "check_pseudo_convergent", "is_pseudo_limit", "classify", "minimal_degree_witness",
    "image_sequence", "factor_below_degree", "localize_representation",
    "scale_and_factor_multivar", "default_b", "witness_values",
    "PseudoError", "WindowTooShort", "SearchBudgetExceeded", "NoWitnessInBounds",
    "OnsetNotFound", "DegenerateImage", "NoSeparatingIndex", "ValueObstruction",
    "HypothesisViolation",
]


class PseudoError(HahnError):
    pass


class WindowTooShort(PseudoError):
    pass


class SearchBudgetExceeded(PseudoError):
    pass


class NoWitnessInBounds(PseudoError):
    pass


class OnsetNotFound(PseudoError):
    pass


class DegenerateImage(OnsetNotFound):
    pass


class NoSeparatingIndex(PseudoError):
    pass


class ValueObstruction(PseudoError):
    pass


class HypothesisViolation(PseudoError):
    pass


# ---------------------------------------------------------------------------
# value comparisons that respect precision
# ---------------------------------------------------------------------------

def _exact_val(x: Series, what="value"):
    r = x.val()
    if not r.exact:
        raise PrecisionTooLow(f"{what} only known to be >= {r.value}", required=r.value)
    return r.value


def _val_lt(a: Series, b: Series) -> bool:
    """Decide val(a) < val(b), raising when the precision cannot tell."""
    ra, rb = a.val(), b.val()
    if ra.exact and rb.exact:
        return ra.value < rb.value
    if ra.exact:
        if ra.value < rb.value:
            return True
        raise PrecisionTooLow(f"cannot compare {ra.value} with a value >= {rb.value}", required=ra.value)
    if rb.exact and ra.value >= rb.value:
        return False
    raise PrecisionTooLow("both values are only bounded below")


def _val_eq(a: Series, value) -> bool:
    r = a.val()
    if r.exact:
        return r.value == value
    if value is not INF and r.value > value:
        return False
    raise PrecisionTooLow(f"value only known to be >= {r.value}, needed to compare with {value}",
                          required=value)


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PseudoSequence:
    window: tuple
    rule: Optional[Callable[[int], Series]] = field(default=None, compare=False, repr=False)
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(self.window))
        if not self.window:
            raise WindowTooShort("empty window")
        cfg = self.window[0].cfg
        if any(v.cfg != cfg for v in self.window):
            raise PseudoError("mixed field configurations in window")

    @property
    def cfg(self) -> FieldConfig:
        return self.window[0].cfg

    def __len__(self):
        return len(self.window)

    def __getitem__(self, i):
        return self.window[i]

    def extended(self, extra: int) -> "PseudoSequence":
        """Window enlarged by ``extra`` terms produced by the rule."""
        if self.rule is None:
            raise PseudoError("no generator rule to extend the window")
        n = len(self.window)
        return PseudoSequence(self.window + tuple(self.rule(i) for i in range(n, n + extra)),
                              self.rule, self.label)

    def prefix(self, n: int) -> "PseudoSequence":
        return PseudoSequence(self.window[:n], self.rule, self.label)

    def tail(self, start: int) -> "PseudoSequence":
        return PseudoSequence(self.window[start:], None, self.label)

    def map(self, fn) -> "PseudoSequence":
        return PseudoSequence(tuple(fn(v) for v in self.window), None, self.label)

    @property
    def gamma_profile(self) -> list:
        """val(v_{i+1} - v_i) for i = 0..N-1."""
        return [_exact_val(b - a, f"difference {i + 1}-{i}")
                for i, (a, b) in enumerate(zip(self.window, self.window[1:]))]

    def gamma_sequence(self) -> MonotoneSequence:
        return MonotoneSequence(tuple(self.gamma_profile))

    def to_json(self):
        return {"label": self.label, "window": [v.to_json() for v in self.window]}


@dataclass(frozen=True)
class ConvergenceCheck:
    ok: bool
    violation: Optional[tuple]
    profile: list

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"ok": self.ok, "violation": list(self.violation) if self.violation else None,
                "profile": [g.to_json() for g in self.profile]}


def check_pseudo_convergent(s: PseudoSequence) -> ConvergenceCheck:
    """Check val(v_i - v_k) < val(v_j - v_k) for all i < j < k in the window.

    Triples are visited tightest first (by k - i, then i, then j), so the
    reported violation is the most local one.
    """
    n = len(s)
    if n < 3:
        raise WindowTooShort(f"need at least 3 terms, got {n}")
    w = s.window
    diffs = {}

    def d(i, k):
        if (i, k) not in diffs:
            diffs[(i, k)] = w[k] - w[i]
        return diffs[(i, k)]

    for span in range(2, n):
        for i in range(0, n - span):
            k = i + span
            for j in range(i + 1, k):
                if not _val_lt(d(i, k), d(j, k)):
                    return ConvergenceCheck(False, (i, j, k), [])
    return ConvergenceCheck(True, None, s.gamma_profile)


def is_pseudo_limit(x: Series, s: PseudoSequence) -> bool:
    """val(x - v_i) == val(v_{i+1} - v_i) for every i in the window."""
    if len(s) < 2:
        raise WindowTooShort("need at least 2 terms")
    for i, g in enumerate(s.gamma_profile):
        if not _val_eq(x - s[i], g):
            return False
    return True


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

def witness_values(f: MultiPoly, s: PseudoSequence) -> list:
    var = f.vars[0] if f.vars else "T"
    return [f.evaluate({var: v}).val().value if f.vars else f.constant_term().v for v in s.window]


def _increasing_onset(values) -> Optional[int]:
    """Least k with values[k] < values[k+1] < ... < values[-1]."""
    k = len(values) - 1
    while k > 0 and values[k - 1] < values[k]:
        k -= 1
    return k


@dataclass(frozen=True)
class Classification:
    kind: str                       # "algebraic" or "transcendental_up_to"
    degree_bound: int
    height_bound: int
    witness: Optional[MultiPoly] = None
    onset: Optional[int] = None
    witness_values: tuple = ()
    candidates_checked: int = 0
    fundamental_bound: object = None
    fundamental: Optional[bool] = None
    profile: tuple = ()

    def to_json(self):
        return {
            "kind": self.kind,
            "degree_bound": self.degree_bound,
            "height_bound": self.height_bound,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "onset": self.onset,
            "witness_values": [v.to_json() for v in self.witness_values],
            "candidates_checked": self.candidates_checked,
            "fundamental_bound": None if self.fundamental_bound is None else self.fundamental_bound.to_json(),
            "fundamental": self.fundamental,
            "profile": [g.to_json() for g in self.profile],
        }


def _coefficient_pool(cfg: FieldConfig, exponents, H: int):
    """Series with support in ``exponents`` of size <= H, ordered by support
    size then (exponent, coefficient) encoding."""
    pool = [cfg.zero()]
    nonzero = range(1, cfg.q)
    for k in range(1, H + 1):
        for sup in itertools.combinations(exponents, k):
            for cs in itertools.product(nonzero, repeat=k):
                pool.append(Series(cfg, dict(zip(sup, cs))))
    return pool


def _encoding(c: Series):
    return tuple((e, a) for e, a in c.terms.items())


def _pool_size(cfg, n_exp, H):
    from math import comb
    return sum(comb(n_exp, k) * (cfg.q - 1) ** k for k in range(H + 1))


def _default_exponents(s: PseudoSequence):
    """Integers 0..ceil(top) on the first axis, top the largest leading
    coordinate in the window."""
    import math
    top = max((e[0] for v in s.window for e in v.terms), default=0)
    rest = (0,) * (s.cfg.rank - 1)
    return [ge(k, *rest) for k in range(max(math.ceil(top), 0) + 1)]


def _candidates(cfg, d, exponents, H, var):
    """All degree-d polynomials with coefficient supports bounded by H, the
    leading coefficient normalized to have lowest coefficient 1, in
    canonical order (support size, then encoding)."""
    pool = _coefficient_pool(cfg, exponents, H)
    leads = [c for c in pool if c.terms and next(iter(c.terms.values())) == 1]
    out = []
    for lead in leads:
        for rest in itertools.product(pool, repeat=d):
            coeffs = list(rest) + [lead]
            size = sum(len(c.terms) for c in coeffs)
            key = (size, tuple(_encoding(c) for c in reversed(coeffs)))
            out.append((key, coeffs))
    out.sort(key=lambda kc: kc[0])
    for _, coeffs in out:
        yield MultiPoly.univariate(cfg, coeffs, var)


def _witness_check(coeffs_poly: MultiPoly, powers, min_tail):
    """Return (onset, values) if the candidate's values increase strictly on
    a tail of length >= min_tail, else None.  Values are computed from the
    end of the window backwards and abandoned as soon as they stop growing."""
    n = len(powers)
    var = coeffs_poly.vars[0]
    parts = coeffs_poly.coeffs_in(var)
    coeffs = {k: p.constant_term() for k, p in parts.items()}
    vals = []
    for i in range(n - 1, -1, -1):
        acc = None
        for k, c in coeffs.items():
            term = c * powers[i][k]
            acc = term if acc is None else acc + term
        if acc.is_zero_to_prec():
            return None
        v = acc.val().value
        if vals and not v < vals[-1]:
            break
        vals.append(v)
    if len(vals) < min_tail:
        return None
    vals.reverse()
    return n - len(vals), vals


def _search(s, degrees, H, exponents, min_tail, budget, var="T"):
    cfg = s.cfg
    if exponents is None:
        exponents = _default_exponents(s)
    exponents = sorted(set(cfg.exp(e) for e in exponents))
    maxd = max(degrees) if degrees else 0
    per = _pool_size(cfg, len(exponents), H)
    total = 0
    for d in degrees:
        total += (per - 1) * per ** d
    if total > budget:
        raise SearchBudgetExceeded(f"{total} candidates exceed the budget of {budget}")
    powers = []
    for v in s.window:
        row = [cfg.one()]
        for _ in range(maxd):
            row.append(row[-1] * v)
        powers.append(row)
    checked = 0
    for d in degrees:
        for f in _candidates(cfg, d, exponents, H, var):
            checked += 1
            hit = _witness_check(f, powers, min_tail)
            if hit is not None:
                return f, hit[0], hit[1], checked
    return None, None, None, checked


def _default_tail(s):
    return max(3, (len(s) + 1) // 2)


def classify(s: PseudoSequence, D: int, H: int, exponents=None, gamma_star=None,
             min_tail: Optional[int] = None, budget: int = 200000) -> Classification:
    """Search witnesses of degree <= D with coefficient supports of size <= H.

    Coefficient exponents come from ``exponents`` (default: the integers
    from 0 up to the largest leading exponent in the window).  A witness is a
    polynomial whose values strictly increase on a window tail of at least
    ``min_tail`` terms and never vanish there.  ``gamma_star`` additionally
    asks whether the difference profile reaches that value inside the window.
    """
    if not check_pseudo_convergent(s):
        raise HypothesisViolation("sequence is not pseudo-convergent on the window")
    min_tail = _default_tail(s) if min_tail is None else min_tail
    f, onset, vals, checked = _search(s, range(1, D + 1), H, exponents, min_tail, budget)
    profile = tuple(s.gamma_profile)
    fund = None
    if gamma_star is not None:
        gamma_star = s.cfg.exp(gamma_star)
        fund = bool(profile) and profile[-1] >= gamma_star
    if f is None:
        return Classification("transcendental_up_to", D, H, candidates_checked=checked,
                              fundamental_bound=gamma_star, fundamental=fund, profile=profile)
    return Classification("algebraic", D, H, f, onset, tuple(vals), checked,
                          gamma_star, fund, profile)


def minimal_degree_witness(s: PseudoSequence, D: int, H: int, exponents=None,
                           min_tail: Optional[int] = None, budget: int = 200000) -> MultiPoly:
    """The first witness in canonical order (degree, support size, encoding)."""
    min_tail = _default_tail(s) if min_tail is None else min_tail
    f, _, _, _ = _search(s, range(1, D + 1), H, exponents, min_tail, budget)
    if f is None:
        raise NoWitnessInBounds(f"no witness of degree <= {D} with supports <= {H}")
    return f


# ---------------------------------------------------------------------------
# image sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ImageResult:
    sequence: PseudoSequence
    onset: int
    limit_verified: Optional[bool]

    def to_json(self):
        return {"onset": self.onset, "limit_verified": self.limit_verified,
                "profile": [g.to_json() for g in self.sequence.tail(self.onset).gamma_profile]}


def image_sequence(f: MultiPoly, s: PseudoSequence, x: Optional[Series] = None) -> ImageResult:
    """(f(v_i)) and the least onset after which it is pseudo-convergent.

    With a pseudo limit ``x`` of s, also checks that f(x) is a pseudo limit
    of the tail.
    """
    used = f.used_vars()
    if len(used) > 1:
        raise PseudoError("image_sequence needs a univariate polynomial")
    if not used:
        raise DegenerateImage("constant polynomial: all differences vanish")
    var = used[0]
    img = PseudoSequence(tuple(f.evaluate({var: v}) for v in s.window), None, s.label)
    diffs = [b - a for a, b in zip(img.window, img.window[1:])]
    if all(d.is_exact_zero() for d in diffs):
        raise DegenerateImage("image sequence is constant")
    vals = []
    for d in diffs:
        vals.append(INF if d.is_exact_zero() else _exact_val(d))
    # the profile must increase strictly and stay finite from the onset on
    k = len(vals) - 1
    if vals[k] is INF:
        raise OnsetNotFound("last difference vanishes")
    while k > 0 and vals[k - 1] is not INF and vals[k - 1] < vals[k]:
        k -= 1
    if len(img) - k < 3:
        raise OnsetNotFound(f"pseudo-convergent tail has {len(img) - k} terms, need 3")
    verified = None
    if x is not None:
        # f(x) - f(v_i) through the Taylor expansion at v_i, which keeps the
        # relative precision of x - v_i instead of the absolute one of x
        verified = True
        for i in range(k, len(img) - 1):
            dx = _taylor_difference(f, var, s[i], x - s[i])
            if not _val_eq(dx, vals[i]):
                verified = False
                break
    return ImageResult(img, k, verified)


def _taylor_difference(f: MultiPoly, var: str, v: Series, delta: Series) -> Series:
    """f(v + delta) - f(v) = sum_{k >= 1} D^k f(v) delta^k."""
    out = v.cfg.zero()
    power = delta
    for n in range(1, f.deg(var) + 1):
        out = out + hasse_derivative(f, var, n).evaluate({var: v}) * power
        power = power * delta
    return out


# ---------------------------------------------------------------------------
# unit factorizations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitFactorization:
    d: Series
    u: Series
    indices: tuple
    target: Series
    taylor_values: tuple
    unit_form_values: tuple = ()
    assumptions: tuple = ()

    def check(self) -> bool:
        """d u agrees with the target to the target's precision, val(u) = 0."""
        r = self.u.val()
        if not r.exact or r.value != zero(self.u.cfg.rank):
            return False
        return (self.d * self.u).agrees(self.target)

    def to_json(self):
        return {
            "indices": list(self.indices),
            "d": self.d.to_json(),
            "val_d": self.d.v.to_json(),
            "u": self.u.to_json(),
            "val_u": self.u.val().value.to_json(),
            "target_prec": self.target.prec.to_json(),
            "taylor_values": [v.to_json() for v in self.taylor_values],
            "unit_form_values": [v.to_json() for v in self.unit_form_values],
            "assumptions": list(self.assumptions),
        }


def _separates(values) -> bool:
    """values[0] strictly below every other finite value, finite values distinct."""
    if values[0] is INF:
        return False
    finite = [v for v in values if v is not INF]
    if len(set(finite)) != len(finite):
        return False
    return all(values[0] < v for v in values[1:])


def _no_limit_among(candidates, s):
    notes = []
    for c in candidates:
        if is_pseudo_limit(c, s):
            raise HypothesisViolation(f"declared K-element {c.pretty()} is a pseudo limit")
    if candidates:
        notes.append(f"no pseudo limit among {len(candidates)} declared K-elements")
    notes.append("absence of a pseudo limit in K is assumed, not decided")
    return tuple(notes)


def factor_below_degree(g: MultiPoly, x: Series, s: PseudoSequence, s_min: int,
                        k_elements: Sequence[Series] = ()) -> UnitFactorization:
    """g(x) = d u with d = g(v_i) and val(u) = 0, for g of degree < s_min.

    The index i is the first in the window where the Taylor terms
    (D^(n) g)(v_i) (x - v_i)^n have pairwise different values with the n = 0
    term strictly smallest.  Ties advance i.
    """
    used = g.used_vars()
    if len(used) > 1:
        raise PseudoError("g must be univariate")
    var = used[0] if used else (g.vars[0] if g.vars else "T")
    deg = g.deg(var) if g.vars else g.deg()
    if deg < 0:
        raise PseudoError("g must be nonzero")
    if deg >= s_min:
        raise HypothesisViolation(f"deg g = {deg} is not below the witness degree {s_min}")
    if len(s) < 3:
        raise WindowTooShort("need at least 3 terms")
    if not is_pseudo_limit(x, s):
        raise HypothesisViolation("x is not a pseudo limit of the window")
    notes = _no_limit_among(list(k_elements), s)
    cfg = s.cfg
    z = zero(cfg.rank)
    if deg == 0:
        c = g.constant_term()
        return UnitFactorization(c, cfg.one(), (0,), c, (c.v,), (), notes)
    gx = g.evaluate({var: x})
    profile = s.gamma_profile
    derivs = [hasse_derivative(g, var, n) for n in range(deg + 1)]
    for i in range(len(s) - 1):
        vi = s[i]
        dv = [D.evaluate({var: vi}) for D in derivs]
        vals = [INF if c.is_exact_zero() else _exact_val(c) + profile[i] * n for n, c in enumerate(dv)]
        if not _separates(vals):
            continue
        d = dv[0]
        u = divide(gx, d, gx.prec - d.v if gx.prec is not INF else INF)
        r = u.val()
        if not r.exact:
            raise PrecisionTooLow(f"g(x) is known only to {gx.prec}, not enough to see its value",
                                  required=d.v)
        if r.value != z:
            raise NoSeparatingIndex(f"val(u) = {r.value} at index {i}")
        unit_vals = tuple(v - vals[0] for v in vals[1:] if v is not INF)
        return UnitFactorization(d, u, (i,), gx, tuple(vals), unit_vals, notes)
    raise NoSeparatingIndex("no window index separates the Taylor terms")


@dataclass(frozen=True)
class LocalRepresentation:
    ratio: Series
    u: Series
    element: Series
    factorization: UnitFactorization

    def to_json(self):
        return {"ratio": self.ratio.to_json(), "val_ratio": self.ratio.v.to_json(),
                "u": self.u.to_json(), "factorization": self.factorization.to_json()}


def localize_representation(g: MultiPoly, t: Series, x: Series, s: PseudoSequence, s_min: int,
                            out_prec=None, k_elements=()) -> LocalRepresentation:
    """Write g(x)/t as (d/t) u with val(d/t) >= 0 and val(u) = 0."""
    if not t.terms:
        raise PseudoError("t must be a nonzero series with known value")
    fac = factor_below_degree(g, x, s, s_min, k_elements)
    if fac.d.v < t.v:
        raise ValueObstruction(f"val(g(x)) = {fac.d.v} is below val(t) = {t.v}")
    cfg = s.cfg
    if out_prec is None:
        out_prec = fac.d.v - t.v + ge((1,) + (0,) * (cfg.rank - 1))
    ratio = divide(fac.d, t, out_prec)
    elem = divide(fac.target, t, min_value(out_prec, fac.target.prec - t.v))
    return LocalRepresentation(ratio, fac.u, elem, fac)


# ---------------------------------------------------------------------------
# several variables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultivarFactorization:
    factorization: UnitFactorization
    nus: tuple
    certified_points: int
    scaled_limits: tuple
    exponents_r: tuple

    def to_json(self):
        return {"nus": list(self.nus), "certified_points": self.certified_points,
                "r": list(self.exponents_r), "factorization": self.factorization.to_json()}


def default_b(seqs: Sequence[PseudoSequence]) -> Series:
    """t^c, c the least integer above every window value and gamma."""
    cfg = seqs[0].cfg
    top = max(max(v.v for v in s.window) for s in seqs)
    top = max([top] + [s.gamma_profile[-1] for s in seqs])
    c = math.floor(top[0]) + 1
    return Series(cfg, {ge(c, *([0] * (cfg.rank - 1))): 1})


def scale_and_factor_multivar(g: MultiPoly, ys: Sequence[Series], seqs: Sequence[PseudoSequence],
                              tower: TowerSpec, bs: Sequence[Series] = (),
                              k_elements=(), target: Optional[Series] = None) -> MultivarFactorization:
    """Value equality and unit factorization for g(y_0, ..., y_n).

    ``g.vars[e]`` is evaluated at y_e.  The limits and sequences for e >= 1
    are rescaled by b_{e-1}^{r_{e-1}}, r_s = 2 max_{e <= s} deg h_e - 2.
    Each b_s must have value above every value and every gamma seen in the
    windows of levels 0..s; when ``bs`` is empty, b_s = t^c with c the least
    integer that does so.  ``target`` may supply g(y~) computed another way
    (to better precision); it must agree with the direct evaluation.
    Indices nu_e are certified on the window grid so that the Taylor terms
    around (v~_{0,i_0}, ..., v~_{n,i_n}) have distinct values; then
    val(g(y~)) = val(g(v~_i)) is checked on every certified grid point, and
    the first point where the constant Taylor term is strictly smallest
    yields d = g(v~_i), u = g(y~)/d.
    """
    n = len(ys) - 1
    if len(seqs) != n + 1 or len(g.vars) != n + 1:
        raise PseudoError("need one limit, one sequence and one variable per level")
    if len(tower) < n + 1:
        raise HypothesisViolation(f"need {n + 1} tower levels for the degree bounds, got {len(tower)}")
    degs = tower.degrees()
    for e, v in enumerate(g.vars):
        if g.deg(v) >= degs[e]:
            raise HypothesisViolation(f"deg_{v} g = {g.deg(v)} is not below deg h_{e} = {degs[e]}")
    for e in range(n):
        img = tower.level(e).evaluate({f"X{e}": ys[e]})
        if not img.agrees(ys[e + 1]):
            raise HypothesisViolation(f"y_{e + 1} differs from h_{e}(y_{e}) below precision")
    for e, (y, s) in enumerate(zip(ys, seqs)):
        if not is_pseudo_limit(y, s):
            raise HypothesisViolation(f"y_{e} is not a pseudo limit of its sequence")
    if n and not bs:
        bs = [default_b(seqs[: si + 1]) for si in range(n)]
    if len(bs) < n:
        raise HypothesisViolation(f"need b_0..b_{n - 1}")
    for si, b in enumerate(bs[:n]):
        vb = _exact_val(b, f"b_{si}")
        for e in range(si + 1):
            for v in seqs[e].window:
                if not vb > v.v:
                    raise HypothesisViolation(f"val(b_{si}) = {vb} does not exceed val(v_{e},i) = {v.v}")
            top = seqs[e].gamma_profile[-1]
            if not vb > top:
                raise HypothesisViolation(f"val(b_{si}) = {vb} does not exceed gamma_{e} = {top}")
    if n == 0:
        fac = factor_below_degree(g, ys[0], seqs[0], degs[0], k_elements)
        return MultivarFactorization(fac, (fac.indices[0] - 1 if fac.indices[0] else 0,), 1, (ys[0],), ())

    cfg = seqs[0].cfg
    r = [2 * max(degs[: s + 1]) - 2 for s in range(n + 1)]
    scale = [cfg.one()] + [bs[e - 1] ** r[e - 1] for e in range(1, n + 1)]
    yt = [scale[e] * ys[e] for e in range(n + 1)]
    vt = [seqs[e].map(lambda v, c=scale[e]: c * v) for e in range(n + 1)]
    gammas = [s.gamma_profile for s in vt]
    horizons = tuple(len(gm) - 1 for gm in gammas)
    if any(h < 1 for h in horizons):
        raise WindowTooShort("each window needs at least 3 terms")
    vars = g.vars
    ranges = [range(g.deg(v) + 1) for v in vars]
    derivs = {}
    for ls in itertools.product(*ranges):
        D = hasse_multi(g, dict(zip(vars, ls)))
        if not D.is_zero():
            derivs[ls] = D
    corner = {v: vt[e][horizons[e]] for e, v in enumerate(vars)}
    gy = g.evaluate(dict(zip(vars, yt)))
    if target is not None:
        if not target.agrees(gy):
            raise HypothesisViolation("supplied g(y~) disagrees with the direct evaluation")
        if target.prec is INF or (gy.prec is not INF and target.prec > gy.prec):
            gy = target
    betas = {}
    for ls, D in derivs.items():
        at = gy if not any(ls) else D.evaluate(dict(zip(vars, yt)))
        rv = at.val()
        if rv.exact and rv.value is not INF:
            betas[ls] = rv.value
        else:
            at = D.evaluate(corner)
            if not at.is_exact_zero():
                betas[ls] = at.v
    problem = ThresholdProblem(betas, tuple(tuple(rg) for rg in ranges),
                               tuple(MonotoneSequence(tuple(gm)) for gm in gammas), Mode.DISTINCT)
    cert = certify_grid(problem, horizons=horizons)
    nus = cert.nus

    target_val = _exact_val(gy, "g(y~)")
    grid = list(itertools.product(*(range(nu + 1, h + 1) for nu, h in zip(nus, horizons))))
    chosen = None
    for pt in grid:
        point = {v: vt[e][pt[e]] for e, v in enumerate(vars)}
        gv = g.evaluate(point)
        if gv.is_exact_zero() or gv.v != target_val:
            raise NoSeparatingIndex(f"val(g(v~)) = {gv.v} differs from val(g(y~)) = {target_val} at {pt}")
        if chosen is None:
            vals = []
            keys = sorted(derivs)
            for ls in keys:
                dv = derivs[ls].evaluate(point)
                if dv.is_exact_zero():
                    vals.append(INF)
                    continue
                vals.append(dv.v + sum((gammas[e][pt[e]] * l for e, l in enumerate(ls)), zero(cfg.rank)))
            # keys[0] is the all-zero multi-index
            if _separates(vals):
                chosen = (pt, gv, tuple(vals))
    if chosen is None:
        raise NoSeparatingIndex("no certified grid point separates the Taylor terms")
    pt, d, vals = chosen
    u = divide(gy, d, gy.prec - d.v if gy.prec is not INF else INF)
    ru = u.val()
    if not ru.exact:
        raise PrecisionTooLow("g(y~) not precise enough to fix its value", required=d.v)
    if ru.value != zero(cfg.rank):
        raise NoSeparatingIndex(f"val(u) = {ru.value}")
    unit_vals = tuple(v - vals[0] for v in vals[1:] if v is not INF)
    notes = ("absence of pseudo limits in K is assumed, not decided",)
    fac = UnitFactorization(d, u, pt, gy, vals, unit_vals, notes)
    return MultivarFactorization(fac, nus, len(grid), tuple(yt), tuple(r))
