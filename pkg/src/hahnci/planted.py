"""Planted instances with known ground truth.

Artin-Schreier roots.  With Q a power of p, y = sum_{e >= 1} t^{-g/Q^e}
satisfies y^Q - y = t^{-g}.  For x = c + a t^m y the partial sums
v_i (i + 1 terms) form a pseudo-convergent sequence with profile
gamma_i = m - g/Q^{i+2}, bounded by m, and

    h(X) = (X - c)^Q - a^{Q-1} t^{m(Q-1)} (X - c) - a^Q t^{mQ - g}

is a degree-Q witness: X -> X^Q - a^{Q-1} t^{m(Q-1)} X is additive, so
val h(v_i) = Q gamma_i grows.  The limit x is stored truncated, with its
precision at the first omitted exponent.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .hahn import FieldConfig, Series
from .ordered import GroupElement, ge, zero
from .poly import MultiPoly, TowerSpec
from .pseudo import PseudoSequence


@dataclass(frozen=True)
class PlantedInstance:
    label: str
    seq: PseudoSequence
    limit: Series
    witness: Optional[MultiPoly]
    degree: Optional[int]
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PlantedTower:
    limits: tuple
    seqs: tuple
    tower: TowerSpec
    params: dict = field(default_factory=dict)


def _is_power_of(Q, p):
    while Q % p == 0 and Q > 1:
        Q //= p
    return Q == 1


def _as_exp(cfg, e):
    if isinstance(e, GroupElement):
        return cfg.exp(e)
    if isinstance(e, (int, Fraction, str)):
        return ge(*([e] + [0] * (cfg.rank - 1)))
    return cfg.exp(ge(*e))


def _shrink(g: GroupElement, Q: int, e: int) -> GroupElement:
    d = Fraction(1, Q ** e)
    return GroupElement(tuple(c * d for c in g))


def artin_schreier(cfg: FieldConfig, Q: Optional[int] = None, window: int = 8, m=1, g=None,
                   shift: Optional[Series] = None, a: int = 1, extra: int = 8) -> PlantedInstance:
    """Artin-Schreier planted instance; see the module docstring.

    ``m`` and ``g`` are group elements (scalars mean the first coordinate),
    ``g`` defaults to m.  Requires 0 < g <= m Q so that the witness has
    coefficients in the valuation ring.
    """
    Q = cfg.p if Q is None else Q
    if Q < 2 or not _is_power_of(Q, cfg.p):
        raise ValueError(f"Q={Q} is not a power of p={cfg.p}")
    m = _as_exp(cfg, m)
    g = m if g is None else _as_exp(cfg, g)
    z = zero(cfg.rank)
    if not g > z or g > m * Q:
        raise ValueError("need 0 < g <= m Q")
    if not m - _shrink(g, Q, 1) >= z:
        raise ValueError("limit would leave the valuation ring")
    gf = cfg.gf
    if a % cfg.q == 0:
        raise ValueError("a must be a nonzero field element")
    c = cfg.zero() if shift is None else shift
    exps = [m - _shrink(g, Q, e) for e in range(1, window + extra + 2)]

    def partial(k):
        return c + Series(cfg, {e: a for e in exps[:k]})

    seq = PseudoSequence(tuple(partial(i + 1) for i in range(window)),
                         rule=lambda i: partial(i + 1), label=f"AS(p={cfg.p},Q={Q})")
    limit = Series(cfg, dict(partial(window + extra).terms), prec=exps[window + extra])
    X = MultiPoly.var(cfg, "X")
    Xc = X - c
    aq1 = gf.pow(a, Q - 1)
    aq = gf.pow(a, Q)
    h = Xc ** Q - Xc * Series(cfg, {m * (Q - 1): aq1}) - Series(cfg, {m * Q - g: aq})
    params = {"Q": Q, "m": m, "g": g, "a": a, "window": window}
    return PlantedInstance(seq.label, seq, limit, h, Q, params)


def ladder(cfg: FieldConfig, exponents, coeffs=None, window: Optional[int] = None,
           limit_prec=None, label="ladder") -> PlantedInstance:
    """v_i = sum_{j <= i} c_j t^{e_j} for a strictly increasing ladder e_j.

    The limit is the full sum over ``exponents`` with precision
    ``limit_prec``; no witness is planted.
    """
    exps = [_as_exp(cfg, e) for e in exponents]
    if any(not b > a for a, b in zip(exps, exps[1:])):
        raise ValueError("ladder exponents must increase strictly")
    coeffs = [1] * len(exps) if coeffs is None else list(coeffs)
    window = len(exps) - 1 if window is None else window
    if window > len(exps):
        raise ValueError("window longer than the ladder")
    terms = list(zip(exps, coeffs))
    seq = PseudoSequence(tuple(Series(cfg, dict(terms[: i + 1])) for i in range(window)), label=label)
    from .ordered import INF
    limit = Series(cfg, dict(terms), prec=INF if limit_prec is None else _as_exp(cfg, limit_prec))
    return PlantedInstance(label, seq, limit, None, None, {"window": window})


def geometric(cfg: FieldConfig, window: int = 8, step=1) -> PlantedInstance:
    """Partial sums of 1/(1 - t^step); the limit lies in K, witness (1 - t^step) X - 1."""
    st = _as_exp(cfg, step)
    extra = window + 8
    exps = [st * j for j in range(extra + 1)]
    inst = ladder(cfg, exps[:-1], window=window, limit_prec=exps[-1], label="geometric")
    X = MultiPoly.var(cfg, "X")
    w = X * (cfg.one() - Series(cfg, {st: 1})) - 1
    return PlantedInstance("geometric", inst.seq, inst.limit, w, 1, {"window": window, "step": st})


def planted_tower(cfg: FieldConfig, levels: int = 2, Q: Optional[int] = None, window: int = 8,
                  betas=None, shifts=None, extra: int = 8, m0=1) -> PlantedTower:
    """A tower y_{e+1} = h_e(y_e) over a level-0 Artin-Schreier root.

    h_e = t^{beta_e} X^Q + c_e for e < levels - 1, so each level is again an
    Artin-Schreier sequence (m' = beta + Q m, g' = Q g) obtained as the image
    h_e(a_e), and its limit has no pseudo limit in K because K is perfect.
    The top level carries its own Artin-Schreier witness.  Precision grows by
    a factor Q per level, so every profile stays visible.  The level-0
    exponents accumulate at ``m0``, which bounds how far the truncated limits
    can resolve values of polynomials in them.
    """
    Q = cfg.p if Q is None else Q
    betas = [0] * (levels - 1) if betas is None else list(betas)
    shifts = [None] * (levels - 1) if shifts is None else list(shifts)
    if len(betas) < levels - 1 or len(shifts) < levels - 1:
        raise ValueError("need one beta and one shift per tower map")
    inst = artin_schreier(cfg, Q, window=window, m=m0, extra=extra)
    m, g = inst.params["m"], inst.params["g"]
    limits, seqs, hs = [inst.limit], [inst.seq], []
    X = MultiPoly.var(cfg, "X")
    for e in range(levels - 1):
        b = _as_exp(cfg, betas[e])
        c = cfg.zero() if shifts[e] is None else shifts[e]
        h = X ** Q * Series(cfg, {b: 1}) + c
        hs.append(h)
        limits.append(h.evaluate({"X": limits[-1]}))
        seqs.append(PseudoSequence(tuple(h.evaluate({"X": v}) for v in seqs[-1].window),
                                   label=f"level{e + 1}"))
        m, g = b + m * Q, g * Q
        top_shift = c
    if levels > 1:
        top = artin_schreier(cfg, Q, window=window, m=m, g=g, shift=top_shift, extra=0).witness
    else:
        top = inst.witness
    hs.append(top)
    return PlantedTower(tuple(limits), tuple(seqs), TowerSpec(tuple(hs)),
                        {"Q": Q, "levels": levels, "window": window, "m0": m0})


def two_level_tower(cfg: FieldConfig, Q: Optional[int] = None, window: int = 8, beta=0,
                    shift: Optional[Series] = None) -> PlantedTower:
    return planted_tower(cfg, 2, Q, window, [beta], [shift])
