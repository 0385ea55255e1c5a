"""Declarative scenarios: parsing, planted-instance generation, task execution
and report assembly.

Scenarios and reports are JSON documents written with sorted keys and a fixed
indent, so they diff line by line and are byte-stable.  Exponents are lists
of rational strings (a bare string or number is accepted for rank 1),
coefficients are integers in [0, q).
"""
from __future__ import annotations

import copy
import hashlib
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

from . import __version__
from .ci import (TowerLevel, build_presentation, element_reduction_report, fraction_var,
                 levels_from_planted, transition)
from .gf import is_prime, prime_power
from .hahn import FieldConfig, HahnError, Series
from .ordered import (INF, Mode, MonotoneSequence, OrderedValuesError, ThresholdProblem, ge,
                      solve_threshold_1d, solve_threshold_nd, value_from_json)
from .planted import artin_schreier, geometric, ladder, planted_tower
from .poly import MultiPoly, TowerSpec, pseudo_divide, reduce_mod_tower, taylor_expand, tower_var
from .pseudo import (PseudoSequence, check_pseudo_convergent, classify, factor_below_degree,
                     image_sequence, is_pseudo_limit, localize_representation, minimal_degree_witness,
                     scale_and_factor_multivar)

SCENARIO_SCHEMA = "hahnci.scenario/1"
REPORT_SCHEMA = "hahnci.report/1"
TIMING_KEYS = ("elapsed_ms", "total_ms")


class ScenarioError(ValueError):
    """Invalid scenario; ``where`` names the offending field."""

    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


# ---------------------------------------------------------------------------
# literals
# ---------------------------------------------------------------------------

def parse_exp(cfg: FieldConfig, obj, where="exponent"):
    try:
        if isinstance(obj, (list, tuple)):
            g = ge(*obj)
        else:
            g = ge(*([obj] + [0] * (cfg.rank - 1)))
        return cfg.exp(g)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise ScenarioError(where, f"bad exponent {obj!r}: {e}") from None


def parse_series(cfg: FieldConfig, obj, where="series") -> Series:
    """{"terms": [[exp, c], ...], "prec": exp|"inf"}, a bare term list, or an int."""
    if isinstance(obj, int):
        return cfg.const(obj)
    if isinstance(obj, list):
        obj = {"terms": obj}
    if not isinstance(obj, dict) or "terms" not in obj:
        raise ScenarioError(where, "expected a series literal")
    terms = {}
    for k, pair in enumerate(obj["terms"]):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ScenarioError(f"{where}.terms[{k}]", "expected [exponent, coefficient]")
        e = parse_exp(cfg, pair[0], f"{where}.terms[{k}]")
        c = pair[1]
        if not isinstance(c, int) or not 0 <= c < cfg.q:
            raise ScenarioError(f"{where}.terms[{k}]", f"coefficient {c!r} not in [0, {cfg.q})")
        if e in terms:
            raise ScenarioError(f"{where}.terms[{k}]", f"repeated exponent {e}")
        terms[e] = c
    prec = obj.get("prec", "inf")
    prec = INF if prec == "inf" else parse_exp(cfg, prec, f"{where}.prec")
    return Series(cfg, terms, prec)


def parse_poly(cfg: FieldConfig, obj, where="poly") -> MultiPoly:
    """{"var": "X", "coeffs": [low .. high]} or {"vars": [...], "terms": [[mono, series], ...]}."""
    if not isinstance(obj, dict):
        raise ScenarioError(where, "expected a polynomial literal")
    if "coeffs" in obj:
        cs = [parse_series(cfg, c, f"{where}.coeffs[{k}]") for k, c in enumerate(obj["coeffs"])]
        return MultiPoly.univariate(cfg, cs, obj.get("var", "X"))
    if "vars" in obj and "terms" in obj:
        terms = {}
        for k, (mono, c) in enumerate(obj["terms"]):
            if len(mono) != len(obj["vars"]):
                raise ScenarioError(f"{where}.terms[{k}]", "monomial length differs from vars")
            s = parse_series(cfg, c, f"{where}.terms[{k}]")
            terms[tuple(mono)] = terms[tuple(mono)] + s if tuple(mono) in terms else s
        return MultiPoly(cfg, obj["vars"], terms)
    raise ScenarioError(where, "polynomial needs coeffs or vars+terms")


# ---------------------------------------------------------------------------
# planted generation
# ---------------------------------------------------------------------------

def generate_planted(params: dict, seed: int) -> dict:
    """An explicit sequence entry with known classification.

    params: field (p, q, rank), window, and either ``"ladder": "artin-schreier"``
    with ``degree`` (a power of p) or ``"ladder": "integer"`` for a
    fundamental instance.  The seed picks coefficients, shift and scale.
    """
    try:
        cfg = FieldConfig(params["p"], params.get("q", params["p"]), params.get("rank", 1))
    except KeyError as e:
        raise ScenarioError("planted", f"missing {e}") from None
    except ValueError as e:
        raise ScenarioError("planted.field", str(e)) from None
    window = params.get("window", 8)
    if window < 3:
        raise ScenarioError("planted.window", f"window {window} too short, need >= 3")
    rng = random.Random(seed)
    kind = params.get("ladder", "artin-schreier")
    rest = [0] * (cfg.rank - 1)
    if kind == "artin-schreier":
        Q = params.get("degree", cfg.p)
        if Q < 2:
            raise ScenarioError("planted.degree", "witness degree must be >= 2")
        a = rng.randrange(1, cfg.q)
        m = rng.choice([1, 2])
        shift = None
        if rng.random() < 0.5:
            shift = Series(cfg, {ge(0, *rest): rng.randrange(1, cfg.q)})
        try:
            inst = artin_schreier(cfg, Q, window, m=m, shift=shift, a=a)
        except ValueError as e:
            raise ScenarioError("planted", str(e)) from None
        cls = "algebraic"
        degree = Q
    elif kind == "integer":
        coeffs = [rng.randrange(1, cfg.q) for _ in range(window + 8)]
        inst = ladder(cfg, [ge(j, *rest) for j in range(window + 8)], coeffs, window,
                      limit_prec=ge(window + 8, *rest), label="integer-ladder")
        cls = "fundamental"
        degree = None
    else:
        raise ScenarioError("planted.ladder", f"unknown ladder {kind!r}")
    out = {
        "kind": "explicit",
        "window": [v.to_json() for v in inst.seq.window],
        "limit": inst.limit.to_json(),
        "classification": cls,
        "profile": [g.to_json() for g in inst.seq.gamma_profile],
    }
    if inst.witness is not None and degree is not None:
        out["witness"] = inst.witness.to_json()
        out["degree"] = degree
    return out


# ---------------------------------------------------------------------------
# scenario model
# ---------------------------------------------------------------------------

@dataclass
class SeqEntry:
    seq: PseudoSequence
    limit: Optional[Series] = None
    witness: Optional[MultiPoly] = None
    degree: Optional[int] = None


@dataclass
class Scenario:
    raw: dict
    name: str
    cfg: FieldConfig
    seed: int
    precision: Any
    horizon: Optional[int]
    bounds: dict
    sequences: Dict[str, SeqEntry]
    towers: Dict[str, list]
    polys: Dict[str, MultiPoly]
    series: Dict[str, Series]
    tasks: List[dict]

    def digest(self) -> str:
        return hashlib.sha256(canonical(self.raw).encode()).hexdigest()


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _cap(x: Optional[Series], cap):
    if x is None or cap is None:
        return x
    return x.truncate(cap) if x.prec is INF or cap < x.prec else x


def _field(obj):
    f = obj.get("field")
    if not isinstance(f, dict):
        raise ScenarioError("field", "missing field config")
    p, q, rank = f.get("p"), f.get("q", f.get("p")), f.get("rank", 1)
    if not isinstance(p, int) or not is_prime(p):
        raise ScenarioError("field.p", f"{p!r} is not a prime")
    pk = prime_power(q) if isinstance(q, int) and q > 1 else None
    if pk is None or pk[0] != p:
        raise ScenarioError("field.q", f"{q!r} is not a power of p={p}")
    if not isinstance(rank, int) or rank < 1:
        raise ScenarioError("field.rank", f"{rank!r} must be a positive integer")
    return FieldConfig(p, q, rank)


def _build_sequence(cfg, name, spec, seed, cap) -> SeqEntry:
    where = f"sequences.{name}"
    kind = spec.get("kind")
    try:
        if kind == "explicit":
            win = [parse_series(cfg, v, f"{where}.window[{k}]") for k, v in enumerate(spec.get("window", []))]
            if len(win) < 3:
                raise ScenarioError(f"{where}.window", "need at least 3 terms")
            lim = parse_series(cfg, spec["limit"], f"{where}.limit") if "limit" in spec else None
            wit = parse_poly(cfg, spec["witness"], f"{where}.witness") if "witness" in spec else None
            return SeqEntry(PseudoSequence(tuple(win), label=name), _cap(lim, cap), wit, spec.get("degree"))
        if kind == "geometric":
            inst = geometric(cfg, spec.get("window", 8), parse_exp(cfg, spec.get("step", 1), f"{where}.step"))
        elif kind == "artin-schreier":
            shift = parse_series(cfg, spec["shift"], f"{where}.shift") if "shift" in spec else None
            inst = artin_schreier(cfg, spec.get("Q"), spec.get("window", 8),
                                  m=parse_exp(cfg, spec.get("m", 1), f"{where}.m"),
                                  g=parse_exp(cfg, spec["g"], f"{where}.g") if "g" in spec else None,
                                  shift=shift, a=spec.get("a", 1))
        elif kind == "ladder":
            exps = [parse_exp(cfg, e, f"{where}.exponents") for e in spec.get("exponents", [])]
            lp = parse_exp(cfg, spec["limit_prec"], f"{where}.limit_prec") if "limit_prec" in spec else None
            inst = ladder(cfg, exps, spec.get("coeffs"), spec.get("window"), lp, label=name)
        elif kind == "planted":
            params = dict(spec.get("params", {}))
            params.update({"p": cfg.p, "q": cfg.q, "rank": cfg.rank})
            frag = generate_planted(params, spec.get("seed", seed))
            return _build_sequence(cfg, name, frag, seed, cap)
        else:
            raise ScenarioError(f"{where}.kind", f"unknown sequence kind {kind!r}")
    except (ValueError, KeyError) as e:
        if isinstance(e, ScenarioError):
            raise
        raise ScenarioError(where, str(e)) from None
    if len(inst.seq) < 3:
        raise ScenarioError(f"{where}.window", "need at least 3 terms")
    return SeqEntry(inst.seq, _cap(inst.limit, cap), inst.witness, inst.degree)


def _build_tower(cfg, name, spec, sequences, polys, cap):
    where = f"towers.{name}"
    kind = spec.get("kind")
    if kind == "planted":
        shifts = spec.get("shifts")
        if shifts is not None:
            shifts = [None if s is None else parse_series(cfg, s, f"{where}.shifts") for s in shifts]
        betas = spec.get("betas")
        if betas is not None:
            betas = [parse_exp(cfg, b, f"{where}.betas") for b in betas]
        try:
            pt = planted_tower(cfg, spec.get("levels", 2), spec.get("Q"), spec.get("window", 8), betas, shifts)
        except ValueError as e:
            raise ScenarioError(where, str(e)) from None
        levels = levels_from_planted(pt)
        return [TowerLevel(_cap(lv.x, cap), lv.seq, lv.h) for lv in levels]
    if kind == "explicit":
        out = []
        for k, lv in enumerate(spec.get("levels", [])):
            w = f"{where}.levels[{k}]"
            ref = lv.get("seq")
            if ref not in sequences:
                raise ScenarioError(f"{w}.seq", f"unknown sequence {ref!r}")
            ent = sequences[ref]
            x = parse_series(cfg, lv["limit"], f"{w}.limit") if "limit" in lv else ent.limit
            if x is None:
                raise ScenarioError(f"{w}.limit", "no limit given")
            h = None
            if "h" in lv:
                h = polys[lv["h"]] if isinstance(lv["h"], str) else parse_poly(cfg, lv["h"], f"{w}.h")
            out.append(TowerLevel(_cap(x, cap), ent.seq, h))
        if not out:
            raise ScenarioError(f"{where}.levels", "empty tower")
        return out
    raise ScenarioError(f"{where}.kind", f"unknown tower kind {kind!r}")


def load_scenario(obj: dict, seed: Optional[int] = None, precision=None, horizon: Optional[int] = None) -> Scenario:
    """Validate and instantiate a scenario document; overrides win."""
    if not isinstance(obj, dict):
        raise ScenarioError("$", "scenario must be an object")
    if obj.get("schema") != SCENARIO_SCHEMA:
        raise ScenarioError("schema", f"expected {SCENARIO_SCHEMA!r}, got {obj.get('schema')!r}")
    raw = copy.deepcopy(obj)
    if seed is not None:
        raw["seed"] = seed
    if precision is not None:
        raw["precision"] = precision
    if horizon is not None:
        raw["horizon"] = horizon
    cfg = _field(raw)
    s = raw.get("seed", 0)
    if not isinstance(s, int):
        raise ScenarioError("seed", "must be an integer")
    cap = raw.get("precision")
    cap = None if cap is None else parse_exp(cfg, cap, "precision")
    hz = raw.get("horizon")
    if hz is not None and (not isinstance(hz, int) or hz < 0):
        raise ScenarioError("horizon", "must be a nonnegative integer")
    polys = {k: parse_poly(cfg, v, f"polys.{k}") for k, v in raw.get("polys", {}).items()}
    series = {k: parse_series(cfg, v, f"series.{k}") for k, v in raw.get("series", {}).items()}
    seqs = {k: _build_sequence(cfg, k, v, s, cap) for k, v in raw.get("sequences", {}).items()}
    towers = {k: _build_tower(cfg, k, v, seqs, polys, cap) for k, v in raw.get("towers", {}).items()}
    tasks = raw.get("tasks", [])
    if not isinstance(tasks, list):
        raise ScenarioError("tasks", "must be a list")
    seen = set()
    for k, t in enumerate(tasks):
        if not isinstance(t, dict) or "op" not in t:
            raise ScenarioError(f"tasks[{k}]", "task needs an op")
        if t["op"] not in OPS:
            raise ScenarioError(f"tasks[{k}].op", f"unknown op {t['op']!r}")
        tid = t.get("id", f"t{k}")
        if tid in seen:
            raise ScenarioError(f"tasks[{k}].id", f"duplicate id {tid!r}")
        seen.add(tid)
        for key, table in (("seq", seqs), ("tower", towers)):
            if key in t and t[key] not in table:
                raise ScenarioError(f"tasks[{k}].{key}", f"unknown reference {t[key]!r}")
    bounds = raw.get("bounds", {})
    return Scenario(raw, raw.get("name", ""), cfg, s, cap, hz, bounds, seqs, towers, polys, series, tasks)


# ---------------------------------------------------------------------------
# task ops
# ---------------------------------------------------------------------------

def _poly(sc: Scenario, t, key):
    ref = t.get(key)
    if isinstance(ref, str):
        if ref == "witness":
            ent = sc.sequences[t["seq"]]
            if ent.witness is None:
                raise ScenarioError(key, "sequence has no planted witness")
            return ent.witness
        if ref not in sc.polys:
            raise ScenarioError(key, f"unknown polynomial {ref!r}")
        return sc.polys[ref]
    if ref is None:
        raise ScenarioError(key, "missing polynomial")
    return parse_poly(sc.cfg, ref, key)


def _series(sc: Scenario, t, key, default=None):
    ref = t.get(key)
    if ref is None:
        return default
    if isinstance(ref, str):
        if ref == "limit":
            return sc.sequences[t["seq"]].limit
        if ref not in sc.series:
            raise ScenarioError(key, f"unknown series {ref!r}")
        return sc.series[ref]
    return parse_series(sc.cfg, ref, key)


def _seq(sc, t):
    return sc.sequences[t["seq"]]


def _profile(seq):
    return [g.to_json() for g in seq.gamma_profile]


def op_threshold(sc: Scenario, t):
    mult = t["multipliers"]
    seqs = []
    for k, s in enumerate(t["sequences"]):
        if isinstance(s, dict):
            seqs.append(MonotoneSequence.affine(parse_exp(sc.cfg, s["start"]), parse_exp(sc.cfg, s["step"]),
                                                s.get("length", 0)))
        else:
            seqs.append(MonotoneSequence(tuple(parse_exp(sc.cfg, e) for e in s)))
    betas = {tuple(idx): parse_exp(sc.cfg, b) for idx, b in t["betas"]}
    mode = Mode(t.get("mode", "distinct"))
    bounds = tuple(parse_exp(sc.cfg, b) for b in t.get("bounds", []))
    prob = ThresholdProblem(betas, mult, tuple(seqs), mode, bounds)
    hz = t.get("horizon", sc.horizon)
    if prob.n_axes == 1 and mode is Mode.DISTINCT:
        cert = solve_threshold_1d(prob, hz)
    else:
        cert = solve_threshold_nd(prob, None if hz is None else (hz,) * prob.n_axes)
    return cert.to_json()


def op_taylor(sc, t):
    f = _poly(sc, t, "poly")
    var = t.get("var", f.vars[0])
    center = _series(sc, t, "center")
    terms = taylor_expand(f, var, center)
    Z = "Z"
    lhs = f.substitute(var, MultiPoly.const(sc.cfg, center, (Z,)) + MultiPoly.var(sc.cfg, Z))
    rhs = MultiPoly.zero(sc.cfg, (Z,))
    for n, c in terms:
        rhs = rhs + MultiPoly.var(sc.cfg, Z) ** n * c
    return {"terms": [[n, c.to_json()] for n, c in terms], "identity": lhs.agrees(rhs)}


def op_pseudo_divide(sc, t):
    f, h = _poly(sc, t, "f"), _poly(sc, t, "h")
    c, g1, g0 = pseudo_divide(f, h, t.get("var"))
    ok = (f * c).agrees(g1 * h + g0)
    return {"c": c.to_json(), "g1": g1.to_json(), "g0": g0.to_json(), "identity": ok}


def _tower_spec(sc, t):
    if "tower" in t:
        hs = [lv.h for lv in sc.towers[t["tower"]] if lv.h is not None]
    else:
        hs = [_poly(sc, {"h": h}, "h") for h in t["hs"]]
    return TowerSpec(tuple(hs))


def op_reduce_mod_tower(sc, t):
    from .poly import ideal_membership_witness
    tower = _tower_spec(sc, t)
    f = _poly(sc, t, "f")
    src = f.used_vars()
    if src and src[0] != tower_var(0):
        f = f.rename({src[0]: tower_var(0)})
    c, F = reduce_mod_tower(f, tower, strict=t.get("strict", False))
    back = ideal_membership_witness(F, tower)
    return {"c": c.to_json(), "F": F.to_json(), "back_substitution": back.agrees(f.with_vars((tower_var(0),)) * c)}


def op_check_pseudo_convergent(sc, t):
    return check_pseudo_convergent(_seq(sc, t).seq).to_json()


def op_is_pseudo_limit(sc, t):
    ent = _seq(sc, t)
    x = _series(sc, t, "x", ent.limit)
    if x is None:
        raise ScenarioError("x", "no candidate limit")
    return {"pseudo_limit": is_pseudo_limit(x, ent.seq), "profile": _profile(ent.seq)}


def _bounds(sc, t):
    D = t.get("D", sc.bounds.get("D", 2))
    H = t.get("H", sc.bounds.get("H", 2))
    exps = t.get("exponents")
    if exps is not None:
        exps = [parse_exp(sc.cfg, e) for e in exps]
    return D, H, exps


def op_classify(sc, t):
    D, H, exps = _bounds(sc, t)
    gs = t.get("gamma_star")
    gs = None if gs is None else parse_exp(sc.cfg, gs)
    return classify(_seq(sc, t).seq, D, H, exps, gs, t.get("min_tail")).to_json()


def op_minimal_degree_witness(sc, t):
    D, H, exps = _bounds(sc, t)
    f = minimal_degree_witness(_seq(sc, t).seq, D, H, exps, t.get("min_tail"))
    return {"witness": f.to_json(), "degree": f.deg()}


def op_image_sequence(sc, t):
    ent = _seq(sc, t)
    r = image_sequence(_poly(sc, t, "poly"), ent.seq, ent.limit if t.get("with_limit", True) else None)
    return r.to_json()


def _s_min(sc, t):
    s = t.get("s_min")
    if s is None:
        s = _seq(sc, t).degree
    if s is None:
        raise ScenarioError("s_min", "no witness degree known for the sequence")
    return s


def op_factor_below_degree(sc, t):
    ent = _seq(sc, t)
    ks = [parse_series(sc.cfg, k) for k in t.get("k_elements", [])]
    fac = factor_below_degree(_poly(sc, t, "poly"), _series(sc, t, "x", ent.limit), ent.seq, _s_min(sc, t), ks)
    out = fac.to_json()
    out["check"] = fac.check()
    return out


def op_localize_representation(sc, t):
    ent = _seq(sc, t)
    r = localize_representation(_poly(sc, t, "poly"), _series(sc, t, "t"), _series(sc, t, "x", ent.limit),
                                ent.seq, _s_min(sc, t))
    return r.to_json()


def op_scale_and_factor_multivar(sc, t):
    levels = sc.towers[t["tower"]]
    g = _poly(sc, t, "poly")
    n = len(g.vars)
    bs = [parse_series(sc.cfg, b) for b in t.get("bs", [])]
    r = scale_and_factor_multivar(g, [lv.x for lv in levels[:n]], [lv.seq for lv in levels[:n]],
                                  TowerSpec(tuple(lv.h for lv in levels[:n])), bs)
    out = r.to_json()
    out["check"] = r.factorization.check()
    return out


def op_fraction_var(sc, t):
    lv = sc.towers[t["tower"]][t.get("level", 0)]
    x = fraction_var(lv, t["j"])
    return {"x": x.to_json(), "val": x.val().value.to_json()}


def op_transition(sc, t):
    lv = sc.towers[t["tower"]][t.get("level", 0)]
    tm = transition(lv, t["j"], t["j2"])
    out = tm.to_json()
    out.update({"val_alpha": tm.alpha.v.to_json(), "val_beta": tm.beta.v.to_json()})
    return out


def op_build_presentation(sc, t):
    levels = sc.towers[t["tower"]]
    idx = t["indices"]
    p = build_presentation(levels[: len(idx)], idx, t.get("targets"))
    out = p.to_json()
    out.update({"triangular": p.is_triangular(), "witness_vanishes": p.witness_vanishes(),
                "morphisms_ok": all(m.ok for m in p.morphisms)})
    return out


def op_element_reduction_report(sc, t):
    levels = sc.towers[t["tower"]]
    bs = [parse_series(sc.cfg, b) for b in t.get("bs", [])]
    r = element_reduction_report(_poly(sc, t, "poly"), levels, bs, t.get("indices"))
    out = r.to_json()
    out["ok"] = r.ok
    return out


OPS: Dict[str, Callable] = {
    "threshold": op_threshold,
    "taylor": op_taylor,
    "pseudo_divide": op_pseudo_divide,
    "reduce_mod_tower": op_reduce_mod_tower,
    "check_pseudo_convergent": op_check_pseudo_convergent,
    "is_pseudo_limit": op_is_pseudo_limit,
    "classify": op_classify,
    "minimal_degree_witness": op_minimal_degree_witness,
    "image_sequence": op_image_sequence,
    "factor_below_degree": op_factor_below_degree,
    "localize_representation": op_localize_representation,
    "scale_and_factor_multivar": op_scale_and_factor_multivar,
    "fraction_var": op_fraction_var,
    "transition": op_transition,
    "build_presentation": op_build_presentation,
    "element_reduction_report": op_element_reduction_report,
}


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

def run_scenario(sc: Scenario, only: Optional[List[str]] = None) -> dict:
    """Execute tasks in order; errors are recorded per task.

    A task may declare ``"expect_error": "<ErrorName>"``; it then succeeds
    exactly when that error (or a subclass) is raised.
    """
    t0 = time.perf_counter()
    results = []
    for k, t in enumerate(sc.tasks):
        tid = t.get("id", f"t{k}")
        if only and tid not in only and t["op"] not in only:
            continue
        start = time.perf_counter()
        entry = {"id": tid, "op": t["op"]}
        expect = t.get("expect_error")
        try:
            res = OPS[t["op"]](sc, t)
            if expect:
                entry.update(status="failed", result=res,
                             error={"type": "MissingExpectedError", "message": f"expected {expect}"})
            else:
                entry.update(status="ok", result=res)
        except (HahnError, OrderedValuesError, ScenarioError, ValueError, KeyError, TypeError) as e:
            names = {c.__name__ for c in type(e).__mro__}
            err = {"type": type(e).__name__, "message": str(e)}
            req = getattr(e, "required", None) or getattr(e, "required_length", None)
            if req is not None:
                err["required"] = req if isinstance(req, int) else req.to_json()
            if expect and expect in names:
                entry.update(status="ok", result={"expected_error": err})
            else:
                entry.update(status="failed", error=err)
        entry["elapsed_ms"] = round((time.perf_counter() - start) * 1000, 3)
        results.append(entry)
    n_ok = sum(1 for r in results if r["status"] == "ok")
    return {
        "schema": REPORT_SCHEMA,
        "tool": {"name": "hahnci", "version": __version__},
        "scenario": sc.name,
        "input_digest": sc.digest(),
        "seed": sc.seed,
        "inputs": sc.raw,
        "tasks": results,
        "summary": {"tasks": len(results), "ok": n_ok, "failed": len(results) - n_ok},
        "timing": {"total_ms": round((time.perf_counter() - t0) * 1000, 3)},
    }


def mask_timing(report: dict) -> dict:
    out = copy.deepcopy(report)

    def walk(o):
        if isinstance(o, dict):
            for k in list(o):
                if k in TIMING_KEYS:
                    o[k] = None
                else:
                    walk(o[k])
        elif isinstance(o, list):
            for x in o:
                walk(x)

    walk(out)
    return out


def render_structured(report: dict) -> str:
    return canonical(report)


def render_text(report: dict) -> str:
    lines = [f"scenario {report['scenario']}", f"schema {report['schema']}",
             f"tool {report['tool']['name']} {report['tool']['version']}",
             f"digest {report['input_digest']}", f"seed {report['seed']}"]
    for r in report["tasks"]:
        lines.append(f"task {r['id']} {r['op']} {r['status']}")
        if "error" in r:
            lines.append(f"  error {r['error']['type']}: {r['error']['message']}")
        for k, v in sorted((r.get("result") or {}).items()):
            lines.append(f"  {k} {json.dumps(v, sort_keys=True)}")
    s = report["summary"]
    lines.append(f"summary {s['ok']}/{s['tasks']} ok")
    return "\n".join(lines) + "\n"
