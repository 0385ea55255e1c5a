import random
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hahnci.hahn import FieldConfig, Series
from hahnci.ordered import ge
from hahnci.poly import (MultiPoly, PolyError, TowerSpec, TowerTooShort, content_normalize,
                         hasse_derivative, hasse_multi, ideal_membership_witness, pseudo_divide,
                         reduce_mod_tower, taylor_expand)

seeds = st.integers(0, 10 ** 6)
cfgs = st.sampled_from([FieldConfig(2, 2), FieldConfig(3, 3), FieldConfig(5, 5), FieldConfig(2, 4, 2)])


@settings(max_examples=50, deadline=None)
@given(cfgs, seeds, st.integers(0, 7))
def test_hasse_matches_binomial_oracle(cfg, seed, n):
    rng = random.Random(seed)
    f = oracles.random_univariate(rng, cfg, rng.randint(0, 8))
    got = oracles.dense(hasse_derivative(f, "X", n), "X") if hasse_derivative(f, "X", n).terms else []
    want = oracles.naive_hasse(oracles.dense(f, "X"), n, cfg.p)
    while want and want[-1].is_exact_zero():
        want.pop()
    assert got == want


@settings(max_examples=40, deadline=None)
@given(cfgs, seeds, st.integers(0, 4), st.integers(0, 4))
def test_hasse_composition(cfg, seed, a, b):
    rng = random.Random(seed)
    f = oracles.random_univariate(rng, cfg, rng.randint(0, 8))
    lhs = hasse_derivative(hasse_derivative(f, "X", b), "X", a)
    rhs = hasse_derivative(f, "X", a + b) * (comb(a + b, a) % cfg.p)
    assert lhs.same_as(rhs)


@settings(max_examples=40, deadline=None)
@given(cfgs, seeds)
def test_taylor_identity(cfg, seed):
    rng = random.Random(seed)
    f = oracles.random_univariate(rng, cfg, rng.randint(1, 6))
    c = oracles.random_series(rng, cfg, 2)
    z = oracles.random_series(rng, cfg, 2)
    lhs = f.evaluate({"X": c + z})
    rhs = cfg.zero()
    for n, d in taylor_expand(f, "X", c):
        rhs = rhs + d * z ** n
    assert lhs == rhs


def test_hasse_multi_is_iterated():
    cfg = FieldConfig(3, 3)
    X, Y = MultiPoly.var(cfg, "X", ("X", "Y")), MultiPoly.var(cfg, "Y", ("X", "Y"))
    f = X ** 4 * Y ** 3 + X * Y + cfg.monomial(ge(1)) * Y ** 2
    got = hasse_multi(f, {"X": 1, "Y": 2})
    assert got.same_as(hasse_derivative(hasse_derivative(f, "X", 1), "Y", 2))


@settings(max_examples=60, deadline=None)
@given(cfgs, seeds)
def test_pseudo_division_identity(cfg, seed):
    rng = random.Random(seed)
    f = oracles.random_univariate(rng, cfg, rng.randint(0, 7))
    h = oracles.random_univariate(rng, cfg, rng.randint(1, 4))
    c, q, r = pseudo_divide(f, h, "X")
    assert (f * c).same_as(q * h + r)
    assert r.deg("X") < h.deg("X")
    lc = h.lc("X").constant_term()
    assert c == lc ** max(f.deg("X") - h.deg("X") + 1, 0)


def test_pseudo_division_rejects_variable_leading_coefficient():
    cfg = FieldConfig(2, 2)
    X, Y = MultiPoly.var(cfg, "X", ("X", "Y")), MultiPoly.var(cfg, "Y", ("X", "Y"))
    with pytest.raises(PolyError):
        pseudo_divide(X ** 3, Y * X ** 2 + 1, "X")


def _tower(rng, cfg, degrees):
    hs = []
    for d in degrees:
        h = oracles.random_univariate(rng, cfg, d, var="Z")
        hs.append(h)
    return TowerSpec(tuple(hs))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([FieldConfig(2, 2), FieldConfig(3, 3)]), seeds)
def test_tower_reduction_identity(cfg, seed):
    rng = random.Random(seed)
    tower = _tower(rng, cfg, [rng.randint(2, 3) for _ in range(3)])
    f = oracles.random_univariate(rng, cfg, rng.randint(0, 10), var="X0")
    c, F = reduce_mod_tower(f, tower)
    degs = tower.degrees()
    for v in F.used_vars()[:-1]:
        assert F.deg(v) < degs[int(v[1:])]
    # c f - F(X0, h_0(X0), ...) lies in the ideal, i.e. has zero residue
    res = ideal_membership_witness(F, tower)
    assert (f * c).same_as(res)


def test_strict_reduction_needs_enough_levels():
    cfg = FieldConfig(2, 2)
    X = MultiPoly.var(cfg, "Z")
    tower = TowerSpec((X ** 2 + X + 1,))
    f = MultiPoly.var(cfg, "X0") ** 6
    with pytest.raises(TowerTooShort) as ei:
        reduce_mod_tower(f, tower, strict=True)
    assert ei.value.required_length == 3


def test_tower_rejects_linear_level():
    cfg = FieldConfig(2, 2)
    with pytest.raises(PolyError):
        TowerSpec((MultiPoly.var(cfg, "Z") + 1,))


@settings(max_examples=40, deadline=None)
@given(cfgs, seeds)
def test_content_normalize(cfg, seed):
    rng = random.Random(seed)
    f = oracles.random_univariate(rng, cfg, rng.randint(0, 5))
    c, g = content_normalize(f, ge(*([4] + [0] * (cfg.rank - 1))) if cfg.rank == 1 else ge(0, 4))
    assert c.v == min(co.v for co in f.terms.values())
    assert any(co == cfg.one() for co in g.terms.values())
    assert all(co.v >= ge(*([0] * cfg.rank)) for co in g.terms.values())


def test_json_roundtrip():
    cfg = FieldConfig(3, 3)
    X, Y = MultiPoly.var(cfg, "X", ("X", "Y")), MultiPoly.var(cfg, "Y", ("X", "Y"))
    f = X ** 2 * Y + cfg.monomial(ge("1/2"), 2) * Y + 1
    assert MultiPoly.from_json(cfg, f.to_json()).same_as(f)
