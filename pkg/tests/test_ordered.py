import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hahnci.ordered import (INF, HorizonExhausted, Mode, MonotoneSequence, PreconditionError,
                            RankMismatch, ThresholdProblem, certify_grid, compare, ge, shifts_for,
                            solve_threshold_1d, solve_threshold_nd, value_from_json, zero)

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def elements(rank):
    return st.tuples(*([fracs] * rank)).map(ge)


@given(elements(3), elements(3), elements(3))
def test_group_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a + zero(3) == a
    assert a + (-a) == zero(3)
    # translation invariance of the order
    assert (a < b) == (a + c < b + c)


@given(elements(2), elements(2))
def test_order_is_lexicographic(a, b):
    assert (a < b) == (tuple(a) < tuple(b))
    assert compare(a, b) == (tuple(a) > tuple(b)) - (tuple(a) < tuple(b))


@given(elements(2))
def test_infinity_absorbs(a):
    assert a < INF and not INF < a
    assert a + INF is INF and INF + a is INF
    assert compare(INF, a) == 1 and compare(INF, INF) == 0


def test_rank_mismatch():
    with pytest.raises(RankMismatch):
        ge(1, 2) < ge(1)
    with pytest.raises(RankMismatch):
        value_from_json(["1"], rank=2)


def test_json_roundtrip():
    g = ge(1, "1/3")
    assert value_from_json(g.to_json()) == g
    assert value_from_json(INF.to_json()) is INF


def test_monotone_sequence_rejects_non_increasing():
    with pytest.raises(PreconditionError):
        MonotoneSequence((ge(1), ge(1)))


def test_affine_rule_extends_window():
    s = MonotoneSequence.affine(ge(0), ge("1/2"), 3)
    assert s.term(10) == ge(5)
    assert len(s.terms(7)) == 8


def test_distinct_mode_needs_different_multipliers():
    seq = MonotoneSequence.affine(ge(0), ge(1), 4)
    with pytest.raises(PreconditionError):
        ThresholdProblem({(0,): ge(0), (1,): ge(1)}, ((2, 2),), (seq,))


def test_1d_known_collision():
    # beta_0 + 0 g = 3 and beta_1 + 1 g with g = s meets 3 at s = 3
    seq = MonotoneSequence.affine(ge(0), ge(1), 10)
    prob = ThresholdProblem({(0,): ge(3), (1,): ge(0)}, ((0, 1),), (seq,))
    cert = solve_threshold_1d(prob, horizon=9)
    assert cert.nus == (3,)
    # from s = 4 on the constant form is the smallest
    assert cert.dominant == 0 and cert.dominant_from == 4


def test_corner_collision_exhausts_horizon():
    seq = MonotoneSequence.affine(ge(0), ge(1), 10)
    prob = ThresholdProblem({(0,): ge(9), (1,): ge(0)}, ((0, 1),), (seq,))
    with pytest.raises(HorizonExhausted):
        solve_threshold_1d(prob, horizon=9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_1d_matches_brute_force(seed):
    rng = random.Random(seed)
    prob = oracles.random_threshold_problem(rng, 1, 12)
    gammas = [[tuple(g) for g in prob.sequences[0].terms(11)]]
    expect = oracles.brute_nu_1d(prob.betas, prob.multipliers, gammas)
    try:
        cert = solve_threshold_1d(prob, horizon=11)
    except HorizonExhausted:
        assert expect >= 11
        return
    assert cert.nus == (expect,)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3), st.sampled_from([Mode.DISTINCT, Mode.NONZERO]))
def test_nd_certificate_box_is_clean(seed, axes, mode):
    rng = random.Random(seed)
    prob = oracles.random_threshold_problem(rng, axes, 8, mode)
    try:
        cert = solve_threshold_nd(prob, horizons=(7,) * axes)
    except HorizonExhausted:
        return
    assert oracles.verify_box(prob, cert)
    assert all(0 <= nu < h for nu, h in zip(cert.nus, cert.verified_horizon))


def test_shifts_follow_running_maximum():
    seqs = tuple(MonotoneSequence.affine(ge(0), ge(1), 4) for _ in range(3))
    prob = ThresholdProblem({(0, 0, 0): ge(0), (1, 0, 0): ge(1)}, ((1, -3), (2,), (0, 5)), seqs,
                            bounds=(ge(10), ge(20)))
    assert shifts_for(prob) == (ge(60), ge(120))


def test_nd_requires_bounds():
    seqs = tuple(MonotoneSequence.affine(ge(0), ge(1), 4) for _ in range(2))
    prob = ThresholdProblem({(0, 0): ge(0), (1, 1): ge(1)}, ((0, 1), (0, 1)), seqs)
    with pytest.raises(PreconditionError):
        solve_threshold_nd(prob)


def test_certify_grid_zero_shift_default():
    seqs = tuple(MonotoneSequence.affine(ge(0), ge(1), 6) for _ in range(2))
    prob = ThresholdProblem({(0, 0): ge(0), (1, 1): ge(Fraction(1, 2))}, ((0, 1), (0, 1)), seqs)
    cert = certify_grid(prob, horizons=(5, 5))
    assert cert.shifts == (zero(1),)
    assert oracles.verify_box(prob, cert)
