"""Ordered abelian groups Q^n (lexicographic) and threshold solvers.

Elements of the value group are :class:`GroupElement` instances, a tuple
subclass of exact :class:`fractions.Fraction` coordinates.  Python's tuple
ordering is already lexicographic, so comparison comes for free; addition
and integer scaling are overridden to act componentwise.  The top element
``INF`` is a singleton that compares above every finite element and absorbs
addition.

The threshold solvers take finitely many affine forms

    P_I(j) = beta_I + t_{i_1} gamma_{1, j_1} + sum_{e >= 2} t_{i_e} (gamma_{e, j_e} + shift_e)

and find indices nu_e past which the forms are pairwise different
(``DISTINCT``) or all nonzero (``NONZERO``) on a finite, explicitly sampled
grid.  Nothing here proves an eventual statement: certificates always carry
the horizon they were checked against.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Callable, Optional, Sequence, Union

import numpy as np

__all__ = [
    "GroupElement", "INF", "Infinity", "ge", "zero", "compare",
    "MonotoneSequence", "Mode", "ThresholdProblem", "ThresholdCertificate",
    "solve_threshold_1d", "solve_threshold_nd", "certify_grid", "shifts_for",
    "OrderedValuesError", "RankMismatch", "HorizonExhausted", "InvalidBound", "BeyondWindow",
    "PreconditionError",
]


class OrderedValuesError(ValueError):
    pass


class RankMismatch(OrderedValuesError):
    pass


class HorizonExhausted(OrderedValuesError):
    """No index could be certified inside the sampled horizon."""


class BeyondWindow(OrderedValuesError, IndexError):
    """A term past the sampled window was requested and no rule extends it."""


class InvalidBound(OrderedValuesError):
    pass


class PreconditionError(OrderedValuesError):
    pass


class GroupElement(tuple):
    """An element of Q^n with lexicographic order."""

    __slots__ = ()

    def __new__(cls, coords):
        if isinstance(coords, (int, Fraction, str)):
            coords = (coords,)
        coords = tuple(Fraction(c) for c in coords)
        if not coords:
            raise ValueError("rank must be >= 1")
        return tuple.__new__(cls, coords)

    @classmethod
    def _raw(cls, coords) -> "GroupElement":
        return tuple.__new__(cls, coords)

    @property
    def rank(self) -> int:
        return len(self)

    is_infinite = False

    def _check(self, other):
        if isinstance(other, GroupElement) and len(other) != len(self):
            raise RankMismatch(f"rank {len(self)} vs {len(other)}")

    def __add__(self, other):
        if other is INF:
            return INF
        if not isinstance(other, GroupElement):
            return NotImplemented
        self._check(other)
        return GroupElement._raw(a + b for a, b in zip(self, other))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        self._check(other)
        return GroupElement._raw(a - b for a, b in zip(self, other))

    def __neg__(self):
        return GroupElement._raw(-a for a in self)

    def __mul__(self, k):
        if isinstance(k, (int, Fraction)) and not isinstance(k, bool):
            return GroupElement._raw(a * k for a in self)
        return NotImplemented

    __rmul__ = __mul__

    # tuple comparisons are lexicographic already; only guard ranks and INF
    def __lt__(self, other):
        if other is INF:
            return True
        self._check(other)
        return tuple.__lt__(self, other)

    def __le__(self, other):
        if other is INF:
            return True
        self._check(other)
        return tuple.__le__(self, other)

    def __gt__(self, other):
        if other is INF:
            return False
        self._check(other)
        return tuple.__gt__(self, other)

    def __ge__(self, other):
        if other is INF:
            return False
        self._check(other)
        return tuple.__ge__(self, other)

    def __eq__(self, other):
        if other is INF:
            return False
        return tuple.__eq__(self, other)

    def __ne__(self, other):
        return not self == other

    __hash__ = tuple.__hash__

    def is_zero(self) -> bool:
        return not any(self)

    def sign(self) -> int:
        for c in self:
            if c:
                return 1 if c > 0 else -1
        return 0

    def __repr__(self):
        return "(" + ", ".join(str(c) for c in self) + ")"

    def to_json(self):
        return [str(c) for c in self]


@total_ordering
class Infinity:
    """The value of zero: above every group element, absorbing under +."""

    _instance = None
    is_infinite = True

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, k):
        if k == 0:
            raise ValueError("0 * INF is undefined")
        if k < 0:
            raise ValueError("INF cannot be negated")
        return self

    __rmul__ = __mul__

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __hash__(self):
        return hash("INF")

    def __repr__(self):
        return "INF"

    def to_json(self):
        return "inf"


INF = Infinity()

Value = Union[GroupElement, Infinity]


def ge(*coords) -> GroupElement:
    """Shorthand constructor: ``ge(1, "1/2")`` is the element (1, 1/2)."""
    if len(coords) == 1 and isinstance(coords[0], (tuple, list)):
        coords = coords[0]
    return GroupElement(coords)


def zero(rank: int) -> GroupElement:
    return GroupElement._raw((Fraction(0),) * rank)


def value_from_json(obj, rank=None) -> Value:
    if obj == "inf":
        return INF
    g = GroupElement(obj)
    if rank is not None and g.rank != rank:
        raise RankMismatch(f"expected rank {rank}, got {g.rank}")
    return g


def compare(x: Value, y: Value) -> int:
    """Three-way comparison returning -1, 0 or 1."""
    if x is INF or y is INF:
        if x is y:
            return 0
        return 1 if x is INF else -1
    if len(x) != len(y):
        raise RankMismatch(f"rank {len(x)} vs {len(y)}")
    return (tuple.__gt__(x, y)) - (tuple.__lt__(x, y))


# --------------------------------------------------------------------------
# sequences and problems
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MonotoneSequence:
    """A strictly increasing window of group elements, optionally extended.

    ``rule`` maps an index to a term and is consulted for indices at or past
    the window end.  :meth:`affine` builds the ``start + index * step`` rule.
    """

    window: tuple
    rule: Optional[Callable[[int], GroupElement]] = field(default=None, compare=False)
    rule_desc: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(self.window))
        if not self.window and self.rule is None:
            raise ValueError("empty sequence without rule")
        for a, b in zip(self.window, self.window[1:]):
            if not a < b:
                raise PreconditionError(f"sequence not strictly increasing at {a} >= {b}")

    @classmethod
    def affine(cls, start, step, length: int = 0) -> "MonotoneSequence":
        start, step = ge(start), ge(step)
        if step.sign() <= 0:
            raise PreconditionError("affine step must be positive")
        rule = lambda j: start + step * j
        return cls(tuple(rule(j) for j in range(length)), rule, ("affine", start, step))

    def term(self, j: int) -> GroupElement:
        if j < len(self.window):
            return self.window[j]
        if self.rule is None:
            raise BeyondWindow(f"index {j} past window of length {len(self.window)} and no rule")
        return self.rule(j)

    def terms(self, horizon: int) -> list:
        """Terms with indices 0..horizon inclusive."""
        out = [self.term(j) for j in range(horizon + 1)]
        for a, b in zip(out, out[1:]):
            if not a < b:
                raise PreconditionError(f"rule breaks monotonicity at {a} >= {b}")
        return out

    def default_horizon(self) -> int:
        if self.rule is None:
            return len(self.window) - 1
        return max(len(self.window) - 1, 63)


class Mode(enum.Enum):
    DISTINCT = "distinct"
    NONZERO = "nonzero"


@dataclass(frozen=True)
class ThresholdProblem:
    """Data of a value-separation problem.

    ``betas`` maps multi-indices (one entry per axis, 0-based) to group
    elements; a missing key means the corresponding form is absent.
    """

    betas: dict
    multipliers: tuple
    sequences: tuple
    mode: Mode = Mode.DISTINCT
    bounds: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "multipliers", tuple(tuple(int(t) for t in ts) for ts in self.multipliers))
        object.__setattr__(self, "sequences", tuple(self.sequences))
        object.__setattr__(self, "betas", dict(self.betas))
        if len(self.sequences) != self.n_axes:
            raise PreconditionError("need one sequence per axis")
        for idx, b in self.betas.items():
            if len(idx) != self.n_axes or any(not 0 <= i < len(ts) for i, ts in zip(idx, self.multipliers)):
                raise PreconditionError(f"beta index {idx} out of range")
            if b is INF:
                raise PreconditionError("betas must be finite")
        if self.mode is Mode.DISTINCT:
            for e, ts in enumerate(self.multipliers):
                if len(set(ts)) != len(ts):
                    raise PreconditionError(f"axis {e + 1}: multipliers must be pairwise different")
        else:
            if not any(all(t != 0 for t in ts) for ts in self.multipliers):
                raise PreconditionError("nonzero mode needs one axis with only nonzero multipliers")

    @property
    def n_axes(self) -> int:
        return len(self.multipliers)

    @classmethod
    def dense(cls, betas, multipliers, sequences, mode=Mode.DISTINCT, bounds=()):
        """Build from a nested list/array of betas indexed like the axes."""
        shape = tuple(len(ts) for ts in multipliers)
        flat = {}
        for idx in itertools.product(*(range(m) for m in shape)):
            b = betas
            for i in idx:
                b = b[i]
            if b is not None:
                flat[idx] = ge(b)
        return cls(flat, multipliers, sequences, mode, tuple(bounds))


@dataclass(frozen=True)
class ThresholdCertificate:
    nus: tuple
    shifts: tuple
    verified_horizon: tuple
    dominant: Optional[int] = None
    dominant_from: Optional[int] = None

    def to_json(self):
        return {
            "nus": list(self.nus),
            "shifts": [s.to_json() for s in self.shifts],
            "verified_horizon": list(self.verified_horizon),
            "dominant": self.dominant,
            "dominant_from": self.dominant_from,
        }


# --------------------------------------------------------------------------
# exact integer encoding
# --------------------------------------------------------------------------

def _encoder(elements):
    """Common denominator of all coordinates: scaling by it makes every
    element integral without changing order or equality."""
    dens = 1
    for g in elements:
        for c in g:
            dens = dens * c.denominator // math.gcd(dens, c.denominator)
    return dens


def _encode(g, scale, radix):
    # signed digits stay below radix/2, so integer order is lexicographic order
    v = 0
    for c in g:
        v = v * radix + int(c * scale)
    return v


# --------------------------------------------------------------------------
# solvers
# --------------------------------------------------------------------------

def shifts_for(problem: ThresholdProblem) -> tuple:
    """Per-axis shifts r_{e-1} * a_{e-1} for axes 2..n (empty for one axis).

    r_e is the largest |t| over axes 1..e, doubled in DISTINCT mode.
    """
    n = problem.n_axes
    if n == 1:
        return ()
    if len(problem.bounds) < n - 1 or any(b is None for b in problem.bounds[: n - 1]):
        raise PreconditionError("bounds a_1..a_{n-1} are required for n >= 2 axes")
    factor = 2 if problem.mode is Mode.DISTINCT else 1
    out = []
    running = 0
    for e in range(n - 1):
        running = max(running, max((abs(t) for t in problem.multipliers[e]), default=0))
        out.append(ge(problem.bounds[e]) * (factor * running))
    return tuple(out)


def _bad_mask(problem, gammas, shifts):
    """Boolean array over the grid: True where the mode predicate fails."""
    n = problem.n_axes
    shape = tuple(len(g) for g in gammas)
    forms = sorted(problem.betas)
    if not forms:
        return np.zeros(shape, dtype=bool)
    rank = next(iter(problem.betas.values())).rank
    shifted = [list(gammas[0])] + [
        [g + shifts[e - 1] for g in gammas[e]] for e in range(1, n)
    ]
    every = list(problem.betas.values()) + [g for axis in shifted for g in axis]
    scale = _encoder(every)
    # bound on |coordinate| of any form, in scaled integers
    tmax = [max((abs(t) for t in ts), default=0) for ts in problem.multipliers]
    cmax = max(abs(int(c * scale)) for g in every for c in g) if every else 0
    bound = cmax * (1 + sum(tmax)) * 2 + 1
    radix = 2 * bound + 1
    big = radix ** rank
    dtype = np.int64 if big < 2 ** 62 else object

    enc_axes = [np.array([_encode(g, scale, radix) for g in axis], dtype=dtype) for axis in shifted]
    vals = []
    for idx in forms:
        acc = np.full(shape, _encode(problem.betas[idx], scale, radix), dtype=dtype)
        for e, i in enumerate(idx):
            t = problem.multipliers[e][i]
            if t:
                view = [1] * n
                view[e] = shape[e]
                acc = acc + t * enc_axes[e].reshape(view)
        vals.append(acc)
    stack = np.stack(vals)
    if problem.mode is Mode.NONZERO:
        return (stack == 0).any(axis=0)
    if len(forms) == 1:
        return np.zeros(shape, dtype=bool)
    srt = np.sort(stack, axis=0)
    return (srt[1:] == srt[:-1]).any(axis=0)


def _lex_min_nus(bad, horizons):
    """Least nu (axis 1 first) such that no bad grid point has j_e > nu_e on
    every axis, with later axes allowed to take their largest admissible nu."""
    n = bad.ndim
    pts = np.argwhere(bad)
    nus = []
    for e in range(n):
        sel = np.ones(len(pts), dtype=bool)
        for c in range(e):
            sel &= pts[:, c] > nus[c]
        for c in range(e + 1, n):
            sel &= pts[:, c] == horizons[c]
        col = pts[sel, e]
        nu = int(col.max()) if len(col) else 0
        if nu >= horizons[e]:
            raise HorizonExhausted(
                f"axis {e + 1}: predicate fails at the horizon index {horizons[e]}"
            )
        nus.append(nu)
    return tuple(nus)


def certify_grid(problem: ThresholdProblem, shifts=None, horizons=None) -> ThresholdCertificate:
    """Certify the mode predicate on the sampled grid with the given shifts.

    ``shifts`` defaults to zero on every axis; :func:`solve_threshold_nd`
    passes the shifts r_{e-1} a_{e-1}.
    """
    n = problem.n_axes
    if horizons is None:
        horizons = tuple(s.default_horizon() for s in problem.sequences)
    horizons = tuple(int(h) for h in horizons)
    if any(h < 1 for h in horizons):
        raise HorizonExhausted("every axis needs at least two sampled terms")
    gammas = [s.terms(h) for s, h in zip(problem.sequences, horizons)]
    if shifts is None:
        rank = gammas[0][0].rank
        shifts = tuple(zero(rank) for _ in range(n - 1))
    bad = _bad_mask(problem, gammas, shifts)
    nus = _lex_min_nus(bad, horizons)
    return ThresholdCertificate(nus, tuple(shifts), horizons)


def solve_threshold_1d(problem: ThresholdProblem, horizon: Optional[int] = None) -> ThresholdCertificate:
    """Least nu with beta_i + t_i gamma_s pairwise different for all sampled s > nu.

    Also reports the index r of the smallest form and the first index from
    which it stays smallest up to the horizon.
    """
    if problem.n_axes != 1:
        raise PreconditionError("one axis expected")
    if problem.mode is not Mode.DISTINCT:
        raise PreconditionError("the one-axis solver works in DISTINCT mode")
    h = problem.sequences[0].default_horizon() if horizon is None else horizon
    gammas = problem.sequences[0].terms(h)
    cert = certify_grid(problem, horizons=(h,))
    nu = cert.nus[0]
    forms = sorted(problem.betas)
    ts = problem.multipliers[0]

    def argmin(s):
        g = gammas[s]
        return min(forms, key=lambda idx: problem.betas[idx] + g * ts[idx[0]])[0]

    r = argmin(h)
    start = h
    while start - 1 > nu and argmin(start - 1) == r:
        start -= 1
    return ThresholdCertificate(cert.nus, (), cert.verified_horizon, r, start)


def solve_threshold_nd(problem: ThresholdProblem, horizons=None) -> ThresholdCertificate:
    """Per-axis nu_e for the shifted multi-axis forms.

    The shift on axis e >= 2 is r_{e-1} a_{e-1} with r the running maximum of
    |t| (NONZERO) or twice it (DISTINCT).  Bounds must dominate every sampled
    term of the earlier axes.
    """
    n = problem.n_axes
    if horizons is None:
        horizons = tuple(s.default_horizon() for s in problem.sequences)
    shifts = shifts_for(problem)
    for e in range(n - 1):
        a = ge(problem.bounds[e])
        for c in range(e + 1):
            top = problem.sequences[c].term(horizons[c])
            if not a > top:
                raise InvalidBound(f"a_{e + 1} = {a} does not exceed term {top} of axis {c + 1}")
    return certify_grid(problem, shifts, horizons)
