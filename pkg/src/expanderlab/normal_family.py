"""The sticky discrete normal family and its six defining conditions.

A family is parameterized by class weights ``p`` and a target asymptotic
variance ``sigma2`` inside the admissible window; its member for walk length
``t`` is the label-sum distribution of a sticky chain whose correlation
``lam`` is recovered from ``sigma2``.  ``check_axioms`` measures all six
conditions with explicit LHS/RHS margins and never raises on a failed
inequality; failures are data, carried in the report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import distributions as dist
from .distributions import IntegerDistribution
from .errors import InvalidArgumentError
from .graphs import LabeledChain, sticky_chain
from .variance import sigma_to_lambda, sticky_asymptotic_variance
from .walks import near_equal_partition, walk_sum_distribution

DEFAULT_CONSTANTS = (2.0, 2020.0, 2020.0)

_INEQ_SLACK = 1e-9
_MEAN_SLACK_PER_T = 1e-9
_EQUALITY_TOL = 1e-12


@dataclass(frozen=True)
class StickyFamily:
    """A discrete normal family: class weights, target variance, and constants.

    ``lam`` and ``sigma2`` are tied by the sticky closed form
    ``sigma2 = p0*p1*(1+lam)/(1-lam)``; construct via :meth:`from_sigma2`
    (enforces the admissible variance window) or :meth:`from_lambda`
    (any valid sticky correlation, for exploration outside the window).
    """

    p0: float
    p1: float
    sigma2: float
    lam: float
    c: tuple[float, float, float] = DEFAULT_CONSTANTS

    def __post_init__(self):
        closed = sticky_asymptotic_variance(self.lam, (self.p0, self.p1))
        if abs(closed - self.sigma2) > 1e-12:
            raise InvalidArgumentError(
                f"sigma2={self.sigma2} does not match the sticky closed form {closed}"
            )
        if len(self.c) != 3 or any(x <= 0 for x in self.c):
            raise InvalidArgumentError(f"c must be three positive constants, got {self.c}")
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))

    @classmethod
    def from_sigma2(cls, p, sigma2: float, c=DEFAULT_CONSTANTS) -> "StickyFamily":
        lam = sigma_to_lambda(sigma2, p)
        p0, p1 = float(p[0]), float(p[1])
        return cls(p0, p1, sticky_asymptotic_variance(lam, (p0, p1)), lam, c)

    @classmethod
    def from_lambda(cls, p, lam: float, c=DEFAULT_CONSTANTS) -> "StickyFamily":
        p0, p1 = float(p[0]), float(p[1])
        return cls(p0, p1, sticky_asymptotic_variance(lam, (p0, p1)), float(lam), c)

    @property
    def q(self) -> float:
        return self.p0 * self.p1

    def chain(self) -> LabeledChain:
        return sticky_chain(self.lam, (self.p0, self.p1))

    def describe(self) -> str:
        return (f"sticky family(p=({self.p0:.6g}, {self.p1:.6g}), "
                f"sigma2={self.sigma2:.12g}, lam={self.lam:.6g})")


def dn_distribution(family: StickyFamily, t: int) -> IntegerDistribution:
    """The family member for walk length t, on support 0..t."""
    return walk_sum_distribution(family.chain(), t)


def default_partitions(t: int) -> list[tuple[int, ...]]:
    """Condition-4 partition grid: a near-equal sqrt split, (1, t-1), and all ones for small t."""
    parts = [near_equal_partition(t, math.isqrt(t - 1) + 1 if t > 1 else 1)]
    if t >= 2:
        parts.append((1, t - 1))
    if t <= 16 and t >= 2:
        parts.append((1,) * t)
    out, seen = [], set()
    for p in parts:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def default_a_grid(t: int) -> list[float]:
    root = math.isqrt(t - 1) + 1 if t > 1 else 1  # ceil(sqrt(t))
    grid = [0.0, float(root), float(2 * root), float(4 * root)]
    out, seen = [], set()
    for a in grid:
        if a not in seen:
            seen.add(a)
            out.append(a)
    return out


def default_theta_grid(points: int = 129) -> np.ndarray:
    if points < 2:
        raise InvalidArgumentError(f"theta grid needs at least 2 points, got {points}")
    return np.linspace(-math.pi, math.pi, points)


@dataclass(frozen=True)
class AxiomCheck:
    condition: int
    t: int
    params: dict
    lhs: float
    rhs: float
    margin: float
    passed: bool


@dataclass(frozen=True)
class AxiomReport:
    family: StickyFamily
    checks: tuple[AxiomCheck, ...]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if not c.passed]

    def to_jsonable(self) -> dict:
        return {
            "family": {
                "p": [self.family.p0, self.family.p1],
                "sigma2": self.family.sigma2,
                "lambda": self.family.lam,
                "c": list(self.family.c),
            },
            "all_pass": self.all_pass,
            "rows": [
                {"condition": c.condition, "t": c.t, "params": c.params,
                 "lhs": c.lhs, "rhs": c.rhs, "margin": c.margin, "pass": c.passed}
                for c in self.checks
            ],
        }


def _resolve_per_t(value, t: int, default_fn):
    if value is None:
        return default_fn(t)
    if isinstance(value, Mapping):
        return value.get(t, default_fn(t))
    return value


def check_axioms(family: StickyFamily, t_list: Sequence[int], *,
                 partitions=None, a_grid=None, theta_grid=None) -> AxiomReport:
    """Measure all six discrete-normal conditions on a grid of walk lengths.

    Parameters
    ----------
    family : StickyFamily
    t_list : sequence of int
        Walk lengths to check.  Condition 3 only applies at t=1 and is always
        evaluated regardless of the list.
    partitions, a_grid : optional
        Either a mapping from t to the per-t grid, or one grid applied to
        every t; defaults are the near-equal sqrt split plus (1, t-1) plus
        all-ones for t <= 16, and {0, r, 2r, 4r} with r = ceil(sqrt(t)).
    theta_grid : optional
        Angles for condition 6, default 129 uniform points on [-pi, pi].

    The report never raises on a failed inequality; every row carries
    lhs, rhs, and margin = rhs - lhs (for the equality-style conditions 1
    and 3 the rhs column holds the tolerance).
    """
    t_list = [int(t) for t in t_list]
    if not t_list or any(t < 1 for t in t_list):
        raise InvalidArgumentError(f"t_list must be nonempty positive integers, got {t_list}")
    c1, c2, c3 = family.c
    q = family.q
    ratio_gap = abs(family.sigma2 / q - 1.0)
    thetas = default_theta_grid() if theta_grid is None else np.asarray(theta_grid, dtype=float)

    checks: list[AxiomCheck] = []
    members: dict[int, IntegerDistribution] = {}

    def member(t: int) -> IntegerDistribution:
        if t not in members:
            members[t] = dn_distribution(family, t)
        return members[t]

    # condition 3: the t=1 member is exactly Bernoulli(p1)
    one = member(1)
    bern = dist.bernoulli(family.p1)
    _, pa, pb = dist._aligned(one, bern)
    lhs3 = float(np.abs(pa - pb).max())
    checks.append(AxiomCheck(3, 1, {}, lhs3, _EQUALITY_TOL,
                             _EQUALITY_TOL - lhs3, lhs3 <= _EQUALITY_TOL))

    for t in t_list:
        d = member(t)
        mean, var = dist.mean_variance(d)

        lhs1 = abs(mean - family.p1 * t)
        rhs1 = _MEAN_SLACK_PER_T * t
        checks.append(AxiomCheck(1, t, {}, lhs1, rhs1, rhs1 - lhs1, lhs1 <= rhs1))

        lhs2 = abs(var - family.sigma2 * t)
        rhs2 = c1 * abs(family.sigma2 - q)
        checks.append(AxiomCheck(2, t, {}, lhs2, rhs2, rhs2 - lhs2,
                                 lhs2 <= rhs2 + _INEQ_SLACK))

        for parts in _resolve_per_t(partitions, t, default_partitions):
            parts = tuple(int(x) for x in parts)
            if sum(parts) != t or any(x < 1 for x in parts):
                raise InvalidArgumentError(
                    f"partition {parts} does not split t={t} into positive parts"
                )
            conv = dist.convolve_all([member(x) for x in parts])
            lhs4 = dist.tv_distance(conv, d)
            rhs4 = (c2 / 2.0) * (len(parts) - 1) * ratio_gap / t
            checks.append(AxiomCheck(4, t, {"partition": list(parts)}, lhs4, rhs4,
                                     rhs4 - lhs4, lhs4 <= rhs4 + _INEQ_SLACK))

        ref = dist.binomial(t, family.p1)
        for a in _resolve_per_t(a_grid, t, default_a_grid):
            a = float(a)
            lhs5 = dist.tail_l1(d, ref, family.p1 * t, a)
            rhs5 = c3 * ratio_gap * math.exp(-a * a / (8.0 * t))
            checks.append(AxiomCheck(5, t, {"a": a}, lhs5, rhs5,
                                     rhs5 - lhs5, lhs5 <= rhs5 + _INEQ_SLACK))

        cf = dist.centered_char_fn_grid(d, family.p1 * t, thetas)
        for theta, value in zip(thetas, np.abs(cf)):
            lhs6 = float(value)
            rhs6 = math.exp(-q * t * theta * theta / 20.0)
            checks.append(AxiomCheck(6, t, {"theta": float(theta)}, lhs6, rhs6,
                                     rhs6 - lhs6, lhs6 <= rhs6 + _INEQ_SLACK))

    return AxiomReport(family, tuple(checks))
