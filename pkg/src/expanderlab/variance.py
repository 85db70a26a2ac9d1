"""Asymptotic variance of walk label sums: series evaluation, closed forms, and checks.

For a stationary chain the per-step variance of the label sum converges to

    sigma^2 = p0*p1 + 2 * sum_{i >= 1} cov(val(X_0), val(X_i)),

where the covariance term i equals ``(val - p1)^T G^i (weights * val)``.  On a
regular graph with uniform weights this is the familiar (1/n)-normalized
quadratic form; keeping the weights explicit makes the same series exact for
collapsed two-state chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundViolationError, DivergenceError, InvalidArgumentError, OutOfRangeError
from .graphs import LabeledChain, spectral_expansion

_LAMBDA_DIVERGENCE = 1.0 - 1e-9
_WINDOW_REL_SLACK = 1e-9


def series_truncation_index(lam: float, q: float, tol: float) -> int:
    """Smallest K with geometric tail bound 2*q*lam^(K+1)/(1-lam) <= tol."""
    if lam <= 0.0 or q <= 0.0:
        return 0
    k = math.ceil(math.log(tol * (1.0 - lam) / (2.0 * q)) / math.log(lam))
    return max(int(k), 0)


def asymptotic_variance_series(chain: LabeledChain, tol: float = 1e-12) -> tuple[float, float]:
    """Evaluate the covariance series to within ``tol``.

    Returns ``(sigma2, error_bound)`` where ``error_bound`` is the certified
    geometric bound on the truncated tail (0.0 when the series terminates
    exactly, e.g. on the complete graph).

    Raises
    ------
    DivergenceError
        If the chain's spectral expansion is within 1e-9 of 1, where the
        geometric tail bound gives no control.
    """
    if tol <= 0.0:
        raise InvalidArgumentError(f"tol must be positive, got {tol}")
    lam = spectral_expansion(chain)
    q = chain.p0 * chain.p1
    if lam >= _LAMBDA_DIVERGENCE:
        raise DivergenceError(
            f"spectral expansion {lam} is too close to 1 for the series to converge"
        )
    if lam < 1e-14 or q == 0.0:
        return q, 0.0
    k = series_truncation_index(lam, q, tol)
    v = chain.labels.astype(float) - chain.p1
    r = chain.weights * chain.labels
    sigma2 = q
    for _ in range(k):
        r = chain.matrix @ r
        sigma2 += 2.0 * float(v @ r)
    bound = 2.0 * q * lam ** (k + 1) / (1.0 - lam)
    return float(sigma2), float(bound)


def sticky_asymptotic_variance(lam: float, p) -> float:
    """Closed form p0*p1*(1+lam)/(1-lam) for the two-state sticky chain."""
    try:
        p0, p1 = (float(x) for x in p)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"p must be a pair, got {p!r}") from exc
    lam = float(lam)
    if lam >= 1.0:
        raise DivergenceError("the sticky variance diverges as lam -> 1")
    return p0 * p1 * (1.0 + lam) / (1.0 - lam)


def exact_variance_formula(chain: LabeledChain, t: int) -> float:
    """Finite-t variance of the walk label sum, by the covariance expansion.

    ``Var(t) = p0*p1*t + 2 * sum_{l=1}^{t-1} (t - l) * cov_l`` with the same
    covariance terms as the series; costs t-1 mat-vec products and agrees
    with the variance of the DP distribution to float accuracy.
    """
    if t < 1:
        raise InvalidArgumentError(f"t must be >= 1, got {t}")
    q = chain.p0 * chain.p1
    var = q * t
    v = chain.labels.astype(float) - chain.p1
    r = chain.weights * chain.labels
    for lag in range(1, t):
        r = chain.matrix @ r
        var += 2.0 * (t - lag) * float(v @ r)
    return float(var)


@dataclass(frozen=True)
class VarianceRow:
    t: int
    var_over_t: float
    gap: float
    bound: float
    passed: bool


@dataclass(frozen=True)
class VarianceReport:
    sigma2: float
    error_bound: float
    truncation_index: int
    rows: tuple[VarianceRow, ...]

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_jsonable(self) -> dict:
        return {
            "sigma2": self.sigma2,
            "error_bound": self.error_bound,
            "rows": [
                {"t": r.t, "var_over_t": r.var_over_t, "gap": r.gap,
                 "bound": r.bound, "pass": r.passed}
                for r in self.rows
            ],
        }


def variance_convergence_check(chain: LabeledChain, t_list, *,
                               tol: float = 1e-12, slack: float = 1e-9) -> VarianceReport:
    """Certify |Var(t)/t - sigma^2| <= 2*lam*p0*p1 / ((1-lam)^2 * t) on a grid of t.

    Raises
    ------
    BoundViolationError
        Naming the first offending t if the inequality fails beyond ``slack``.
    """
    t_list = [int(t) for t in t_list]
    if not t_list or any(t < 1 for t in t_list):
        raise InvalidArgumentError(f"t_list must be nonempty positive integers, got {t_list}")
    sigma2, err = asymptotic_variance_series(chain, tol)
    lam = spectral_expansion(chain)
    q = chain.p0 * chain.p1
    k = series_truncation_index(lam, q, tol)
    rows = []
    for t in t_list:
        var_t = exact_variance_formula(chain, t)
        gap = abs(var_t / t - sigma2)
        bound = 2.0 * lam * q / ((1.0 - lam) ** 2 * t)
        ok = gap <= bound + slack
        rows.append(VarianceRow(t, var_t / t, gap, bound, ok))
        if not ok:
            raise BoundViolationError(
                f"variance convergence bound failed at t={t}: gap {gap} > bound {bound} + {slack}"
            )
    return VarianceReport(sigma2, err, k, tuple(rows))


def sigma_window(p) -> tuple[float, float]:
    """Admissible asymptotic-variance window for the discrete normal family.

    ``[(1-m)/(1+m) * p0*p1, (101/99) * p0*p1]`` with
    ``m = min(p0/p1, p1/p0, 1/100)``.
    """
    try:
        p0, p1 = (float(x) for x in p)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"p must be a pair, got {p!r}") from exc
    if p0 <= 0.0 or p1 <= 0.0:
        raise InvalidArgumentError("class weights must be positive")
    q = p0 * p1
    m = min(p0 / p1, p1 / p0, 1.0 / 100.0)
    return (1.0 - m) / (1.0 + m) * q, (101.0 / 99.0) * q


def sigma_to_lambda(sigma2: float, p) -> float:
    """Invert the sticky variance formula: lam = (sigma2 - p0*p1) / (sigma2 + p0*p1).

    The variance must lie in :func:`sigma_window`; a relative slack of 1e-9
    is allowed at the edges because two flagship instances (the cycle-shift
    mix at mu=1/100 and the sticky chain at lam=1/100) sit exactly on them.
    Values beyond the slack raise rather than clamp.
    """
    try:
        p0, p1 = (float(x) for x in p)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"p must be a pair, got {p!r}") from exc
    sigma2 = float(sigma2)
    q = p0 * p1
    lo, hi = sigma_window(p)
    if sigma2 < lo * (1.0 - _WINDOW_REL_SLACK) or sigma2 > hi * (1.0 + _WINDOW_REL_SLACK):
        raise OutOfRangeError(
            f"sigma2={sigma2} outside the admissible window [{lo}, {hi}] for p=({p0}, {p1})"
        )
    return (sigma2 - q) / (sigma2 + q)
