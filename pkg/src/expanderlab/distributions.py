"""Finite distributions on a contiguous integer range, and the metrics between them.

The support is always the full window ``offset .. offset + len(probs) - 1``;
endpoint probabilities are kept even when they are tiny, so that serialized
distributions never silently truncate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError

_MASS_TOL = 1e-12
_DUST = 1e-15
_PI_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class IntegerDistribution:
    """Probability vector over consecutive integers starting at ``offset``.

    Entries must be nonnegative (negative round-off dust above -1e-15 is
    clamped to zero) and sum to 1 within 1e-12.
    """

    offset: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.ascontiguousarray(np.asarray(self.probs, dtype=float))
        if probs.ndim != 1 or probs.size == 0:
            raise InvalidArgumentError("probs must be a nonempty 1-d array")
        lo = probs.min()
        if lo < -_DUST:
            raise InvalidArgumentError(f"negative probability {lo} below the dust threshold")
        if lo < 0.0:
            probs = np.maximum(probs, 0.0)
        total = probs.sum()
        if abs(total - 1.0) > _MASS_TOL:
            raise InvalidArgumentError(f"total mass {total} differs from 1 by more than 1e-12")
        probs.setflags(write=False)
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "probs", probs)

    @property
    def support(self) -> np.ndarray:
        return self.offset + np.arange(self.probs.size)

    @property
    def max_value(self) -> int:
        return self.offset + self.probs.size - 1

    def prob_of(self, j: int) -> float:
        if self.offset <= j <= self.max_value:
            return float(self.probs[j - self.offset])
        return 0.0


def point_mass(j: int) -> IntegerDistribution:
    return IntegerDistribution(j, np.array([1.0]))


def _aligned(a: IntegerDistribution, b: IntegerDistribution):
    """Pad both probability vectors onto the union of the two supports."""
    lo = min(a.offset, b.offset)
    hi = max(a.max_value, b.max_value)
    size = hi - lo + 1
    pa = np.zeros(size)
    pb = np.zeros(size)
    pa[a.offset - lo: a.offset - lo + a.probs.size] = a.probs
    pb[b.offset - lo: b.offset - lo + b.probs.size] = b.probs
    return lo, pa, pb


def tv_distance(a: IntegerDistribution, b: IntegerDistribution) -> float:
    """Total variation distance, half the l1 distance."""
    _, pa, pb = _aligned(a, b)
    return 0.5 * float(np.abs(pa - pb).sum())


def lp_distances(a: IntegerDistribution, b: IntegerDistribution) -> tuple[float, float]:
    """The pair (l1 distance, l2 distance)."""
    _, pa, pb = _aligned(a, b)
    diff = pa - pb
    return float(np.abs(diff).sum()), float(math.sqrt(np.dot(diff, diff)))


def kolmogorov_distance(a: IntegerDistribution, b: IntegerDistribution) -> float:
    """Largest absolute CDF gap; never exceeds the total variation distance."""
    _, pa, pb = _aligned(a, b)
    return float(np.abs(np.cumsum(pa - pb)).max())


def tail_l1(a: IntegerDistribution, b: IntegerDistribution, center: float, c: float) -> float:
    """l1 difference restricted to the tail ``|j - center| >= c`` (inclusive).

    ``c = 0`` therefore gives the full l1 distance, and the value is
    non-increasing in ``c``.
    """
    if c < 0:
        raise InvalidArgumentError(f"tail radius c must be >= 0, got {c}")
    lo, pa, pb = _aligned(a, b)
    j = lo + np.arange(pa.size)
    mask = np.abs(j - center) >= c
    return float(np.abs(pa[mask] - pb[mask]).sum())


def convolve(a: IntegerDistribution, b: IntegerDistribution) -> IntegerDistribution:
    """Distribution of the sum of independent draws from ``a`` and ``b``."""
    return IntegerDistribution(a.offset + b.offset, np.convolve(a.probs, b.probs))


def convolve_all(dists: Sequence[IntegerDistribution]) -> IntegerDistribution:
    if not dists:
        raise InvalidArgumentError("need at least one distribution to convolve")
    out = dists[0]
    for d in dists[1:]:
        out = convolve(out, d)
    return out


def mean_variance(a: IntegerDistribution) -> tuple[float, float]:
    j = a.support.astype(float)
    mean = float(np.dot(a.probs, j))
    var = float(np.dot(a.probs, (j - mean) ** 2))
    return mean, var


def centered_char_fn(a: IntegerDistribution, center: float, theta: float) -> complex:
    """E[exp(-i * theta * (X - center))] for theta in [-pi, pi].

    Computed by direct summation over the support (no FFT), so the value is
    exact up to one rounded dot product.
    """
    theta = float(theta)
    if abs(theta) > math.pi + _PI_SLACK:
        raise InvalidArgumentError(f"theta must lie in [-pi, pi], got {theta}")
    j = a.support.astype(float)
    return complex(np.dot(a.probs, np.exp(-1j * theta * (j - center))))


def centered_char_fn_grid(a: IntegerDistribution, center: float, thetas) -> np.ndarray:
    """Vectorized :func:`centered_char_fn` over a grid of angles."""
    thetas = np.asarray(thetas, dtype=float)
    if thetas.size and np.abs(thetas).max() > math.pi + _PI_SLACK:
        raise InvalidArgumentError("every theta must lie in [-pi, pi]")
    j = a.support.astype(float) - center
    return np.exp(-1j * np.outer(thetas, j)) @ a.probs


def binomial(t: int, p: float) -> IntegerDistribution:
    """Binomial(t, p) on the full support 0..t.

    Probabilities come from the multiplicative recurrence
    ``x[k+1] = x[k] * (t-k)/(k+1) * p/(1-p)`` anchored at the mode, then one
    normalization; this avoids the underflow a naive product of factorials
    hits for large t.  ``p = 0`` and ``p = 1`` degenerate to point masses.
    """
    t = int(t)
    if t < 0:
        raise InvalidArgumentError(f"t must be >= 0, got {t}")
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"p must lie in [0, 1], got {p}")
    if t == 0 or p == 0.0:
        return point_mass(0)
    if p == 1.0:
        return point_mass(t)
    mode = min(int(math.floor((t + 1) * p)), t)
    x = np.zeros(t + 1)
    x[mode] = 1.0
    ratio = p / (1.0 - p)
    for k in range(mode, t):
        x[k + 1] = x[k] * (t - k) / (k + 1) * ratio
    for k in range(mode, 0, -1):
        x[k - 1] = x[k] * k / ((t - k + 1) * ratio)
    return IntegerDistribution(0, x / x.sum())


def bernoulli(p: float) -> IntegerDistribution:
    return binomial(1, p)


def to_csv(a: IntegerDistribution) -> str:
    """Two-column ``j,prob`` text with 17 significant digits per probability."""
    lines = ["j,prob"]
    for j, p in zip(a.support, a.probs):
        lines.append(f"{j},{format(p, '.17g')}")
    return "\n".join(lines) + "\n"


def char_grid_to_csv(thetas, values) -> str:
    """``theta,re,im,abs`` rows for a character-function grid, 17 digits each."""
    lines = ["theta,re,im,abs"]
    for th, v in zip(thetas, values):
        v = complex(v)
        lines.append(",".join(format(x, ".17g")
                              for x in (float(th), v.real, v.imag, abs(v))))
    return "\n".join(lines) + "\n"


def from_csv(text: str) -> IntegerDistribution:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0] != "j,prob":
        raise InvalidArgumentError("distribution CSV must start with header 'j,prob'")
    js, ps = [], []
    for ln in lines[1:]:
        sj, sp = ln.split(",")
        js.append(int(sj))
        ps.append(float(sp))
    if not js:
        raise InvalidArgumentError("distribution CSV has no rows")
    if js != list(range(js[0], js[0] + len(js))):
        raise InvalidArgumentError("distribution CSV support must be contiguous")
    return IntegerDistribution(js[0], np.array(ps))
