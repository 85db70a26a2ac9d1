"""Exact distributions of label sums along walks, plus a brute-force oracle and a sampler.

The workhorse is a transfer-matrix dynamic program over the state
``(current vertex, partial label sum)``: stepping through transition matrix W
moves the vertex marginal with one matmul and then shifts the partial-sum
index up by one on label-1 rows.  The label of the starting vertex counts
toward the sum, so a walk over t vertices produces a sum in ``0..t``.
"""

from __future__ import annotations

import itertools
import logging

import numpy as np

from .distributions import IntegerDistribution
from .errors import ExpanderlabError, InvalidArgumentError, ResourceLimitError
from .graphs import GraphSequence, LabeledChain

log = logging.getLogger(__name__)

T_CAP = 4096
N_CAP = 512
BRUTE_FORCE_PATH_CAP = 10 ** 7

_STEP_MASS_TOL = 1e-12
_DUST = 1e-15


def _dp(steps, weights: np.ndarray, labels: np.ndarray, t: int) -> IntegerDistribution:
    n = weights.shape[0]
    ones = labels == 1
    zeros = ~ones
    state = np.zeros((n, t + 1))
    state[np.arange(n), labels] = weights
    for idx, w in enumerate(steps, start=1):
        moved = w @ state
        nxt = np.zeros_like(moved)
        nxt[zeros] = moved[zeros]
        nxt[ones, 1:] = moved[ones, :-1]
        mass = nxt.sum()
        if abs(mass - 1.0) > _STEP_MASS_TOL:
            raise ExpanderlabError(
                f"mass drifted to {mass} after step {idx}; inputs are not stochastic enough"
            )
        state = nxt
    probs = state.sum(axis=0)
    low = probs.min()
    if low < -_DUST:
        raise ExpanderlabError(f"DP produced a negative probability {low}")
    if low < 0.0:
        log.warning("clamping negative round-off dust %g in walk-sum DP", low)
        probs = np.maximum(probs, 0.0)
    return IntegerDistribution(0, probs)


def _check_caps(n: int, t: int, t_cap, n_cap) -> None:
    if t < 1:
        raise InvalidArgumentError(f"walk length t must be >= 1, got {t}")
    if t_cap is not None and t > t_cap:
        raise ResourceLimitError(f"t={t} exceeds the cap {t_cap}; raise t_cap to override")
    if n_cap is not None and n > n_cap:
        raise ResourceLimitError(f"n={n} exceeds the cap {n_cap}; raise n_cap to override")


def walk_sum_distribution(chain: LabeledChain, t: int, *,
                          t_cap: int | None = T_CAP,
                          n_cap: int | None = N_CAP) -> IntegerDistribution:
    """Exact distribution of the label sum over a stationary t-vertex walk.

    The walk starts from the chain's weight vector, makes t-1 transitions,
    and sums the labels of all t visited vertices.  Runs in O(t^2 * n^2) time
    via the transfer DP; ``t_cap`` and ``n_cap`` guard against accidental
    huge instances and may be raised or set to None by callers who mean it.
    """
    _check_caps(chain.n, t, t_cap, n_cap)
    steps = itertools.repeat(chain.matrix, t - 1)
    return _dp(steps, chain.weights, chain.labels, t)


def walk_sum_distribution_seq(seq: GraphSequence, *,
                              t_cap: int | None = T_CAP,
                              n_cap: int | None = N_CAP) -> IntegerDistribution:
    """Exact label-sum distribution for a time-inhomogeneous sequence of steps."""
    _check_caps(seq.n, seq.t, t_cap, n_cap)
    return _dp(seq.steps, seq.weights, seq.labels, seq.t)


def brute_force_walk_sum(chain: LabeledChain, t: int, *,
                         path_cap: int = BRUTE_FORCE_PATH_CAP) -> IntegerDistribution:
    """Oracle for :func:`walk_sum_distribution` by explicit path enumeration.

    Sums ``weights[v0] * prod W[v_{i+1}, v_i]`` over all n^t vertex paths,
    binning by label sum.  Exponential in t; refuses beyond ``path_cap``
    paths.  Exists so the DP has an independent implementation to agree with.
    """
    if t < 1:
        raise InvalidArgumentError(f"walk length t must be >= 1, got {t}")
    n = chain.n
    if n ** t > path_cap:
        raise ResourceLimitError(
            f"brute force would enumerate {n}^{t} > {path_cap} paths; "
            "use walk_sum_distribution instead"
        )
    w = chain.matrix
    weights = chain.weights
    labels = chain.labels
    probs = np.zeros(t + 1)
    for path in itertools.product(range(n), repeat=t):
        pr = weights[path[0]]
        s = labels[path[0]]
        for a, b in itertools.pairwise(path):
            pr *= w[b, a]
            s += labels[b]
        probs[s] += pr
    return IntegerDistribution(0, probs)


def sample_walk_sum(chain: LabeledChain, t: int, seed: int, m: int) -> np.ndarray:
    """Histogram of label sums over ``m`` simulated walks, deterministic in ``seed``.

    Returns an int64 array of length t+1 whose entry j counts walks with
    label sum j.
    """
    if t < 1:
        raise InvalidArgumentError(f"walk length t must be >= 1, got {t}")
    if m < 1:
        raise InvalidArgumentError(f"sample count m must be >= 1, got {m}")
    rng = np.random.default_rng(seed)
    n = chain.n
    cum_cols = np.cumsum(chain.matrix, axis=0)
    start_cum = np.cumsum(chain.weights)
    v = np.searchsorted(start_cum, rng.random(m), side="right").clip(0, n - 1)
    sums = chain.labels[v].copy()
    for _ in range(t - 1):
        u = rng.random(m)
        v = (u[None, :] > cum_cols[:, v]).sum(axis=0).clip(0, n - 1)
        sums += chain.labels[v]
    return np.bincount(sums, minlength=t + 1).astype(np.int64)


def near_equal_partition(t: int, parts: int) -> tuple[int, ...]:
    """Split t into ``parts`` consecutive segment lengths differing by at most 1.

    Segment k covers ``floor(k*t/parts) .. floor((k+1)*t/parts) - 1``, which
    also pins the restart positions :meth:`GraphSequence.from_partition` uses.
    """
    if parts < 1 or parts > t:
        raise InvalidArgumentError(f"need 1 <= parts <= t, got parts={parts}, t={t}")
    marks = [(k * t) // parts for k in range(parts + 1)]
    return tuple(marks[k + 1] - marks[k] for k in range(parts))
