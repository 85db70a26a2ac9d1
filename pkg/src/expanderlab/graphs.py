"""Labeled Markov chains and the expander-style constructions used everywhere else.

Transition matrices are column-stochastic throughout: ``matrix[j, i]`` is the
probability of moving from vertex ``i`` to vertex ``j``, so a distribution
(column vector) evolves as ``matrix @ dist``.  Every chain carries a weight
vector (the start / stationary distribution) and a 0/1 label per vertex.
"""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, NegativeProbabilityError

log = logging.getLogger(__name__)

_ATOL = 1e-12


def _as_matrix(m) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(m, dtype=float))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"transition matrix must be square, got shape {a.shape}")
    return a


def _validate_prob_pair(p) -> tuple[float, float]:
    try:
        p0, p1 = (float(x) for x in p)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"p must be a pair of floats, got {p!r}") from exc
    if not (p0 > 0.0 and p1 > 0.0):
        raise InvalidArgumentError(f"class weights must be strictly positive, got ({p0}, {p1})")
    if abs(p0 + p1 - 1.0) > _ATOL:
        raise InvalidArgumentError(f"class weights must sum to 1, got {p0} + {p1} = {p0 + p1}")
    return p0, p1


@dataclass(frozen=True, eq=False)
class LabeledChain:
    """A column-stochastic transition matrix with vertex weights and 0/1 labels.

    Parameters
    ----------
    matrix : ndarray, shape (n, n)
        Column-stochastic transitions, ``matrix[j, i] = Pr[i -> j]``.
    weights : ndarray, shape (n,)
        Start distribution; must be stationary for ``matrix``.
    labels : ndarray, shape (n,)
        One 0/1 value per vertex.

    Raises
    ------
    InvalidArgumentError
        If any entry is negative or above 1, any column fails to sum to 1
        within 1e-12, the weights are not a stationary distribution, or the
        labels are not 0/1.
    """

    matrix: np.ndarray
    weights: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.matrix)
        n = m.shape[0]
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=float))
        lab = np.asarray(self.labels)
        if w.shape != (n,):
            raise InvalidArgumentError(f"weights shape {w.shape} does not match n={n}")
        if lab.shape != (n,):
            raise InvalidArgumentError(f"labels shape {lab.shape} does not match n={n}")
        if not np.isin(lab, (0, 1)).all():
            raise InvalidArgumentError("labels must be 0 or 1")
        lab = np.ascontiguousarray(lab.astype(np.int64))
        if m.min() < -_ATOL or m.max() > 1.0 + _ATOL:
            raise NegativeProbabilityError(
                f"transition entries must lie in [0, 1]; range is [{m.min()}, {m.max()}]"
            )
        m = np.maximum(m, 0.0)
        colsums = m.sum(axis=0)
        bad = np.abs(colsums - 1.0) > _ATOL
        if bad.any():
            i = int(np.argmax(np.abs(colsums - 1.0)))
            raise InvalidArgumentError(f"column {i} sums to {colsums[i]}, not 1")
        if w.min() < 0.0 or abs(w.sum() - 1.0) > _ATOL:
            raise InvalidArgumentError("weights must be a probability vector")
        drift = np.abs(m @ w - w).max()
        if drift > _ATOL:
            raise InvalidArgumentError(
                f"weights are not stationary for the matrix (max drift {drift:.3e})"
            )
        for a in (m, w, lab):
            a.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def p1(self) -> float:
        """Weight of label-1 vertices under the start distribution."""
        return float(np.dot(self.weights, self.labels))

    @property
    def p0(self) -> float:
        return float(np.dot(self.weights, 1 - self.labels))

    @property
    def is_doubly_stochastic(self) -> bool:
        """True when rows also sum to 1 and the weights are uniform."""
        n = self.n
        rows_ok = np.abs(self.matrix.sum(axis=1) - 1.0).max() <= _ATOL
        uniform = np.abs(self.weights - 1.0 / n).max() <= _ATOL
        return bool(rows_ok and uniform)

    def describe(self) -> str:
        return f"chain(n={self.n}, p1={self.p1:.6g})"


def alternating_labels(n: int) -> np.ndarray:
    """0,1,0,1,... labeling; an exact half split when n is even."""
    return np.arange(n, dtype=np.int64) % 2


def _resolve_labels(n: int, labels) -> np.ndarray:
    if labels is None:
        return alternating_labels(n)
    return np.asarray(labels, dtype=np.int64)


def complete_graph(n: int, labels=None) -> LabeledChain:
    """Uniform chain on n vertices (every column is the uniform distribution)."""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    m = np.full((n, n), 1.0 / n)
    return LabeledChain(m, np.full(n, 1.0 / n), _resolve_labels(n, labels))


def sticky_lambda_range(p) -> tuple[float, float]:
    """Admissible correlation range for a sticky chain with class weights p."""
    p0, p1 = _validate_prob_pair(p)
    return -min(p0 / p1, p1 / p0), 1.0


def sticky_chain(lam: float, p) -> LabeledChain:
    """Two-state chain that stays put with correlation ``lam`` and otherwise resamples from ``p``.

    The transition from class ``b`` to class ``b'`` has probability
    ``(1 - lam) * p[b'] + lam * [b == b']``.  Positive ``lam`` makes the walk
    sticky, negative ``lam`` makes it jumpy; the admissible range is
    ``-min(p0/p1, p1/p0) <= lam <= 1``, outside of which some transition
    probability would be negative.

    Parameters
    ----------
    lam : float
        Stay-put correlation.  Equals the chain's spectral expansion in
        absolute value.
    p : (float, float)
        Strictly positive class weights summing to 1; also the stationary
        distribution.
    """
    p0, p1 = _validate_prob_pair(p)
    lam = float(lam)
    lo, hi = -min(p0 / p1, p1 / p0), 1.0
    if lam < lo - _ATOL or lam > hi + _ATOL:
        raise NegativeProbabilityError(
            f"lam={lam} outside [{lo:.6g}, 1]; some transition probability would be negative"
        )
    w = np.array([p0, p1])
    m = (1.0 - lam) * np.column_stack([w, w]) + lam * np.eye(2)
    if m.min() < 0.0:
        m = np.maximum(m, 0.0)  # boundary lam values can round a hair below zero
    return LabeledChain(m, w, np.array([0, 1], dtype=np.int64))


def sticky_expanded(lam: float, p, n: int, labels_first: bool = True) -> LabeledChain:
    """Doubly stochastic n-vertex version of :func:`sticky_chain`.

    Vertices are split into a label-0 class of size ``n * p[0]`` and a label-1
    class of size ``n * p[1]`` (both must be integers).  Each step moves to a
    uniform vertex of the class a :func:`sticky_chain` step would pick, so the
    label process, and hence the walk's label sum, is identical to the
    two-state chain while the matrix itself is a bona fide regular graph with
    spectral expansion ``|lam|``.
    """
    p0, p1 = _validate_prob_pair(p)
    if n < 2:
        raise InvalidArgumentError(f"n must be >= 2, got {n}")
    n0 = p0 * n
    n1 = p1 * n
    if abs(n0 - round(n0)) > 1e-9 or abs(n1 - round(n1)) > 1e-9:
        raise InvalidArgumentError(f"n*p0={n0} and n*p1={n1} must both be integers")
    n0, n1 = int(round(n0)), int(round(n1))
    if n0 < 1 or n1 < 1:
        raise InvalidArgumentError("each label class needs at least one vertex")
    lam = float(lam)
    lo = -min(p0 / p1, p1 / p0)
    if lam < lo - _ATOL or lam > 1.0 + _ATOL:
        raise NegativeProbabilityError(
            f"lam={lam} outside [{lo:.6g}, 1]; some transition probability would be negative"
        )
    labels = np.array([0] * n0 + [1] * n1, dtype=np.int64)
    if not labels_first:
        labels = labels[::-1].copy()
    same = np.equal.outer(labels, labels).astype(float)
    class_size = np.where(labels == 1, n1, n0).astype(float)
    # column i: (1-lam) * uniform on V, plus lam * uniform on i's own class
    m = (1.0 - lam) / n + lam * same / class_size[None, :]
    m = np.maximum(m, 0.0)
    return LabeledChain(m, np.full(n, 1.0 / n), labels)


def random_permutation(n: int, seed: int) -> np.ndarray:
    """Uniform permutation of range(n), deterministic in the seed."""
    return np.random.default_rng(seed).permutation(n).astype(np.int64)


def mix_with_permutation(mu: float, perm, labels=None) -> LabeledChain:
    """Convex mix ``(1 - mu) * J + mu * P`` of the uniform chain with a permutation.

    ``perm`` is a 0-based array mapping vertex ``i`` to ``perm[i]``.  The
    result is doubly stochastic with spectral expansion exactly ``mu``
    whenever the permutation moves anything off the diagonal projector.
    """
    perm = np.asarray(perm, dtype=np.int64)
    n = perm.shape[0]
    if n < 1 or perm.ndim != 1 or not np.array_equal(np.sort(perm), np.arange(n)):
        raise InvalidArgumentError("perm must be a permutation of range(n) as a 0-based array")
    mu = float(mu)
    if not (0.0 <= mu <= 1.0):
        raise InvalidArgumentError(f"mu must lie in [0, 1], got {mu}")
    m = np.full((n, n), (1.0 - mu) / n)
    m[perm, np.arange(n)] += mu
    return LabeledChain(m, np.full(n, 1.0 / n), _resolve_labels(n, labels))


def cycle_shift(n: int) -> np.ndarray:
    """The n-cycle permutation i -> i+1 mod n."""
    return (np.arange(n, dtype=np.int64) + 1) % n


def random_regular(n: int, d: int, seed: int, labels=None) -> LabeledChain:
    """Random d-regular graph on n vertices via the configuration model.

    Pairs up ``n * d`` half-edges uniformly at random and retries up to 100
    times for a simple graph.  If every attempt has a self-loop or repeated
    edge the last multigraph is accepted with a logged warning (a self-loop
    contributes 2 to its endpoint's degree, so ``matrix = A / d`` stays doubly
    stochastic either way).  Deterministic in the seed.
    """
    if n < 2 or d < 1:
        raise InvalidArgumentError(f"need n >= 2 and d >= 1, got n={n}, d={d}")
    if (n * d) % 2 != 0:
        raise InvalidArgumentError(f"n*d must be even to form a d-regular graph, got {n}*{d}")
    rng = np.random.default_rng(seed)
    adj = None
    for attempt in range(100):
        stubs = np.repeat(np.arange(n), d)
        rng.shuffle(stubs)
        a = np.zeros((n, n), dtype=np.int64)
        u, v = stubs[0::2], stubs[1::2]
        np.add.at(a, (u, v), 1)
        np.add.at(a, (v, u), 1)
        simple = (np.diag(a) == 0).all() and (a <= 1).all()
        adj = a
        if simple:
            break
    else:
        log.warning("random_regular(n=%d, d=%d, seed=%d): no simple graph in 100 tries, "
                    "keeping a multigraph", n, d, seed)
    m = adj.astype(float) / d
    return LabeledChain(m, np.full(n, 1.0 / n), _resolve_labels(n, labels))


def restart_matrix(chain: LabeledChain) -> np.ndarray:
    """One independent-restart step: every column equals the weight vector.

    For a doubly stochastic chain this is the uniform matrix J; for a
    collapsed two-state chain it resamples the class from its weights, which
    is what a uniform step on the expanded graph looks like after collapsing.
    """
    n = chain.n
    return np.tile(chain.weights.reshape(n, 1), (1, n))


def operator_norm(matrix) -> float:
    """Largest singular value."""
    return float(np.linalg.svd(np.asarray(matrix, dtype=float), compute_uv=False)[0])


def spectral_expansion(chain: LabeledChain, *, dense_cutoff: int = 512,
                       tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """Operator norm of the chain restricted to the orthocomplement of constants.

    For a doubly stochastic matrix this is the largest singular value of
    ``matrix - J`` (computed by dense SVD up to ``dense_cutoff`` vertices and
    by power iteration on the Gram matrix above it).  A two-state stationary
    chain is always a sticky chain in disguise, and its expansion is
    ``|trace - 1|`` exactly; that formula is used there since such chains are
    generally not doubly stochastic.

    Raises
    ------
    InvalidArgumentError
        If the chain is neither doubly stochastic nor two-state.
    """
    n = chain.n
    if chain.is_doubly_stochastic:
        a = chain.matrix - 1.0 / n
        if n <= dense_cutoff:
            return float(np.linalg.svd(a, compute_uv=False)[0])
        gram = a.T @ a
        v = np.cos(np.arange(n) + 0.5)
        v /= np.linalg.norm(v)
        prev = 0.0
        for _ in range(max_iter):
            w = gram @ v
            norm = np.linalg.norm(w)
            if norm == 0.0:
                return 0.0
            v = w / norm
            cur = float(v @ (gram @ v))
            if abs(cur - prev) <= tol * max(cur, 1.0):
                return math.sqrt(max(cur, 0.0))
            prev = cur
        return math.sqrt(max(prev, 0.0))
    if n == 2:
        return abs(float(chain.matrix[0, 0] + chain.matrix[1, 1] - 1.0))
    raise InvalidArgumentError(
        "spectral expansion is defined here only for doubly stochastic chains "
        "or two-state stationary chains"
    )


@dataclass(frozen=True, eq=False)
class GraphSequence:
    """A time-inhomogeneous walk: t-1 transition matrices on shared weights and labels.

    Step ``i`` (1-based) moves the walk from its (i-1)-th vertex to its i-th
    vertex, so a sequence with ``k`` matrices describes walks over ``k + 1``
    vertices.  Every step must be column-stochastic and preserve the shared
    weight vector.
    """

    steps: tuple
    weights: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        steps = tuple(np.ascontiguousarray(np.asarray(s, dtype=float)) for s in self.steps)
        if not steps:
            raise InvalidArgumentError("a GraphSequence needs at least one step")
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=float))
        lab = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
        n = w.shape[0]
        if lab.shape != (n,) or not np.isin(lab, (0, 1)).all():
            raise InvalidArgumentError("labels must be a 0/1 vector matching the weights")
        if w.min() < 0.0 or abs(w.sum() - 1.0) > _ATOL:
            raise InvalidArgumentError("weights must be a probability vector")
        for i, s in enumerate(steps):
            if s.shape != (n, n):
                raise InvalidArgumentError(f"step {i + 1} has shape {s.shape}, expected ({n}, {n})")
            if s.min() < -_ATOL:
                raise NegativeProbabilityError(f"step {i + 1} has a negative entry")
            if np.abs(s.sum(axis=0) - 1.0).max() > _ATOL:
                raise InvalidArgumentError(f"step {i + 1} is not column-stochastic")
            if np.abs(s @ w - w).max() > _ATOL:
                raise InvalidArgumentError(f"step {i + 1} does not preserve the weights")
        for a in (w, lab):
            a.setflags(write=False)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "labels", lab)

    @property
    def t(self) -> int:
        """Number of vertices a walk over this sequence visits."""
        return len(self.steps) + 1

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def p1(self) -> float:
        return float(np.dot(self.weights, self.labels))

    @classmethod
    def constant(cls, chain: LabeledChain, t: int) -> "GraphSequence":
        """The homogeneous sequence: t-1 copies of the chain's matrix."""
        if t < 2:
            raise InvalidArgumentError(f"a sequence needs t >= 2, got t={t}")
        return cls((chain.matrix,) * (t - 1), chain.weights, chain.labels)

    @classmethod
    def from_partition(cls, chain: LabeledChain, parts: Sequence[int]) -> "GraphSequence":
        """Constant sequence with restart steps between consecutive parts.

        ``parts`` are positive segment lengths summing to t; the transition
        entering each new segment is replaced by :func:`restart_matrix`, which
        makes the label sums of the segments independent.
        """
        parts = [int(x) for x in parts]
        if not parts or any(x < 1 for x in parts):
            raise InvalidArgumentError(f"parts must be positive integers, got {parts}")
        t = sum(parts)
        if t < 2:
            raise InvalidArgumentError("partition must cover at least two vertices")
        steps = [chain.matrix] * (t - 1)
        restart = restart_matrix(chain)
        pos = 0
        for size in parts[:-1]:
            pos += size
            steps[pos - 1] = restart
        return cls(tuple(steps), chain.weights, chain.labels)

    def replace_step(self, u: int, matrix) -> "GraphSequence":
        """Copy of the sequence with 1-based step ``u`` swapped for ``matrix``."""
        if not 1 <= u <= len(self.steps):
            raise InvalidArgumentError(f"step index u={u} outside 1..{len(self.steps)}")
        steps = list(self.steps)
        steps[u - 1] = np.asarray(matrix, dtype=float)
        return GraphSequence(tuple(steps), self.weights, self.labels)


# ---------------------------------------------------------------------------
# JSON graph files.  The matrix is stored column-major: element k of the
# "matrix" list is column k, i.e. the outgoing distribution of vertex k.

def chain_to_json_dict(chain: LabeledChain) -> dict:
    return {
        "n": chain.n,
        "matrix": [list(map(float, chain.matrix[:, i])) for i in range(chain.n)],
        "weights": [float(x) for x in chain.weights],
        "labels": [int(x) for x in chain.labels],
    }


def chain_from_json_dict(data: dict) -> LabeledChain:
    try:
        n = int(data["n"])
        cols = data["matrix"]
        weights = data["weights"]
        labels = data["labels"]
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"graph JSON must have keys n, matrix, weights, labels: {exc}")
    if len(cols) != n:
        raise InvalidArgumentError(f"matrix has {len(cols)} columns, expected n={n}")
    m = np.array(cols, dtype=float).T
    return LabeledChain(m, np.asarray(weights, dtype=float), np.asarray(labels))


def load_chain(path) -> LabeledChain:
    with open(path, "r", encoding="utf-8") as fh:
        return chain_from_json_dict(json.load(fh))


def save_chain(chain: LabeledChain, path) -> None:
    text = json.dumps(chain_to_json_dict(chain), indent=2, sort_keys=True) + "\n"
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".chain-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
