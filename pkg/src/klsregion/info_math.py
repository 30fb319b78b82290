"""Scalar and vector information-theoretic primitives.

All entropies and rates are in bits (log base 2). The conventions used
throughout the package live here:

- ``0 * log2(0) = 0`` everywhere; probabilities below ``TINY_PROB`` are
  treated as exact zeros so logs never underflow.
- Distributions must be normalized to 1 within ``PROB_ATOL``.
- The mixture-entropy function ``g_mixture`` gives the output entropy of
  ``m`` independent symmetric binary measurements of a Bernoulli(w) bit,
  computed per Hamming-weight class instead of over all 2^m outcomes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Normalization tolerance for probability vectors and joint tables.
PROB_ATOL = 1e-12
# Mass below this is treated as exactly zero inside logarithms.
TINY_PROB = 1e-300

__all__ = [
    "PROB_ATOL",
    "ProbVector",
    "JointTable",
    "binary_entropy",
    "inv_binary_entropy",
    "star",
    "entropy",
    "mutual_information",
    "g_mixture",
]


def _xlog2x(p: np.ndarray) -> np.ndarray:
    """Elementwise p*log2(p) with 0*log2(0) = 0. Assumes p >= 0."""
    out = np.zeros_like(p, dtype=float)
    mask = p > TINY_PROB
    out[mask] = p[mask] * np.log2(p[mask])
    return out


def _entropy_arr(p: np.ndarray) -> float:
    return float(-_xlog2x(np.asarray(p, dtype=float)).sum())


def _entropy_last_axes(p: np.ndarray, ndim: int) -> np.ndarray:
    """Entropy over the trailing ``ndim`` axes of a batch of distributions."""
    axes = tuple(range(p.ndim - ndim, p.ndim))
    return -_xlog2x(p).sum(axis=axes)


@dataclass(frozen=True, eq=False)
class ProbVector:
    """A finite probability distribution.

    ``weights`` must be non-negative and sum to 1 within ``PROB_ATOL``.
    ``labels``, when given, name the outcomes and must match in length.
    """

    weights: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("ProbVector weights must be a non-empty 1-D array")
        if np.any(w < 0):
            raise ValueError("ProbVector weights must be non-negative")
        if abs(w.sum() - 1.0) > PROB_ATOL:
            raise ValueError(f"ProbVector weights sum to {w.sum()!r}, not 1")
        if self.labels is not None and len(self.labels) != w.size:
            raise ValueError("labels length does not match weights length")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    def __len__(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True, eq=False)
class JointTable:
    """A joint distribution over a product alphabet.

    ``probs`` is the row-major flattening of the joint array: the leftmost
    variable varies slowest. ``dims`` gives the per-variable alphabet sizes
    and their product must equal ``len(probs)``.
    """

    dims: tuple[int, ...]
    probs: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError("JointTable dims must be positive")
        p = np.asarray(self.probs, dtype=float).ravel()
        if p.size != math.prod(dims):
            raise ValueError(
                f"JointTable has {p.size} cells but dims {dims} imply {math.prod(dims)}"
            )
        if np.any(p < 0):
            raise ValueError("JointTable probabilities must be non-negative")
        if abs(p.sum() - 1.0) > PROB_ATOL:
            raise ValueError(f"JointTable probabilities sum to {p.sum()!r}, not 1")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "probs", p)

    def array(self) -> np.ndarray:
        """The joint as a read-only ndarray of shape ``dims``."""
        return self.probs.reshape(self.dims)

    def marginal(self, axes: int | tuple[int, ...]) -> "JointTable":
        """Marginal joint over ``axes`` (all other variables summed out)."""
        keep = (axes,) if isinstance(axes, int) else tuple(axes)
        if any(a < 0 or a >= len(self.dims) for a in keep):
            raise ValueError(f"axes {keep} out of range for dims {self.dims}")
        if len(set(keep)) != len(keep) or list(keep) != sorted(keep):
            raise ValueError("axes must be strictly increasing and unique")
        drop = tuple(i for i in range(len(self.dims)) if i not in keep)
        arr = self.array().sum(axis=drop) if drop else self.array()
        return JointTable(tuple(self.dims[a] for a in keep), arr.ravel())

    def marginal_vector(self, axis: int) -> ProbVector:
        return ProbVector(self.marginal(axis).probs)


def binary_entropy(x: float) -> float:
    """Binary entropy H_b(x) in bits, with H_b(0) = H_b(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy argument {x!r} outside [0, 1]")
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x))


def _binary_entropy_arr(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return (-_xlog2x(x) - _xlog2x(1.0 - x)).astype(float)


def inv_binary_entropy(v: float) -> float:
    """The x in [0, 0.5] with H_b(x) = v, by bracketed bisection.

    Monotone in v; absolute tolerance 1e-12 in x. Bisection is preferred to
    Newton steps because H_b' vanishes at x = 0.5, i.e. near v = 1.
    """
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"inv_binary_entropy argument {v!r} outside [0, 1]")
    if v == 0.0:
        return 0.0
    if v == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < v:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def star(p: float, x: float) -> float:
    """Crossover probability of two cascaded symmetric binary channels.

    star(p, x) = p(1-x) + (1-p)x. Commutative, with identity 0 and
    absorbing point 0.5.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"star argument p={p!r} outside [0, 1]")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"star argument x={x!r} outside [0, 1]")
    return float(p * (1.0 - x) + (1.0 - p) * x)


def entropy(d: ProbVector) -> float:
    """Shannon entropy of a distribution in bits, zero terms skipped."""
    return _entropy_arr(d.weights)


def mutual_information(j: JointTable) -> float:
    """I(A;B) of a 2-D joint table, clamped to 0 when round-off dips tiny negative."""
    if len(j.dims) != 2:
        raise ValueError(f"mutual_information needs a 2-D joint, got dims {j.dims}")
    arr = j.array()
    mi = (
        _entropy_arr(arr.sum(axis=1))
        + _entropy_arr(arr.sum(axis=0))
        - _entropy_arr(arr)
    )
    if mi < 0.0:
        if mi < -PROB_ATOL:
            raise ArithmeticError(f"mutual information {mi!r} below round-off floor")
        mi = 0.0
    return mi


def _g_mixture_arr(w: np.ndarray, m: int, p_d: float) -> np.ndarray:
    """Vectorized g over an array of w values; no domain checks."""
    w = np.asarray(w, dtype=float)
    k = np.arange(m + 1)
    comb = np.array([math.comb(m, int(i)) for i in k], dtype=float)
    q = (1.0 - w)[..., None] * p_d**k * (1.0 - p_d) ** (m - k) + w[..., None] * p_d ** (
        m - k
    ) * (1.0 - p_d) ** k
    return -(comb * _xlog2x(q)).sum(axis=-1)


def g_mixture(w: float, m: int, p_d: float) -> float:
    """Entropy of m independent symmetric measurements of a Bernoulli(w) bit.

    Each measurement flips the bit independently with probability p_d. All
    2^m outcome sequences of the same Hamming weight k share the probability

        q_k = (1-w) p_d^k (1-p_d)^(m-k) + w p_d^(m-k) (1-p_d)^k,

    so the entropy is -sum_k C(m,k) q_k log2(q_k). Agrees with direct
    enumeration over all 2^m outcomes.
    """
    if not 0.0 <= w <= 0.5:
        raise ValueError(f"g_mixture argument w={w!r} outside [0, 0.5]")
    if int(m) != m or m < 1:
        raise ValueError(f"g_mixture measurement count m={m!r} must be an integer >= 1")
    if not 0.0 <= p_d <= 0.5:
        raise ValueError(f"g_mixture argument p_d={p_d!r} outside [0, 0.5]")
    return float(_g_mixture_arr(np.asarray([w]), int(m), p_d)[0])
