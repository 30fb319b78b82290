"""Rate-region evaluation and search for arbitrary finite alphabets.

The achievable triples are unions over auxiliary channels P(U|XT) from the
grouped encoder observation XT to an auxiliary alphabet U of size at most
|X| + 2 (larger alphabets add nothing; requesting one is allowed but
flagged). :func:`evaluate_triple` scores one auxiliary channel exactly;
:func:`pareto_search` traces the frontier by maximizing weighted objectives

    w_s * r_s - w_l * r_l - w_m * r_m

over a grid of weights with a multi-start, projected coordinate-perturbation
search. The search is derivative-free on purpose: the objective mixes
concave and convex mutual-information terms in P(U|XT), so no
alternating-maximization scheme comes with a guarantee here; correctness is
anchored by closed-form cross-checks on binary models, not by optimizer
guarantees. For non-binary models the returned frontier is a lower bound on
the true region boundary.

Determinism: a :class:`SearchConfig` seed fixes every random draw, and the
best start is selected by (objective, start index), so batched and serial
evaluation of the starts produce identical results.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .binary_region import RateTriple
from .info_math import TINY_PROB, _entropy_last_axes
from .models import MAX_JOINT_CELLS, Channel, SizeGuardError, SourceModel, measurement_joints

__all__ = [
    "AuxChannel",
    "SearchConfig",
    "CardinalityEntry",
    "CardinalitySweepReport",
    "default_weight_grid",
    "evaluate_triple",
    "scalarized_optimize",
    "scalarized_sweep",
    "pareto_search",
    "timeshare",
    "cardinality_sweep",
]

# Slack for non-dominance comparisons, to avoid round-off churn.
DOMINANCE_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class AuxChannel:
    """An auxiliary channel P(U|XT) over the grouped encoder alphabet."""

    channel: Channel

    @property
    def card_u(self) -> int:
        return self.channel.out_size

    @property
    def in_size(self) -> int:
        return self.channel.in_size

    @property
    def matrix(self) -> np.ndarray:
        return self.channel.matrix


def _default_schedule() -> tuple[float, ...]:
    return tuple(np.geomspace(0.25, 1e-4, 16))


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the randomized frontier search.

    ``step_schedule`` is stretched uniformly over ``n_refine_iters``
    perturbation rounds; every accepted move must improve the objective by
    more than ``tolerance``.
    """

    n_random_starts: int = 64
    n_refine_iters: int = 200
    step_schedule: tuple[float, ...] = field(default_factory=_default_schedule)
    seed: int = 0
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.n_random_starts < 1 or self.n_refine_iters < 1:
            raise ValueError("SearchConfig counts must be >= 1")
        if not self.step_schedule or any(s <= 0 for s in self.step_schedule):
            raise ValueError("step_schedule must be non-empty and positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        object.__setattr__(self, "step_schedule", tuple(float(s) for s in self.step_schedule))


def _entropy_fsum(arr: np.ndarray) -> float:
    """Entropy with a correctly rounded sum: independent of element order."""
    a = np.asarray(arr, dtype=float).ravel()
    a = a[a > TINY_PROB]
    return -math.fsum((a * np.log2(a)).tolist())


class _Precomp:
    """Cached marginals of a source model for fast rate evaluation."""

    def __init__(self, m: SourceModel):
        self.p_xt, self.j_xt_x, self.j_xt_y = measurement_joints(m)
        self.h_xt = _entropy_fsum(self.p_xt)
        self.h_x = _entropy_fsum(self.j_xt_x.sum(axis=0))
        self.h_y = _entropy_fsum(self.j_xt_y.sum(axis=0))
        self.a_size = self.p_xt.size
        self.x_size = self.j_xt_x.shape[1]
        self.card_default = self.x_size + 2

    def check_aux(self, card_u: int) -> None:
        cells = self.a_size * self.x_size * self.j_xt_y.shape[1] * card_u
        if cells > MAX_JOINT_CELLS:
            raise SizeGuardError(
                f"auxiliary joint would need {cells} cells, guard is {MAX_JOINT_CELLS}"
            )
        if card_u > self.card_default:
            warnings.warn(
                f"auxiliary cardinality {card_u} exceeds the sufficient "
                f"|X| + 2 = {self.card_default}",
                RuntimeWarning,
                stacklevel=3,
            )

    def rates(self, w_batch: np.ndarray, kind: str) -> np.ndarray:
        """Rate triples for a (batch, a_size, card_u) stack of channels.

        Only pairwise joints with U are needed because U depends on the
        rest of the system through XT alone.
        """
        p_u = np.einsum("a,sak->sk", self.p_xt, w_batch)
        j_u_x = np.einsum("sak,ax->skx", w_batch, self.j_xt_x)
        j_u_y = np.einsum("sak,ab->skb", w_batch, self.j_xt_y)
        j_u_xt = w_batch * self.p_xt[None, :, None]
        h_u = _entropy_last_axes(p_u, 1)
        i_u_y = np.maximum(self.h_y + h_u - _entropy_last_axes(j_u_y, 2), 0.0)
        i_u_x = np.maximum(self.h_x + h_u - _entropy_last_axes(j_u_x, 2), 0.0)
        i_u_xt = np.maximum(self.h_xt + h_u - _entropy_last_axes(j_u_xt, 2), 0.0)
        r_s = i_u_y
        r_l = np.maximum(i_u_x - i_u_y, 0.0)
        if kind == "generated":
            r_m = np.maximum(i_u_xt - i_u_y, 0.0)
        else:
            r_m = i_u_xt
        return np.stack([r_s, r_l, r_m], axis=-1)

    def exact_triple(self, w: np.ndarray, kind: str) -> RateTriple:
        """Like :meth:`rates` for one channel, but with order-independent
        (correctly rounded) entropy sums, so relabeling U cannot move the
        result by even an ulp."""
        p_u = self.p_xt @ w
        j_u_x = np.einsum("ak,ax->kx", w, self.j_xt_x)
        j_u_y = np.einsum("ak,ab->kb", w, self.j_xt_y)
        j_u_xt = (w * self.p_xt[:, None]).T
        h_u = _entropy_fsum(p_u)
        i_u_y = max(self.h_y + h_u - _entropy_fsum(j_u_y), 0.0)
        i_u_x = max(self.h_x + h_u - _entropy_fsum(j_u_x), 0.0)
        i_u_xt = max(self.h_xt + h_u - _entropy_fsum(j_u_xt), 0.0)
        r_m = max(i_u_xt - i_u_y, 0.0) if kind == "generated" else i_u_xt
        return RateTriple(i_u_y, max(i_u_x - i_u_y, 0.0), r_m)


def _check_kind(kind: str) -> None:
    if kind not in ("generated", "chosen"):
        raise ValueError(f"unknown kind {kind!r}")


def evaluate_triple(m: SourceModel, u: AuxChannel, kind: str) -> RateTriple:
    """Exact rate triple achieved by one auxiliary channel.

    For the generated-secret model r_m subtracts the key rate; for the
    chosen-secret model the full I(U;XT) must be stored.
    """
    _check_kind(kind)
    pre = _Precomp(m)
    if u.in_size != pre.a_size:
        raise ValueError(
            f"auxiliary channel input {u.in_size} does not match the grouped "
            f"encoder alphabet {pre.a_size}"
        )
    pre.check_aux(u.card_u)
    return pre.exact_triple(u.matrix, kind)


def default_weight_grid() -> tuple[tuple[float, float, float], ...]:
    """The scalarization weights used by the frontier search.

    33 log-spaced leakage weights, 33 log-spaced storage weights, and the
    three axis weights.
    """
    lams = np.geomspace(1e-3, 1e3, 33)
    grid = [(1.0, float(l), 0.0) for l in lams]
    grid += [(1.0, 0.0, float(l)) for l in lams]
    grid += [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]
    return tuple(grid)


def _deterministic_starts(a_size: int, card_u: int) -> np.ndarray:
    """Constant, identity-like, and uniform starting channels."""
    constant = np.zeros((a_size, card_u))
    constant[:, 0] = 1.0
    ident = np.zeros((a_size, card_u))
    ident[np.arange(a_size), np.arange(a_size) % card_u] = 1.0
    uniform = np.full((a_size, card_u), 1.0 / card_u)
    return np.stack([constant, ident, uniform])


def _project_rows(rows: np.ndarray) -> np.ndarray:
    """Clamp negatives to zero and renormalize; dead rows become uniform."""
    rows = np.maximum(rows, 0.0)
    sums = rows.sum(axis=-1, keepdims=True)
    dead = sums[..., 0] <= 0.0
    if np.any(dead):
        rows[dead] = 1.0
        sums = rows.sum(axis=-1, keepdims=True)
    return rows / sums


def _scalarized_impl(
    pre: _Precomp,
    weights: tuple[float, float, float],
    kind: str,
    cfg: SearchConfig,
    card_u: int,
) -> tuple[np.ndarray, RateTriple, float]:
    """Best channel, its rate triple, and the achieved objective."""
    w_vec = np.asarray(weights, dtype=float)
    if np.any(w_vec < 0) or not np.any(w_vec > 0):
        raise ValueError("weights must be non-negative and not all zero")
    obj_vec = np.array([w_vec[0], -w_vec[1], -w_vec[2]])

    rng = np.random.default_rng(cfg.seed)
    starts = _deterministic_starts(pre.a_size, card_u)
    randoms = _project_rows(rng.random((cfg.n_random_starts, pre.a_size, card_u)))
    cur = np.concatenate([starts, randoms], axis=0)
    n_starts = cur.shape[0]

    cur_obj = pre.rates(cur, kind) @ obj_vec
    sched = cfg.step_schedule
    n_sched = len(sched)
    idx = np.arange(n_starts)
    for it in range(cfg.n_refine_iters):
        step = sched[min(it * n_sched // cfg.n_refine_iters, n_sched - 1)]
        rows = rng.integers(0, pre.a_size, size=n_starts)
        cols = rng.integers(0, card_u, size=n_starts)
        signs = rng.integers(0, 2, size=n_starts) * 2.0 - 1.0
        cand = cur.copy()
        cand[idx, rows, cols] += signs * step
        cand[idx, rows, :] = _project_rows(cand[idx, rows, :])
        cand_obj = pre.rates(cand, kind) @ obj_vec
        better = cand_obj > cur_obj + cfg.tolerance
        cur[better] = cand[better]
        cur_obj[better] = cand_obj[better]

    best = int(np.argmax(cur_obj))  # ties resolve to the lowest start index
    return cur[best], pre.exact_triple(cur[best], kind), float(cur_obj[best])


def scalarized_optimize(
    m: SourceModel,
    weights: tuple[float, float, float],
    kind: str,
    cfg: SearchConfig | None = None,
    card_u: int | None = None,
) -> tuple[AuxChannel, RateTriple]:
    """Approximately maximize w_s*r_s - w_l*r_l - w_m*r_m over aux channels.

    Best-effort multi-start search; deterministic given ``cfg.seed``.
    """
    _check_kind(kind)
    cfg = cfg or SearchConfig()
    pre = _Precomp(m)
    card = card_u if card_u is not None else pre.card_default
    if card < 1:
        raise ValueError("card_u must be >= 1")
    pre.check_aux(card)
    rows, triple, _ = _scalarized_impl(pre, weights, kind, cfg, card)
    return AuxChannel(Channel(rows)), triple


def scalarized_sweep(
    m: SourceModel,
    kind: str,
    cfg: SearchConfig | None = None,
    card_u: int | None = None,
) -> list[tuple[tuple[float, float, float], AuxChannel, RateTriple]]:
    """One scalarized optimum per default weight-grid entry, in grid order."""
    _check_kind(kind)
    cfg = cfg or SearchConfig()
    pre = _Precomp(m)
    card = card_u if card_u is not None else pre.card_default
    if card < 1:
        raise ValueError("card_u must be >= 1")
    pre.check_aux(card)
    out = []
    for weights in default_weight_grid():
        rows, triple, _ = _scalarized_impl(pre, weights, kind, cfg, card)
        out.append((weights, AuxChannel(Channel(rows)), triple))
    return out


def _dominates(a: np.ndarray, b: np.ndarray, slack: float) -> bool:
    """True when a is at least as good as b and strictly better somewhere."""
    geq = (
        a[0] >= b[0] - slack and a[1] <= b[1] + slack and a[2] <= b[2] + slack
    )
    strict = a[0] > b[0] + slack or a[1] < b[1] - slack or a[2] < b[2] - slack
    return geq and strict


def _non_dominated(
    entries: list[tuple[AuxChannel, RateTriple]],
) -> list[tuple[AuxChannel, RateTriple]]:
    pts = np.array([t.as_tuple() for _, t in entries])
    keep = []
    seen: list[np.ndarray] = []
    for i in range(len(entries)):
        dominated = any(
            j != i and _dominates(pts[j], pts[i], DOMINANCE_SLACK)
            for j in range(len(entries))
        )
        duplicate = any(np.max(np.abs(pts[i] - s)) <= DOMINANCE_SLACK for s in seen)
        if not dominated and not duplicate:
            keep.append(entries[i])
            seen.append(pts[i])
    return keep


def pareto_search(
    m: SourceModel,
    kind: str,
    cfg: SearchConfig | None = None,
    card_u: int | None = None,
) -> list[tuple[AuxChannel, RateTriple]]:
    """Trace the frontier: scalarized optima over the default weight grid.

    Every scalarization runs the multi-start search (random start channels
    plus constant, identity-like and uniform starts). The constant channel
    is always a candidate, so the all-zero triple is always on the frontier.
    Returns the non-dominated candidates sorted by increasing r_s.
    """
    _check_kind(kind)
    cfg = cfg or SearchConfig()
    pre = _Precomp(m)
    card = card_u if card_u is not None else pre.card_default
    if card < 1:
        raise ValueError("card_u must be >= 1")
    pre.check_aux(card)
    candidates: list[tuple[AuxChannel, RateTriple]] = []
    for weights in default_weight_grid():
        rows, triple, _ = _scalarized_impl(pre, weights, kind, cfg, card)
        candidates.append((AuxChannel(Channel(rows)), triple))
    constant = _deterministic_starts(pre.a_size, card)[0]
    candidates.append((AuxChannel(Channel(constant)), pre.exact_triple(constant, kind)))
    frontier = _non_dominated(candidates)
    frontier.sort(key=lambda e: e[1].r_s)
    return frontier


def timeshare(t1: RateTriple, t2: RateTriple, alpha: float) -> RateTriple:
    """Component-wise convex combination alpha*t1 + (1-alpha)*t2."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha={alpha!r} outside [0, 1]")
    return RateTriple(
        alpha * t1.r_s + (1.0 - alpha) * t2.r_s,
        alpha * t1.r_l + (1.0 - alpha) * t2.r_l,
        alpha * t1.r_m + (1.0 - alpha) * t2.r_m,
    )


@dataclass(frozen=True)
class CardinalityEntry:
    card_u: int
    scalarized_objectives: tuple[float, ...]
    hypervolume_proxy: float
    frontier_size: int


@dataclass(frozen=True)
class CardinalitySweepReport:
    """Per-cardinality scalarization results.

    ``scalarized_objectives`` aligns with :func:`default_weight_grid`; the
    hypervolume proxy is their sum. If the proxy stops improving past
    |X| + 2 the cardinality bound is consistent with the search.
    """

    entries: tuple[CardinalityEntry, ...]

    def improvement(self, card_a: int, card_b: int) -> float:
        """Largest per-scalarization gain going from card_a to card_b."""
        by_card = {e.card_u: e for e in self.entries}
        a, b = by_card[card_a], by_card[card_b]
        return max(
            vb - va
            for va, vb in zip(a.scalarized_objectives, b.scalarized_objectives)
        )


def cardinality_sweep(
    m: SourceModel,
    kind: str,
    max_card: int,
    cfg: SearchConfig | None = None,
) -> CardinalitySweepReport:
    """Run the frontier scalarizations at every cardinality from 2 up."""
    _check_kind(kind)
    cfg = cfg or SearchConfig()
    pre = _Precomp(m)
    if max_card < pre.card_default:
        raise ValueError(
            f"max_card={max_card} below the sufficient cardinality {pre.card_default}"
        )
    weights = default_weight_grid()
    entries = []
    for card in range(2, max_card + 1):
        objs = []
        cands: list[tuple[AuxChannel, RateTriple]] = []
        for w in weights:
            rows, triple, obj = _scalarized_impl(pre, w, kind, cfg, card)
            objs.append(obj)
            cands.append((AuxChannel(Channel(rows)), triple))
        entries.append(
            CardinalityEntry(
                card_u=card,
                scalarized_objectives=tuple(objs),
                hypervolume_proxy=float(sum(objs)),
                frontier_size=len(_non_dominated(cands)),
            )
        )
    return CardinalitySweepReport(entries=tuple(entries))
