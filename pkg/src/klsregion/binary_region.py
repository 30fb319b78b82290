"""Closed-form rate-region boundaries for a binary symmetric source.

For a uniform binary source measured through independent BSCs, boundary
triples of the generated- and chosen-secret regions are attained by binary
auxiliary variables whose inverse channel to the encoder measurement is a
BSC. The sweep parameter here is that crossover probability ``a`` in
[0, 0.5]: with w = star(p_e, a),

    generated:  r_s = g(0.5) - g(w)
                r_l = 1 - H_b(w) - g(0.5) + g(w)
                r_m = 1 - H_b(a) - g(0.5) + g(w)
    chosen:     same r_s, r_l;  r_m = 1 - H_b(a)

where g(w) = g_mixture(w, m_d, p_d). The visible-model baseline replaces the
source by the encoder measurement and every decoder measurement by a BSC
with crossover star(p_e, p_d), which makes leakage and storage coincide.

At a = 0 the auxiliary variable equals the encoder measurement and the
secret-key rate is maximal (the corner point). Sweeping a to 0.5 contracts
every coordinate to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .info_math import _binary_entropy_arr, _entropy_arr, _g_mixture_arr
from .models import bss_model, measurement_joints

DEFAULT_GRID = 512

# RateTriple coordinates this far below zero are treated as round-off.
_NEG_CLAMP = 1e-9

__all__ = [
    "DEFAULT_GRID",
    "RateTriple",
    "RegionBoundary",
    "ComparisonReport",
    "hsm_generated_boundary",
    "hsm_chosen_boundary",
    "vsm_boundary",
    "corner_point",
    "multi_encoder_corner",
    "compare_regions",
]


@dataclass(frozen=True)
class RateTriple:
    """One (secret-key, privacy-leakage, storage) point, bits/source-symbol."""

    r_s: float
    r_l: float
    r_m: float

    def __post_init__(self):
        for name in ("r_s", "r_l", "r_m"):
            v = float(getattr(self, name))
            if v < -_NEG_CLAMP:
                raise ValueError(f"RateTriple {name}={v!r} is negative beyond round-off")
            object.__setattr__(self, name, max(v, 0.0))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r_s, self.r_l, self.r_m)


@dataclass(frozen=True)
class RegionBoundary:
    """An ordered sweep of boundary triples.

    ``points`` pairs each sweep-parameter value with its triple; parameter
    values are strictly increasing in [0, 0.5] and r_s is non-increasing
    along the sweep (more auxiliary noise cannot help the key rate).
    """

    model_kind: str
    param_name: str
    points: tuple[tuple[float, RateTriple], ...]

    def __post_init__(self):
        if self.model_kind not in ("hsm_generated", "hsm_chosen", "vsm"):
            raise ValueError(f"unknown model_kind {self.model_kind!r}")
        pts = tuple((float(a), t) for a, t in self.points)
        params = [a for a, _ in pts]
        if any(not 0.0 <= a <= 0.5 for a in params):
            raise ValueError("sweep parameters must lie in [0, 0.5]")
        if any(b <= a for a, b in zip(params, params[1:])):
            raise ValueError("sweep parameters must be strictly increasing")
        rss = [t.r_s for _, t in pts]
        if any(b > a + 1e-12 for a, b in zip(rss, rss[1:])):
            raise ValueError("r_s must be non-increasing along the sweep")
        object.__setattr__(self, "points", pts)

    def triples(self) -> np.ndarray:
        """The boundary as an (n, 3) array of (r_s, r_l, r_m) rows."""
        return np.array([t.as_tuple() for _, t in self.points])

    def params(self) -> np.ndarray:
        return np.array([a for a, _ in self.points])


def _check_binary_args(p_e: float, p_d: float, m_d: int, grid: int) -> None:
    if not 0.0 <= p_e <= 0.5:
        raise ValueError(f"p_e={p_e!r} outside [0, 0.5]")
    if not 0.0 <= p_d <= 0.5:
        raise ValueError(f"p_d={p_d!r} outside [0, 0.5]")
    if int(m_d) != m_d or m_d < 1:
        raise ValueError(f"m_d={m_d!r} must be an integer >= 1")
    if int(grid) != grid or grid < 2:
        raise ValueError(f"grid={grid!r} must be an integer >= 2")


def _boundary_arrays(
    p_e: float, p_d: float, m_d: int, grid: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Sweep values and (r_s, r_l, r_m_generated, r_m_chosen) columns."""
    a = np.linspace(0.0, 0.5, int(grid))
    w = p_e * (1.0 - a) + (1.0 - p_e) * a
    g_half = float(_g_mixture_arr(np.asarray([0.5]), int(m_d), p_d)[0])
    g_w = _g_mixture_arr(w, int(m_d), p_d)
    r_s = g_half - g_w
    r_l = 1.0 - _binary_entropy_arr(w) - g_half + g_w
    r_m_chosen = 1.0 - _binary_entropy_arr(a)
    r_m_gen = r_m_chosen - r_s
    return a, r_s, r_l, r_m_gen, r_m_chosen


def _as_boundary(kind: str, a, r_s, r_l, r_m) -> RegionBoundary:
    pts = tuple(
        (float(ai), RateTriple(float(si), float(li), float(mi)))
        for ai, si, li, mi in zip(a, r_s, r_l, r_m)
    )
    return RegionBoundary(model_kind=kind, param_name="aux_crossover", points=pts)


def hsm_generated_boundary(
    p_e: float, p_d: float, m_d: int, grid: int = DEFAULT_GRID
) -> RegionBoundary:
    """Generated-secret boundary of the hidden binary model."""
    _check_binary_args(p_e, p_d, m_d, grid)
    a, r_s, r_l, r_m_gen, _ = _boundary_arrays(p_e, p_d, m_d, grid)
    return _as_boundary("hsm_generated", a, r_s, r_l, r_m_gen)


def hsm_chosen_boundary(
    p_e: float, p_d: float, m_d: int, grid: int = DEFAULT_GRID
) -> RegionBoundary:
    """Chosen-secret boundary: same key and leakage, storage grows by r_s."""
    _check_binary_args(p_e, p_d, m_d, grid)
    a, r_s, r_l, _, r_m_chosen = _boundary_arrays(p_e, p_d, m_d, grid)
    return _as_boundary("hsm_chosen", a, r_s, r_l, r_m_chosen)


def vsm_boundary(
    p_e: float, p_d: float, m_d: int, grid: int = DEFAULT_GRID
) -> RegionBoundary:
    """Boundary of the visible-model baseline; leakage equals storage."""
    _check_binary_args(p_e, p_d, m_d, grid)
    a = np.linspace(0.0, 0.5, int(grid))
    q = p_e * (1.0 - p_d) + (1.0 - p_e) * p_d
    g_half = float(_g_mixture_arr(np.asarray([0.5]), int(m_d), q)[0])
    g_a = _g_mixture_arr(a, int(m_d), q)
    r_s = g_half - g_a
    r_l = 1.0 - _binary_entropy_arr(a) - g_half + g_a
    pts = []
    for ai, si, li in zip(a, r_s, r_l):
        v = float(li)
        pts.append((float(ai), RateTriple(float(si), v, v)))
    return RegionBoundary(model_kind="vsm", param_name="aux_crossover", points=tuple(pts))


def corner_point(boundary: RegionBoundary) -> RateTriple:
    """The boundary triple with maximal secret-key rate.

    Ties break toward the smaller sweep parameter for determinism.
    """
    if not boundary.points:
        raise ValueError("corner_point of an empty boundary")
    best = boundary.points[0][1]
    for _, t in boundary.points[1:]:
        if t.r_s > best.r_s:
            best = t
    return best


def multi_encoder_corner(
    p_e: float, m_e: int, p_d: float, m_d: int, kind: str = "generated"
) -> RateTriple:
    """Maximum-key-rate corner with several encoder measurements.

    The auxiliary variable is the full tuple of encoder measurements, so
    with the grouped alphabets XT and Y:

        r_s = I(XT; Y),  r_l = I(XT; X) - r_s,
        r_m = H(XT) - r_s (generated)  or  H(XT) (chosen),

    all by exact enumeration of the joint.
    """
    if int(m_e) != m_e or m_e < 1:
        raise ValueError(f"m_e={m_e!r} must be an integer >= 1")
    _check_binary_args(p_e, p_d, m_d, grid=2)
    if kind not in ("generated", "chosen"):
        raise ValueError(f"unknown kind {kind!r}")
    model = bss_model(p_e=p_e, p_d=p_d, m_e=int(m_e), m_d=int(m_d))
    p_xt, j_xt_x, j_xt_y = measurement_joints(model)
    h_xt = _entropy_arr(p_xt)
    i_xt_y = h_xt + _entropy_arr(j_xt_y.sum(axis=0)) - _entropy_arr(j_xt_y)
    i_xt_x = h_xt + _entropy_arr(j_xt_x.sum(axis=0)) - _entropy_arr(j_xt_x)
    r_s = max(i_xt_y, 0.0)
    r_m = h_xt - r_s if kind == "generated" else h_xt
    return RateTriple(r_s, i_xt_x - r_s, r_m)


@dataclass(frozen=True)
class ComparisonReport:
    """Signed per-coordinate percentage deltas 100*(a-b)/b.

    Coordinates where b is zero cannot be expressed as a ratio; their delta
    is None and the coordinate name appears in ``undefined``.
    """

    a: RateTriple
    b: RateTriple
    r_s_pct: float | None
    r_l_pct: float | None
    r_m_pct: float | None
    undefined: tuple[str, ...]

    def deltas(self) -> dict[str, float | None]:
        return {"r_s": self.r_s_pct, "r_l": self.r_l_pct, "r_m": self.r_m_pct}


def compare_regions(a: RateTriple, b: RateTriple) -> ComparisonReport:
    """Percentage change of ``a`` relative to the baseline ``b``."""
    pct: dict[str, float | None] = {}
    undefined = []
    for name in ("r_s", "r_l", "r_m"):
        av, bv = getattr(a, name), getattr(b, name)
        if bv == 0.0:
            pct[name] = None
            undefined.append(name)
        else:
            pct[name] = 100.0 * (av - bv) / bv
    return ComparisonReport(
        a=a,
        b=b,
        r_s_pct=pct["r_s"],
        r_l_pct=pct["r_l"],
        r_m_pct=pct["r_m"],
        undefined=tuple(undefined),
    )
