"""Probabilistic system models: source law, measurement channels, joints.

A :class:`SourceModel` holds a source distribution over X together with the
per-measurement channels seen by the encoder (X-tilde measurements) and the
decoder (Y measurements). Conditioned on X, all measurements are mutually
independent by construction because only per-measurement channels are stored.

Joint tables are flattened row-major with the leftmost variable varying
slowest; :func:`build_joint` orders variables as

    (xt_1, ..., xt_ME, x, y_1, ..., y_MD).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .info_math import PROB_ATOL, JointTable, ProbVector

# A joint may not exceed 2^24 cells; with binary variables that allows
# M_E + M_D + 1 <= 24.
MAX_JOINT_CELLS = 1 << 24

__all__ = [
    "MAX_JOINT_CELLS",
    "SizeGuardError",
    "ModelFormatError",
    "Channel",
    "SourceModel",
    "make_bsc",
    "identity_channel",
    "compose",
    "parallel",
    "inverse_channel",
    "bss_model",
    "build_joint",
    "measurement_joints",
    "vsm_projection",
    "load_model",
]


class SizeGuardError(RuntimeError):
    """A requested joint distribution would exceed the cell-count guard."""


class ModelFormatError(ValueError):
    """A model file violates the JSON schema; the message names the field."""


@dataclass(frozen=True, eq=False)
class Channel:
    """A row-stochastic conditional distribution P(B|A).

    ``matrix`` has shape (in_size, out_size); row a is the distribution of
    the output given input a.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.size == 0:
            raise ValueError("Channel matrix must be 2-D and non-empty")
        if np.any(m < 0):
            raise ValueError("Channel matrix entries must be non-negative")
        rowsums = m.sum(axis=1)
        if np.any(np.abs(rowsums - 1.0) > PROB_ATOL):
            bad = int(np.argmax(np.abs(rowsums - 1.0)))
            raise ValueError(f"Channel row {bad} sums to {rowsums[bad]!r}, not 1")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def in_size(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def out_size(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def rows(self) -> tuple[ProbVector, ...]:
        return tuple(ProbVector(r) for r in self.matrix)


def make_bsc(p: float) -> Channel:
    """Binary symmetric channel with crossover probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"BSC crossover {p!r} outside [0, 1]")
    return Channel(np.array([[1.0 - p, p], [p, 1.0 - p]]))


def identity_channel(n: int) -> Channel:
    if n < 1:
        raise ValueError("identity channel needs at least one letter")
    return Channel(np.eye(n))


def bsc_crossover(ch: Channel) -> float | None:
    """The crossover probability if ``ch`` is a BSC, else None."""
    m = ch.matrix
    if m.shape != (2, 2):
        return None
    p = float(m[0, 1])
    if abs(m[1, 0] - p) > PROB_ATOL:
        return None
    return p


def compose(first: Channel, second: Channel) -> Channel:
    """Serial concatenation: the output of ``first`` feeds ``second``.

    For BSCs this reproduces the star operator: BSC(p) then BSC(q) is
    BSC(star(p, q)).
    """
    if first.out_size != second.in_size:
        raise ValueError(
            f"cannot compose: first.out_size={first.out_size} != "
            f"second.in_size={second.in_size}"
        )
    return Channel(first.matrix @ second.matrix)


def parallel(chs: list[Channel] | tuple[Channel, ...]) -> Channel:
    """Channel from a common input to the product of the output alphabets.

    Outputs are conditionally independent given the input. Product outputs
    are flattened row-major: earlier channels vary slowest.
    """
    chs = tuple(chs)
    if not chs:
        raise ValueError("parallel needs at least one channel")
    n = chs[0].in_size
    if any(ch.in_size != n for ch in chs):
        raise ValueError("parallel channels must share the input alphabet")
    mat = np.ones((n, 1))
    for ch in chs:
        mat = (mat[:, :, None] * ch.matrix[:, None, :]).reshape(n, -1)
    return Channel(mat)


def inverse_channel(prior: ProbVector, ch: Channel) -> tuple[ProbVector, Channel]:
    """Bayes inversion of ``ch`` under ``prior``.

    Returns the output marginal and the posterior channel P(A|B). Rows for
    zero-probability outputs are set to uniform and reported with a warning;
    downstream information terms multiply them by zero mass anyway.
    """
    if len(prior) != ch.in_size:
        raise ValueError(
            f"prior has {len(prior)} letters but channel input has {ch.in_size}"
        )
    joint = prior.weights[:, None] * ch.matrix
    marginal = joint.sum(axis=0)
    post = np.empty((ch.out_size, ch.in_size))
    dead = marginal <= 0.0
    if np.any(dead):
        warnings.warn(
            f"outputs {np.flatnonzero(dead).tolist()} have zero probability; "
            "their posterior rows are set to uniform",
            RuntimeWarning,
            stacklevel=2,
        )
        post[dead] = 1.0 / ch.in_size
    live = ~dead
    post[live] = (joint[:, live] / marginal[live]).T
    return ProbVector(marginal), Channel(post)


@dataclass(frozen=True, eq=False)
class SourceModel:
    """A hidden- or visible-source measurement model.

    ``enc_channels[i]`` is the channel from X to the i-th encoder
    measurement; ``dec_channels[j]`` the channel from X to the j-th decoder
    measurement. ``kind`` records whether the encoder observation is a noisy
    ("hidden") or exact ("visible") view of the source.
    """

    q_x: ProbVector
    enc_channels: tuple[Channel, ...]
    dec_channels: tuple[Channel, ...]
    kind: str = "hidden"

    def __post_init__(self):
        enc = tuple(self.enc_channels)
        dec = tuple(self.dec_channels)
        if not enc or not dec:
            raise ValueError("SourceModel needs at least one channel on each side")
        n = len(self.q_x)
        for label, chans in (("encoder", enc), ("decoder", dec)):
            for i, ch in enumerate(chans):
                if ch.in_size != n:
                    raise ValueError(
                        f"{label} channel {i} has input size {ch.in_size}, "
                        f"source alphabet has {n}"
                    )
        if self.kind not in ("hidden", "visible"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        object.__setattr__(self, "enc_channels", enc)
        object.__setattr__(self, "dec_channels", dec)

    @property
    def m_e(self) -> int:
        return len(self.enc_channels)

    @property
    def m_d(self) -> int:
        return len(self.dec_channels)

    @property
    def enc_alphabet(self) -> int:
        """Size of the product alphabet of all encoder measurements."""
        return math.prod(ch.out_size for ch in self.enc_channels)

    @property
    def dec_alphabet(self) -> int:
        return math.prod(ch.out_size for ch in self.dec_channels)


def bss_model(p_e: float, p_d: float, m_e: int = 1, m_d: int = 1) -> SourceModel:
    """Binary symmetric source with independent BSC measurements.

    ``m_e`` encoder measurements each through BSC(p_e) and ``m_d`` decoder
    measurements each through BSC(p_d).
    """
    if m_e < 1 or m_d < 1:
        raise ValueError("measurement counts must be >= 1")
    return SourceModel(
        q_x=ProbVector(np.array([0.5, 0.5])),
        enc_channels=tuple(make_bsc(p_e) for _ in range(m_e)),
        dec_channels=tuple(make_bsc(p_d) for _ in range(m_d)),
        kind="hidden",
    )


def _joint_array(m: SourceModel) -> np.ndarray:
    """Joint over (xt_1..xt_ME, x, y_1..y_MD) as an ndarray."""
    cells = m.enc_alphabet * len(m.q_x) * m.dec_alphabet
    if cells > MAX_JOINT_CELLS:
        raise SizeGuardError(
            f"joint would need {cells} cells, guard is {MAX_JOINT_CELLS}"
        )
    t = np.asarray(m.q_x.weights)
    for ch in m.dec_channels:
        t = np.einsum("x...,xb->x...b", t, ch.matrix)
    # Group the encoder measurements into one product channel (earlier
    # measurements vary slowest, matching the joint's axis order), then
    # prepend that grouped axis and restore the per-measurement dims.
    enc = parallel(m.enc_channels).matrix
    arr = np.einsum("xa,x...->ax...", enc, t)
    dims = (
        tuple(ch.out_size for ch in m.enc_channels)
        + (len(m.q_x),)
        + tuple(ch.out_size for ch in m.dec_channels)
    )
    return arr.reshape(dims)


def build_joint(m: SourceModel) -> JointTable:
    """The full joint of every measurement and the source.

    Factorizes as prod_i P(xt_i|x) * Q(x) * prod_j P(y_j|x); marginals
    recover the source law and the per-channel output laws.
    """
    arr = _joint_array(m)
    dims = (
        tuple(ch.out_size for ch in m.enc_channels)
        + (len(m.q_x),)
        + tuple(ch.out_size for ch in m.dec_channels)
    )
    return JointTable(dims, arr.ravel())


def measurement_joints(m: SourceModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Grouped pairwise joints used by rate evaluations.

    Returns ``(p_xt, j_xt_x, j_xt_y)`` where the encoder measurements are
    flattened to one alphabet of size ``m.enc_alphabet`` and the decoder
    measurements to one of size ``m.dec_alphabet``.
    """
    arr = _joint_array(m)
    grouped = arr.reshape(m.enc_alphabet, len(m.q_x), m.dec_alphabet)
    j_xt_x = grouped.sum(axis=2)
    j_xt_y = grouped.sum(axis=1)
    return j_xt_x.sum(axis=1), j_xt_x, j_xt_y


def vsm_projection(m: SourceModel) -> SourceModel:
    """The visible-source model an encoder would mistakenly assume.

    The single encoder measurement is treated as the true, noise-free
    source: the new source law is the law of the measurement, the encoder
    channel becomes the identity, and each decoder measurement is modeled
    as a BSC with the serial crossover star(p_e, p_d). For more than one
    decoder measurement this product law differs from the true conditional
    of the decoder measurements given the encoder observation.
    """
    if m.kind != "hidden":
        raise ValueError("vsm_projection expects a hidden model")
    if m.m_e != 1:
        raise ValueError("vsm_projection requires exactly one encoder measurement")
    if len(m.q_x) != 2:
        raise ValueError("vsm_projection requires a binary source")
    p_e = bsc_crossover(m.enc_channels[0])
    if p_e is None:
        raise ValueError("vsm_projection requires a BSC encoder channel")
    dec = []
    for j, ch in enumerate(m.dec_channels):
        p_d = bsc_crossover(ch)
        if p_d is None:
            raise ValueError(f"vsm_projection requires BSC decoder channels (channel {j})")
        dec.append(make_bsc(p_e * (1.0 - p_d) + (1.0 - p_e) * p_d))
    xt_law = ProbVector(m.q_x.weights @ m.enc_channels[0].matrix)
    return SourceModel(
        q_x=xt_law,
        enc_channels=(identity_channel(2),),
        dec_channels=tuple(dec),
        kind="visible",
    )


# --- JSON model files -------------------------------------------------------
#
# Schema:
#   {"q_x": [..], "enc": [<channel>, ..], "dec": [<channel>, ..],
#    "kind": "hidden" | "visible"}
# with <channel> either {"type": "bsc", "p": 0.03}
# or {"type": "matrix", "rows": [[..], ..]}. Unknown fields are rejected.

_TOP_FIELDS = {"q_x", "enc", "dec", "kind"}
_BSC_FIELDS = {"type", "p"}
_MATRIX_FIELDS = {"type", "rows"}


def _parse_channel(spec, where: str) -> Channel:
    if not isinstance(spec, dict):
        raise ModelFormatError(f"{where}: channel must be an object")
    ctype = spec.get("type")
    if ctype == "bsc":
        extra = set(spec) - _BSC_FIELDS
        if extra:
            raise ModelFormatError(f"{where}: unknown field {sorted(extra)[0]!r}")
        if "p" not in spec:
            raise ModelFormatError(f"{where}: missing field 'p'")
        p = spec["p"]
        if not isinstance(p, (int, float)) or isinstance(p, bool) or not 0 <= p <= 1:
            raise ModelFormatError(f"{where}: field 'p' must be a number in [0, 1]")
        return make_bsc(float(p))
    if ctype == "matrix":
        extra = set(spec) - _MATRIX_FIELDS
        if extra:
            raise ModelFormatError(f"{where}: unknown field {sorted(extra)[0]!r}")
        rows = spec.get("rows")
        if not isinstance(rows, list) or not rows:
            raise ModelFormatError(f"{where}: field 'rows' must be a non-empty list")
        try:
            return Channel(np.asarray(rows, dtype=float))
        except ValueError as exc:
            raise ModelFormatError(f"{where}: field 'rows' invalid: {exc}") from exc
    raise ModelFormatError(f"{where}: field 'type' must be 'bsc' or 'matrix'")


def load_model(source: str | Path | dict) -> SourceModel:
    """Build a :class:`SourceModel` from a JSON file path or parsed dict.

    Raises :class:`ModelFormatError` naming the offending field on any
    schema violation.
    """
    if isinstance(source, (str, Path)):
        try:
            data = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"model file is not valid JSON: {exc}") from exc
    else:
        data = source
    if not isinstance(data, dict):
        raise ModelFormatError("model file must contain a JSON object")
    extra = set(data) - _TOP_FIELDS
    if extra:
        raise ModelFormatError(f"unknown field {sorted(extra)[0]!r}")
    missing = _TOP_FIELDS - set(data)
    if missing:
        raise ModelFormatError(f"missing field {sorted(missing)[0]!r}")
    q = data["q_x"]
    if not isinstance(q, list) or not q:
        raise ModelFormatError("field 'q_x' must be a non-empty list of numbers")
    try:
        q_x = ProbVector(np.asarray(q, dtype=float))
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"field 'q_x' invalid: {exc}") from exc
    for side in ("enc", "dec"):
        if not isinstance(data[side], list) or not data[side]:
            raise ModelFormatError(f"field {side!r} must be a non-empty list of channels")
    enc = tuple(
        _parse_channel(spec, f"enc[{i}]") for i, spec in enumerate(data["enc"])
    )
    dec = tuple(
        _parse_channel(spec, f"dec[{i}]") for i, spec in enumerate(data["dec"])
    )
    kind = data["kind"]
    if kind not in ("hidden", "visible"):
        raise ModelFormatError("field 'kind' must be 'hidden' or 'visible'")
    try:
        return SourceModel(q_x=q_x, enc_channels=enc, dec_channels=dec, kind=kind)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc
