"""One-time-pad masking of a chosen key by a generated key.

Keys are abstract indices in [0, |S|); wrapping adds the generated key
modulo the key-space size and unwrapping subtracts the decoder's estimate
of it. When the embedded key is uniform and independent of the pad, the
masked value is exactly uniform, so the stored value reveals nothing about
the embedded key.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["KeySpace", "otp_wrap", "otp_unwrap"]


@dataclass(frozen=True)
class KeySpace:
    """The common index space of the embedded and generated keys."""

    size: int

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ValueError(f"key-space size {self.size!r} must be an integer >= 1")
        object.__setattr__(self, "size", int(self.size))


def _check_index(name: str, value: int, ks: KeySpace) -> int:
    if int(value) != value or not 0 <= value < ks.size:
        raise ValueError(f"{name}={value!r} outside [0, {ks.size})")
    return int(value)


def otp_wrap(s: int, s_gen: int, ks: KeySpace) -> int:
    """Mask the embedded key ``s`` with the generated key ``s_gen``."""
    s = _check_index("s", s, ks)
    s_gen = _check_index("s_gen", s_gen, ks)
    return (s_gen + s) % ks.size


def otp_unwrap(masked: int, s_gen_hat: int, ks: KeySpace) -> int:
    """Recover the embedded key using the decoder's pad estimate.

    Inverse of :func:`otp_wrap` whenever the pad estimate is correct; a
    wrong estimate yields a wrong key with the same probability the pad
    itself is misrecovered.
    """
    masked = _check_index("masked", masked, ks)
    s_gen_hat = _check_index("s_gen_hat", s_gen_hat, ks)
    return (masked - s_gen_hat) % ks.size
