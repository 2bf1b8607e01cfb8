"""Saturating two's-complement Q-format arithmetic.

Values are stored as integer raws scaled by 2**-frac_bits.  Two preset I/O
layouts mirror the modeled datapath widths: ``FXP16`` (Q3.12) and ``FXP8``
(Q2.5); ``FXP32`` (Q3.28) is provided for high-precision references.  Derived
layouts (guard-bit engine formats, double-width accumulators) are ordinary
``FxFormat`` instances, so ``word_bits`` is not restricted to the presets.

Policies, applied uniformly:

* quantization from reals rounds half to even (``from_real``),
* right shifts round half away from zero (``shr_round``),
* overflow saturates silently; every op reports it through the sticky
  ``sat`` flag of the returned value instead of raising.

The module-level ``*_raw`` kernels are the vectorized layer: they work on
``numpy.int64`` raw arrays plus a boolean saturation mask and are the single
source of truth.  The scalar ``Fx`` API wraps them over one-element arrays,
so scalar and batched paths are bit-identical by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FxFormat",
    "Fx",
    "FXP8",
    "FXP16",
    "FXP32",
    "FORMATS",
    "from_real",
    "to_real",
    "add_sat",
    "sub_sat",
    "shr_round",
    "mul",
    "convert",
    "quantize_raw",
    "add_raw",
    "sub_raw",
    "shr_round_raw",
    "mul_raw",
    "convert_raw",
]


@dataclass(frozen=True)
class FxFormat:
    """Signed Qm.n layout: ``word_bits`` total, ``frac_bits`` fractional.

    One sign bit, ``word_bits - 1 - frac_bits`` integer bits.  Raw range is
    the full two's-complement span; the most negative code is kept (no
    symmetric clipping).  ``word_bits`` up to 40 keeps every kernel exact in
    int64, including the full-width products used by ``mul`` (<= 32-bit
    operands).
    """

    word_bits: int
    frac_bits: int

    def __post_init__(self) -> None:
        if not 4 <= self.word_bits <= 40:
            raise ValueError(f"word_bits must be in [4, 40], got {self.word_bits}")
        if not 0 < self.frac_bits < self.word_bits:
            raise ValueError(
                f"frac_bits must satisfy 0 < frac_bits < word_bits, got {self.frac_bits}"
            )

    @property
    def int_bits(self) -> int:
        return self.word_bits - 1 - self.frac_bits

    @property
    def name(self) -> str:
        return f"q{self.int_bits}.{self.frac_bits}"

    @property
    def lsb(self) -> float:
        return 2.0 ** -self.frac_bits

    @property
    def min_raw(self) -> int:
        return -(1 << (self.word_bits - 1))

    @property
    def max_raw(self) -> int:
        return (1 << (self.word_bits - 1)) - 1

    @property
    def min_value(self) -> float:
        return self.min_raw * self.lsb

    @property
    def max_value(self) -> float:
        return self.max_raw * self.lsb

    def with_guard(self, int_extra: int = 2, frac_extra: int = 2) -> "FxFormat":
        """Widened engine format: extra integer and fraction guard bits."""
        return FxFormat(self.word_bits + int_extra + frac_extra, self.frac_bits + frac_extra)


FXP16 = FxFormat(16, 12)
FXP8 = FxFormat(8, 5)
FXP32 = FxFormat(32, 28)

# CLI / config lookup
FORMATS = {"fxp8": FXP8, "fxp16": FXP16, "fxp32": FXP32}


@dataclass(frozen=True)
class Fx:
    """One fixed-point value: integer ``raw`` in ``fmt``, sticky ``sat`` flag.

    ``sat`` is true if this value, or anything on the dataflow that produced
    it, saturated.  Ops never raise on overflow; they propagate the flag.
    """

    raw: int
    fmt: FxFormat
    sat: bool = False

    def __post_init__(self) -> None:
        if not self.fmt.min_raw <= self.raw <= self.fmt.max_raw:
            raise ValueError(f"raw {self.raw} outside {self.fmt.name} range")

    @property
    def value(self) -> float:
        return self.raw * self.fmt.lsb


# ---------------------------------------------------------------------------
# vectorized raw kernels

def _clip(raw: np.ndarray, fmt: FxFormat, sat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    clipped = np.clip(raw, fmt.min_raw, fmt.max_raw)
    return clipped, sat | (clipped != raw)


def quantize_raw(x: np.ndarray, fmt: FxFormat) -> tuple[np.ndarray, np.ndarray]:
    """Real array -> (raw, sat).  Round half to even, then saturate."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("quantize requires finite inputs")
    scaled = np.rint(x * float(1 << fmt.frac_bits))
    sat = (scaled < fmt.min_raw) | (scaled > fmt.max_raw)
    raw = np.clip(scaled, fmt.min_raw, fmt.max_raw).astype(np.int64)
    return raw, sat


def add_raw(a: np.ndarray, b, fmt: FxFormat, sat: np.ndarray | bool = False):
    s = a + np.asarray(b, dtype=np.int64)
    return _clip(s, fmt, np.asarray(sat) | False)


def sub_raw(a: np.ndarray, b, fmt: FxFormat, sat: np.ndarray | bool = False):
    s = a - np.asarray(b, dtype=np.int64)
    return _clip(s, fmt, np.asarray(sat) | False)


def shr_round_raw(raw: np.ndarray, shift: int) -> np.ndarray:
    """Arithmetic right shift by ``shift``, rounding half away from zero.

    raw=3,shift=1 -> 2; raw=-3,shift=1 -> -2.  Cannot overflow.
    """
    if shift < 0:
        raise ValueError("shift must be >= 0")
    if shift == 0:
        return np.asarray(raw, dtype=np.int64).copy()
    half = np.int64(1) << (shift - 1)
    mag = (np.abs(raw) + half) >> np.int64(shift)
    return np.where(raw >= 0, mag, -mag)


def mul_raw(a: np.ndarray, b, fmt: FxFormat, sat: np.ndarray | bool = False):
    """Full-width product, rescale by frac_bits (half away), saturate."""
    if fmt.word_bits > 32:
        raise ValueError("mul supports word_bits <= 32")
    p = a * np.asarray(b, dtype=np.int64)
    return _clip(shr_round_raw(p, fmt.frac_bits), fmt, np.asarray(sat) | False)


def convert_raw(raw: np.ndarray, src: FxFormat, dst: FxFormat):
    """Re-layout raws from ``src`` to ``dst``: exact when widening the
    fraction, shr_round when narrowing, saturate to ``dst``."""
    df = dst.frac_bits - src.frac_bits
    if df >= 0:
        shifted = np.asarray(raw, dtype=np.int64) << np.int64(df)
    else:
        shifted = shr_round_raw(raw, -df)
    return _clip(shifted, dst, np.asarray(False))


# ---------------------------------------------------------------------------
# scalar API

def _scalar(kernel_out, fmt: FxFormat, carry_sat: bool = False) -> Fx:
    raw, sat = kernel_out
    return Fx(int(raw[0]), fmt, bool(sat if np.isscalar(sat) else sat.reshape(-1)[0]) or carry_sat)


def from_real(x: float, fmt: FxFormat) -> Fx:
    """Quantize one finite real; ``sat`` set if the value clipped."""
    return _scalar(quantize_raw(np.array([x], dtype=np.float64), fmt), fmt)


def to_real(v: Fx) -> float:
    """Exact value ``raw * 2**-frac_bits`` (word_bits <= 40 fits float64)."""
    return v.value


def _require_same(a: Fx, b: Fx) -> None:
    if a.fmt != b.fmt:
        raise ValueError(f"format mismatch: {a.fmt.name} vs {b.fmt.name}")


def add_sat(a: Fx, b: Fx) -> Fx:
    _require_same(a, b)
    out = add_raw(np.array([a.raw], dtype=np.int64), np.array([b.raw], dtype=np.int64), a.fmt)
    return _scalar(out, a.fmt, a.sat or b.sat)


def sub_sat(a: Fx, b: Fx) -> Fx:
    _require_same(a, b)
    out = sub_raw(np.array([a.raw], dtype=np.int64), np.array([b.raw], dtype=np.int64), a.fmt)
    return _scalar(out, a.fmt, a.sat or b.sat)


def shr_round(a: Fx, shift: int) -> Fx:
    raw = shr_round_raw(np.array([a.raw], dtype=np.int64), shift)
    return Fx(int(raw[0]), a.fmt, a.sat)


def mul(a: Fx, b: Fx) -> Fx:
    _require_same(a, b)
    out = mul_raw(np.array([a.raw], dtype=np.int64), np.array([b.raw], dtype=np.int64), a.fmt)
    return _scalar(out, a.fmt, a.sat or b.sat)


def convert(v: Fx, fmt: FxFormat) -> Fx:
    out = convert_raw(np.array([v.raw], dtype=np.int64), v.fmt, fmt)
    return _scalar(out, fmt, v.sat)
