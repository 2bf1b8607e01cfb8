"""MAC + activation processing element with a deterministic cycle model.

The MAC is one linear-rotation pass (x0 = w, y0 = acc, z0 = x drives
y -> acc + w * x), accumulated in a double-width layout (2x word, 2x
fraction) so products keep full precision until the final narrowing.
``neuron`` is literally a fold of ``mac`` followed by ``apply``; the batch
``layer`` runs the same kernels over lane arrays, so scalar and batched
results are bit-identical.

Accuracy note: the 0..N-1 linear schedule sums to 2 - 2**(1-N), so the MAC
is exact-to-rounding for |x| below that; operands are expected in the
normalized convention (inputs in [-1, 1], see the activation domain).

Cycle model (canonical path: normalized arguments, k = 0 exponent
reduction, SELU exponential branch), n = n_iters, L = vector length.
Engine passes and multiplier uses each occupy n cycles; the constant
terms are the per-kind adder/shift/mux/FIFO steps:

    kind      engine passes        af_cycles     shift+add pairs
    relu      none (buffer)        1             0
    tanh      HR + LV              2n            3n
    sigmoid   HR + LV              2n + 3        3n
    swish     HR + LV + 1 mul      3n + 3        3n
    gelu      HR + LV + 5 mul      7n + 3        3n
    selu      HR + 1 mul           2n + 1        2n
    softmax   (HR + LV) per elem   L * (2n + 4)  L * 3n
    mac       LR per element       L * n         L * n

A hyperbolic/circular pass costs two shift-add pairs per iteration (x and
y lanes), a linear pass one (y lane); multiplier uses execute no pairs.  ``total`` is mac + af for the iterative strategy and
max(stage depths) for the pipelined one (initiation-interval view).
Reported ``shift_add_ops`` equals the instrumented count from
``cordic.count_ops`` on the same canonical path.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .activation import (
    AfConfig,
    AfKind,
    _clamp_dom,
    apply,
    clamp_domain,
    eval_raw,
    softmax_raw,
)
from .cordic import CordicMode, Drive, LR_RANGE, run_raw
from .fixedpoint import FORMATS, Fx, FxFormat, convert, convert_raw, from_real, quantize_raw

__all__ = [
    "ExecStrategy",
    "NeuricConfig",
    "CycleReport",
    "acc_format",
    "mac",
    "neuron",
    "layer",
    "cycles",
    "run_batch",
    "run_batch_file",
]


class ExecStrategy(enum.Enum):
    ITERATIVE = "iterative"
    PIPELINED = "pipelined"


def acc_format(fmt: FxFormat) -> FxFormat:
    """Double-width MAC accumulator layout (Q3.12 -> Q7.24, Q2.5 -> Q5.10)."""
    return FxFormat(2 * fmt.word_bits, 2 * fmt.frac_bits)


@dataclass(frozen=True)
class NeuricConfig:
    """Processing-element configuration: I/O format (8- or 16-bit preset
    widths), activation config on the same format, execution strategy."""

    fmt: FxFormat
    af: AfConfig
    strategy: ExecStrategy = ExecStrategy.ITERATIVE
    n_iters: int | None = None

    def __post_init__(self) -> None:
        if self.fmt.word_bits not in (8, 16):
            raise ValueError("PE formats are 8- or 16-bit words")
        if self.af.fmt != self.fmt:
            raise ValueError("activation config format must match PE format")
        if self.n_iters is None:
            object.__setattr__(self, "n_iters", self.af.n_iters)
        if self.n_iters != self.af.n_iters:
            raise ValueError("n_iters must agree with the activation config")


@dataclass(frozen=True)
class CycleReport:
    mac_cycles: int
    af_cycles: int
    total: int
    shift_add_ops: int


# (hyperbolic/circular passes, linear passes, multiplier uses, fixed overhead)
_AF_COSTS = {
    AfKind.RELU: (0, 0, 0, 1),
    AfKind.TANH: (1, 1, 0, 0),
    AfKind.SIGMOID: (1, 1, 0, 3),
    AfKind.SWISH: (1, 1, 1, 3),
    AfKind.GELU: (1, 1, 5, 3),
    AfKind.SELU: (1, 0, 1, 1),
    AfKind.SOFTMAX: (1, 1, 0, 4),
}


def cycles(cfg: NeuricConfig, vector_len: int) -> CycleReport:
    """Deterministic cycle/operation model for one MAC fold of
    ``vector_len`` products plus one activation on the result."""
    if vector_len < 1:
        raise ValueError("vector_len must be >= 1")
    n, length = cfg.n_iters, vector_len
    hr, lv, muls, fixed = _AF_COSTS[cfg.af.kind]
    per_elem = cfg.af.kind is AfKind.SOFTMAX
    scale = length if per_elem else 1
    mac_cycles = length * n
    af_cycles = scale * ((hr + lv + muls) * n + fixed)
    af_sa = scale * (2 * hr + lv) * n
    if cfg.strategy is ExecStrategy.ITERATIVE:
        total = mac_cycles + af_cycles
    else:
        total = max(mac_cycles, af_cycles)
    return CycleReport(mac_cycles, af_cycles, total, mac_cycles + af_sa)


# ---------------------------------------------------------------------------
# arithmetic

def _mac_raw(acc, x, w, io_fmt: FxFormat, acc_fmt: FxFormat, n: int, sat=False):
    """acc + w * x over raw lanes; acc in ``acc_fmt``, x/w in ``io_fmt``."""
    g = acc_fmt.frac_bits - io_fmt.frac_bits
    wq = np.asarray(w, dtype=np.int64) << g
    zq = np.asarray(x, dtype=np.int64) << g
    # clamp z0 to the published linear-rotation bound
    zmax = min(int(np.rint(LR_RANGE * (1 << acc_fmt.frac_bits))), acc_fmt.max_raw)
    zq = np.clip(zq, -zmax, zmax)
    ifmt = acc_fmt.with_guard()
    gg = ifmt.frac_bits - acc_fmt.frac_bits
    sat = np.broadcast_to(np.asarray(sat, dtype=bool),
                          np.broadcast(np.asarray(acc), zq).shape)
    _, yw, _, sat = run_raw((wq << gg), np.asarray(acc, dtype=np.int64) << gg,
                            zq << gg, sat, CordicMode.LINEAR, Drive.ROTATION, ifmt, n)
    out, s1 = convert_raw(yw, ifmt, acc_fmt)
    return out, sat | s1


def mac(acc: Fx, x: Fx, w: Fx, cfg: NeuricConfig) -> Fx:
    """One multiply-accumulate step.  ``x`` and ``w`` are I/O-format values;
    ``acc`` may be in the I/O format or the double-width accumulator format,
    and the result stays in ``acc``'s format."""
    if x.fmt != cfg.fmt or w.fmt != cfg.fmt:
        raise ValueError("x and w must be in the PE I/O format")
    if acc.fmt not in (cfg.fmt, acc_format(cfg.fmt)):
        raise ValueError("acc must be in the I/O or accumulator format")
    raw, sat = _mac_raw(np.array([acc.raw], dtype=np.int64),
                        np.array([x.raw], dtype=np.int64),
                        np.array([w.raw], dtype=np.int64),
                        cfg.fmt, acc.fmt, cfg.n_iters)
    return Fx(int(raw[0]), acc.fmt, bool(sat[0]) or acc.sat or x.sat or w.sat)


def neuron(inputs: list[Fx], weights: list[Fx], bias: Fx, cfg: NeuricConfig) -> Fx:
    """Fold of ``mac`` over the input/weight pairs starting from the bias,
    narrowed to the I/O format, clamped to the activation domain, then one
    ``apply`` of the configured activation."""
    if len(inputs) != len(weights) or not inputs:
        raise ValueError("inputs and weights must be equal-length and nonempty")
    if bias.fmt != cfg.fmt:
        raise ValueError("bias must be in the PE I/O format")
    acc = convert(bias, acc_format(cfg.fmt))
    for x, w in zip(inputs, weights):
        acc = mac(acc, x, w, cfg)
    out = clamp_domain(convert(acc, cfg.fmt), cfg.af)
    return apply(cfg.af, [out])[0]


def layer(x, weights, biases, cfg: NeuricConfig):
    """Batched dense layer: real-valued arrays in, real-valued array out.

    ``x`` is (batch, in_dim), ``weights`` (units, in_dim), ``biases``
    (units,).  Each unit runs the same fold as ``neuron`` over raw lane
    arrays; softmax applies across units per batch row.  Returns
    (outputs (batch, units), sat_events) where sat_events counts output
    lanes whose sticky saturation flag is set.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    weights = np.atleast_2d(np.asarray(weights, dtype=np.float64))
    biases = np.asarray(biases, dtype=np.float64)
    if weights.shape[1] != x.shape[1] or biases.shape != (weights.shape[0],):
        raise ValueError("shape mismatch between x, weights, biases")
    io, afmt, n = cfg.fmt, acc_format(cfg.fmt), cfg.n_iters
    xq, sx = quantize_raw(x, io)
    wq, sw = quantize_raw(weights, io)
    bq, sb = quantize_raw(biases, io)
    batch, units = x.shape[0], weights.shape[0]
    acc = np.empty((batch, units), dtype=np.int64)
    sat = np.empty((batch, units), dtype=bool)
    g = afmt.frac_bits - io.frac_bits
    for u in range(units):
        a = np.full(batch, int(bq[u]) << g, dtype=np.int64)
        s = sx.any(axis=1) | sw[u].any() | sb[u]
        for l in range(x.shape[1]):
            a, s = _mac_raw(a, xq[:, l], np.full(batch, wq[u, l], dtype=np.int64),
                            io, afmt, n, sat=s)
        acc[:, u] = a
        sat[:, u] = s
    narrowed, s1 = convert_raw(acc, afmt, io)
    sat |= s1
    narrowed = _clamp_dom(narrowed, cfg.af)
    if cfg.af.kind is AfKind.SOFTMAX:
        out, sat = softmax_raw(narrowed, sat, cfg.af)
    else:
        out, sat = eval_raw(cfg.af.kind, narrowed.ravel(), sat.ravel(), cfg.af)
        out = out.reshape(batch, units)
        sat = sat.reshape(batch, units)
    return out * io.lsb, int(sat.sum())


# ---------------------------------------------------------------------------
# batch file interface

def run_batch(payload: dict) -> dict:
    """Evaluate independent neuron rows described by a JSON-style dict:

        {"config": {"format": "fxp16", "af": "tanh", ...},
         "inputs": [[...], ...], "weights": [[...], ...], "bias": [...]}

    Optional config keys: n_iters, strategy, max_norm.  Returns
    {"schema": 1, "outputs": [...], "cycles": {...}, "sat_events": N} with
    cycle counts summed over rows and sat_events counting saturated rows.
    """
    conf = payload.get("config", {})
    fmt = FORMATS[conf.get("format", "fxp16")]
    kind = AfKind(conf.get("af", "tanh"))
    af = AfConfig(kind, fmt, n_iters=conf.get("n_iters"),
                  max_norm=conf.get("max_norm", 5.5))
    cfg = NeuricConfig(fmt, af, ExecStrategy(conf.get("strategy", "iterative")))
    rows = payload["inputs"]
    weights = payload["weights"]
    bias = payload["bias"]
    if not (len(rows) == len(weights) == len(bias)):
        raise ValueError("inputs, weights, bias must have matching row counts")
    outputs: list[float] = []
    sat_events = 0
    totals = {"mac_cycles": 0, "af_cycles": 0, "total": 0, "shift_add_ops": 0}
    for xs, ws, b in zip(rows, weights, bias):
        if len(xs) != len(ws) or not xs:
            raise ValueError("each row needs equal-length nonempty inputs and weights")
        y = neuron([from_real(v, fmt) for v in xs],
                   [from_real(v, fmt) for v in ws], from_real(b, fmt), cfg)
        outputs.append(y.value)
        sat_events += int(y.sat)
        rep = cycles(cfg, len(xs))
        totals["mac_cycles"] += rep.mac_cycles
        totals["af_cycles"] += rep.af_cycles
        totals["total"] += rep.total
        totals["shift_add_ops"] += rep.shift_add_ops
    return {"schema": 1, "outputs": outputs, "cycles": totals, "sat_events": sat_events}


def run_batch_file(in_path, out_path=None) -> dict:
    with open(in_path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    result = run_batch(payload)
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(result, fh, indent=2)
            fh.write("\n")
    return result
