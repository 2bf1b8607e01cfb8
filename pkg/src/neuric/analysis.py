"""Error analysis against a float64 oracle.

ME and MAE follow the usual signed/absolute definitions over paired
samples (oracle minus fixed-point).  The relative mean excludes oracle
values below 10 machine epsilons, since relative error is meaningless at
zero crossings; it is reported in percent.

Monte Carlo sampling is deterministic: a named PCG64 generator seeded per
run, oracle evaluated on the unquantized real samples, the device model on
their quantized images.  SoftMax shapes the sample stream into vectors of
``SOFTMAX_GROUP`` (trailing partial group dropped).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .activation import AfConfig, AfKind, eval_raw, softmax_raw
from .fixedpoint import FxFormat, quantize_raw

__all__ = [
    "ErrorReport",
    "SOFTMAX_GROUP",
    "oracle",
    "error_metrics",
    "monte_carlo",
    "report_json",
    "report_csv",
]

SOFTMAX_GROUP = 8
_REL_FLOOR = 10 * np.finfo(np.float64).eps


@dataclass(frozen=True)
class ErrorReport:
    n: int
    me: float
    mae: float
    max_abs: float
    rel_mean: float   # percent
    seed: int


def oracle(kind: AfKind, x, cfg: AfConfig | None = None):
    """Float64 reference for ``kind``: elementwise over ``x`` for scalar
    kinds, across the last axis for softmax.  Constants come from ``cfg``
    when given (defaults otherwise)."""
    x = np.asarray(x, dtype=np.float64)
    lam = cfg.selu_lambda if cfg else 1.0507009873554805
    alpha = cfg.selu_alpha if cfg else 1.6732632423543772
    c0 = cfg.gelu_c0 if cfg else math.sqrt(2.0 / math.pi)
    c1 = cfg.gelu_c1 if cfg else 0.044715
    if kind is AfKind.SIGMOID:
        return 1.0 / (1.0 + np.exp(-x))
    if kind is AfKind.TANH:
        return np.tanh(x)
    if kind is AfKind.RELU:
        return np.maximum(x, 0.0)
    if kind is AfKind.SWISH:
        return x / (1.0 + np.exp(-x))
    if kind is AfKind.GELU:
        return 0.5 * x * (1.0 + np.tanh(c0 * (x + c1 * x**3)))
    if kind is AfKind.SELU:
        return np.where(x > 0, lam * x, lam * alpha * np.expm1(x))
    if kind is AfKind.SOFTMAX:
        e = np.exp(x - x.max(axis=-1, keepdims=True))
        return e / e.sum(axis=-1, keepdims=True)
    raise ValueError(f"unknown kind {kind!r}")


def error_metrics(actual, predicted, seed: int = 0) -> ErrorReport:
    """Paired metrics with ``actual`` as the oracle: me = mean(actual -
    predicted), mae = mean |diff|, max_abs = max |diff|, rel_mean = mean of
    |diff|/|actual| in percent over |actual| >= 10 eps."""
    a = np.asarray(actual, dtype=np.float64).ravel()
    p = np.asarray(predicted, dtype=np.float64).ravel()
    if a.shape != p.shape or a.size == 0:
        raise ValueError("actual and predicted must be equal-length and nonempty")
    diff = a - p
    adiff = np.abs(diff)
    mask = np.abs(a) >= _REL_FLOOR
    rel = float(np.mean(adiff[mask] / np.abs(a[mask])) * 100.0) if mask.any() else 0.0
    return ErrorReport(
        n=int(a.size),
        me=float(diff.mean()),
        mae=float(adiff.mean()),
        max_abs=float(adiff.max()),
        rel_mean=rel,
        seed=seed,
    )


def monte_carlo(kind: AfKind, cfg: AfConfig, n: int, lo: float = -1.0,
                hi: float = 1.0, seed: int = 42) -> ErrorReport:
    """Uniform samples on [lo, hi] inside the activation domain; returns
    the error report of the fixed-point model vs the float64 oracle."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not lo < hi:
        raise ValueError("need lo < hi")
    if max(abs(lo), abs(hi)) > cfg.max_norm:
        raise ValueError("sampling range exceeds max_norm")
    rng = np.random.Generator(np.random.PCG64(seed))
    xs = rng.uniform(lo, hi, n)
    if kind is AfKind.SOFTMAX:
        groups = n // SOFTMAX_GROUP
        if groups < 1:
            raise ValueError(f"softmax needs at least {SOFTMAX_GROUP} samples")
        xs = xs[: groups * SOFTMAX_GROUP].reshape(groups, SOFTMAX_GROUP)
        raw, sat = quantize_raw(xs, cfg.fmt)
        out, _ = softmax_raw(raw, sat, cfg)
    else:
        raw, sat = quantize_raw(xs, cfg.fmt)
        out, _ = eval_raw(kind, raw, sat, cfg)
    return error_metrics(oracle(kind, xs, cfg), out * cfg.fmt.lsb, seed=seed)


def report_json(report: ErrorReport, kind: AfKind, fmt: FxFormat) -> dict:
    """Stable serialization of one Monte Carlo report."""
    return {
        "schema": 1,
        "af": kind.value,
        "format": fmt.name,
        "n": report.n,
        "seed": report.seed,
        "me": report.me,
        "mae": report.mae,
        "max_abs": report.max_abs,
        "rel_mean_pct": report.rel_mean,
    }


def report_csv(report: ErrorReport, kind: AfKind, fmt: FxFormat) -> str:
    head = "af,format,n,seed,me,mae,max_abs,rel_mean_pct"
    row = (f"{kind.value},{fmt.name},{report.n},{report.seed},"
           f"{report.me!r},{report.mae!r},{report.max_abs!r},{report.rel_mean!r}")
    return head + "\n" + row + "\n"
