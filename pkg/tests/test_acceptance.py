"""Acceptance gate: the nine headline checks, one pass/fail line each.

Every check prints ``PASS criterion-N ...`` or ``FAIL criterion-N ...`` with
the measured numbers next to the budget, then asserts.  Budgets and sample
counts are stated inline; nothing here is tuned to the implementation.
"""

import json
import math
import time
from pathlib import Path

import numpy as np

from neuric import cli
from neuric.activation import AfConfig, AfKind, eval_raw, softmax_raw
from neuric.analysis import monte_carlo
from neuric.cordic import (
    CordicMode,
    Drive,
    count_ops,
    gain,
    make_schedule,
    run_float,
    run_guarded,
)
from neuric.fixedpoint import FXP8, FXP16, Fx, from_real, quantize_raw
from neuric.pe import NeuricConfig, _mac_raw, acc_format, cycles, layer, mac, neuron

M, D, K = CordicMode, Drive, AfKind

DATA = Path(__file__).parent / "data"


def check(criterion: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}")
    assert ok, f"{criterion}: {detail}"


def test_criterion_1_mean_error_reproduction():
    # Monte Carlo n=1e5, uniform [-1,1], fixed seed, FXP16 defaults:
    # rel_mean <= 3.5% for sigmoid and tanh individually and averaged over
    # all seven kinds; runtime < 10 s.
    t0 = time.monotonic()
    rels = {}
    for kind in AfKind:
        rep = monte_carlo(kind, AfConfig(kind, FXP16), 100_000, seed=42)
        rels[kind] = rep.rel_mean
    dt = time.monotonic() - t0
    avg = sum(rels.values()) / len(rels)
    ok = (rels[K.SIGMOID] <= 3.5 and rels[K.TANH] <= 3.5 and avg <= 3.5
          and dt < 10.0)
    check("criterion-1 mean-error", ok,
          f"sigmoid {rels[K.SIGMOID]:.3f}% tanh {rels[K.TANH]:.3f}% "
          f"avg7 {avg:.3f}% (budget 3.5%), {dt:.2f}s (budget 10s)")


def test_criterion_2_algorithmic_error_isolation():
    # float replica, 30 iterations, 1e4 random in-range inputs per mode,
    # |err| <= 1e-6 against the math library; runtime < 5 s.
    t0 = time.monotonic()
    rng = np.random.default_rng(42)
    n, iters = 10_000, 30
    worst = 0.0

    z = rng.uniform(-1.74, 1.74, n)
    k = gain(M.CIRCULAR, make_schedule(M.CIRCULAR, iters))
    x, y, _ = run_float(np.full(n, 1 / k), np.zeros(n), z, M.CIRCULAR, D.ROTATION, iters)
    worst = max(worst, np.abs(x - np.cos(z)).max(), np.abs(y - np.sin(z)).max())

    z = rng.uniform(-1.118, 1.118, n)
    k = gain(M.HYPERBOLIC, make_schedule(M.HYPERBOLIC, iters))
    x, y, _ = run_float(np.full(n, 1 / k), np.zeros(n), z, M.HYPERBOLIC, D.ROTATION, iters)
    worst = max(worst, np.abs(x - np.cosh(z)).max(), np.abs(y - np.sinh(z)).max())

    a, b, c = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n), rng.uniform(-1.9, 1.9, n)
    _, y, _ = run_float(a, b, c, M.LINEAR, D.ROTATION, iters)
    worst = max(worst, np.abs(y - (b + a * c)).max())

    den = rng.uniform(0.1, 2.0, n)
    num = den * rng.uniform(-0.99, 0.99, n)
    _, _, z = run_float(den, num, np.zeros(n), M.LINEAR, D.VECTORING, iters)
    worst = max(worst, np.abs(z - num / den).max())

    dt = time.monotonic() - t0
    ok = worst <= 1e-6 and dt < 5.0
    check("criterion-2 replica-vs-math", ok,
          f"max |err| {worst:.2e} (budget 1e-6), {dt:.2f}s (budget 5s)")


def _drive_samples(rng, mode, drive, n):
    if drive is D.ROTATION:
        if mode is M.LINEAR:
            return rng.uniform(-1, 1, n), rng.uniform(-1, 1, n), rng.uniform(-1.9, 1.9, n)
        if mode is M.CIRCULAR:
            return rng.uniform(-1, 1, n), rng.uniform(-1, 1, n), rng.uniform(-1.74, 1.74, n)
        return rng.uniform(0.3, 1.2, n), rng.uniform(-0.5, 0.5, n), rng.uniform(-1.118, 1.118, n)
    if mode is M.LINEAR:
        x = rng.uniform(0.25, 2.0, n)
        return x, x * rng.uniform(-0.98, 0.98, n), rng.uniform(-0.5, 0.5, n)
    if mode is M.CIRCULAR:
        return rng.uniform(0.1, 2.0, n), rng.uniform(-2.0, 2.0, n), np.zeros(n)
    x = rng.uniform(0.4, 2.0, n)
    return x, x * rng.uniform(-0.78, 0.78, n), np.zeros(n)


def test_criterion_3_fixed_point_error_bound():
    # FXP16 vs float replica <= (n_iters + 2) internal LSB, 1e4 samples per
    # mode/drive pair, over the convergence ranges.  The bound covers the
    # computed components; the drive's steered-to-zero component carries an
    # independent residual on each side and has its own termination bound
    # (checked in test_cordic).
    fmt, n_iters, n = FXP16, 14, 10_000
    ulp = fmt.with_guard().lsb
    rng = np.random.default_rng(20260815)
    worst_pair, worst = None, 0.0
    for mode in (M.LINEAR, M.CIRCULAR, M.HYPERBOLIC):
        for drive in (D.ROTATION, D.VECTORING):
            xs, ys, zs = _drive_samples(rng, mode, drive, n)
            xq, _ = quantize_raw(xs, fmt)
            yq, _ = quantize_raw(ys, fmt)
            zq, _ = quantize_raw(zs, fmt)
            fx, fy, fz, _ = run_guarded(xq, yq, zq, np.zeros(n, bool),
                                        mode, drive, fmt, n_iters)
            rx, ry, rz = run_float(xq * fmt.lsb, yq * fmt.lsb, zq * fmt.lsb,
                                   mode, drive, n_iters)
            dx = np.abs(fx * fmt.lsb - rx)
            dy = np.abs(fy * fmt.lsb - ry)
            dz = np.abs(fz * fmt.lsb - rz)
            dev = np.maximum(dx, dz) if drive is D.VECTORING else np.maximum(dx, dy)
            m = float(dev.max() / ulp)
            if m > worst:
                worst, worst_pair = m, (mode.name, drive.value)
    ok = worst <= n_iters + 2
    check("criterion-3 fx-error-bound", ok,
          f"max deviation {worst:.2f} internal LSB at {worst_pair} "
          f"(budget {n_iters + 2})")


def test_criterion_4_softmax_normalization_and_shift():
    # 1e3 random vectors, lengths 2..64: sums within n LSB of 1; components
    # move <= 2 LSB under in-range constant shifts.
    rng = np.random.default_rng(4242)
    cfg = AfConfig(K.SOFTMAX, FXP16)
    one = 1 << FXP16.frac_bits
    worst_sum, worst_shift = 0.0, 0
    for _ in range(1000):
        ln = int(rng.integers(2, 65))
        xs = rng.uniform(-2.0, 2.0, ln)
        c = float(rng.uniform(-1.0, 1.0))
        raw, _ = quantize_raw(xs, FXP16)
        y, _ = softmax_raw(raw[None, :], np.zeros((1, ln), bool), cfg)
        worst_sum = max(worst_sum, abs(int(y.sum()) - one) / ln)
        shifted = raw + from_real(c, FXP16).raw
        y2, _ = softmax_raw(shifted[None, :], np.zeros((1, ln), bool), cfg)
        worst_shift = max(worst_shift, int(np.abs(y2 - y).max()))
    ok = worst_sum <= 1.0 and worst_shift <= 2
    check("criterion-4 softmax", ok,
          f"worst |sum-1| {worst_sum:.3f}x n*LSB (budget 1.0), "
          f"worst shift move {worst_shift} LSB (budget 2)")


def test_criterion_5_mac_oracle_equivalence():
    # quantized operands are exact LSB multiples, so acc + w*x in double-
    # fraction integers is the rational answer; 1e5 triples per format,
    # agreement within 2 I/O LSB.  The batched kernel is the same code the
    # scalar mac() wraps; a bit-equality spot check ties them together.
    rng = np.random.default_rng(777)
    n = 100_000
    worst = {}
    for fmt in (FXP8, FXP16):
        afmt = acc_format(fmt)
        acc = rng.uniform(-1, 1, n)
        x = rng.uniform(-1.9, 1.9, n)
        w = rng.uniform(-1, 1, n)
        aq, _ = quantize_raw(acc, afmt)
        xq, _ = quantize_raw(x, fmt)
        wq, _ = quantize_raw(w, fmt)
        got, _ = _mac_raw(aq, xq, wq, fmt, afmt, fmt.frac_bits + 2)
        exact = aq + wq * xq
        worst[fmt.name] = float((np.abs(got - exact) * afmt.lsb).max() / fmt.lsb)
    cfg = NeuricConfig(FXP16, AfConfig(K.TANH, FXP16))
    afmt = acc_format(FXP16)
    for i in rng.integers(0, n, 200):
        sc = mac(Fx(int(aq[i]), afmt), Fx(int(xq[i]), FXP16),
                 Fx(int(wq[i]), FXP16), cfg)
        assert sc.raw == int(got[i])
    ok = worst["q2.5"] <= 2.0 and worst["q3.12"] <= 2.0
    check("criterion-5 mac-oracle", ok,
          f"worst |err| fxp8 {worst['q2.5']:.3f} LSB, fxp16 {worst['q3.12']:.3f} LSB "
          f"(budget 2)")


def test_criterion_6_monotonicity_symmetry_suite():
    # activation grid invariants at both precisions: nondecreasing sigmoid/
    # tanh/relu/selu (<= 1 LSB local dips), odd tanh / complementary sigmoid
    # (<= 2 LSB), relu difference identity (exact), output ranges.
    failures = []
    for fmt in (FXP16, FXP8):
        lo = max(-5.5, fmt.min_value)
        hi = min(5.5, fmt.max_value)
        raw = np.unique(quantize_raw(np.linspace(lo, hi, 4096), fmt)[0])
        z = np.zeros(raw.shape, bool)
        one = 1 << fmt.frac_bits
        for kind in (K.SIGMOID, K.TANH, K.RELU, K.SELU):
            y, _ = eval_raw(kind, raw, z, AfConfig(kind, fmt))
            if np.diff(y).min() < -1:
                failures.append(f"{fmt.name}:{kind.value} monotonicity")
        t, _ = eval_raw(K.TANH, raw, z, AfConfig(K.TANH, fmt))
        tn, _ = eval_raw(K.TANH, -raw, z, AfConfig(K.TANH, fmt))
        if np.abs(t + tn).max() > 2:
            failures.append(f"{fmt.name}:tanh odd symmetry")
        if t.min() < -one or t.max() > one:
            failures.append(f"{fmt.name}:tanh range")
        s, _ = eval_raw(K.SIGMOID, raw, z, AfConfig(K.SIGMOID, fmt))
        sn, _ = eval_raw(K.SIGMOID, -raw, z, AfConfig(K.SIGMOID, fmt))
        if np.abs(s + sn - one).max() > 2:
            failures.append(f"{fmt.name}:sigmoid complement")
        if s.min() < 0 or s.max() > one:
            failures.append(f"{fmt.name}:sigmoid range")
        r, _ = eval_raw(K.RELU, raw, z, AfConfig(K.RELU, fmt))
        rn, _ = eval_raw(K.RELU, -raw, z, AfConfig(K.RELU, fmt))
        if not (r - rn == raw).all():
            failures.append(f"{fmt.name}:relu identity")
    check("criterion-6 grid-suite", not failures,
          "all grid invariants hold at q3.12 and q2.5" if not failures
          else f"violations: {failures}")


def _mlp_accuracy_fx(blob, fmt):
    cfg_h = NeuricConfig(fmt, AfConfig(K.TANH, fmt))
    cfg_o = NeuricConfig(fmt, AfConfig(K.SOFTMAX, fmt))
    x = np.asarray(blob["x_test"], dtype=np.float64)
    hidden, _ = layer(x, np.asarray(blob["w1"]), np.asarray(blob["b1"]), cfg_h)
    probs, _ = layer(hidden, np.asarray(blob["w2"]), np.asarray(blob["b2"]), cfg_o)
    pred = probs.argmax(axis=1)
    return float((pred == np.asarray(blob["y_test"])).mean())


def test_criterion_7_qor_surrogate():
    # frozen two-layer MLP on the shipped spiral test set: FXP16 accuracy
    # >= 98.5% of the stored double-precision accuracy; runtime < 5 s.
    t0 = time.monotonic()
    blob = json.loads((DATA / "spiral_mlp.json").read_text())
    acc_fx = _mlp_accuracy_fx(blob, FXP16)
    acc_fx2 = _mlp_accuracy_fx(blob, FXP16)
    ref = blob["float64_accuracy"]
    ratio = acc_fx / ref
    dt = time.monotonic() - t0
    ok = ratio >= 0.985 and acc_fx == acc_fx2 and dt < 5.0
    check("criterion-7 qor-surrogate", ok,
          f"fxp16 {acc_fx:.4f} vs float64 {ref:.4f}, ratio {ratio:.4f} "
          f"(budget 0.985), deterministic={acc_fx == acc_fx2}, {dt:.2f}s (budget 5s)")


def test_criterion_8_cycle_model_validation():
    # CycleReport.shift_add_ops equals the instrumented shift-add count for
    # every kind at n_iters 7 and 14 (canonical datapath inputs).
    canonical = {K.RELU: 0.3, K.TANH: 0.4, K.SIGMOID: 0.5, K.SWISH: 0.5,
                 K.GELU: 0.4, K.SELU: -0.4, K.SOFTMAX: 0.2}
    mismatches = []
    for n_iters in (7, 14):
        for kind in AfKind:
            cfg = NeuricConfig(FXP16, AfConfig(kind, FXP16, n_iters=n_iters))
            length = 3
            rep = cycles(cfg, length)
            if kind is K.SOFTMAX:
                with count_ops() as c:
                    layer(np.full((1, length), canonical[kind]),
                          np.eye(length) * 0.5, np.zeros(length), cfg)
                want = length * rep.mac_cycles + (rep.shift_add_ops - rep.mac_cycles)
            else:
                xs = [from_real(canonical[kind], FXP16)] + \
                     [from_real(0.0, FXP16)] * (length - 1)
                ws = [from_real(1.0, FXP16)] + [from_real(0.0, FXP16)] * (length - 1)
                with count_ops() as c:
                    neuron(xs, ws, from_real(0.0, FXP16), cfg)
                want = rep.shift_add_ops
            if c.shift_add != want:
                mismatches.append(f"{kind.value}@n{n_iters}: {c.shift_add} != {want}")
    check("criterion-8 cycle-model", not mismatches,
          "instrumented == modeled for all 7 kinds at n in {7, 14}"
          if not mismatches else f"mismatches: {mismatches}")


def test_criterion_9_cli_determinism(capsys, tmp_path):
    # two runs of every subcommand with identical argv: byte-identical output.
    cases = [
        ["eval", "--af", "sigmoid", "--x", "0.37", "--out-format", "json"],
        ["sweep", "--af", "gelu", "--samples", "256", "--range", "-2", "2"],
        ["montecarlo", "--af", "tanh", "--samples", "5000", "--seed", "42"],
        ["cycles", "--af", "softmax", "--len", "8", "--strategy", "pipelined"],
        ["golden", "--samples", "128", "--seed", "7"],
    ]
    stable = True
    for argv in cases:
        assert cli.main(argv) == 0
        first = capsys.readouterr().out
        assert cli.main(argv) == 0
        second = capsys.readouterr().out
        stable &= first == second and first != ""
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (f1, f2):
        assert cli.main(["golden", "--samples", "64", "--out", str(f)]) == 0
    capsys.readouterr()
    stable &= f1.read_bytes() == f2.read_bytes()
    check("criterion-9 cli-determinism", stable,
          "byte-identical stdout for all 5 subcommands and file output")
