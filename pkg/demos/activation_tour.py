"""Accuracy tour of the seven fixed-point activation functions.

Prints a Monte Carlo error table (mean error / mean absolute error /
mean relative error vs a float64 oracle) for every activation at both
word widths, plots tanh as ASCII art with its worst fixed-point error,
and shows the softmax normalization property on a concrete vector.

Usage: python demos/activation_tour.py [--samples 20000] [--seed 42]
"""

import argparse

import numpy as np

from neuric import (
    FXP8,
    FXP16,
    AfConfig,
    AfKind,
    apply,
    from_real,
    monte_carlo,
    oracle,
    softmax,
)


def error_table(n: int, seed: int) -> None:
    print(f"== Monte Carlo error vs float64 oracle ({n} uniform samples on [-1, 1]) ==")
    print(f"{'af':>8}  {'width':>5}  {'me':>10}  {'mae':>10}  {'max':>10}  {'rel mean':>9}")
    for kind in AfKind:
        for fmt in (FXP16, FXP8):
            rep = monte_carlo(kind, AfConfig(kind, fmt), n, seed=seed)
            print(f"{kind.value:>8}  {fmt.word_bits:>4}b  {rep.me:+.7f}  "
                  f"{rep.mae:.8f}  {rep.max_abs:.8f}  {rep.rel_mean:8.4f}%")
    print()


def ascii_tanh(fmt) -> None:
    cfg = AfConfig(AfKind.TANH, fmt)
    xs = np.linspace(-4.0, 4.0, 61)
    ys = [apply(cfg, [from_real(v, fmt)])[0].value for v in xs]
    ref = oracle(AfKind.TANH, xs)
    print(f"== tanh on the {fmt.word_bits}-bit engine ==")
    rows, cols = 17, len(xs)
    grid = [[" "] * cols for _ in range(rows)]
    for c, v in enumerate(ys):
        r = int(round((1.0 - v) / 2.0 * (rows - 1)))
        grid[min(max(r, 0), rows - 1)][c] = "*"
    for r, line in enumerate(grid):
        label = "+1" if r == 0 else ("-1" if r == rows - 1 else
                                     (" 0" if r == rows // 2 else "  "))
        print(f" {label} |{''.join(line)}")
    print("    +" + "-" * cols)
    print("     -4" + " " * (cols - 6) + "+4")
    worst = float(np.max(np.abs(np.asarray(ys) - ref)))
    print(f"worst error on this grid: {worst:.6f} ({worst / fmt.lsb:.2f} output lsb)\n")


def softmax_demo(fmt) -> None:
    cfg = AfConfig(AfKind.SOFTMAX, fmt)
    vals = [0.9, 0.1, -0.4, 0.5]
    out = softmax([from_real(v, fmt) for v in vals], cfg)
    got = [o.value for o in out]
    ref = oracle(AfKind.SOFTMAX, np.array(vals))
    print(f"== softmax on the {fmt.word_bits}-bit engine ==")
    print(f"inputs : {vals}")
    print(f"engine : {[f'{v:.6f}' for v in got]}")
    print(f"oracle : {[f'{v:.6f}' for v in ref]}")
    s = sum(got)
    print(f"sum    : {s:.6f}  (|sum - 1| = {abs(s - 1.0) / fmt.lsb:.1f} lsb, "
          f"bound is one lsb per element = {len(vals)})\n")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    error_table(args.samples, args.seed)
    ascii_tanh(FXP16)
    softmax_demo(FXP16)
    softmax_demo(FXP8)


if __name__ == "__main__":
    main()
