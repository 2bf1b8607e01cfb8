"""Cost model tour: cycles and shift-add operations per neuron.

Tabulates the deterministic cycle model for every activation at a given
vector length, contrasts the iterative strategy (MAC then activation)
with the pipelined one (they overlap), and cross-checks the modeled
shift-add count against live instrumentation of an actual neuron.

Usage: python demos/cycle_model_tour.py [--len 16] [--iters 14]
"""

import argparse

import numpy as np

from neuric import (
    FXP16,
    AfConfig,
    AfKind,
    ExecStrategy,
    NeuricConfig,
    count_ops,
    cycles,
    from_real,
    layer,
    neuron,
)


def cycle_table(length: int, n: int) -> None:
    print(f"== cycle model, vector length {length}, {n} iterations per pass ==")
    print(f"{'af':>8}  {'mac':>6}  {'af':>6}  {'iterative':>9}  {'pipelined':>9}  {'shift-adds':>10}")
    for kind in AfKind:
        cfg_i = NeuricConfig(FXP16, AfConfig(kind, FXP16, n_iters=n))
        cfg_p = NeuricConfig(FXP16, AfConfig(kind, FXP16, n_iters=n),
                             strategy=ExecStrategy.PIPELINED)
        a, b = cycles(cfg_i, length), cycles(cfg_p, length)
        print(f"{kind.value:>8}  {a.mac_cycles:>6}  {a.af_cycles:>6}  "
              f"{a.total:>9}  {b.total:>9}  {a.shift_add_ops:>10}")
    print("(softmax activation cost scales with the vector because every")
    print(" element needs its own exponential and divide)\n")


def instrumentation_check(length: int, n: int) -> None:
    print("== modeled shift-adds vs counted shift-adds (one neuron) ==")
    rng = np.random.Generator(np.random.PCG64(11))
    xs = [from_real(v, FXP16) for v in rng.uniform(-0.3, 0.3, length)]
    ws = [from_real(v, FXP16) for v in rng.uniform(-0.3, 0.3, length)]
    bias = from_real(0.05, FXP16)
    print(f"{'af':>8}  {'model':>6}  {'counted':>8}")
    for kind in (AfKind.RELU, AfKind.TANH, AfKind.SIGMOID, AfKind.GELU, AfKind.SELU):
        cfg = NeuricConfig(FXP16, AfConfig(kind, FXP16, n_iters=n))
        with count_ops() as ops:
            neuron(xs, ws, bias, cfg)
        model = cycles(cfg, length).shift_add_ops
        mark = "ok" if model == ops.shift_add else "MISMATCH"
        print(f"{kind.value:>8}  {model:>6}  {ops.shift_add:>8}  {mark}")
    # softmax is a layer-level activation; instrument a whole row
    cfg = NeuricConfig(FXP16, AfConfig(AfKind.SOFTMAX, FXP16, n_iters=n))
    w = rng.uniform(-0.3, 0.3, (length, length))
    b = rng.uniform(-0.1, 0.1, length)
    x = rng.uniform(-0.3, 0.3, (1, length))
    with count_ops() as ops:
        layer(x, w, b, cfg)
    # length MAC folds plus one shared softmax pass over the row
    rep = cycles(cfg, length)
    model = length * rep.mac_cycles + (rep.shift_add_ops - rep.mac_cycles)
    mark = "ok" if model == ops.shift_add else "MISMATCH"
    print(f"{'softmax':>8}  {model:>6}  {ops.shift_add:>8}  {mark}  (full {length}-unit row)\n")


def strategy_story(n: int) -> None:
    print("== when does pipelining pay? ==")
    cfg_i = NeuricConfig(FXP16, AfConfig(AfKind.GELU, FXP16, n_iters=n))
    cfg_p = NeuricConfig(FXP16, AfConfig(AfKind.GELU, FXP16, n_iters=n),
                         strategy=ExecStrategy.PIPELINED)
    print("gelu neuron, growing fan-in:")
    print(f"{'len':>4}  {'iterative':>9}  {'pipelined':>9}  {'speedup':>7}")
    for length in (2, 4, 8, 16, 32, 64):
        a, b = cycles(cfg_i, length), cycles(cfg_p, length)
        print(f"{length:>4}  {a.total:>9}  {b.total:>9}  {a.total / b.total:>6.2f}x")
    print("(pipelined time is max(mac, af): once the fold dominates, the")
    print(" activation hides behind it completely)\n")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--len", dest="length", type=int, default=16)
    ap.add_argument("--iters", type=int, default=14)
    args = ap.parse_args()
    cycle_table(args.length, args.iters)
    instrumentation_check(args.length, args.iters)
    strategy_story(args.iters)


if __name__ == "__main__":
    main()
