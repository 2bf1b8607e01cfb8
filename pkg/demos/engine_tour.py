"""Guided tour of the shift-and-add engine.

Walks the three coordinate systems (linear / circular / hyperbolic) in both
drive modes, prints a per-iteration trace, and shows how the fixed-point
trajectory tracks a float64 replica of the same recurrence as the iteration
count grows.  Everything is exact integer arithmetic; nothing here is
stochastic.

Usage: python demos/engine_tour.py [--format fxp16] [--iters 14]
"""

import argparse
import math

import numpy as np

from neuric import (
    FORMATS,
    FXP16,
    CordicMode,
    Drive,
    angle_table,
    count_ops,
    from_real,
    gain,
    make_schedule,
    run,
    run_float,
    trace_csv,
)


def show_schedules(n: int) -> None:
    print("== iteration schedules ==")
    for mode in CordicMode:
        sched = make_schedule(mode, n)
        print(f"{mode.name.lower():>10}: {list(sched.indices)}")
    print("(hyperbolic starts at 1 and revisits 4, 13, 40, ... so the")
    print(" series still converges; the other two walk 0..n-1)\n")


def show_angle_table(fmt, n: int) -> None:
    sched = make_schedule(CordicMode.HYPERBOLIC, n)
    table = angle_table(CordicMode.HYPERBOLIC, sched, fmt.with_guard())
    print(f"== hyperbolic step sizes (guard format, lsb = 2^-{fmt.with_guard().frac_bits}) ==")
    print("   i   atanh(2^-i)      raw")
    for i, e in zip(sched.indices, table.e):
        print(f"  {i:2d}   {math.atanh(2.0 ** -i):.9f}   {e.raw:6d}")
    print()


def rotate_demo(fmt, n: int) -> None:
    angle = 0.5236  # ~30 degrees
    x0 = from_real(0.6, fmt)
    y0 = from_real(0.0, fmt)
    z0 = from_real(angle, fmt)
    rows: list = []
    with count_ops() as ops:
        out = run(x0, y0, z0, CordicMode.CIRCULAR, Drive.ROTATION, n, trace=rows)
    k = gain(CordicMode.CIRCULAR, make_schedule(CordicMode.CIRCULAR, n))
    print(f"== circular rotation: spin (0.6, 0) by {angle} rad ==")
    print(trace_csv(rows[:6]) + f"... ({len(rows)} rows total)\n")
    print(f"engine x, y    : {out.x.value:+.6f}, {out.y.value:+.6f}  (carry gain {k:.6f})")
    print(f"gain-corrected : {out.x.value / k:+.6f}, {out.y.value / k:+.6f}")
    print(f"cos/sin oracle : {0.6 * math.cos(angle):+.6f}, {0.6 * math.sin(angle):+.6f}")
    print(f"residual z     : {out.z.value:+.6f} (driven toward 0)")
    print(f"ops: {ops.iterations} iterations, {ops.shift_add} shift-add pairs\n")


def vector_demo(fmt, n: int) -> None:
    x0 = from_real(0.8, fmt)
    y0 = from_real(0.3, fmt)
    z0 = from_real(0.0, fmt)
    out = run(x0, y0, z0, CordicMode.CIRCULAR, Drive.VECTORING, n)
    print("== circular vectoring: fold (0.8, 0.3) onto the x axis ==")
    print(f"accumulated z  : {out.z.value:+.6f}   atan(0.3/0.8) = {math.atan2(0.3, 0.8):+.6f}")
    print(f"residual y     : {out.y.value:+.6f} (driven toward 0)\n")


def linear_mac_demo(fmt, n: int) -> None:
    # linear rotation computes y + x*z with shifts and adds only
    x0 = from_real(0.75, fmt)
    y0 = from_real(0.2, fmt)
    z0 = from_real(0.4, fmt)
    out = run(x0, y0, z0, CordicMode.LINEAR, Drive.ROTATION, n)
    print("== linear rotation as a multiplier: y + x*z ==")
    print(f"engine y       : {out.y.value:+.6f}   0.2 + 0.75*0.4 = {0.2 + 0.75 * 0.4:+.6f}\n")


def convergence_demo(fmt) -> None:
    print("== accuracy vs iteration count (circular rotation, worst of 200 points) ==")
    print("each extra iteration halves the unresolved rotation until output")
    print("quantization takes over:")
    print("  n   max gain-corrected error vs cos/sin, in output lsb")
    rng = np.random.Generator(np.random.PCG64(7))
    xs = rng.uniform(-1.0, 1.0, 200)
    zs = rng.uniform(-1.6, 1.6, 200)
    y0 = from_real(0.0, fmt)
    for n in (4, 6, 8, 10, 12, 14):
        k = gain(CordicMode.CIRCULAR, make_schedule(CordicMode.CIRCULAR, n))
        worst = 0.0
        for xr, zr in zip(xs, zs):
            x0, z0 = from_real(xr, fmt), from_real(zr, fmt)
            got = run(x0, y0, z0, CordicMode.CIRCULAR, Drive.ROTATION, n)
            true = x0.value * math.cos(z0.value)
            worst = max(worst, abs(got.x.value / k - true) / fmt.lsb)
        print(f" {n:2d}   {worst:8.2f}")
    # at full depth the integer trajectory also tracks a float64 replica of
    # the recurrence itself to within (n + 2) internal lsb
    n, worst = 14, 0.0
    ilsb = fmt.with_guard().lsb
    for xr, zr in zip(xs, zs):
        x0, z0 = from_real(xr, fmt), from_real(zr, fmt)
        got = run(x0, y0, z0, CordicMode.CIRCULAR, Drive.ROTATION, n)
        ref, _, _ = run_float(x0.value, 0.0, z0.value, CordicMode.CIRCULAR,
                              Drive.ROTATION, n)
        worst = max(worst, abs(got.x.value - ref) / ilsb)
    print(f"\nreplica deviation at n = {n}: {worst:.2f} internal lsb (bound {n + 2})\n")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--format", default="fxp16", choices=sorted(FORMATS))
    ap.add_argument("--iters", type=int, default=14)
    args = ap.parse_args()
    fmt = FORMATS[args.format]
    show_schedules(args.iters)
    show_angle_table(fmt, args.iters)
    rotate_demo(fmt, args.iters)
    vector_demo(fmt, args.iters)
    linear_mac_demo(fmt, args.iters)
    if fmt == FXP16:
        convergence_demo(fmt)


if __name__ == "__main__":
    main()
