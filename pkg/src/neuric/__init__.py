"""Bit-accurate fixed-point model of a CORDIC-based neural compute element.

One shift-and-add engine (linear / circular / hyperbolic pseudo-rotations)
realizes both the multiply-accumulate path and seven reconfigurable
activation functions; ``analysis`` measures the fixed-point error against
a float64 oracle and ``cli`` exposes the lot as a command-line tool.
"""

from .activation import (
    AfConfig,
    AfKind,
    CapacityError,
    apply,
    clamp_domain,
    exp_fx,
    gelu,
    relu,
    selu,
    sigmoid,
    softmax,
    swish,
    tanh_af,
)
from .analysis import ErrorReport, error_metrics, monte_carlo, oracle
from .cordic import (
    AngleTable,
    CordicMode,
    CordicState,
    Drive,
    IterationSchedule,
    OpCounter,
    RangeError,
    angle_table,
    check_range,
    count_ops,
    gain,
    make_schedule,
    run,
    run_float,
    step,
    trace_csv,
)
from .fixedpoint import (
    FORMATS,
    FXP8,
    FXP16,
    FXP32,
    Fx,
    FxFormat,
    add_sat,
    convert,
    from_real,
    mul,
    shr_round,
    sub_sat,
    to_real,
)
from .pe import (
    CycleReport,
    ExecStrategy,
    NeuricConfig,
    acc_format,
    cycles,
    layer,
    mac,
    neuron,
    run_batch,
    run_batch_file,
)

__version__ = "0.1.0"

__all__ = [
    "AfConfig", "AfKind", "AngleTable", "CapacityError", "CordicMode",
    "CordicState", "CycleReport", "Drive", "ErrorReport", "ExecStrategy",
    "FORMATS", "FXP16", "FXP32", "FXP8", "Fx", "FxFormat",
    "IterationSchedule", "NeuricConfig", "OpCounter", "RangeError",
    "acc_format", "add_sat", "angle_table", "apply", "check_range",
    "clamp_domain", "convert", "count_ops", "cycles", "error_metrics",
    "exp_fx", "from_real", "gain", "gelu", "layer", "mac", "make_schedule",
    "monte_carlo", "mul", "neuron", "oracle", "relu", "run", "run_batch",
    "run_batch_file", "run_float", "selu", "shr_round", "sigmoid",
    "softmax", "step", "sub_sat", "swish", "tanh_af", "to_real",
    "trace_csv",
]
