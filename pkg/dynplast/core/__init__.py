"""
Core algebra - symmetric tensors and the isotropic Hooke law.
"""

from dynplast.core.algebra import (
    HookeTensor,
    identity,
    trace,
    frob_dot,
    frob_norm,
    sym,
    sym_outer,
    dev_split,
    to_mandel,
    from_mandel,
    hooke_apply,
    hooke_inverse,
    hooke_power,
    hooke_metric_norm,
    quadratic_Q,
)

__all__ = [
    "HookeTensor",
    "identity",
    "trace",
    "frob_dot",
    "frob_norm",
    "sym",
    "sym_outer",
    "dev_split",
    "to_mandel",
    "from_mandel",
    "hooke_apply",
    "hooke_inverse",
    "hooke_power",
    "hooke_metric_norm",
    "quadratic_Q",
]
