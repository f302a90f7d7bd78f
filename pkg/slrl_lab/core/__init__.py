"""Numerical core: tensors, MLPs, Adam and seeded random streams."""

from .nn import (
    LOGIT_CLAMP,
    Mlp,
    MlpSpec,
    ParamStore,
    adam_step,
    build_mlp,
    init_mlp,
    mlp_backward,
    mlp_forward,
    tensor2,
)
from .rng import Rng, sample_gaussian, sample_uniform

__all__ = [
    "LOGIT_CLAMP",
    "Mlp",
    "MlpSpec",
    "ParamStore",
    "Rng",
    "adam_step",
    "build_mlp",
    "init_mlp",
    "mlp_backward",
    "mlp_forward",
    "sample_gaussian",
    "sample_uniform",
    "tensor2",
]
