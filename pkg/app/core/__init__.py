from app.core.tensor import (
    Tensor,
    affine_forward,
    log_softmax,
    no_grad,
    relu,
    softmax,
    stack,
    straight_through,
)
from app.core.complex import ComplexTensor, is_power_of_two, unitary_dft
from app.core.layers import Mlp, glorot_uniform
from app.core.adam import Adam, AdamState, adam_step
from app.core.gradcheck import grad_check

__all__ = [
    "Adam",
    "AdamState",
    "ComplexTensor",
    "Mlp",
    "Tensor",
    "adam_step",
    "affine_forward",
    "glorot_uniform",
    "grad_check",
    "is_power_of_two",
    "log_softmax",
    "no_grad",
    "relu",
    "softmax",
    "stack",
    "straight_through",
    "unitary_dft",
]
