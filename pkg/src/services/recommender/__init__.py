from .model import EpochMetrics, LatentModel, init_model
from .objective import (
    grad_u,
    grad_u_terms,
    grad_v,
    objective,
    rating_grad_u,
    residual,
    social_penalty,
    social_term,
    symmetrise,
)
from .trainer import evaluate, gradient_step, train_plain
from .secure_trainer import run_rating_party, run_social_party, train_secure, triples_for_training

__all__ = [
    "EpochMetrics",
    "LatentModel",
    "init_model",
    "grad_u",
    "grad_u_terms",
    "grad_v",
    "objective",
    "rating_grad_u",
    "residual",
    "social_penalty",
    "social_term",
    "symmetrise",
    "evaluate",
    "gradient_step",
    "train_plain",
    "run_rating_party",
    "run_social_party",
    "train_secure",
    "triples_for_training",
]
