# File: s3rec/src/services/recommender/trainer.py
import logging
import math
import sys
from typing import Callable, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from ...core.config import TrainConfig
from ...utils.error_handling import ConfigError, TrainingError
from ..dataio.datasets import TrainingData
from ..dataio.metrics import rmse
from .model import EpochMetrics, LatentModel, init_model
from .objective import grad_v, objective, rating_grad_u, social_term, symmetrise

logger = logging.getLogger("s3rec.recommender.trainer")

MetricsSink = Callable[[EpochMetrics], None]


def progress(iterable, total: int, desc: str, quiet: bool = False):
    """tqdm wrapper, silent off a TTY or when quiet"""
    return tqdm(iterable, total=total, desc=desc, leave=False,
                disable=quiet or not sys.stderr.isatty())


def evaluate(data: TrainingData, model: LatentModel) -> Tuple[float, Optional[float]]:
    """(train RMSE, test RMSE or None without test ratings)"""
    train_users, train_items = np.nonzero(data.I)
    train = rmse(model.predict(train_users, train_items), data.R[train_users, train_items]) \
        if train_users.size else float("nan")
    test = rmse(model.predict(data.test_users, data.test_items), data.test_ratings) \
        if data.test_ratings.size else None
    return train, test


def epoch_metrics(epoch: int, mode: str, data: TrainingData, model: LatentModel, S_sym, config: TrainConfig,
                  **extra) -> EpochMetrics:
    """Metrics after an update; TrainingError when the objective is not finite"""
    gamma = config.gamma if mode != "mf" else 0.0
    value = objective(data.R, data.I, S_sym, model.U, model.V, config.lam, gamma)
    if not math.isfinite(value) or not model.finite:
        raise TrainingError("Objective diverged (lower theta)", epoch=epoch)
    train, test = evaluate(data, model)
    return EpochMetrics(epoch=epoch, mode=mode, objective=value, train_rmse=train, test_rmse=test, **extra)


def gradient_step(model: LatentModel, data: TrainingData, config: TrainConfig,
                  social: Optional[np.ndarray]) -> LatentModel:
    """One full-batch step; ``social`` is the social term of dL/dU or None"""
    gu = rating_grad_u(data.R, data.I, model.U, model.V, config.lam)
    if social is not None:
        gu = gu + social
    gv = grad_v(data.R, data.I, model.U, model.V, config.lam)
    return LatentModel(model.U - config.theta * gu, model.V - config.theta * gv)


def train_plain(data: TrainingData, config: TrainConfig, on_epoch: MetricsSink = None,
                quiet: bool = False) -> Tuple[LatentModel, List[EpochMetrics]]:
    """Full-batch gradient descent for mf (no social term) or soreg

    Args:
        data: One fold of training data
        config: Hyper-parameters; mode must be mf or soreg
        on_epoch: Optional callback receiving each EpochMetrics
        quiet: Disable the progress bar

    Returns:
        (final model, one EpochMetrics per epoch)

    Raises:
        ConfigError: For mode s3rec
        TrainingError: If the objective stops being finite
    """
    if config.mode not in ("mf", "soreg"):
        raise ConfigError(f"train_plain runs mf or soreg, not {config.mode}")
    model = init_model(config.k, data.m, data.n, config.seed)
    S_sym = symmetrise(data.S)
    use_social = config.mode == "soreg" and config.gamma != 0
    history: List[EpochMetrics] = []
    logger.info(f"Training {config.mode}: m={data.m} n={data.n} k={config.k} epochs={config.epochs}")
    for epoch in progress(range(1, config.epochs + 1), config.epochs, config.mode, quiet):
        social = social_term(model.U, S_sym, config.gamma) if use_social else None
        model = gradient_step(model, data, config, social)
        metrics = epoch_metrics(epoch, config.mode, data, model, S_sym, config)
        history.append(metrics)
        if on_epoch:
            on_epoch(metrics)
        logger.debug(f"{config.mode} epoch {epoch}: objective {metrics.objective:.6f}")
    if history:
        logger.info(f"{config.mode} finished: train RMSE {history[-1].train_rmse:.4f}, "
                    f"test RMSE {history[-1].test_rmse}")
    return model, history
