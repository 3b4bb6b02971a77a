# File: s3rec/src/services/recommender/secure_trainer.py
"""
Two-party secure training.

P0 (rating platform) holds R and updates U, V. P1 (social platform)
holds S. Each epoch both run st_mpc so P0 learns the social term of
dL/dU and nothing else about S; P0 computes the rating terms locally.
"""

import logging
import struct
from typing import Callable, List, Optional, Tuple

import numpy as np

from ...core.config import TrainConfig
from ...core.interfaces.pir_backend import PirBackend
from ...linalg.sparse import SparseMatrix
from ...mpc.dealer import provision_triples
from ...mpc.ring import FixedPointCodec
from ...protocols.resources import ProtocolResources, exchange_keys
from ...protocols.st_mpc import st_mpc
from ...providers.ahe.paillier_provider import AheKeyPair
from ...transport.framing import MsgType, Phase
from ...transport.session import PartySession, create_session_pair, run_pair
from ...utils.error_handling import ConfigError, ProtocolError, TripleExhaustedError, UsageError
from ..dataio.datasets import TrainingData
from .model import EpochMetrics, LatentModel, init_model
from .objective import social_term, symmetrise
from .trainer import MetricsSink, epoch_metrics, gradient_step, progress

logger = logging.getLogger("s3rec.recommender.secure")

_HANDSHAKE = struct.Struct("<QQQQdB")

SocialOracle = Callable[[np.ndarray], np.ndarray]


def _secure(config: TrainConfig) -> TrainConfig:
    return config if config.mode == "s3rec" else config.model_copy(update={"mode": "s3rec"})


def triples_for_training(k: int, m: int, epochs: int) -> int:
    """Each epoch's diagonal product consumes k*m triples"""
    return k * m * epochs


async def _handshake(session: PartySession, config: TrainConfig, m: int, n: Optional[int],
                     dealer_files: bool) -> Tuple[int, int]:
    """Agree on (m, n, k, T, gamma) and on where triples come from

    P0 announces, P1 checks against its own view. ``dealer_files`` is True
    when the party loaded its triples from a dealer file instead of having
    them provisioned over the channel.

    Returns:
        (m, n)
    """
    if session.party_id == 0:
        await session.send(Phase.OFFLINE, MsgType.CONTROL,
                           _HANDSHAKE.pack(m, n, config.k, config.epochs, config.gamma, int(dealer_files)))
        _secure(config).check_for_items(n)
        return m, n
    peer_m, peer_n, peer_k, peer_epochs, peer_gamma, peer_files = _HANDSHAKE.unpack(
        await session.expect(MsgType.CONTROL, Phase.OFFLINE.value)
    )
    if peer_m != m:
        raise ProtocolError(f"P0 trains {peer_m} users but the social matrix covers {m}")
    if (peer_k, peer_epochs, peer_gamma) != (config.k, config.epochs, config.gamma):
        raise ConfigError(
            "Parties disagree on (k, epochs, gamma)",
            details={"P0": [peer_k, peer_epochs, peer_gamma], "P1": [config.k, config.epochs, config.gamma]}
        )
    if bool(peer_files) != dealer_files:
        raise ConfigError("Either both parties load dealer triple files or neither does")
    _secure(config).check_for_items(peer_n)
    return peer_m, peer_n


async def _prepare(session: PartySession, config: TrainConfig, m: int, resources: ProtocolResources) -> None:
    await exchange_keys(session, resources)
    required = triples_for_training(config.k, m, config.epochs)
    if resources.triples is None:
        resources.triples = await provision_triples(session, required)
    elif resources.triples.remaining < required:
        raise TripleExhaustedError(required, resources.triples.remaining)


async def run_rating_party(session: PartySession, data: TrainingData, config: TrainConfig,
                           resources: ProtocolResources, oracle: Optional[SocialOracle] = None,
                           on_epoch: MetricsSink = None,
                           quiet: bool = False) -> Tuple[LatentModel, List[EpochMetrics]]:
    """P0's side of secure training

    Args:
        session: P0's session
        data: Ratings (data.S is never read here)
        config: Hyper-parameters, mode s3rec
        resources: P0's protocol key pair
        oracle: Plaintext social term for deviation tracking (in-process runs only)
        on_epoch: Optional EpochMetrics callback
        quiet: Disable the progress bar

    Returns:
        (final model, per-epoch metrics)
    """
    if session.party_id != 0:
        raise UsageError("run_rating_party must run at party 0")
    m, n = await _handshake(session, config, data.m, data.n, resources.triples is not None)
    use_social = config.gamma != 0
    if use_social:
        await _prepare(session, config, m, resources)
    codec = FixedPointCodec(config.frac_bits)
    model = init_model(config.k, m, n, config.seed)
    history: List[EpochMetrics] = []
    logger.info(f"P0 secure training: m={m} n={n} k={config.k} epochs={config.epochs} "
                f"({config.sensitive_mode}, social term {'on' if use_social else 'off'})")

    for epoch in progress(range(1, config.epochs + 1), config.epochs, "s3rec", quiet):
        before = session.stats.snapshot()
        social = None
        deviation = None
        if use_social:
            social, _ = await st_mpc(session, config.gamma, U=model.U, k=config.k, m=m, codec=codec,
                                     resources=resources, mode=config.sensitive_mode)
            if oracle is not None:
                deviation = float(np.max(np.abs(social - oracle(model.U))))
        model = gradient_step(model, data, config, social)
        delta = session.stats.delta(before)
        metrics = epoch_metrics(
            epoch, "s3rec", data, model, None, config.model_copy(update={"gamma": 0.0}),
            social_deviation=deviation, payload_bytes=dict(delta.payload_sent),
            bytes_received=delta.payload_received,
        )
        history.append(metrics)
        if on_epoch:
            on_epoch(metrics)
        logger.debug(f"P0 epoch {epoch}: social deviation {deviation}")

    if history and history[-1].social_deviation is not None:
        logger.info(f"Final social-term deviation from plaintext: {history[-1].social_deviation:.3e}")
    return model, history


async def run_social_party(session: PartySession, S: SparseMatrix, config: TrainConfig,
                           resources: ProtocolResources) -> int:
    """P1's side of secure training: serve one st_mpc per epoch, then stop

    Returns:
        Number of epochs served
    """
    if session.party_id != 1:
        raise UsageError("run_social_party must run at party 1")
    if S.rows != S.cols:
        raise ConfigError(f"Social matrix must be square, got {S.shape}")
    m, n = await _handshake(session, config, S.rows, None, resources.triples is not None)
    if config.gamma == 0:
        logger.info("P1: gamma = 0, no social protocol to run")
        return 0
    await _prepare(session, config, m, resources)
    codec = FixedPointCodec(config.frac_bits)
    S_sym = symmetrise(S)
    for epoch in range(1, config.epochs + 1):
        await st_mpc(session, config.gamma, S=S_sym, k=config.k, m=m, codec=codec,
                     resources=resources, mode=config.sensitive_mode)
    logger.info(f"P1 served {config.epochs} epochs")
    return config.epochs


async def train_secure(data: TrainingData, config: TrainConfig, *, keypair: AheKeyPair,
                       pir_backend: PirBackend, query_pad_density: Optional[float] = None,
                       latency_ms: float = None, track_deviation: bool = True,
                       on_epoch: MetricsSink = None,
                       quiet: bool = False) -> Tuple[LatentModel, List[EpochMetrics]]:
    """Both parties in one event loop over an in-process channel

    Args:
        data: Ratings for P0; data.S is handed to P1 only
        config: Hyper-parameters (mode s3rec)
        keypair: P0's protocol key pair
        pir_backend: P1's PIR client backend
        query_pad_density: Optional dummy-query padding
        latency_ms: Simulated one-way channel latency
        track_deviation: Compare each decoded social term with the plaintext one

    Returns:
        P0's (final model, per-epoch metrics)
    """
    session0, session1 = create_session_pair(config.seed, latency_ms)
    resources0 = ProtocolResources(keypair=keypair, pir_backend_name=pir_backend.name,
                                   query_pad_density=query_pad_density)
    resources1 = ProtocolResources(pir_backend=pir_backend, pir_backend_name=pir_backend.name,
                                   query_pad_density=query_pad_density)
    oracle = None
    if track_deviation:
        S_sym = symmetrise(data.S)
        oracle = lambda U: social_term(U, S_sym, config.gamma)  # noqa: E731
    try:
        (model, history), _ = await run_pair(
            run_rating_party(session0, data, config, resources0, oracle, on_epoch, quiet),
            run_social_party(session1, data.S, config, resources1),
        )
    finally:
        await session0.close()
        await session1.close()
    return model, history
