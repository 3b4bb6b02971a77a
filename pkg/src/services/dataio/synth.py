# File: s3rec/src/services/dataio/synth.py
"""
Synthetic social-correlated rating data.

Users belong to communities whose members share most of their latent
vector; social ties are drawn inside communities first and each user's
latent vector is then blended with the mean of its friends'. Ratings are
noisy inner products clipped to [0, 5], so socially close users rate alike.
"""

import logging
import math
from typing import Tuple

import numpy as np

from ...utils.error_handling import UsageError
from .datasets import RATING_MAX, RATING_MIN, RatingDataset, SocialDataset

logger = logging.getLogger("s3rec.dataio.synth")

COMMUNITY_WEIGHT = 0.75
FRIEND_WEIGHT = 0.5
MIN_RATINGS_PER_USER = 2


def tie_count(m: int, alpha_social: float) -> int:
    """Directed nonzeros of S for density alpha_social (always even, no self ties)"""
    pairs = min(int(round(alpha_social * m * m / 2.0)), m * (m - 1) // 2)
    return 2 * pairs


def _draw_ties(rng: np.random.Generator, community: np.ndarray, pairs: int) -> np.ndarray:
    upper_i, upper_f = np.triu_indices(len(community), k=1)
    same = community[upper_i] == community[upper_f]
    inside = rng.permutation(np.flatnonzero(same))
    across = rng.permutation(np.flatnonzero(~same))
    chosen = np.concatenate([inside, across])[:pairs]
    return np.stack([upper_i[chosen], upper_f[chosen]], axis=1)


def synth(m: int, n: int, k_true: int, alpha_social: float, noise_sd: float, seed: int,
          rating_density: float = 0.2, communities: int = 4) -> Tuple[RatingDataset, SocialDataset]:
    """Generate a (RatingDataset, SocialDataset) pair

    Args:
        m, n: Users and items
        k_true: Dimension of the ground-truth latent vectors
        alpha_social: Density of S; S gets exactly tie_count(m, alpha_social) nonzeros
        noise_sd: Standard deviation of the Gaussian rating noise
        seed: Seed; equal arguments give identical datasets
        rating_density: Probability that a (user, item) pair is rated
        communities: Number of latent communities

    Raises:
        UsageError: For out-of-range parameters
    """
    if m < 2 or n < 1 or k_true < 1 or communities < 1:
        raise UsageError("synth needs m >= 2, n >= 1, k_true >= 1, communities >= 1")
    if not 0 < alpha_social <= 1 or not 0 < rating_density <= 1:
        raise UsageError("alpha_social and rating_density must lie in (0, 1]")
    if noise_sd < 0:
        raise UsageError(f"noise_sd must be non-negative, got {noise_sd}")

    rng = np.random.default_rng(seed)
    scale = math.sqrt(RATING_MAX / k_true)
    community = rng.permutation(np.arange(m) % communities)
    centroids = rng.uniform(0.0, scale, size=(communities, k_true))
    own = rng.uniform(0.0, scale, size=(m, k_true))
    users = (1.0 - COMMUNITY_WEIGHT) * own + COMMUNITY_WEIGHT * centroids[community]

    ties = _draw_ties(rng, community, tie_count(m, alpha_social) // 2)
    adjacency = np.zeros((m, m))
    adjacency[ties[:, 0], ties[:, 1]] = 1.0
    adjacency[ties[:, 1], ties[:, 0]] = 1.0
    degree = adjacency.sum(axis=1)
    friends_mean = np.divide(adjacency @ users, degree[:, None], out=users.copy(), where=degree[:, None] > 0)
    users = (1.0 - FRIEND_WEIGHT) * users + FRIEND_WEIGHT * friends_mean

    items = rng.uniform(0.0, scale, size=(n, k_true))
    mask = rng.random((m, n)) < rating_density
    for u in np.flatnonzero(mask.sum(axis=1) < min(MIN_RATINGS_PER_USER, n)):
        mask[u, rng.choice(n, size=min(MIN_RATINGS_PER_USER, n), replace=False)] = True
    truth = users @ items.T + rng.normal(0.0, noise_sd, size=(m, n)) if noise_sd > 0 else users @ items.T
    rated_users, rated_items = np.nonzero(mask)
    values = np.clip(truth[rated_users, rated_items], RATING_MIN, RATING_MAX)

    ratings = RatingDataset(m, n, rated_users.astype(np.int64), rated_items.astype(np.int64), values,
                            [f"u{u}" for u in range(m)], [f"i{i}" for i in range(n)])
    sources, targets = np.nonzero(adjacency)
    social = SocialDataset(m, sources.astype(np.int64), targets.astype(np.int64), np.ones(len(sources)))
    logger.info(f"Synthesised m={m} n={n} ratings={ratings.count} ties={social.count} (seed {seed})")
    return ratings, social


def sample_social(social: SocialDataset, rate: float, seed: int) -> SocialDataset:
    """Keep each tie independently with probability ``rate``

    Raises:
        UsageError: If rate is outside (0, 1]
    """
    if not 0 < rate <= 1:
        raise UsageError(f"Sample rate must lie in (0, 1], got {rate}")
    if rate == 1:
        return social
    keep = np.random.default_rng(seed).random(social.count) < rate
    sampled = SocialDataset(social.m, social.sources[keep], social.targets[keep], social.weights[keep])
    logger.info(f"Sampled {sampled.count} of {social.count} ties at rate {rate}")
    return sampled
