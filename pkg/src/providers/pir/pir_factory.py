# File: s3rec/src/providers/pir/pir_factory.py
import logging
import os

from ...core.interfaces.pir_backend import PirBackend
from ...utils.error_handling import ConfigError, UnsupportedError
from ..ahe.paillier_provider import AheKeyPair, PaillierProvider
from .ahe_linear_backend import AheLinearPirBackend
from .plain_backend import PlainPirBackend

PIR_BACKENDS = ("plain", "ahe-linear")


class PirBackendFactory:
    """Factory for creating PIR backends"""

    @staticmethod
    def create(name: str = None, depth: int = 1, keypair: AheKeyPair = None,
               bits: int = None, seed=None) -> PirBackend:
        """Create a PIR backend

        Args:
            name: "plain" or "ahe-linear" (falls back to S3REC_PIR_BACKEND)
            depth: Recursion level; only 1 is implemented
            keypair: Client key for ahe-linear (generated when None)
            bits: Modulus size when a key must be generated
            seed: Seed for key generation and query randomness

        Returns:
            A PirBackend

        Raises:
            UnsupportedError: For depth > 1
            ConfigError: For an unknown backend name or depth < 1
        """
        logger = logging.getLogger("s3rec.pir.factory")
        name = name or os.getenv("S3REC_PIR_BACKEND", "ahe-linear")
        if depth < 1:
            raise ConfigError(f"PIR depth must be at least 1, got {depth}")
        if depth > 1:
            raise UnsupportedError(f"PIR recursion depth {depth} is not implemented; only depth 1 is")
        if name == "plain":
            logger.warning("Creating plain PIR backend: queried indices are visible to the server")
            return PlainPirBackend()
        if name == "ahe-linear":
            provider = PaillierProvider(keypair=keypair, bits=bits, seed=seed)
            logger.info(f"Creating ahe-linear PIR backend with a {provider.keypair.bits}-bit client key")
            return AheLinearPirBackend(provider)
        raise ConfigError(f"Unknown PIR backend '{name}', expected one of {PIR_BACKENDS}")
