# File: s3rec/src/providers/pir/__init__.py
"""
Single-server PIR backends behind the Query / Response / Extract interface.

Currently supports:
- PlainPirBackend: index in the clear (insecure baseline)
- AheLinearPirBackend: encrypted indicator vector under the client's Paillier key
"""

from .database import PLAIN_TAG, AHE_LINEAR_TAG, PirDatabase, PirQuery, PirResponse, PirClientState
from .plain_backend import PlainPirBackend
from .ahe_linear_backend import AheLinearPirBackend
from .pir_factory import PIR_BACKENDS, PirBackendFactory

__all__ = [
    "PLAIN_TAG",
    "AHE_LINEAR_TAG",
    "PirDatabase",
    "PirQuery",
    "PirResponse",
    "PirClientState",
    "PlainPirBackend",
    "AheLinearPirBackend",
    "PIR_BACKENDS",
    "PirBackendFactory",
]
