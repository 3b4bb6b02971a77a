# src/core/interfaces/__init__.py
from .channel import Channel
from .pir_backend import PirBackend
from .matmul_protocol import MatmulProtocol

__all__ = [
    "Channel",
    "PirBackend",
    "MatmulProtocol"
]
