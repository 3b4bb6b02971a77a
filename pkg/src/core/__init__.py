# File: s3rec/src/core/__init__.py
from .interfaces.channel import Channel
from .interfaces.pir_backend import PirBackend
from .interfaces.matmul_protocol import MatmulProtocol
from .registry import ProtocolRegistry, default_registry

__all__ = [
    "Channel",
    "PirBackend",
    "MatmulProtocol",
    "ProtocolRegistry",
    "default_registry"
]
