# src/providers/__init__.py
from .ahe import PaillierProvider
from .pir import PirBackendFactory, PlainPirBackend, AheLinearPirBackend

__all__ = ["PaillierProvider", "PirBackendFactory", "PlainPirBackend", "AheLinearPirBackend"]
