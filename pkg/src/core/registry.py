#!/usr/bin/env python
# File: s3rec/src/core/registry.py
import logging
from typing import Dict, List, Optional

from ..utils.error_handling import ConfigError
from .interfaces.matmul_protocol import MatmulProtocol


class ProtocolRegistry:
    """Registry for all secure matrix-multiplication protocols"""

    def __init__(self):
        self.protocols: Dict[str, MatmulProtocol] = {}
        self.logger = logging.getLogger("s3rec.registry")

    def register_protocol(self, protocol: MatmulProtocol) -> None:
        """Register a protocol under its name

        Args:
            protocol: The protocol implementation to register
        """
        self.protocols[protocol.name] = protocol
        self.logger.debug(f"Registered protocol: {protocol.name}")

    def get_protocol(self, name: str) -> Optional[MatmulProtocol]:
        """Get a protocol by name

        Args:
            name: Registry name

        Returns:
            The protocol or None if not found
        """
        protocol = self.protocols.get(name)
        if not protocol:
            self.logger.warning(f"No protocol registered under: {name}")
        return protocol

    def require(self, name: str) -> MatmulProtocol:
        """Like get_protocol but raise ConfigError for unknown names"""
        protocol = self.get_protocol(name)
        if protocol is None:
            raise ConfigError(f"Unknown protocol '{name}', expected one of {self.names}")
        return protocol

    @property
    def names(self) -> List[str]:
        """Get list of all registered protocol names

        Returns:
            List of names in registration order
        """
        return list(self.protocols.keys())


def default_registry() -> ProtocolRegistry:
    """Registry holding dense, insensitive, sensitive-pir and sensitive-full-transfer"""
    from ..protocols.matmul_protocols import (
        DenseMatmulProtocol,
        InsensitiveMatmulProtocol,
        SensitiveMatmulProtocol,
    )
    registry = ProtocolRegistry()
    registry.register_protocol(DenseMatmulProtocol())
    registry.register_protocol(InsensitiveMatmulProtocol())
    registry.register_protocol(SensitiveMatmulProtocol("pir"))
    registry.register_protocol(SensitiveMatmulProtocol("full-transfer"))
    return registry
