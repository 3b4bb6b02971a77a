# File: s3rec/src/core/interfaces/matmul_protocol.py
from abc import ABC, abstractmethod
from typing import Any, Optional, Tuple


class MatmulProtocol(ABC):
    """Interface for two-party secure matrix multiplication protocols

    Party 0 contributes X (k x m), party 1 contributes Y (m x m). Both
    parties call ``run`` with the same public parameters.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Registry name of the protocol"""
        pass

    @abstractmethod
    async def run(self, session, X: Any = None, Y: Any = None, *, k: int, m: int,
                  resources: Any, scale: int = 0, pattern: Any = None) -> Tuple[Any, Any]:
        """Execute the protocol

        Returns:
            (this party's SharedMatrix, this party's ProtocolReport)
        """
        pass

    @abstractmethod
    def predict(self, k: int, m: int, t: int = 0, *, distinct_rows: int = 0,
                resources: Optional[Any] = None) -> Any:
        """Closed-form payload bytes (ByteForecast), both parties summed"""
        pass

    @abstractmethod
    def triples_required(self, k: int, m: int, t: int = 0) -> int:
        """Beaver triples one invocation consumes"""
        pass
