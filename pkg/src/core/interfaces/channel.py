# File: s3rec/src/core/interfaces/channel.py
from abc import ABC, abstractmethod


class Channel(ABC):
    """Interface for a reliable, ordered, full-duplex byte stream to the peer"""

    @abstractmethod
    async def write(self, data: bytes) -> None:
        """Write bytes to the peer

        Args:
            data: Raw bytes (already framed)

        Raises:
            TransportError: If either side has closed the channel
        """
        pass

    @abstractmethod
    async def read_exactly(self, size: int) -> bytes:
        """Read exactly ``size`` bytes from the peer

        Raises:
            TransportError: If the stream ends first; ``partial`` carries
                the number of bytes that did arrive
        """
        pass

    @abstractmethod
    async def close(self) -> None:
        """Close the local end; the peer observes end of stream"""
        pass

    @property
    @abstractmethod
    def closed(self) -> bool:
        pass
