# File: s3rec/src/transport/inproc_channel.py
import asyncio
import logging
from typing import Optional, Tuple

from ..core.interfaces.channel import Channel
from ..utils.error_handling import TransportError


class InProcChannel(Channel):
    """In-memory duplex channel; both ends live in the same event loop"""

    def __init__(self, name: str, latency_ms: float = 0.0):
        self.name = name
        self.latency_ms = latency_ms
        self._inbox = asyncio.StreamReader()
        self._peer: Optional["InProcChannel"] = None
        self._closed = False
        self.logger = logging.getLogger("s3rec.transport.inproc")

    @classmethod
    def create_pair(cls, latency_ms: float = 0.0) -> Tuple["InProcChannel", "InProcChannel"]:
        """Create two connected ends; must be called inside a running event loop

        Args:
            latency_ms: Artificial one-way delay applied to every write

        Returns:
            (end for party 0, end for party 1)
        """
        left = cls("inproc-0", latency_ms)
        right = cls("inproc-1", latency_ms)
        left._peer = right
        right._peer = left
        return left, right

    @property
    def closed(self) -> bool:
        return self._closed

    async def write(self, data: bytes) -> None:
        if self._closed:
            raise TransportError(f"{self.name}: write on closed channel")
        if self._peer is None or self._peer.closed:
            raise TransportError(f"{self.name}: peer has closed the channel")
        if self.latency_ms:
            await asyncio.sleep(self.latency_ms / 1000.0)
        self._peer._inbox.feed_data(data)

    async def read_exactly(self, size: int) -> bytes:
        if self._closed:
            raise TransportError(f"{self.name}: read on closed channel")
        try:
            return await self._inbox.readexactly(size)
        except asyncio.IncompleteReadError as exc:
            raise TransportError(f"{self.name}: peer closed the channel", partial=len(exc.partial)) from exc

    async def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        self._inbox.feed_eof()
        if self._peer is not None and not self._peer.closed:
            self._peer._inbox.feed_eof()
        self.logger.debug(f"{self.name} closed")
