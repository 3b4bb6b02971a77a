# File: s3rec/src/transport/tcp_channel.py
import asyncio
import logging
from typing import Optional

from ..core.interfaces.channel import Channel
from ..utils.error_handling import TransportError

# Large enough that a peer never pauses reading while both sides flush big batches.
STREAM_LIMIT = 1 << 30


class TcpChannel(Channel):
    """Channel over a TCP connection using asyncio streams"""

    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter, name: str = "tcp"):
        self._reader = reader
        self._writer = writer
        self._closed = False
        self.name = name
        self.logger = logging.getLogger("s3rec.transport.tcp")

    @classmethod
    async def connect(cls, host: str, port: int, retries: int = 20, retry_delay: float = 0.25) -> "TcpChannel":
        """Connect to a listening peer

        Args:
            host: Peer host
            port: Peer port
            retries: Connection attempts before giving up
            retry_delay: Seconds between attempts

        Returns:
            Connected channel

        Raises:
            TransportError: If no attempt succeeds
        """
        logger = logging.getLogger("s3rec.transport.tcp")
        last_error: Optional[Exception] = None
        for attempt in range(1, max(1, retries) + 1):
            try:
                reader, writer = await asyncio.open_connection(host, port, limit=STREAM_LIMIT)
                logger.info(f"Connected to {host}:{port} on attempt {attempt}")
                return cls(reader, writer, name=f"tcp->{host}:{port}")
            except OSError as exc:
                last_error = exc
                logger.debug(f"Connection attempt {attempt} to {host}:{port} failed: {exc}")
                if attempt < retries:
                    await asyncio.sleep(retry_delay)
        raise TransportError(f"Could not reach peer at {host}:{port}: {last_error}")

    @classmethod
    async def listen(cls, host: str, port: int, timeout: Optional[float] = None) -> "TcpChannel":
        """Accept exactly one peer connection

        Args:
            host: Interface to bind
            port: Port to bind
            timeout: Seconds to wait for the peer (None waits forever)

        Returns:
            Connected channel
        """
        logger = logging.getLogger("s3rec.transport.tcp")
        accepted: asyncio.Future = asyncio.get_running_loop().create_future()

        def on_connect(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
            if accepted.done():
                writer.close()
                return
            accepted.set_result((reader, writer))

        try:
            server = await asyncio.start_server(on_connect, host, port, limit=STREAM_LIMIT)
        except OSError as exc:
            raise TransportError(f"Could not listen on {host}:{port}: {exc}") from exc
        logger.info(f"Listening for peer on {host}:{port}")
        try:
            reader, writer = await asyncio.wait_for(accepted, timeout)
        except asyncio.TimeoutError as exc:
            raise TransportError(f"No peer connected to {host}:{port} within {timeout}s") from exc
        finally:
            server.close()
        peer = writer.get_extra_info("peername")
        logger.info(f"Accepted peer {peer}")
        return cls(reader, writer, name=f"tcp<-{peer}")

    @property
    def closed(self) -> bool:
        return self._closed

    async def write(self, data: bytes) -> None:
        if self._closed:
            raise TransportError(f"{self.name}: write on closed channel")
        try:
            self._writer.write(data)
            await self._writer.drain()
        except (ConnectionError, RuntimeError) as exc:
            raise TransportError(f"{self.name}: write failed: {exc}") from exc

    async def read_exactly(self, size: int) -> bytes:
        if self._closed:
            raise TransportError(f"{self.name}: read on closed channel")
        try:
            return await self._reader.readexactly(size)
        except asyncio.IncompleteReadError as exc:
            raise TransportError(f"{self.name}: peer closed the channel", partial=len(exc.partial)) from exc
        except ConnectionError as exc:
            raise TransportError(f"{self.name}: read failed: {exc}") from exc

    async def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        self._writer.close()
        try:
            await self._writer.wait_closed()
        except ConnectionError:
            pass
        self.logger.debug(f"{self.name} closed")
