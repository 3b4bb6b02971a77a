# File: s3rec/src/transport/channel_factory.py
import logging
import os
from typing import Any, Dict, Tuple

from ..core.interfaces.channel import Channel
from ..utils.error_handling import ConfigError
from .inproc_channel import InProcChannel
from .tcp_channel import TcpChannel


class ChannelFactory:
    """Factory for creating channel backends"""

    @staticmethod
    def create_inproc_pair(latency_ms: float = None) -> Tuple[Channel, Channel]:
        """Create a connected in-process channel pair

        Args:
            latency_ms: Optional artificial latency; falls back to S3REC_LATENCY_MS

        Returns:
            (party 0 end, party 1 end)
        """
        logger = logging.getLogger("s3rec.transport.factory")
        if latency_ms is None:
            latency_ms = float(os.getenv("S3REC_LATENCY_MS", "0"))
        logger.info(f"Creating in-process channel pair (latency {latency_ms} ms)")
        return InProcChannel.create_pair(latency_ms)

    @staticmethod
    async def create_tcp(party_id: int, config: Dict[str, Any] = None) -> Channel:
        """Create the TCP end for one party

        Party 1 (the social platform) listens and party 0 connects, so a
        party 0 started without a reachable peer fails fast.

        Args:
            party_id: 0 or 1
            config: Optional keys host, port, connect_retries, accept_timeout

        Returns:
            Connected channel
        """
        logger = logging.getLogger("s3rec.transport.factory")
        if config is None:
            config = {}
        host = config.get("host") or os.getenv("S3REC_HOST", "127.0.0.1")
        port = int(config.get("port") or os.getenv("S3REC_PORT", "9450"))
        if party_id == 1:
            timeout = config.get("accept_timeout")
            logger.info(f"Party 1 listening on {host}:{port}")
            return await TcpChannel.listen(host, port, timeout=timeout)
        if party_id == 0:
            retries = int(config.get("connect_retries") or os.getenv("S3REC_CONNECT_RETRIES", "20"))
            logger.info(f"Party 0 connecting to {host}:{port}")
            return await TcpChannel.connect(host, port, retries=retries)
        raise ConfigError(f"party_id must be 0 or 1, got {party_id}")
