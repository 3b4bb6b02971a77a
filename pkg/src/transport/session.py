# File: s3rec/src/transport/session.py
import asyncio
import logging
import secrets
from typing import Any, Awaitable, Dict, Optional, Tuple

import numpy as np

from ..core.interfaces.channel import Channel
from ..utils.error_handling import ConfigError, ProtocolError, TransportError
from .channel_factory import ChannelFactory
from .framing import HEADER_SIZE, MsgType, decode_header, encode_frame, phase_name
from .stats import ChannelStats


class PartySession:
    """One party's end of a live two-party protocol session

    Party 0 is the rating platform, party 1 the social platform. Every frame
    that crosses the channel goes through ``send``/``recv`` so the stats are
    complete.
    """

    def __init__(self, party_id: int, channel: Channel, rng_seed: Optional[int] = 0, log_frames: bool = False):
        if party_id not in (0, 1):
            raise ConfigError(f"party_id must be 0 or 1, got {party_id}")
        self.party_id = party_id
        self.channel = channel
        # None draws fresh entropy; seeded sessions replay identically
        self.rng_seed = secrets.randbits(63) if rng_seed is None else int(rng_seed)
        self.stats = ChannelStats(log_frames=log_frames)
        self.rng = np.random.default_rng([self.rng_seed, party_id])
        # Per-session material exchanged once (peer public key, handshake values)
        self.context: Dict[str, Any] = {}
        self.logger = logging.getLogger("s3rec.transport.session")

    @property
    def peer_id(self) -> int:
        return 1 - self.party_id

    async def send(self, phase, msg_type: MsgType, payload: bytes) -> None:
        """Write one frame and account it under ``phase``

        Raises:
            TransportError: If the channel is closed
        """
        phase_value = phase_name(phase)
        frame = encode_frame(msg_type, payload)
        try:
            await self.channel.write(frame)
        except TransportError as exc:
            raise TransportError(f"P{self.party_id} send failed: {exc.message}", phase=phase_value) from exc
        self.stats.record_sent(phase_value, msg_type, len(payload))
        self.logger.debug(f"P{self.party_id} sent {msg_type.name} ({len(payload)} B) in {phase_value}")

    async def recv(self, phase: Optional[str] = None) -> Tuple[MsgType, bytes]:
        """Read the next complete frame

        Args:
            phase: Optional phase name used only for error context

        Returns:
            (message type, payload)

        Raises:
            TransportError: If the channel is closed or the peer closed cleanly
            ProtocolError: If the stream ends inside a frame or the type is unknown
        """
        phase_value = phase_name(phase) if phase is not None else None
        if self.channel.closed:
            raise TransportError(f"P{self.party_id} recv on closed channel", phase=phase_value)
        try:
            header = await self.channel.read_exactly(HEADER_SIZE)
        except TransportError as exc:
            if exc.partial:
                raise ProtocolError(
                    f"Truncated frame header ({exc.partial} of {HEADER_SIZE} bytes)",
                    details={"phase": phase_value}
                ) from exc
            raise TransportError(f"P{self.party_id}: peer closed the channel", phase=phase_value) from exc
        length, msg_type = decode_header(header)
        try:
            payload = await self.channel.read_exactly(length) if length else b""
        except TransportError as exc:
            raise ProtocolError(
                f"Truncated {msg_type.name} frame ({exc.partial} of {length} payload bytes)",
                details={"phase": phase_value}
            ) from exc
        self.stats.record_received(msg_type, length)
        self.logger.debug(f"P{self.party_id} received {msg_type.name} ({length} B)")
        return msg_type, payload

    async def expect(self, msg_type: MsgType, phase: Optional[str] = None) -> bytes:
        """Receive a frame and require its type

        Raises:
            ProtocolError: If a different message type arrives
        """
        received, payload = await self.recv(phase)
        if received != msg_type:
            raise ProtocolError(
                f"P{self.party_id} expected {msg_type.name}, got {received.name}",
                details={"phase": phase}
            )
        return payload

    async def close(self) -> None:
        await self.channel.close()
        self.logger.debug(f"P{self.party_id} session closed")


def create_session_pair(rng_seed: int = 0, latency_ms: float = None,
                        log_frames: bool = False) -> Tuple[PartySession, PartySession]:
    """Create both parties' sessions over an in-process channel pair

    Must be called inside a running event loop. ``log_frames`` keeps the
    per-frame transcript in each session's stats.
    """
    left, right = ChannelFactory.create_inproc_pair(latency_ms)
    return (PartySession(0, left, rng_seed, log_frames),
            PartySession(1, right, rng_seed, log_frames))


async def run_pair(first: Awaitable, second: Awaitable) -> Tuple[Any, Any]:
    """Run both parties' coroutines concurrently

    If either fails, the other is cancelled (it would otherwise block on a
    read forever) and the first failure is raised.

    Returns:
        (result of first, result of second)
    """
    tasks = [asyncio.ensure_future(first), asyncio.ensure_future(second)]
    done, pending = await asyncio.wait(tasks, return_when=asyncio.FIRST_EXCEPTION)
    for task in pending:
        task.cancel()
    if pending:
        await asyncio.gather(*pending, return_exceptions=True)
    for task in tasks:
        if task.done() and not task.cancelled() and task.exception() is not None:
            raise task.exception()
    return tasks[0].result(), tasks[1].result()
