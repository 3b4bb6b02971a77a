# File: s3rec/src/mpc/shares.py
"""
Additive secret sharing over Z_{2^64}.

A ``Share`` holds one party's residues for a whole batch (any array
shape) plus the fixed-point scale tag of the shared value. Local
operations never touch the channel; ``shr``, ``rec`` and ``mul`` do.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..transport.framing import MsgType, Phase
from ..utils.error_handling import ProtocolError, ShapeError, UsageError
from .dealer import BeaverTriple
from .ring import RING_DTYPE, RING_ELEMENT_BYTES, as_ring, random_ring, ring_from_bytes, ring_to_bytes

logger = logging.getLogger("s3rec.mpc.shares")


@dataclass
class Share:
    """One party's additive share of a batch of ring values

    Attributes:
        owner: Party holding this share
        value: uint64 residues
        scale: Fraction bits carried by the shared value
    """
    owner: int
    value: np.ndarray
    scale: int = 0

    def __post_init__(self):
        self.value = as_ring(self.value)

    @property
    def shape(self):
        return self.value.shape


class SharedMatrix(Share):
    """A Share whose value is a rows x cols grid"""

    def __post_init__(self):
        super().__post_init__()
        if self.value.ndim != 2:
            raise ShapeError(f"SharedMatrix needs a 2-D share, got shape {self.value.shape}")

    @property
    def rows(self) -> int:
        return int(self.value.shape[0])

    @property
    def cols(self) -> int:
        return int(self.value.shape[1])

    @classmethod
    def of(cls, share: Share) -> "SharedMatrix":
        return cls(share.owner, share.value, share.scale)


def _check_scales(x: Share, y: Share) -> None:
    if x.scale != y.scale:
        raise UsageError(f"Scale mismatch: {x.scale} vs {y.scale} fraction bits")
    if x.value.shape != y.value.shape:
        raise ShapeError(f"Share shapes differ: {x.value.shape} vs {y.value.shape}")


async def shr(session, x, scale: int = 0, phase=Phase.INPUT) -> Share:
    """Secret-share a value held in the clear by this party

    A uniform mask r goes to the peer in one SHARE_BATCH; the caller keeps x - r.

    Args:
        session: PartySession of the input owner
        x: Ring values to share
        scale: Fraction bits of ``x``
        phase: Accounting phase

    Returns:
        The caller's share
    """
    values = as_ring(x)
    mask = random_ring(session.rng, values.shape)
    await session.send(phase, MsgType.SHARE_BATCH, ring_to_bytes(mask))
    return Share(session.party_id, values - mask, scale)


async def recv_shr(session, shape, scale: int = 0, phase=Phase.INPUT) -> Share:
    """Receive the peer's mask as this party's share of the peer's input"""
    payload = await session.expect(MsgType.SHARE_BATCH, Phase(phase).value)
    expected = int(np.prod(shape, dtype=np.int64)) * RING_ELEMENT_BYTES
    if len(payload) != expected:
        raise ProtocolError(f"SHARE_BATCH carries {len(payload)} bytes, expected {expected}")
    return Share(session.party_id, ring_from_bytes(payload, shape), scale)


async def input_share(session, owner: int, x=None, shape=None, scale: int = 0, phase=Phase.INPUT) -> Share:
    """Run shr at ``owner`` and recv_shr at the other party"""
    if session.party_id == owner:
        return await shr(session, x, scale, phase)
    if shape is None:
        raise UsageError("The receiving party must know the public shape of the input")
    return await recv_shr(session, shape, scale, phase)


async def rec(session, s: Share, to: int, phase=Phase.OUTPUT) -> Optional[np.ndarray]:
    """Reconstruct a shared value at party ``to``

    The other party sends its share in one OPEN_BATCH and learns nothing.

    Returns:
        Reconstructed residues at ``to``; None at the other party
    """
    if session.party_id != to:
        await session.send(phase, MsgType.OPEN_BATCH, ring_to_bytes(s.value))
        return None
    payload = await session.expect(MsgType.OPEN_BATCH, Phase(phase).value)
    if len(payload) != s.value.size * RING_ELEMENT_BYTES:
        raise ProtocolError(f"OPEN_BATCH carries {len(payload)} bytes, expected {s.value.size * RING_ELEMENT_BYTES}")
    return s.value + ring_from_bytes(payload, s.value.shape)


def add(x: Share, y: Share) -> Share:
    _check_scales(x, y)
    return Share(x.owner, x.value + y.value, x.scale)


def sub(x: Share, y: Share) -> Share:
    _check_scales(x, y)
    return Share(x.owner, x.value - y.value, x.scale)


def neg(x: Share) -> Share:
    return Share(x.owner, np.negative(x.value), x.scale)


def mul_public(x: Share, c, c_scale: int = 0) -> Share:
    """Multiply by a public ring constant; the scale tags add"""
    return Share(x.owner, x.value * as_ring(c), x.scale + c_scale)


def add_public(x: Share, c) -> Share:
    """Add a public ring constant (party 0 absorbs it)"""
    if x.owner == 0:
        return Share(x.owner, x.value + as_ring(c), x.scale)
    return Share(x.owner, x.value.copy(), x.scale)


def zeros_share(owner: int, shape, scale: int = 0) -> Share:
    return Share(owner, np.zeros(shape, dtype=RING_DTYPE), scale)


async def mul(session, x: Share, y: Share, triple: BeaverTriple, phase=Phase.COMPUTE) -> Share:
    """Elementwise Beaver multiplication

    Each party opens d = x - a and e = y - b in a single OPEN_BATCH
    (2 x 8 bytes per scalar product), then computes
    z = c + d*b + e*a (+ d*e at party 0).

    Args:
        session: This party's PartySession
        x, y: Shares with equal shape and scale
        triple: Unused batch with x.size triples
        phase: Accounting phase

    Returns:
        Share of x*y carrying scale x.scale + y.scale; the caller truncates
    """
    _check_scales(x, y)
    if triple.consumed:
        raise UsageError("Beaver triple batch reused", details={"size": triple.size})
    if triple.size != x.value.size:
        raise ShapeError(f"Triple batch of {triple.size} does not match {x.value.size} products")
    triple.mark_consumed()
    a = triple.a.reshape(x.value.shape)
    b = triple.b.reshape(x.value.shape)
    c = triple.c.reshape(x.value.shape)

    d = x.value - a
    e = y.value - b
    await session.send(phase, MsgType.OPEN_BATCH, ring_to_bytes(d) + ring_to_bytes(e))
    payload = await session.expect(MsgType.OPEN_BATCH, Phase(phase).value)
    half = d.size * RING_ELEMENT_BYTES
    if len(payload) != 2 * half:
        raise ProtocolError(f"OPEN_BATCH carries {len(payload)} bytes, expected {2 * half}")
    d_open = d + ring_from_bytes(payload[:half], d.shape)
    e_open = e + ring_from_bytes(payload[half:], e.shape)

    z = c + d_open * b + e_open * a
    if session.party_id == 0:
        z = z + d_open * e_open
    return Share(session.party_id, z, x.scale + y.scale)
