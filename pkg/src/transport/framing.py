# File: s3rec/src/transport/framing.py
"""
Frame layout shared by every channel backend:

    length   4 bytes, little-endian unsigned (payload byte count)
    msg_type 1 byte
    payload  length bytes
"""

import struct
from enum import Enum, IntEnum
from typing import Tuple

from ..utils.error_handling import ProtocolError, UsageError

HEADER = struct.Struct("<IB")
HEADER_SIZE = HEADER.size
MAX_PAYLOAD = (1 << 32) - 1


class MsgType(IntEnum):
    SHARE_BATCH = 1
    OPEN_BATCH = 2
    AHE_CIPHERTEXT_BATCH = 3
    PIR_QUERY = 4
    PIR_RESPONSE = 5
    CONTROL = 6


class Phase(str, Enum):
    """Accounting phases; offline mirrors preprocessing, the rest are online"""
    OFFLINE = "offline"
    INPUT = "input"
    COMPUTE = "compute"
    OUTPUT = "output"


PHASES = tuple(phase.value for phase in Phase)
ONLINE_PHASES = (Phase.INPUT.value, Phase.COMPUTE.value, Phase.OUTPUT.value)


def encode_frame(msg_type: MsgType, payload: bytes) -> bytes:
    """Prefix a payload with its frame header"""
    if len(payload) > MAX_PAYLOAD:
        raise UsageError(f"Payload of {len(payload)} bytes exceeds the frame limit")
    return HEADER.pack(len(payload), int(msg_type)) + payload


def decode_header(header: bytes) -> Tuple[int, MsgType]:
    """Parse a 5-byte header

    Returns:
        (payload length, message type)

    Raises:
        ProtocolError: If the header is short or the type is unknown
    """
    if len(header) != HEADER_SIZE:
        raise ProtocolError(f"Truncated frame header ({len(header)} of {HEADER_SIZE} bytes)")
    length, raw_type = HEADER.unpack(header)
    try:
        msg_type = MsgType(raw_type)
    except ValueError as exc:
        raise ProtocolError(f"Unknown message type {raw_type}", details={"msg_type": raw_type}) from exc
    return length, msg_type


def phase_name(phase) -> str:
    """Normalise a Phase member or string to its value"""
    value = phase.value if isinstance(phase, Phase) else str(phase)
    if value not in PHASES:
        raise UsageError(f"Unknown accounting phase: {value}")
    return value
