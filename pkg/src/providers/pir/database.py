# File: s3rec/src/providers/pir/database.py
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from ...utils.error_handling import ProtocolError, UsageError

PLAIN_TAG = 0x01
AHE_LINEAR_TAG = 0x02


class PirDatabase:
    """Server-side database of equally sized opaque blobs"""

    def __init__(self, entries: Sequence[bytes]):
        entries = [bytes(entry) for entry in entries]
        if not entries:
            raise UsageError("A PIR database needs at least one entry")
        size = len(entries[0])
        if any(len(entry) != size for entry in entries):
            raise UsageError("All PIR database entries must share one size")
        self.entries: List[bytes] = entries
        self.entry_size = size

    @property
    def count(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: int) -> bytes:
        return self.entries[index]


@dataclass(frozen=True)
class PirMessage:
    """Backend tag plus backend-specific payload"""
    tag: int
    payload: bytes

    def to_bytes(self) -> bytes:
        return bytes([self.tag]) + self.payload

    @classmethod
    def from_bytes(cls, data: bytes, expected_tag: Optional[int] = None):
        if not data:
            raise ProtocolError("Empty PIR message")
        if expected_tag is not None and data[0] != expected_tag:
            raise ProtocolError(f"PIR message tag {data[0]:#04x} does not match backend tag {expected_tag:#04x}")
        return cls(data[0], bytes(data[1:]))


class PirQuery(PirMessage):
    pass


class PirResponse(PirMessage):
    pass


@dataclass
class PirClientState:
    """Per-database client state; ``index`` tracks the outstanding query"""
    count: int
    entry_size: int
    index: Optional[int] = None
    extra: Dict[str, Any] = field(default_factory=dict)
