# File: s3rec/src/transport/stats.py
import copy
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List

from .framing import HEADER_SIZE, PHASES, ONLINE_PHASES, MsgType


@dataclass(frozen=True)
class FrameRecord:
    """One frame as seen by the local party"""
    direction: str  # "sent" or "received"
    msg_type: MsgType
    payload_len: int
    phase: str = ""


def _zero_phases() -> Dict[str, int]:
    return {phase: 0 for phase in PHASES}


@dataclass
class ChannelStats:
    """Byte and frame accounting for one side of a channel

    ``bytes_sent`` counts wire bytes (header + payload) per phase and
    ``payload_sent`` counts payload bytes only. Communication formulas are
    stated in payload bytes; wire bytes add 5 per frame.

    The per-frame ``frame_log`` is kept only when ``log_frames`` is set, so
    long training sessions hold counters and nothing that grows per frame.
    """
    bytes_sent: Dict[str, int] = field(default_factory=_zero_phases)
    payload_sent: Dict[str, int] = field(default_factory=_zero_phases)
    frames_sent: Counter = field(default_factory=Counter)
    bytes_received: int = 0
    payload_received: int = 0
    frames_received: Counter = field(default_factory=Counter)
    frame_log: List[FrameRecord] = field(default_factory=list)
    log_frames: bool = False

    def record_sent(self, phase: str, msg_type: MsgType, payload_len: int) -> None:
        self.bytes_sent[phase] += HEADER_SIZE + payload_len
        self.payload_sent[phase] += payload_len
        self.frames_sent[msg_type] += 1
        if self.log_frames:
            self.frame_log.append(FrameRecord("sent", msg_type, payload_len, phase))

    def record_received(self, msg_type: MsgType, payload_len: int) -> None:
        self.bytes_received += HEADER_SIZE + payload_len
        self.payload_received += payload_len
        self.frames_received[msg_type] += 1
        if self.log_frames:
            self.frame_log.append(FrameRecord("received", msg_type, payload_len))

    @property
    def total_sent(self) -> int:
        return sum(self.bytes_sent.values())

    @property
    def online_payload_sent(self) -> int:
        return sum(self.payload_sent[phase] for phase in ONLINE_PHASES)

    def snapshot(self) -> "ChannelStats":
        """Independent copy for later delta computation"""
        return copy.deepcopy(self)

    def delta(self, before: "ChannelStats") -> "ChannelStats":
        """Traffic accumulated since ``before`` was snapshotted"""
        return ChannelStats(
            bytes_sent={p: self.bytes_sent[p] - before.bytes_sent[p] for p in PHASES},
            payload_sent={p: self.payload_sent[p] - before.payload_sent[p] for p in PHASES},
            frames_sent=self.frames_sent - before.frames_sent,
            bytes_received=self.bytes_received - before.bytes_received,
            payload_received=self.payload_received - before.payload_received,
            frames_received=self.frames_received - before.frames_received,
            frame_log=self.frame_log[len(before.frame_log):],
            log_frames=self.log_frames,
        )

    def sent_sizes(self) -> List[int]:
        """Payload sizes of sent frames in order"""
        return [record.payload_len for record in self.frame_log if record.direction == "sent"]

    def as_dict(self) -> Dict[str, object]:
        return {
            "bytes_sent": dict(self.bytes_sent),
            "payload_sent": dict(self.payload_sent),
            "frames_sent": {MsgType(key).name: count for key, count in sorted(self.frames_sent.items())},
            "bytes_received": self.bytes_received,
            "payload_received": self.payload_received,
        }
