# File: s3rec/src/protocols/report.py
import json
from typing import Dict

from pydantic import BaseModel, Field

from ..transport.framing import ONLINE_PHASES, PHASES
from ..transport.stats import ChannelStats


def _zero_phases() -> Dict[str, int]:
    return {phase: 0 for phase in PHASES}


class ProtocolReport(BaseModel):
    """Measured cost of one protocol invocation at one party"""
    protocol: str
    party_id: int
    k: int = 0
    m: int = 0
    cols: int = 0
    t: int = 0
    triples_consumed: int = 0
    scalar_muls: int = 0
    pir_queries: int = 0
    ciphertexts_sent: int = 0
    ciphertexts_received: int = 0
    payload_bytes: Dict[str, int] = Field(default_factory=_zero_phases)
    wire_bytes: Dict[str, int] = Field(default_factory=_zero_phases)
    frames_sent: Dict[str, int] = Field(default_factory=dict)

    @classmethod
    def from_stats(cls, protocol: str, party_id: int, delta: ChannelStats, **counters) -> "ProtocolReport":
        """Build a report from a ChannelStats delta plus protocol counters"""
        return cls(
            protocol=protocol,
            party_id=party_id,
            payload_bytes=dict(delta.payload_sent),
            wire_bytes=dict(delta.bytes_sent),
            frames_sent={key.name: count for key, count in sorted(delta.frames_sent.items())},
            **counters,
        )

    @property
    def online_payload(self) -> int:
        return sum(self.payload_bytes[phase] for phase in ONLINE_PHASES)

    @property
    def total_payload(self) -> int:
        return sum(self.payload_bytes.values())

    def as_text(self) -> str:
        """Flat ``key = value`` block"""
        lines = []
        for key, value in self.model_dump().items():
            if isinstance(value, dict):
                for sub_key, sub_value in value.items():
                    lines.append(f"{key}.{sub_key} = {sub_value}")
            else:
                lines.append(f"{key} = {value}")
        return "\n".join(lines)

    def as_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True)


def combined_payload(*reports: ProtocolReport) -> Dict[str, int]:
    """Payload bytes per phase summed over both parties' reports"""
    totals = _zero_phases()
    for report in reports:
        for phase, count in report.payload_bytes.items():
            totals[phase] += count
    return totals
