# File: s3rec/src/protocols/formulas.py
"""
Closed-form payload byte counts, both parties summed.

Ring elements are 8 bytes; C is the serialized ciphertext size of the
matrix-encryption key. Frame headers are not included (wire bytes add 5
per frame).
"""

from typing import Dict

from pydantic import BaseModel

from ..mpc.ring import RING_ELEMENT_BYTES as W
from .report import combined_payload, ProtocolReport

DIGEST_BYTES = 32
QUERY_COUNT_BYTES = 8


class ByteForecast(BaseModel):
    """Predicted payload bytes per phase"""
    offline: int = 0
    input: int = 0
    compute: int = 0
    output: int = 0

    @property
    def online(self) -> int:
        return self.input + self.compute + self.output

    @property
    def total(self) -> int:
        return self.offline + self.online

    def as_phases(self) -> Dict[str, int]:
        return {"offline": self.offline, "input": self.input, "compute": self.compute, "output": self.output}

    def matches(self, *reports: ProtocolReport) -> bool:
        return combined_payload(*reports) == self.as_phases()


def predict_dense(k: int, m: int, cols: int = None) -> ByteForecast:
    """k x m times m x cols: one triple per scalar product"""
    cols = m if cols is None else cols
    return ByteForecast(input=W * (k * m + m * cols), compute=2 * 2 * W * k * m * cols)


def predict_insensitive(k: int, m: int, t: int) -> ByteForecast:
    """Digest exchange, k*t bin entries from P0, t values from P1, k*t products"""
    return ByteForecast(input=2 * DIGEST_BYTES + W * (k * t + t), compute=2 * 2 * W * k * t)


def predict_sensitive(k: int, m: int, ciphertext_bytes: int, mode: str = "pir", queries: int = 0,
                      query_bytes: int = 0, response_bytes: int = 0, cols: int = None) -> ByteForecast:
    """Sensitive-sparsity product

    Args:
        k, m: Shape of X
        ciphertext_bytes: C, size of one matrix-key ciphertext
        mode: "pir" or "full-transfer"
        queries: PIR queries issued (padding included)
        query_bytes, response_bytes: Serialized PIR query/response sizes
        cols: Columns of Y (defaults to m)
    """
    cols = m if cols is None else cols
    if mode == "full-transfer":
        input_bytes = k * m * ciphertext_bytes
    else:
        input_bytes = QUERY_COUNT_BYTES + queries * (query_bytes + response_bytes)
    return ByteForecast(input=input_bytes, compute=k * cols * ciphertext_bytes)


def predict_st_mpc(k: int, m: int, t: int, ciphertext_bytes: int, mode: str = "pir", queries: int = 0,
                   query_bytes: int = 0, response_bytes: int = 0) -> ByteForecast:
    """Insensitive product over the full diagonal, sensitive product over S^T, one reconstruction"""
    diagonal = predict_insensitive(k, m, m)
    social = predict_sensitive(k, m, ciphertext_bytes, mode, queries, query_bytes, response_bytes)
    return ByteForecast(
        input=diagonal.input + social.input,
        compute=diagonal.compute + social.compute,
        output=W * k * m,
    )


def predict_triples(count: int) -> ByteForecast:
    """Dealer shipping P1's shares over the channel"""
    return ByteForecast(offline=3 * W * count)
