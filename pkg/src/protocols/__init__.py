# File: s3rec/src/protocols/__init__.py
"""
Secure matrix-multiplication protocols and the social-term protocol.
"""

from .report import ProtocolReport, combined_payload
from .formulas import (
    ByteForecast,
    predict_dense,
    predict_insensitive,
    predict_sensitive,
    predict_st_mpc,
    predict_triples,
)
from .resources import ProtocolResources, exchange_keys
from .matmul_dense import matmul_dense
from .matmul_insensitive import matmul_insensitive
from .matmul_sensitive import SENSITIVE_MODES, matmul_sensitive, padded_query_count, check_plaintext_space
from .st_mpc import st_mpc
from .matmul_protocols import DenseMatmulProtocol, InsensitiveMatmulProtocol, SensitiveMatmulProtocol

__all__ = [
    "ProtocolReport",
    "combined_payload",
    "ByteForecast",
    "predict_dense",
    "predict_insensitive",
    "predict_sensitive",
    "predict_st_mpc",
    "predict_triples",
    "ProtocolResources",
    "exchange_keys",
    "matmul_dense",
    "matmul_insensitive",
    "SENSITIVE_MODES",
    "matmul_sensitive",
    "padded_query_count",
    "check_plaintext_space",
    "st_mpc",
    "DenseMatmulProtocol",
    "InsensitiveMatmulProtocol",
    "SensitiveMatmulProtocol",
]
