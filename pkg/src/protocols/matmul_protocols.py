# File: s3rec/src/protocols/matmul_protocols.py
import logging
from typing import Optional

from ..core.interfaces.matmul_protocol import MatmulProtocol
from ..mpc.dealer import triples_required
from ..providers.ahe.paillier_provider import ciphertext_size
from ..utils.error_handling import UsageError
from .formulas import ByteForecast, predict_dense, predict_insensitive, predict_sensitive
from .matmul_dense import matmul_dense
from .matmul_insensitive import matmul_insensitive
from .matmul_sensitive import SENSITIVE_MODES, matmul_sensitive, padded_query_count
from .resources import ProtocolResources


class DenseMatmulProtocol(MatmulProtocol):
    """Naive protocol: share everything, one triple per scalar product"""

    @property
    def name(self) -> str:
        return "dense"

    async def run(self, session, X=None, Y=None, *, k, m, resources: ProtocolResources, scale=0, pattern=None):
        return await matmul_dense(session, X, Y, k=k, m=m, triples=resources.require_triples(), scale=scale)

    def predict(self, k, m, t=0, *, distinct_rows=0, resources=None) -> ByteForecast:
        return predict_dense(k, m)

    def triples_required(self, k, m, t=0) -> int:
        return triples_required(k, m, t, "dense")


class InsensitiveMatmulProtocol(MatmulProtocol):
    """Public l_y: only bin contents are shared and multiplied"""

    @property
    def name(self) -> str:
        return "insensitive"

    async def run(self, session, X=None, Y=None, *, k, m, resources: ProtocolResources, scale=0, pattern=None):
        if pattern is None:
            if Y is None:
                raise UsageError("Party 0 must be given the public pattern l_y")
            pattern = Y
        return await matmul_insensitive(session, X, Y, k=k, m=m, pattern=pattern,
                                        triples=resources.require_triples(), scale=scale)

    def predict(self, k, m, t=0, *, distinct_rows=0, resources=None) -> ByteForecast:
        return predict_insensitive(k, m, t)

    def triples_required(self, k, m, t=0) -> int:
        return triples_required(k, m, t, "insensitive")


class SensitiveMatmulProtocol(MatmulProtocol):
    """Private l_y: encrypted X, PIR or full transfer, masked homomorphic sums"""

    def __init__(self, mode: str = "pir"):
        if mode not in SENSITIVE_MODES:
            raise UsageError(f"Unknown sensitive mode '{mode}'")
        self.mode = mode
        self.logger = logging.getLogger("s3rec.protocols.sensitive")

    @property
    def name(self) -> str:
        return f"sensitive-{self.mode}"

    async def run(self, session, X=None, Y=None, *, k, m, resources: ProtocolResources, scale=0, pattern=None):
        return await matmul_sensitive(session, X, Y, k=k, m=m, mode=self.mode, resources=resources, scale=scale)

    def predict(self, k, m, t=0, *, distinct_rows=0, resources: Optional[ProtocolResources] = None) -> ByteForecast:
        if resources is None:
            raise UsageError("Sensitive byte forecasts need the session's keys and PIR backend")
        public_key = resources.keypair.public_key if resources.keypair is not None else resources.peer_public_key
        size = ciphertext_size(public_key)
        if self.mode == "full-transfer":
            return predict_sensitive(k, m, size, self.mode)
        backend = resources.pir_backend
        queries = padded_query_count(distinct_rows, m, resources.query_pad_density)
        return predict_sensitive(
            k, m, size, self.mode, queries,
            backend.query_size(m, k * size), backend.response_size(m, k * size),
        )

    def triples_required(self, k, m, t=0) -> int:
        return 0
