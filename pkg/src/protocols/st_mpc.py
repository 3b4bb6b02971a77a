# File: s3rec/src/protocols/st_mpc.py
import logging
from typing import Optional, Tuple

import numpy as np

from ..linalg.sparse import DiagonalMatrix, SparseMatrix, build_d_e
from ..mpc.ring import FixedPointCodec, trunc_local
from ..mpc.shares import SharedMatrix, add, rec
from ..transport.framing import Phase
from ..utils.error_handling import ShapeError
from .matmul_insensitive import matmul_insensitive
from .matmul_sensitive import matmul_sensitive
from .report import ProtocolReport
from .resources import ProtocolResources

logger = logging.getLogger("s3rec.protocols.st_mpc")


def diagonal_pattern(m: int) -> SparseMatrix:
    """Public support of D^T + E^T: the full diagonal"""
    index = np.arange(m)
    return SparseMatrix(m, m, np.stack([index, index], axis=1), np.zeros(m))


async def st_mpc(session, gamma: float, U: Optional[np.ndarray] = None, D: Optional[DiagonalMatrix] = None,
                 E: Optional[DiagonalMatrix] = None, S: Optional[SparseMatrix] = None, *,
                 k: int, m: int, codec: FixedPointCodec, resources: ProtocolResources,
                 mode: str = "pir") -> Tuple[Optional[np.ndarray], ProtocolReport]:
    """Jointly compute the social term gamma/2 U (D^T + E^T) - gamma U S^T

    Party 0 supplies U (k x m); party 1 supplies S and optionally D, E
    (built from S when omitted). The diagonal product runs the insensitive
    protocol over the public diagonal support, the S^T product the
    sensitive protocol; the sum is truncated once and reconstructed at
    party 0.

    Returns:
        (decoded k x m social term at party 0, None at party 1; report)
    """
    f = codec.frac_bits
    before = session.stats.snapshot()
    store = resources.require_triples()
    consumed_before = store.consumed

    x_diag = x_social = None
    y_diag = y_social = None
    if session.party_id == 0:
        if U is None or np.shape(U) != (k, m):
            raise ShapeError(f"Party 0 must supply U of shape {(k, m)}")
        x_diag = codec.encode(gamma / 2.0 * np.asarray(U))
        x_social = codec.encode(-gamma * np.asarray(U))
    else:
        if S is None or S.shape != (m, m):
            raise ShapeError(f"Party 1 must supply S of shape {(m, m)}")
        if D is None or E is None:
            D, E = build_d_e(S)
        y_diag = (D + E).to_sparse(keep_zeros=True).map_values(codec.encode)
        y_social = S.transpose().map_values(codec.encode)

    r0, _ = await matmul_insensitive(session, x_diag, y_diag, k=k, m=m, pattern=diagonal_pattern(m),
                                     triples=store, scale=f)
    r1, social_report = await matmul_sensitive(session, x_social, y_social, k=k, m=m, mode=mode,
                                               resources=resources, scale=f)
    total = add(r0, r1)
    truncated = SharedMatrix(session.party_id, trunc_local(total.value, f, session.party_id), f)
    opened = await rec(session, truncated, to=0, phase=Phase.OUTPUT)

    report = ProtocolReport.from_stats(
        f"st_mpc-{mode}", session.party_id, session.stats.delta(before),
        k=k, m=m, cols=m, t=S.t if S is not None else 0,
        triples_consumed=store.consumed - consumed_before,
        scalar_muls=store.consumed - consumed_before,
        pir_queries=social_report.pir_queries,
        ciphertexts_sent=social_report.ciphertexts_sent,
        ciphertexts_received=social_report.ciphertexts_received,
    )
    logger.info(f"P{session.party_id} st_mpc k={k} m={m}: payload {report.payload_bytes}")
    if opened is None:
        return None, report
    return codec.decode(opened), report
