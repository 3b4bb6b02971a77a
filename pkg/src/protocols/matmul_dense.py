# File: s3rec/src/protocols/matmul_dense.py
import logging
from typing import Optional, Tuple

import numpy as np

from ..mpc.dealer import TripleStore
from ..mpc.ring import as_ring
from ..mpc.shares import Share, SharedMatrix, input_share, mul
from ..utils.error_handling import ShapeError
from .report import ProtocolReport

logger = logging.getLogger("s3rec.protocols.dense")


async def matmul_dense(session, X: Optional[np.ndarray] = None, Y: Optional[np.ndarray] = None, *,
                       k: int, m: int, cols: int = None, triples: TripleStore,
                       scale: int = 0) -> Tuple[SharedMatrix, ProtocolReport]:
    """Naive secure product of X (k x m, party 0) and Y (m x cols, party 1)

    Both inputs are secret shared, then every scalar product x_{i,a} y_{a,j}
    is one Beaver multiplication (k*m*cols triples, all opened in one batch).

    Args:
        session: This party's PartySession
        X: Ring matrix at party 0 (None at party 1)
        Y: Ring matrix at party 1 (None at party 0)
        k, m, cols: Public dimensions (cols defaults to m)
        triples: This party's triple store
        scale: Fraction bits carried by both X and Y

    Returns:
        (this party's share of X @ Y at scale 2 * scale, report)
    """
    cols = m if cols is None else cols
    if session.party_id == 0 and (X is None or np.shape(X) != (k, m)):
        raise ShapeError(f"Party 0 must supply X of shape {(k, m)}, got {None if X is None else np.shape(X)}")
    if session.party_id == 1 and (Y is None or np.shape(Y) != (m, cols)):
        raise ShapeError(f"Party 1 must supply Y of shape {(m, cols)}, got {None if Y is None else np.shape(Y)}")
    before = session.stats.snapshot()

    x_share = await input_share(session, 0, None if X is None else as_ring(X), (k, m), scale)
    y_share = await input_share(session, 1, None if Y is None else as_ring(Y), (m, cols), scale)

    count = k * m * cols
    triple = triples.take(count, shape=(k, m, cols))
    left = Share(session.party_id, np.broadcast_to(x_share.value[:, :, None], (k, m, cols)).copy(), scale)
    right = Share(session.party_id, np.broadcast_to(y_share.value[None, :, :], (k, m, cols)).copy(), scale)
    products = await mul(session, left, right, triple)
    z = SharedMatrix(session.party_id, products.value.sum(axis=1, dtype=np.uint64), 2 * scale)

    report = ProtocolReport.from_stats(
        "dense", session.party_id, session.stats.delta(before),
        k=k, m=m, cols=cols, t=m * cols, triples_consumed=count, scalar_muls=count,
    )
    logger.info(f"P{session.party_id} dense {k}x{m}x{cols}: {count} triples, payload {report.payload_bytes}")
    return z, report
