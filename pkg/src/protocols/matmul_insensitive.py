# File: s3rec/src/protocols/matmul_insensitive.py
import hmac
import logging
from typing import Optional, Tuple

import numpy as np

from ..linalg.sparse import SparseMatrix
from ..mpc.dealer import TripleStore
from ..mpc.ring import RING_DTYPE, as_ring
from ..mpc.shares import Share, SharedMatrix, input_share, mul
from ..transport.framing import MsgType, Phase
from ..utils.error_handling import ProtocolError, ShapeError
from .report import ProtocolReport

logger = logging.getLogger("s3rec.protocols.insensitive")


async def matmul_insensitive(session, X: Optional[np.ndarray] = None, Y: Optional[SparseMatrix] = None, *,
                             k: int, m: int, pattern: SparseMatrix, triples: TripleStore,
                             scale: int = 0) -> Tuple[SharedMatrix, ProtocolReport]:
    """Secure X @ Y where the locations l_y of Y are public

    Only the bin contents are shared: for every nonzero (a, j) of Y and every
    row i, party 0 shares x_{i,a} and party 1 shares y_{a,j} once. Output
    entry (i, j) sums the k*t Beaver products that fall into column j.

    Args:
        session: This party's PartySession
        X: Ring matrix (k x m) at party 0
        Y: Sparse ring matrix at party 1; its l_y must equal ``pattern``
        k, m: Public dimensions of X
        pattern: Public l_y (values ignored)
        triples: This party's triple store
        scale: Fraction bits carried by both X and Y

    Returns:
        (this party's share of X @ Y at scale 2 * scale, report)

    Raises:
        ProtocolError: If the parties' l_y digests differ
    """
    if pattern.rows != m:
        raise ShapeError(f"Y has {pattern.rows} rows but X has {m} columns")
    if session.party_id == 0 and (X is None or np.shape(X) != (k, m)):
        raise ShapeError(f"Party 0 must supply X of shape {(k, m)}")
    if session.party_id == 1:
        if Y is None or Y.shape != pattern.shape:
            raise ShapeError(f"Party 1 must supply Y of shape {pattern.shape}")
    before = session.stats.snapshot()
    local_loc = pattern if session.party_id == 0 else Y

    digest = local_loc.loc_digest()
    await session.send(Phase.INPUT, MsgType.CONTROL, digest)
    peer_digest = await session.expect(MsgType.CONTROL, Phase.INPUT.value)
    if not hmac.compare_digest(digest, peer_digest):
        raise ProtocolError("Parties disagree on the public sparsity pattern l_y")

    t, cols = pattern.t, pattern.cols
    rows_a, cols_j = pattern.row_idx, pattern.col_idx
    x_bins = as_ring(X)[:, rows_a] if session.party_id == 0 else None
    y_vals = as_ring(Y.val) if session.party_id == 1 else None

    x_share = await input_share(session, 0, x_bins, (k, t), scale)
    y_share = await input_share(session, 1, y_vals, (t,), scale)

    count = k * t
    triple = triples.take(count, shape=(k, t))
    right = Share(session.party_id, np.broadcast_to(y_share.value[None, :], (k, t)).copy(), scale)
    products = await mul(session, x_share, right, triple)

    z = np.zeros((k, cols), dtype=RING_DTYPE)
    np.add.at(z, (slice(None), cols_j), products.value)

    report = ProtocolReport.from_stats(
        "insensitive", session.party_id, session.stats.delta(before),
        k=k, m=m, cols=cols, t=t, triples_consumed=count, scalar_muls=count,
    )
    logger.info(f"P{session.party_id} insensitive k={k} m={m} t={t}: {count} triples, payload {report.payload_bytes}")
    return SharedMatrix(session.party_id, z, 2 * scale), report
