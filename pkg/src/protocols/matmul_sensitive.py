# File: s3rec/src/protocols/matmul_sensitive.py
"""
Secure X @ Y where both the locations and the values of Y are private.

Party 0 encrypts X under its own Paillier key and publishes the columns
of X as a database of blobs (k ciphertexts each). Party 1 fetches the
columns it needs, either by PIR (one query per distinct nonzero row of Y)
or by receiving the whole encrypted X, evaluates every output entry
homomorphically, masks it and returns it for party 0 to decrypt.
"""

import logging
import math
import random
import struct
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..linalg.sparse import SparseMatrix
from ..mpc.ring import RING_BITS, RING_DTYPE, as_ring
from ..mpc.shares import SharedMatrix
from ..providers.ahe.paillier_provider import (
    AheCiphertext,
    c_add,
    ciphertext_size,
    dec,
    deserialize_ciphertexts,
    enc,
    enc_many,
    lift,
    lower,
    p_mul,
    serialize_ciphertexts,
)
from ..providers.pir.database import PirDatabase, PirQuery, PirResponse
from ..transport.framing import MsgType, Phase
from ..utils.error_handling import ConfigError, ProtocolError, ShapeError, UsageError
from .resources import ProtocolResources, session_randomness
from .report import ProtocolReport

logger = logging.getLogger("s3rec.protocols.sensitive")

SENSITIVE_MODES = ("pir", "full-transfer")
STATISTICAL_SECURITY = 40
_COUNT = struct.Struct("<Q")


def accumulated_bits(rows: int) -> int:
    """Bound on the bit length of a sum of ``rows`` products of two ring residues"""
    return 2 * RING_BITS + (math.ceil(math.log2(rows)) if rows > 1 else 0)


def check_plaintext_space(rows: int, modulus_bits: int) -> int:
    """Mask bit length for sums of ``rows`` terms, or ConfigError if n is too small"""
    mask_bits = accumulated_bits(rows) + STATISTICAL_SECURITY
    if mask_bits + 1 >= modulus_bits:
        raise ConfigError(
            f"A {modulus_bits}-bit AHE modulus cannot hold masked sums of {rows} terms "
            f"({mask_bits + 1} bits needed)"
        )
    return mask_bits


def padded_query_count(distinct: int, m: int, pad_density: Optional[float]) -> int:
    """Queries issued: distinct rows, raised to ceil(pad_density * m) when padding is on"""
    if pad_density is None:
        return distinct
    return max(distinct, min(m, math.ceil(pad_density * m)))


def _column_blobs(ciphertexts: List[AheCiphertext], k: int, m: int) -> List[bytes]:
    """Ciphertexts in (a, i) order grouped into one blob per column a of X"""
    return [serialize_ciphertexts(ciphertexts[a * k:(a + 1) * k]) for a in range(m)]


async def _run_rating_side(session, X: np.ndarray, k: int, m: int, cols: int, mode: str,
                           resources: ProtocolResources) -> Tuple[np.ndarray, Dict[str, int]]:
    keypair = resources.keypair
    if keypair is None or keypair.private_key is None:
        raise UsageError("Party 0 needs its AHE private key for the sensitive protocol")
    public_key = keypair.public_key
    ring_x = as_ring(X)
    # column-major so that column a of X is contiguous
    plaintexts = [lift(v) for v in ring_x.T.reshape(-1)]
    ciphertexts = enc_many(public_key, plaintexts, session_randomness(session))
    counters = {"pir_queries": 0, "ciphertexts_sent": 0}

    if mode == "full-transfer":
        await session.send(Phase.INPUT, MsgType.AHE_CIPHERTEXT_BATCH, serialize_ciphertexts(ciphertexts))
        counters["ciphertexts_sent"] = k * m
    else:
        backend = resources.pir_backend
        if backend is None:
            raise UsageError("Party 0 has no PIR server backend; run exchange_keys first")
        db = PirDatabase(_column_blobs(ciphertexts, k, m))
        (queries,) = _COUNT.unpack(await session.expect(MsgType.CONTROL, Phase.INPUT.value))
        if queries > m:
            raise ProtocolError(f"Peer announced {queries} PIR queries for {m} columns")
        for _ in range(queries):
            payload = await session.expect(MsgType.PIR_QUERY, Phase.INPUT.value)
            response = backend.response(db, PirQuery.from_bytes(payload, backend.tag))
            await session.send(Phase.INPUT, MsgType.PIR_RESPONSE, response.to_bytes())
        counters["pir_queries"] = queries
        counters["ciphertexts_sent"] = k * queries

    payload = await session.expect(MsgType.AHE_CIPHERTEXT_BATCH, Phase.COMPUTE.value)
    masked = deserialize_ciphertexts(public_key, payload, count=k * cols)
    share = np.array([lower(dec(keypair, c)) for c in masked], dtype=object).reshape(k, cols)
    counters["ciphertexts_received"] = k * cols
    return as_ring(share), counters


async def _run_social_side(session, Y: SparseMatrix, k: int, m: int, mode: str,
                           resources: ProtocolResources) -> Tuple[np.ndarray, Dict[str, int]]:
    public_key = resources.peer_public_key
    if public_key is None:
        raise UsageError("Party 1 has no peer public key; run exchange_keys first")
    cols = Y.cols
    mask_bits = check_plaintext_space(m, public_key.n.bit_length())
    counters = {"pir_queries": 0, "ciphertexts_received": 0}
    size = ciphertext_size(public_key)
    columns: Dict[int, List[AheCiphertext]] = {}

    if mode == "full-transfer":
        payload = await session.expect(MsgType.AHE_CIPHERTEXT_BATCH, Phase.INPUT.value)
        everything = deserialize_ciphertexts(public_key, payload, count=k * m)
        columns = {a: everything[a * k:(a + 1) * k] for a in range(m)}
        counters["ciphertexts_received"] = k * m
    else:
        backend = resources.pir_backend
        needed = [int(a) for a in Y.distinct_rows()]
        total = padded_query_count(len(needed), m, resources.query_pad_density)
        dummies: List[int] = []
        if total > len(needed):
            unused = sorted(set(range(m)) - set(needed))
            dummies = session.rng.choice(unused, size=total - len(needed), replace=False).tolist()
        order = sorted(needed + [int(a) for a in dummies])
        await session.send(Phase.INPUT, MsgType.CONTROL, _COUNT.pack(len(order)))
        states = []
        for a in order:
            state = backend.new_client(m, k * size)
            await session.send(Phase.INPUT, MsgType.PIR_QUERY, backend.query(state, a).to_bytes())
            states.append((a, state))
        for a, state in states:
            payload = await session.expect(MsgType.PIR_RESPONSE, Phase.INPUT.value)
            blob = backend.extract(state, PirResponse.from_bytes(payload, backend.tag))
            columns[a] = deserialize_ciphertexts(public_key, blob, count=k)
        counters["pir_queries"] = len(order)
        counters["ciphertexts_received"] = k * len(order)

    randomness = session_randomness(session)
    mask_source = random.Random(int(session.rng.integers(0, 2**63)))
    by_column: Dict[int, List[Tuple[int, int]]] = {j: [] for j in range(cols)}
    for (a, j), y in zip(Y.loc.tolist(), as_ring(Y.val).tolist()):
        by_column[j].append((a, lift(y)))

    masked: List[AheCiphertext] = []
    share = np.zeros((k, cols), dtype=RING_DTYPE)
    for i in range(k):
        for j in range(cols):
            g = mask_source.getrandbits(mask_bits)
            beta = enc(public_key, g, randomness)
            for a, y in by_column[j]:
                beta = c_add(beta, p_mul(columns[a][i], y))
            masked.append(beta)
            share[i, j] = (-g) % (1 << RING_BITS)
    await session.send(Phase.COMPUTE, MsgType.AHE_CIPHERTEXT_BATCH, serialize_ciphertexts(masked))
    counters["ciphertexts_sent"] = k * cols
    return share, counters


async def matmul_sensitive(session, X: Optional[np.ndarray] = None, Y: Optional[SparseMatrix] = None, *,
                           k: int, m: int, cols: int = None, mode: str = "pir",
                           resources: ProtocolResources, scale: int = 0) -> Tuple[SharedMatrix, ProtocolReport]:
    """Secure X @ Y hiding both l_y and v_y (only t-derived counts leak)

    Args:
        session: This party's PartySession
        X: Ring matrix (k x m) at party 0
        Y: Sparse ring matrix (m x cols) at party 1
        k, m, cols: Public dimensions (cols defaults to m)
        mode: "pir" or "full-transfer"
        resources: Keys and PIR backend after ``exchange_keys``
        scale: Fraction bits carried by both X and Y

    Returns:
        (this party's share of X @ Y at scale 2 * scale, report)
    """
    if mode not in SENSITIVE_MODES:
        raise ConfigError(f"Unknown sensitive mode '{mode}', expected one of {SENSITIVE_MODES}")
    cols = m if cols is None else cols
    before = session.stats.snapshot()
    if session.party_id == 0:
        if X is None or np.shape(X) != (k, m):
            raise ShapeError(f"Party 0 must supply X of shape {(k, m)}")
        share, counters = await _run_rating_side(session, X, k, m, cols, mode, resources)
    else:
        if Y is None or Y.shape != (m, cols):
            raise ShapeError(f"Party 1 must supply Y of shape {(m, cols)}")
        share, counters = await _run_social_side(session, Y, k, m, mode, resources)

    report = ProtocolReport.from_stats(
        f"sensitive-{mode}", session.party_id, session.stats.delta(before),
        k=k, m=m, cols=cols, t=Y.t if Y is not None else 0, **counters,
    )
    logger.info(
        f"P{session.party_id} sensitive-{mode} k={k} m={m}: {counters.get('pir_queries', 0)} queries, "
        f"payload {report.payload_bytes}"
    )
    return SharedMatrix(session.party_id, share, 2 * scale), report
