# File: s3rec/src/services/bench/harness.py
"""
Benchmark harness.

Every protocol case runs both parties in-process, sums their measured
payload bytes and compares them with the closed-form forecast. Any
difference fails the bench.
"""

import asyncio
import csv
import io
import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel
from scipy import stats

from ...core.config import RunConfig
from ...core.interfaces.pir_backend import PirBackend
from ...core.registry import ProtocolRegistry, default_registry
from ...linalg.sparse import SparseMatrix, matmul_oracle
from ...mpc.dealer import provision_triples
from ...mpc.ring import as_ring, random_ring
from ...protocols.formulas import predict_st_mpc
from ...protocols.report import combined_payload
from ...protocols.resources import ProtocolResources, exchange_keys
from ...protocols.matmul_sensitive import padded_query_count
from ...providers.ahe.paillier_provider import AheKeyPair, ciphertext_size
from ...transport.framing import ONLINE_PHASES
from ...transport.session import create_session_pair, run_pair
from ...utils.error_handling import ProtocolError, ValidationError
from ..dataio.datasets import folds, make_training_data
from ..dataio.synth import sample_social, synth
from ..recommender.objective import symmetrise
from ..recommender.secure_trainer import train_secure
from ..recommender.trainer import progress, train_plain

logger = logging.getLogger("s3rec.bench")

CSV_COLUMNS = ("protocol", "k", "m", "t", "mode", "measured_bytes", "predicted_bytes",
               "offline_bytes", "wall_ms", "rmse")
K_GRID = (10, 15, 20)
SAMPLE_RATES = (0.4, 0.6, 0.8)
VALUE_BOUND = 1 << 16
R_SQUARED_FLOOR = 0.999
SCALING_MEASURES = {"insensitive": "t", "sensitive": "distinct_rows"}


class BenchRow(BaseModel):
    """One CSV row; byte columns are online payload summed over both parties"""
    protocol: str
    k: int
    m: int
    t: int
    mode: str
    measured_bytes: int = 0
    predicted_bytes: int = 0
    offline_bytes: int = 0
    wall_ms: float = 0.0
    rmse: Optional[float] = None
    distinct_rows: int = 0

    def csv_values(self) -> List[str]:
        values = self.model_dump()
        cells = []
        for column in CSV_COLUMNS:
            value = values[column]
            if value is None:
                cells.append("")
            elif column == "wall_ms":
                cells.append(f"{value:.1f}")
            elif isinstance(value, float):
                cells.append(f"{value:.6f}")
            else:
                cells.append(str(value))
        return cells


@dataclass
class BenchKeys:
    """P0's protocol key pair and P1's PIR client backend"""
    keypair: AheKeyPair
    pir_backend: PirBackend


def _ring_valued(Y: SparseMatrix) -> SparseMatrix:
    """Integral float values as ring residues"""
    return Y.map_values(lambda values: as_ring(np.rint(values).astype(np.int64)))


def sparsity_fixture(m: int, t: int, seed: int) -> SparseMatrix:
    """m x m matrix with t nonzeros in distinct rows and distinct columns

    Values are small positive ring integers.
    """
    if not 0 <= t <= m:
        raise ValidationError(f"A partial permutation holds at most {m} nonzeros, asked for {t}")
    rng = np.random.default_rng(seed)
    rows = rng.choice(m, size=t, replace=False)
    cols = rng.choice(m, size=t, replace=False)
    values = rng.integers(1, 10, size=t)
    return _ring_valued(SparseMatrix.from_coo(m, m, rows, cols, values))


def _online(payload: Dict[str, int]) -> int:
    return sum(payload[phase] for phase in ONLINE_PHASES)


async def run_case(protocol_name: str, k: int, Y: SparseMatrix, keys: Optional[BenchKeys], seed: int,
                   registry: ProtocolRegistry = None, query_pad_density: Optional[float] = None) -> BenchRow:
    """Run one protocol on a random X (k x m) against Y and check bytes and result

    Raises:
        ValidationError: If measured bytes differ from the forecast
        ProtocolError: If the reconstructed product is wrong
    """
    registry = registry or default_registry()
    protocol = registry.require(protocol_name)
    m = Y.rows
    rng = np.random.default_rng(seed)
    X = random_ring(rng, (k, m)) % np.uint64(VALUE_BOUND)
    pattern = Y.map_values(np.zeros_like)
    session0, session1 = create_session_pair(seed)
    resources0 = ProtocolResources(query_pad_density=query_pad_density)
    resources1 = ProtocolResources(query_pad_density=query_pad_density)
    sensitive = protocol_name.startswith("sensitive")
    if sensitive:
        resources0.keypair = keys.keypair
        resources0.pir_backend_name = resources1.pir_backend_name = keys.pir_backend.name
        resources1.pir_backend = keys.pir_backend
    y_input = Y.to_dense() if protocol_name == "dense" else Y

    async def party(session, resources, x, y, pat):
        if sensitive:
            await exchange_keys(session, resources)
        else:
            resources.triples = await provision_triples(session, protocol.triples_required(k, m, Y.t))
        offline = dict(session.stats.payload_sent)
        share, report = await protocol.run(session, x, y, k=k, m=m, resources=resources, pattern=pat)
        return share, report, offline

    started = time.perf_counter()
    try:
        (share0, report0, offline0), (share1, report1, offline1) = await run_pair(
            party(session0, resources0, X, None, pattern),
            party(session1, resources1, None, y_input, None),
        )
    finally:
        await session0.close()
        await session1.close()
    wall_ms = (time.perf_counter() - started) * 1000.0

    if not np.array_equal(as_ring(share0.value + share1.value), matmul_oracle(X, Y.to_dense())):
        raise ProtocolError(f"{protocol_name} reconstructed a wrong product (k={k}, m={m}, t={Y.t})")

    forecast = protocol.predict(k, m, Y.t, distinct_rows=len(Y.distinct_rows()), resources=resources1)
    measured = combined_payload(report0, report1)
    if measured != forecast.as_phases():
        raise ValidationError(
            f"{protocol_name}: measured bytes {measured} differ from the closed form {forecast.as_phases()}",
            details={"protocol": protocol_name, "k": k, "m": m, "t": Y.t}
        )
    mode = protocol_name.split("-", 1)[1] if sensitive else "-"
    return BenchRow(
        protocol=protocol_name.split("-", 1)[0], k=k, m=m, t=Y.t, mode=mode,
        measured_bytes=_online(measured), predicted_bytes=forecast.online,
        offline_bytes=offline0["offline"] + offline1["offline"], wall_ms=wall_ms,
        distinct_rows=len(Y.distinct_rows()),
    )


def protocol_grid(config: RunConfig, keys: BenchKeys, t: int, quiet: bool = False) -> List[BenchRow]:
    """Every registered protocol on one fixture"""
    registry = default_registry()
    Y = sparsity_fixture(config.m, t, config.seed)
    rows = []
    for name in progress(registry.names, len(registry.names), "protocols", quiet):
        rows.append(asyncio.run(run_case(name, config.k, Y, keys, config.seed, registry,
                                         config.query_pad_density)))
    return rows


def k_grid(config: RunConfig, keys: BenchKeys, t: int, ks: Sequence[int] = K_GRID,
           quiet: bool = False) -> List[BenchRow]:
    """Dense and sensitive full-transfer across k"""
    Y = sparsity_fixture(config.m, t, config.seed)
    cases = [(name, k) for k in ks for name in ("dense", "sensitive-full-transfer")]
    return [asyncio.run(run_case(name, k, Y, keys, config.seed))
            for name, k in progress(cases, len(cases), "k grid", quiet)]


def sparsity_grid(config: RunConfig, keys: BenchKeys, rates: Sequence[float] = SAMPLE_RATES,
                  quiet: bool = False) -> List[BenchRow]:
    """Dense, insensitive and sensitive-pir on nested samples of the synthetic S

    S is the social matrix ``synth`` draws for the run config; every rate
    samples it with the same seed, so lower rates keep a subset of the ties.

    Raises:
        ValidationError: If a sample keeps no tie
    """
    _, social = synth(config.m, config.n, config.k_true, config.alpha_social, config.noise_sd,
                      config.seed, config.rating_density, config.communities)
    rows = []
    for rate in progress(rates, len(rates), "sparsity", quiet):
        sample = _ring_valued(sample_social(social, rate, config.seed).to_sparse())
        if sample.t == 0:
            raise ValidationError(f"Sampling {social.count} ties at rate {rate} kept none; raise m or alpha_social",
                                  details={"rate": rate, "ties": social.count})
        for name in ("dense", "insensitive", "sensitive-pir"):
            row = asyncio.run(run_case(name, config.k, sample, keys, config.seed))
            row.mode = f"{row.mode}@{rate}"
            rows.append(row)
    return rows


def _r_squared(xs: Sequence[float], ys: Sequence[float]) -> float:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if len(np.unique(xs)) < 2:
        return float("nan")
    if len(xs) == 2:
        return 1.0
    return float(stats.linregress(xs, ys).rvalue ** 2)


def sparse_r_squared(rows: Sequence[BenchRow]) -> float:
    """R^2 of (insensitive + sensitive) online bytes against realised t

    NaN when fewer than two distinct t values were realised.
    """
    totals: Dict[str, int] = {}
    counts: Dict[str, int] = {}
    for row in rows:
        if row.protocol in ("insensitive", "sensitive"):
            key = row.mode.split("@")[-1]
            totals[key] = totals.get(key, 0) + row.measured_bytes
            counts[key] = row.t
    return _r_squared([counts[key] for key in totals], [totals[key] for key in totals])


def scaling_r_squared(rows: Sequence[BenchRow], protocol: str, measure: str = "t") -> float:
    """R^2 of one protocol's online bytes against a realised sparsity column

    ``measure`` is ``t`` or ``distinct_rows``. NaN when fewer than two
    distinct values were realised.
    """
    picked = [row for row in rows if row.protocol == protocol]
    return _r_squared([getattr(row, measure) for row in picked], [row.measured_bytes for row in picked])


def check_sparsity_scaling(rows: Sequence[BenchRow], floor: float = R_SQUARED_FLOOR) -> Dict[str, float]:
    """Fit each sparse protocol against the sparsity its cost follows

    Insensitive bytes follow t. Sensitive-pir fetches one blob per distinct
    nonzero row, so its bytes follow the distinct-row count. Dense bytes
    must not move at all. Undefined fits (one realised value) are skipped.

    Raises:
        ValidationError: If dense bytes vary or a defined fit is at or below ``floor``
    """
    dense = sorted({row.measured_bytes for row in rows if row.protocol == "dense"})
    if len(dense) > 1:
        raise ValidationError("Dense bytes changed with sparsity", details={"bytes": dense})
    fits = {protocol: scaling_r_squared(rows, protocol, measure) for protocol, measure in SCALING_MEASURES.items()}
    low = {protocol: value for protocol, value in fits.items() if not math.isnan(value) and value <= floor}
    if low:
        raise ValidationError(f"Online bytes are not linear in sparsity (R^2 <= {floor})", details={"r_squared": low})
    for protocol, value in fits.items():
        if math.isnan(value):
            logger.info(f"{protocol}: a single {SCALING_MEASURES[protocol]} value was realised, no fit")
    return fits


def model_comparison(config: RunConfig, keys: Optional[BenchKeys] = None, include_secure: bool = False,
                     quiet: bool = False) -> List[BenchRow]:
    """Test RMSE of mf and soreg (and optionally s3rec) on the synthetic dataset"""
    ratings, social = synth(config.m, config.n, config.k_true, config.alpha_social, config.noise_sd,
                            config.seed, config.rating_density, config.communities)
    data = make_training_data(ratings, social, folds(ratings.count, config.folds, config.seed), config.fold)
    base = config.train_config()
    rows = []
    for mode in ("mf", "soreg"):
        started = time.perf_counter()
        _, history = train_plain(data, base.model_copy(update={"mode": mode}), quiet=quiet)
        rows.append(BenchRow(protocol=f"model:{mode}", k=base.k, m=data.m, t=data.S.t, mode=mode,
                             wall_ms=(time.perf_counter() - started) * 1000.0, rmse=history[-1].test_rmse))
    if include_secure:
        rows.append(_secure_row(config, keys, data, quiet))
    return rows


def _secure_row(config: RunConfig, keys: BenchKeys, data, quiet: bool) -> BenchRow:
    secure = config.train_config().model_copy(update={"mode": "s3rec"})
    started = time.perf_counter()
    _, history = asyncio.run(train_secure(
        data, secure, keypair=keys.keypair, pir_backend=keys.pir_backend,
        query_pad_density=config.query_pad_density, quiet=quiet,
    ))
    wall_ms = (time.perf_counter() - started) * 1000.0
    measured = sum(_online(h.payload_bytes) + h.bytes_received for h in history)
    S_sym = symmetrise(data.S)
    size = ciphertext_size(keys.keypair.public_key)
    blob = secure.k * size
    queries = padded_query_count(len(S_sym.distinct_rows()), data.m, config.query_pad_density)
    forecast = predict_st_mpc(secure.k, data.m, S_sym.t, size, secure.sensitive_mode, queries,
                              keys.pir_backend.query_size(data.m, blob),
                              keys.pir_backend.response_size(data.m, blob))
    predicted = forecast.online * secure.epochs if secure.gamma else 0
    if measured != predicted:
        raise ValidationError(f"s3rec training moved {measured} online bytes, closed form says {predicted}")
    return BenchRow(protocol="model:s3rec", k=secure.k, m=data.m, t=data.S.t, mode=secure.sensitive_mode,
                    measured_bytes=measured, predicted_bytes=predicted, wall_ms=wall_ms,
                    rmse=history[-1].test_rmse)


def render_csv(rows: Sequence[BenchRow], provenance: str = "") -> str:
    """CSV text with optional ``#`` provenance lines above the header"""
    buffer = io.StringIO()
    for line in provenance.splitlines():
        buffer.write(line if line.startswith("#") else f"# {line}")
        buffer.write("\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_values())
    return buffer.getvalue()


def render_table(rows: Sequence[BenchRow]) -> str:
    """Fixed-width human-readable table"""
    header = f"{'protocol':<14}{'k':>4}{'m':>5}{'t':>6}  {'mode':<22}{'measured':>12}{'predicted':>12}" \
             f"{'offline':>10}{'wall_ms':>10}{'rmse':>9}"
    lines = [header, "-" * len(header)]
    for row in rows:
        rmse = "" if row.rmse is None or math.isnan(row.rmse) else f"{row.rmse:.4f}"
        lines.append(
            f"{row.protocol:<14}{row.k:>4}{row.m:>5}{row.t:>6}  {row.mode:<22}{row.measured_bytes:>12}"
            f"{row.predicted_bytes:>12}{row.offline_bytes:>10}{row.wall_ms:>10.1f}{rmse:>9}"
        )
    return "\n".join(lines)
