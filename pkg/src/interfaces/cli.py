# File: s3rec/src/interfaces/cli.py
import asyncio
import functools
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Tuple

import click

from config.runs.config_manager import ConfigManager
from ..core.config import AHE_KEY_BITS, PIR_BACKEND_NAMES, RunConfig, SENSITIVE_MODES, TRAIN_MODES, TRANSPORTS
from ..linalg.sparse import SparseMatrix
from ..mpc.dealer import dealer_generate, read_triple_store, triples_required, verify_triple_stores, \
    write_triple_store
from ..protocols.formulas import predict_triples
from ..protocols.resources import ProtocolResources
from ..providers.ahe.paillier_provider import keygen, load_keypair, save_keypair
from ..providers.pir.pir_factory import PirBackendFactory
from ..services.bench.harness import (
    K_GRID,
    BenchKeys,
    check_sparsity_scaling,
    k_grid,
    model_comparison,
    protocol_grid,
    render_csv,
    render_table,
    sparse_r_squared,
    sparsity_grid,
)
from ..services.dataio.datasets import RatingDataset, SocialDataset, TrainingData, folds, make_training_data
from ..services.dataio.loader import load, load_social, read_id_map
from ..services.dataio.synth import sample_social, synth
from ..services.dataio.writers import write_id_map, write_ratings, write_social
from ..services.recommender.model import EpochMetrics
from ..services.recommender.secure_trainer import run_rating_party, run_social_party, train_secure, \
    triples_for_training
from ..services.recommender.trainer import train_plain
from ..transport.channel_factory import ChannelFactory
from ..transport.session import PartySession
from ..utils.error_handling import ConfigError, UsageError, exit_code_for, format_error_record

logger = logging.getLogger("s3rec.cli")

GRIDS = ("protocols", "k", "sparsity", "models")
DEALER_PROTOCOLS = ("dense", "insensitive", "sensitive", "training")


def common_options(func):
    """--config, --preset, --quiet, --seed and --out-dir for every subcommand"""
    func = click.option("--out-dir", type=click.Path(file_okay=False), help="Directory for output files")(func)
    func = click.option("--seed", type=int, help="Seed for data, splits and dealer randomness")(func)
    func = click.option("--quiet", is_flag=True, help="Only warnings on the console, no progress bars")(func)
    func = click.option("--preset", help="Preset name under config/runs")(func)
    func = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                        help="key = value config file")(func)
    return func


def reports_errors(func):
    """Print toolkit errors as an error record and exit with their code"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (click.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except Exception as exc:
            logger.error(f"{type(exc).__name__}: {exc}")
            logger.debug("Traceback", exc_info=True)
            click.echo(json.dumps(format_error_record(exc)), err=True)
            code = exit_code_for(exc)
        click.get_current_context().exit(code)
    return wrapper


def _quiet_console(quiet: bool) -> None:
    if not quiet:
        return
    for handler in logging.getLogger("s3rec").handlers:
        if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
            handler.setLevel(logging.WARNING)


def _resolve(config_path: Optional[str], preset: Optional[str], quiet: bool, **flags) -> RunConfig:
    _quiet_console(quiet)
    config = ConfigManager().resolve(preset=preset, config_path=config_path, overrides=flags)
    Path(config.out_dir).mkdir(parents=True, exist_ok=True)
    return config


def _key_seed(config: RunConfig, offset: int = 0):
    """Key and session seeds only when the run asks to be deterministic"""
    return config.seed + offset if config.deterministic else None


@click.group()
def cli():
    """S3Rec: two-party secure social recommendation toolkit"""


@cli.command("gen-data")
@common_options
@click.option("--m", type=int, help="Users")
@click.option("--n", type=int, help="Items")
@click.option("--k-true", type=int, help="Ground-truth latent dimension")
@click.option("--alpha-social", type=click.FloatRange(0, 1, min_open=True), help="Density of S")
@click.option("--noise-sd", type=click.FloatRange(min=0), help="Rating noise standard deviation")
@click.option("--rating-density", type=click.FloatRange(0, 1, min_open=True))
@click.option("--communities", type=click.IntRange(min=1))
@click.option("--sample-rate", type=click.FloatRange(0, 1, min_open=True),
              help="Keep each social tie with this probability")
@reports_errors
def gen_data(config_path, preset, quiet, seed, out_dir, sample_rate, **flags):
    """Write a synthetic social-correlated dataset as TSVs"""
    config = _resolve(config_path, preset, quiet, seed=seed, out_dir=out_dir, **flags)
    ratings, social = synth(config.m, config.n, config.k_true, config.alpha_social, config.noise_sd,
                            config.seed, config.rating_density, config.communities)
    provenance = ConfigManager.echo(config)
    if sample_rate is not None:
        social = sample_social(social, sample_rate, config.seed)
        provenance += f"\n# sample_rate = {sample_rate}"
    out = Path(config.out_dir)
    paths = [
        write_ratings(out / "ratings.tsv", ratings, provenance),
        write_social(out / "social.tsv", social, ratings.user_ids, provenance),
        write_id_map(out / "users.tsv", ratings.user_ids, "users"),
        write_id_map(out / "items.tsv", ratings.item_ids, "items"),
    ]
    click.echo(f"ratings = {ratings.count}\nsocial_ties = {social.count}")
    for path in paths:
        click.echo(f"wrote = {path}")


@cli.command()
@common_options
@click.option("--count", type=click.IntRange(min=0), help="Triples to generate")
@click.option("--protocol", type=click.Choice(DEALER_PROTOCOLS), help="Size the store for this use")
@click.option("--k", type=int)
@click.option("--m", type=int)
@click.option("--t", type=click.IntRange(min=0), help="Nonzeros of Y (insensitive sizing)")
@click.option("--epochs", type=int)
@click.option("--keys/--no-keys", default=False, help="Also write both parties' AHE key files")
@reports_errors
def dealer(config_path, preset, quiet, seed, out_dir, count, protocol, t, keys, **flags):
    """Write per-party Beaver triple stores (and optionally key files)"""
    config = _resolve(config_path, preset, quiet, seed=seed, out_dir=out_dir, **flags)
    if protocol is not None:
        if protocol == "training":
            required, formula = triples_for_training(config.k, config.m, config.epochs), "k*m*epochs"
        elif protocol == "insensitive" and t is None:
            raise UsageError("Sizing for the insensitive protocol needs --t")
        else:
            required = triples_required(config.k, config.m, t, protocol)
            formula = {"dense": "k*m^2", "insensitive": "k*t", "sensitive": "0"}[protocol]
        if count is None:
            count = required
        elif count < required:
            raise ConfigError(
                f"{count} triples cannot serve {protocol} at k={config.k} m={config.m}: "
                f"it needs {formula} = {required}",
                details={"required": required, "count": count, "formula": formula}
            )
    if count is None:
        raise UsageError("Give --count or --protocol to size the triple store")

    store0, store1 = dealer_generate(count, config.seed)
    if not verify_triple_stores(store0, store1):
        raise ConfigError("Dealer produced inconsistent triples")
    out = Path(config.out_dir)
    size0 = write_triple_store(out / "triples_p0.s3tr", store0)
    size1 = write_triple_store(out / "triples_p1.s3tr", store1)
    if keys:
        save_keypair(out / "protocol_key.json", keygen(config.ahe_bits, _key_seed(config)))
        save_keypair(out / "pir_key.json", keygen(config.ahe_bits, _key_seed(config, 1)))
    click.echo(f"triples = {count}")
    click.echo(f"offline_bytes = {predict_triples(count).offline}")
    click.echo(f"file_bytes = {size0 + size1}")


@cli.command("keygen")
@common_options
@click.option("--ahe-bits", type=click.Choice([str(bits) for bits in AHE_KEY_BITS]))
@click.option("--deterministic", is_flag=True, default=None, help="Derive keys from --seed")
@reports_errors
def keygen_command(config_path, preset, quiet, seed, out_dir, ahe_bits, deterministic):
    """Write P0's protocol key and P1's PIR client key"""
    config = _resolve(config_path, preset, quiet, seed=seed, out_dir=out_dir,
                      ahe_bits=ahe_bits, deterministic=deterministic)
    out = Path(config.out_dir)
    save_keypair(out / "protocol_key.json", keygen(config.ahe_bits, _key_seed(config)))
    save_keypair(out / "pir_key.json", keygen(config.ahe_bits, _key_seed(config, 1)))
    click.echo(f"protocol_key = {out / 'protocol_key.json'}\npir_key = {out / 'pir_key.json'}")


def _training_data(config: RunConfig, party: Optional[int]) -> Tuple[RatingDataset, TrainingData]:
    """One fold for P0 or the in-process run; social data is left out at P0 in two-process mode"""
    if config.ratings_path:
        social_path = config.social_path if party is None else None
        ratings, social = load(config.ratings_path, social_path, config.min_interactions)
    else:
        ratings, social = synth(config.m, config.n, config.k_true, config.alpha_social, config.noise_sd,
                                config.seed, config.rating_density, config.communities)
        if party == 0:
            social = SocialDataset.from_sparse(SparseMatrix.zeros(social.m, social.m))
    split = folds(ratings.count, config.folds, config.seed)
    return ratings, make_training_data(ratings, social, split, config.fold)


def _social_matrix(config: RunConfig, users_path: Optional[str]) -> SparseMatrix:
    """P1's social matrix in two-process mode"""
    if config.social_path:
        if not users_path:
            raise UsageError("Party 1 needs --users (the id map published by party 0) to align user ids")
        return load_social(config.social_path, read_id_map(users_path)).to_sparse()
    _, social = synth(config.m, config.n, config.k_true, config.alpha_social, config.noise_sd,
                      config.seed, config.rating_density, config.communities)
    return social.to_sparse()


def _pir_backend(config: RunConfig, pir_key: Optional[str]):
    return PirBackendFactory.create(config.pir_backend, config.pir_depth,
                                    keypair=load_keypair(pir_key) if pir_key else None,
                                    bits=config.ahe_bits, seed=_key_seed(config, 1))


def _protocol_keypair(config: RunConfig, protocol_key: Optional[str]):
    return load_keypair(protocol_key) if protocol_key else keygen(config.ahe_bits, _key_seed(config))


async def _run_tcp_party(party: int, config: RunConfig, on_epoch, quiet: bool, users_path: Optional[str],
                         protocol_key: Optional[str], pir_key: Optional[str], triples_path: Optional[str]):
    train_config = config.train_config()
    triples = read_triple_store(triples_path, party) if triples_path else None
    if party == 0:
        ratings, data = _training_data(config, 0)
        write_id_map(Path(config.out_dir) / "users.tsv", ratings.user_ids)
        resources = ProtocolResources(triples=triples, keypair=_protocol_keypair(config, protocol_key),
                                      pir_backend_name=config.pir_backend,
                                      query_pad_density=config.query_pad_density)
    else:
        S = _social_matrix(config, users_path)
        resources = ProtocolResources(triples=triples, pir_backend=_pir_backend(config, pir_key),
                                      pir_backend_name=config.pir_backend,
                                      query_pad_density=config.query_pad_density)

    channel = await ChannelFactory.create_tcp(party, {"host": config.host, "port": config.port})
    session = PartySession(party, channel, _key_seed(config))
    try:
        if party == 0:
            return await run_rating_party(session, data, train_config, resources, None, on_epoch, quiet)
        await run_social_party(session, S, train_config, resources)
        return None
    finally:
        await session.close()


@cli.command()
@common_options
@click.option("--mode", type=click.Choice(TRAIN_MODES))
@click.option("--party", type=click.IntRange(0, 1), help="Run one party of s3rec over TCP")
@click.option("--transport", type=click.Choice(TRANSPORTS))
@click.option("--host")
@click.option("--port", type=int)
@click.option("--ratings", "ratings_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--social", "social_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--users", "users_path", type=click.Path(exists=True, dir_okay=False),
              help="User id map from party 0 (party 1 with --social)")
@click.option("--min-interactions", type=click.IntRange(min=0))
@click.option("--epochs", type=int)
@click.option("--k", type=int)
@click.option("--lam", type=float)
@click.option("--gamma", type=float)
@click.option("--theta", type=float)
@click.option("--frac-bits", type=int)
@click.option("--sensitive-mode", type=click.Choice(SENSITIVE_MODES))
@click.option("--pir-backend", type=click.Choice(PIR_BACKEND_NAMES))
@click.option("--ahe-bits", type=click.Choice([str(bits) for bits in AHE_KEY_BITS]))
@click.option("--query-pad-density", type=float)
@click.option("--latency-ms", type=float)
@click.option("--protocol-key", type=click.Path(exists=True, dir_okay=False), help="P0 key file from keygen")
@click.option("--pir-key", type=click.Path(exists=True, dir_okay=False), help="P1 key file from keygen")
@click.option("--triples", "triples_path", type=click.Path(exists=True, dir_okay=False),
              help="This party's dealer triple file")
@click.option("--deterministic", is_flag=True, default=None, help="Seed keys and session randomness")
@reports_errors
def train(config_path, preset, quiet, seed, out_dir, party, users_path, protocol_key, pir_key,
          triples_path, **flags):
    """Train mf/soreg in-process or s3rec in-process or as one TCP party"""
    config = _resolve(config_path, preset, quiet, seed=seed, out_dir=out_dir, **flags)
    train_config = config.train_config()
    if party is not None and (train_config.mode != "s3rec" or config.transport != "tcp"):
        raise UsageError("--party applies to --mode s3rec with --transport tcp")
    if config.transport == "tcp" and party is None:
        raise UsageError("--transport tcp runs one party per process; pass --party 0 or 1")

    out = Path(config.out_dir)
    suffix = "" if party is None else f"_p{party}"
    metrics_path = out / f"metrics{suffix}.jsonl"
    with open(metrics_path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps({"config": config.model_dump()}, sort_keys=True) + "\n")

        def on_epoch(metrics: EpochMetrics) -> None:
            handle.write(metrics.as_json() + "\n")
            handle.flush()

        if party is not None:
            result = asyncio.run(_run_tcp_party(party, config, on_epoch, quiet, users_path,
                                                protocol_key, pir_key, triples_path))
            if result is None:
                click.echo("party = 1\nstatus = done")
                return
            model, history = result
        else:
            _, data = _training_data(config, None)
            if train_config.mode == "s3rec":
                train_config.check_for_items(data.n)
                model, history = asyncio.run(train_secure(
                    data, train_config, keypair=_protocol_keypair(config, protocol_key),
                    pir_backend=_pir_backend(config, pir_key),
                    query_pad_density=config.query_pad_density, latency_ms=config.latency_ms,
                    on_epoch=on_epoch, quiet=quiet,
                ))
            else:
                model, history = train_plain(data, train_config, on_epoch=on_epoch, quiet=quiet)

    model.save(out / f"model{suffix}.npz")
    last = history[-1]
    click.echo(f"epochs = {len(history)}\ntrain_rmse = {last.train_rmse:.6f}\ntest_rmse = {last.test_rmse}")
    if last.social_deviation is not None:
        click.echo(f"social_deviation = {last.social_deviation:.3e}")
    click.echo(f"metrics = {metrics_path}")


@cli.command()
@common_options
@click.option("--grid", "grids", multiple=True, type=click.Choice(GRIDS), help="Grids to run (default all)")
@click.option("--m", type=int)
@click.option("--k", type=int)
@click.option("--t", type=click.IntRange(min=0), help="Nonzeros of the protocol and k grid fixture")
@click.option("--ks", multiple=True, type=click.IntRange(min=1), help="k values for the k grid")
@click.option("--pir-backend", type=click.Choice(PIR_BACKEND_NAMES))
@click.option("--ahe-bits", type=click.Choice([str(bits) for bits in AHE_KEY_BITS]))
@click.option("--secure-models", is_flag=True, help="Add an s3rec row to the model comparison")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False))
@reports_errors
def bench(config_path, preset, quiet, seed, out_dir, grids, t, ks, secure_models, csv_path, **flags):
    """Run the protocol, k, sparsity and model grids and check every byte count"""
    config = _resolve(config_path, preset, quiet, seed=seed, out_dir=out_dir, **flags)
    grids = grids or GRIDS
    t = max(1, config.m // 4) if t is None else t
    needs_keys = any(grid in grids for grid in ("protocols", "k", "sparsity")) or secure_models
    keys = None
    if needs_keys:
        keys = BenchKeys(
            keygen(config.ahe_bits, config.seed),
            PirBackendFactory.create(config.pir_backend, config.pir_depth, bits=config.ahe_bits,
                                     seed=config.seed + 1),
        )
    rows = []
    r_squared = None
    scaling = {}
    if "protocols" in grids:
        rows.extend(protocol_grid(config, keys, t, quiet))
    if "k" in grids:
        rows.extend(k_grid(config, keys, t, ks or K_GRID, quiet))
    if "sparsity" in grids:
        sparse_rows = sparsity_grid(config, keys, quiet=quiet)
        scaling = check_sparsity_scaling(sparse_rows)
        r_squared = sparse_r_squared(sparse_rows)
        rows.extend(sparse_rows)
    if "models" in grids:
        rows.extend(model_comparison(config, keys, secure_models, quiet))

    path = Path(csv_path) if csv_path else Path(config.out_dir) / "bench.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(rows, ConfigManager.echo(config)))
    click.echo(render_table(rows))
    for protocol, value in scaling.items():
        click.echo(f"{protocol}_r_squared = {value:.6f}")
    if r_squared is not None:
        click.echo(f"sparsity_r_squared = {r_squared:.6f}")
    click.echo(f"csv = {path}")


def main(argv=None) -> int:
    """Entry point; returns the process exit code"""
    try:
        result = cli.main(args=argv, prog_name="s3rec", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("Aborted", err=True)
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
