import os
import pathlib
import sys
import traceback
from typing import Generator, List, Optional, Tuple

import attr
import click

from .. import embedding, runner
from ..dataset import (
    audit_separability,
    extract_features,
    generate,
    load_family_spec,
    load_manifest,
    perturb_rotations,
    split,
    write_labels,
)
from ..hooks import GLOBAL_HOOK_DISPATCHER, HookContext, HookDispatcher
from ..loaders import write_json
from ..retrieval import (
    METRIC_NAMES,
    DescriptorIndex,
    evaluate,
    pr_curve,
    query,
    read_descriptors,
    tier_image,
    write_descriptors,
    write_pr_curve,
)
from ..runner import events
from ..utils import get_workers_count
from . import callbacks, output
from .config import POOL_MODES, RunConfig
from .context import ExecutionContext
from .handlers import EventHandler, LossLogWriter

CONTEXT_SETTINGS = {"help_option_names": ["-h", "--help"]}

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
DESCRIPTORS_FILE_NAME = "descriptors.csv"
CHECKPOINT_FILE_NAME = "model.risa"
LOSS_LOG_FILE_NAME = "loss_log.csv"
METRICS_FILE_NAME = "metrics.json"
PR_CURVE_FILE_NAME = "pr_curve.csv"
TIER_IMAGE_FILE_NAME = "tier.ppm"
ATTENTION_FILE_NAME = "attention.csv"

config_option = click.option(
    "--config",
    "run_config",
    help="JSON or YAML run configuration.",
    type=click.Path(exists=True, dir_okay=False),
    callback=callbacks.validate_config,
)
seed_option = click.option("--seed", help="Seed of every random choice.", type=click.IntRange(0, 2 ** 64 - 1))
workers_option = click.option(
    "--workers",
    "-w",
    "workers_num",
    help="Number of worker threads, capped by RISA_THREADS.",
    type=click.IntRange(1),
    default=None,
)


@click.group(context_settings=CONTEXT_SETTINGS)
@click.option("--pre-run", help="A module to execute before running the command.", type=str)
@click.option(
    "--verbosity",
    help="Level of log messages shown on stderr.",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default="WARNING",
    callback=callbacks.convert_verbosity,
)
@click.version_option()
def risa(pre_run: Optional[str] = None, verbosity: int = 0) -> None:
    """Fine-grained 3D shape retrieval with part-aware attention."""
    if pre_run:
        load_hook(pre_run)


@risa.command(short_help="Generate a synthetic dataset.")
@click.option("--spec", "family", help="Built-in family name or a family file.", default="tables3", show_default=True)
@click.option("--out", help="Output directory.", type=click.Path(file_okay=False), required=True)
@seed_option
@click.option("--count", help="Shapes per sub-class.", type=click.IntRange(2), default=20, show_default=True)
@click.option("--level", help="Template subdivision level, overrides the family's one.", type=click.IntRange(0))
@click.option("--rotate", help="Apply a random rotation to every shape.", is_flag=True, default=False)
def gen(family: str, out: str, seed: Optional[int], count: int, level: Optional[int], rotate: bool) -> None:
    """Generate a family of shapes in template correspondence, split 4:1 into train and test shapes."""
    seed = seed or 0
    with callbacks.abort_on_error():
        spec = load_family_spec(family)
        if level is not None:
            spec = attr.evolve(spec, level=level)
        manifest = split(generate(spec, count, seed, out), seed=seed)
        manifest.save()
        if rotate:
            manifest = perturb_rotations(manifest, seed)
        write_labels(manifest)
        audit_separability(extract_features(manifest).inputs)
    train_count = len(manifest.select("train"))
    click.echo(
        f"Generated {len(manifest.shapes)} shapes of `{spec.name}` "
        f"({train_count} train, {len(manifest.shapes) - train_count} test) in {out}"
    )


@risa.command(short_help="Train a model.")
@config_option
@click.option("--dataset", help="Dataset directory.", type=str, callback=callbacks.validate_directory)
@click.option("--checkpoint", help="Checkpoint path.", type=click.Path(dir_okay=False))
@click.option("--out", help="Output directory for the loss log.", type=click.Path(file_okay=False))
@seed_option
@click.option("--epochs", help="Maximum number of epochs.", type=click.IntRange(1))
@workers_option
@click.option(
    "--show-errors-tracebacks",
    help="Show full tracebacks for internal errors.",
    is_flag=True,
    is_eager=True,
    default=False,
)
def train(
    run_config: RunConfig,
    dataset: Optional[str],
    checkpoint: Optional[str],
    out: Optional[str],
    seed: Optional[int],
    epochs: Optional[int],
    workers_num: Optional[int],
    show_errors_tracebacks: bool,
) -> None:
    """Train the network on the train split of a dataset."""
    config = run_config.with_overrides(seed=seed, dataset=dataset, checkpoint=checkpoint, output=out, epochs=epochs)
    out_dir = pathlib.Path(config.paths.output or ".")
    with callbacks.abort_on_error():
        manifest = load_manifest(require_dataset(config))
        features = extract_features(
            manifest, kind=config.base_feature, split="train", workers_num=get_workers_count(workers_num)
        )
        model_config = config.model_config(features.parts, features.edges_count)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint_path = config.paths.checkpoint or str(out_dir / CHECKPOINT_FILE_NAME)
    prepared_runner = runner.prepare(features, model_config, config.train, checkpoint_path)
    execute(prepared_runner.execute(), show_errors_tracebacks, str(out_dir / LOSS_LOG_FILE_NAME))


def require_dataset(config: RunConfig) -> str:
    if config.paths.dataset is None:
        raise click.UsageError('Missing option "--dataset" (or `paths.dataset` in the config).')
    return config.paths.dataset


def require_checkpoint(config: RunConfig) -> str:
    if config.paths.checkpoint is None:
        raise click.UsageError('Missing option "--checkpoint" (or `paths.checkpoint` in the config).')
    return config.paths.checkpoint


def load_hook(module_name: str) -> None:
    """Load the given hook by importing it."""
    try:
        sys.path.append(os.getcwd())  # fix ModuleNotFoundError module in cwd
        __import__(module_name)
    except Exception:
        click.secho("An exception happened during the hook loading:\n", fg="red")
        message = traceback.format_exc()
        click.secho(message, fg="red")
        raise click.Abort()


def execute(
    prepared_runner: Generator[events.ExecutionEvent, None, None],
    show_errors_tracebacks: bool,
    loss_log_file: str,
) -> None:
    """Execute a prepared runner by drawing events from it and passing to a proper handler."""
    # The file handler goes first so the loss log is complete when the summary is displayed
    handlers: List[EventHandler] = [LossLogWriter(loss_log_file), output.default.DefaultOutputStyleHandler()]
    execution_context = ExecutionContext(show_errors_tracebacks=show_errors_tracebacks, loss_log_file=loss_log_file)
    GLOBAL_HOOK_DISPATCHER.dispatch("after_init_cli_run_handlers", HookContext(), handlers, execution_context)
    try:
        for event in prepared_runner:
            for handler in handlers:
                handler.handle_event(execution_context, event)
    except click.exceptions.Exit:
        raise
    except Exception as exc:
        for handler in handlers:
            handler.shutdown()
        if isinstance(exc, click.Abort):
            # To avoid showing "Aborted!" message, which is the default behavior in Click
            sys.exit(1)
        raise


@risa.command(short_help="Compute shape descriptors.")
@config_option
@click.option("--checkpoint", help="Trained model checkpoint.", type=click.Path(exists=True, dir_okay=False))
@click.option("--dataset", help="Dataset directory.", type=str, callback=callbacks.validate_directory)
@click.option("--out", help="Descriptor CSV path.", type=click.Path(dir_okay=False))
@click.option("--split", "split_name", help="Embed only one split.", type=click.Choice(["train", "test"]))
@workers_option
def embed(
    run_config: RunConfig,
    checkpoint: Optional[str],
    dataset: Optional[str],
    out: Optional[str],
    split_name: Optional[str],
    workers_num: Optional[int],
) -> None:
    """Write the descriptor of every shape of a dataset."""
    config = run_config.with_overrides(dataset=dataset, checkpoint=checkpoint)
    destination = out or str(pathlib.Path(config.paths.output or ".") / DESCRIPTORS_FILE_NAME)
    workers = get_workers_count(workers_num)
    with callbacks.abort_on_error():
        model = embedding.TrainedModel.from_checkpoint(require_checkpoint(config))
        features = model.features(load_manifest(require_dataset(config)), split=split_name, workers_num=workers)
        index = embedding.to_index(embedding.embed(model, features, workers))
        write_descriptors(destination, index)
    click.echo(f"Wrote {len(index)} descriptors to {destination}")


@risa.command(name="query", short_help="Rank shapes against a query shape.")
@click.argument("descriptors", type=click.Path(exists=True, dir_okay=False))
@click.argument("query_id", type=str)
@config_option
@click.option(
    "--k", "top_k", help="Number of results, 10 unless the config sets `evaluation.top_k`.", type=click.IntRange(1)
)
def query_(descriptors: str, query_id: str, run_config: RunConfig, top_k: Optional[int]) -> None:
    """Print the K nearest shapes to QUERY_ID: rank, id, label and distance."""
    top_k = run_config.with_overrides(top_k=top_k).evaluation.top_k
    with callbacks.abort_on_error():
        index = read_descriptors(descriptors)
        if query_id not in index.ids:
            raise click.ClickException(f"Unknown shape id: {query_id}")
        ranked = query(index, index.descriptor_of(query_id), query_id).top(top_k)
    click.echo("rank\tid\tlabel\tdistance")
    for rank, (shape_id, label, distance) in enumerate(zip(ranked.ids, ranked.labels, ranked.distances), start=1):
        click.echo(f"{rank}\t{shape_id}\t{label}\t{distance:.17g}")


query_.name = "query"


def evaluation_pool(
    index: DescriptorIndex, dataset: Optional[str], pool: str
) -> Tuple[DescriptorIndex, DescriptorIndex]:
    """The index to rank against and the queries, as selected by the pool mode."""
    if dataset is None:
        return index, index
    manifest = load_manifest(dataset)
    test_ids = [shape.id for shape in manifest.select("test") if shape.id in index.ids]
    queries = index.subset(test_ids)
    if pool == "test":
        return queries, queries
    return index, queries


@risa.command(name="eval", short_help="Evaluate retrieval quality.")
@config_option
@click.argument("descriptors", type=click.Path(exists=True, dir_okay=False))
@click.option("--dataset", help="Dataset directory with the train / test split.", type=str)
@click.option("--out", help="Output directory.", type=click.Path(file_okay=False))
@click.option("--pool", help="Retrieval pool.", type=click.Choice(POOL_MODES))
@workers_option
def eval_(
    run_config: RunConfig,
    descriptors: str,
    dataset: Optional[str],
    out: Optional[str],
    pool: Optional[str],
    workers_num: Optional[int],
) -> None:
    """Compute NN, FT, ST, NDCG and mAP, a precision-recall curve and a tier image.

    Without a dataset every descriptor is both a query and a pool member.
    """
    config = run_config.with_overrides(dataset=dataset, output=out, pool=pool)
    out_dir = pathlib.Path(config.paths.output or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = get_workers_count(workers_num)
    with callbacks.abort_on_error():
        index, queries = evaluation_pool(read_descriptors(descriptors), config.paths.dataset, config.evaluation.pool)
        report = evaluate(index, queries, workers)
        write_json(out_dir / METRICS_FILE_NAME, report.as_dict())
        write_pr_curve(out_dir / PR_CURVE_FILE_NAME, pr_curve(index, queries, workers))
        tier_image(index, out_dir / TIER_IMAGE_FILE_NAME)
    template = "{:<8}{:>10}{:>10}"
    click.echo(template.format("metric", "micro", "macro"))
    for name in METRIC_NAMES:
        click.echo(template.format(name, f"{report.micro[name]:.4f}", f"{report.macro[name]:.4f}"))
    if report.skipped_queries:
        click.secho(f"Skipped queries: {report.skipped_queries}", fg="yellow")


@risa.command(short_help="Export attention weights.")
@config_option
@click.option("--checkpoint", help="Trained model checkpoint.", type=click.Path(exists=True, dir_okay=False))
@click.option("--dataset", help="Dataset directory.", type=str, callback=callbacks.validate_directory)
@click.option("--out", help="Attention CSV path.", type=click.Path(dir_okay=False))
@workers_option
def report(
    run_config: RunConfig,
    checkpoint: Optional[str],
    dataset: Optional[str],
    out: Optional[str],
    workers_num: Optional[int],
) -> None:
    """Write per-shape Part-Geo and Geo-Struct attention weights."""
    config = run_config.with_overrides(dataset=dataset, checkpoint=checkpoint)
    destination = out or str(pathlib.Path(config.paths.output or ".") / ATTENTION_FILE_NAME)
    workers = get_workers_count(workers_num)
    with callbacks.abort_on_error():
        model = embedding.TrainedModel.from_checkpoint(require_checkpoint(config))
        features = model.features(load_manifest(require_dataset(config)), workers_num=workers)
        embedding.write_attention_report(destination, embedding.embed(model, features, workers))
    click.echo(f"Wrote attention weights of {len(features.inputs)} shapes to {destination}")


@HookDispatcher.register_spec
def after_init_cli_run_handlers(
    context: HookContext, handlers: List[EventHandler], execution_context: ExecutionContext
) -> None:
    """Called by `risa train` once its event handlers are set up; hooks may add or replace handlers."""
