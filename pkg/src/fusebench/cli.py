"""Command-line entry point tying the workbench together.

Every subcommand is deterministic given identical inputs, flags and seeds
(`serve` excepted). Failures print one structured `error: ...` line and exit
1; unknown commands print usage and exit 2.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import corpus, dataset, metaeval, metrics
from .corpus import FiCInstance, Split, SystemOutput
from .gateway import HttpScorer, MockScorer, ScorerEndpointConfig
from .leaderboard import Leaderboard


def _load_instances(path: str) -> list[FiCInstance]:
    p = Path(path)
    files = sorted(p.glob("*.ndjson")) + sorted(p.glob("*.jsonl")) if p.is_dir() else [p]
    out: list[FiCInstance] = []
    for f in files:
        out.extend(corpus.load_instances(f))
    if not out:
        raise click.ClickException(f"no instances found at {path}")
    return out


def _gateway(mock_scorer: float | None, scorer_url: str | None):
    if mock_scorer is not None:
        return MockScorer(default=mock_scorer)
    url = scorer_url or os.environ.get("FUSEBENCH_SCORER_URL")
    if not url:
        raise click.ClickException(
            "no scorer configured; pass --mock-scorer or --scorer-url / FUSEBENCH_SCORER_URL"
        )
    return HttpScorer(ScorerEndpointConfig(base_url=url))


def _load_outputs(path: str, system_id: str) -> list[SystemOutput]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                doc = json.loads(line)
                out.append(SystemOutput.build(doc["instance_id"], system_id, doc["passage"]))
    return out


@click.group()
def cli() -> None:
    """Benchmark workbench for highlight-guided multi-review fusion."""


@cli.command()
@click.option("--in", "in_path", required=True, help="Raw pairs JSON (list of objects).")
@click.option("--out", "out_path", required=True, help="Interchange NDJSON output.")
def ingest(in_path: str, out_path: str) -> None:
    """Normalize raw review/summary JSON into the interchange format."""
    with open(in_path, encoding="utf-8") as f:
        raw = json.load(f)
    instances = [corpus.instance_from_json(doc) for doc in raw]
    corpus.dump_instances(instances, out_path)
    click.echo(f"wrote {len(instances)} instances to {out_path}")


@cli.command()
@click.option("--in", "in_path", required=True)
@click.option("--split", default="overall", help="Train/Dev/Test/overall")
@click.option("--json", "as_json", is_flag=True)
def stats(in_path: str, split: str, as_json: bool) -> None:
    """Dataset statistics table."""
    instances = _load_instances(in_path)
    table = dataset.compute_statistics(instances)
    if as_json:
        click.echo(json.dumps(table.as_dict(), indent=2))
    elif split.lower() == "overall":
        click.echo(dataset.render_statistics(table))
    else:
        row = table.per_split.get(split.capitalize())
        if row is None:
            raise click.ClickException(f"no instances in split {split!r}")
        click.echo(json.dumps(row.as_dict(), indent=2))


@cli.command("build-dataset")
@click.option("--in", "in_path", required=True)
@click.option("--out", "out_path", required=True)
@click.option("--seed", default=0, type=int)
@click.option("--ratios", default="0.8,0.1,0.1", help="train,dev,test fractions")
def build_dataset(in_path: str, out_path: str, seed: int, ratios: str) -> None:
    """Assign review-set-level splits and rewrite the instance file."""
    instances = _load_instances(in_path)
    parts = tuple(float(x) for x in ratios.split(","))
    if len(parts) != 3:
        raise click.ClickException("--ratios needs three comma-separated fractions")
    plan = dataset.assign_splits([i.review_set.id for i in instances], parts, seed)
    rebuilt = [
        FiCInstance.build(
            i.instance_id, i.review_set, i.fused_text, i.alignments,
            split=plan[i.review_set.id],
        )
        for i in instances
    ]
    corpus.dump_instances(rebuilt, out_path)
    counts = {s.value: sum(1 for i in rebuilt if i.split is s) for s in Split}
    click.echo(f"wrote {len(rebuilt)} instances ({counts}) to {out_path}")


@cli.command("gen-coverage-data")
@click.option("--in", "in_path", required=True)
@click.option("--out", "out_path", required=True)
@click.option("--seed", default=0, type=int)
def gen_coverage_data(in_path: str, out_path: str, seed: int) -> None:
    """Synthesize yes/no coverage-classifier training samples."""
    instances = _load_instances(in_path)
    samples = []
    skipped = 0
    for inst in instances:
        try:
            samples.extend(dataset.generate_coverage_training_data(inst, seed=seed))
        except dataset.DatasetError:
            skipped += 1
    dataset.dump_coverage_samples(samples, out_path)
    click.echo(f"wrote {len(samples)} samples to {out_path} ({skipped} instances skipped)")


@cli.command()
@click.option("--in", "in_path", required=True)
@click.option("--out", "out_path", required=True)
@click.option(
    "--mode",
    type=click.Choice([m.value for m in dataset.EncodingMode]),
    default=dataset.EncodingMode.WITH_HIGHLIGHTS.value,
)
@click.option("--decode", "do_decode", is_flag=True, help="Decode marked-up text instead.")
def encode(in_path: str, out_path: str, mode: str, do_decode: bool) -> None:
    """Render baseline input encodings (or decode a markers file)."""
    with open(out_path, "w", encoding="utf-8") as out:
        if do_decode:
            with open(in_path, encoding="utf-8") as f:
                for line in f:
                    if not line.strip():
                        continue
                    doc = json.loads(line)
                    stripped, spans = dataset.decode_markup(doc["text"])
                    out.write(json.dumps({
                        "instance_id": doc.get("instance_id"),
                        "text": stripped,
                        "spans": [s.to_pair() for s in spans],
                    }, ensure_ascii=False) + "\n")
        else:
            for inst in _load_instances(in_path):
                encoded = dataset.render_input(inst, dataset.EncodingMode(mode))
                out.write(json.dumps({
                    "instance_id": inst.instance_id,
                    "mode": encoded.mode.value,
                    "text": encoded.text,
                }, ensure_ascii=False) + "\n")
    click.echo(f"wrote {out_path}")


@cli.command()
@click.option("--instances", "instances_path", required=True)
@click.option("--outputs", "outputs_path", required=True, help="NDJSON {instance_id, passage}.")
@click.option("--system-id", default="system")
@click.option("--mock-scorer", type=float, default=None)
@click.option("--scorer-url", default=None)
@click.option("--mode", type=click.Choice(["trained", "nli"]), default="trained")
@click.option("--out", "out_path", default=None, help="Write per-instance reports JSON.")
def evaluate(instances_path, outputs_path, system_id, mock_scorer, scorer_url, mode, out_path):
    """Score system outputs for faithfulness, coverage and F-1."""
    instances = {i.instance_id: i for i in _load_instances(instances_path)}
    outputs = _load_outputs(outputs_path, system_id)
    gateway = _gateway(mock_scorer, scorer_url)
    reports = []
    for o in outputs:
        inst = instances.get(o.instance_id)
        if inst is None:
            raise click.ClickException(f"output references unknown instance {o.instance_id!r}")
        reports.append(metrics.evaluate_output(inst, o, gateway, metrics.CoverageMode(mode)))
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            json.dump([r.as_dict() for r in reports], f, indent=2)
    n = len(reports)
    mean_f = sum(r.faithfulness for r in reports) / n
    mean_c = sum(r.coverage for r in reports) / n
    mean_f1 = sum(r.f1 for r in reports) / n
    click.echo(metrics.render_report_table(reports))
    click.echo(
        f"\nmean: faithfulness {metrics.round_score(mean_f):.1f}  "
        f"coverage {metrics.round_score(mean_c):.1f}  f1 {metrics.round_score(mean_f1):.1f}"
    )


@cli.command("meta-eval")
@click.option("--metric", "metric_files", multiple=True, required=True,
              help="name=path of JSON [{instance_id, value}] records; repeatable.")
@click.option("--human", "human_files", multiple=True, required=True,
              help="axis=path of JSON [{instance_id, value}] records; repeatable.")
@click.option("--method", type=click.Choice([m.value for m in metaeval.CorrelationMethod]),
              default=metaeval.CorrelationMethod.KENDALL_TAU_B.value)
@click.option("--n-boot", default=1000, type=int)
@click.option("--sample-size", default=70, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--json", "as_json", is_flag=True)
def meta_eval(metric_files, human_files, method, n_boot, sample_size, seed, as_json):
    """Bootstrap metric-human correlations and render the table."""

    def load_series(spec: str) -> tuple[str, dict[str, float]]:
        name, _, path = spec.partition("=")
        if not path:
            raise click.ClickException(f"expected name=path, got {spec!r}")
        with open(path, encoding="utf-8") as f:
            records = json.load(f)
        return name, {r["instance_id"]: float(r["value"]) for r in records}

    metric_scores = dict(load_series(s) for s in metric_files)
    human_scores = dict(load_series(s) for s in human_files)
    table = metaeval.correlation_table(
        metric_scores, human_scores,
        method=metaeval.CorrelationMethod(method),
        n_boot=n_boot, sample_size=sample_size, seed=seed,
    )
    click.echo(json.dumps(table, indent=2) if as_json else metaeval.render_correlation_table(table))


@cli.command()
@click.option("--instances", "instances_path", required=True)
@click.option("--annotator-a", required=True)
@click.option("--annotator-b", required=True)
def agreement(instances_path, annotator_a, annotator_b):
    """Token-IoU inter-annotator agreement between two annotators."""
    values = []
    for inst in _load_instances(instances_path):
        a = [x for x in inst.alignments if x.annotator_id == annotator_a]
        b = [x for x in inst.alignments if x.annotator_id == annotator_b]
        if not a and not b:
            continue
        overall, _ = metrics.iou_agreement(a, b, inst)
        values.append(overall)
        click.echo(f"{inst.instance_id}: IoU {overall:.1f}")
    if not values:
        raise click.ClickException("no instances with alignments from either annotator")
    click.echo(f"mean IoU: {sum(values) / len(values):.1f}")


@cli.command()
@click.option("--in", "in_path", required=True, help="Submission NDJSON {instance_id, passage}.")
@click.option("--system-id", required=True)
@click.option("--instances", "instances_path", required=True)
@click.option("--data-dir", default=None, help="Leaderboard journal dir (FUSEBENCH_DATA_DIR).")
@click.option("--mock-scorer", type=float, default=None)
@click.option("--scorer-url", default=None)
@click.option("--mode", type=click.Choice(["trained", "nli"]), default="trained")
@click.option("--split", type=click.Choice(["train", "dev", "test", "all"]), default="test")
@click.option("--replace", is_flag=True)
def submit(in_path, system_id, instances_path, data_dir, mock_scorer, scorer_url, mode, split, replace):
    """Score a submission and append it to the leaderboard."""
    data_dir = data_dir or os.environ.get("FUSEBENCH_DATA_DIR") or "."
    board = Leaderboard(
        data_dir,
        _load_instances(instances_path),
        _gateway(mock_scorer, scorer_url),
        coverage_mode=metrics.CoverageMode(mode),
        split=None if split == "all" else Split(split.capitalize()),
    )
    submission = board.submit(system_id, _load_outputs(in_path, system_id), replace=replace)
    click.echo(json.dumps(submission.as_dict(), indent=2))


@cli.command("leaderboard")
@click.option("--data-dir", default=None)
@click.option("--json", "as_json", is_flag=True)
def leaderboard_cmd(data_dir, as_json):
    """Render the current leaderboard."""
    data_dir = data_dir or os.environ.get("FUSEBENCH_DATA_DIR") or "."
    board = Leaderboard(data_dir, instances=[], gateway=MockScorer(), split=None)
    table = board.render()
    click.echo(json.dumps(table.as_dict(), indent=2) if as_json else table.as_text())


@cli.command()
@click.option("--data-dir", default=None)
@click.option("--bind", default=None, help="host:port (FUSEBENCH_BIND).")
@click.option("--instances", "instances_path", default=None,
              help="Interchange file used to register pairs and the leaderboard.")
@click.option("--mock-scorer", type=float, default=None)
@click.option("--scorer-url", default=None)
def serve(data_dir, bind, instances_path, mock_scorer, scorer_url):
    """Run the annotation service plus leaderboard API."""
    import uvicorn

    from .annotation.http import create_app
    from .annotation.service import AnnotationService

    data_dir = data_dir or os.environ.get("FUSEBENCH_DATA_DIR") or "."
    bind = bind or os.environ.get("FUSEBENCH_BIND") or "127.0.0.1:8400"
    host, _, port = bind.partition(":")

    service = AnnotationService(data_dir)
    board = None
    if instances_path:
        instances = _load_instances(instances_path)
        for inst in instances:
            service.register_pair(inst.review_set, inst.fused_text)
        try:
            gateway = _gateway(mock_scorer, scorer_url)
        except click.ClickException:
            gateway = None
        if gateway is not None:
            board = Leaderboard(data_dir, instances, gateway)
    uvicorn.run(create_app(service, board), host=host or "127.0.0.1", port=int(port or 8400))


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        with click.Context(cli) as ctx:
            click.echo(cli.get_help(ctx))
        return 2
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        click.echo(f"error: {e.format_message()}", err=True)
        return 1
    except (OSError, ValueError, KeyError) as e:
        click.echo(f"error: {type(e).__name__}: {e}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
