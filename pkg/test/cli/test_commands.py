import csv
import json

import pytest
import yaml
from _pytest.main import ExitCode
from click.testing import CliRunner

import risa.cli
from risa.dataset import load_manifest
from risa.runner import read_loss_log
from risa.tensor import load_checkpoint

from ..utils import SMALL_MODEL

TRAIN_OPTIONS = {
    "lr": 1e-3,
    "gamma": 1.0,
    "lambda1": 1.0,
    "lambda2": 1.0,
    "lambda3": 1.0,
    "epochs": 2,
    "patience": 0,
}


@pytest.fixture(scope="module")
def config_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("config") / "run.yaml"
    path.write_text(yaml.safe_dump({"seed": 0, "model": SMALL_MODEL, "train": TRAIN_OPTIONS}))
    return path


@pytest.fixture(scope="module")
def trained(_toy_dataset, config_file, tmp_path_factory):
    """Output directory of a short training run with the checkpoint and descriptors of every toy shape."""
    out = tmp_path_factory.mktemp("trained")
    runner = CliRunner(mix_stderr=False)
    result = runner.invoke(
        risa.cli.risa, ["train", "--config", str(config_file), "--dataset", str(_toy_dataset), "--out", str(out)]
    )
    assert result.exit_code == ExitCode.OK, result.stdout + result.stderr
    result = runner.invoke(
        risa.cli.risa,
        [
            "embed",
            "--checkpoint",
            str(out / "model.risa"),
            "--dataset",
            str(_toy_dataset),
            "--out",
            str(out / "descriptors.csv"),
        ],
    )
    assert result.exit_code == ExitCode.OK, result.stdout + result.stderr
    return out


def test_commands_help(cli):
    result = cli.main()

    assert result.exit_code == ExitCode.OK, result.stdout
    for command in ("embed", "eval", "gen", "query", "report", "train"):
        assert f"  {command} " in result.stdout

    result_help = cli.main("--help")
    result_h = cli.main("-h")

    assert result.stdout == result_h.stdout == result_help.stdout


def test_run_subprocess(testdir):
    # To verify that CLI entry point is installed properly
    result = testdir.run("risa")
    assert result.ret == ExitCode.OK


def test_commands_version(cli):
    result = cli.main("--version")

    assert result.exit_code == ExitCode.OK, result.stdout
    assert "version" in result.stdout.split("\n")[0]


@pytest.mark.parametrize(
    "args, error",
    (
        (("gen",), "Error: Missing option '--out'."),
        (("gen", "--out", "x", "--count", "1"), "Error: Invalid value for '--count': 1 is smaller than the minimum"),
        (("train", "--dataset", "not-a-directory"), "Error: Invalid value for '--dataset': Directory not found"),
        (("train",), 'Error: Missing option "--dataset" (or `paths.dataset` in the config).'),
        (("embed", "--dataset", "."), 'Error: Missing option "--checkpoint" (or `paths.checkpoint` in the config).'),
        (("query",), "Error: Missing argument 'DESCRIPTORS'."),
        (("eval", "missing.csv"), "does not exist"),
    ),
)
def test_usage_errors(cli, args, error):
    result = cli.main(*args)
    assert result.exit_code == ExitCode.INTERRUPTED, result.stdout
    assert error in result.stderr


def test_gen(cli, family_file, tmp_path):
    out = tmp_path / "dataset"
    result = cli.main("gen", "--spec", str(family_file), "--out", str(out), "--count", "5", "--seed", "1")
    assert result.exit_code == ExitCode.OK, result.stderr
    assert result.stdout.strip() == f"Generated 10 shapes of `toy` (8 train, 2 test) in {out}"
    manifest = load_manifest(out)
    assert manifest.labels == ["plain"] * 5 + ["tapered"] * 5
    assert len(list(out.glob("*.obj"))) == 20
    assert (out / "labels.json").exists()


def test_gen_rotate(cli, family_file, tmp_path):
    out = tmp_path / "dataset"
    result = cli.main("gen", "--spec", str(family_file), "--out", str(out), "--count", "5", "--rotate")
    assert result.exit_code == ExitCode.OK, result.stderr
    assert all(shape.rotation != (1.0, 0.0, 0.0, 0.0) for shape in load_manifest(out).shapes)


def test_gen_unknown_family(cli, tmp_path):
    result = cli.main("gen", "--spec", "chairs", "--out", str(tmp_path))
    assert result.exit_code == 1
    assert result.stderr.startswith("Error: Unknown family `chairs`")


def test_train(trained):
    lines = (trained / "loss_log.csv").read_text().splitlines()
    assert lines[0] == "epoch,l_vae_part,l_vae_global,l_trip_part,l_trip_global,total"
    assert [record.epoch for record in read_loss_log(trained / "loss_log.csv")] == [1, 2]
    _, metadata = load_checkpoint(trained / "model.risa")
    assert metadata["epoch"] == 2


def test_train_output(cli, toy_dataset, config_file, tmp_path):
    result = cli.main("train", "--config", str(config_file), "--dataset", str(toy_dataset), "--out", str(tmp_path))
    assert result.exit_code == ExitCode.OK, result.stderr
    lines = result.stdout.split("\n")
    assert " risa training session starts " in lines[0]
    assert lines[1].startswith("platform")
    assert "collected shapes: 16 in 2 batches, up to 2 epochs" in result.stdout
    assert lines[-4].startswith("Checkpoint saved to")
    assert " 2 epochs in " in lines[-2]


def test_train_overrides(cli, toy_dataset, config_file, tmp_path):
    checkpoint = tmp_path / "custom.risa"
    result = cli.main(
        "train",
        "--config",
        str(config_file),
        "--dataset",
        str(toy_dataset),
        "--out",
        str(tmp_path),
        "--checkpoint",
        str(checkpoint),
        "--epochs",
        "1",
        "--seed",
        "3",
    )
    assert result.exit_code == ExitCode.OK, result.stderr
    _, metadata = load_checkpoint(checkpoint)
    assert (metadata["epoch"], metadata["seed"]) == (1, 3)
    assert len(read_loss_log(tmp_path / "loss_log.csv")) == 1


def test_train_with_config_paths(cli, toy_dataset, tmp_path):
    config = tmp_path / "run.yaml"
    config.write_text(
        yaml.safe_dump(
            {
                "model": SMALL_MODEL,
                "train": dict(TRAIN_OPTIONS, epochs=1),
                "paths": {"dataset": str(toy_dataset), "output": str(tmp_path / "out")},
            }
        )
    )
    result = cli.main("train", "--config", str(config))
    assert result.exit_code == ExitCode.OK, result.stderr
    assert (tmp_path / "out" / "model.risa").exists()


@pytest.mark.parametrize(
    "document, message",
    (
        ("train:\n  lr: 0\n", "invalid value at `train/lr`"),
        ("model:\n  depth: 3\n", "invalid value at `model`"),
        ("- 1\n- 2\n", "a config must be a mapping"),
    ),
)
def test_invalid_config(cli, toy_dataset, tmp_path, document, message):
    config = tmp_path / "run.yaml"
    config.write_text(document)
    result = cli.main("train", "--config", str(config), "--dataset", str(toy_dataset))
    assert result.exit_code == 1
    assert message in result.stderr


@pytest.mark.parametrize("show_errors_tracebacks", (False, True))
def test_train_internal_error(cli, mocker, toy_dataset, config_file, tmp_path, show_errors_tracebacks):
    mocker.patch("risa.runner.core.TrainingRunner._step", side_effect=ZeroDivisionError("division by zero"))
    args = ["train", "--config", str(config_file), "--dataset", str(toy_dataset), "--out", str(tmp_path)]
    if show_errors_tracebacks:
        args.append("--show-errors-tracebacks")
    result = cli.main(*args)
    assert result.exit_code == 1
    assert "Error: division by zero" in result.stderr
    assert ("Traceback (most recent call last)" in result.stderr) is show_errors_tracebacks
    # The loss log has only its header
    assert (tmp_path / "loss_log.csv").read_text().splitlines() == [
        "epoch,l_vae_part,l_vae_global,l_trip_part,l_trip_global,total"
    ]


def test_train_connectivity_mismatch(cli, toy_dataset, config_file):
    name = load_manifest(toy_dataset).select("train")[0].parts[0]
    (toy_dataset / name).write_text("v 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\nf 1 2 3\nf 1 4 2\nf 1 3 4\nf 2 4 3\n")
    result = cli.main("train", "--config", str(config_file), "--dataset", str(toy_dataset))
    assert result.exit_code == 1
    assert result.stderr.strip().endswith("expected 18 template edges, got 6")


def test_embed(trained, _toy_dataset):
    with open(trained / "descriptors.csv") as fd:
        rows = list(csv.reader(fd))
    assert rows[0] == ["id", "label", "d_0", "d_1", "d_2", "d_3"]
    assert [row[0] for row in rows[1:]] == [shape.id for shape in load_manifest(_toy_dataset).shapes]


def test_embed_split(cli, trained, toy_dataset, tmp_path):
    out = tmp_path / "test.csv"
    result = cli.main(
        "embed",
        "--checkpoint",
        str(trained / "model.risa"),
        "--dataset",
        str(toy_dataset),
        "--split",
        "test",
        "--out",
        str(out),
    )
    assert result.exit_code == ExitCode.OK, result.stderr
    assert result.stdout.strip() == f"Wrote 4 descriptors to {out}"
    # Descriptors do not depend on which shapes are embedded together
    expected = {row[0]: row for row in csv.reader((trained / "descriptors.csv").read_text().splitlines())}
    for row in list(csv.reader(out.read_text().splitlines()))[1:]:
        assert row == expected[row[0]]


def test_query(cli, trained):
    result = cli.main("query", str(trained / "descriptors.csv"), "plain_000", "--k", "3")
    assert result.exit_code == ExitCode.OK, result.stderr
    lines = result.stdout.strip().split("\n")
    assert lines[0] == "rank\tid\tlabel\tdistance"
    assert len(lines) == 4
    rows = [line.split("\t") for line in lines[1:]]
    assert [row[0] for row in rows] == ["1", "2", "3"]
    assert "plain_000" not in [row[1] for row in rows]
    distances = [float(row[3]) for row in rows]
    assert distances == sorted(distances)


@pytest.mark.parametrize("args, rows", (((), 2), (("--k", "5"), 5)))
def test_query_default_k_from_config(cli, trained, tmp_path, args, rows):
    config = tmp_path / "query.yaml"
    config.write_text(yaml.safe_dump({"evaluation": {"top_k": 2}}))
    result = cli.main("query", str(trained / "descriptors.csv"), "plain_000", "--config", str(config), *args)
    assert result.exit_code == ExitCode.OK, result.stderr
    assert len(result.stdout.strip().split("\n")) == rows + 1


def test_query_default_k(cli, trained):
    result = cli.main("query", str(trained / "descriptors.csv"), "plain_000")
    assert result.exit_code == ExitCode.OK, result.stderr
    assert len(result.stdout.strip().split("\n")) == 11


def test_query_unknown_id(cli, trained):
    result = cli.main("query", str(trained / "descriptors.csv"), "nope")
    assert result.exit_code == 1
    assert result.stderr.strip() == "Error: Unknown shape id: nope"


@pytest.mark.parametrize("pool", ("test", "all"))
def test_eval(cli, trained, toy_dataset, tmp_path, pool):
    descriptors = str(trained / "descriptors.csv")
    result = cli.main("eval", descriptors, "--dataset", str(toy_dataset), "--out", str(tmp_path), "--pool", pool)
    assert result.exit_code == ExitCode.OK, result.stderr
    lines = result.stdout.strip().split("\n")
    assert lines[0].split() == ["metric", "micro", "macro"]
    assert [line.split()[0] for line in lines[1:6]] == ["NN", "FT", "ST", "NDCG", "mAP"]
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert set(metrics["micro"]) == {"NN", "FT", "ST", "NDCG", "mAP"}
    assert metrics["skipped_queries"] == 0
    assert all(0 <= value <= 1 for value in metrics["macro"].values())
    curve = (tmp_path / "pr_curve.csv").read_text().splitlines()
    assert curve[0] == "recall,precision"
    assert len(curve) == 102
    assert (tmp_path / "tier.ppm").read_bytes().startswith(b"P6\n")


def test_eval_without_dataset(cli, trained, tmp_path):
    result = cli.main("eval", str(trained / "descriptors.csv"), "--out", str(tmp_path))
    assert result.exit_code == ExitCode.OK, result.stderr
    assert (tmp_path / "tier.ppm").read_bytes().startswith(b"P6\n21 21\n")


def test_eval_everything_skipped(cli, tmp_path):
    descriptors = tmp_path / "descriptors.csv"
    descriptors.write_text("id,label,d_0\na,x,0.0\nb,y,1.0\n")
    result = cli.main("eval", str(descriptors), "--out", str(tmp_path))
    assert result.exit_code == 1
    assert result.stderr.strip() == "Error: No query could be evaluated (2 skipped)"


def test_report(cli, trained, toy_dataset, tmp_path):
    out = tmp_path / "attention.csv"
    checkpoint = str(trained / "model.risa")
    result = cli.main("report", "--checkpoint", checkpoint, "--dataset", str(toy_dataset), "--out", str(out))
    assert result.exit_code == ExitCode.OK, result.stderr
    assert result.stdout.strip() == f"Wrote attention weights of 20 shapes to {out}"
    with out.open() as fd:
        rows = list(csv.DictReader(fd))
    assert len(rows) == 20
    for row in rows:
        assert float(row["alpha_1"]) + float(row["alpha_2"]) == pytest.approx(1.0)
        assert float(row["w_geo"]) + float(row["w_struct"]) == pytest.approx(1.0)


def test_verbosity(cli, toy_dataset, config_file, tmp_path, caplog):
    args = ("train", "--config", str(config_file), "--dataset", str(toy_dataset), "--out", str(tmp_path))
    result = cli.main("--verbosity", "info", *args)
    assert result.exit_code == ExitCode.OK, result.stderr
    assert "Extracted features of 16 shapes, body part slot 1" in caplog.text
