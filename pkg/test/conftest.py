import shutil

import pytest
from click.testing import CliRunner
from hypothesis import settings

import risa.cli
from risa import hooks
from risa.dataset import extract_features, generate, load_manifest, split, write_labels
from risa.model import ModelConfig

from .utils import SMALL_MODEL, TOY_FAMILY, TOY_FAMILY_DOCUMENT

pytest_plugins = ["pytester", "pytest_mock"]


# Register Hypothesis profile. Could be used as
# `pytest test --hypothesis-profile <profile-name>`
settings.register_profile("CI", max_examples=1000)


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False, help="Run slow end-to-end tests.")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long end-to-end training runs, enabled with `--run-slow`.")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def reset_hooks():
    yield
    hooks.unregister_all()


@pytest.fixture(scope="session")
def _toy_dataset(tmp_path_factory):
    """Toy dataset generated once per session: 2 sub-classes × 10 shapes, 2 parts, level-0 template."""
    directory = tmp_path_factory.mktemp("toy")
    manifest = split(generate(TOY_FAMILY, 10, seed=1, out_dir=directory), seed=1)
    manifest.save()
    write_labels(manifest)
    return directory


@pytest.fixture()
def toy_dataset(_toy_dataset, tmp_path):
    """A private copy of the toy dataset, safe to modify."""
    directory = tmp_path / "toy"
    shutil.copytree(str(_toy_dataset), str(directory))
    return directory


@pytest.fixture(scope="session")
def toy_features(_toy_dataset):
    return extract_features(load_manifest(_toy_dataset))


@pytest.fixture(scope="session")
def small_config(toy_features):
    return ModelConfig(parts=toy_features.parts, edges=toy_features.edges_count, **SMALL_MODEL)


@pytest.fixture()
def family_file(tmp_path):
    path = tmp_path / "toy.yaml"
    path.write_text(TOY_FAMILY_DOCUMENT)
    return path


@pytest.fixture()
def cli():
    """CLI runner helper.

    Provides in-process execution via `click.CliRunner`.
    """
    cli_runner = CliRunner(mix_stderr=False)

    class Runner:
        @staticmethod
        def main(*args, **kwargs):
            return cli_runner.invoke(risa.cli.risa, args, **kwargs)

    return Runner()
