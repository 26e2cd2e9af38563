import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import projects  # noqa: E402

from mllint.config import Config  # noqa: E402
from mllint.scanner import scan  # noqa: E402

LINTERS_INSTALLED = all(shutil.which(t) for t in ("pylint", "mypy", "black", "isort", "bandit"))
requires_git = pytest.mark.skipif(shutil.which("git") is None, reason="git not installed")
requires_linters = pytest.mark.skipif(not LINTERS_INSTALLED, reason="external linters not installed")


@pytest.fixture(scope="session")
def golden(tmp_path_factory) -> Path:
    """The GOLDEN project. Shared across tests, so never modify it."""
    return projects.make_golden(tmp_path_factory.mktemp("fixtures") / "golden")


@pytest.fixture
def bare(tmp_path) -> Path:
    return projects.make_bare(tmp_path / "bare")


@pytest.fixture
def project(tmp_path):
    """Factory writing a project from a ``{path: content}`` mapping and returning its context."""

    count = iter(range(1000))

    def build(files, git=False):
        root = tmp_path / f"proj{next(count)}"
        root.mkdir()
        projects.write(root, files)
        if git:
            projects.git_init(root)
        return scan(root)

    return build


@pytest.fixture
def default_config() -> Config:
    return Config()


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
