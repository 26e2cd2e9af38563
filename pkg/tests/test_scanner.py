import os

import pytest

import projects
from conftest import requires_git
from mllint.git import GitCommandFailed, GitUnavailable, run_git
from mllint.scanner import EXCLUDED_DIRS, is_test_file, scan


@pytest.mark.parametrize("path, expected", [
    ("tests/helpers.py", True),
    ("src/model.py", False),
    ("src/model_test.py", True),
    ("test_model.py", True),
    ("pkg/test/conftest.py", True),
    ("testing_utils.py", False),
    ("src/contest.py", False),
])
def test_is_test_file(path, expected):
    assert is_test_file(path) is expected


def test_scan_python_files(project):
    ctx = project({"a.py": "", "tests/test_a.py": ""})
    assert ctx.python_files == ("a.py", "tests/test_a.py")
    assert ctx.test_files == ("tests/test_a.py",)
    assert ctx.source_files == ("a.py",)


def test_scan_excludes_tool_and_venv_dirs(project):
    files = {f"{d}/x.py": "" for d in EXCLUDED_DIRS}
    files.update({
        "custom-env/pyvenv.cfg": "home = /usr\n",
        "custom-env/lib/site.py": "",
        ".dvc/cache/ab/cd.py": "",
        ".hidden/kept.py": "",
        "src/z.py": "",
    })
    ctx = project(files)
    assert ctx.python_files == (".hidden/kept.py", "src/z.py")


def test_scan_does_not_follow_symlinks(project, tmp_path):
    outside = tmp_path / "outside"
    outside.mkdir()
    (outside / "far.py").write_text("")
    ctx = project({"a.py": ""})
    os.symlink(outside, ctx.root / "link")
    assert scan(ctx.root).python_files == ("a.py",)


def test_scan_detects_git_dvc_and_manifests(project):
    ctx = project({
        ".git/HEAD": "ref: refs/heads/main\n",
        "dvc.yaml": "stages: {}\n",
        "data/x.csv.dvc": "outs: []\n",
        "requirements.txt": "numpy\n",
        "requirements-dev.txt": "pytest\n",
        "Pipfile": "[packages]\n",
        ".gitlab-ci.yml": "test: {}\n",
        ".github/workflows/ci.yaml": "jobs: {}\n",
        "mypy.ini": "[mypy]\n",
    })
    assert ctx.has_git_dir
    assert ctx.data_versioning_artifacts == ("data/x.csv.dvc", "dvc.yaml")
    assert ctx.manifest_files["requirements"] == ("requirements-dev.txt", "requirements.txt")
    assert ctx.manifest("Pipfile") == "Pipfile"
    assert ctx.ci_configs == (("github-actions", ".github/workflows/ci.yaml"), ("gitlab-ci", ".gitlab-ci.yml"))
    assert ctx.linter_configs == {"mypy": "mypy.ini"}


def test_scan_linter_configs_from_pyproject_and_setup_cfg(project):
    ctx = project({
        "pyproject.toml": "[tool.pylint.messages_control]\ndisable = []\n[tool.black]\n",
        "setup.cfg": "[mypy]\nstrict = True\n",
        ".isort.cfg": "[settings]\n",
        ".bandit": "[bandit]\n",
    })
    assert ctx.linter_configs == {
        "pylint": "pyproject.toml [tool.pylint]",
        "mypy": "setup.cfg [mypy]",
        "black": "pyproject.toml [tool.black]",
        "isort": ".isort.cfg",
        "bandit": ".bandit",
    }


def test_scan_is_idempotent(golden):
    assert scan(golden) == scan(golden)


def test_unreadable_directory_is_a_warning(project):
    if os.geteuid() == 0:
        pytest.skip("root can read any directory")
    ctx = project({"a.py": "", "locked/b.py": ""})
    (ctx.root / "locked").chmod(0)
    try:
        again = scan(ctx.root)
    finally:
        (ctx.root / "locked").chmod(0o755)
    assert again.python_files == ("a.py",)
    assert any("locked" in w for w in again.warnings)


@requires_git
def test_run_git_inside_repo(tmp_path):
    projects.git_init(tmp_path)
    assert run_git(tmp_path, ["rev-parse", "--is-inside-work-tree"]).stdout.strip() == "true"


@requires_git
def test_run_git_outside_repo(tmp_path, monkeypatch):
    monkeypatch.setenv("GIT_CEILING_DIRECTORIES", str(tmp_path.parent))
    with pytest.raises(GitCommandFailed):
        run_git(tmp_path, ["rev-parse", "--is-inside-work-tree"])


def test_run_git_without_binary(tmp_path, monkeypatch):
    monkeypatch.setenv("PATH", str(tmp_path))
    with pytest.raises(GitUnavailable):
        run_git(tmp_path, ["rev-parse", "--is-inside-work-tree"])


def test_run_git_refuses_writes(tmp_path):
    with pytest.raises(ValueError):
        run_git(tmp_path, ["commit", "-m", "x"])
