"""Single-pass discovery of the project facts that rules need."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath
from typing import Any, Optional

import tomli

from .git import git_executable

EXCLUDED_DIRS = frozenset({
    ".git", ".hg", ".svn", ".tox", ".venv", "venv", "env",
    "node_modules", "__pycache__", ".mypy_cache", ".pytest_cache",
})
# (parent, child) pairs excluded wherever they occur
EXCLUDED_SUBDIRS = frozenset({(".dvc", "cache"), (".dvc", "tmp")})

CI_FILES = (
    ("gitlab-ci", ".gitlab-ci.yml"),
    ("azure-pipelines", "azure-pipelines.yml"),
    ("travis-ci", ".travis.yml"),
    ("jenkins", "Jenkinsfile"),
    ("bitbucket-pipelines", "bitbucket-pipelines.yml"),
    ("circleci", ".circleci/config.yml"),
)

ROOT_MANIFESTS = ("setup.py", "setup.cfg", "Pipfile", "Pipfile.lock", "pyproject.toml", "poetry.lock")


@dataclass(frozen=True)
class ProjectContext:
    """Immutable snapshot of a scanned project. All paths are relative POSIX paths."""

    root: Path
    python_files: tuple[str, ...] = ()
    test_files: tuple[str, ...] = ()
    has_git_dir: bool = False
    git_available: bool = False
    manifest_files: dict[str, tuple[str, ...]] = field(default_factory=dict)
    ci_configs: tuple[tuple[str, str], ...] = ()
    linter_configs: dict[str, str] = field(default_factory=dict)
    data_versioning_artifacts: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def source_files(self) -> tuple[str, ...]:
        tests = set(self.test_files)
        return tuple(p for p in self.python_files if p not in tests)

    def path(self, relative: str) -> Path:
        return self.root / relative

    def manifest(self, kind: str) -> Optional[str]:
        paths = self.manifest_files.get(kind, ())
        return paths[0] if paths else None


def is_test_file(path: str) -> bool:
    p = PurePosixPath(path.replace(os.sep, "/"))
    name = p.name
    if name.startswith("test_") and name.endswith(".py"):
        return True
    if name.endswith("_test.py"):
        return True
    return any(part in ("tests", "test") for part in p.parts[:-1])


def is_requirements_file(name: str) -> bool:
    return name.endswith(".txt") and (name.startswith("requirements") or name == "dev-requirements.txt")


def scan(root: str | Path) -> ProjectContext:
    root = Path(root).resolve()
    if not root.is_dir():
        raise NotADirectoryError(str(root))
    warnings: list[str] = []
    python_files: list[str] = []
    dvc_artifacts: list[str] = []

    stack: list[tuple[Path, tuple[str, ...]]] = [(root, ())]
    while stack:
        directory, parts = stack.pop()
        try:
            entries = sorted(os.scandir(directory), key=lambda e: e.name)
        except OSError as exc:
            rel = "/".join(parts) or "."
            warnings.append(f"could not read directory {rel}: {exc.strerror or exc}")
            continue
        if parts and any(e.name == "pyvenv.cfg" for e in entries):
            continue
        for entry in entries:
            if entry.is_symlink():
                continue
            rel_parts = (*parts, entry.name)
            rel = "/".join(rel_parts)
            if entry.is_dir(follow_symlinks=False):
                if entry.name in EXCLUDED_DIRS:
                    continue
                if parts and (parts[-1], entry.name) in EXCLUDED_SUBDIRS:
                    continue
                if entry.name == ".dvc":
                    dvc_artifacts.append(rel)
                stack.append((Path(entry.path), rel_parts))
            elif entry.is_file(follow_symlinks=False):
                if entry.name.endswith(".py"):
                    python_files.append(rel)
                if entry.name in ("dvc.yaml", "dvc.lock") or (
                    entry.name.endswith(".dvc") and len(entry.name) > 4
                ):
                    dvc_artifacts.append(rel)

    python_files.sort()
    manifests = _find_manifests(root)
    pyproject, pyproject_warning = _read_pyproject(root) if "pyproject.toml" in manifests else (None, None)
    if pyproject_warning:
        warnings.append(pyproject_warning)

    return ProjectContext(
        root=root,
        python_files=tuple(python_files),
        test_files=tuple(p for p in python_files if is_test_file(p)),
        has_git_dir=(root / ".git").exists(),
        git_available=git_executable() is not None,
        manifest_files=manifests,
        ci_configs=_find_ci_configs(root),
        linter_configs=_find_linter_configs(root, pyproject),
        data_versioning_artifacts=tuple(sorted(dvc_artifacts)),
        warnings=tuple(warnings),
    )


def _find_manifests(root: Path) -> dict[str, tuple[str, ...]]:
    found: dict[str, tuple[str, ...]] = {}
    requirements = sorted(
        p.name for p in root.iterdir() if p.is_file() and is_requirements_file(p.name)
    )
    if requirements:
        found["requirements"] = tuple(requirements)
    for name in ROOT_MANIFESTS:
        if (root / name).is_file():
            found[name] = (name,)
    return found


def _find_ci_configs(root: Path) -> tuple[tuple[str, str], ...]:
    configs: list[tuple[str, str]] = []
    workflows = root / ".github" / "workflows"
    if workflows.is_dir():
        for p in sorted(workflows.iterdir()):
            if p.is_file() and p.suffix in (".yml", ".yaml"):
                configs.append(("github-actions", f".github/workflows/{p.name}"))
    for provider, rel in CI_FILES:
        if (root / rel).is_file():
            configs.append((provider, rel))
    return tuple(configs)


def _read_pyproject(root: Path) -> tuple[Optional[dict[str, Any]], Optional[str]]:
    try:
        return tomli.loads((root / "pyproject.toml").read_text(encoding="utf-8")), None
    except (OSError, UnicodeDecodeError, tomli.TOMLDecodeError) as exc:
        return None, f"could not parse pyproject.toml: {exc}"


def _find_linter_configs(root: Path, pyproject: Optional[dict[str, Any]]) -> dict[str, str]:
    found: dict[str, str] = {}
    tool = (pyproject or {}).get("tool", {})
    if not isinstance(tool, dict):
        tool = {}

    def first_file(*names: str) -> Optional[str]:
        return next((n for n in names if (root / n).is_file()), None)

    setup_cfg_sections: list[str] = []
    if (root / "setup.cfg").is_file():
        parser = configparser.ConfigParser(interpolation=None, strict=False)
        try:
            parser.read(root / "setup.cfg", encoding="utf-8")
            setup_cfg_sections = parser.sections()
        except (configparser.Error, UnicodeDecodeError):
            pass

    pylint_tables = sorted(k for k in tool if k.startswith("pylint"))
    evidence = {
        "pylint": first_file(".pylintrc", "pylintrc")
        or (f"pyproject.toml [tool.{pylint_tables[0]}]" if pylint_tables else None),
        "mypy": first_file("mypy.ini", ".mypy.ini")
        or ("setup.cfg [mypy]" if "mypy" in setup_cfg_sections else None)
        or ("pyproject.toml [tool.mypy]" if "mypy" in tool else None),
        "black": "pyproject.toml [tool.black]" if "black" in tool else None,
        "isort": first_file(".isort.cfg")
        or ("pyproject.toml [tool.isort]" if "isort" in tool else None),
        "bandit": first_file(".bandit")
        or ("pyproject.toml [tool.bandit]" if "bandit" in tool else None),
    }
    for name, where in evidence.items():
        if where:
            found[name] = where
    return found
