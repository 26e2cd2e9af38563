"""Dependency manifest parsing and the dependency management rules."""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

import tomli

from ..config import Config
from ..model import Category, Rule, RuleResult
from ..scanner import ProjectContext

USE = "dependency-management.use"
SINGLE = "dependency-management.single"
DEV_SEPARATION = "dependency-management.dev-separation"

MANAGER_ORDER = ("requirements-txt", "setup-py", "pipenv", "poetry", "pep621")
MANAGER_NAMES = {
    "requirements-txt": "requirements.txt",
    "setup-py": "setup.py",
    "pipenv": "Pipenv",
    "poetry": "Poetry",
    "pep621": "PEP 621 (`[project]` in pyproject.toml)",
}
LOCKFILES = ("poetry.lock", "Pipfile.lock")
DEV_ONLY_TOOLS = ("pytest", "black", "isort", "mypy", "pylint", "bandit", "flake8", "pre-commit")
PEP621_DEV_GROUPS = ("dev", "test", "lint")

_NAME_RE = re.compile(r"^\s*([A-Za-z0-9][A-Za-z0-9._-]*)\s*(\[[^\]]*\])?\s*(.*)$")
_DEV_FILE_RE = re.compile(r"(^|[-_])(dev|develop|test|tests|lint)([-_.]|$)")


def normalize_name(name: str) -> str:
    return re.sub(r"[-_.]+", "-", name).lower()


@dataclass(frozen=True)
class DependencyDecl:
    name: str
    version_spec: str = ""

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("dependency name must not be empty")
        object.__setattr__(self, "name", normalize_name(self.name))

    @property
    def is_pinned(self) -> bool:
        return "==" in self.version_spec

    def to_requirement(self) -> str:
        return f"{self.name}{self.version_spec}"


@dataclass(frozen=True)
class ManagerDetection:
    kind: str
    evidence: str
    runtime_deps: tuple[DependencyDecl, ...] = ()
    dev_deps: tuple[DependencyDecl, ...] = ()
    has_dev_section: bool = False
    notes: tuple[str, ...] = ()

    @property
    def name(self) -> str:
        return MANAGER_NAMES[self.kind]


@dataclass
class RequirementsParse:
    decls: list[DependencyDecl] = field(default_factory=list)
    directives: list[str] = field(default_factory=list)


def parse_requirement(line: str) -> Optional[DependencyDecl]:
    """Parse a single PEP 508-ish requirement. Returns None when nothing parses."""
    line = line.split(";", 1)[0].strip()
    match = _NAME_RE.match(line)
    if not match:
        return None
    name, _extras, spec = match.groups()
    spec = spec.strip()
    if spec.startswith("("):
        spec = spec.strip("()")
    if not spec.startswith("@"):
        spec = re.sub(r"\s+", "", spec)
    return DependencyDecl(name, spec)


def split_requirements(text: str) -> RequirementsParse:
    result = RequirementsParse()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if " #" in line:
            line = line.split(" #", 1)[0].strip()
        if line.startswith(("-r", "-e", "-c", "--")):
            result.directives.append(line)
            continue
        decl = parse_requirement(line)
        if decl is not None:
            result.decls.append(decl)
    return result


def parse_requirements(text: str) -> list[DependencyDecl]:
    """Dependency declarations in a requirements file. Directives are dropped."""
    return split_requirements(text).decls


def format_requirements(decls: Iterable[DependencyDecl]) -> str:
    return "".join(d.to_requirement() + "\n" for d in decls)


def _table_deps(table: Any, skip: Iterable[str] = ()) -> list[DependencyDecl]:
    """Dependencies from a ``name = spec`` TOML table (Poetry, Pipfile)."""
    if not isinstance(table, dict):
        return []
    skipped = set(skip)
    decls = []
    for name, value in table.items():
        if name in skipped:
            continue
        if isinstance(value, dict):
            value = value.get("version", "")
        spec = value if isinstance(value, str) else ""
        decls.append(DependencyDecl(name, "" if spec == "*" else spec.replace(" ", "")))
    return decls


def _pep508_list(items: Any) -> list[DependencyDecl]:
    if not isinstance(items, list):
        return []
    decls = (parse_requirement(item) for item in items if isinstance(item, str))
    return [d for d in decls if d is not None]


def parse_setup_py(source: str) -> Optional[list[DependencyDecl]]:
    """Literal ``install_requires`` of a ``setup()`` call, read without executing code.

    Returns None when no literal list can be found.
    """
    try:
        tree = ast.parse(source)
    except SyntaxError:
        return None
    assignments: dict[str, ast.AST] = {}
    for node in ast.walk(tree):
        if isinstance(node, ast.Assign) and len(node.targets) == 1 and isinstance(node.targets[0], ast.Name):
            assignments[node.targets[0].id] = node.value
    for node in ast.walk(tree):
        if not isinstance(node, ast.Call):
            continue
        func = node.func
        fname = func.attr if isinstance(func, ast.Attribute) else getattr(func, "id", None)
        if fname != "setup":
            continue
        for kw in node.keywords:
            if kw.arg != "install_requires":
                continue
            value = kw.value
            if isinstance(value, ast.Name) and value.id in assignments:
                value = assignments[value.id]
            try:
                literal = ast.literal_eval(value)
            except ValueError:
                return None
            if isinstance(literal, (list, tuple)):
                return _pep508_list(list(literal))
            return None
        return []
    return None


def _read(ctx: ProjectContext, rel: str) -> str:
    return ctx.path(rel).read_text(encoding="utf-8")


def _detect_requirements(ctx: ProjectContext, files: tuple[str, ...]) -> ManagerDetection:
    runtime: list[DependencyDecl] = []
    dev: list[DependencyDecl] = []
    notes: list[str] = []
    dev_files = []
    for rel in files:
        stem = rel[: -len(".txt")]
        is_dev = bool(_DEV_FILE_RE.search(stem.replace("requirements", "", 1)))
        try:
            decls = parse_requirements(_read(ctx, rel))
        except (OSError, UnicodeDecodeError) as exc:
            notes.append(f"could not read `{rel}`: {exc}")
            continue
        if is_dev:
            dev_files.append(rel)
            dev += decls
        else:
            runtime += decls
    evidence = next((f for f in files if f not in dev_files), files[0])
    return ManagerDetection("requirements-txt", evidence, tuple(runtime), tuple(dev), bool(dev_files), tuple(notes))


def _detect_setup_py(ctx: ProjectContext) -> ManagerDetection:
    try:
        deps = parse_setup_py(_read(ctx, "setup.py"))
    except (OSError, UnicodeDecodeError) as exc:
        return ManagerDetection("setup-py", "setup.py", notes=(f"could not read `setup.py`: {exc}",))
    if deps is None:
        return ManagerDetection(
            "setup-py", "setup.py",
            notes=("`install_requires` in `setup.py` is not a literal list, so its dependencies were not read "
                   "(setup scripts are never executed).",),
        )
    return ManagerDetection("setup-py", "setup.py", tuple(deps))


def _load_toml(ctx: ProjectContext, rel: str) -> tuple[Optional[dict], Optional[str]]:
    try:
        return tomli.loads(_read(ctx, rel)), None
    except (OSError, UnicodeDecodeError, tomli.TOMLDecodeError) as exc:
        return None, f"could not parse `{rel}`: {exc}"


def _detect_pipenv(ctx: ProjectContext) -> ManagerDetection:
    data, error = _load_toml(ctx, "Pipfile")
    if data is None:
        return ManagerDetection("pipenv", "Pipfile", notes=(error or "",))
    return ManagerDetection(
        "pipenv", "Pipfile",
        tuple(_table_deps(data.get("packages"))),
        tuple(_table_deps(data.get("dev-packages"))),
        has_dev_section="dev-packages" in data,
    )


def _detect_pyproject(ctx: ProjectContext) -> Optional[ManagerDetection]:
    data, error = _load_toml(ctx, "pyproject.toml")
    if data is None:
        # unparseable; report it only when it could be a manager
        text = ""
        try:
            text = _read(ctx, "pyproject.toml")
        except (OSError, UnicodeDecodeError):
            pass
        if "[tool.poetry" in text:
            return ManagerDetection("poetry", "pyproject.toml", notes=(error or "",))
        if re.search(r"^\[project\]", text, re.M):
            return ManagerDetection("pep621", "pyproject.toml", notes=(error or "",))
        return None

    tool = data.get("tool", {}) if isinstance(data.get("tool"), dict) else {}
    poetry = tool.get("poetry")
    project = data.get("project")
    if isinstance(poetry, dict):
        notes = ()
        if isinstance(project, dict):
            notes = ("`pyproject.toml` has both `[tool.poetry]` and `[project]` tables; treating it as Poetry.",)
        runtime = _table_deps(poetry.get("dependencies"), skip=("python",))
        dev: list[DependencyDecl] = []
        has_dev = False
        if "dev-dependencies" in poetry:
            has_dev = True
            dev += _table_deps(poetry["dev-dependencies"])
        groups = poetry.get("group", {})
        if isinstance(groups, dict):
            for group in groups.values():
                if isinstance(group, dict) and "dependencies" in group:
                    has_dev = True
                    dev += _table_deps(group["dependencies"])
        return ManagerDetection("poetry", "pyproject.toml", tuple(runtime), tuple(dev), has_dev, notes)
    if isinstance(project, dict):
        optional = project.get("optional-dependencies", {})
        optional = optional if isinstance(optional, dict) else {}
        dev_groups = [g for g in PEP621_DEV_GROUPS if g in optional]
        dev = [d for g in dev_groups for d in _pep508_list(optional[g])]
        return ManagerDetection(
            "pep621", "pyproject.toml",
            tuple(_pep508_list(project.get("dependencies", []))), tuple(dev), bool(dev_groups),
        )
    return None


def detect_managers(ctx: ProjectContext) -> list[ManagerDetection]:
    """One detection per dependency manager kind present, in a fixed order."""
    found: list[ManagerDetection] = []
    if "requirements" in ctx.manifest_files:
        found.append(_detect_requirements(ctx, ctx.manifest_files["requirements"]))
    if "setup.py" in ctx.manifest_files:
        found.append(_detect_setup_py(ctx))
    if "Pipfile" in ctx.manifest_files:
        found.append(_detect_pipenv(ctx))
    if "pyproject.toml" in ctx.manifest_files:
        detection = _detect_pyproject(ctx)
        if detection is not None:
            found.append(detection)
    return sorted(found, key=lambda d: MANAGER_ORDER.index(d.kind))


def _notes(detections: Iterable[ManagerDetection]) -> list[str]:
    return [f"- {note}" for d in detections for note in d.notes if note]


def rule_uses_manager(ctx: ProjectContext, config: Config | None = None) -> RuleResult:
    detections = detect_managers(ctx)
    if not detections:
        return RuleResult.evaluated(
            USE, 0,
            "No dependency manager found. Declare your dependencies with a proper dependency manager; "
            "we recommend Poetry (`poetry init`), which records runtime and development dependencies "
            "in `pyproject.toml` and pins them in `poetry.lock`.",
        )
    lockfiles = [f for f in LOCKFILES if f in ctx.manifest_files]
    names = ", ".join(d.name for d in detections)
    notes = _notes(detections)
    if lockfiles or any(d.runtime_deps or d.dev_deps for d in detections):
        details = f"Dependencies are managed with: {names}."
        if notes:
            details += "\n\n" + "\n".join(notes)
        return RuleResult.evaluated(USE, 100, details)
    lines = [f"Found {names}, but no dependencies are declared in it. "
             "List the libraries your project uses so that it can be installed reproducibly."]
    if notes:
        lines += ["", *notes]
    return RuleResult.evaluated(USE, 50, "\n".join(lines))


def rule_single_manager(ctx: ProjectContext, config: Config | None = None) -> RuleResult:
    detections = detect_managers(ctx)
    if not detections:
        return RuleResult.skipped(SINGLE, "no dependency manager detected")
    if len(detections) == 1:
        return RuleResult.evaluated(SINGLE, 100, f"Only {detections[0].name} is used.")
    lines = ["Your project uses multiple dependency managers:", ""]
    lines += [f"- {d.name} (`{d.evidence}`)" for d in detections]
    by_kind = {d.kind: d for d in detections}
    if "requirements-txt" in by_kind and "setup-py" in by_kind:
        pinned = {(d.name, d.version_spec) for d in by_kind["requirements-txt"].runtime_deps if d.is_pinned}
        shared = sorted(
            {(d.name, d.version_spec) for d in by_kind["setup-py"].runtime_deps if d.is_pinned} & pinned
        )
        if shared:
            lines += [
                "",
                "The following pinned dependencies are duplicated between `requirements.txt` and `setup.py`:",
                "",
                *[f"- `{name}{spec}`" for name, spec in shared],
            ]
    lines += ["", "Pick one dependency manager (we recommend Poetry) and migrate all dependencies to it."]
    return RuleResult.evaluated(SINGLE, 0, "\n".join(lines))


def rule_dev_runtime_separation(ctx: ProjectContext, config: Config | None = None) -> RuleResult:
    detections = detect_managers(ctx)
    if not detections:
        return RuleResult.skipped(DEV_SEPARATION, "no dependency manager detected")
    has_dev = any(d.has_dev_section for d in detections)
    runtime_names = {d.name for det in detections for d in det.runtime_deps}
    leaked = [tool for tool in DEV_ONLY_TOOLS if tool in runtime_names]
    leaked_text = ", ".join(f"`{t}`" for t in leaked)
    if has_dev and not leaked:
        return RuleResult.evaluated(DEV_SEPARATION, 100)
    if has_dev:
        return RuleResult.evaluated(
            DEV_SEPARATION, 50,
            f"Development tools are declared as runtime dependencies: {leaked_text}. "
            "Move them to your development dependencies.",
        )
    if leaked:
        return RuleResult.evaluated(
            DEV_SEPARATION, 0,
            f"Development tools are declared as runtime dependencies: {leaked_text}, and there are no "
            "development dependencies declared. Move them to a development group "
            "(`poetry add --group dev`, `[dev-packages]` in a Pipfile, or `requirements-dev.txt`).",
        )
    return RuleResult.evaluated(DEV_SEPARATION, 100, "No development tools found among the runtime dependencies.")


RULES = (
    Rule(USE, "Project properly keeps track of its dependencies", Category.DEPENDENCY_MANAGEMENT,
         "Declare every library your project uses in a dependency manager so the project can be installed "
         "reproducibly. We recommend Poetry: run `poetry init` and add dependencies with `poetry add`.",
         rule_uses_manager),
    Rule(SINGLE, "Project should only use one dependency manager", Category.DEPENDENCY_MANAGEMENT,
         "Using several dependency managers at once (for example `requirements.txt` next to `setup.py`) "
         "leads to duplicated, drifting dependency lists. Consolidate on one, preferably Poetry.",
         rule_single_manager),
    Rule(DEV_SEPARATION, "Project places its development dependencies in dev-dependencies",
         Category.DEPENDENCY_MANAGEMENT,
         "Tools only needed during development (pytest, black, isort, mypy, pylint, bandit, flake8, "
         "pre-commit) should not be installed with your project at run time. Declare them in a "
         "development group, `[dev-packages]`, or a `requirements-dev.txt` file.",
         rule_dev_runtime_separation),
)
