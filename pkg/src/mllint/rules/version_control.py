"""Version control rules: Git usage, large files in history, and DVC."""

from __future__ import annotations

from dataclasses import dataclass

from ..config import Config
from ..git import GitError, run_git
from ..model import Category, Rule, RuleResult
from ..scanner import ProjectContext

GIT = "version-control.code.git"
NO_BIG_FILES = "version-control.code.git-no-big-files"
DVC = "version-control.data.dvc"
DVC_IN_USE = "version-control.data.dvc-in-use"

CAT_FILE_FORMAT = "%(objecttype) %(objectname) %(objectsize) %(rest)"


@dataclass(frozen=True)
class HistoryBlob:
    object_id: str
    path: str
    size_bytes: int


def rule_uses_git(ctx: ProjectContext, config: Config | None = None) -> RuleResult:
    if ctx.has_git_dir:
        return RuleResult.evaluated(GIT, 100)
    return RuleResult.evaluated(
        GIT, 0,
        "Your project is not version controlled with Git. Run `git init` in the project root, "
        "then commit your code with `git add . && git commit -m \"Initial commit\"`.",
    )


def list_history_blobs(ctx: ProjectContext) -> list[HistoryBlob]:
    """Every blob reachable from any ref, deduplicated by object id.

    Raises GitUnavailable or GitCommandFailed.
    """
    listing = run_git(ctx.root, ["rev-list", "--objects", "--all"]).stdout
    if not listing.strip():
        return []
    checked = run_git(ctx.root, ["cat-file", f"--batch-check={CAT_FILE_FORMAT}"], input=listing).stdout

    blobs: dict[str, HistoryBlob] = {}
    for line in checked.splitlines():
        parts = line.split(" ", 3)
        if len(parts) < 3 or parts[0] != "blob":
            continue
        object_id, size = parts[1], int(parts[2])
        path = parts[3] if len(parts) == 4 else ""
        known = blobs.get(object_id)
        # keep the longest path seen for a blob, ties broken lexicographically
        if known is None or (len(path), known.path) > (len(known.path), path):
            blobs[object_id] = HistoryBlob(object_id, path, size)
    return sorted(blobs.values(), key=lambda b: (b.path, b.object_id))


def _format_size(size: int) -> str:
    for unit, factor in (("GiB", 1 << 30), ("MiB", 1 << 20), ("KiB", 1 << 10)):
        if size >= factor:
            return f"{size / factor:.1f} {unit}"
    return f"{size} B"


def rule_no_large_files(ctx: ProjectContext, threshold_bytes: int) -> RuleResult:
    if not ctx.has_git_dir:
        return RuleResult.skipped(NO_BIG_FILES, "no Git repository")
    if not ctx.git_available:
        return RuleResult.skipped(NO_BIG_FILES, "git executable not available")
    try:
        blobs = list_history_blobs(ctx)
    except GitError as exc:
        return RuleResult.skipped(NO_BIG_FILES, f"could not read Git history: {exc}")

    large = sorted((b for b in blobs if b.size_bytes > threshold_bytes), key=lambda b: (-b.size_bytes, b.path))
    if not large:
        return RuleResult.evaluated(NO_BIG_FILES, 100)
    lines = [
        f"Your project's Git history contains {len(large)} file(s) larger than "
        f"{_format_size(threshold_bytes)}:",
        "",
    ]
    lines += [f"- `{b.path or b.object_id}` ({_format_size(b.size_bytes)}, {b.size_bytes} bytes)" for b in large]
    lines += [
        "",
        "Large files bloat every clone of the repository. Remove them from history "
        "(for example with `git filter-repo`) and track data with DVC instead.",
    ]
    return RuleResult.evaluated(NO_BIG_FILES, 0, "\n".join(lines))


def _has_dvc(ctx: ProjectContext) -> bool:
    return ".dvc" in ctx.data_versioning_artifacts or "dvc.yaml" in ctx.data_versioning_artifacts


def rule_uses_dvc(ctx: ProjectContext, config: Config | None = None) -> RuleResult:
    if _has_dvc(ctx):
        return RuleResult.evaluated(DVC, 100)
    return RuleResult.evaluated(
        DVC, 0,
        "No Data Version Control setup found (no `.dvc/` directory or `dvc.yaml`). "
        "Run `dvc init` and track your datasets with `dvc add`; see https://dvc.org/doc/start. "
        "Data obtained at run time or through other systems cannot be recognised statically.",
    )


def rule_dvc_in_use(ctx: ProjectContext, config: Config | None = None) -> RuleResult:
    if not _has_dvc(ctx):
        return RuleResult.skipped(DVC_IN_USE, "no DVC setup")
    tracked = [p for p in ctx.data_versioning_artifacts if p.endswith(".dvc") and p.rsplit("/", 1)[-1] != ".dvc"]
    if tracked or any(p.rsplit("/", 1)[-1] == "dvc.lock" for p in ctx.data_versioning_artifacts):
        return RuleResult.evaluated(DVC_IN_USE, 100)
    return RuleResult.evaluated(
        DVC_IN_USE, 0,
        "DVC is initialised but is not tracking any data: no `*.dvc` files or `dvc.lock` found. "
        "Add your datasets with `dvc add <path>` and commit the resulting `.dvc` files.",
    )


RULES = (
    Rule(GIT, "Project uses Git", Category.VERSION_CONTROL,
         "Version controlling your code with Git makes every change traceable and reversible. "
         "Fix it by running `git init` in your project root and committing your code.",
         rule_uses_git),
    Rule(NO_BIG_FILES, "Project should not have any large files in its Git history", Category.VERSION_CONTROL,
         "Large files (datasets, model binaries, notebooks with outputs) committed to Git stay in the "
         "history forever and slow down every clone. Remove them from history with `git filter-repo` "
         "and track large data with DVC. The size threshold is `thresholds.large-file-bytes`.",
         lambda ctx, config: rule_no_large_files(ctx, config.thresholds.large_file_bytes)),
    Rule(DVC, "Project uses Data Version Control", Category.VERSION_CONTROL,
         "Data Version Control (DVC) versions datasets and models alongside your code. "
         "Run `dvc init` and configure a remote with `dvc remote add`.",
         rule_uses_dvc),
    Rule(DVC_IN_USE, "DVC is tracking data", Category.VERSION_CONTROL,
         "An initialised DVC repository should actually track something. Add data with "
         "`dvc add <path>` or define a pipeline in `dvc.yaml`, then commit the `.dvc` and `dvc.lock` files.",
         rule_dvc_in_use),
)
