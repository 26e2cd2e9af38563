"""Code quality rules: linter adoption and linter cleanliness."""

from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from statistics import fmean

from .. import linters
from ..config import Config
from ..linters import TOOLS, LinterError, LinterMessage, ToolUnavailable
from ..model import Category, Rule, RuleResult
from ..scanner import ProjectContext
from .dependencies import detect_managers

USE_LINTERS = "code-quality.use-linters"
NO_ISSUES = "code-quality.no-issues"
MAX_LISTED_MESSAGES = 20

TOOL_ADVICE = {
    "pylint": "Pylint finds bugs and code smells; configure it in `.pylintrc` or `[tool.pylint]`.",
    "mypy": "Mypy type-checks your code; configure it in `mypy.ini` or `[tool.mypy]`.",
    "black": "Black formats your code consistently; configure it in `[tool.black]`.",
    "isort": "isort sorts your imports; configure it in `.isort.cfg` or `[tool.isort]`.",
    "bandit": "Bandit finds common security issues; configure it in `.bandit` or `[tool.bandit]`.",
}


def linter_evidence(ctx: ProjectContext) -> dict[str, str]:
    """Where each adopted tool's adoption was seen."""
    evidence = dict(ctx.linter_configs)
    dev_names = {d.name for det in detect_managers(ctx) for d in det.dev_deps}
    for tool in TOOLS:
        if tool not in evidence and tool in dev_names:
            evidence[tool] = "development dependencies"
    return {tool: evidence[tool] for tool in TOOLS if tool in evidence}


def detect_linter_adoption(ctx: ProjectContext) -> dict[str, bool]:
    evidence = linter_evidence(ctx)
    return {tool: tool in evidence for tool in TOOLS}


def rule_uses_linters(ctx: ProjectContext, config: Config | None = None) -> RuleResult:
    evidence = linter_evidence(ctx)
    score = 100.0 * len(evidence) / len(TOOLS)
    lines = []
    if evidence:
        lines.append("Adopted linters:")
        lines.append("")
        lines += [f"- {tool} (found in {where})" for tool, where in evidence.items()]
    missing = [tool for tool in TOOLS if tool not in evidence]
    if missing:
        if lines:
            lines.append("")
        lines.append("We recommend also adopting:")
        lines.append("")
        lines += [f"- {TOOL_ADVICE[tool]}" for tool in missing]
    return RuleResult.evaluated(USE_LINTERS, score, "\n".join(lines))


def _tool_score(count: int, n_files: int) -> float:
    return max(0.0, 100.0 * (1.0 - count / n_files))


def _run(tool: str, ctx: ProjectContext):
    try:
        return linters.run_linter(tool, ctx)
    except LinterError as exc:
        return exc


def rule_linters_clean(ctx: ProjectContext, config: Config | None = None) -> RuleResult:
    n_files = len(ctx.python_files)
    if n_files == 0:
        return RuleResult.skipped(NO_ISSUES, "no Python files found")
    adopted = [tool for tool, used in detect_linter_adoption(ctx).items() if used]
    if not adopted:
        return RuleResult.skipped(NO_ISSUES, "no linters adopted")

    with ThreadPoolExecutor(max_workers=len(adopted)) as pool:
        outcomes = dict(zip(adopted, pool.map(lambda t: _run(t, ctx), adopted)))

    scores: dict[str, float] = {}
    lines = []
    all_messages: list[LinterMessage] = []
    for tool in adopted:
        outcome = outcomes[tool]
        if isinstance(outcome, ToolUnavailable):
            lines.append(f"- {tool}: skipped, not installed")
        elif isinstance(outcome, LinterError):
            lines.append(f"- {tool}: skipped, {outcome}")
        else:
            scores[tool] = _tool_score(len(outcome), n_files)
            lines.append(f"- {tool}: {len(outcome)} message(s) over {n_files} file(s), score {scores[tool]:.1f}%")
            all_messages += outcome
    if not scores:
        return RuleResult.skipped(NO_ISSUES, "none of the adopted linters could be run", "\n".join(lines))

    details = ["Linter results:", "", *lines]
    if all_messages:
        listed = sorted(all_messages, key=lambda m: (m.tool, m.code or "", m.file, m.line or 0))[:MAX_LISTED_MESSAGES]
        groups: dict[tuple[str, str], list[LinterMessage]] = defaultdict(list)
        for msg in listed:
            groups[(msg.tool, msg.code or "-")].append(msg)
        details += ["", f"First {len(listed)} of {len(all_messages)} message(s), grouped by code:", ""]
        for (tool, code), msgs in groups.items():
            details.append(f"- {tool} `{code}`")
            for msg in msgs:
                where = f"{msg.file}:{msg.line}" if msg.line else msg.file
                text = msg.text.replace("\n", " ")
                details.append(f"    - `{where}` {text}")
    return RuleResult.evaluated(NO_ISSUES, fmean(scores.values()), "\n".join(details))


RULES = (
    Rule(USE_LINTERS, "Project uses code quality linters", Category.CODE_QUALITY,
         "Linters catch bugs, code smells, security issues and inconsistent style before they reach "
         "production. Adopt Pylint, Mypy, Black, isort and Bandit by adding their configuration to your "
         "project (for example `[tool.black]` in `pyproject.toml`) or listing them as development dependencies.",
         rule_uses_linters),
    Rule(NO_ISSUES, "Project has no linter warnings", Category.CODE_QUALITY,
         "Runs every adopted linter that is installed and scores each by its number of messages relative "
         "to the number of Python files. Fix the reported messages, or tune the linter configuration "
         "to disable checks that do not apply to your project.",
         rule_linters_clean),
)
