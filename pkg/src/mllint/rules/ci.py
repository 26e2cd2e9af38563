"""Continuous integration rule."""

from __future__ import annotations

import yaml

from ..config import Config
from ..model import Category, Rule, RuleResult
from ..scanner import ProjectContext

USE = "continuous-integration.use"

SETUP_POINTERS = """\
- GitHub Actions: add a workflow under `.github/workflows/`, see https://docs.github.com/en/actions/quickstart
- GitLab CI: add a `.gitlab-ci.yml`, see https://docs.gitlab.com/ee/ci/quick_start/
- Azure Pipelines: add an `azure-pipelines.yml`, see https://learn.microsoft.com/azure/devops/pipelines/
- Jenkins: add a `Jenkinsfile`, see https://www.jenkins.io/doc/book/pipeline/jenkinsfile/"""


def _workflow_has_jobs(text: str) -> bool:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError:
        return False
    if not isinstance(data, dict):
        return False
    jobs = data.get("jobs")
    return isinstance(jobs, dict) and len(jobs) > 0


def rule_has_ci(ctx: ProjectContext, config: Config | None = None) -> RuleResult:
    found: list[str] = []
    warnings: list[str] = []
    for provider, rel in ctx.ci_configs:
        if provider != "github-actions":
            found.append(f"{provider} (`{rel}`)")
            continue
        try:
            text = ctx.path(rel).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            warnings.append(f"- Could not read `{rel}`: {exc}")
            continue
        if _workflow_has_jobs(text):
            found.append(f"{provider} (`{rel}`)")
        else:
            warnings.append(f"- `{rel}` does not define any `jobs`, so it was not counted.")

    if found:
        details = "CI configuration found: " + ", ".join(found) + "."
        if warnings:
            details += "\n\n" + "\n".join(warnings)
        return RuleResult.evaluated(USE, 100, details)
    lines = ["No CI configuration found. Set up Continuous Integration with your Git host's CI provider:", "",
             SETUP_POINTERS]
    if warnings:
        lines += ["", *warnings]
    return RuleResult.evaluated(USE, 0, "\n".join(lines))


RULES = (
    Rule(USE, "Project uses Continuous Integration (CI)", Category.CONTINUOUS_INTEGRATION,
         "Continuous Integration runs your tests and linters on every push, so problems surface early. "
         "Add a CI configuration for your Git host, e.g. a GitHub Actions workflow in "
         "`.github/workflows/` or a `.gitlab-ci.yml`.",
         rule_has_ci),
)
