"""User-defined rules that run an external program.

The program runs from the project root with ``MLLINT_PROJECT_ROOT`` set, and
must print a JSON object such as ``{"score": 72.5, "details": "..."}`` on stdout.
"""

from __future__ import annotations

import json
import math
import os
import shlex
import subprocess
from pathlib import Path

from .config import CustomRuleSpec
from .model import Category, Rule, RuleResult

CUSTOM_RULE_TIMEOUT = 60.0


def custom_rule(spec: CustomRuleSpec) -> Rule:
    return Rule(spec.slug, spec.name, Category.CUSTOM, f"Custom rule, runs `{spec.run}`.")


def _excerpt(text: str, limit: int = 300) -> str:
    text = " ".join(text.split())
    return text if len(text) <= limit else text[: limit - 1] + "…"


def run_custom_rule(spec: CustomRuleSpec, root: str | Path, timeout: float = CUSTOM_RULE_TIMEOUT) -> RuleResult:
    root = Path(root).resolve()
    try:
        argv = shlex.split(spec.run)
    except ValueError as exc:
        return RuleResult.errored(spec.slug, f"cannot parse command: {exc}")
    if not argv:
        return RuleResult.errored(spec.slug, "empty command")
    env = {**os.environ, "MLLINT_PROJECT_ROOT": str(root)}
    try:
        proc = subprocess.run(
            argv, cwd=root, env=env, stdin=subprocess.DEVNULL, capture_output=True,
            text=True, errors="replace", timeout=timeout, check=False,
        )
    except subprocess.TimeoutExpired:
        return RuleResult.errored(spec.slug, f"timed out after {timeout:g}s")
    except OSError as exc:
        return RuleResult.errored(spec.slug, f"could not start `{argv[0]}`: {exc.strerror or exc}")

    if proc.returncode != 0:
        reason = f"exited with code {proc.returncode}"
        if proc.stderr.strip():
            reason += f": {_excerpt(proc.stderr)}"
        return RuleResult.errored(spec.slug, reason)
    try:
        output = json.loads(proc.stdout)
    except json.JSONDecodeError:
        return RuleResult.errored(spec.slug, "invalid custom-rule output")
    if not isinstance(output, dict):
        return RuleResult.errored(spec.slug, "invalid custom-rule output")
    score = output.get("score")
    details = output.get("details", "")
    if isinstance(score, bool) or not isinstance(score, (int, float)) or not isinstance(details, str):
        return RuleResult.errored(spec.slug, "invalid custom-rule output")
    if not math.isfinite(score) or not 0 <= score <= 100:
        return RuleResult.errored(spec.slug, "score out of range")
    return RuleResult.evaluated(spec.slug, float(score), details)
