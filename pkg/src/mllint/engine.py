"""Rule registry and orchestration of a full lint run."""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

from . import __version__
from .config import Config, load_config
from .custom import custom_rule, run_custom_rule
from .model import BUILTIN_CATEGORIES, Category, CategoryResult, Report, Rule, RuleResult, Status
from .rules import BUILTIN_RULES
from .scanner import ProjectContext, scan
from .weights import WeightProfile, aggregate_category, aggregate_overall, resolve_weights

log = logging.getLogger(__name__)

MAX_WORKERS = 8


def register_rules() -> tuple[Rule, ...]:
    """All built-in rules in registry order."""
    return BUILTIN_RULES


def all_rules(config: Config) -> tuple[Rule, ...]:
    return (*BUILTIN_RULES, *(custom_rule(spec) for spec in config.custom_rules))


def _evaluate(rule: Rule, ctx: ProjectContext, config: Config) -> RuleResult:
    try:
        if rule.check is None:
            raise TypeError("rule has no check function")
        result = rule.check(ctx, config)
    except Exception as exc:  # a broken rule must never abort the run
        log.debug("rule %s raised", rule.slug, exc_info=True)
        return RuleResult.errored(rule.slug, f"rule raised {type(exc).__name__}: {exc}")
    if result.slug != rule.slug:
        result = dataclasses.replace(result, slug=rule.slug)
    return result


def evaluate_rules(ctx: ProjectContext, config: Config, profile: WeightProfile) -> dict[str, RuleResult]:
    """Evaluate every enabled rule. Results are keyed by slug; order is restored by the caller."""
    results: dict[str, RuleResult] = {}
    pending = {}
    with ThreadPoolExecutor(max_workers=MAX_WORKERS) as pool:
        for rule in BUILTIN_RULES:
            if profile.weight(rule.slug) <= 0:
                results[rule.slug] = RuleResult.skipped(rule.slug, "disabled by configuration")
            else:
                pending[rule.slug] = pool.submit(_evaluate, rule, ctx, config)
        for spec in config.custom_rules:
            if profile.weight(spec.slug) <= 0:
                results[spec.slug] = RuleResult.skipped(spec.slug, "disabled by configuration")
            else:
                pending[spec.slug] = pool.submit(run_custom_rule, spec, ctx.root)
        for slug, future in pending.items():
            try:
                results[slug] = future.result()
            except Exception as exc:
                results[slug] = RuleResult.errored(slug, f"{type(exc).__name__}: {exc}")
    return results


def build_report(
    project: str, config: Config, profile: WeightProfile, results: dict[str, RuleResult]
) -> Report:
    rules = all_rules(config)
    by_category: dict[Category, list[RuleResult]] = {}
    for rule in rules:
        result = dataclasses.replace(results[rule.slug], name=rule.name, weight=profile.weight(rule.slug))
        by_category.setdefault(rule.category, []).append(result)

    order = list(BUILTIN_CATEGORIES) + ([Category.CUSTOM] if config.custom_rules else [])
    categories = []
    for category in order:
        members = tuple(by_category.get(category, ()))
        categories.append(CategoryResult(
            category=category,
            weight=profile.category_weight(category),
            score=aggregate_category(members, profile),
            rule_results=members,
        ))
    return Report(
        project=project,
        profile=config.profile,
        overall_score=aggregate_overall(categories, profile),
        categories=tuple(categories),
        tool_version=__version__,
        config_digest=config.digest(),
    )


def lint_project(root: str | Path, config: Optional[Config] = None) -> Report:
    """Scan ``root`` once, evaluate all enabled rules and aggregate their scores.

    The configuration is read from ``root/mllint.toml`` when not given.
    """
    root = Path(root)
    if not root.is_dir():
        raise NotADirectoryError(f"not a directory: {root}")
    if config is None:
        config = load_config(root)
    profile = resolve_weights(config, BUILTIN_RULES)
    ctx = scan(root)
    results = evaluate_rules(ctx, config, profile)
    return build_report(ctx.root.name, config, profile, results)


def evaluated_scores(report: Report) -> dict[str, float]:
    return {
        r.slug: r.score
        for cat in report.categories
        for r in cat.rule_results
        if r.status is Status.EVALUATED and r.score is not None
    }
