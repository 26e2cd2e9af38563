"""Maturity-dependent weight presets and weighted-mean aggregation.

Preset weights encode practitioner importance ratings on a five-point scale:
not important = 0, slightly = 1, moderately = 2, very = 3, absolutely essential = 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import fmean
from typing import Iterable, Optional, Sequence

from .config import Config
from .model import Category, CategoryResult, Rule, RuleResult, Status

# slug -> (proof-of-concept weight, production weight)
PRESET_TABLE: dict[str, tuple[float, float]] = {
    "version-control.code.git": (3, 4),
    "version-control.code.git-no-big-files": (3, 4),
    "version-control.data.dvc": (1, 3),
    "version-control.data.dvc-in-use": (1, 3),
    "dependency-management.use": (3, 4),
    "dependency-management.single": (2, 3),
    "dependency-management.dev-separation": (2, 2),
    "continuous-integration.use": (2, 3),
    "code-quality.use-linters": (2, 3),
    "code-quality.no-issues": (1, 2),
    "testing.has-tests": (2, 3),
    "testing.pass": (2, 3),
    "testing.coverage": (2, 3),
}

POC_WEIGHTS = {slug: float(pair[0]) for slug, pair in PRESET_TABLE.items()}
PRODUCTION_WEIGHTS = {slug: float(pair[1]) for slug, pair in PRESET_TABLE.items()}
PRESETS = {"poc": POC_WEIGHTS, "production": PRODUCTION_WEIGHTS}


@dataclass(frozen=True)
class WeightProfile:
    name: str
    weights: dict[str, float] = field(default_factory=dict)
    category_weights: dict[Category, float] = field(default_factory=dict)

    def weight(self, slug: str) -> float:
        return self.weights.get(slug, 0.0)

    def category_weight(self, category: Category) -> float:
        return self.category_weights.get(category, 0.0)


def resolve_weights(config: Config, registry: Sequence[Rule]) -> WeightProfile:
    """Start from the preset named in ``config`` and apply the rule overrides.

    Custom rules take their weight from their spec. A category's weight is the
    mean of its member rules' effective weights.
    """
    preset = PRESETS[config.profile]
    weights: dict[str, float] = {}
    members: dict[Category, list[float]] = {}
    for rule in registry:
        weights[rule.slug] = preset.get(rule.slug, 1.0)
    for spec in config.custom_rules:
        weights[spec.slug] = spec.weight

    overridden = False
    for slug, override in config.rule_overrides.items():
        if slug not in weights:
            continue
        if override.weight is not None:
            weights[slug] = override.weight
            overridden = True
        if override.disabled:
            weights[slug] = 0.0
            overridden = True

    for rule in registry:
        members.setdefault(rule.category, []).append(weights[rule.slug])
    if config.custom_rules:
        members[Category.CUSTOM] = [weights[spec.slug] for spec in config.custom_rules]
    category_weights = {cat: fmean(ws) for cat, ws in members.items()}

    name = "custom" if overridden else config.profile
    return WeightProfile(name, weights, category_weights)


def weighted_mean(pairs: Iterable[tuple[float, float]]) -> Optional[float]:
    """Weighted mean of ``(value, weight)`` pairs, ignoring zero weights.

    Returns None when no pair carries positive weight. The result is clamped to
    the range of contributing values to absorb floating-point rounding.
    """
    total = 0.0
    weight_sum = 0.0
    lo, hi = float("inf"), float("-inf")
    for value, weight in pairs:
        if weight <= 0:
            continue
        total += weight * value
        weight_sum += weight
        lo, hi = min(lo, value), max(hi, value)
    if weight_sum == 0:
        return None
    return min(hi, max(lo, total / weight_sum))


def aggregate_category(results: Iterable[RuleResult], profile: WeightProfile) -> Optional[float]:
    return weighted_mean(
        (r.score, profile.weight(r.slug))
        for r in results
        if r.status is Status.EVALUATED and r.score is not None
    )


def aggregate_overall(categories: Iterable[CategoryResult], profile: WeightProfile) -> Optional[float]:
    return weighted_mean(
        (c.score, profile.category_weight(c.category)) for c in categories if c.score is not None
    )
