"""Core data types shared by the scanner, the rules and the renderers."""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Optional

if TYPE_CHECKING:
    from .config import Config
    from .scanner import ProjectContext

SLUG_PATTERN = re.compile(r"^[a-z0-9-]+(\.[a-z0-9-]+)*$")


class Category(str, enum.Enum):
    VERSION_CONTROL = "version-control"
    DEPENDENCY_MANAGEMENT = "dependency-management"
    CONTINUOUS_INTEGRATION = "continuous-integration"
    CODE_QUALITY = "code-quality"
    TESTING = "testing"
    CUSTOM = "custom"

    @property
    def title(self) -> str:
        return CATEGORY_TITLES[self]


CATEGORY_TITLES = {
    Category.VERSION_CONTROL: "Version Control",
    Category.DEPENDENCY_MANAGEMENT: "Dependency Management",
    Category.CONTINUOUS_INTEGRATION: "Continuous Integration",
    Category.CODE_QUALITY: "Code Quality",
    Category.TESTING: "Testing",
    Category.CUSTOM: "Custom",
}

BUILTIN_CATEGORIES = (
    Category.VERSION_CONTROL,
    Category.DEPENDENCY_MANAGEMENT,
    Category.CONTINUOUS_INTEGRATION,
    Category.CODE_QUALITY,
    Category.TESTING,
)


class Status(str, enum.Enum):
    EVALUATED = "evaluated"
    SKIPPED = "skipped"
    ERRORED = "errored"


RuleCheck = Callable[["ProjectContext", "Config"], "RuleResult"]


@dataclass(frozen=True)
class Rule:
    """A single named check. ``check`` produces the rule's result for a project."""

    slug: str
    name: str
    category: Category
    summary: str
    check: Optional[RuleCheck] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not SLUG_PATTERN.match(self.slug):
            raise ValueError(f"invalid rule slug: {self.slug!r}")


@dataclass(frozen=True)
class RuleResult:
    """Outcome of one rule.

    ``score`` is set only for evaluated results. ``reason`` explains a skip or an
    error. ``name`` and ``weight`` are filled in by the engine when the result
    is placed in a report.
    """

    slug: str
    status: Status
    score: Optional[float] = None
    details: str = ""
    reason: str = ""
    name: str = ""
    weight: float = 0.0

    def __post_init__(self) -> None:
        if self.status is Status.EVALUATED:
            if self.score is None or math.isnan(self.score):
                raise ValueError(f"{self.slug}: evaluated result needs a score")
            if not 0.0 <= self.score <= 100.0:
                raise ValueError(f"{self.slug}: score {self.score} outside [0, 100]")
        elif self.score is not None:
            raise ValueError(f"{self.slug}: only evaluated results carry a score")

    @classmethod
    def evaluated(cls, slug: str, score: float, details: str = "") -> RuleResult:
        return cls(slug, Status.EVALUATED, score=float(score), details=details)

    @classmethod
    def skipped(cls, slug: str, reason: str, details: str = "") -> RuleResult:
        return cls(slug, Status.SKIPPED, reason=reason, details=details)

    @classmethod
    def errored(cls, slug: str, reason: str, details: str = "") -> RuleResult:
        return cls(slug, Status.ERRORED, reason=reason, details=details)


@dataclass(frozen=True)
class CategoryResult:
    category: Category
    weight: float
    score: Optional[float]
    rule_results: tuple[RuleResult, ...]

    @property
    def title(self) -> str:
        return self.category.title


@dataclass(frozen=True)
class Report:
    """Scored outcome of a full run.

    ``project`` is the project directory's name, never an absolute path, so
    reports are reproducible across machines.
    """

    project: str
    profile: str
    overall_score: Optional[float]
    categories: tuple[CategoryResult, ...]
    tool_version: str
    config_digest: str

    def rule_result(self, slug: str) -> RuleResult:
        for cat in self.categories:
            for result in cat.rule_results:
                if result.slug == slug:
                    return result
        raise KeyError(slug)

    def category(self, category: Category | str) -> CategoryResult:
        category = Category(category)
        for cat in self.categories:
            if cat.category is category:
                return cat
        raise KeyError(category.value)
