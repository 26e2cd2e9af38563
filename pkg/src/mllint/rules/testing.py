"""Testing rules: test-file ratio, passing tests and coverage.

Tests are never run; the pass and coverage rules read reports from a prior run.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Optional

from ..config import Config
from ..model import Category, Rule, RuleResult
from ..scanner import ProjectContext

HAS_TESTS = "testing.has-tests"
PASS = "testing.pass"
COVERAGE = "testing.coverage"

DEFAULT_JUNIT_PATHS = ("junit.xml", "reports/junit.xml", "test-results.xml")
DEFAULT_COVERAGE_PATHS = ("coverage.xml", "reports/coverage.xml")


class ReportParseError(ValueError):
    pass


@dataclass(frozen=True)
class TestSummary:
    total: int
    failures: int = 0
    errors: int = 0
    skipped: int = 0

    __test__ = False  # not a pytest test class

    def __post_init__(self) -> None:
        if min(self.total, self.failures, self.errors, self.skipped) < 0:
            raise ValueError("test counts must be non-negative")
        if self.failures + self.errors + self.skipped > self.total:
            raise ValueError("failures + errors + skipped exceeds total")

    @property
    def passed(self) -> int:
        return self.total - self.failures - self.errors - self.skipped

    def to_junit(self) -> str:
        return (f'<testsuite tests="{self.total}" failures="{self.failures}" '
                f'errors="{self.errors}" skipped="{self.skipped}"/>')


@dataclass(frozen=True)
class CoverageSummary:
    line_rate: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.line_rate <= 1.0:
            raise ValueError(f"line rate {self.line_rate} outside [0, 1]")


def _parse_xml(text: str) -> ET.Element:
    if not text.strip():
        raise ReportParseError("report is empty")
    try:
        return ET.fromstring(text)
    except ET.ParseError as exc:
        raise ReportParseError(f"malformed XML: {exc}") from exc


def _count(element: ET.Element, attr: str) -> int:
    raw = element.get(attr)
    if raw is None or raw == "":
        return 0
    try:
        value = float(raw)
    except ValueError as exc:
        raise ReportParseError(f"attribute {attr}={raw!r} is not a number") from exc
    if value < 0 or value != int(value):
        raise ReportParseError(f"attribute {attr}={raw!r} is not a non-negative integer")
    return int(value)


def parse_junit(xml_text: str) -> TestSummary:
    root = _parse_xml(xml_text)
    suites = [root] if root.tag == "testsuite" else list(root.iter("testsuite"))
    if not suites:
        raise ReportParseError("no <testsuite> element found")
    totals = [0, 0, 0, 0]
    for suite in suites:
        for i, attr in enumerate(("tests", "failures", "errors", "skipped")):
            totals[i] += _count(suite, attr)
    try:
        return TestSummary(*totals)
    except ValueError as exc:
        raise ReportParseError(str(exc)) from exc


def parse_cobertura(xml_text: str) -> CoverageSummary:
    root = _parse_xml(xml_text)
    if root.tag != "coverage":
        raise ReportParseError(f"expected a <coverage> root element, got <{root.tag}>")
    try:
        if root.get("line-rate") is not None:
            rate = float(root.get("line-rate", ""))
        elif root.get("lines-covered") is not None and root.get("lines-valid") is not None:
            covered, valid = float(root.get("lines-covered", "")), float(root.get("lines-valid", ""))
            if valid <= 0:
                raise ReportParseError("lines-valid must be positive")
            rate = covered / valid
        else:
            raise ReportParseError("no line-rate or lines-covered/lines-valid attributes")
        return CoverageSummary(rate)
    except ValueError as exc:
        if isinstance(exc, ReportParseError):
            raise
        raise ReportParseError(str(exc)) from exc


def rule_has_tests(ctx: ProjectContext, ratio_target: float) -> RuleResult:
    n_source = len(ctx.source_files)
    n_tests = len(ctx.test_files)
    if n_source == 0:
        return RuleResult.skipped(HAS_TESTS, "no non-test Python files found")
    ratio = n_tests / n_source
    score = min(100.0, 100.0 * ratio / ratio_target)
    details = (f"Found {n_tests} test file(s) for {n_source} other Python file(s), a ratio of {ratio:.2f} "
               f"(target {ratio_target:g}).")
    if score < 100:
        details += (" Write tests with pytest in files named `test_*.py`, ideally in a `tests/` directory, "
                    "until the ratio reaches the target.")
    return RuleResult.evaluated(HAS_TESTS, score, details)


def _locate(ctx: ProjectContext, configured: Optional[str], defaults: tuple[str, ...]):
    """Returns (relative path or None, configured flag)."""
    if configured:
        return configured, True
    return next((p for p in defaults if ctx.path(p).is_file()), None), False


def _read_report(ctx: ProjectContext, rel: str) -> str:
    return ctx.path(rel).read_text(encoding="utf-8")


def rule_tests_pass(ctx: ProjectContext, config: Config) -> RuleResult:
    rel, configured = _locate(ctx, config.test_report_path, DEFAULT_JUNIT_PATHS)
    if rel is None:
        return RuleResult.skipped(PASS, "no test report found")
    if configured and not ctx.path(rel).is_file():
        return RuleResult.errored(PASS, f"report not found at configured path `{rel}`")
    try:
        summary = parse_junit(_read_report(ctx, rel))
    except (OSError, UnicodeDecodeError, ReportParseError) as exc:
        return RuleResult.errored(PASS, f"could not read test report `{rel}`: {exc}")
    if summary.total == 0:
        return RuleResult.evaluated(PASS, 0, f"Test report `{rel}` contains no tests.")
    score = 100.0 * summary.passed / summary.total
    return RuleResult.evaluated(
        PASS, score,
        f"{summary.passed} of {summary.total} test(s) passed ({summary.failures} failed, "
        f"{summary.errors} errored, {summary.skipped} skipped) according to `{rel}`.",
    )


def rule_coverage(ctx: ProjectContext, config: Config, coverage_target: float) -> RuleResult:
    rel, configured = _locate(ctx, config.coverage_report_path, DEFAULT_COVERAGE_PATHS)
    if rel is None:
        return RuleResult.skipped(COVERAGE, "no coverage report found")
    if configured and not ctx.path(rel).is_file():
        return RuleResult.errored(COVERAGE, f"report not found at configured path `{rel}`")
    try:
        summary = parse_cobertura(_read_report(ctx, rel))
    except (OSError, UnicodeDecodeError, ReportParseError) as exc:
        return RuleResult.errored(COVERAGE, f"could not read coverage report `{rel}`: {exc}")
    score = min(100.0, 100.0 * summary.line_rate / coverage_target)
    return RuleResult.evaluated(
        COVERAGE, score,
        f"Line coverage is {100 * summary.line_rate:.1f}% (target {100 * coverage_target:.1f}%) "
        f"according to `{rel}`.",
    )


RULES = (
    Rule(HAS_TESTS, "Project has automated tests", Category.TESTING,
         "Automated tests keep your code working as it evolves. Write tests with pytest in files named "
         "`test_*.py` under `tests/`. The rule aims for `thresholds.test-ratio-target` test files per "
         "other Python file.",
         lambda ctx, config: rule_has_tests(ctx, config.thresholds.test_ratio_target)),
    Rule(PASS, "Project passes all of its automated tests", Category.TESTING,
         "Reads a JUnit XML report from a prior test run, e.g. `pytest --junitxml=reports/junit.xml`. "
         "Configure its location with `testing.report` in `mllint.toml`.",
         rule_tests_pass),
    Rule(COVERAGE, "Project provides a test coverage report", Category.TESTING,
         "Reads a Cobertura XML coverage report from a prior test run, e.g. "
         "`pytest --cov --cov-report=xml:reports/coverage.xml`. Configure its location with "
         "`testing.coverage-report` and the target with `thresholds.coverage-target`.",
         lambda ctx, config: rule_coverage(ctx, config, config.thresholds.coverage_target)),
)
