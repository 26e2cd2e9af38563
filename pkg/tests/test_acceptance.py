"""Acceptance suite: one check per criterion, each reported as a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they happen;
they are also repeated in the terminal summary.
"""

import contextlib
import json
import os
import random
import shutil
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings

import projects
from conftest import LINTERS_INSTALLED, requires_git
from markdown_check import parse, table_cells, tables, visible_terminal_cells
from mllint.config import Config, CustomRuleSpec, RuleOverride
from mllint.engine import evaluated_scores, lint_project
from mllint.linters import TOOLS
from mllint.model import Category, RuleResult, Status
from mllint.render import render_markdown
from mllint.rules.dependencies import parse_requirements
from mllint.rules.testing import TestSummary, parse_cobertura, parse_junit, rule_coverage, rule_tests_pass
from mllint.scanner import scan
from mllint.terminal import render_terminal
from mllint.weights import POC_WEIGHTS, PRESETS, PRODUCTION_WEIGHTS, aggregate_category
from strategies import reports
from test_dependencies import REQUIREMENTS_10, REQUIREMENTS_10_TABLE

MIB = 1024 * 1024
RESULTS: list[str] = []
NO_LINT = {"code-quality.no-issues": RuleOverride(disabled=True)}


@contextlib.contextmanager
def criterion(label):
    try:
        yield
    except BaseException:
        line = f"FAIL  {label}"
        RESULTS.append(line)
        print(line)
        raise
    line = f"PASS  {label}"
    RESULTS.append(line)
    print(line)


def cli(*argv, env=None):
    return subprocess.run([sys.executable, "-m", "mllint", *argv], capture_output=True, text=True, env=env)


@pytest.fixture(scope="module")
def fixtures(tmp_path_factory):
    base = tmp_path_factory.mktemp("acceptance")
    return {
        "golden": projects.make_golden(base / "golden"),
        "bare": projects.make_bare(base / "bare"),
        "bigfile": projects.make_bigfile(base / "bigfile", 11 * MIB),
        "smallfile": projects.make_bigfile(base / "smallfile", 1 * MIB),
        "dualdep": projects.make_dualdep(base / "dualdep"),
    }


# 1. fixture corpus

@requires_git
@pytest.mark.parametrize("profile", ["poc", "production"])
def test_1a_golden_scores_100(fixtures, profile):
    with criterion(f"1a GOLDEN overall = 100.0 under {profile} (linters {'run' if LINTERS_INSTALLED else 'absent'})"):
        report = lint_project(fixtures["golden"], Config(profile=profile))
        assert report.overall_score == 100.0
        if LINTERS_INSTALLED:
            assert report.rule_result("code-quality.no-issues").status is Status.EVALUATED


@requires_git
def test_1a_golden_runtime(fixtures):
    with criterion("1a GOLDEN runtime < 5 s excluding linter subprocesses"):
        start = time.perf_counter()
        report = lint_project(fixtures["golden"], Config(rule_overrides=NO_LINT))
        elapsed = time.perf_counter() - start
        assert report.overall_score == 100.0
        assert elapsed < 5.0, f"{elapsed:.2f}s"


def test_1b_bare(fixtures):
    with criterion("1b BARE git, dependency use, CI use and has-tests all score 0"):
        scores = evaluated_scores(lint_project(fixtures["bare"], Config()))
        for slug in ("version-control.code.git", "dependency-management.use",
                     "continuous-integration.use", "testing.has-tests"):
            assert scores[slug] == 0, slug


@requires_git
def test_1c_bigfile(fixtures):
    with criterion("1c BIGFILE 11 MiB blob scores 0 and is named; 1 MiB blob scores 100"):
        big = lint_project(fixtures["bigfile"], Config()).rule_result("version-control.code.git-no-big-files")
        assert big.score == 0 and "data/blob.bin" in big.details
        small = lint_project(fixtures["smallfile"], Config()).rule_result("version-control.code.git-no-big-files")
        assert small.score == 100


def test_1d_dualdep(fixtures):
    with criterion("1d DUALDEP single manager scores 0 with a duplication note"):
        result = lint_project(fixtures["dualdep"], Config()).rule_result("dependency-management.single")
        assert result.score == 0
        assert "duplicated" in result.details and "numpy==1.21.0" in result.details


# 2. aggregation oracle

def oracle(pairs):
    num = sum(Fraction(s) * Fraction(w) for s, w in pairs)
    den = sum(Fraction(w) for _, w in pairs)
    return float(num / den)


class _Profile:
    def __init__(self, weights):
        self.weights = weights

    def weight(self, slug):
        return self.weights[slug]


def _aggregate(scores, weights):
    results = [RuleResult.evaluated(f"r.r{i}", s) for i, s in enumerate(scores)]
    return aggregate_category(results, _Profile({r.slug: w for r, w in zip(results, weights)}))


def test_2_aggregation_oracle():
    with criterion("2  1000 random vectors match the brute-force weighted mean within 1e-9"):
        rng = random.Random(20240607)
        for _ in range(1000):
            n = rng.randint(1, 12)
            scores = [rng.uniform(0, 100) for _ in range(n)]
            weights = [rng.uniform(0, 4) for _ in range(n)]
            if not any(w > 0 for w in weights):
                weights[0] = 1.0
            value = _aggregate(scores, weights)
            assert abs(value - oracle(list(zip(scores, weights)))) <= 1e-9
            contributing = [s for s, w in zip(scores, weights) if w > 0]
            assert min(contributing) - 1e-9 <= value <= max(contributing) + 1e-9
            i = rng.randrange(n)
            raised = list(scores)
            raised[i] = rng.uniform(scores[i], 100)
            assert _aggregate(raised, weights) >= value - 1e-9


# 3. preset ordering

def test_3_preset_ordering():
    with criterion("3  production >= poc for every rule, strict where required, no-issues < use-linters"):
        assert set(POC_WEIGHTS) == set(PRODUCTION_WEIGHTS)
        for slug in POC_WEIGHTS:
            assert PRODUCTION_WEIGHTS[slug] >= POC_WEIGHTS[slug], slug
        for slug in ("code-quality.use-linters", "version-control.data.dvc",
                     "continuous-integration.use", "testing.has-tests"):
            assert PRODUCTION_WEIGHTS[slug] > POC_WEIGHTS[slug], slug
        for preset in PRESETS.values():
            assert preset["code-quality.no-issues"] < preset["code-quality.use-linters"]


# 4. parser oracles

def test_4_parser_oracles(tmp_path):
    with criterion("4  junit 10/2/1 -> 7 passed, 70.0; cobertura 0.6 -> 75.0; 10-line requirements table"):
        xml = TestSummary(10, 2, 1, 0).to_junit()
        assert parse_junit(xml).passed == 7
        projects.write(tmp_path, {"junit.xml": xml, "coverage.xml": '<coverage line-rate="0.6"/>'})
        ctx = scan(tmp_path)
        assert rule_tests_pass(ctx, Config()).score == 70.0
        assert parse_cobertura('<coverage line-rate="0.6"/>').line_rate == 0.6
        assert rule_coverage(ctx, Config(), 0.8).score == 75.0
        assert len(REQUIREMENTS_10.splitlines()) == 10
        decls = parse_requirements(REQUIREMENTS_10)
        assert [(d.name, d.version_spec, d.is_pinned) for d in decls] == REQUIREMENTS_10_TABLE


# 5. determinism

@requires_git
def test_5_determinism(fixtures, tmp_path):
    with criterion("5  repeated json runs and --output files are byte-identical"):
        golden = str(fixtures["golden"])
        first, second = cli("run", golden, "--format", "json"), cli("run", golden, "--format", "json")
        assert first.returncode == second.returncode == 0
        assert first.stdout == second.stdout
        assert json.loads(first.stdout)["overall_score"] == 100.0
        a, b = tmp_path / "a.md", tmp_path / "b.md"
        assert cli("run", golden, "--output", str(a)).returncode == 0
        assert cli("run", golden, "--output", str(b)).returncode == 0
        assert a.read_bytes() == b.read_bytes()


# 6. report validity

@requires_git
def test_6_markdown_fixtures_parse(fixtures):
    with criterion("6  markdown of every fixture parses with GFM tables intact"):
        for name, root in fixtures.items():
            report = lint_project(root, Config(rule_overrides=NO_LINT))
            md = render_markdown(report)
            parsed = tables(parse(md))
            assert len(parsed) == len(report.categories), name
            assert visible_terminal_cells(render_terminal(md)) == table_cells(md), name


_ansi_runs = {"count": 0}


@settings(max_examples=100, deadline=None, derandomize=True)
@given(reports())
def _ansi_property(report):
    md = render_markdown(report)
    assert len(tables(parse(md))) == len(report.categories)
    assert visible_terminal_cells(render_terminal(md)) == table_cells(md)
    _ansi_runs["count"] += 1


def test_6_ansi_property():
    with criterion("6  stripping ANSI recovers every table cell on 100 random reports"):
        _ansi_property()
        assert _ansi_runs["count"] >= 100


# 7. no false alarms

def _path_without_git(directory: Path) -> str:
    directory.mkdir()
    for tool in (*TOOLS, "python3"):
        found = shutil.which(tool)
        if found:
            (directory / tool).symlink_to(found)
    return str(directory)


@requires_git
def test_7_no_false_alarm(fixtures, tmp_path):
    with criterion("7  without a git binary history rules are Skipped and no aggregate drops"):
        golden = fixtures["golden"]
        with_git = lint_project(golden, Config(rule_overrides={
            **NO_LINT, "version-control.code.git-no-big-files": RuleOverride(disabled=True)}))
        env = {**os.environ, "PATH": _path_without_git(tmp_path / "bin")}
        proc = cli("run", str(golden), "--format", "json", env=env)
        assert proc.returncode == 0, proc.stderr
        data = json.loads(proc.stdout)
        rules = {r["slug"]: r for c in data["categories"] for r in c["rules"]}
        assert rules["version-control.code.git-no-big-files"]["status"] == "skipped"
        assert rules["version-control.code.git"]["score"] == 100.0
        assert data["overall_score"] >= with_git.overall_score
        for cat in data["categories"]:
            reference = with_git.category(Category(cat["category"])).score
            if reference is not None:
                assert cat["score"] >= reference


# 8. custom rules

def test_8_custom_rule_protocol(fixtures, tmp_path):
    with criterion("8  custom rule at 72.5 lands in Custom; a failing one is Errored and changes nothing"):
        root = tmp_path / "custom"
        shutil.copytree(fixtures["bare"], root)
        projects.write(root, {
            "card.py": 'import json\nprint(json.dumps({"score": 72.5, "details": "- missing model card"}))\n',
            "fail.py": "import sys\nsys.stderr.write('broken')\nsys.exit(3)\n",
        })
        py = sys.executable
        ok = CustomRuleSpec("org.model-card", "Model card present", f"{py} card.py")
        bad = CustomRuleSpec("org.broken", "Broken check", f"{py} fail.py")

        report = lint_project(root, Config(custom_rules=(ok,)))
        custom = report.category(Category.CUSTOM)
        assert custom.rule_results[0].score == 72.5 and custom.score == 72.5
        assert "- missing model card" in render_markdown(report)

        baseline = lint_project(root, Config(custom_rules=(ok,)))
        with_bad = lint_project(root, Config(custom_rules=(ok, bad)))
        assert with_bad.rule_result("org.broken").status is Status.ERRORED
        assert "broken" in with_bad.rule_result("org.broken").reason
        assert evaluated_scores(with_bad) == evaluated_scores(baseline)
        assert with_bad.overall_score == baseline.overall_score


# 9. CLI gating

@requires_git
def test_9_cli_gating(fixtures):
    with criterion("9  BARE --fail-under 50 -> 1, GOLDEN --fail-under 90 -> 0, unknown flag -> 2"):
        assert cli("run", str(fixtures["bare"]), "--fail-under", "50").returncode == 1
        assert cli("run", str(fixtures["golden"]), "--fail-under", "90").returncode == 0
        assert cli("run", str(fixtures["bare"]), "--no-such-flag").returncode == 2
