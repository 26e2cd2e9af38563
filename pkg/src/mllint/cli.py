"""Command-line interface.

Exit codes: 0 success, 1 score below ``--fail-under``, 2 usage or configuration
error, 3 fatal I/O or internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import __version__
from .config import PROFILES, Config, ConfigError, load_config
from .engine import all_rules, lint_project, register_rules
from .render import format_weight, render_json, render_markdown
from .terminal import render_terminal
from .weights import PRESET_TABLE, resolve_weights

EXIT_OK = 0
EXIT_FAIL_UNDER = 1
EXIT_USAGE = 2
EXIT_FATAL = 3

SUBCOMMANDS = ("run", "list", "describe", "version")


class UsageError(Exception):
    pass


def _score_arg(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid score {text!r}") from None
    if not 0 <= value <= 100:
        raise argparse.ArgumentTypeError("score must be between 0 and 100")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mllint", description="Detect project smells in Python ML projects and score them."
    )
    sub = parser.add_subparsers(dest="command", metavar="{run,list,describe,version}")

    run = sub.add_parser("run", help="lint a project (the default command)")
    run.add_argument("path", nargs="?", default=".", help="project directory (default: .)")
    run.add_argument("-o", "--output", metavar="FILE",
                     help="write the report to FILE, or raw to stdout with '-'")
    run.add_argument("-f", "--format", choices=("markdown", "json"), default="markdown")
    run.add_argument("-p", "--profile", choices=PROFILES, help="override the configured profile")
    run.add_argument("--fail-under", type=_score_arg, metavar="SCORE",
                     help="exit with code 1 when the overall score is below SCORE")
    run.add_argument("-q", "--quiet", action="store_true", help="leave out per-rule details")

    ls = sub.add_parser("list", help="list rules with their effective weights")
    ls.add_argument("mode", choices=("all", "enabled"))
    ls.add_argument("path", nargs="?", default=".", help="project directory whose config to use")
    ls.add_argument("-p", "--profile", choices=PROFILES)

    describe = sub.add_parser("describe", help="explain a rule and how to fix it")
    describe.add_argument("slug")
    describe.add_argument("path", nargs="?", default=".", help="project directory whose config to use")

    sub.add_parser("version", help="print the version")
    return parser


def _load(path: str, profile: Optional[str] = None) -> Config:
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"not a directory: {path}")
    config = load_config(root)
    return config.with_profile(profile) if profile else config


def list_rules(mode: str, config: Config) -> str:
    profile = resolve_weights(config, register_rules())
    rows = [(r.slug, r.name, r.category.value, format_weight(profile.weight(r.slug))) for r in all_rules(config)]
    if mode == "enabled":
        rows = [row for row, rule in zip(rows, all_rules(config)) if profile.weight(rule.slug) > 0]
    header = ("SLUG", "NAME", "CATEGORY", "WEIGHT")
    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(4)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in [header, *rows]]
    return "\n".join(lines) + "\n"


def describe_rule(slug: str, config: Optional[Config] = None) -> str:
    config = config or Config()
    for rule in all_rules(config):
        if rule.slug != slug:
            continue
        if slug in PRESET_TABLE:
            poc, production = PRESET_TABLE[slug]
            weights = f"Default weight: {format_weight(poc)} (poc), {format_weight(production)} (production)"
        else:
            spec = next(s for s in config.custom_rules if s.slug == slug)
            weights = f"Weight: {format_weight(spec.weight)} (custom rule)"
        return (f"# {rule.name}\n\nSlug: `{rule.slug}`\nCategory: {rule.category.title}\n{weights}\n\n"
                f"{rule.summary}\n")
    raise UsageError(f"unknown rule slug: {slug}")


def _emit(text: str, stream: TextIO) -> None:
    stream.write(text)
    stream.flush()


def _cmd_run(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    config = _load(args.path, args.profile)
    report = lint_project(args.path, config)
    if args.format == "json":
        text = render_json(report)
    else:
        text = render_markdown(report, details=not args.quiet)

    if args.output and args.output != "-":
        Path(args.output).write_text(text, encoding="utf-8")
        stderr.write(f"Report written to {args.output}\n")
    elif args.output == "-" or args.format == "json" or not stdout.isatty():
        _emit(text, stdout)
    else:
        _emit(render_terminal(text, color="NO_COLOR" not in os.environ), stdout)

    if args.fail_under is not None:
        score = report.overall_score if report.overall_score is not None else 0.0
        if score < args.fail_under:
            stderr.write(f"Overall score {score:.1f}% is below the required {args.fail_under:g}%\n")
            return EXIT_FAIL_UNDER
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in (*SUBCOMMANDS, "-h", "--help"):
        argv.insert(0, "run")

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    try:
        if args.command == "version":
            _emit(f"mllint {__version__}\n", stdout)
            return EXIT_OK
        if args.command == "list":
            _emit(list_rules(args.mode, _load(args.path, args.profile)), stdout)
            return EXIT_OK
        if args.command == "describe":
            config = _load(args.path) if Path(args.path).is_dir() else Config()
            _emit(describe_rule(args.slug, config), stdout)
            return EXIT_OK
        return _cmd_run(args, stdout, stderr)
    except (UsageError, ConfigError) as exc:
        stderr.write(f"mllint: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        stderr.write(f"mllint: fatal: {exc}\n")
        return EXIT_FATAL
    except Exception as exc:  # anything else is a bug, reported as exit code 3
        stderr.write(f"mllint: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_FATAL
