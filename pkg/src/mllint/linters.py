"""Running Pylint, Mypy, Black, isort and Bandit and parsing their output."""

from __future__ import annotations

import json
import os
import re
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from .scanner import ProjectContext

TOOLS = ("pylint", "mypy", "black", "isort", "bandit")
LINTER_TIMEOUT = 120.0
SEVERITIES = ("info", "warning", "error")


class LinterError(Exception):
    pass


class ToolUnavailable(LinterError):
    pass


class ToolTimeout(LinterError):
    pass


class ToolFailed(LinterError):
    """The tool exited with a code that does not just mean "issues found"."""


class ToolOutputError(LinterError):
    def __init__(self, tool: str, message: str, raw: str):
        self.tool = tool
        self.sample = raw[:500]
        super().__init__(f"{tool}: {message}; output starts with: {self.sample!r}")


@dataclass(frozen=True)
class LinterMessage:
    tool: str
    file: str
    line: Optional[int]
    code: Optional[str]
    severity: str
    text: str

    def __post_init__(self) -> None:
        if self.severity not in SEVERITIES:
            raise ValueError(f"unknown severity {self.severity!r}")


_PYLINT_SEVERITY = {
    "convention": "info", "refactor": "info", "info": "info",
    "warning": "warning", "error": "error", "fatal": "error",
}
_BANDIT_SEVERITY = {"LOW": "info", "MEDIUM": "warning", "HIGH": "error"}
_MYPY_LINE = re.compile(
    r"^(?P<file>.+?):(?:(?P<line>\d+):(?:\d+:)?)? (?P<severity>error|warning|note): (?P<text>.*?)"
    r"(?:  \[(?P<code>[a-z0-9-]+)\])?$"
)
_BLACK_LINE = re.compile(r"^would reformat (?P<file>.+)$")
_ISORT_LINE = re.compile(r"^ERROR: (?P<file>.+?) Imports are incorrectly sorted")


def _load_json(tool: str, text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ToolOutputError(tool, f"invalid JSON ({exc})", text) from exc


def parse_pylint_json(text: str) -> list[LinterMessage]:
    if not text.strip():
        return []
    records = _load_json("pylint", text)
    if not isinstance(records, list):
        raise ToolOutputError("pylint", "expected a JSON array", text)
    messages = []
    for rec in records:
        if not isinstance(rec, dict):
            raise ToolOutputError("pylint", "expected JSON objects", text)
        messages.append(LinterMessage(
            tool="pylint",
            file=str(rec.get("path", "")),
            line=rec.get("line") or None,
            code=rec.get("message-id"),
            severity=_PYLINT_SEVERITY.get(rec.get("type", ""), "warning"),
            text=str(rec.get("message") or rec.get("symbol") or "pylint message"),
        ))
    return messages


def parse_mypy_lines(text: str) -> list[LinterMessage]:
    """Parse mypy's default line format. Notes attached to errors are not counted."""
    messages = []
    for line in text.splitlines():
        if not line.strip():
            continue
        match = _MYPY_LINE.match(line)
        if match is None:
            raise ToolOutputError("mypy", f"unrecognised line {line!r}", text)
        if match["severity"] == "note":
            continue
        messages.append(LinterMessage(
            tool="mypy",
            file=match["file"],
            line=int(match["line"]) if match["line"] else None,
            code=match["code"],
            severity=match["severity"],
            text=match["text"] or "mypy message",
        ))
    return messages


def parse_bandit_json(text: str) -> list[LinterMessage]:
    if not text.strip():
        return []
    data = _load_json("bandit", text)
    if not isinstance(data, dict) or not isinstance(data.get("results", []), list):
        raise ToolOutputError("bandit", "expected an object with a 'results' array", text)
    return [
        LinterMessage(
            tool="bandit",
            file=str(rec.get("filename", "")),
            line=rec.get("line_number") or None,
            code=rec.get("test_id"),
            severity=_BANDIT_SEVERITY.get(rec.get("issue_severity", ""), "warning"),
            text=str(rec.get("issue_text") or "bandit issue"),
        )
        for rec in data.get("results", [])
    ]


def parse_black_output(text: str) -> list[LinterMessage]:
    messages = []
    for line in text.splitlines():
        match = _BLACK_LINE.match(line.strip())
        if match:
            messages.append(LinterMessage("black", match["file"], None, None, "warning", "would reformat"))
    return messages


def parse_isort_output(text: str) -> list[LinterMessage]:
    messages = []
    for line in text.splitlines():
        match = _ISORT_LINE.match(line.strip())
        if match:
            messages.append(LinterMessage(
                "isort", match["file"], None, None, "warning", "Imports are incorrectly sorted and/or formatted"
            ))
    return messages


@dataclass(frozen=True)
class _Invocation:
    args: Callable[[ProjectContext], list[str]]
    parse: Callable[[str], list[LinterMessage]]
    ok_codes: Callable[[int], bool]
    stream: str = "stdout"


_INVOCATIONS = {
    "pylint": _Invocation(
        lambda ctx: ["--output-format=json", *ctx.python_files], parse_pylint_json,
        lambda rc: not rc & 32,
    ),
    "mypy": _Invocation(
        lambda ctx: ["--no-error-summary", *ctx.python_files], parse_mypy_lines, lambda rc: rc in (0, 1),
    ),
    "black": _Invocation(
        lambda ctx: ["--check", str(ctx.root)], parse_black_output, lambda rc: rc in (0, 1), stream="both",
    ),
    "isort": _Invocation(
        lambda ctx: ["--check-only", str(ctx.root)], parse_isort_output, lambda rc: rc in (0, 1), stream="both",
    ),
    "bandit": _Invocation(
        lambda ctx: ["-f", "json", "-r", str(ctx.root)], parse_bandit_json, lambda rc: rc in (0, 1),
    ),
}


def tool_available(tool: str) -> bool:
    return shutil.which(tool) is not None


def _relative(path: str, root: Path) -> str:
    p = Path(path)
    if p.is_absolute():
        try:
            p = p.resolve().relative_to(root)
        except ValueError:
            return path
    return p.as_posix().removeprefix("./")


def run_linter(tool: str, ctx: ProjectContext, timeout: float = LINTER_TIMEOUT) -> list[LinterMessage]:
    """Run one linter over the project and return its messages.

    Only messages about the project's own Python files are returned. Raises
    ToolUnavailable, ToolTimeout, ToolFailed or ToolOutputError.
    """
    invocation = _INVOCATIONS[tool]
    exe = shutil.which(tool)
    if exe is None:
        raise ToolUnavailable(f"{tool} is not installed")
    if not ctx.python_files:
        return []
    with tempfile.TemporaryDirectory(prefix="mllint-") as cache_dir:
        env = {**os.environ, "MYPY_CACHE_DIR": cache_dir, "PYTHONDONTWRITEBYTECODE": "1"}
        try:
            proc = subprocess.run(
                [exe, *invocation.args(ctx)], cwd=ctx.root, env=env, capture_output=True,
                text=True, errors="replace", timeout=timeout, check=False,
            )
        except subprocess.TimeoutExpired as exc:
            raise ToolTimeout(f"{tool} timed out after {timeout:g}s") from exc
        except OSError as exc:
            raise ToolUnavailable(f"{tool} could not be started: {exc}") from exc
    if not invocation.ok_codes(proc.returncode):
        raise ToolFailed(f"{tool} exited with code {proc.returncode}: {proc.stderr.strip()[:300]}")
    output = proc.stdout if invocation.stream == "stdout" else proc.stdout + "\n" + proc.stderr
    known = set(ctx.python_files)
    messages = []
    for msg in invocation.parse(output):
        rel = _relative(msg.file, ctx.root)
        if rel in known:
            messages.append(LinterMessage(msg.tool, rel, msg.line, msg.code, msg.severity, msg.text))
    return messages
