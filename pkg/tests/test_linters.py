"""Parsers are checked against output captured from real runs of each tool."""

import json

import pytest

import projects
from conftest import requires_linters
from mllint.linters import (
    LinterMessage,
    ToolOutputError,
    ToolUnavailable,
    parse_bandit_json,
    parse_black_output,
    parse_isort_output,
    parse_mypy_lines,
    parse_pylint_json,
    run_linter,
)
from mllint.scanner import scan

# pylint 3, `pylint --output-format=json a.py` on a module with unused imports
PYLINT_OUTPUT = json.dumps([
    {"type": "convention", "module": "a", "obj": "", "line": 1, "column": 0, "endLine": None,
     "endColumn": None, "path": "a.py", "symbol": "missing-module-docstring",
     "message": "Missing module docstring", "message-id": "C0114"},
    {"type": "warning", "module": "a", "obj": "", "line": 1, "column": 0, "endLine": 1, "endColumn": 10,
     "path": "a.py", "symbol": "unused-import", "message": "Unused import sys", "message-id": "W0611"},
    {"type": "error", "module": "a", "obj": "", "line": 2, "column": 0, "endLine": 2, "endColumn": 10,
     "path": "a.py", "symbol": "import-error", "message": "Unable to import 'nope'", "message-id": "E0401"},
], indent=4)

MYPY_OUTPUT = (
    'a.py:5: error: Incompatible return value type (got "int", expected "str")  [return-value]\n'
    'a.py:7: note: See https://mypy.readthedocs.io for more info\n'
    "pkg/b.py:3:9: error: Name \"x\" is not defined  [name-defined]\n"
)

BLACK_OUTPUT = (
    "would reformat /tmp/lt/a.py\n\nOh no! \U0001f4a5 \U0001f494 \U0001f4a5\n"
    "1 file would be reformatted, 1 file would be left unchanged.\n"
)

ISORT_OUTPUT = "ERROR: /tmp/lt/a.py Imports are incorrectly sorted and/or formatted.\nSkipped 1 files\n"

BANDIT_OUTPUT = json.dumps({
    "errors": [],
    "metrics": {"_totals": {"loc": 6}},
    "results": [
        {"filename": "/tmp/lt/a.py", "issue_severity": "LOW", "issue_confidence": "HIGH",
         "issue_text": "Use of assert detected. The enclosed code will be removed when compiling to "
                       "optimised byte code.",
         "line_number": 4, "test_id": "B101", "test_name": "assert_used"},
    ],
})


def test_pylint_record():
    single = json.dumps([json.loads(PYLINT_OUTPUT)[0]])
    assert parse_pylint_json(single) == [
        LinterMessage("pylint", "a.py", 1, "C0114", "info", "Missing module docstring")
    ]


def test_pylint_counts_and_severities():
    messages = parse_pylint_json(PYLINT_OUTPUT)
    assert len(messages) == 3
    assert [m.severity for m in messages] == ["info", "warning", "error"]


def test_mypy_lines():
    messages = parse_mypy_lines(MYPY_OUTPUT)
    assert messages[0] == LinterMessage(
        "mypy", "a.py", 5, "return-value", "error",
        'Incompatible return value type (got "int", expected "str")',
    )
    assert messages[1].file == "pkg/b.py" and messages[1].line == 3
    assert len(messages) == 2  # the note is not an issue record


def test_black_output():
    (msg,) = parse_black_output(BLACK_OUTPUT)
    assert msg.file == "/tmp/lt/a.py" and msg.text == "would reformat"


def test_isort_output():
    (msg,) = parse_isort_output(ISORT_OUTPUT)
    assert msg.file == "/tmp/lt/a.py"


def test_bandit_json():
    (msg,) = parse_bandit_json(BANDIT_OUTPUT)
    assert (msg.code, msg.line, msg.severity) == ("B101", 4, "info")


@pytest.mark.parametrize("parser", [
    parse_pylint_json, parse_mypy_lines, parse_bandit_json, parse_black_output, parse_isort_output,
])
def test_empty_input(parser):
    assert parser("") == []


@pytest.mark.parametrize("parser, text", [
    (parse_pylint_json, "{not json"),
    (parse_pylint_json, '{"a": 1}'),
    (parse_bandit_json, "[1, 2"),
    (parse_mypy_lines, "Traceback (most recent call last):"),
])
def test_undecodable_output(parser, text):
    with pytest.raises(ToolOutputError) as info:
        parser(text)
    assert info.value.sample


def test_unavailable_tool(tmp_path, monkeypatch):
    projects.write(tmp_path, {"a.py": "x = 1\n"})
    ctx = scan(tmp_path)
    monkeypatch.setenv("PATH", str(tmp_path / "empty"))
    with pytest.raises(ToolUnavailable):
        run_linter("pylint", ctx)


DIRTY = {
    "pkg/a.py": "import sys\nimport os\ndef f(x:int)->str:\n    assert x\n    return x\n",
    "pkg/b.py": '"""Doc."""\n',
}


@requires_linters
@pytest.mark.linters
def test_real_runs_on_dirty_project(tmp_path):
    projects.write(tmp_path, DIRTY)
    ctx = scan(tmp_path)
    before = projects.tree_digest(tmp_path)
    black = run_linter("black", ctx)
    assert [(m.file, m.text) for m in black] == [("pkg/a.py", "would reformat")]
    assert [m.file for m in run_linter("isort", ctx)] == ["pkg/a.py"]
    assert [m.code for m in run_linter("bandit", ctx)] == ["B101"]
    assert [m.code for m in run_linter("mypy", ctx)] == ["return-value"]
    pylint_codes = sorted(m.code for m in run_linter("pylint", ctx))
    assert {"C0114", "W0611"} <= set(pylint_codes)
    assert projects.tree_digest(tmp_path) == before


@requires_linters
@pytest.mark.linters
def test_real_pylint_on_empty_module_round_trips(tmp_path):
    projects.write(tmp_path, {"empty.py": ""})
    ctx = scan(tmp_path)
    import subprocess

    raw = subprocess.run(["pylint", "--output-format=json", "empty.py"], cwd=tmp_path,
                         capture_output=True, text=True).stdout
    expected = len(json.loads(raw)) if raw.strip() else 0
    assert len(run_linter("pylint", ctx)) == expected
