"""Pretty-printing of Markdown reports for a terminal.

Only SGR codes 0 (reset), 1 (bold), 31, 32 and 33 (red, green, yellow) are emitted.
"""

from __future__ import annotations

import re

RESET = "\x1b[0m"
BOLD = "\x1b[1m"
RED = "\x1b[31m"
GREEN = "\x1b[32m"
YELLOW = "\x1b[33m"

DEFAULT_WIDTH = 100
MIN_COLUMN_WIDTH = 3

ANSI_RE = re.compile(r"\x1b\[[0-9;]*m")
_HEADING_RE = re.compile(r"^(#{1,6})\s+(.*?)\s*#*\s*$")
_BOLD_RE = re.compile(r"\*\*(.+?)\*\*")
_SCORE_RE = re.compile(r"\b\d{1,3}(?:\.\d+)?%")
_SCORE_CELL_RE = re.compile(r"^\d{1,3}(?:\.\d+)?%$")
_SEPARATOR_CELL_RE = re.compile(r"^:?-+:?$")


def strip_ansi(text: str) -> str:
    return ANSI_RE.sub("", text)


def score_color(score: float) -> str:
    if score >= 80:
        return GREEN
    if score >= 40:
        return YELLOW
    return RED


def _colorize_scores(text: str, after: str = "") -> str:
    def paint(match: re.Match) -> str:
        return f"{score_color(float(match.group()[:-1]))}{match.group()}{RESET}{after}"

    return _SCORE_RE.sub(paint, text)


def split_row(line: str) -> list[str]:
    inner = line.strip()
    if inner.startswith("|"):
        inner = inner[1:]
    if inner.endswith("|"):
        inner = inner[:-1]
    return [cell.strip() for cell in inner.split("|")]


def _fit(widths: list[int], limit: int) -> list[int]:
    widths = list(widths)
    overhead = 3 * len(widths) + 1
    while sum(widths) + overhead > limit:
        i = max(range(len(widths)), key=lambda k: widths[k])
        if widths[i] <= MIN_COLUMN_WIDTH:
            break
        widths[i] -= 1
    return widths


def _truncate(cell: str, width: int) -> str:
    return cell if len(cell) <= width else cell[: width - 1] + "…"


def _render_table(rows: list[str], color: bool, width: int) -> list[str]:
    cells = [split_row(r) for r in rows]
    n_cols = max(len(r) for r in cells)
    cells = [r + [""] * (n_cols - len(r)) for r in cells]
    separator_rows = {i for i, r in enumerate(cells) if all(_SEPARATOR_CELL_RE.match(c) for c in r if c)}
    natural = [max((len(r[k]) for i, r in enumerate(cells) if i not in separator_rows), default=0)
               for k in range(n_cols)]
    widths = _fit([max(w, 1) for w in natural], width)
    right = [False] * n_cols
    for i in separator_rows:
        right = [c.endswith(":") and not c.startswith(":") for c in cells[i]]
        break

    out = []
    for i, row in enumerate(cells):
        if i in separator_rows:
            out.append("|" + "|".join("-" * (w + 2) for w in widths) + "|")
            continue
        rendered = []
        for k, cell in enumerate(row):
            text = _truncate(cell, widths[k])
            pad = " " * (widths[k] - len(text))
            if color and i == 0:
                styled = f"{BOLD}{text}{RESET}"
            elif color and _SCORE_CELL_RE.match(text):
                styled = f"{score_color(float(text[:-1]))}{text}{RESET}"
            else:
                styled = text
            rendered.append(pad + styled if right[k] else styled + pad)
        out.append("| " + " | ".join(rendered) + " |")
    return out


def _render_line(line: str, color: bool) -> str:
    heading = _HEADING_RE.match(line)
    if heading:
        text = heading.group(2)
        if not color:
            return text
        return f"{BOLD}{_colorize_scores(text, after=BOLD)}{RESET}"
    if not color:
        return _BOLD_RE.sub(r"\1", line)
    return _BOLD_RE.sub(lambda m: f"{BOLD}{_colorize_scores(m.group(1), after=BOLD)}{RESET}", line)


def render_terminal(markdown: str, color: bool = True, width: int = DEFAULT_WIDTH) -> str:
    """Style a Markdown document for display: bold headings, aligned tables, coloured scores.

    Markdown syntax markers for headings and bold text are dropped; everything
    else is kept verbatim. Tables wider than ``width`` have cells truncated with ``…``.
    """
    out: list[str] = []
    table: list[str] = []
    in_code = False
    for line in markdown.splitlines():
        if line.lstrip().startswith("```"):
            in_code = not in_code
        if not in_code and line.lstrip().startswith("|"):
            table.append(line)
            continue
        if table:
            out += _render_table(table, color, width)
            table = []
        out.append(line if in_code or line.lstrip().startswith("```") else _render_line(line, color))
    if table:
        out += _render_table(table, color, width)
    return "\n".join(out) + ("\n" if markdown.endswith("\n") else "")
